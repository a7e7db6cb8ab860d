import json

import numpy as np
import pytest

from lpv_loewner.errors import InvalidArgumentError
from lpv_loewner.serialization import decode_array, decode_complex, encode_array, read_json, write_json
from lpv_loewner.pencil import ReducedLpv
from lpv_loewner.system import LpvSsa


def test_complex_array_round_trip():
    a = np.array([[1 + 2j, -0.5j], [3.0, 1e-300 + 1e300j]])
    doc = json.loads(json.dumps(encode_array(a)))
    assert doc[0][0] == [1.0, 2.0]
    assert np.array_equal(decode_array(doc, 2), a)


def test_real_array_stays_real():
    back = decode_array([[1, 2], [3, 4.5]], 2)
    assert back.dtype == float


def test_mixed_leaves():
    assert np.array_equal(decode_array([1.0, [0.0, 2.0]], 1), [1.0, 2j])


@pytest.mark.parametrize("obj, ndim", [([[1, 2], [3]], 2), ([1, [2, 3, 4]], 1), ([[1, 2], 3], 2), ("x", 1)])
def test_malformed_arrays_rejected(obj, ndim):
    with pytest.raises(InvalidArgumentError):
        decode_array(obj, ndim)


@pytest.mark.parametrize("obj", [[1.0], [1.0, 2.0, 3.0], "1+2j", True, None])
def test_bad_complex_rejected(obj):
    with pytest.raises(InvalidArgumentError):
        decode_complex(obj)


def test_write_json_is_atomic_and_leaves_no_temp(tmp_path):
    path = tmp_path / "sub" / "doc.json"
    write_json(path, {"a": [1, 2]})
    write_json(path, {"a": [3]})
    assert read_json(path) == {"a": [3]}
    assert [p.name for p in path.parent.iterdir()] == ["doc.json"]


def test_system_document_rejects_D_and_unknown_keys(bench_sys):
    doc = bench_sys.to_dict()
    assert LpvSsa.from_dict({**doc, "D": [[0.0]]}) == bench_sys
    with pytest.raises(InvalidArgumentError):
        LpvSsa.from_dict({**doc, "D": [[1.0]]})
    with pytest.raises(InvalidArgumentError):
        LpvSsa.from_dict({**doc, "B_1": [1.0, 0.0, 0.0]})


def test_complex_entries_only_in_reduced_models():
    sys = LpvSsa([[[-1 + 1j, 0], [0, -2]], [[0, 1j], [1, 0]]], [1, 1j], [1, 0])
    doc = json.loads(json.dumps(sys.to_dict()))
    with pytest.raises(InvalidArgumentError, match="complex"):
        LpvSsa.from_dict(doc)
    back = ReducedLpv.from_dict(doc)
    assert all(np.array_equal(a, b) for a, b in zip(back.A, sys.A))
