"""JSON encodings shared by the CLI and the library.

Complex numbers are always written as ``[re, im]`` pairs.  On input, an
array entry may be a plain number or such a pair, so real documents stay
readable.
"""
import json
import os
import tempfile

import numpy as np

from lpv_loewner.errors import InvalidArgumentError


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(obj):
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2 or not all(_is_number(v) for v in obj):
            raise InvalidArgumentError(f"complex value must be [re, im], got {obj!r}")
        return complex(float(obj[0]), float(obj[1]))
    if _is_number(obj):
        return complex(float(obj))
    raise InvalidArgumentError(f"not a number: {obj!r}")


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def encode_array(a):
    """Nested lists; complex arrays get ``[re, im]`` leaves."""
    a = np.asarray(a)
    if a.dtype.kind == "c":
        return np.stack([a.real, a.imag], axis=-1).tolist()
    return a.astype(float).tolist()


def decode_array(obj, ndim):
    """Decode an `ndim`-dimensional array, rejecting ragged input.

    Leaves may be numbers or ``[re, im]`` pairs; the result is real unless
    some leaf is a pair.
    """
    is_complex = False

    def walk(x, depth):
        nonlocal is_complex
        if depth == ndim:
            if isinstance(x, (list, tuple)):
                is_complex = True
            return decode_complex(x)
        if not isinstance(x, (list, tuple)):
            raise InvalidArgumentError(f"expected a {ndim}-D array, found scalar at depth {depth}")
        return [walk(v, depth + 1) for v in x]

    nested = walk(obj, 0)
    try:
        arr = np.array(nested, dtype=complex)
    except ValueError:
        raise InvalidArgumentError("ragged matrix") from None
    if arr.ndim != ndim:
        raise InvalidArgumentError(f"ragged or malformed {ndim}-D array")
    return arr if is_complex else arr.real.copy()


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_json(path, doc):
    write_text(path, json.dumps(doc, indent=1) + "\n")


def write_text(path, text):
    """Write atomically: temp file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
