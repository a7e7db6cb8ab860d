"""Resolvents and generalized transfer functions of LPV-SSA models.

For a word ``q = q_1 ... q_k`` over ``{1..n_p}`` the generalized transfer
function is::

    H_q(s_0, ..., s_k) = C Phi(s_k) A_{q_k} Phi(s_{k-1}) ... A_{q_1} Phi(s_0) B

with ``Phi(s) = (s I - A_0)^{-1}``.  Everything here goes through dense LU
solves; no inverse is ever formed.
"""
from dataclasses import dataclass

import numpy as np

from lpv_loewner._linalg import checked_solve
from lpv_loewner.errors import IncompleteDataError, InvalidArgumentError, LoewnerError, SingularResolventError
from lpv_loewner.serialization import decode_complex, encode_complex
from lpv_loewner.system import as_word


def _shifted(sys, s):
    n = sys.n_x
    return s * np.eye(n, dtype=complex) - sys.A[0]


def resolvent_apply(sys, s, v):
    """Solve ``(s I - A_0) x = v``.

    Raises
    ------
    SingularResolventError
        If the LU condition estimate of ``s I - A_0`` exceeds ``1/(100 eps)``.
    """
    v = np.asarray(v)
    if v.shape != (sys.n_x,):
        raise InvalidArgumentError(f"vector has shape {v.shape}, expected ({sys.n_x},)")
    s = complex(s)
    return checked_solve(_shifted(sys, s), v.astype(complex),
                         on_singular=lambda rc: SingularResolventError(s, rc))


def resolvent_apply_left(sys, s, w):
    """Row-vector product ``w Phi(s)`` (plain transpose, no conjugation)."""
    s = complex(s)
    return checked_solve(_shifted(sys, s), np.asarray(w).astype(complex), trans=1,
                         on_singular=lambda rc: SingularResolventError(s, rc))


def eval_H0(sys, s0):
    """Zeroth transfer function ``C Phi(s_0) B``."""
    return complex(sys.C @ resolvent_apply(sys, s0, sys.B))


def eval_Hword(sys, word, args):
    """Generalized transfer function ``H_word(s_0, ..., s_k)``.

    ``args[0]`` pairs with the resolvent next to ``B``; ``args[j]`` follows
    ``A_{word[j-1]}``.  The empty word gives :func:`eval_H0`.

    >>> from lpv_loewner.system import LpvSsa
    >>> sys = LpvSsa([[[-1.0]], [[2.0]]], [1.0], [1.0])
    >>> eval_Hword(sys, (1,), (1, 1))
    (0.5+0j)
    """
    word = as_word(word, sys.n_p)
    args = tuple(args)
    if len(args) != len(word) + 1:
        raise InvalidArgumentError(
            f"word of length {len(word)} needs {len(word) + 1} arguments, got {len(args)}")
    x = resolvent_apply(sys, args[0], sys.B)
    for q, s in zip(word, args[1:]):
        x = resolvent_apply(sys, s, sys.A[q] @ x)
    return complex(sys.C @ x)


@dataclass(frozen=True)
class TransferSample:
    """One evaluated request; `error` holds the exception when it failed."""

    word: tuple
    args: tuple
    value: complex = None
    error: Exception = None

    @property
    def ok(self):
        return self.error is None

    def to_dict(self):
        return {"word": list(self.word), "args": [encode_complex(a) for a in self.args],
                "value": encode_complex(self.value)}

    @classmethod
    def from_dict(cls, doc):
        try:
            word = tuple(int(q) for q in doc["word"])
            args = tuple(decode_complex(a) for a in doc["args"])
            value = decode_complex(doc["value"])
        except (KeyError, TypeError) as e:
            raise InvalidArgumentError(f"malformed sample {doc!r}: {e}") from None
        if len(args) != len(word) + 1:
            raise InvalidArgumentError(f"sample word {list(word)} has {len(args)} arguments")
        return cls(word, args, value)


def eval_batch(sys, requests):
    """Evaluate ``(word, args)`` requests in order.

    A failing request yields a :class:`TransferSample` with `error` set; the
    rest of the batch still runs.
    """
    out = []
    for word, args in requests:
        word, args = tuple(word), tuple(complex(a) for a in args)
        try:
            out.append(TransferSample(word, args, eval_Hword(sys, word, args)))
        except LoewnerError as e:
            out.append(TransferSample(word, args, error=e))
    return out


class SampleSet:
    """Lookup table of generalized transfer-function samples.

    Keys are ``(word, args)`` with exact complex arguments; instances are
    callable with the same signature as ``eval_Hword(sys, ...)`` minus the
    system, so they can stand in for a model as a sample oracle.
    """

    def __init__(self, samples=()):
        self._values = {}
        for smp in samples:
            if isinstance(smp, TransferSample) and not smp.ok:
                continue
            self.add(smp.word, smp.args, smp.value)

    @staticmethod
    def key(word, args):
        return tuple(int(q) for q in word), tuple(complex(a) for a in args)

    def add(self, word, args, value):
        self._values[self.key(word, args)] = complex(value)

    def __len__(self):
        return len(self._values)

    def __contains__(self, item):
        return self.key(*item) in self._values

    def __iter__(self):
        return iter(self._values)

    def get(self, word, args):
        return self._values.get(self.key(word, args))

    def __call__(self, word, args):
        value = self.get(word, args)
        if value is None:
            raise IncompleteDataError([self.key(word, args)])
        return value

    def samples(self):
        return [TransferSample(w, a, v) for (w, a), v in self._values.items()]

    def to_list(self):
        return [smp.to_dict() for smp in self.samples()]

    @classmethod
    def from_list(cls, docs):
        if not isinstance(docs, list):
            raise InvalidArgumentError("sample set must be a JSON list")
        return cls(TransferSample.from_dict(d) for d in docs)
