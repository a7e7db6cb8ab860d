"""Affine LPV state-space models.

An LPV-SSA with a single input, a single output, constant ``B`` and ``C``
and zero feedthrough::

    x'(t) = (A_0 + p_1(t) A_1 + ... + p_np(t) A_np) x(t) + B u(t)
    y(t)  = C x(t)

Words index products of the ``A_i``.  The product for a word
``s = s_1 s_2 ... s_n`` is taken with the *last* letter leftmost::

    A_s = A_{s_n} A_{s_{n-1}} ... A_{s_1}

so ``s_1`` is the first matrix applied to ``B``.
"""
from dataclasses import dataclass

import numpy as np

from lpv_loewner.errors import InvalidArgumentError


def _frozen(a):
    a = np.array(a)
    if a.dtype.kind in "biu":
        a = a.astype(float)
    a.setflags(write=False)
    return a


def _as_vector(a):
    a = _frozen(a)
    if a.ndim == 2 and 1 in a.shape:
        a = _frozen(a.ravel())
    return a


@dataclass(frozen=True, eq=False)
class LpvSsa:
    """Affine LPV state-space system ``({A_i}, B, C)``.

    Parameters
    ----------
    A
        Sequence ``A_0, A_1, ..., A_np`` of square matrices.
    B
        Input column, stored as a 1-D array of length ``n_x``.
    C
        Output row, stored as a 1-D array of length ``n_x``.

    Construction only normalizes arrays; call :func:`validate` (or use
    :meth:`from_dict`, which does) to check the model invariants.
    """

    A: tuple
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(_frozen(a) for a in self.A))
        object.__setattr__(self, "B", _as_vector(self.B))
        object.__setattr__(self, "C", _as_vector(self.C))

    @property
    def n_x(self):
        return self.A[0].shape[0] if self.A and self.A[0].ndim == 2 else 0

    @property
    def n_p(self):
        return len(self.A) - 1

    @property
    def dtype(self):
        return np.result_type(*self.A, self.B, self.C)

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return (len(self.A) == len(other.A)
                and all(np.array_equal(a, b) for a, b in zip(self.A, other.A))
                and np.array_equal(self.B, other.B) and np.array_equal(self.C, other.C))

    __hash__ = None

    # -- serialization -------------------------------------------------

    def to_dict(self):
        from lpv_loewner.serialization import encode_array
        return {
            "n_x": self.n_x,
            "n_p": self.n_p,
            "A": [encode_array(a) for a in self.A],
            "B": encode_array(self.B),
            "C": encode_array(self.C),
        }

    @classmethod
    def from_dict(cls, doc):
        """Parse and validate the JSON system document.

        Raises :class:`InvalidArgumentError` on ragged matrices, declared
        dimensions that disagree with the data, keys outside the model class
        (nonzero ``D``, parameter-dependent ``B``/``C``), or any failed
        invariant.
        """
        from lpv_loewner.serialization import decode_array
        doc = dict(doc)
        _reject_out_of_class(doc, allowed=cls._json_keys)
        try:
            A = [decode_array(a, 2) for a in doc["A"]]
            B = decode_array(doc["B"], 1)
            C = decode_array(doc["C"], 1)
        except KeyError as e:
            raise InvalidArgumentError(f"system document missing key {e.args[0]!r}") from None
        sys = cls._from_parts(A, B, C, doc)
        problems = validate(sys)
        if "n_x" in doc and doc["n_x"] != sys.n_x:
            problems.append(f"declared n_x={doc['n_x']} but A[0] is {sys.n_x}x{sys.n_x}")
        if "n_p" in doc and doc["n_p"] != sys.n_p:
            problems.append(f"declared n_p={doc['n_p']} but {len(A)} matrices given")
        if problems:
            raise InvalidArgumentError("invalid system: " + "; ".join(problems))
        return sys

    _json_keys = ("n_x", "n_p", "A", "B", "C", "D")

    @classmethod
    def _from_parts(cls, A, B, C, doc):
        return cls(A, B, C)


def _reject_out_of_class(doc, allowed):
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise InvalidArgumentError(
            f"unsupported system keys {extra}: only constant B, C and zero D are supported")
    if "D" in doc:
        D = np.asarray(doc["D"], dtype=float)
        if np.any(D != 0):
            raise InvalidArgumentError("nonzero D is not supported (feedthrough must be zero)")


def validate(sys, *, allow_complex=None):
    """Check the model invariants.

    Returns a list of human-readable diagnostics; an empty list means the
    system is valid.  Complex entries are allowed only for reduced models
    unless `allow_complex` says otherwise.
    """
    if allow_complex is None:
        allow_complex = getattr(sys, "complex_entries_allowed", False)
    problems = []
    if len(sys.A) == 0:
        return ["A must contain at least A[0]"]
    A0 = sys.A[0]
    if A0.ndim != 2 or A0.shape[0] != A0.shape[1] or A0.shape[0] == 0:
        problems.append(f"A[0] must be a non-empty square matrix, got shape {A0.shape}")
        n = None
    else:
        n = A0.shape[0]
    for i, a in enumerate(sys.A[1:], start=1):
        if n is not None and a.shape != (n, n):
            problems.append(f"A[{i}] dimension mismatch: expected {(n, n)}, got {a.shape}")
    if sys.B.ndim != 1:
        problems.append(f"B must be a single column (one input), got shape {sys.B.shape}")
    elif n is not None and sys.B.shape[0] != n:
        problems.append(f"B dimension mismatch: expected {n} rows, got {sys.B.shape[0]}")
    if sys.C.ndim != 1:
        problems.append(f"C must be a single row (one output), got shape {sys.C.shape}")
    elif n is not None and sys.C.shape[0] != n:
        problems.append(f"C dimension mismatch: expected {n} columns, got {sys.C.shape[0]}")
    named = [(f"A[{i}]", a) for i, a in enumerate(sys.A)] + [("B", sys.B), ("C", sys.C)]
    for name, a in named:
        if a.dtype.kind not in "fc":
            problems.append(f"non-numeric entry in {name}")
            continue
        if not np.all(np.isfinite(a)):
            problems.append(f"non-finite entry in {name}")
        if not allow_complex and a.dtype.kind == "c" and np.any(a.imag != 0):
            problems.append(f"complex entry in {name}")
    return problems


def check(sys):
    """Raise :class:`InvalidArgumentError` unless :func:`validate` is clean."""
    problems = validate(sys)
    if problems:
        raise InvalidArgumentError("invalid system: " + "; ".join(problems))
    return sys


def as_word(word, n_p, *, allow_zero=False):
    """Normalize `word` to a tuple of ints and check its alphabet.

    Letters must lie in ``{1..n_p}``, or in ``{0..n_p}`` with `allow_zero`.
    A string such as ``"012"`` is read one digit per letter.
    """
    if isinstance(word, str):
        letters = tuple(int(ch) for ch in word)
    else:
        letters = tuple(int(q) for q in word)
    lo = 0 if allow_zero else 1
    for q in letters:
        if not lo <= q <= n_p:
            raise InvalidArgumentError(f"word letter {q} outside alphabet {{{lo},...,{n_p}}}")
    return letters


def eval_A(sys, p):
    """Scheduling-dependent state matrix ``A_0 + sum_i p_i A_i``."""
    p = np.asarray(p, dtype=float).ravel()
    if p.shape[0] != sys.n_p:
        raise InvalidArgumentError(f"scheduling point has length {p.shape[0]}, system has n_p={sys.n_p}")
    out = np.array(sys.A[0], copy=True)
    for pi, Ai in zip(p, sys.A[1:]):
        out = out + pi * Ai
    return out


def generating_coefficient(sys, word):
    """Generating-series coefficient ``C A_s B`` for `word` over ``{0..n_p}``.

    The empty word returns ``C B``; ``"01"`` returns ``C A_1 A_0 B``.
    """
    word = as_word(word, sys.n_p, allow_zero=True)
    x = sys.B
    for q in word:
        x = sys.A[q] @ x
    return sys.C @ x


def random_system(rng, n_x, n_p, *, scale=0.5, stable=True):
    """Seeded random system for tests and experiments.

    ``A_0`` is shifted so its spectrum lies left of ``-0.5`` when `stable`.
    Scheduling matrices are scaled by `scale`.
    """
    A0 = rng.standard_normal((n_x, n_x))
    if stable:
        shift = np.max(np.linalg.eigvals(A0).real) + 0.5 + rng.uniform(0, 1)
        A0 = A0 - shift * np.eye(n_x)
    As = [A0] + [scale * rng.standard_normal((n_x, n_x)) for _ in range(n_p)]
    return LpvSsa(As, rng.standard_normal(n_x), rng.standard_normal(n_x))
