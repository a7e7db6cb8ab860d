"""Loewner pencils for affine LPV systems.

An :class:`InterpolationScheme` fixes left points ``mu_0..mu_N``, right
points ``lambda_0..lambda_N`` and expansion words ``q_left``, ``q_right`` of
length ``N``.  From them come the generalized observability matrix ``O``
(rows ``C Phi(mu_0) A_{q_left[0]} Phi(mu_1) ... Phi(mu_k)``) and the
generalized controllability matrix ``R`` (columns
``Phi(lambda_l) A_{q_right[l-1]} ... Phi(lambda_0) B``), and the pencil::

    E_hat = O R,  A0_hat = O A_0 R,  Ai_hat = O A_i R,  B_hat = O B,  C_hat = C R

The same pencil can be filled in from transfer-function samples alone
(:func:`assemble_from_samples`), which is what makes the method data driven.
"""
from dataclasses import dataclass, field

import numpy as np

from lpv_loewner._linalg import RCOND_MIN, checked_solve, rcond_lu
from lpv_loewner.errors import (DividedDifferenceError, IncompleteDataError, InvalidArgumentError,
                                SingularPencilError, SingularResolventError)
from lpv_loewner.serialization import decode_complex, encode_array, encode_complex
from lpv_loewner.system import LpvSsa, _reject_out_of_class, as_word
from lpv_loewner.transfer import SampleSet, eval_Hword, resolvent_apply, resolvent_apply_left


@dataclass(frozen=True)
class InterpolationScheme:
    """Interpolation points and expansion words for an order ``N + 1`` pencil."""

    mu: tuple
    lam: tuple
    q_left: tuple
    q_right: tuple

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(complex(z) for z in self.mu))
        object.__setattr__(self, "lam", tuple(complex(z) for z in self.lam))
        object.__setattr__(self, "q_left", tuple(int(q) for q in self.q_left))
        object.__setattr__(self, "q_right", tuple(int(q) for q in self.q_right))

    @property
    def N(self):
        return len(self.mu) - 1

    def problems(self, n_p=None, require_disjoint=True):
        """Invariant violations as a list of messages (empty when valid).

        Disjointness of left and right points matters only for divided
        differences; intrusive assembly can skip it.
        """
        out = []
        N = self.N
        if len(self.mu) < 1:
            out.append("at least one left point is required")
        if len(self.lam) != len(self.mu):
            out.append(f"{len(self.mu)} left points but {len(self.lam)} right points")
        if len(set(self.mu)) != len(self.mu):
            out.append("left points must be distinct")
        if len(set(self.lam)) != len(self.lam):
            out.append("right points must be distinct")
        if require_disjoint and set(self.mu) & set(self.lam):
            out.append("points must be disjoint")
        for name, word in (("q_left", self.q_left), ("q_right", self.q_right)):
            if len(word) != N:
                out.append(f"{name} must have length N={N}, got {len(word)}")
            hi = n_p if n_p is not None else max(word, default=1)
            if any(not 1 <= q <= hi for q in word):
                out.append(f"{name} letters must lie in {{1,...,{n_p}}}")
        return out

    def check(self, n_p=None, require_disjoint=True):
        problems = self.problems(n_p, require_disjoint)
        if any(p == "points must be disjoint" for p in problems):
            j, i = next((j, i) for j, m in enumerate(self.mu) for i, l in enumerate(self.lam) if m == l)
            err = DividedDifferenceError(j, i, self.mu[j])
            err.args = ("; ".join(problems),)
            raise err
        if problems:
            raise InvalidArgumentError("invalid scheme: " + "; ".join(problems))
        return self

    # -- word/argument bookkeeping --------------------------------------

    def left_word(self, k):
        """``(q_left_k, ..., q_left_1)``: the letters of row ``k`` of ``O``."""
        return tuple(reversed(self.q_left[:k]))

    def right_word(self, l):
        """``(q_right_1, ..., q_right_l)``."""
        return self.q_right[:l]

    def left_args(self, k):
        """``(mu_k, ..., mu_0)``."""
        return tuple(reversed(self.mu[:k + 1]))

    def right_args(self, l):
        """``(lambda_0, ..., lambda_l)``."""
        return self.lam[:l + 1]

    def alpha_key(self, k, l):
        """Sample behind ``alpha_{k,l} = O_{k+1} A_{q_right_l} R_l``."""
        return (self.right_word(l) + self.left_word(k), self.lam[:l] + self.left_args(k))

    def beta_key(self, k, l):
        """Sample behind ``beta_{k,l} = O_k A_{q_left_k} R_{l+1}``."""
        return (self.right_word(l) + self.left_word(k), self.right_args(l) + tuple(reversed(self.mu[:k])))

    def ai_key(self, k, l, i):
        """Sample behind ``(Ai_hat)_{k+1,l+1} = O_{k+1} A_i R_{l+1}``."""
        return (self.right_word(l) + (i,) + self.left_word(k), self.right_args(l) + self.left_args(k))

    def required_samples(self, n_p):
        """Every ``(word, args)`` needed to assemble the pencil, without duplicates.

        ``B_hat`` and ``C_hat`` reuse ``alpha_{k,0}`` and ``beta_{0,l}``.
        """
        seen = {}
        N = self.N
        for k in range(N + 1):
            for l in range(N + 1):
                seen.setdefault(self.alpha_key(k, l), None)
                seen.setdefault(self.beta_key(k, l), None)
        for i in range(1, n_p + 1):
            for k in range(N + 1):
                for l in range(N + 1):
                    seen.setdefault(self.ai_key(k, l, i), None)
        return list(seen)

    def to_dict(self):
        return {"mu": [encode_complex(z) for z in self.mu],
                "lambda": [encode_complex(z) for z in self.lam],
                "q_left": list(self.q_left), "q_right": list(self.q_right)}

    @classmethod
    def from_dict(cls, doc):
        try:
            return cls([decode_complex(z) for z in doc["mu"]], [decode_complex(z) for z in doc["lambda"]],
                       doc["q_left"], doc["q_right"])
        except (KeyError, TypeError) as e:
            raise InvalidArgumentError(f"malformed scheme: {e}") from None


@dataclass(frozen=True, eq=False)
class GeneralizedPencil:
    """Blocks ``E_hat, A0_hat, (A1_hat..Anp_hat), B_hat, C_hat`` of the LPV Loewner pencil."""

    E_hat: np.ndarray
    A0_hat: np.ndarray
    Ai_hat: tuple
    B_hat: np.ndarray
    C_hat: np.ndarray
    scheme: InterpolationScheme = None
    mode: str = None

    @property
    def size(self):
        return self.E_hat.shape[0]

    @property
    def n_p(self):
        return len(self.Ai_hat)

    def blocks(self):
        """``{name: array}`` for every block, ``A1_hat`` onwards numbered from 1."""
        out = {"E_hat": self.E_hat, "A0_hat": self.A0_hat}
        out.update({f"A{i}_hat": a for i, a in enumerate(self.Ai_hat, start=1)})
        out.update({"B_hat": self.B_hat, "C_hat": self.C_hat})
        return out

    def to_dict(self):
        doc = {"E_hat": encode_array(self.E_hat), "A0_hat": encode_array(self.A0_hat),
               "Ai_hat": [encode_array(a) for a in self.Ai_hat],
               "B_hat": encode_array(self.B_hat), "C_hat": encode_array(self.C_hat)}
        doc["provenance"] = {"mode": self.mode,
                             "scheme": self.scheme.to_dict() if self.scheme else None}
        return doc


@dataclass(frozen=True, eq=False)
class ReducedLpv(LpvSsa):
    """Reduced LPV model ``x' = (A~_0 + sum p_i A~_i) x + B~ u, y = C~ x``.

    Entries may be complex.  `provenance` records the scheme, order, assembly
    mode and projection choice.
    """

    provenance: dict = field(default_factory=dict)

    complex_entries_allowed = True
    _json_keys = LpvSsa._json_keys + ("provenance",)

    def to_dict(self):
        doc = super().to_dict()
        doc["provenance"] = self.provenance
        return doc

    @classmethod
    def _from_parts(cls, A, B, C, doc):
        return cls(A, B, C, provenance=doc.get("provenance", {}))


def as_oracle(source):
    """Wrap a model or a sample collection as ``f(word, args) -> complex``."""
    if isinstance(source, LpvSsa):
        return lambda word, args: eval_Hword(source, word, args)
    if isinstance(source, SampleSet) or callable(source):
        return source
    return SampleSet(source)


# -- intrusive assembly ---------------------------------------------------

def build_observability(sys, scheme):
    """Generalized observability matrix ``O`` of shape ``(N+1, n_x)``.

    Rows follow ``O_1 = C Phi(mu_0)``, ``O_{k+1} = O_k A_{q_left_k} Phi(mu_k)``.
    """
    rows = []
    row = sys.C.astype(complex)
    for k, mu in enumerate(scheme.mu):
        if k > 0:
            row = row @ sys.A[scheme.q_left[k - 1]]
        row = resolvent_apply_left(sys, mu, row)
        rows.append(row)
    return np.array(rows)


def build_controllability(sys, scheme):
    """Generalized controllability matrix ``R`` of shape ``(n_x, N+1)``.

    Columns follow ``R_1 = Phi(lambda_0) B``,
    ``R_{l+1} = Phi(lambda_l) A_{q_right_l} R_l``.
    """
    cols = []
    col = sys.B.astype(complex)
    for l, lam in enumerate(scheme.lam):
        if l > 0:
            col = sys.A[scheme.q_right[l - 1]] @ col
        col = resolvent_apply(sys, lam, col)
        cols.append(col)
    return np.array(cols).T


def assemble_intrusive(sys, scheme):
    """Pencil from the state-space matrices: ``E_hat = O R``, ``A_i_hat = O A_i R`` etc."""
    scheme.check(sys.n_p, require_disjoint=False)
    O = build_observability(sys, scheme)
    R = build_controllability(sys, scheme)
    return GeneralizedPencil(
        E_hat=O @ R,
        A0_hat=O @ sys.A[0] @ R,
        Ai_hat=tuple(O @ Ai @ R for Ai in sys.A[1:]),
        B_hat=O @ sys.B,
        C_hat=sys.C @ R,
        scheme=scheme,
        mode="intrusive",
    )


# -- data-driven assembly ---------------------------------------------

def collect_samples(samples, scheme, n_p):
    """Pull every required sample out of `samples`, reporting all gaps at once."""
    oracle = as_oracle(samples)
    table = {}
    missing = []
    for key in scheme.required_samples(n_p):
        try:
            table[key] = complex(oracle(*key))
        except IncompleteDataError:
            missing.append(key)
    if missing:
        raise IncompleteDataError(missing)
    return table


def assemble_from_samples(samples, scheme, n_p):
    """Pencil built only from generalized transfer-function samples.

    `samples` is an :class:`LpvSsa` (used as an exact oracle), a
    :class:`SampleSet`, an iterable of samples, or any callable
    ``(word, args) -> value``.  Entries::

        E_hat[k, l]  = -(alpha_kl - beta_kl) / (mu_k - lambda_l)
        A0_hat[k, l] = -(mu_k alpha_kl - lambda_l beta_kl) / (mu_k - lambda_l)
        Ai_hat[k, l] = H_{q_right_1..q_right_l, i, q_left_k..q_left_1}(lambda_0..lambda_l, mu_k..mu_0)
        B_hat[k] = alpha_k0,  C_hat[l] = beta_0l

    Raises
    ------
    IncompleteDataError
        Listing every required sample that is absent.
    DividedDifferenceError
        If some ``mu_k`` equals some ``lambda_l``.
    """
    scheme.check(n_p)
    table = collect_samples(samples, scheme, n_p)
    size = scheme.N + 1
    E = np.empty((size, size), dtype=complex)
    A0 = np.empty((size, size), dtype=complex)
    Ai = [np.empty((size, size), dtype=complex) for _ in range(n_p)]
    for k, mu in enumerate(scheme.mu):
        for l, lam in enumerate(scheme.lam):
            a = table[scheme.alpha_key(k, l)]
            b = table[scheme.beta_key(k, l)]
            E[k, l] = -(a - b) / (mu - lam)
            A0[k, l] = -(mu * a - lam * b) / (mu - lam)
            for i in range(n_p):
                Ai[i][k, l] = table[scheme.ai_key(k, l, i + 1)]
    B = np.array([table[scheme.alpha_key(k, 0)] for k in range(size)])
    C = np.array([table[scheme.beta_key(0, l)] for l in range(size)])
    return GeneralizedPencil(E, A0, tuple(Ai), B, C, scheme=scheme, mode="data-driven")


# -- reduction ------------------------------------------------------------

def _invert_onto(E, blocks, what):
    lu_rcond = rcond_lu(E)[1]
    if not lu_rcond >= RCOND_MIN:
        raise SingularPencilError(f"{what} numerically singular (rcond={lu_rcond:.3e})", lu_rcond)
    return [checked_solve(E, b) for b in blocks]


def reduce(pencil, r):
    """Reduced LPV model of order `r` from a pencil of size ``N + 1``.

    For ``r = N + 1``: ``A~_i = E_hat^{-1} A_i_hat``, ``B~ = E_hat^{-1} B_hat``,
    ``C~ = C_hat``.  For smaller `r` the blocks are first projected with the
    leading singular vectors ``Y`` of ``[E_hat, A0_hat]`` and ``X`` of
    ``[E_hat; A0_hat]`` (``Y^H (.) X``), then the projected E-block is
    inverted.

    Raises
    ------
    SingularPencilError
        If the (projected) E-block's condition estimate exceeds ``1/(100 eps)``.
    """
    size = pencil.size
    if not 1 <= int(r) <= size:
        raise InvalidArgumentError(f"order {r} outside [1, {size}] (order exceeds N+1)"
                                   if r > size else f"order {r} outside [1, {size}]")
    r = int(r)
    E, As, B, C = pencil.E_hat, (pencil.A0_hat,) + tuple(pencil.Ai_hat), pencil.B_hat, pencil.C_hat
    projection = "none"
    if r < size:
        U, _, _ = np.linalg.svd(np.hstack([E, pencil.A0_hat]))
        _, _, Vh = np.linalg.svd(np.vstack([E, pencil.A0_hat]))
        Yh, X = U[:, :r].conj().T, Vh[:r].conj().T
        E, As, B, C = Yh @ E @ X, tuple(Yh @ a @ X for a in As), Yh @ B, C @ X
        projection = "svd [E_hat, A0_hat] / [E_hat; A0_hat], conjugate transpose"
    *A_red, B_red = _invert_onto(E, list(As) + [B], "E-block" if r < size else "E_hat")
    provenance = {
        "order": r,
        "pencil_size": size,
        "mode": pencil.mode,
        "projection": projection,
        "scheme": pencil.scheme.to_dict() if pencil.scheme else None,
    }
    return ReducedLpv(A_red, B_red, C, provenance=provenance)


# -- interpolation check ----------------------------------------------

@dataclass
class ConditionResult:
    family: str
    k: int
    l: int
    i: int
    word: tuple
    args: tuple
    reference: complex = None
    value: complex = None
    residual: float = None
    status: str = "unevaluable"
    note: str = ""

    def to_dict(self):
        return {
            "family": self.family, "k": self.k, "l": self.l, "i": self.i,
            "word": list(self.word), "args": [encode_complex(a) for a in self.args],
            "reference": None if self.reference is None else encode_complex(self.reference),
            "value": None if self.value is None else encode_complex(self.value),
            "residual": self.residual, "status": self.status, "note": self.note,
        }


@dataclass
class InterpolationReport:
    conditions: list
    tol: float

    @property
    def passed(self):
        """True when every condition passed; always True in informational mode."""
        if self.tol is None:
            return True
        return all(c.status == "pass" for c in self.conditions)

    @property
    def max_residual(self):
        vals = [c.residual for c in self.conditions if c.residual is not None]
        return max(vals) if vals else float("nan")

    def counts(self):
        out = {}
        for c in self.conditions:
            fam = out.setdefault(c.family, {"total": 0, "pass": 0, "fail": 0, "info": 0, "unevaluable": 0})
            fam["total"] += 1
            fam[c.status] += 1
        return out

    def to_dict(self):
        return {"tol": self.tol, "passed": self.passed, "max_residual": self.max_residual,
                "counts": self.counts(), "conditions": [c.to_dict() for c in self.conditions]}


def interpolation_conditions(scheme, n_p):
    """All displayed condition families as ``(family, k, l, i, word, args)``.

    ``beta`` and ``alpha`` families have ``(N+1)^2`` members each, ``A_i``
    has ``n_p (N+1)^2``; duplicates across the first two are kept.
    """
    N = scheme.N
    out = []
    for k in range(N + 1):
        for l in range(N + 1):
            out.append(("beta", k, l, 0) + scheme.beta_key(k, l))
    for k in range(N + 1):
        for l in range(N + 1):
            out.append(("alpha", k, l, 0) + scheme.alpha_key(k, l))
    for i in range(1, n_p + 1):
        for k in range(N + 1):
            for l in range(N + 1):
                out.append(("A_i", k, l, i) + scheme.ai_key(k, l, i))
    return out


def _relative(ref, val):
    den = abs(ref)
    return abs(val - ref) / den if den > 0 else abs(val - ref)


def verify_interpolation(full, reduced, scheme, tol=1e-9):
    """Compare generalized transfer functions of `full` and `reduced`.

    `full` may be a model or a sample oracle (see :func:`as_oracle`).  Each
    condition gets a relative residual ``|H~ - H| / |H|``; with ``tol=None``
    statuses are ``"info"`` and the report never fails.  Singular resolvents
    mark a condition ``"unevaluable"`` instead of raising.
    """
    reference = as_oracle(full)
    conds = []
    for family, k, l, i, word, args in interpolation_conditions(scheme, reduced.n_p):
        res = ConditionResult(family, k, l, i, word, args)
        try:
            res.reference = complex(reference(word, args))
            res.value = eval_Hword(reduced, word, args)
        except (SingularResolventError, IncompleteDataError) as e:
            res.note = str(e)
            conds.append(res)
            continue
        res.residual = float(_relative(res.reference, res.value))
        if tol is None:
            res.status = "info"
        else:
            res.status = "pass" if res.residual <= tol else "fail"
        conds.append(res)
    return InterpolationReport(conds, tol)
