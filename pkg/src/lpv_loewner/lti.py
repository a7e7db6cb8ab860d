"""Tangential Loewner framework for LTI systems.

Left data ``(mu_j, l_j, v_j)`` with ``v_j^T = l_j^T H(mu_j)`` and right data
``(lambda_i, r_i, w_i)`` with ``w_i = H(lambda_i) r_i`` give the Loewner and
shifted Loewner matrices::

    L[j, i]  = (v_j^T r_i - l_j^T w_i) / (mu_j - lambda_i)
    Ls[j, i] = (mu_j v_j^T r_i - lambda_i l_j^T w_i) / (mu_j - lambda_i)

and the descriptor realization ``E = -L, A = -Ls, B = V, C = W`` whose
transfer function ``C (sE - A)^{-1} B`` interpolates the data.  Directions
are paired by plain transpose throughout, never conjugate transpose.
"""
from dataclasses import dataclass

import numpy as np

from lpv_loewner._linalg import EPS, checked_solve, numerical_rank
from lpv_loewner.errors import DividedDifferenceError, InvalidArgumentError, SingularPencilError
from lpv_loewner.serialization import decode_array, decode_complex, encode_array, encode_complex


def _rows(a, M, name):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(M, -1) if M else a.reshape(0, 1)
    if a.ndim != 2 or a.shape[0] != M:
        raise InvalidArgumentError(f"{name} must have {M} rows, got shape {a.shape}")
    return a


@dataclass(frozen=True, eq=False)
class TangentialData:
    """Left/right tangential samples.

    Parameters
    ----------
    mu, lam
        Left and right points, each of length ``M``.
    l, v
        ``M x p`` left directions and ``M x m`` left values (row ``j`` is
        ``l_j`` resp. ``v_j``).
    r, w
        ``M x m`` right directions and ``M x p`` right values.
    """

    mu: np.ndarray
    l: np.ndarray
    v: np.ndarray
    lam: np.ndarray
    r: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=complex).ravel()
        lam = np.asarray(self.lam, dtype=complex).ravel()
        M = mu.shape[0]
        if lam.shape[0] != M:
            raise InvalidArgumentError(f"{M} left points but {lam.shape[0]} right points")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "lam", lam)
        for name in ("l", "v", "r", "w"):
            object.__setattr__(self, name, _rows(getattr(self, name), M, name))
        if self.l.shape[1] != self.w.shape[1]:
            raise InvalidArgumentError("left directions and right values disagree on output size p")
        if self.v.shape[1] != self.r.shape[1]:
            raise InvalidArgumentError("left values and right directions disagree on input size m")

    @property
    def M(self):
        return self.mu.shape[0]

    @property
    def p(self):
        return self.l.shape[1]

    @property
    def m(self):
        return self.r.shape[1]

    @classmethod
    def siso(cls, mu, H_mu, lam, H_lam):
        """Scalar data with unit directions: ``v_j = H(mu_j)``, ``w_i = H(lambda_i)``."""
        mu, lam = np.atleast_1d(mu), np.atleast_1d(lam)
        one_l, one_r = np.ones((len(mu), 1)), np.ones((len(lam), 1))
        return cls(mu, one_l, np.reshape(H_mu, (-1, 1)), lam, one_r, np.reshape(H_lam, (-1, 1)))

    @classmethod
    def from_transfer_function(cls, H, mu, lam, l=None, r=None):
        """Sample a matrix-valued ``H(s)`` (``p x m``) along the given directions."""
        mu, lam = np.atleast_1d(mu), np.atleast_1d(lam)
        H0 = np.atleast_2d(H(mu[0]))
        p, m = H0.shape
        l = np.ones((len(mu), p)) if l is None else np.asarray(l)
        r = np.ones((len(lam), m)) if r is None else np.asarray(r)
        v = np.array([l[j] @ np.atleast_2d(H(mu[j])) for j in range(len(mu))])
        w = np.array([np.atleast_2d(H(lam[i])) @ r[i] for i in range(len(lam))])
        return cls(mu, l, v, lam, r, w)

    def to_dict(self):
        return {
            "left": [{"mu": encode_complex(self.mu[j]), "l": encode_array(self.l[j]),
                      "v": encode_array(self.v[j])} for j in range(self.M)],
            "right": [{"lambda": encode_complex(self.lam[i]), "r": encode_array(self.r[i]),
                       "w": encode_array(self.w[i])} for i in range(self.M)],
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            left, right = doc["left"], doc["right"]
            mu = [decode_complex(e["mu"]) for e in left]
            lam = [decode_complex(e["lambda"]) for e in right]
            l = [decode_array(e["l"], 1) for e in left]
            v = [decode_array(e["v"], 1) for e in left]
            r = [decode_array(e["r"], 1) for e in right]
            w = [decode_array(e["w"], 1) for e in right]
        except (KeyError, TypeError) as e:
            raise InvalidArgumentError(f"malformed tangential data: {e}") from None
        if not left:
            raise InvalidArgumentError("tangential data needs at least one left and one right sample")
        try:
            return cls(mu, np.array(l), np.array(v), lam, np.array(r), np.array(w))
        except ValueError as e:
            raise InvalidArgumentError(f"inconsistent direction sizes: {e}") from None


@dataclass(frozen=True, eq=False)
class LoewnerRealization:
    """Descriptor realization ``(E, A, B, C)`` with ``H(s) = C (sE - A)^{-1} B``."""

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        E, A = np.asarray(self.E), np.asarray(self.A)
        B, C = np.atleast_2d(self.B), np.atleast_2d(self.C)
        if E.ndim != 2 or E.shape[0] != E.shape[1] or E.shape != A.shape:
            raise InvalidArgumentError(f"E {E.shape} and A {A.shape} must be equal square matrices")
        if B.shape[0] != E.shape[0] or C.shape[1] != E.shape[0]:
            raise InvalidArgumentError(f"B {B.shape} / C {C.shape} not conformal with order {E.shape[0]}")
        for name, val in (("E", E), ("A", A), ("B", B), ("C", C)):
            object.__setattr__(self, name, val)

    @property
    def order(self):
        return self.E.shape[0]

    def to_dict(self):
        return {k: encode_array(getattr(self, k)) for k in ("E", "A", "B", "C")}


def _check_disjoint(mu, lam):
    hit = np.argwhere(mu[:, None] == lam[None, :])
    if hit.size:
        j, i = hit[0]
        raise DividedDifferenceError(int(j), int(i), complex(mu[j]))


def build_loewner(data):
    """Return ``(L, Ls)``, the Loewner and shifted Loewner matrices of `data`."""
    mu, lam = data.mu, data.lam
    _check_disjoint(mu, lam)
    vr = data.v @ data.r.T        # [j, i] = v_j^T r_i
    lw = data.l @ data.w.T        # [j, i] = l_j^T w_i
    denom = mu[:, None] - lam[None, :]
    L = (vr - lw) / denom
    Ls = (mu[:, None] * vr - lam[None, :] * lw) / denom
    return L, Ls


def realize(data):
    """Interpolatory realization ``E = -L, A = -Ls, B = V, C = W``."""
    if data.M < 1:
        raise InvalidArgumentError("at least one left and one right sample are required")
    L, Ls = build_loewner(data)
    return LoewnerRealization(-L, -Ls, data.v.copy(), data.w.T.copy())


def eval_realization(R, s):
    """``C (sE - A)^{-1} B`` as a ``p x m`` array."""
    s = complex(s)
    pencil = s * R.E - R.A
    X = checked_solve(pencil, R.B.astype(complex),
                      on_singular=lambda rc: SingularPencilError(f"pencil sE-A singular at s={s!r}", rc, s))
    return R.C @ X


def interleaved_axis_points(M, w_lo=0.5, w_hi=8.0):
    """``M`` left and ``M`` right points on the imaginary axis.

    Frequencies ``linspace(w_lo, w_hi, 2M)`` are dealt alternately to the
    left and right sets, with the sign of the imaginary part alternating
    along each set, so both half-axes are covered.  One-sided or widely
    spread layouts make the Loewner pencil markedly worse conditioned.
    """
    w = np.linspace(w_lo, w_hi, 2 * M)
    sign = np.where(np.arange(M) % 2 == 0, 1.0, -1.0)
    return 1j * w[0::2] * sign, -1j * w[1::2] * sign


def default_rank_tol(M):
    """Relative singular-value cutoff ``M * eps * 100``."""
    return M * EPS * 100


@dataclass(frozen=True)
class RankDiagnostics:
    """Numerical ranks behind the projection conditions.

    ``n`` is the common rank when all ranks agree, else ``None``.
    """

    n: int
    pencil_ranks: tuple
    row_rank: int
    column_rank: int
    pencil_satisfied: tuple
    row_satisfied: bool
    column_satisfied: bool
    singular_values_row: np.ndarray
    singular_values_column: np.ndarray

    @property
    def satisfied(self):
        return self.n is not None

    def to_dict(self):
        return {
            "n": self.n,
            "pencil_ranks": list(self.pencil_ranks),
            "row_rank": self.row_rank,
            "column_rank": self.column_rank,
            "pencil_satisfied": list(self.pencil_satisfied),
            "row_satisfied": self.row_satisfied,
            "column_satisfied": self.column_satisfied,
            "singular_values_row": self.singular_values_row.tolist(),
            "singular_values_column": self.singular_values_column.tolist(),
        }


def rank_diagnostics(L, Ls, points, rel_tol=None):
    """Ranks of ``eta L - Ls`` for each point, of ``[L, Ls]`` and of ``[L; Ls]``.

    Each condition is flagged satisfied when its rank equals the rank of
    ``[L, Ls]``, the reference value.  `rel_tol` defaults to
    :func:`default_rank_tol` of the data count.
    """
    L, Ls = np.asarray(L), np.asarray(Ls)
    if L.shape != Ls.shape or L.ndim != 2:
        raise InvalidArgumentError(f"L {L.shape} and Ls {Ls.shape} must have equal 2-D shapes")
    tol = default_rank_tol(L.shape[0]) if rel_tol is None else rel_tol
    row_rank, sv_row = numerical_rank(np.hstack([L, Ls]), tol)
    col_rank, sv_col = numerical_rank(np.vstack([L, Ls]), tol)
    pencil = tuple(numerical_rank(eta * L - Ls, tol)[0] for eta in np.atleast_1d(points))
    ranks = {row_rank, col_rank, *pencil}
    n = row_rank if len(ranks) == 1 else None
    return RankDiagnostics(
        n=n,
        pencil_ranks=pencil,
        row_rank=row_rank,
        column_rank=col_rank,
        pencil_satisfied=tuple(k == row_rank for k in pencil),
        row_satisfied=True,
        column_satisfied=col_rank == row_rank,
        singular_values_row=sv_row,
        singular_values_column=sv_col,
    )


def projection_bases(L, Ls, r):
    """Leading `r` left singular vectors of ``[L, Ls]`` and right ones of ``[L; Ls]``."""
    U, _, _ = np.linalg.svd(np.hstack([L, Ls]))
    _, _, Vh = np.linalg.svd(np.vstack([L, Ls]))
    return U[:, :r], Vh[:r].conj().T


def svd_project(R, r):
    """Project a Loewner realization onto order `r`.

    ``Y``/``X`` span the dominant row/column spaces of the pencil and the
    result is ``(Y^H E X, Y^H A X, Y^H B, C X)``.  With `r` equal to the
    rank of ``[L, Ls]`` the projected model still interpolates the data.
    """
    if not 1 <= r <= R.order:
        raise InvalidArgumentError(f"projection order {r} outside [1, {R.order}]")
    # E = -L and A = -Ls; the sign does not change the singular subspaces.
    Y, X = projection_bases(R.E, R.A, r)
    Yh = Y.conj().T
    return LoewnerRealization(Yh @ R.E @ X, Yh @ R.A @ X, Yh @ R.B, R.C @ X)


def interpolation_residuals(R, data):
    """Relative left/right interpolation residuals of `R` against `data`.

    Returns ``(left, right)`` arrays of length ``M``; entries where the
    pencil is singular are ``nan``.
    """
    left = np.full(data.M, np.nan)
    right = np.full(data.M, np.nan)
    for j in range(data.M):
        try:
            got = data.l[j] @ eval_realization(R, data.mu[j])
        except SingularPencilError:
            continue
        left[j] = np.linalg.norm(got - data.v[j]) / max(np.linalg.norm(data.v[j]), np.finfo(float).tiny)
    for i in range(data.M):
        try:
            got = eval_realization(R, data.lam[i]) @ data.r[i]
        except SingularPencilError:
            continue
        right[i] = np.linalg.norm(got - data.w[i]) / max(np.linalg.norm(data.w[i]), np.finfo(float).tiny)
    return left, right
