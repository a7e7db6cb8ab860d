"""Dense solves guarded by a LAPACK condition estimate."""
import warnings

import numpy as np
import scipy.linalg as spla
from scipy.linalg.lapack import get_lapack_funcs

from lpv_loewner.errors import SingularMatrixError

EPS = np.finfo(float).eps
#: reciprocal condition numbers below this are treated as singular (cond > 1/(100 eps))
RCOND_MIN = 100 * EPS


def rcond_lu(M):
    """Return ``(lu_piv, rcond)`` for the square matrix `M`.

    `rcond` is LAPACK's 1-norm estimate of ``1 / cond(M)``; it is 0 for an
    exactly singular or all-zero matrix.
    """
    M = np.asarray(M)
    if M.dtype.kind not in "fc":
        M = M.astype(float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", spla.LinAlgWarning)
        lu, piv = spla.lu_factor(M, check_finite=False)
    anorm = np.linalg.norm(M, 1)
    if anorm == 0 or not np.all(np.isfinite(lu)) or np.any(np.diag(lu) == 0):
        return (lu, piv), 0.0
    gecon, = get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0:
        return (lu, piv), 0.0
    return (lu, piv), float(rcond)


def checked_solve(M, rhs, *, trans=0, on_singular=None):
    """Solve ``M x = rhs`` (or ``M^T x = rhs`` for ``trans=1``).

    Raises the exception produced by ``on_singular(rcond)`` (default
    :class:`SingularMatrixError`) when the condition estimate exceeds
    ``1 / (100 eps)``.
    """
    lu_piv, rcond = rcond_lu(M)
    if not rcond >= RCOND_MIN:
        if on_singular is None:
            raise SingularMatrixError(f"matrix numerically singular (rcond={rcond:.3e})", rcond)
        raise on_singular(rcond)
    return spla.lu_solve(lu_piv, rhs, trans=trans, check_finite=False)


def numerical_rank(M, rel_tol):
    """Count singular values of `M` above ``sigma_max * rel_tol``.

    Returns ``(rank, singular_values)``; an all-zero matrix has rank 0.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0, np.zeros(0)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0, sv
    return int(np.sum(sv > sv[0] * rel_tol)), sv
