"""Principal angles and sin/tan-theta distances between subspaces.

Cosines come from the singular values of Q1* Q2; sines come from the
orthogonal-complement product Q1perp* Q2, which is the numerically accurate
route for small angles (sqrt(1 - cos^2) loses half the significant digits
there).  The two routes are cross-checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import CrossCheckFailure, NotOrthonormal, ShapeMismatch
from .linalg import as_matrix, singular_values


@dataclass(frozen=True)
class SubspaceDistance:
    """Principal-angle summary between two r-dimensional subspaces.

    ``cosines`` are sorted nonincreasing in [0, 1]; ``sines`` are aligned
    index-by-index with the cosines (so they are nondecreasing).
    ``tan_norm`` is +inf when some cosine is zero.
    """

    cosines: np.ndarray
    sines: np.ndarray
    sin_norm: float
    tan_norm: float


def _check_orthonormal(q: np.ndarray, name: str, tol: Tolerances) -> np.ndarray:
    q = as_matrix(q, name)
    if q.shape[0] < q.shape[1]:
        raise ShapeMismatch(f"{name}: more columns than rows, {q.shape}")
    gram = q.conj().T @ q
    defect = float(np.linalg.norm(gram - np.eye(q.shape[1]), 2))
    if defect > tol.tol_orth * q.shape[1]:
        raise NotOrthonormal(f"{name}: orthonormality defect {defect:.3e}")
    return q


def orth_complement(q, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the complement; [Q, Qperp] is unitary."""
    q = _check_orthonormal(q, "Q", tol)
    n, r = q.shape
    if r >= n:
        raise ShapeMismatch(f"orth_complement: no complement for shape {q.shape}")
    full, _ = np.linalg.qr(q, mode="complete")
    comp = full[:, r:]
    defect = float(np.linalg.norm(q.conj().T @ comp, 2))
    if defect > tol.tol_orth * n:
        raise NotOrthonormal(f"orth_complement: residual coupling {defect:.3e}")
    return comp


def principal_angles(q1, q2, tol: Tolerances = DEFAULT_TOL) -> SubspaceDistance:
    """Principal angles between span(Q1) and span(Q2); inputs orthonormal."""
    q1 = _check_orthonormal(q1, "Q1", tol)
    q2 = _check_orthonormal(q2, "Q2", tol)
    if q1.shape != q2.shape:
        raise ShapeMismatch(f"principal_angles: {q1.shape} vs {q2.shape}")
    n, r = q1.shape
    cosines = np.clip(singular_values(q1.conj().T @ q2), 0.0, 1.0)
    if r < n:
        comp = orth_complement(q1, tol)
        sig = np.clip(singular_values(comp.conj().T @ q2), 0.0, 1.0)
        sines = np.zeros(r)
        k = min(sig.shape[0], r)
        # largest sines pair with the smallest cosines
        sines[r - k:] = np.sort(sig[:k])
    else:
        sines = np.zeros(r)
    sin_norm = float(sines[-1]) if r else 0.0
    with np.errstate(divide="ignore"):
        tans = np.where(cosines > 0.0, sines / np.where(cosines > 0.0, cosines, 1.0), np.inf)
    tan_norm = float(np.max(tans)) if r else 0.0
    return SubspaceDistance(cosines=cosines, sines=sines, sin_norm=sin_norm, tan_norm=tan_norm)


def sin_theta_norm(q1, q2, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest principal-angle sine, cross-checked through three routes.

    The returned value is max sine from ``principal_angles``.  It is compared
    against ||Q1perp* Q2||, against the symmetric ||Q2perp* Q1||, and (in
    squared form, which avoids the 1/sin error amplification at tiny angles)
    against 1 - sigma_min(Q1* Q2)^2.  Disagreement beyond ``cross_tol``
    signals orthonormality loss upstream.
    """
    q1 = _check_orthonormal(q1, "Q1", tol)
    q2 = _check_orthonormal(q2, "Q2", tol)
    if q1.shape != q2.shape:
        raise ShapeMismatch(f"sin_theta_norm: {q1.shape} vs {q2.shape}")
    n, r = q1.shape
    dist = principal_angles(q1, q2, tol)
    value = dist.sin_norm

    if r < n:
        direct = float(singular_values(orth_complement(q1, tol).conj().T @ q2)[0])
        sym = float(singular_values(orth_complement(q2, tol).conj().T @ q1)[0])
    else:
        direct = 0.0
        sym = 0.0
    smin = float(np.clip(singular_values(q1.conj().T @ q2)[-1], 0.0, 1.0))
    sq_alt = 1.0 - smin * smin

    if abs(value - direct) > tol.cross_tol:
        raise CrossCheckFailure(
            f"sin_theta_norm: complement route {direct:.3e} vs {value:.3e}")
    if abs(value - sym) > tol.cross_tol:
        raise CrossCheckFailure(
            f"sin_theta_norm: symmetric route {sym:.3e} vs {value:.3e}")
    if abs(value * value - sq_alt) > tol.cross_tol:
        raise CrossCheckFailure(
            f"sin_theta_norm: sigma_min route {sq_alt:.3e} vs {value * value:.3e}")
    return value


def tan_theta_norm(q1, q2, tol: Tolerances = DEFAULT_TOL) -> float:
    """Largest principal-angle tangent; +inf when the subspaces share no
    direction with positive cosine."""
    return principal_angles(q1, q2, tol).tan_norm
