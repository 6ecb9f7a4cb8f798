"""Zeros of generalized derivatives via the diagonal-minus-rank-one spectrum.

For weights lam with nonzero sum and alpha = lam / sum(lam), the matrix
M = D - D L J (D = diag(roots), L = diag(alpha), J = all-ones) has spectrum
{0} union {zeros of the generalized derivative}.  We take the dense
eigenvalues of M, drop the one artificial eigenvalue nearest zero, and then
certify/polish each remaining zero with Newton steps on the weighted sum
R(z) = sum_j alpha_j / (z - z_j).  The certificate is the scale-free defect

    defect(w) = |sum_j alpha_j/(w - z_j)| / sum_j |alpha_j|/|w - z_j|,

except at zeros coinciding with a multiple input root, where R has a pole and
the spectral value is accepted as-is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenFailure, OrderTooLarge
from .polys import Ordinary, RootPoly, WeightScheme, alpha_weights, resolve_weights

DEFECT_TOL = 1e-8
ROOT_COINCIDENCE_TOL = 1e-12
NEWTON_MAX_STEPS = 4
_CHUNK = 256

BACKEND_SPECTRAL = "spectral"
BACKEND_REFINED = "refined"


@dataclass(frozen=True)
class DerivedZeros:
    """n-1 zeros of a generalized derivative plus their worst certified defect."""

    zeros: np.ndarray
    residual_max: float
    backend: str

    def __post_init__(self):
        arr = np.asarray(self.zeros, dtype=complex).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "zeros", arr)


@dataclass(frozen=True)
class ContainmentReport:
    max_modulus: float
    bound: float
    passed: bool


def companion_like_matrix(roots: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Dense D - D L J whose eigenvalues are {0} union the derived zeros."""
    roots = np.asarray(roots, dtype=complex)
    alpha = np.asarray(alpha, dtype=complex)
    return np.diag(roots) - np.outer(roots * alpha, np.ones(roots.size))


def _rational_sums(w: np.ndarray, roots: np.ndarray, alpha: np.ndarray):
    """R(w), R'(w) and the absolute-mass normalizer, chunked to bound memory."""
    m = w.size
    val = np.empty(m, dtype=complex)
    der = np.empty(m, dtype=complex)
    absmass = np.empty(m, dtype=float)
    for lo in range(0, m, _CHUNK):
        hi = min(lo + _CHUNK, m)
        diff = w[lo:hi, None] - roots[None, :]
        frac = alpha[None, :] / diff
        val[lo:hi] = frac.sum(axis=1)
        der[lo:hi] = -(frac / diff).sum(axis=1)
        absmass[lo:hi] = (np.abs(alpha)[None, :] / np.abs(diff)).sum(axis=1)
    return val, der, absmass


def _defects(w, roots, alpha, exempt):
    d = np.zeros(w.size)
    live = ~exempt
    if live.any():
        val, _, absmass = _rational_sums(w[live], roots, alpha)
        d[live] = np.abs(val) / absmass
    return d


def derived_zeros(poly: RootPoly, scheme: WeightScheme, *, refine: bool = True,
                  defect_tol: float = DEFECT_TOL) -> DerivedZeros:
    """All n-1 zeros of the generalized derivative defined by `scheme`.

    With `refine` (the default) every zero not coinciding with a multiple
    input root is polished by up to four Newton steps on the weighted sum and
    must certify to `defect_tol`; `refine=False` returns the raw spectral
    values with their observed defect, for backend cross-checks.
    """
    n = poly.degree
    if n < 2:
        raise OrderTooLarge(f"need degree >= 2, got {n}")
    lam = resolve_weights(poly, scheme)
    alpha = alpha_weights(lam)
    roots = poly.roots

    matrix = companion_like_matrix(roots, alpha)
    try:
        eig = np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"QR iteration did not converge at degree {n}") from exc

    # The factor z contributes exactly one artificial zero eigenvalue; drop the
    # value nearest 0 (one of the tied values when the derivative really
    # vanishes at 0).
    drop = int(np.argmin(np.abs(eig)))
    w = np.delete(eig, drop)

    exempt = _near_root_mask(w, roots)
    if refine:
        defect = _defects(w, roots, alpha, exempt)
        for step_index in range(NEWTON_MAX_STEPS):
            # every zero gets one polishing step; later steps only run while
            # the certificate is still unmet
            active = ~exempt if step_index == 0 else ~exempt & (defect > defect_tol)
            if not active.any():
                break
            val, der, _ = _rational_sums(w[active], roots, alpha)
            step = np.where(der != 0, val / np.where(der != 0, der, 1.0), 0.0)
            w[active] = w[active] - step
            exempt = _near_root_mask(w, roots)
            defect = _defects(w, roots, alpha, exempt)
        residual = float(defect.max(initial=0.0))
        if residual > defect_tol:
            raise EigenFailure(
                f"{int((defect > defect_tol).sum())} zeros failed the defect "
                f"certificate (worst {residual:.3e} > {defect_tol:.1e})"
            )
        backend = BACKEND_REFINED
    else:
        residual = float(_defects(w, roots, alpha, exempt).max(initial=0.0))
        backend = BACKEND_SPECTRAL

    return DerivedZeros(zeros=w, residual_max=residual, backend=backend)


def _near_root_mask(w: np.ndarray, roots: np.ndarray) -> np.ndarray:
    mask = np.zeros(w.size, dtype=bool)
    for lo in range(0, w.size, _CHUNK):
        hi = min(lo + _CHUNK, w.size)
        dist = np.abs(w[lo:hi, None] - roots[None, :]).min(axis=1)
        mask[lo:hi] = dist <= ROOT_COINCIDENCE_TOL
    return mask


def kth_derivative_zeros(poly: RootPoly, k: int) -> DerivedZeros:
    """Zeros of the k-th ordinary derivative, iterating one order at a time."""
    n = poly.degree
    if not (1 <= k <= n - 1):
        raise OrderTooLarge(f"derivative order {k} demands degree > {k}, got {n}")
    current = poly
    worst = 0.0
    result = None
    for _ in range(k):
        result = derived_zeros(current, Ordinary())
        worst = max(worst, result.residual_max)
        current = RootPoly(result.zeros)
    return DerivedZeros(zeros=result.zeros, residual_max=worst, backend=result.backend)


def containment_check(zeros, bound: float) -> ContainmentReport:
    """Largest modulus among `zeros` versus the disk bound (1e-9 slack)."""
    zeros = np.asarray(zeros, dtype=complex)
    max_mod = float(np.abs(zeros).max(initial=0.0))
    return ContainmentReport(max_modulus=max_mod, bound=float(bound),
                             passed=max_mod <= float(bound) + 1e-9)
