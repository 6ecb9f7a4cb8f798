"""Root-multiset polynomials and the weight schemes behind generalized derivatives.

The polynomial is carried exclusively by its roots on the main path; expanding
to coefficients is a small-degree diagnostic because circle-rooted products
grow binomially in magnitude.  A weight scheme attaches one coefficient per
root; the weighted sum R(z) = sum_j lam_j / (z - z_j) times P is the
generalized derivative whose zeros the rest of the package studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeights, DegreeTooLarge, PoleProximity
from .laws import format_complex, parse_complex

WEIGHT_SUM_REL_TOL = 1e-12   # |sum lam| <= tol * sum |lam| counts as degenerate
SZNAGY_SUM_TOL = 1e-9
POLE_TOL = 1e-14
COEFF_DEGREE_CAP = 64


class RootPoly:
    """Monic polynomial as the multiset of its roots (order preserved)."""

    __slots__ = ("roots",)

    def __init__(self, roots):
        arr = np.atleast_1d(np.asarray(roots, dtype=complex)).copy()
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("need a nonempty 1-d root list")
        arr.setflags(write=False)
        self.roots = arr

    @property
    def degree(self) -> int:
        return int(self.roots.size)

    def __repr__(self):
        return f"RootPoly(degree={self.degree})"


class WeightScheme:
    """Base for the three derivative-defining weight assignments."""


@dataclass(frozen=True)
class Ordinary(WeightScheme):
    """All-ones weights; the generalized derivative reduces to P'."""

    def spec_string(self) -> str:
        return "ordinary"


@dataclass(frozen=True)
class Polar(WeightScheme):
    """Weights xi - z_j for a fixed pole xi."""

    xi: complex

    def __post_init__(self):
        object.__setattr__(self, "xi", complex(self.xi))

    def spec_string(self) -> str:
        return f"polar:{format_complex(self.xi)}"


@dataclass(frozen=True)
class SzNagy(WeightScheme):
    """Explicit positive weights; must total the degree they are used with."""

    lams: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.lams)
        object.__setattr__(self, "lams", vals)
        if len(vals) == 0:
            raise ValueError("empty weight list")
        if any(v <= 0 for v in vals):
            raise ValueError("weights must be strictly positive")

    def spec_string(self) -> str:
        return "sznagy:" + ",".join(f"{v:.17g}" for v in self.lams)


def resolve_weights(poly: RootPoly, scheme: WeightScheme) -> np.ndarray:
    """Concrete weight vector for `poly` under `scheme` (complex128, length n)."""
    n = poly.degree
    if isinstance(scheme, Ordinary):
        lam = np.ones(n, dtype=complex)
    elif isinstance(scheme, Polar):
        lam = scheme.xi - poly.roots
    elif isinstance(scheme, SzNagy):
        if len(scheme.lams) != n:
            raise ValueError(f"got {len(scheme.lams)} weights for degree {n}")
        total = sum(scheme.lams)
        if abs(total - n) > SZNAGY_SUM_TOL:
            raise ValueError(f"weights sum to {total}, expected degree {n}")
        lam = np.asarray(scheme.lams, dtype=complex)
    else:
        raise TypeError(f"unknown weight scheme {scheme!r}")
    _check_nondegenerate(lam)
    return lam


def _check_nondegenerate(lam: np.ndarray) -> None:
    total = np.sum(lam)
    if abs(total) <= WEIGHT_SUM_REL_TOL * np.sum(np.abs(lam)):
        raise DegenerateWeights(
            f"weight sum {total} vanishes relative to absolute mass; "
            "the derived polynomial drops degree"
        )


def alpha_weights(lam) -> np.ndarray:
    """Weights normalized to unit sum: alpha_j = lam_j / sum(lam)."""
    lam = np.asarray(lam, dtype=complex)
    _check_nondegenerate(lam)
    return lam / np.sum(lam)


def log_derivative_value(poly: RootPoly, lam, z: complex) -> complex:
    """R(z) = sum_j lam_j / (z - z_j); P(z) * R(z) is the generalized derivative."""
    lam = np.asarray(lam, dtype=complex)
    if lam.shape != poly.roots.shape:
        raise ValueError("weight vector length must match the degree")
    diff = complex(z) - poly.roots
    if np.min(np.abs(diff)) <= POLE_TOL:
        raise PoleProximity(f"evaluation point {z} sits on a root within {POLE_TOL}")
    return complex(np.sum(lam / diff))


def coefficients(poly: RootPoly) -> np.ndarray:
    """Monic coefficients, ascending order, via balanced pairwise factor products.

    The tree reduction keeps rounding growth at O(log n) factor products; the
    hard degree cap exists because clustered circle roots push coefficient
    magnitudes to binomial scale.
    """
    if poly.degree > COEFF_DEGREE_CAP:
        raise DegreeTooLarge(f"degree {poly.degree} above expansion cap {COEFF_DEGREE_CAP}")
    factors = [np.array([-r, 1.0 + 0.0j]) for r in poly.roots]
    while len(factors) > 1:
        merged = [
            np.convolve(factors[i], factors[i + 1])
            for i in range(0, len(factors) - 1, 2)
        ]
        if len(factors) % 2:
            merged.append(factors[-1])
        factors = merged
    return factors[0]


def parse_scheme(text: str) -> WeightScheme:
    """Parse `ordinary`, `polar:re+imi`, or `sznagy:l1,l2,...`."""
    s = text.strip()
    if s == "ordinary":
        return Ordinary()
    if s.startswith("polar:"):
        return Polar(parse_complex(s[len("polar:"):]))
    if s.startswith("sznagy:"):
        body = s[len("sznagy:"):]
        try:
            vals = tuple(float(v) for v in body.split(","))
        except ValueError:
            raise ValueError(f"bad weight list {body!r}") from None
        return SzNagy(vals)
    raise ValueError(f"unknown weight scheme spec {text!r}")
