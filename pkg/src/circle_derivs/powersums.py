"""Power sums of derived zeros by three independent routes.

The mean of p-th powers of the zeros of a generalized derivative can be
written directly in the input roots and normalized weights alpha_j: with
m_h = sum_j alpha_j z_j^h,

    (sum_i w_i^p)/(n-1) = n/(n-1) * mean(z^p) - p/(n-1) * m_p
        + 1/(n-1) * sum over (q, r, s, h) of (-1)^s m_{h_1} ... m_{h_{s-1}} m_{q+r}

where q >= 1, r >= 0, s >= 2 range with q + r + sum(h_t) = p and each h_t is a
positive integer.  The same quantity equals tr((D - D L J)^p) / (n-1), and of
course the plain mean of p-th powers of the computed zeros.  Each route has
different failure modes (combinatorics, dense linear algebra, root finding),
so their agreement is the module's self-check.

Term enumeration is lexicographic in (q, r, s, composition) and the terms are
pairwise-summed, making the closed form bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PTooLarge, SizeTooLarge
from .polys import RootPoly, WeightScheme, alpha_weights, resolve_weights
from .rootfind import companion_like_matrix, derived_zeros

P_CAP = 12
TRACE_DEGREE_CAP = 256


def direct_power_mean(points, p: int) -> complex:
    """(1/m) sum of p-th powers of the given points."""
    points = np.asarray(points, dtype=complex)
    if points.size < 1:
        raise ValueError("need at least one point")
    _check_p(p)
    return complex(np.sum(points**p) / points.size)


def compositions(total: int, parts: int):
    """All `parts`-tuples of positive integers summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(1, total - parts + 2):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def composition_term_count(p: int) -> int:
    """Number of correction terms in the closed form at order p."""
    return sum(
        2 ** (p - q - r - 1)
        for q in range(1, p)
        for r in range(0, p - q)
    )


def closed_form_power_mean(poly: RootPoly, lam, p: int) -> complex:
    """Mean of p-th powers of the derived zeros, from roots and weights alone."""
    _check_p(p)
    if p > P_CAP:
        raise PTooLarge(f"order {p} above the combinatorial cap {P_CAP}")
    if poly.degree < 2:
        raise ValueError("derived zeros only exist for degree >= 2")
    alpha = alpha_weights(lam)
    z = poly.roots
    n = poly.degree

    # weighted root moments m_h for every exponent the sum can touch
    moments = np.empty(p + 1, dtype=complex)
    moments[0] = np.sum(alpha)
    zpow = np.ones_like(z)
    for h in range(1, p + 1):
        zpow = zpow * z
        moments[h] = np.sum(alpha * zpow)

    first = complex(np.sum(z**p)) / (n - 1)
    second = -p / (n - 1) * moments[p]

    terms = []
    for q in range(1, p):
        for r in range(0, p - q):
            rest = p - q - r
            tail = moments[q + r]
            for s in range(2, rest + 2):
                for h in compositions(rest, s - 1):
                    prod = tail
                    for ht in h:
                        prod = prod * moments[ht]
                    terms.append((-1) ** s * prod)
    correction = complex(np.sum(np.asarray(terms))) / (n - 1) if terms else 0.0
    return complex(first + second + correction)


def trace_power_sum(poly: RootPoly, lam, p: int) -> complex:
    """sum_i w_i^p as tr(M^p) for the dense diagonal-minus-rank-one matrix."""
    _check_p(p)
    if poly.degree > TRACE_DEGREE_CAP:
        raise SizeTooLarge(f"degree {poly.degree} above trace-oracle cap {TRACE_DEGREE_CAP}")
    alpha = alpha_weights(lam)
    matrix = companion_like_matrix(poly.roots, alpha)
    return complex(np.trace(np.linalg.matrix_power(matrix, p)))


@dataclass(frozen=True)
class PowerSumReport:
    """One order's value down all three routes plus their worst disagreement."""

    p: int
    direct: complex
    closed_form: complex
    trace_oracle: complex
    max_pairwise_diff: float


def power_sum_report(poly: RootPoly, scheme: WeightScheme, p: int) -> PowerSumReport:
    lam = resolve_weights(poly, scheme)
    n = poly.degree
    direct = direct_power_mean(derived_zeros(poly, scheme).zeros, p)
    closed = closed_form_power_mean(poly, lam, p)
    trace = trace_power_sum(poly, lam, p) / (n - 1)
    diff = max(abs(direct - closed), abs(direct - trace), abs(closed - trace))
    return PowerSumReport(p=p, direct=direct, closed_form=closed,
                          trace_oracle=trace, max_pairwise_diff=float(diff))


def _check_p(p) -> None:
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ValueError(f"power must be a positive integer, got {p!r}")
