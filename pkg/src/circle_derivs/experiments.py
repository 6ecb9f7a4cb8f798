"""Seeded convergence sweeps and the power-sum self-test.

A sweep walks a grid of degrees and seed streams, samples zeros, computes the
derived zeros for the configured scheme, and records one diagnostics row per
(n, seed) cell: distance to a fixed discretized reference measure, mass left
in an inner disk, power-sum errors against the law's moments, worst
characteristic-function error over a t-grid, nearest-neighbor pairing
fractions in both directions, containment modulus, and the weight-sum ratios
entering the generalized-derivative hypotheses.  Cells run in a thread pool
(the eigen solver releases the GIL) and are re-sorted before emission so
output never depends on scheduling; a numerical failure aborts only its own
row, recorded as an error entry.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import CircleDerivsError
from .laws import (DOMAIN_SHAPE, DOMAIN_WEIGHTS, CircleLaw, SeedSpec,
                   uniform_doubles)
from .measures import (EmpiricalMeasure, discretized_target, empirical_char,
                       mass_in_disk, pairing_fraction, prohorov)
from .polys import (Ordinary, Polar, RootPoly, SzNagy, WeightScheme,
                    resolve_weights)
from .powersums import (closed_form_power_mean, direct_power_mean,
                        trace_power_sum)
from .rootfind import derived_zeros, kth_derivative_zeros

THREADS_ENV_VAR = "CIRCLE_DERIVS_THREADS"
POLAR_LIMIT_ORDERS = 4  # polar weighted-moment diagnostics cover orders 0..3


@dataclass(frozen=True)
class SzNagyRandom:
    """Per-instance positive weights for sweeps: i.i.d. uniform draws on
    [1/sqrt(cap), sqrt(cap)] renormalized to total n, which bounds every
    weight by cap while keeping the total exact."""

    cap: float = 4.0

    def __post_init__(self):
        if self.cap <= 1.0:
            raise ValueError(f"cap must exceed 1, got {self.cap}")

    def draw(self, n: int, seed: SeedSpec) -> SzNagy:
        s = math.sqrt(self.cap)
        u = uniform_doubles(seed, n, domain=DOMAIN_WEIGHTS)
        lam = 1.0 / s + (s - 1.0 / s) * u
        lam = lam * (n / lam.sum())
        return SzNagy(tuple(lam))

    def spec_string(self) -> str:
        return f"sznagy-random:{self.cap:.17g}"


def default_char_grid() -> tuple:
    """8 directions x radii {0.5, 1, 2}: a small sup-style grid for the
    characteristic-function error."""
    grid = []
    for radius in (0.5, 1.0, 2.0):
        for j in range(8):
            ang = 2.0 * math.pi * j / 8
            grid.append((radius * math.cos(ang), radius * math.sin(ang)))
    return tuple(grid)


@dataclass(frozen=True)
class ExperimentConfig:
    law: CircleLaw
    scheme: object  # WeightScheme or SzNagyRandom
    n_list: tuple
    seeds: tuple
    k: int = 1
    p_max: int = 4
    disk_r: float = 0.9
    eps0: float = 0.1
    q: float = 0.8
    target_atoms: int = 4096
    char_grid: tuple = field(default_factory=default_char_grid)

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if not self.n_list:
            raise ValueError("empty degree list")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("degree list must be strictly increasing")
        if not self.seeds or not all(isinstance(s, SeedSpec) for s in self.seeds):
            raise ValueError("seeds must be a nonempty list of SeedSpec")
        if self.k < 1:
            raise ValueError("derivative order must be >= 1")
        if self.k >= min(self.n_list):
            raise ValueError(f"order {self.k} too high for smallest degree {min(self.n_list)}")
        if self.k > 1 and not isinstance(self.scheme, Ordinary):
            raise ValueError("orders above 1 are defined for the ordinary scheme only")
        if not (1 <= self.p_max <= 8):
            raise ValueError("p_max must lie in [1, 8]")
        if not (0.0 < self.disk_r < 1.0):
            raise ValueError("disk radius must lie in (0, 1)")
        if not (0.0 < self.q < 1.0):
            raise ValueError("q must lie in (0, 1)")
        if not (0.0 < self.eps0 < 1.0 - self.q):
            raise ValueError(f"need 0 < eps0 < 1 - q, got eps0={self.eps0}, q={self.q}")
        if self.target_atoms < 8:
            raise ValueError("reference measure needs at least 8 atoms")
        if isinstance(self.scheme, SzNagy):
            for n in self.n_list:
                if len(self.scheme.lams) != n:
                    raise ValueError(
                        "an explicit weight list fits exactly one degree; "
                        "use the random generator for sweeps")
        elif not isinstance(self.scheme, (WeightScheme, SzNagyRandom)):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @property
    def is_polar(self) -> bool:
        return isinstance(self.scheme, Polar)

    def echo(self) -> dict:
        return {
            "law": self.law.spec_string(),
            "scheme": self.scheme.spec_string(),
            "k": self.k,
            "n_list": list(self.n_list),
            "seeds": [[s.seed, s.stream] for s in self.seeds],
            "p_max": self.p_max,
            "disk_r": self.disk_r,
            "eps0": self.eps0,
            "q": self.q,
            "target_atoms": self.target_atoms,
            "char_grid": [list(t) for t in self.char_grid],
        }


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    seed: SeedSpec
    prohorov_to_target: float
    mass_in_disk_r: float
    powersum_err: tuple
    char_err_max: float
    pairing_zeros_frac: float
    pairing_crit_frac: float
    containment_max_modulus: float
    mean_abs_weight: float
    abs_mean_weight: float
    polar_limit_err: tuple = ()   # populated for polar schemes only
    error: str = ""


@dataclass(frozen=True)
class ErrorRow:
    n: int
    seed: SeedSpec
    error: str


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "0")
    try:
        count = int(raw)
    except ValueError:
        count = 0
    return os.cpu_count() or 1 if count <= 0 else count


def run_convergence(config: ExperimentConfig) -> list:
    """All (n, seed) diagnostic rows in lexicographic order."""
    target = discretized_target(config.law, config.target_atoms)
    char_ref = np.array([config.law.char_fn(t) for t in config.char_grid])
    law_moments = np.array(
        [config.law.moment(p) for p in range(0, max(config.p_max, POLAR_LIMIT_ORDERS) + 1)])
    cells = sorted(((n, seed) for n in config.n_list for seed in config.seeds),
                   key=lambda cell: (cell[0], cell[1].seed, cell[1].stream))

    def one(cell):
        n, seed = cell
        try:
            return _convergence_row(config, n, seed, target, char_ref, law_moments)
        except CircleDerivsError as exc:
            return ErrorRow(n=n, seed=seed, error=f"{type(exc).__name__}: {exc}")

    # parallelism lives across cells; single-threaded BLAS underneath keeps
    # cores from oversubscribing and makes results independent of worker count
    with threadpool_limits(limits=1):
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            rows = list(pool.map(one, cells))
    return rows


def _convergence_row(config, n, seed, target, char_ref, law_moments):
    law, scheme = config.law, config.scheme
    zeros = law.sample(n, seed)
    poly = RootPoly(zeros)

    if isinstance(scheme, SzNagyRandom):
        concrete = scheme.draw(n, seed)
    else:
        concrete = scheme
    lam = resolve_weights(poly, concrete)

    if isinstance(concrete, Ordinary) and config.k > 1:
        dz = kth_derivative_zeros(poly, config.k)
    else:
        dz = derived_zeros(poly, concrete)
    w = dz.zeros

    meas = EmpiricalMeasure.from_points(w)
    proh = prohorov(meas, target).distance
    mass = mass_in_disk(meas, config.disk_r)
    psum_err = tuple(
        abs(direct_power_mean(w, p) - law_moments[p]) for p in range(1, config.p_max + 1))
    char_emp = np.array([empirical_char(meas, t) for t in config.char_grid])
    char_err = float(np.abs(char_emp - char_ref).max())
    near_zeros = pairing_fraction(w, zeros, config.eps0)
    near_crit = pairing_fraction(zeros, w, config.eps0)
    max_mod = float(np.abs(w).max())
    ratio_abs = float(np.abs(lam).sum() / n)
    abs_ratio = float(abs(lam.sum()) / n)

    b_err = ()
    if isinstance(concrete, Polar):
        xi = concrete.xi
        est = [complex(np.sum(np.conj(lam) * zeros ** (m + 1)) / n) for m in range(POLAR_LIMIT_ORDERS)]
        limits = [np.conj(xi) * law_moments[m + 1] - law_moments[m] for m in range(POLAR_LIMIT_ORDERS)]
        b_err = tuple(abs(e - l) for e, l in zip(est, limits))

    return ConvergenceRow(
        n=n, seed=seed, prohorov_to_target=proh, mass_in_disk_r=mass,
        powersum_err=psum_err, char_err_max=char_err,
        pairing_zeros_frac=near_zeros, pairing_crit_frac=near_crit,
        containment_max_modulus=max_mod, mean_abs_weight=ratio_abs,
        abs_mean_weight=abs_ratio, polar_limit_err=b_err)


def csv_header(config: ExperimentConfig) -> list:
    cols = ["n", "seed", "prohorov", "mass_disk"]
    cols += [f"psum_err_{p}" for p in range(1, config.p_max + 1)]
    cols += ["char_err_max", "pairing_zeros_frac", "pairing_crit_frac",
             "containment_max_modulus", "mean_abs_weight", "abs_mean_weight"]
    if config.is_polar:
        cols += [f"polar_limit_err_{m}" for m in range(POLAR_LIMIT_ORDERS)]
    cols.append("error")
    return cols


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def rows_to_csv(config: ExperimentConfig, rows) -> str:
    """17-significant-digit CSV, \\n endings; the seed column is the stream index."""
    lines = [",".join(csv_header(config))]
    blank_count = len(csv_header(config)) - 3
    for row in rows:
        if isinstance(row, ErrorRow):
            cells = [str(row.n), str(row.seed.stream)] + [""] * blank_count
            cells.append(row.error.replace(",", ";"))
        else:
            cells = [str(row.n), str(row.seed.stream), _fmt(row.prohorov_to_target),
                     _fmt(row.mass_in_disk_r)]
            cells += [_fmt(v) for v in row.powersum_err]
            cells += [_fmt(row.char_err_max), _fmt(row.pairing_zeros_frac),
                      _fmt(row.pairing_crit_frac), _fmt(row.containment_max_modulus),
                      _fmt(row.mean_abs_weight), _fmt(row.abs_mean_weight)]
            if config.is_polar:
                cells += [_fmt(v) for v in row.polar_limit_err]
            cells.append("")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_json(config: ExperimentConfig, rows) -> str:
    out_rows = []
    for row in rows:
        if isinstance(row, ErrorRow):
            out_rows.append({"n": row.n, "seed": row.seed.stream, "error": row.error})
            continue
        entry = {
            "n": row.n, "seed": row.seed.stream,
            "prohorov": row.prohorov_to_target,
            "mass_disk": row.mass_in_disk_r,
            "psum_err": list(row.powersum_err),
            "char_err_max": row.char_err_max,
            "pairing_zeros_frac": row.pairing_zeros_frac,
            "pairing_crit_frac": row.pairing_crit_frac,
            "containment_max_modulus": row.containment_max_modulus,
            "mean_abs_weight": row.mean_abs_weight,
            "abs_mean_weight": row.abs_mean_weight,
        }
        if config.is_polar:
            entry["polar_limit_err"] = list(row.polar_limit_err)
        out_rows.append(entry)
    return json.dumps({"config": config.echo(), "rows": out_rows}, indent=2) + "\n"


SELFTEST_SCHEME_FAMILIES = ("ordinary", "polar(2)", "polar(2+i)", "sznagy-random")


@dataclass(frozen=True)
class SelftestReport:
    trials: int
    max_discrepancy: float
    tolerance: float
    passed: bool
    worst_case: str


def power_sum_selftest(trials: int, seed: SeedSpec, tolerance: float = 1e-8) -> SelftestReport:
    """Random-instance agreement check of the three power-sum routes.

    Degrees in [3, 12], orders in [1, 6], cycling the four scheme families;
    failures are reported in the result, never raised.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    from .laws import UniformLaw
    law = UniformLaw()
    worst = 0.0
    worst_case = ""
    for trial in range(trials):
        sub = SeedSpec(seed.seed, seed.stream + trial)
        shape = uniform_doubles(sub, 2, domain=DOMAIN_SHAPE)
        n = 3 + int(shape[0] * 10)      # [3, 12]
        p = 1 + int(shape[1] * 6)       # [1, 6]
        family = SELFTEST_SCHEME_FAMILIES[trial % 4]
        poly = RootPoly(law.sample(n, sub))
        if family == "ordinary":
            scheme = Ordinary()
        elif family == "polar(2)":
            scheme = Polar(2.0)
        elif family == "polar(2+i)":
            scheme = Polar(2.0 + 1.0j)
        else:
            scheme = SzNagyRandom().draw(n, sub)
        lam = resolve_weights(poly, scheme)
        direct = direct_power_mean(derived_zeros(poly, scheme).zeros, p)
        closed = closed_form_power_mean(poly, lam, p)
        trace = trace_power_sum(poly, lam, p) / (n - 1)
        diff = max(abs(direct - closed), abs(direct - trace), abs(closed - trace))
        if diff > worst:
            worst = float(diff)
            worst_case = f"n={n} p={p} scheme={family} trial={trial}"
    return SelftestReport(trials=trials, max_discrepancy=worst, tolerance=tolerance,
                          passed=worst <= tolerance, worst_case=worst_case)
