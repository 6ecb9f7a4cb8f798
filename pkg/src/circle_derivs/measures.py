"""Finite atomic measures on the plane and weak-convergence instrumentation.

The Prohorov distance between two finite atomic measures is computed through
its coupling characterization: the distance is below eps exactly when a
coupling can move at least 1 - eps of the mass along atom pairs closer than
eps.  The feasible coupling mass at a radius is a bipartite max-flow with the
weights as source/sink capacities, and it only changes at pairwise distances,
so the distance is the minimum over sorted breakpoints d of
max(d, 1 - maxflow(d)) -- located by binary search because the two arguments
move in opposite directions.

Flows run on integer capacities (weights rationalized by largest-remainder
rounding) to dodge floating-point augmentation pathologies: a pure-Python
blocking-flow solver with exact big integers at 1e-12 resolution for small
supports, and scipy's compiled solver at 1e-9 resolution (its int32 internals
cap the scale) for the large instances produced by convergence sweeps.

The subset-enumeration evaluator re-derives the same distance straight from
the two fattening inequalities restricted to support subsets, which is lossless
for atomic measures; it exists purely to check the flow route.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow
from scipy.spatial import cKDTree

from .errors import SupportTooLarge
from .laws import ArcLaw, AtomsLaw, CircleLaw, UniformLaw

WEIGHT_SUM_TOL = 1e-12
EXACT_SCALE = 10**12          # capacity units per unit mass, exact backend
SCIPY_SCALE = 10**9           # scipy's flow solver is int32-limited internally
EXACT_BACKEND_MAX_ATOMS = 128
BRUTEFORCE_MAX_ATOMS = 16
DEFAULT_TARGET_ATOMS = 4096


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Atoms with positive weights summing to one."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.atleast_1d(np.asarray(self.atoms, dtype=complex)).copy()
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        if atoms.ndim != 1 or atoms.size == 0:
            raise ValueError("need a nonempty atom list")
        if weights.shape != atoms.shape:
            raise ValueError("weights must match atoms")
        if np.any(weights <= 0):
            raise ValueError("weights must be strictly positive")
        if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {weights.sum()}, expected 1")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_points(cls, points) -> "EmpiricalMeasure":
        """Uniform-weight measure on a point multiset."""
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        return cls(points, np.full(points.size, 1.0 / points.size))

    @property
    def size(self) -> int:
        return int(self.atoms.size)


@dataclass(frozen=True)
class ProhorovResult:
    """Distance plus the coupling certificate backing it."""

    distance: float
    certificate_eps: float
    certificate_flow: float


def _integer_weights(weights: np.ndarray, scale: int) -> list:
    """Scale weights to integers summing exactly to `scale` (largest remainder)."""
    raw = weights * scale
    base = np.floor(raw)
    out = [int(b) for b in base]
    deficit = scale - sum(out)
    order = np.argsort(-(raw - base), kind="stable")
    for i in range(deficit):
        out[int(order[i % len(out)])] += 1
    return out


class _Dinic:
    """Blocking-flow max-flow on exact Python integers."""

    def __init__(self, num_nodes: int):
        self.n = num_nodes
        self.adj = [[] for _ in range(num_nodes)]
        self.to = []
        self.cap = []

    def add_edge(self, u: int, v: int, capacity: int) -> None:
        self.adj[u].append(len(self.to)); self.to.append(v); self.cap.append(capacity)
        self.adj[v].append(len(self.to)); self.to.append(u); self.cap.append(0)

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * self.n
            level[s] = 0
            dq = deque([s])
            while dq:
                u = dq.popleft()
                for eid in self.adj[u]:
                    v = self.to[eid]
                    if self.cap[eid] > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        dq.append(v)
            if level[t] < 0:
                return flow
            it = [0] * self.n
            stack = [(s, None)]
            path = []
            while stack:
                u, _ = stack[-1]
                if u == t:
                    push = min(self.cap[eid] for eid in path)
                    for eid in path:
                        self.cap[eid] -= push
                        self.cap[eid ^ 1] += push
                    flow += push
                    # rewind to the first saturated edge on the path
                    cut = next(i for i, eid in enumerate(path) if self.cap[eid] == 0)
                    del stack[cut + 1:]
                    del path[cut:]
                    continue
                advanced = False
                while it[u] < len(self.adj[u]):
                    eid = self.adj[u][it[u]]
                    v = self.to[eid]
                    if self.cap[eid] > 0 and level[v] == level[u] + 1:
                        stack.append((v, eid))
                        path.append(eid)
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    level[u] = -1
                    stack.pop()
                    if path:
                        path.pop()


def _coupling_mass(dist: np.ndarray, w1: np.ndarray, w2: np.ndarray, d: float) -> float:
    """Max mass a coupling can move along pairs with distance <= d."""
    n1, n2 = dist.shape
    exact = n1 + n2 <= EXACT_BACKEND_MAX_ATOMS
    scale = EXACT_SCALE if exact else SCIPY_SCALE
    iw1 = _integer_weights(w1, scale)
    iw2 = _integer_weights(w2, scale)
    ii, jj = np.nonzero(dist <= d)
    if exact:
        s, t = n1 + n2, n1 + n2 + 1
        net = _Dinic(n1 + n2 + 2)
        for i, c in enumerate(iw1):
            net.add_edge(s, i, c)
        for j, c in enumerate(iw2):
            net.add_edge(n1 + j, t, c)
        for i, j in zip(ii.tolist(), jj.tolist()):
            net.add_edge(i, n1 + j, scale)
        return net.max_flow(s, t) / scale
    # scipy path: nodes = [source, m1 atoms, m2 atoms, sink]
    s, t = 0, n1 + n2 + 1
    rows = np.concatenate([np.zeros(n1, dtype=np.int64), ii + 1,
                           np.arange(n2, dtype=np.int64) + 1 + n1])
    cols = np.concatenate([np.arange(n1, dtype=np.int64) + 1, jj + 1 + n1,
                           np.full(n2, t, dtype=np.int64)])
    caps = np.concatenate([np.asarray(iw1, dtype=np.int64),
                           np.full(ii.size, scale, dtype=np.int64),
                           np.asarray(iw2, dtype=np.int64)])
    graph = csr_matrix((caps, (rows, cols)), shape=(t + 1, t + 1), dtype=np.int64)
    return maximum_flow(graph, s, t).flow_value / scale


def prohorov(m1: EmpiricalMeasure, m2: EmpiricalMeasure, tol: float = 1e-9) -> ProhorovResult:
    """Prohorov distance between two finite atomic measures.

    Exact over the pairwise-distance breakpoint grid up to the integer
    capacity resolution; `tol` only gates how fine a request is accepted.
    """
    if tol < 1e-9:
        raise ValueError(f"tolerance below supported resolution: {tol}")
    dist = np.abs(m1.atoms[:, None] - m2.atoms[None, :])
    breaks = np.unique(np.concatenate([[0.0], dist.ravel()]))

    flows: dict[int, float] = {}

    def flow_at(idx: int) -> float:
        if idx not in flows:
            flows[idx] = _coupling_mass(dist, m1.weights, m2.weights, float(breaks[idx]))
        return flows[idx]

    # smallest breakpoint where d >= 1 - maxflow(d); both sides move monotonely
    lo, hi = 0, len(breaks) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if breaks[mid] >= 1.0 - flow_at(mid):
            hi = mid
        else:
            lo = mid + 1
    best_idx = lo
    best = max(float(breaks[lo]), 1.0 - flow_at(lo))
    if lo > 0:
        prev = max(float(breaks[lo - 1]), 1.0 - flow_at(lo - 1))
        if prev < best:
            best, best_idx = prev, lo - 1
    distance = min(best, 1.0)
    return ProhorovResult(distance=distance, certificate_eps=distance,
                          certificate_flow=flow_at(best_idx))


def prohorov_bruteforce(m1: EmpiricalMeasure, m2: EmpiricalMeasure) -> float:
    """Prohorov distance by enumerating the fattening inequalities over subsets.

    Restricting the inequalities to subsets of the supports loses nothing for
    atomic measures; the flow route must agree with this to 1e-9.
    """
    if m1.size + m2.size > BRUTEFORCE_MAX_ATOMS:
        raise SupportTooLarge(
            f"{m1.size + m2.size} atoms combined, cap {BRUTEFORCE_MAX_ATOMS}")
    dist = np.abs(m1.atoms[:, None] - m2.atoms[None, :])
    candidates = np.unique(np.concatenate([[0.0], dist.ravel()]))
    best = 1.0
    for d in candidates:
        near = dist <= d
        deficiency = max(_worst_deficiency(m1.weights, m2.weights, near),
                         _worst_deficiency(m2.weights, m1.weights, near.T))
        best = min(best, max(float(d), deficiency))
    return min(best, 1.0)


def _worst_deficiency(w_from: np.ndarray, w_to: np.ndarray, near: np.ndarray) -> float:
    """max over subsets A of  mass_from(A) - mass_to(d-fattening of A)."""
    m = w_from.size
    row_bits = []
    for row in near:
        bits = 0
        for j, hit in enumerate(row):
            if hit:
                bits |= 1 << j
        row_bits.append(bits)
    # subset walk: build each mask's mass/coverage from mask minus its low bit
    mass = np.zeros(1 << m)
    cover = [0] * (1 << m)
    worst = 0.0
    for mask in range(1, 1 << m):
        low = mask & -mask
        rest = mask ^ low
        i = low.bit_length() - 1
        mass[mask] = mass[rest] + w_from[i]
        cover[mask] = cover[rest] | row_bits[i]
        covered = 0.0
        b = cover[mask]
        while b:
            covered += w_to[(b & -b).bit_length() - 1]
            b &= b - 1
        worst = max(worst, float(mass[mask]) - covered)
    return worst


def discretized_target(law: CircleLaw, m: int) -> EmpiricalMeasure:
    """Fixed-resolution atomic stand-in for a law, for distance reporting.

    Uniform laws discretize to m equispaced circle atoms starting at angle 0;
    arc laws to the m sub-arc midpoints; atom laws are already atomic.  The
    induced bias against the true law is at most pi * (arc length) / m.
    """
    if m < 1:
        raise ValueError(f"need at least one atom, got {m}")
    if isinstance(law, AtomsLaw):
        pts = np.asarray(law.points, dtype=complex)
        ws = np.asarray(law.weights, dtype=float)
        keep = ws > 0
        return EmpiricalMeasure(pts[keep], ws[keep] / ws[keep].sum())
    if isinstance(law, UniformLaw):
        theta = 2.0 * np.pi * np.arange(m) / m
    elif isinstance(law, ArcLaw):
        theta = law.theta_lo + law.arc_length * (np.arange(m) + 0.5) / m
    else:
        raise TypeError(f"unknown law {law!r}")
    return EmpiricalMeasure.from_points(np.cos(theta) + 1j * np.sin(theta))


def mass_in_disk(measure: EmpiricalMeasure, radius: float) -> float:
    """Total weight of atoms with modulus <= radius."""
    return float(measure.weights[np.abs(measure.atoms) <= radius].sum())


def empirical_char(measure: EmpiricalMeasure, t) -> complex:
    """sum_j weight_j exp(i <t, atom_j>) with the plane dot product."""
    t0, t1 = float(t[0]), float(t[1])
    phase = t0 * measure.atoms.real + t1 * measure.atoms.imag
    return complex(np.sum(measure.weights * np.exp(1j * phase)))


def mixed_power_mean(measure: EmpiricalMeasure, m: int, r: int) -> complex:
    """sum_j weight_j atom_j^r conj(atom_j)^(m-r)."""
    if not (0 <= r <= m):
        raise ValueError(f"need 0 <= r <= m, got r={r}, m={m}")
    a = measure.atoms
    return complex(np.sum(measure.weights * a**r * np.conj(a) ** (m - r)))


def pairing_fraction(targets, probes, eps0: float) -> float:
    """Fraction of probes strictly within eps0 of their nearest target."""
    targets = np.atleast_1d(np.asarray(targets, dtype=complex))
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    if targets.size == 0 or probes.size == 0:
        raise ValueError("need nonempty target and probe sets")
    if eps0 <= 0:
        raise ValueError(f"eps0 must be positive, got {eps0}")
    tree = cKDTree(np.column_stack([targets.real, targets.imag]))
    dist, _ = tree.query(np.column_stack([probes.real, probes.imag]))
    return float(np.mean(dist < eps0))


def write_measure_csv(measure: EmpiricalMeasure, path) -> None:
    """Two-column complex CSV; a weight column is added only when non-uniform."""
    uniform = np.allclose(measure.weights, 1.0 / measure.size, rtol=0, atol=1e-15)
    lines = []
    if uniform:
        lines.append("re,im")
        for a in measure.atoms:
            lines.append(f"{a.real:.17g},{a.imag:.17g}")
    else:
        lines.append("re,im,weight")
        for a, w in zip(measure.atoms, measure.weights):
            lines.append(f"{a.real:.17g},{a.imag:.17g},{w:.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_measure_csv(path) -> EmpiricalMeasure:
    """Read `re,im[,weight]` rows; a header row is optional, weights renormalize."""
    atoms, weights = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                vals = [float(v) for v in parts]
            except ValueError:
                if line_no == 0:
                    continue  # header
                raise ValueError(f"bad CSV row {line!r}") from None
            if len(vals) == 2:
                atoms.append(complex(vals[0], vals[1]))
                weights.append(None)
            elif len(vals) == 3:
                atoms.append(complex(vals[0], vals[1]))
                weights.append(vals[2])
            else:
                raise ValueError(f"expected 2 or 3 columns, got {len(vals)}")
    if not atoms:
        raise ValueError(f"no atoms in {path}")
    if any(w is None for w in weights):
        if not all(w is None for w in weights):
            raise ValueError("mixed weighted and unweighted rows")
        return EmpiricalMeasure.from_points(np.asarray(atoms))
    w = np.asarray(weights, dtype=float)
    if w.sum() <= 0:
        raise ValueError("weights must have positive total")
    return EmpiricalMeasure(np.asarray(atoms), w / w.sum())
