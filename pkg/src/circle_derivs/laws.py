"""Probability laws on the unit circle: samplers, moments, characteristic functions.

All sampling goes through the angle: draw theta deterministically from a
counter-based generator, then map to ``(cos theta, sin theta)``, so every
sample has unit modulus up to rounding.  Randomness comes from Philox 4x64
(fixed, published constants) keyed by ``(seed, stream)``; uniform doubles are
built from the raw 64-bit words with the usual 53-bit mantissa convention
``(word >> 11) * 2**-53``.  Identical ``(seed, stream)`` therefore reproduces
the identical draw sequence independent of process, platform word order, or
how many values earlier calls consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

UNIT_MODULUS_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12
CHAR_FN_QUAD_ABS_TOL = 1e-10

_U64_MAX = 2**64 - 1

# Counter-block indices keep independent draw purposes from colliding while
# sharing one (seed, stream) key: zeros, auxiliary weights, selftest shapes.
DOMAIN_ZEROS = 0
DOMAIN_WEIGHTS = 1
DOMAIN_SHAPE = 2


@dataclass(frozen=True)
class SeedSpec:
    """Reproducibility key: master seed plus a sub-stream index.

    Distinct streams under one seed give independent sequences, so parallel
    sweeps assign one stream per cell and never share generator state.
    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not isinstance(v, int) or not (0 <= v <= _U64_MAX):
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")


def uniform_doubles(spec: SeedSpec, count: int, domain: int = DOMAIN_ZEROS) -> np.ndarray:
    """`count` doubles in [0, 1) from the Philox stream keyed by `spec`."""
    key = np.array([spec.seed, spec.stream], dtype=np.uint64)
    counter = np.array([0, 0, domain, 0], dtype=np.uint64)
    raw = np.random.Philox(key=key, counter=counter).random_raw(count)
    return (raw >> np.uint64(11)) * 2.0**-53


class CircleLaw:
    """Base class for laws supported on the unit circle."""

    def sample(self, n: int, seed: SeedSpec) -> np.ndarray:
        """n i.i.d. draws as complex128; deterministic in (law, n, seed)."""
        if n < 1:
            raise ValueError(f"sample size must be >= 1, got {n}")
        theta = self._sample_angles(n, seed)
        return np.cos(theta) + 1j * np.sin(theta)

    def _sample_angles(self, n: int, seed: SeedSpec) -> np.ndarray:
        raise NotImplementedError

    def moment(self, p: int) -> complex:
        """E[Z^p] in closed form."""
        raise NotImplementedError

    def char_fn(self, t) -> complex:
        """E[exp(i <t, Z>)] for a real 2-vector t (plane dot product)."""
        raise NotImplementedError

    def spec_string(self) -> str:
        """Round-trippable CLI/config representation."""
        raise NotImplementedError


@dataclass(frozen=True)
class UniformLaw(CircleLaw):
    """Haar-uniform law on the circle."""

    def _sample_angles(self, n, seed):
        return 2.0 * math.pi * uniform_doubles(seed, n)

    def moment(self, p):
        _check_moment_order(p)
        return complex(1.0) if p == 0 else complex(0.0)

    def char_fn(self, t):
        return _angle_quad_char(t, 0.0, 2.0 * math.pi)

    def spec_string(self):
        return "uniform"


@dataclass(frozen=True)
class AtomsLaw(CircleLaw):
    """Finitely supported law; every atom must sit on the unit circle."""

    points: tuple
    weights: tuple

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        ws = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", ws)
        if len(pts) == 0 or len(pts) != len(ws):
            raise ValueError("atoms law needs matching nonempty point/weight lists")
        for z in pts:
            if abs(abs(z) - 1.0) > UNIT_MODULUS_TOL:
                raise ValueError(f"atom {z} is off the unit circle")
        if any(w < 0 for w in ws):
            raise ValueError("atom weights must be nonnegative")
        if abs(sum(ws) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"atom weights sum to {sum(ws)}, expected 1")

    def sample(self, n, seed):
        if n < 1:
            raise ValueError(f"sample size must be >= 1, got {n}")
        u = uniform_doubles(seed, n)
        cum = np.cumsum(np.asarray(self.weights))
        cum[-1] = 1.0  # guard the top bin against rounding
        idx = np.searchsorted(cum, u, side="right")
        return np.asarray(self.points, dtype=complex)[idx]

    def _sample_angles(self, n, seed):  # pragma: no cover - sample() overridden
        raise NotImplementedError

    def moment(self, p):
        _check_moment_order(p)
        zs = np.asarray(self.points)
        ws = np.asarray(self.weights)
        return complex(np.sum(ws * zs**p))

    def char_fn(self, t):
        t0, t1 = float(t[0]), float(t[1])
        zs = np.asarray(self.points)
        ws = np.asarray(self.weights)
        return complex(np.sum(ws * np.exp(1j * (t0 * zs.real + t1 * zs.imag))))

    def spec_string(self):
        parts = [f"{format_complex(z)},{w:.17g}" for z, w in zip(self.points, self.weights)]
        return "atoms:" + ";".join(parts)


@dataclass(frozen=True)
class ArcLaw(CircleLaw):
    """Uniform law on the arc of angles [theta_lo, theta_hi]."""

    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        lo, hi = float(self.theta_lo), float(self.theta_hi)
        object.__setattr__(self, "theta_lo", lo)
        object.__setattr__(self, "theta_hi", hi)
        if not (lo < hi <= lo + 2.0 * math.pi):
            raise ValueError(f"arc needs theta_lo < theta_hi <= theta_lo + 2*pi, got [{lo}, {hi}]")

    @property
    def arc_length(self) -> float:
        return self.theta_hi - self.theta_lo

    def _sample_angles(self, n, seed):
        return self.theta_lo + self.arc_length * uniform_doubles(seed, n)

    def moment(self, p):
        _check_moment_order(p)
        if p == 0:
            return complex(1.0)
        lo, hi = self.theta_lo, self.theta_hi
        return complex((np.exp(1j * p * hi) - np.exp(1j * p * lo)) / (1j * p * (hi - lo)))

    def char_fn(self, t):
        return _angle_quad_char(t, self.theta_lo, self.theta_hi)

    def spec_string(self):
        return f"arc:{self.theta_lo:.17g},{self.theta_hi:.17g}"


def _check_moment_order(p) -> None:
    if not isinstance(p, (int, np.integer)) or p < 0:
        raise ValueError(f"moment order must be a nonnegative integer, got {p!r}")


def _angle_quad_char(t, lo: float, hi: float) -> complex:
    """Adaptive quadrature of exp(i(t0 cos + t1 sin)) over an angle range, normalized."""
    t0, t1 = float(t[0]), float(t[1])

    def re_part(theta):
        return math.cos(t0 * math.cos(theta) + t1 * math.sin(theta))

    def im_part(theta):
        return math.sin(t0 * math.cos(theta) + t1 * math.sin(theta))

    kw = dict(epsabs=CHAR_FN_QUAD_ABS_TOL, epsrel=1e-12, limit=200)
    re_val, _ = quad(re_part, lo, hi, **kw)
    im_val, _ = quad(im_part, lo, hi, **kw)
    return (re_val + 1j * im_val) / (hi - lo)


def parse_complex(text: str) -> complex:
    """Parse the CLI complex literal form `re+imi` (also bare reals)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    try:
        return complex(s.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise ValueError(f"bad complex literal {text!r}, expected re+imi") from None


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_law(text: str) -> CircleLaw:
    """Parse `uniform`, `atoms:z1,w1;z2,w2;...`, or `arc:lo,hi` (radians)."""
    s = text.strip()
    if s == "uniform":
        return UniformLaw()
    if s.startswith("atoms:"):
        body = s[len("atoms:"):]
        points, weights = [], []
        for chunk in body.split(";"):
            if not chunk:
                continue
            z_str, sep, w_str = chunk.rpartition(",")
            if not sep:
                raise ValueError(f"atom spec {chunk!r} needs z,w")
            points.append(parse_complex(z_str))
            weights.append(float(w_str))
        return AtomsLaw(tuple(points), tuple(weights))
    if s.startswith("arc:"):
        body = s[len("arc:"):]
        try:
            lo_str, hi_str = body.split(",")
        except ValueError:
            raise ValueError(f"arc spec {body!r} needs lo,hi") from None
        return ArcLaw(float(lo_str), float(hi_str))
    raise ValueError(f"unknown law spec {text!r}")
