import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from circle_derivs.laws import (ArcLaw, AtomsLaw, SeedSpec, UniformLaw,
                                format_complex, parse_complex, parse_law,
                                uniform_doubles)

HALF_ARC = ArcLaw(0.0, math.pi)
PLUS_MINUS = AtomsLaw((1, -1), (0.5, 0.5))
BUILTIN_LAWS = [UniformLaw(), HALF_ARC, PLUS_MINUS,
                AtomsLaw((1, 1j, -1), (0.2, 0.5, 0.3))]


def quad_arc_moment(law: ArcLaw, p: int) -> complex:
    """Independent oracle: direct quadrature of e^{ip theta} over the arc."""
    re, _ = quad(lambda th: math.cos(p * th), law.theta_lo, law.theta_hi, epsabs=1e-13)
    im, _ = quad(lambda th: math.sin(p * th), law.theta_lo, law.theta_hi, epsabs=1e-13)
    return (re + 1j * im) / law.arc_length


def test_single_atom_sampling_is_constant():
    law = AtomsLaw((1,), (1.0,))
    pts = law.sample(5, SeedSpec(123))
    assert np.array_equal(pts, np.ones(5, dtype=complex))


def test_uniform_sample_mean_is_small():
    # CLT: |mean| is O(1/sqrt(n)); 0.05 gives 5x headroom at n = 10^4
    pts = UniformLaw().sample(10_000, SeedSpec(7))
    assert abs(pts.mean()) <= 0.05


def test_arc_sample_stays_on_arc():
    pts = HALF_ARC.sample(10_000, SeedSpec(11))
    angles = np.angle(pts)  # [-pi, pi]; the arc [0, pi] maps to [0, pi]
    assert np.all(angles >= -1e-12)
    assert np.all(angles <= math.pi + 1e-12)


@pytest.mark.parametrize("law", BUILTIN_LAWS)
def test_samples_have_unit_modulus(law):
    pts = law.sample(1000, SeedSpec(5))
    assert np.abs(np.abs(pts) - 1.0).max() <= 1e-12


@pytest.mark.parametrize("law", BUILTIN_LAWS)
def test_sampling_determinism(law):
    a = law.sample(64, SeedSpec(99, 3))
    b = law.sample(64, SeedSpec(99, 3))
    assert np.array_equal(a, b)
    c = law.sample(64, SeedSpec(99, 4))
    assert not np.array_equal(a, c)


def test_streams_are_prefix_stable():
    # drawing more values never changes the earlier ones
    short = uniform_doubles(SeedSpec(1, 2), 10)
    long = uniform_doubles(SeedSpec(1, 2), 1000)
    assert np.array_equal(short, long[:10])


def test_uniform_moments_vanish():
    law = UniformLaw()
    assert law.moment(0) == 1
    for p in range(1, 9):
        assert law.moment(p) == 0


def test_two_atom_second_moment():
    assert PLUS_MINUS.moment(2) == pytest.approx(1.0)


def test_arc_first_moment_closed_form():
    got = HALF_ARC.moment(1)
    assert got == pytest.approx(2j / math.pi, abs=1e-14)
    assert got == pytest.approx(quad_arc_moment(HALF_ARC, 1), abs=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3, 5, 8])
def test_arc_moments_match_quadrature(p):
    law = ArcLaw(0.7, 0.7 + 2.1)
    assert law.moment(p) == pytest.approx(quad_arc_moment(law, p), abs=1e-12)


@pytest.mark.parametrize("law", BUILTIN_LAWS)
def test_moment_modulus_at_most_one(law):
    for p in range(0, 13):
        assert abs(law.moment(p)) <= 1 + 1e-12


@pytest.mark.parametrize("law", BUILTIN_LAWS)
def test_moments_match_monte_carlo(law):
    pts = law.sample(100_000, SeedSpec(2024))
    for p in range(1, 5):
        assert abs((pts**p).mean() - law.moment(p)) <= 0.02


@pytest.mark.parametrize("law", BUILTIN_LAWS)
def test_char_fn_at_zero_is_one(law):
    assert law.char_fn((0.0, 0.0)) == pytest.approx(1.0, abs=1e-10)


def test_char_fn_single_atom():
    law = AtomsLaw((1,), (1.0,))
    assert law.char_fn((math.pi, 0.0)) == pytest.approx(-1.0, abs=1e-12)


def test_char_fn_uniform_bessel_value():
    # radially symmetric: phi((1,0)) = (1/2pi) int cos(cos theta) dtheta = 0.7651976866...
    val = UniformLaw().char_fn((1.0, 0.0))
    assert val == pytest.approx(0.7651976866, abs=1e-9)
    assert abs(val.imag) <= 1e-10


@pytest.mark.parametrize("law", BUILTIN_LAWS)
@pytest.mark.parametrize("t", [(1.0, 0.0), (0.0, 2.5), (-2.0, 3.0), (0.3, -0.4)])
def test_char_fn_matches_monte_carlo(law, t):
    pts = law.sample(100_000, SeedSpec(77))
    mc = np.exp(1j * (t[0] * pts.real + t[1] * pts.imag)).mean()
    assert abs(mc - law.char_fn(t)) <= 0.02


@pytest.mark.parametrize("law", BUILTIN_LAWS)
def test_char_fn_modulus_bound(law):
    for t in [(0.1, 0.0), (3.0, 1.0), (-4.0, 0.5)]:
        assert abs(law.char_fn(t)) <= 1 + 1e-9


def test_atom_law_validation():
    with pytest.raises(ValueError):
        AtomsLaw((0.5,), (1.0,))          # off the circle
    with pytest.raises(ValueError):
        AtomsLaw((1, -1), (0.7, 0.7))     # weights exceed 1
    with pytest.raises(ValueError):
        AtomsLaw((1, -1), (1.5, -0.5))    # negative weight


def test_arc_law_validation():
    with pytest.raises(ValueError):
        ArcLaw(1.0, 1.0)
    with pytest.raises(ValueError):
        ArcLaw(0.0, 7.0)  # longer than the full circle


def test_seed_spec_validation():
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(0, 2**64)
    SeedSpec(2**64 - 1, 2**64 - 1)  # boundary is fine


def test_sample_size_validation():
    with pytest.raises(ValueError):
        UniformLaw().sample(0, SeedSpec(1))


def test_parse_law_round_trip():
    for law in BUILTIN_LAWS:
        again = parse_law(law.spec_string())
        assert again == law


def test_parse_law_examples():
    assert parse_law("uniform") == UniformLaw()
    law = parse_law("atoms:1+0i,0.5;-1+0i,0.5")
    assert law == PLUS_MINUS
    arc = parse_law("arc:0,3.141592653589793")
    assert arc == ArcLaw(0.0, math.pi)


@pytest.mark.parametrize("bad", ["circle", "atoms:", "atoms:1+0i", "arc:1",
                                 "arc:2,1", "atoms:2+0i,1"])
def test_parse_law_rejects(bad):
    with pytest.raises(ValueError):
        parse_law(bad)


@given(st.complex_numbers(allow_nan=False, allow_infinity=False,
                          min_magnitude=0, max_magnitude=1e6))
def test_complex_format_round_trip(z):
    assert parse_complex(format_complex(z)) == z


def test_moment_order_validation():
    with pytest.raises(ValueError):
        UniformLaw().moment(-1)
