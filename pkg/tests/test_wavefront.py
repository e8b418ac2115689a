import math
from fractions import Fraction

import pytest
import sympy

from frontkit.arith import format_rational
from frontkit.poly import Ring
from frontkit.wavefront import (AmbiguousDecompositionError, BasisInsufficientError, InitialFront,
                                build_phase, decompose, default_e_list, extract_iota,
                                local_milnor_number, milnor_dimension, phase_at, phase_value,
                                sample_front, verify_assumptions)

from conftest import to_sympy

# expanded phase of the planar front F = a z^2 + z^4, with (x1, x2) the spatial and height coordinates
PLANAR_EXPANSION = (
    "-t^2 + x2^2 + 4*A*x1*x2*z + (-4*A^2*t^2 + 4*A^2*x1^2 - 2*A*x2)*z^2"
    " + (-4*A^2*x1 + 8*x1*x2)*z^3 + (A^2 - 16*A*t^2 + 16*A*x1^2 - 6*x2)*z^4"
    " - 20*A*x1*z^5 + (6*A - 16*t^2 + 16*x1^2)*z^6 - 24*x1*z^7 + 9*z^8")

# expanded phase of the spatial front F = -(k1 z1^2 + k2 z2^2)/2
SPATIAL_EXPANSION = (
    "-t^2 + x3^2 - K1^2*x1*z1^3 + (K1^2*z1^4)/4 - 2*K2*x3*(x2 - z2)*z2"
    " - K2^2*t^2*z2^2 - K2*x3*z2^2 + K2^2*(x2 - z2)^2*z2^2 + K2^2*(x2 - z2)*z2^3 + (K2^2*z2^4)/4"
    " + z1^2*(-K1^2*t^2 + K1^2*x1^2 + K1*x3 - K1*K2*(x2 - z2)*z2 - 1/2*K1*K2*z2^2)"
    " + z1*(-2*K1*x1*x3 + 2*K1*K2*x1*(x2 - z2)*z2 + K1*K2*x1*z2^2)")

# coefficients of the planar phase in z^0..z^7 as functions of (x, t)
PLANAR_IOTA = ["-t^2 + x2^2", "4*A*x1*x2", "-4*A^2*t^2 + 4*A^2*x1^2 - 2*A*x2", "-4*A^2*x1 + 8*x1*x2",
               "A^2 - 16*A*t^2 + 16*A*x1^2 - 6*x2", "-20*A*x1", "6*A - 16*t^2 + 16*x1^2", "-24*x1"]
SPATIAL_IOTA = ["-t^2 + x3^2", "-2*K1*x1*x3", "-K1^2*t^2 + K1^2*x1^2 + K1*x3", "-2*K2*x2*x3",
                "-K2^2*t^2 + K2^2*x2^2 + K2*x3", "2*K1*K2*x1*x2", "-K2^2*x2", "-K1^2*x1",
                "-K1*K2*x2", "-K1*K2*x1"]


def _fill(text, **vals):
    for k, v in vals.items():
        text = text.replace(k, f"({format_rational(v)})")
    return text


def planar(a):
    return build_phase(InitialFront.parse(f"({format_rational(a)})*z^2 + z^4", ["z"]))


def spatial(k1, k2):
    return build_phase(InitialFront.parse(
        f"-(({format_rational(k1)})*z1^2 + ({format_rational(k2)})*z2^2)/2", ["z1", "z2"]))


def test_flat_front_phase():
    phase = build_phase(InitialFront.parse("0", ["z"]))
    assert phase.psi == phase.psi.ring.parse("x2^2 - t^2")
    assert phase_at(phase, [5, 3, 3]).is_zero()


@pytest.mark.parametrize("a", [Fraction(2), Fraction(1), Fraction(-1, 3), Fraction(5, 2)])
def test_planar_expansion(a):
    phase = planar(a)
    assert phase.psi == phase.psi.ring.parse(_fill(PLANAR_EXPANSION, A=a))
    z7 = {e: c for e, c in phase.psi.coefficients_in(["z"]).items()}
    assert str(z7[(7,)]) == "-24*x1" and z7[(8,)].constant_coeff() == 9


@pytest.mark.parametrize("k1,k2", [(1, 2), (Fraction(1, 2), 3)])
def test_spatial_expansion(k1, k2):
    phase = spatial(k1, k2)
    assert phase.psi == phase.psi.ring.parse(_fill(SPATIAL_EXPANSION, K1=k1, K2=k2))


def test_phase_against_symbolic_definition():
    # independent derivation of the defining formula in sympy, for a front in two variables
    F_text = "z1^3 - 2*z1*z2 + z2^4/3"
    phase = build_phase(InitialFront.parse(F_text, ["z1", "z2"]))
    x1, x2, x3, t, z1, z2 = sympy.symbols("x1 x2 x3 t z1 z2")
    F = z1 ** 3 - 2 * z1 * z2 + z2 ** 4 / 3
    g1, g2 = sympy.diff(F, z1), sympy.diff(F, z2)
    ref = ((x1 - z1) * g1 + (x2 - z2) * g2 + x3 + F) ** 2 - t ** 2 * (g1 ** 2 + g2 ** 2 + 1)
    assert to_sympy(phase.psi) == sympy.expand(ref)


def test_phase_even_in_t():
    psi = spatial(1, 2).psi
    ti = psi.ring.index("t")
    assert all(e[ti] in (0, 2) for e in psi.terms)


def test_relabeling_invariance():
    a = build_phase(InitialFront.parse("z1^2*z2 + z2^3 - z1", ["z1", "z2"])).psi
    b = build_phase(InitialFront.parse("w2^2*w1 + w1^3 - w2", ["w1", "w2"])).psi
    # swap the z-variables together with their spatial partners
    swapped = b.substitute({"w1": a.ring.var("z2"), "w2": a.ring.var("z1"),
                            "x1": a.ring.var("x2"), "x2": a.ring.var("x1"),
                            "x3": a.ring.var("x3"), "t": a.ring.var("t")})
    assert swapped == a


@pytest.mark.parametrize("a", [Fraction(2), Fraction(1), Fraction(3), Fraction(-1, 2)])
def test_phase_at_focal(a):
    base = phase_at(planar(a), [0, -1 / (2 * a), 1 / (2 * a)])
    expected = Ring(["z"]).parse(_fill("(-(1/A) + A^2)*z^4 + (-(4/A^2) + 6*A)*z^6 + 9*z^8", A=a))
    assert base == expected
    if a == 1:
        assert base == Ring(["z"]).parse("2*z^6 + 9*z^8")
    if a == 2:
        assert base == Ring(["z"]).parse("7/2*z^4 + 11*z^6 + 9*z^8")


@pytest.mark.parametrize("a", [Fraction(2), Fraction(1), Fraction(3, 2)])
def test_planar_iota(a):
    phase = planar(a)
    focal = [Fraction(0), -1 / (2 * a), 1 / (2 * a)]
    z = Ring(["z"])
    frame = extract_iota(phase, focal, [z.var("z") ** k for k in range(8)])
    xt = phase.xt_ring
    for mine, reference in zip(frame.iota, PLANAR_IOTA):
        ref = xt.parse(_fill(reference, A=a))
        # iota is the coefficient minus its value at the focal point
        assert mine == ref - ref.evaluate(focal)
    assert frame.reconstruct() == phase.psi
    assert all(v == 0 for v in frame.iota_at(focal))
    if a == 2:
        assert str(frame.iota[5]) == "-40*x1" and str(frame.iota[7]) == "-24*x1"


def test_spatial_iota_and_relations():
    phase = spatial(1, 2)
    zr = phase.z_ring
    e = [zr.parse(t) for t in ["1", "z1", "z1^2", "z2", "z2^2", "z1*z2", "z2^3", "z1^3", "z1^2*z2", "z1*z2^2"]]
    focal = [0, 0, 1, 1]
    frame = extract_iota(phase, focal, e, nu=8)
    xt = phase.xt_ring
    for mine, reference in zip(frame.iota, SPATIAL_IOTA):
        ref = xt.parse(_fill(reference, K1=1, K2=2))
        assert mine == ref - ref.evaluate([Fraction(v) for v in focal])
    s = frame.iota
    assert str(s[6]) == "-4*x2" and str(s[8]) == "-2*x2"
    assert (s[6] - s[8] * 2).is_zero() and (s[9] - s[7] * 2).is_zero()
    assert frame.mu == 5


def test_default_e_list():
    phase = planar(2)
    e, mu = default_e_list(phase, [0, Fraction(-1, 4), Fraction(1, 4)])
    assert mu == 7 and [str(p) for p in e] == ["1", "z"] + [f"z^{k}" for k in range(2, 8)]
    frame = extract_iota(phase, [0, Fraction(-1, 4), Fraction(1, 4)])
    assert frame.m == 8 and frame.nu == 8
    e2, mu2 = default_e_list(spatial(1, 2), [0, 0, 1, 1])
    assert mu2 == 5 and e2[0] == spatial(1, 2).z_ring.one()
    assert {str(p) for p in e2[1:3]} == {"z1", "z2"}


def test_extract_iota_errors():
    phase = planar(2)
    z = Ring(["z"])
    focal = [0, Fraction(-1, 4), Fraction(1, 4)]
    with pytest.raises(BasisInsufficientError) as info:
        extract_iota(phase, focal, [z.var("z") ** k for k in range(7)])
    assert info.value.uncovered == ["z^7"]
    with pytest.raises(AmbiguousDecompositionError):
        decompose(phase.psi, ["z"], [z.one(), z.parse("z + 1"), z.var("z")])


def test_decompose_round_trip():
    r = Ring(["p", "z"])
    z = Ring(["z"])
    diff = r.parse("p^2*(z^2 + 1) + 3*p*z")
    c = decompose(diff, ["z"], [z.one(), z.var("z"), z.parse("z^2 + 1")])
    assert [str(x) for x in c] == ["0", "3*p", "p^2"]


def test_verify_assumptions_spatial():
    phase = spatial(1, 2)
    zr = phase.z_ring
    e = [zr.parse(t) for t in ["1", "z1", "z1^2", "z2", "z2^2", "z1*z2", "z2^3", "z1^3", "z1^2*z2", "z1*z2^2"]]
    sr = Ring(f"s{j}" for j in range(1, 11))
    u = [sr.parse("s7 - 2*s9"), sr.parse("s10 - 2*s8")]
    frame = extract_iota(phase, [0, 0, 1, 1], e, nu=8, u_constraints=u)
    low = [Fraction(v) for v in (3, -1, 2, 5, Fraction(1, 2))] + [0] * 4
    off = low[:5] + [Fraction(1), 0, 0, 0]
    rep = verify_assumptions(frame, phase, [low, off])
    first, second = rep.samples
    assert first.dim_full == 5 and first.passed(5)
    assert second.dim_full == 7 and not second.on_U and not second.passed(5)
    assert not rep.all_passed
    assert milnor_dimension(frame.base, e[:6] + [e[6]], [0] + low[:5] + [1]) == 7


def test_verify_assumptions_planar():
    phase = planar(2)
    z = Ring(["z"])
    frame = extract_iota(phase, [0, Fraction(-1, 4), Fraction(1, 4)], [z.var("z") ** k for k in range(8)])
    rep = verify_assumptions(frame, None, [[0] * 7, [1, 2, 3, 4, 5, 6, 7], [Fraction(-1, 3)] * 7])
    assert rep.all_passed and all(c.dim_full == 7 for c in rep.samples)


def test_local_milnor_numbers():
    z = Ring(["z"])
    assert local_milnor_number(z.parse("7/2*z^4 + 11*z^6 + 9*z^8")) == 3
    assert local_milnor_number(z.parse("2*z^6 + 9*z^8")) == 5
    phase = spatial(1, 2)
    assert local_milnor_number(phase_at(phase, [0, 0, 1, 1])) == 3


def test_sample_front_examples():
    front = InitialFront.parse("2*z^2 + z^4", ["z"])
    pts = sample_front(front, 0.5, [0.0])
    assert sorted(p.x for p in pts) == [(0.0, -0.5), (0.0, 0.5)]
    flat = InitialFront.parse("0", ["z"])
    for p in sample_front(flat, 1.0, [-1.0, 0.25, 2.0]):
        assert p.x == (p.z[0], float(p.branch))
    # at t = 0 the front is the initial curve u = -F(z)
    for p in sample_front(front, 0.0, [-1.0, 0.3]):
        assert p.x == (p.z[0], -(2 * p.z[0] ** 2 + p.z[0] ** 4))


@pytest.mark.parametrize("t", [2 / 3, 0.5, 0.55, 0.53, 0.501])
def test_sampled_points_lie_on_phase_zero(t):
    front = InitialFront.parse("z^2 + z^4", ["z"])
    phase = build_phase(front)
    for p in sample_front(front, t, [i / 50 for i in range(-75, 76)]):
        assert abs(phase_value(phase, p.x, t, p.z)) < 1e-9
    front2 = InitialFront.parse("-(z1^2 + 2*z2^2)/2", ["z1", "z2"])
    phase2 = build_phase(front2)
    grid = [(i / 5, j / 5) for i in range(-5, 6) for j in range(-5, 6)]
    for p in sample_front(front2, t, grid):
        assert math.isfinite(p.x[2])
        assert abs(phase_value(phase2, p.x, t, p.z)) < 1e-9
