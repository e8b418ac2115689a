import random
from fractions import Fraction

import pytest
import sympy

from frontkit.arith import RatFunc, format_rational
from frontkit.divisor import (ALMOST_FREE, FREE, DeformationFamily, build_T, coordinate_derivatives,
                              directional_derivative_T, discriminant_poly, isolated_nontransversality_check,
                              pencil_minors, pencil_ring, sigma_matrices, strip_units,
                              stratum_tangent_check, transversality_verdict)
from frontkit.linalg import Matrix
from frontkit.poly import Polynomial, Ring
from frontkit.presets import EXAMPLE1_SELECTIONS
from frontkit.wavefront import DeformationFrame, InitialFront, build_phase, extract_iota

from conftest import to_sympy

Q = Fraction
Z = Ring(["z"])


def cubic_family():
    return DeformationFamily(Z.parse("z^3"), [Z.one(), Z.var("z")], 2, 2)


def planar_frame(a, e_order=None):
    a = Q(a)
    phase = build_phase(InitialFront.parse(f"({format_rational(a)})*z^2 + z^4", ["z"]))
    e = [Z.var("z") ** k for k in (e_order or range(8))]
    frame = extract_iota(phase, [0, -1 / (2 * a), 1 / (2 * a)], e, nu=8)
    return frame, DeformationFamily.from_frame(frame)


# closed forms of the nonzero Sigma entries of the planar example at its focal point
def sigma_closed_form(a):
    A1 = -(2 - 5 * a ** 3 + 3 * a ** 6) / (36 * a ** 3)
    A2 = -(4 - 6 * a ** 3 + 3 * a ** 6) / (12 * a ** 4)
    A3 = (-4 + 10 * a ** 3 - 9 * a ** 6 + 3 * a ** 9) / (216 * a ** 5)
    A4 = (-2 + a ** 3) ** 2 * (-2 + 3 * a ** 3) / (72 * a ** 6)
    A5 = -(-2 + a ** 3) ** 2 * (2 - 5 * a ** 3 + 3 * a ** 6) / (1296 * a ** 7)
    A6 = -(16 - 56 * a ** 3 + 68 * a ** 6 - 30 * a ** 9 + 3 * a ** 12) / (432 * a ** 8)
    M = [[0] * 8 for _ in range(8)]
    M[0][4], M[0][6] = (-1 + a ** 3) / (2 * a), -(1 / a ** 2) + 3 * a / 2
    for r, (x, y) in zip((1, 3, 5), ((A1, A2), (A3, A4), (A5, A6))):
        M[r][3], M[r][5] = x, y
        M[r + 1][4], M[r + 1][6] = x, y
    M[7][3], M[7][5], M[7][7] = 4 * (-1 + a ** 3) / a, 6 * (-(4 / a ** 2) + 6 * a), 72
    return M


def diota_closed_form(a):
    return [[0, -2, 0, -4 / a - 4 * a * a, 0, -20 * a, 0, -24],
            [-1 / a, 0, -2 * a, 0, -6, 0, 0, 0],
            [-1 / a, 0, -4 * a, 0, -16, 0, -16 / a, 0]]


def proportional(a, b):
    pairs = [(x, y) for x, y in zip(a, b) if x or y]
    if any(not x or not y for x, y in pairs):
        return False
    return not pairs or all(y * pairs[0][0] == x * pairs[0][1] for x, y in pairs)


def test_cubic_sigma_over_line():
    h = RatFunc.h()
    sig = sigma_matrices(cubic_family(), [h])
    assert sig.C == Matrix([[0, h * Q(2, 3)], [-(h * h) * Q(2, 9), 0]])
    assert sig.sigma_tilde == sig.C


@pytest.mark.parametrize("p", [Q(1), Q(-3), Q(2, 5)])
def test_cubic_discriminant(p):
    assert discriminant_poly(cubic_family(), [p]) == [4 * p ** 3 / 27, 0, 1]


def test_quadratic_discriminant():
    fam = DeformationFamily(Z.parse("z^2"), [Z.one()], 1, 1)
    assert discriminant_poly(fam, []) == [0, 1]


@pytest.mark.parametrize("a", [Q(2), Q(3), Q(-1, 2), Q(1)])
def test_sigma_at_focal_matches_closed_form(a):
    frame, fam = planar_frame(a)
    s = frame.iota_at(frame.focal)
    full = sigma_matrices(fam, s[1:], s1=s[0]).sigma_full
    ref = sigma_closed_form(a)
    assert [list(r) for r in full.rows[:7]] == ref[:7]
    assert proportional(full.rows[7], ref[7])
    if a == 2:
        assert full.rows[1][5] == Q(-37, 48)
    if a == 1:
        assert full.rows[1][3] == full.rows[3][3] == full.rows[5][3] == 0
        assert full.rank() == 3
    else:
        assert full.rank() == 5


@pytest.mark.parametrize("a", [Q(2), Q(1), Q(5, 2)])
def test_build_T_layout(a):
    frame, fam = planar_frame(a)
    T = build_T(fam, frame, frame.focal)
    assert [list(r) for r in T.diota_rows.rows] == diota_closed_form(a)
    assert T.rank() == (6 if a == 1 else 8)
    if a == 2:
        assert T.diota_rows.rows[0] == [0, -2, 0, -18, 0, -40, 0, -24]


def test_t_derivative_rows_planar_degenerate():
    frame, fam = planar_frame(1)
    dT = directional_derivative_T(fam, frame, frame.focal, [0, 0, 1])
    assert dT.rows[10] == [-2, 0, -8, 0, -32, 0, -32, 0]
    assert proportional(dT.rows[0], [-1, 0, -3, 0, -8, 0, -4, 0])


def test_constant_rows_have_zero_derivative(spatial):
    phase, frame, fam = spatial
    d = coordinate_derivatives(fam, frame, frame.focal)
    for M in d.values():
        # rows mu+1..nu carry the constant -1 on the diagonal
        for i in range(fam.mu, fam.nu):
            assert M.rows[i][i] == 0


@pytest.mark.parametrize("direction", [[0, 0, 1], [1, 0, 0], [0, 1, 0], [1, -2, 3]])
def test_derivative_matches_difference_quotients(direction, planar_a1):
    _, frame, fam = planar_a1
    exact = directional_derivative_T(fam, frame, frame.focal, direction)

    def quotient(h):
        p = [b + h * d for b, d in zip(frame.focal, direction)]
        T1 = build_T(fam, frame, p).entries
        return (T1 - build_T(fam, frame, frame.focal).entries).scale(1 / h)

    errs = []
    for h in (Q(1, 50), Q(1, 100), Q(1, 200)):
        rich = quotient(h / 2).scale(2) - quotient(h)        # Richardson: error O(h^2)
        errs.append(max(abs(x) for r in (rich - exact).rows for x in r))
    # halving h divides an O(h^2) error by about 4; it may also vanish outright
    for big, small in zip(errs, errs[1:]):
        assert small == 0 or big / small > Q(7, 2)


def test_derivative_pole_is_reported():
    # phi = (1 + s3) z^3 + s2 z + s1 with s3 = x1 - 1: the cubic term dies at x1 = 0,
    # so Sigma along the x1-axis has a pole at the base point
    frame, _ = planar_frame(2)
    xt = frame.phase.xt_ring
    e = [Z.one(), Z.var("z"), Z.parse("z^3")]
    bad = DeformationFrame(frame.phase, (Q(0), Q(0), Q(0)), Z.parse("z^3"), 2, e,
                           [xt.zero(), xt.one(), xt.parse("x1 - 1")], 2, [], (Q(0),))
    fam = DeformationFamily.from_frame(bad)
    with pytest.raises(ZeroDivisionError, match="pole at h = 0"):
        directional_derivative_T(fam, bad, [0, 0, 0], [1, 0, 0])


@pytest.mark.parametrize("seed", range(10))
def test_weierstrass_form_and_resultant(seed, planar_a2):
    _, frame, fam = planar_a2
    rng = random.Random(seed)
    sp = [Q(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(7)]
    coeffs = discriminant_poly(fam, sp)
    assert len(coeffs) == fam.mu + 1 and coeffs[-1] == 1
    # sympy resultant as an independent oracle, as a polynomial in s1
    z, s1 = sympy.symbols("z s1")
    phi = to_sympy(frame.base).subs(sympy.Symbol("z"), z) + s1 + sum(
        sympy.Rational(c.numerator, c.denominator) * z ** (k + 1) for k, c in enumerate(sp))
    res = sympy.Poly(sympy.resultant(sympy.diff(phi, z), phi, z), s1)
    mine = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * s1 ** k
                          for k, c in enumerate(coeffs)), s1)
    assert res == mine * 72 ** 8 or res == -mine * 72 ** 8


@pytest.mark.parametrize("seed", range(8))
def test_forced_singularity_gives_zero(seed, planar_a2):
    _, frame, fam = planar_a2
    rng = random.Random(seed)
    c = Q(rng.randint(-3, 3), rng.randint(1, 3))
    tail = [Q(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(6)]    # s3..s8
    g = frame.base + sum((Z.var("z") ** (k + 2) * v for k, v in enumerate(tail)), Z.zero())
    s2 = -g.derivative("z").evaluate([c])          # makes phi'(c) = 0
    s1 = -(g.evaluate([c]) + s2 * c)               # and phi(c) = 0
    coeffs = discriminant_poly(fam, [s2] + tail)
    assert sum(v * s1 ** k for k, v in enumerate(coeffs)) == 0


@pytest.mark.parametrize("seed", range(6))
def test_spatial_discriminant_monic_on_U(seed, spatial):
    _, frame, fam = spatial
    rng = random.Random(seed)
    sp = [Q(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(9)]
    sp[7], sp[8] = sp[5] / 2, 2 * sp[6]
    assert fam.on_U(sp)
    coeffs = discriminant_poly(fam, sp)
    assert len(coeffs) == 6 and coeffs[-1] == 1


def test_spatial_discriminant_at_focal(spatial):
    _, frame, fam = spatial
    s = frame.iota_at(frame.focal)
    assert discriminant_poly(fam, s[1:]) == [0, 0, 0, 1, -2, 1]


def test_rank_invariant_under_basis_permutation_and_scaling():
    for a, expected in ((2, 8), (1, 6)):
        frame, fam = planar_frame(a, [0, 1, 3, 2, 4, 6, 5, 7])
        T = build_T(fam, frame, frame.focal)
        assert T.rank() == expected
        scaled = Matrix([[x * Q(-72 if i % 2 else 5, 3) for x in r] if i < 8 else r
                         for i, r in enumerate(T.entries.rows)])
        assert scaled.rank() == expected


def test_pencil_minors_trivial():
    T0 = Matrix.identity(3)
    zero = Matrix.zeros(3, 3)
    ms = pencil_minors(T0, {"x1": zero, "x2": zero, "t": zero}, [[1, 2, 3]])
    assert [m.constant_coeff() for m in ms] == [1]
    with pytest.raises(IndexError):
        pencil_minors(T0, {"x1": zero, "x2": zero, "t": zero}, [[1, 2, 4]])
    with pytest.raises(ValueError):
        pencil_minors(T0, {"x1": zero, "x2": zero, "t": zero}, [[1, 2]], nu=3)


@pytest.fixture(scope="module")
def planar_minors(planar_a1):
    _, frame, fam = planar_a1
    T0 = build_T(fam, frame, frame.focal).chart
    dT = coordinate_derivatives(fam, frame, frame.focal)
    return pencil_minors(T0, dT, EXAMPLE1_SELECTIONS)


def test_pencil_minor_factors(planar_minors):
    R = planar_minors[0].ring
    unit = R.parse("1 + 2*tau")
    for m in planar_minors:
        stripped, removed = strip_units(m)
        assert removed == ["tau + 1/2"]
        ratio = sympy.cancel(to_sympy(m) / (to_sympy(stripped) * to_sympy(unit)))
        assert ratio.is_number and ratio != 0
    # the second selection also carries a factor xi1
    assert all(e[R.index("xi1")] >= 1 for e in planar_minors[1].terms)


def test_strip_units_keeps_local_factors():
    R = pencil_ring(2)
    p = R.parse("xi1*(1 + 2*tau)*(3 - xi2)")
    s, removed = strip_units(p)
    assert sorted(removed) == ["tau + 1/2", "xi2 - 3"]
    assert set(s.terms) == {(1, 0, 0)}


def test_isolation_examples():
    R = pencil_ring(2)
    xi1, xi2, tau = R.gens()
    r = isolated_nontransversality_check([xi1, xi2, tau])
    assert r.isolated and r.multiplicity == 1
    r = isolated_nontransversality_check([xi1 ** 2, xi2, tau])
    assert r.isolated and r.multiplicity == 2
    r = isolated_nontransversality_check([xi1 * (1 + tau * 2), xi2 * (tau - 3), tau])
    assert r.isolated and r.multiplicity == 1
    r = isolated_nontransversality_check([xi1 * xi2, tau], max_power=6)
    assert not r.isolated and r.witness
    r = isolated_nontransversality_check([xi1 + 1, xi2, tau])
    assert not r.isolated and r.multiplicity == 0


def test_stratum_tangent_check_trivial():
    S = Ring(["p", "q"])
    ident = Matrix([[int(i == j) for j in range(4)] for i in range(2)])
    comp = stratum_tangent_check([S.zero(), S.zero(), S.var("p"), S.var("q")], [0, 0], ident)
    assert comp.transverse_only_at_point and comp.tangent_dim == 2
    same = stratum_tangent_check([S.var("p"), S.var("q"), S.zero(), S.zero()], [0, 0], ident)
    assert not same.transverse_only_at_point and len(same.intersection) == 2


def test_verdicts(planar_a2, spatial):
    _, frame, fam = planar_a2
    assert transversality_verdict(fam, frame, frame.focal).verdict == FREE
    _, frame2, fam2 = spatial
    rep = transversality_verdict(fam2, frame2, frame2.focal)
    assert rep.verdict == FREE and rep.rank_T == 8 and rep.rank_sigma == 5


def test_verdict_degenerate(planar_a1):
    _, frame, fam = planar_a1
    rep = transversality_verdict(fam, frame, frame.focal, selections=EXAMPLE1_SELECTIONS)
    assert rep.verdict == ALMOST_FREE
    assert rep.rank_T == 6 and rep.rank_sigma == 3 and rep.rank_diota == 3
    assert rep.isolation.isolated
