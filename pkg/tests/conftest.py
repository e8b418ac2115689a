from fractions import Fraction

import pytest
import sympy
from hypothesis import settings

from frontkit.divisor import DeformationFamily
from frontkit.poly import Polynomial
from frontkit.presets import example1, example2
from frontkit.wavefront import InitialFront, build_phase, extract_iota

# exact arithmetic makes single examples slow now and then; time limits live in the acceptance suite
settings.register_profile("exact", deadline=None, derandomize=True)
settings.load_profile("exact")


def to_sympy(p: Polynomial):
    """Independent view of a polynomial for oracle comparisons."""
    syms = sympy.symbols(p.ring.names)
    if not isinstance(syms, (tuple, list)):
        syms = (syms,)
    out = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, e):
            term *= s ** k
        out += term
    return sympy.expand(out)


def _frame(cfg):
    front = InitialFront.parse(cfg["F"], cfg["variables"])
    phase = build_phase(front)
    focal = [Fraction(v) for v in cfg["focal"]]
    e_list = [phase.z_ring.parse(e) for e in cfg["e_list"]]
    u = []
    if cfg.get("u_constraints"):
        from frontkit.poly import Ring
        sr = Ring(f"s{j}" for j in range(1, len(e_list) + 1))
        u = [sr.parse(t) for t in cfg["u_constraints"]]
    frame = extract_iota(phase, focal, e_list, nu=cfg["nu"], u_constraints=u)
    return phase, frame, DeformationFamily.from_frame(frame)


@pytest.fixture(scope="session")
def planar_a2():
    return _frame(example1("2"))


@pytest.fixture(scope="session")
def planar_a1():
    return _frame(example1("1"))


@pytest.fixture(scope="session")
def spatial():
    return _frame(example2("1", "2"))
