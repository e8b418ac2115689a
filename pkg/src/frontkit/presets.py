"""The two worked wave-front examples as ready-made configurations."""

from fractions import Fraction

from .arith import format_rational, parse_rational

# the three row selections used to show the rank drop of the planar example is isolated
EXAMPLE1_SELECTIONS = [[2, 3, 4, 5, 6, 9, 10, 11],
                       [1, 2, 3, 4, 7, 9, 10, 11],
                       [2, 3, 4, 7, 8, 9, 10, 11]]

EXAMPLE2_E_LIST = ["1", "z1", "z1^2", "z2", "z2^2", "z1*z2", "z2^3", "z1^3", "z1^2*z2", "z1*z2^2"]


def _q(x) -> str:
    return format_rational(parse_rational(x))


def example1(a="1") -> dict:
    """Planar front u = -(a z^2 + z^4) at its focal point (0, -1/2a, 1/2a)."""
    a = parse_rational(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    cfg = {
        "name": f"example1 a={_q(a)}",
        "variables": ["z"],
        "F": f"({_q(a)})*z^2 + z^4",
        "focal": ["0", _q(-1 / (2 * a)), _q(1 / (2 * a))],
        "e_list": [f"z^{k}" if k > 1 else ("z" if k == 1 else "1") for k in range(8)],
        "nu": 8,
        "sample_points": [["0"] * 7, ["1", "-2", "3", "1/2", "0", "5", "-1"],
                          ["1/3", "0", "0", "-7", "2", "0", "1"]],
    }
    if a == 1:
        cfg["minor_selections"] = EXAMPLE1_SELECTIONS
        cfg["stratum"] = example1_stratum()
    return cfg


def example1_stratum() -> dict:
    """A_k (k >= 4) strata near the A_5 point, as (z + w1)^5 (q1 + q2 z + q3 z^2 + 9 z^3)."""
    return {
        "parameters": ["w1", "q1", "q2", "q3"],
        "product": "(z + w1)^5*(q1 + q2*z + q3*z^2 + 9*z^3)",
        "point": ["0", "0", "2", "0"],
    }


def example2(k1="1", k2="2") -> dict:
    """Front u = (k1 z1^2 + k2 z2^2)/2 in space at the focal point (0, 0, 1/k1, 1/k1)."""
    k1, k2 = parse_rational(k1), parse_rational(k2)
    if not 0 < k1 < k2:
        raise ValueError("need 0 < k1 < k2")
    K1, K2 = _q(k1), _q(k2)
    return {
        "name": f"example2 k1={K1} k2={K2}",
        "variables": ["z1", "z2"],
        "F": f"-(({K1})*z1^2 + ({K2})*z2^2)/2",
        "focal": ["0", "0", _q(1 / k1), _q(1 / k1)],
        "e_list": list(EXAMPLE2_E_LIST),
        "nu": 8,
        "u_constraints": [f"({K1})*s7 - ({K2})*s9", f"({K1})*s10 - ({K2})*s8"],
        "sample_points": [["0"] * 9,
                          ["1", "2", "-1", "1/2", "3", _q(k2), "1", K1, _q(k2 / k1)],
                          ["0", "0", "0", "0", "0", _q(-2 * k2), "1/3", _q(-2 * k1), _q(k2 / (3 * k1))]],
    }


def by_name(name: str, **params) -> dict:
    if name == "example1":
        return example1(**params)
    if name == "example2":
        return example2(**params)
    raise KeyError(name)
