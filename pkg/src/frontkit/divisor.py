"""Discriminant matrices, the transversality matrix T and free-divisor verdicts.

All matrices are exact.  Entries live in Q for point evaluation and in Q(h)
when a quantity is restricted to a line ``p + h*d`` to be differentiated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import RatFunc, ratfunc_derivative_at_zero, ugcd, udivmod, umonic
from .groebner import (PositiveDimensionalError, QuotientAlgebra, buchberger,
                       express_in_basis, local_multiplicity, truncated_local_dimensions)
from .linalg import Matrix, det_by_minors, span_intersection
from .parallel import parallel_map
from .poly import Polynomial, Ring
from .wavefront import DeformationFrame, deform


@dataclass
class DeformationFamily:
    """phi(z, s) = base(z) + sum_j s_j e_j(z)."""

    base: Polynomial
    e_list: List[Polynomial]
    mu: int
    nu: int
    u_constraints: List[Polynomial] = field(default_factory=list)

    def __post_init__(self):
        if not self.e_list or self.e_list[0] != self.base.ring.one():
            raise ValueError("e_1 must be the constant 1")
        if not self.mu <= self.nu <= self.m:
            raise ValueError(f"need mu <= nu <= m, got {self.mu}, {self.nu}, {self.m}")

    @classmethod
    def from_frame(cls, frame: DeformationFrame) -> "DeformationFamily":
        return cls(frame.base, list(frame.e_list), frame.mu, frame.nu, list(frame.u_constraints))

    @property
    def m(self) -> int:
        return len(self.e_list)

    @property
    def z_ring(self) -> Ring:
        return self.base.ring

    def phi(self, s: Sequence) -> Polynomial:
        if len(s) != self.m:
            raise ValueError(f"s must have {self.m} coordinates")
        return deform(self.base, self.e_list, s)

    def on_U(self, s_prime: Sequence) -> bool:
        s = (Fraction(0),) + tuple(s_prime)
        return all(not u.evaluate(s) for u in self.u_constraints)

    def symbolic_phi(self) -> Polynomial:
        """phi in the ring (z..., s1..sm)."""
        names = self.z_ring.names + tuple(f"s{j}" for j in range(1, self.m + 1))
        ring = Ring(names)
        out = self.base.to_ring(ring)
        for j, e in enumerate(self.e_list):
            out = out + ring.var(f"s{j + 1}") * e.to_ring(ring)
        return out


@dataclass
class SigmaMatrices:
    C: Matrix                 # multiplication by phi - s1 on the e-basis, mu x mu
    sigma_tilde: Matrix       # s1*I + C
    sigma_full: Matrix        # nu x nu
    evaluation_point: tuple
    quotient: QuotientAlgebra = field(repr=False, default=None)


def _zero_like(x):
    return RatFunc() if isinstance(x, RatFunc) else Fraction(0)


def sigma_matrices(fam: DeformationFamily, s_prime: Sequence, s1=0) -> SigmaMatrices:
    """Sigma-tilde and Sigma at s = (s1, s_prime).

    Row i of C expands (phi - s1) e_i in e_1..e_mu modulo the Jacobian ideal;
    rows mu+1..nu of Sigma express e_i in the same basis with -1 in column i.
    """
    s_prime = tuple(Fraction(v) if isinstance(v, int) else v for v in s_prime)
    if len(s_prime) != fam.m - 1:
        raise ValueError(f"s' must have {fam.m - 1} coordinates")
    zero = _zero_like(s1)
    g = fam.phi((zero,) + s_prime)         # phi - s1
    gb = buchberger([g.derivative(z) for z in fam.z_ring.names], ring=fam.z_ring)
    qa = QuotientAlgebra(gb)
    if not qa.is_finite:
        raise PositiveDimensionalError(qa.witness)
    mu, nu = fam.mu, fam.nu
    if qa.dimension != mu:
        raise PositiveDimensionalError(f"Milnor algebra has dimension {qa.dimension}, expected {mu}")
    basis = fam.e_list[:mu]
    targets = [g * e for e in basis] + list(fam.e_list[mu:nu])
    X = express_in_basis(targets, basis, qa)
    C = Matrix(X.rows[:mu], mu)
    st = Matrix([[C.rows[i][j] + (s1 if i == j else 0) for j in range(mu)] for i in range(mu)], mu)
    full = []
    for i in range(nu):
        if i < mu:
            row = list(st.rows[i]) + [Fraction(0)] * (nu - mu)
        else:
            row = list(X.rows[i]) + [Fraction(0)] * (nu - mu)
            row[i] = Fraction(-1)
        full.append(row)
    return SigmaMatrices(C, st, Matrix(full, nu), (s1,) + s_prime, qa)


def discriminant_poly(fam: DeformationFamily, s_prime: Sequence) -> List[Fraction]:
    """det(s1*I + C(s')) as coefficients in s1, low degree first; monic of degree mu."""
    C = sigma_matrices(fam, s_prime).C
    return C.scale(-1).charpoly()


def discriminant_in_s(fam: DeformationFamily, s_prime: Sequence) -> Polynomial:
    coeffs = discriminant_poly(fam, s_prime)
    r = Ring(["s1"])
    return Polynomial(r, {(k,): c for k, c in enumerate(coeffs)})


# -- the matrix T --------------------------------------------------------------------

@dataclass
class TMatrix:
    entries: Matrix
    point: tuple
    nu: int

    @property
    def sigma_rows(self) -> Matrix:
        return self.entries.submatrix(range(self.nu))

    @property
    def diota_rows(self) -> Matrix:
        return self.entries.submatrix(range(self.nu, self.entries.nrows))

    @property
    def chart(self) -> Matrix:
        """Columns s_1..s_nu, the coordinates on C x U."""
        return self.entries.submatrix(range(self.entries.nrows), range(self.nu))

    def rank(self) -> int:
        """Rank in the chart coordinates; this is what transversality compares with nu."""
        return self.chart.rank()

    def ambient_rank(self) -> int:
        return self.entries.rank()


def build_T(fam: DeformationFamily, frame: DeformationFrame, point: Sequence) -> TMatrix:
    """Sigma(iota(x,t)) padded to m columns, stacked over d(iota) at (x,t).

    ``point`` entries may be Fractions or RatFuncs (a parametrized line).
    """
    point = tuple(Fraction(v) if isinstance(v, int) else v for v in point)
    s = frame.iota_at(point)
    if fam.u_constraints and not all(not u.evaluate(s) for u in fam.u_constraints):
        raise ValueError("iota(x,t) leaves U")
    sig = sigma_matrices(fam, s[1:], s1=s[0])
    m = fam.m
    rows = [list(r) + [Fraction(0)] * (m - fam.nu) for r in sig.sigma_full.rows]
    rows += frame.diota(point).rows
    return TMatrix(Matrix(rows, m), point, fam.nu)


def directional_derivative_T(fam: DeformationFamily, frame: DeformationFrame,
                             base: Sequence, direction: Sequence) -> Matrix:
    """d/dh T(base + h*direction) at h = 0, exactly, via Q(h)."""
    h = RatFunc.h()
    line = [Fraction(b) + h * Fraction(d) if d else RatFunc.const(b)
            for b, d in zip(base, direction)]
    T = build_T(fam, frame, line).entries
    out = []
    for i, r in enumerate(T.rows):
        row = []
        for j, x in enumerate(r):
            try:
                row.append(ratfunc_derivative_at_zero(x))
            except ZeroDivisionError as exc:
                raise ZeroDivisionError(f"T entry ({i + 1},{j + 1}) has a pole at h = 0: {x}") from exc
        out.append(row)
    return Matrix(out, T.ncols)


def coordinate_derivatives(fam, frame, base) -> Dict[str, Matrix]:
    """dT along each coordinate axis of (x, t)-space, keyed by coordinate name."""
    names = frame.phase.front.xt_names
    k = len(names)
    dirs = [[int(i == j) for j in range(k)] for i in range(k)]
    mats = parallel_map(_dir_deriv_job, [(fam, frame, tuple(base), d) for d in dirs])
    return dict(zip(names, mats))


def _dir_deriv_job(args):
    return directional_derivative_T(*args)


# -- pencil and isolation ----------------------------------------------------------------

def pencil_ring(n_space: int) -> Ring:
    return Ring([f"xi{j}" for j in range(1, n_space + 1)] + ["tau"])


def pencil_matrix(T0: Matrix, dT: Dict[str, Matrix]) -> List[List[Polynomial]]:
    """T0 + tau*dT_t + sum_j xi_j*dT_{x_j} with polynomial entries.

    ``dT`` is keyed by x1..x_{n+1}, t.
    """
    space = [k for k in dT if k != "t"]
    ring = pencil_ring(len(space))
    pvars = [ring.var(f"xi{j + 1}") for j in range(len(space))] + [ring.var("tau")]
    mats = [dT[k] for k in space] + [dT["t"]]
    for M in mats:
        if M.shape != T0.shape:
            raise ValueError("derivative matrices must match T0 in shape")
    rows = []
    for i in range(T0.nrows):
        row = []
        for j in range(T0.ncols):
            p = ring.const(T0.rows[i][j])
            for v, M in zip(pvars, mats):
                c = M.rows[i][j]
                if c:
                    p = p + v * c
            row.append(p)
        rows.append(row)
    return rows


def _minor_job(args):
    rows, cols = args
    return det_by_minors([[r[j] for j in cols] for r in rows])


def pencil_minors(T0: Matrix, dT: Dict[str, Matrix], selections: Sequence[Sequence[int]],
                  nu: int = None) -> List[Polynomial]:
    """Minors of the pencil on the given 1-based row selections.

    When the selection has fewer rows than columns, every maximal column choice
    contributes a minor.
    """
    P = pencil_matrix(T0, dT)
    nu = len(selections[0]) if nu is None and selections else nu
    jobs = []
    for sel in selections:
        if len(sel) != nu:
            raise ValueError(f"selection {list(sel)} does not have {nu} rows")
        if min(sel) < 1 or max(sel) > T0.nrows or len(set(sel)) != len(sel):
            raise IndexError(f"selection {list(sel)} out of range 1..{T0.nrows}")
        rows = [P[i - 1] for i in sel]
        for cols in combinations(range(T0.ncols), nu):
            jobs.append((rows, cols))
    ring = P[0][0].ring
    return [d if isinstance(d, Polynomial) else ring.const(d)
            for d in parallel_map(_minor_job, jobs)]


def _exact_udiv(p: Polynomial, var: str, u) -> Polynomial:
    """p / u(var) for a univariate u that divides p."""
    i = p.ring.index(var)
    groups: Dict[tuple, Dict[int, Fraction]] = {}
    for e, c in p.terms.items():
        groups.setdefault(e[:i] + e[i + 1:], {})[e[i]] = c
    out = {}
    for rest, coeffs in groups.items():
        dense = [Fraction(0)] * (max(coeffs) + 1)
        for k, c in coeffs.items():
            dense[k] = c
        q, r = udivmod(tuple(dense), u)
        if r:
            raise ArithmeticError("inexact division")
        for k, c in enumerate(q):
            if c:
                out[rest[:i] + (k,) + rest[i:]] = c
    return Polynomial(p.ring, out, _clean=True)


def strip_units(p: Polynomial) -> Tuple[Polynomial, List[str]]:
    """Remove univariate content factors that do not vanish at the origin.

    Returns the stripped polynomial and the removed factors as text.
    """
    removed = []
    if p.is_zero():
        return p, removed
    changed = True
    while changed:
        changed = False
        for var in p.ring.names:
            i = p.ring.index(var)
            groups: Dict[tuple, Dict[int, Fraction]] = {}
            for e, c in p.terms.items():
                groups.setdefault(e[:i] + e[i + 1:], {})[e[i]] = c
            content = None
            for coeffs in groups.values():
                dense = [Fraction(0)] * (max(coeffs) + 1)
                for k, c in coeffs.items():
                    dense[k] = c
                content = tuple(dense) if content is None else ugcd(content, tuple(dense))
                if len(content) <= 1:
                    break
            if content is None or len(content) <= 1:
                continue
            # split off the power of var; what is left is nonzero at 0
            k = next(j for j, c in enumerate(content) if c)
            unit = umonic(content[k:])
            if len(unit) > 1:
                p = _exact_udiv(p, var, unit)
                removed.append(str(Polynomial(Ring([var]), {(j,): c for j, c in enumerate(unit)})))
                changed = True
    return p, removed


@dataclass
class IsolationResult:
    isolated: bool
    multiplicity: Optional[int]
    method: str
    truncated_dims: List[int] = field(default_factory=list)
    witness: str = ""
    stripped: List[Polynomial] = field(default_factory=list, repr=False)
    removed_units: List[List[str]] = field(default_factory=list)


def isolated_nontransversality_check(minors: Sequence[Polynomial], max_power: int = 30,
                                     allow_global: bool = True) -> IsolationResult:
    """Is the origin an isolated common zero of the minors, and with what multiplicity?

    The local algebra is measured by dim Q[v]/(I + m^k); two equal consecutive
    values prove m^k lies in I locally.  When that does not happen within
    ``max_power`` a global Groebner basis decides.
    """
    minors = [m for m in minors if not m.is_zero()]
    if not minors:
        return IsolationResult(False, None, "none", witness="all minors vanish identically")
    for m in minors:
        if m.constant_coeff():
            return IsolationResult(False, 0, "none",
                                   witness=f"a minor does not vanish at the origin: {m}")
    stripped, removed = [], []
    for m in minors:
        s, r = strip_units(m)
        stripped.append(s)
        removed.append(r)
    mult, dims = truncated_local_dimensions(stripped, max_power=max_power)
    if mult is not None:
        return IsolationResult(True, mult, "local-truncation", dims, "", stripped, removed)
    if not allow_global:
        return IsolationResult(False, None, "local-truncation", dims,
                               f"local dimensions still growing at power {max_power}",
                               stripped, removed)
    gb = buchberger(stripped)
    qa = QuotientAlgebra(gb)
    if not qa.is_finite:
        return IsolationResult(False, None, "global", dims, qa.witness, stripped, removed)
    return IsolationResult(True, local_multiplicity(stripped), "global", dims, "", stripped, removed)


def search_selections(T0: Matrix, dT: Dict[str, Matrix], nu: int, limit: int = 12):
    """Row selections (1-based) whose pencil minors are not identically zero."""
    P = pencil_matrix(T0, dT)
    found, minors = [], []
    for sel in combinations(range(1, T0.nrows + 1), nu):
        rows = [P[i - 1] for i in sel]
        ms = [det_by_minors([[r[j] for j in cols] for r in rows])
              for cols in combinations(range(T0.ncols), nu)]
        ms = [m for m in ms if isinstance(m, Polynomial) and not m.is_zero()]
        if ms:
            found.append(list(sel))
            minors.extend(ms)
            if len(found) >= limit:
                break
    return found, minors


# -- stratum check -------------------------------------------------------------------------

@dataclass
class StratumCheck:
    transverse_only_at_point: bool
    tangent_vectors: List[list]
    tangent_dim: int
    intersection: List[list]


def stratum_tangent_check(stratum_param: Sequence[Polynomial], param_point: Sequence,
                          iota_jacobian: Matrix) -> StratumCheck:
    """Does the stratum's tangent space meet the span of d(iota) only in 0?

    ``iota_jacobian`` rows are the derivative vectors of iota.
    """
    ring = stratum_param[0].ring
    pt = [Fraction(v) for v in param_point]
    tangents = [[p.derivative(v).evaluate(pt) for p in stratum_param] for v in ring.names]
    rank = Matrix(tangents, len(stratum_param)).rank() if tangents else 0
    inter = span_intersection(tangents, [list(r) for r in iota_jacobian.rows])
    return StratumCheck(not inter, tangents, rank, inter)


# -- verdict -------------------------------------------------------------------------------

FREE = "free"
ALMOST_FREE = "almost_free_candidate"
UNDETERMINED = "undetermined"


@dataclass
class TransversalityReport:
    rank_sigma: int
    rank_T: int
    nu: int
    verdict: str
    T: TMatrix = field(repr=False, default=None)
    derivatives: Dict[str, Matrix] = field(repr=False, default_factory=dict)
    selections: List[List[int]] = field(default_factory=list)
    minors: List[Polynomial] = field(repr=False, default_factory=list)
    isolation: Optional[IsolationResult] = None
    rank_diota: int = 0
    rank_T_ambient: int = 0


def _chart(M: Matrix, nu: int) -> Matrix:
    return M.submatrix(range(M.nrows), range(nu))


def transversality_verdict(fam: DeformationFamily, frame: DeformationFrame, point: Sequence,
                           selections: Sequence[Sequence[int]] = None,
                           max_power: int = 30) -> TransversalityReport:
    """Free when rank T >= nu; otherwise test the pencil for an isolated rank drop."""
    nu = fam.nu
    T = build_T(fam, frame, point)
    rank_T = T.rank()
    ranks = dict(rank_sigma=_chart(T.sigma_rows, nu).rank(),
                 rank_diota=_chart(T.diota_rows, nu).rank(),
                 rank_T_ambient=T.ambient_rank())
    if rank_T >= nu:
        return TransversalityReport(rank_T=rank_T, nu=nu, verdict=FREE, T=T, **ranks)
    dT = coordinate_derivatives(fam, frame, point)
    T0 = T.chart
    dT_chart = {k: _chart(M, nu) for k, M in dT.items()}
    if selections:
        selections = [list(s) for s in selections]
        minors = pencil_minors(T0, dT_chart, selections, nu)
    else:
        selections, minors = search_selections(T0, dT_chart, nu)
    iso = isolated_nontransversality_check(minors, max_power=max_power)
    verdict = ALMOST_FREE if iso.isolated else UNDETERMINED
    return TransversalityReport(rank_T=rank_T, nu=nu, verdict=verdict, T=T, derivatives=dT,
                                selections=selections, minors=minors, isolation=iso, **ranks)
