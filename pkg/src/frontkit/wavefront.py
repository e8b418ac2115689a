"""Phase function of an evolving front and its deformation data.

Space-time coordinates are named ``x1..x{n+1}, t``; the initial front is
``u = -F(z)`` for a polynomial ``F`` in ``n`` variables.  At a focal point
the phase function splits as ``Psi(x,t,z) = Psi(x0,t0,z) + sum s_j(x,t) e_j(z)``,
which defines the map ``iota = (s_1, ..., s_m)`` into deformation space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .groebner import (NotABasisError, PositiveDimensionalError, QuotientAlgebra,
                       buchberger, express_in_basis, local_multiplicity)
from .linalg import Matrix
from .poly import DEGREVLEX, Polynomial, Ring, RingMismatchError


class BasisInsufficientError(ValueError):
    def __init__(self, uncovered):
        self.uncovered = uncovered
        super().__init__("e_list insufficient; uncovered monomials: " + ", ".join(uncovered))


class AmbiguousDecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class InitialFront:
    zvars: Tuple[str, ...]
    F: Polynomial

    def __post_init__(self):
        if self.F.ring != Ring(self.zvars):
            raise RingMismatchError(f"F must live in Q[{', '.join(self.zvars)}]")
        clash = {"t"} | {f"x{i}" for i in range(1, len(self.zvars) + 2)}
        if clash & set(self.zvars):
            raise ValueError(f"z-variable names may not reuse {sorted(clash & set(self.zvars))}")

    @classmethod
    def parse(cls, text: str, zvars: Sequence[str]) -> "InitialFront":
        zvars = tuple(zvars)
        return cls(zvars, Ring(zvars).parse(text))

    @property
    def n(self) -> int:
        return len(self.zvars)

    @property
    def xt_names(self) -> Tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, self.n + 2)) + ("t",)


@dataclass(frozen=True)
class PhaseFunction:
    front: InitialFront
    psi: Polynomial

    @property
    def n(self) -> int:
        return self.front.n

    @property
    def xt_ring(self) -> Ring:
        return Ring(self.front.xt_names)

    @property
    def z_ring(self) -> Ring:
        return Ring(self.front.zvars)


def build_phase(front: InitialFront) -> PhaseFunction:
    """(<x'-z, dF> + x_{n+1} + F)^2 - t^2 (|dF|^2 + 1), expanded exactly."""
    n = front.n
    ring = Ring(front.xt_names + front.zvars)
    F = front.F.to_ring(ring)
    grads = [F.derivative(z) for z in front.zvars]
    inner = ring.var(f"x{n + 1}") + F
    for j, z in enumerate(front.zvars):
        inner = inner + (ring.var(f"x{j + 1}") - ring.var(z)) * grads[j]
    norm2 = ring.one()
    for g in grads:
        norm2 = norm2 + g * g
    t = ring.var("t")
    return PhaseFunction(front, inner * inner - t * t * norm2)


def phase_at(phase: PhaseFunction, point: Sequence) -> Polynomial:
    """Psi(x0, t0, z) as a polynomial in z; point entries may be Fractions or RatFuncs."""
    names = phase.front.xt_names
    if len(point) != len(names):
        raise ValueError(f"point must have {len(names)} coordinates (x1..x{phase.n + 1}, t)")
    vals = {name: (Fraction(v) if isinstance(v, int) else v) for name, v in zip(names, point)}
    return phase.psi.substitute(vals).to_ring(phase.z_ring)


def deform(base: Polynomial, e_list: Sequence[Polynomial], s: Sequence) -> Polynomial:
    """base + sum s_j e_j for field values s_j."""
    out = base
    for sj, ej in zip(s, e_list):
        if sj:
            out = out + ej * sj
    return out


def jacobian_quotient(f: Polynomial) -> QuotientAlgebra:
    return QuotientAlgebra(buchberger([f.derivative(z) for z in f.ring.names], ring=f.ring))


@dataclass
class DeformationFrame:
    phase: PhaseFunction
    focal: Tuple[Fraction, ...]
    base: Polynomial
    mu: int
    e_list: List[Polynomial]
    iota: List[Polynomial]
    nu: int
    u_constraints: List[Polynomial] = field(default_factory=list)
    singular_point: Tuple[Fraction, ...] = ()

    @property
    def m(self) -> int:
        return len(self.e_list)

    def linear_indices(self) -> List[int]:
        """Positions of e = z_j - c_j (c the singular point) in e_list."""
        zr = self.phase.z_ring
        out = []
        for j, z in enumerate(self.phase.front.zvars):
            target = zr.var(z) - self.singular_point[j]
            try:
                out.append(self.e_list.index(target))
            except ValueError:
                raise ValueError(f"e_list lacks {target}") from None
        return out

    @property
    def s_ring(self) -> Ring:
        return Ring(f"s{j}" for j in range(1, self.m + 1))

    def iota_at(self, point: Sequence) -> list:
        return [s.evaluate(point) for s in self.iota]

    def diota(self, point: Sequence) -> Matrix:
        """Rows d(iota)/dx_1, ..., d(iota)/dx_{n+1}, d(iota)/dt at point."""
        names = self.phase.front.xt_names
        return Matrix([[s.derivative(v).evaluate(point) for s in self.iota] for v in names],
                      self.m)

    def reconstruct(self) -> Polynomial:
        """Psi(x0,t0,z) + sum s_j(x,t) e_j(z) in the full ring."""
        ring = self.phase.psi.ring
        out = self.base.to_ring(ring)
        for s, e in zip(self.iota, self.e_list):
            out = out + s.to_ring(ring) * e.to_ring(ring)
        return out


def decompose(diff: Polynomial, zvars: Sequence[str], e_list: Sequence[Polynomial]) -> List[Polynomial]:
    """Coefficients c_j (in the non-z variables) with diff = sum c_j e_j(z).

    Raises when e_list is dependent or does not cover the z-support of diff.
    """
    parts = diff.coefficients_in(zvars)          # z-monomial -> poly in the rest
    zring = Ring(zvars)
    coeff_ring = Ring(v for v in diff.ring.names if v not in zvars)
    monos = sorted(set(parts) | {e for p in e_list for e in p.terms}, key=DEGREVLEX.key)
    idx = {e: i for i, e in enumerate(monos)}
    m = len(e_list)
    E = Matrix.zeros(len(monos), m)
    for j, p in enumerate(e_list):
        if p.ring != zring:
            raise RingMismatchError(f"e_{j + 1} must live in {zring}")
        for e, c in p.terms.items():
            E.rows[idx[e]][j] = c
    rowsel = E.transpose().rref()[1]
    if len(rowsel) < m:
        raise AmbiguousDecompositionError("e_list is linearly dependent; decomposition not unique")
    inv = E.submatrix(rowsel, range(m)).inverse()
    rhs = [parts.get(monos[r], coeff_ring.zero()) for r in rowsel]
    coeffs = []
    for j in range(m):
        c = coeff_ring.zero()
        for k in range(m):
            if inv.rows[j][k] and rhs[k]:
                c = c + rhs[k] * inv.rows[j][k]
        coeffs.append(c)
    uncovered = []
    for e in monos:
        r = parts.get(e, coeff_ring.zero())
        for j in range(m):
            c = E.rows[idx[e]][j]
            if c:
                r = r - coeffs[j] * c
        if r:
            uncovered.append(str(zring.monomial(e)))
    if uncovered:
        raise BasisInsufficientError(uncovered)
    return coeffs


def solve_iota(phase: PhaseFunction, focal: Sequence, e_list: Sequence[Polynomial]) -> List[Polynomial]:
    """The unique s_j(x,t) with Psi - Psi(x0,t0,.) = sum s_j e_j."""
    base = phase_at(phase, focal)
    diff = phase.psi - base.to_ring(phase.psi.ring)
    return [c.to_ring(phase.xt_ring) for c in decompose(diff, phase.front.zvars, e_list)]


def default_e_list(phase: PhaseFunction, focal: Sequence,
                   singular_point: Sequence = None) -> Tuple[List[Polynomial], int]:
    """Milnor basis containing 1 and z_j - c_j, followed by the other support monomials."""
    zr = phase.z_ring
    n = phase.n
    c = [Fraction(0)] * n if singular_point is None else [Fraction(v) for v in singular_point]
    base = phase_at(phase, focal)
    qa = jacobian_quotient(base)
    if not qa.is_finite:
        raise PositiveDimensionalError(qa.witness)
    mu = qa.dimension
    diff = phase.psi - base.to_ring(phase.psi.ring)
    support = sorted(diff.coefficients_in(phase.front.zvars), key=DEGREVLEX.key)
    mandated = [zr.one()] + [zr.var(z) - c[j] for j, z in enumerate(phase.front.zvars)]
    mandated_monos = {(0,) * n} | {tuple(int(i == j) for i in range(n)) for j in range(n)}
    rest = [zr.monomial(e) for e in support if e not in mandated_monos]
    chosen: List[Polynomial] = []
    vecs: List[list] = []
    for cand in mandated + rest:
        if len(chosen) == mu:
            break
        v = qa.coords(cand)
        if Matrix(vecs + [v], mu).rank() == len(vecs) + 1:
            chosen.append(cand)
            vecs.append(v)
        elif cand in mandated:
            raise NotABasisError(f"mandated element {cand} is dependent in the Milnor algebra")
    if len(chosen) < mu:
        raise NotABasisError(f"support monomials span only {len(chosen)} of {mu} dimensions")
    extra = [p for p in rest if p not in chosen]
    return chosen + extra, mu


def extract_iota(phase: PhaseFunction, focal: Sequence, e_list: Sequence[Polynomial] = None,
                 nu: int = None, u_constraints: Sequence[Polynomial] = (),
                 singular_point: Sequence = None) -> DeformationFrame:
    """Deformation frame at a focal point; e_list defaults to :func:`default_e_list`.

    The decomposition is re-expanded and compared with psi before returning.
    """
    focal = tuple(Fraction(v) for v in focal)
    base = phase_at(phase, focal)
    qa = jacobian_quotient(base)
    if not qa.is_finite:
        raise PositiveDimensionalError(qa.witness)
    mu = qa.dimension
    if e_list is None:
        e_list, _ = default_e_list(phase, focal, singular_point)
    e_list = list(e_list)
    iota = solve_iota(phase, focal, e_list)
    sp = tuple(Fraction(0) for _ in range(phase.n)) if singular_point is None \
        else tuple(Fraction(v) for v in singular_point)
    frame = DeformationFrame(phase, focal, base, mu, e_list, iota,
                             len(e_list) if nu is None else nu, list(u_constraints), sp)
    if e_list[0] != phase.z_ring.one():
        raise ValueError("e_1 must be 1")
    if max(frame.linear_indices()) >= mu:
        raise ValueError("the linear elements z_j - c_j must lie among e_1..e_mu")
    if not mu <= frame.nu <= len(e_list):
        raise ValueError(f"need mu <= nu <= m, got nu = {frame.nu}")
    if frame.reconstruct() != phase.psi:
        raise BasisInsufficientError(["<re-expansion mismatch>"])
    return frame


def make_frame(front: InitialFront, focal: Sequence, **kwargs) -> DeformationFrame:
    return extract_iota(build_phase(front), focal, **kwargs)


# -- assumption checks --------------------------------------------------------------

@dataclass
class SampleCheck:
    s_prime: Tuple[Fraction, ...]
    on_U: bool
    dim_full: Optional[int]
    dim_truncated: Optional[int]
    basis_ok: bool
    witness: str = ""

    def passed(self, mu: int) -> bool:
        return self.on_U and self.dim_full == mu and self.dim_truncated == mu and self.basis_ok


@dataclass
class AssumptionReport:
    mu: int
    samples: List[SampleCheck]

    @property
    def all_passed(self) -> bool:
        return all(s.passed(self.mu) for s in self.samples)


def verify_assumptions(frame: DeformationFrame, phase: Optional[PhaseFunction],
                       samples: Sequence[Sequence]) -> AssumptionReport:
    """Finite Milnor algebra, rank mu, and e_1..e_mu a basis, at each sample s'.

    The truncated check only turns on the coefficients of the linear
    elements.  Sampling cannot certify genericity, it only reports what it saw.
    """
    if phase is not None and phase.psi != frame.phase.psi:
        raise ValueError("phase does not match the frame")
    checks = []
    for sp in samples:
        sp = tuple(Fraction(v) for v in sp)
        if len(sp) != frame.m - 1:
            raise ValueError(f"sample s' must have {frame.m - 1} coordinates")
        s = (Fraction(0),) + sp
        on_u = all(not u.evaluate(s) for u in frame.u_constraints)
        phi = deform(frame.base, frame.e_list, s)
        qa = jacobian_quotient(phi)
        lin = frame.linear_indices()
        trunc = deform(frame.base, [frame.e_list[i] for i in lin], [s[i] for i in lin])
        qt = jacobian_quotient(trunc)
        basis_ok, witness = False, ""
        if qa.is_finite:
            try:
                express_in_basis([], frame.e_list[:frame.mu], qa)
                basis_ok = True
            except NotABasisError as exc:
                witness = str(exc)
        else:
            witness = qa.witness
        checks.append(SampleCheck(sp, on_u, qa.dimension, qt.dimension, basis_ok, witness))
    return AssumptionReport(frame.mu, checks)


def milnor_dimension(base: Polynomial, e_list: Sequence[Polynomial], s: Sequence) -> Optional[int]:
    """dim Q[z]/(d_z(base + sum s_j e_j)), None when infinite."""
    return jacobian_quotient(deform(base, e_list, s)).dimension


def local_milnor_number(f: Polynomial, point: Sequence = None) -> int:
    return local_multiplicity([f.derivative(z) for z in f.ring.names], point)


# -- real fronts ------------------------------------------------------------------------

class FrontPoint(NamedTuple):
    branch: int          # +1 or -1
    z: Tuple[float, ...]
    x: Tuple[float, ...]


def sample_front(front: InitialFront, t: float, z_grid: Sequence) -> List[FrontPoint]:
    """Points reached at time t by rays leaving (z, -F(z)) along both unit normals."""
    grads = [front.F.derivative(z) for z in front.zvars]
    t = float(t)
    out = []
    for z in z_grid:
        z = (float(z),) if not isinstance(z, (tuple, list)) else tuple(float(v) for v in z)
        g = [float(d.evaluate(z)) for d in grads]
        u = -float(front.F.evaluate(z))
        norm = math.sqrt(sum(v * v for v in g) + 1.0)
        for sign in (1, -1):
            x = tuple(sign * t * gj / norm + zj for gj, zj in zip(g, z)) + (sign * t / norm + u,)
            out.append(FrontPoint(sign, z, x))
    return out


def phase_value(phase: PhaseFunction, x: Sequence[float], t: float, z: Sequence[float]) -> float:
    return float(phase.psi.evaluate(tuple(x) + (t,) + tuple(z)))
