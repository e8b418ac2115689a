"""Buchberger's algorithm, normal forms and zero-dimensional quotient algebras.

Over Q the reducer works on primitive integer coefficient vectors (content is
removed after every reduction), which keeps coefficient growth in check.
Over Q(h) it uses plain field arithmetic with exact zero tests.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import Matrix
from .poly import DEGREVLEX, Exp, MonomialOrder, Polynomial, Ring, RingMismatchError


class NotABasisError(ValueError):
    """The proposed residues are linearly dependent in the quotient."""

    def __init__(self, relation, names=None):
        self.relation = relation
        super().__init__(f"residue classes are linearly dependent: relation {relation}")


class PositiveDimensionalError(ValueError):
    """The quotient algebra is infinite dimensional."""

    def __init__(self, witness: str):
        self.witness = witness
        super().__init__(f"ideal is not zero-dimensional ({witness})")


# -- monomial helpers ------------------------------------------------------------

def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


def _coprime(a: Exp, b: Exp) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def _all_rational(terms) -> bool:
    return all(isinstance(c, (int, Fraction)) for c in terms.values())


def _int_content(terms: Dict[Exp, Fraction]) -> Tuple[Dict[Exp, int], Fraction]:
    """Primitive integer vector p and scalar s with terms = s * p."""
    den = 1
    for c in terms.values():
        d = c.denominator if isinstance(c, Fraction) else 1
        den = den * d // gcd(den, d)
    ints = {e: int(c * den) for e, c in terms.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {e: v // g for e, v in ints.items()}
    return ints, Fraction(g or 1, den)


class _Elt:
    """Basis element prepared for reduction."""

    __slots__ = ("lm", "lc", "terms")

    def __init__(self, terms, order: MonomialOrder):
        self.lm = max(terms, key=order.key)
        self.lc = terms[self.lm]
        self.terms = terms


def _make_elt(terms, order, integral) -> _Elt:
    if integral:
        ints, _ = _int_content(terms)
        lm = max(ints, key=order.key)
        if ints[lm] < 0:
            ints = {e: -v for e, v in ints.items()}
        return _Elt(ints, order)
    lm = max(terms, key=order.key)
    lc = terms[lm]
    if lc != 1:
        inv = 1 / lc
        terms = {e: c * inv for e, c in terms.items()}
    return _Elt(terms, order)


def _find_divisor(e: Exp, basis: Sequence[_Elt]) -> Optional[_Elt]:
    for g in basis:
        if _divides(g.lm, e):
            return g
    return None


def _reduce_int(f: Dict[Exp, int], basis: Sequence[_Elt], order: MonomialOrder,
                full: bool = True) -> Tuple[Dict[Exp, int], Fraction]:
    """Return (r, lam) with lam*f - r in the ideal, r reduced; integer coefficients."""
    key = order.key
    p = dict(f)
    heap = [(tuple(-k for k in key(e)), e) for e in p]
    heapq.heapify(heap)
    rem: Dict[Exp, int] = {}
    lam = Fraction(1)
    while heap:
        _, e = heapq.heappop(heap)
        c = p.get(e)
        if c is None:
            continue
        g = _find_divisor(e, basis)
        if g is None:
            rem[e] = c
            del p[e]
            if not full:
                rem.update(p)
                break
            continue
        a = g.lc
        d = gcd(a, c)
        mult, fac = a // d, c // d
        if mult < 0:
            mult, fac = -mult, -fac
        if mult != 1:
            for k in p:
                p[k] *= mult
            for k in rem:
                rem[k] *= mult
            lam *= mult
        shift = _sub(e, g.lm)
        for ge, gc in g.terms.items():
            ne = tuple(x + y for x, y in zip(ge, shift))
            v = p.get(ne)
            if v is None:
                p[ne] = -fac * gc
                heapq.heappush(heap, (tuple(-k for k in key(ne)), ne))
            else:
                v -= fac * gc
                if v:
                    p[ne] = v
                else:
                    del p[ne]
    cont = 0
    for v in rem.values():
        cont = gcd(cont, v)
    if cont > 1:
        rem = {k: v // cont for k, v in rem.items()}
        lam /= cont
    return rem, lam


def _reduce_field(f: Dict, basis: Sequence[_Elt], order: MonomialOrder, full: bool = True) -> Dict:
    """Remainder of f on division by monic basis elements (any field)."""
    key = order.key
    p = dict(f)
    heap = [(tuple(-k for k in key(e)), e) for e in p]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = p.get(e)
        if c is None:
            continue
        g = _find_divisor(e, basis)
        if g is None:
            rem[e] = c
            del p[e]
            if not full:
                rem.update(p)
                break
            continue
        shift = _sub(e, g.lm)
        for ge, gc in g.terms.items():
            ne = tuple(x + y for x, y in zip(ge, shift))
            v = p.get(ne)
            if v is None:
                p[ne] = -(c * gc)
                heapq.heappush(heap, (tuple(-k for k in key(ne)), ne))
            else:
                v = v - c * gc
                if v:
                    p[ne] = v
                else:
                    del p[ne]
    return rem


# -- Groebner bases ------------------------------------------------------------------

class GroebnerBasis:
    """Reduced Groebner basis: monic generators sorted by increasing leading monomial."""

    def __init__(self, ring: Ring, order: MonomialOrder, generators: List[Polynomial]):
        self.ring = ring
        self.order = order
        self.generators = generators
        self.leading_monomials = [g.leading_monomial(order) for g in generators]
        self.integral = all(_all_rational(g.terms) for g in generators)
        self._elts = [_make_elt(g.terms, order, self.integral) for g in generators]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        return f"GroebnerBasis({self.order.name}, [{', '.join(map(str, self.generators))}])"

    def is_unit_ideal(self) -> bool:
        return any(not any(lm) for lm in self.leading_monomials)

    def reduce(self, p: Polynomial) -> Polynomial:
        return normal_form(p, self)

    def contains(self, p: Polynomial) -> bool:
        return normal_form(p, self).is_zero()

    def is_zero_dimensional(self) -> bool:
        return not self._missing_pure_powers()

    def _missing_pure_powers(self) -> List[int]:
        missing = []
        for i in range(self.ring.nvars):
            if not any(lm[i] and sum(lm) == lm[i] for lm in self.leading_monomials) \
                    and not self.is_unit_ideal():
                missing.append(i)
        return missing


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Unique remainder of p modulo the ideal of gb (field-linear, idempotent)."""
    if p.ring != gb.ring:
        raise RingMismatchError(f"{p.ring} vs {gb.ring}")
    if not p.terms or not gb.generators:
        return p
    if gb.integral and _all_rational(p.terms):
        ints, scale = _int_content(p.terms)
        rem, lam = _reduce_int(ints, gb._elts, gb.order)
        factor = scale / lam
        return Polynomial(p.ring, {e: factor * v for e, v in rem.items()}, _clean=True)
    elts = gb._elts if not gb.integral else [_make_elt(g.terms, gb.order, False) for g in gb.generators]
    return Polynomial(p.ring, _reduce_field(p.terms, elts, gb.order), _clean=True)


def _spoly_terms(f: _Elt, g: _Elt, integral: bool):
    L = _lcm(f.lm, g.lm)
    sf, sg = _sub(L, f.lm), _sub(L, g.lm)
    if integral:
        d = gcd(f.lc, g.lc)
        cf, cg = g.lc // d, f.lc // d
    else:
        cf, cg = 1, 1
    out = {}
    for e, c in f.terms.items():
        ne = tuple(x + y for x, y in zip(e, sf))
        out[ne] = c * cf
    for e, c in g.terms.items():
        ne = tuple(x + y for x, y in zip(e, sg))
        v = out.get(ne)
        v = -(c * cg) if v is None else v - c * cg
        if v:
            out[ne] = v
        else:
            out.pop(ne, None)
    return out


def buchberger(gens: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX,
               ring: Ring = None) -> GroebnerBasis:
    """Reduced Groebner basis with Gebauer-Moeller pair pruning and normal selection."""
    gens = list(gens)
    if ring is None:
        if not gens:
            raise ValueError("buchberger needs a ring when given no generators")
        ring = gens[0].ring
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return GroebnerBasis(ring, order, [])
    for g in gens:
        if g.ring != ring:
            raise RingMismatchError(f"{g.ring} vs {ring}")
    integral = all(_all_rational(g.terms) for g in gens)
    key = order.key

    polys: List[_Elt] = []
    active: List[int] = []
    pairs: List[Tuple[int, int]] = []

    def reduce_terms(terms):
        act = [polys[i] for i in active]
        if integral:
            r, _ = _reduce_int(terms, act, order)
            return r
        return _reduce_field(terms, act, order)

    def update(h: int):
        nonlocal active, pairs
        lh = polys[h].lm
        C = [(h, g) for g in active]
        D = []
        while C:
            h_, g1 = C.pop()
            l1 = _lcm(lh, polys[g1].lm)
            if _coprime(lh, polys[g1].lm) or not any(
                    _divides(_lcm(lh, polys[g2].lm), l1) for _, g2 in C + D):
                D.append((h_, g1))
        E = [(h_, g) for h_, g in D if not _coprime(lh, polys[g].lm)]
        kept = []
        for g1, g2 in pairs:
            l12 = _lcm(polys[g1].lm, polys[g2].lm)
            if _divides(lh, l12) and _lcm(polys[g1].lm, lh) != l12 and _lcm(lh, polys[g2].lm) != l12:
                continue
            kept.append((g1, g2))
        pairs = kept + E
        active = [g for g in active if not _divides(lh, polys[g].lm)] + [h]

    def add(terms):
        elt = _make_elt(terms, order, integral)
        polys.append(elt)
        update(len(polys) - 1)

    # feed inputs in increasing leading-monomial order, reducing against what is there
    inputs = sorted((dict(g.terms) for g in gens), key=lambda t: key(max(t, key=key)))
    for t in inputs:
        if integral:
            t, _ = _int_content(t)
        r = reduce_terms(t) if active else t
        if r:
            add(r)

    while pairs:
        best = min(range(len(pairs)), key=lambda i: (
            key(_lcm(polys[pairs[i][0]].lm, polys[pairs[i][1]].lm)), pairs[i]))
        i, j = pairs.pop(best)
        s = _spoly_terms(polys[i], polys[j], integral)
        if not s:
            continue
        r = reduce_terms(s)
        if r:
            if not any(max(r, key=key)):
                polys.append(_make_elt(r, order, integral))
                active = [len(polys) - 1]
                pairs = []
                break
            add(r)

    # interreduce the (already minimal) active set
    basis = [polys[i] for i in active]
    basis.sort(key=lambda e: key(e.lm))
    reduced = []
    for k, elt in enumerate(basis):
        others = basis[:k] + basis[k + 1:]
        head = {elt.lm: elt.terms[elt.lm]}
        tail = {e: c for e, c in elt.terms.items() if e != elt.lm}
        if integral:
            r, lam = _reduce_int(tail, others, order) if tail else ({}, Fraction(1))
            # elt = lc*lm + tail ; monic form = lm + tail/lc ; tail ≡ r/lam
            lc = Fraction(elt.lc)
            out = {elt.lm: Fraction(1)}
            for e, v in r.items():
                out[e] = Fraction(v) / (lam * lc)
        else:
            r = _reduce_field(tail, others, order) if tail else {}
            inv = 1 / elt.lc
            out = {elt.lm: head[elt.lm] * inv}
            for e, v in r.items():
                out[e] = v * inv
        reduced.append(Polynomial(ring, out))
    return GroebnerBasis(ring, order, reduced)


# -- quotient algebras ---------------------------------------------------------------

class QuotientAlgebra:
    """Standard-monomial basis of R/I and multiplication matrices.

    ``mult_matrices[v]`` acts on coordinate columns: column j holds the
    coordinates of ``v * basis[j]``.
    """

    def __init__(self, gb: GroebnerBasis):
        self.gb = gb
        self.ring = gb.ring
        missing = gb._missing_pure_powers()
        self.basis: Optional[List[Exp]]
        if gb.is_unit_ideal():
            self.basis = []
            self.witness = None
        elif missing:
            self.basis = None
            i = missing[0]
            self.witness = f"no leading monomial is a power of {self.ring.names[i]}, " \
                           f"so every {self.ring.names[i]}^k is standard"
        else:
            self.basis = _standard_monomials(gb)
            self.witness = None
        self._index = {e: i for i, e in enumerate(self.basis or [])}
        self._mult = None

    @property
    def dimension(self) -> Optional[int]:
        """Vector-space dimension, or None when infinite."""
        return None if self.basis is None else len(self.basis)

    @property
    def is_finite(self) -> bool:
        return self.basis is not None

    def basis_polys(self) -> List[Polynomial]:
        return [self.ring.monomial(e) for e in self.basis]

    def coords(self, p: Polynomial) -> list:
        if self.basis is None:
            raise PositiveDimensionalError(self.witness)
        nf = normal_form(p, self.gb)
        v = [Fraction(0)] * len(self.basis)
        for e, c in nf.terms.items():
            v[self._index[e]] = c
        return v

    @property
    def mult_matrices(self) -> Dict[str, Matrix]:
        if self.basis is None:
            raise PositiveDimensionalError(self.witness)
        if self._mult is None:
            self._mult = {name: self.mult_matrix(self.ring.var(name)) for name in self.ring.names}
        return self._mult

    def mult_matrix(self, f: Polynomial) -> Matrix:
        """Matrix of multiplication by f on the standard-monomial basis."""
        D = len(self.basis)
        cols = []
        for e in self.basis:
            prod = f.mul_term(e, 1)
            if len(prod.terms) == 1:
                (pe, pc), = prod.terms.items()
                j = self._index.get(pe)
                if j is not None:
                    col = [Fraction(0)] * D
                    col[j] = pc
                    cols.append(col)
                    continue
            cols.append(self.coords(prod))
        return Matrix.from_columns(cols, D) if D else Matrix([], 0)


def _standard_monomials(gb: GroebnerBasis) -> List[Exp]:
    n = gb.ring.nvars
    lms = gb.leading_monomials
    seen = set()
    start = (0,) * n
    out = []
    stack = [start]
    while stack:
        e = stack.pop()
        if e in seen:
            continue
        seen.add(e)
        if any(_divides(lm, e) for lm in lms):
            continue
        out.append(e)
        for i in range(n):
            stack.append(e[:i] + (e[i] + 1,) + e[i + 1:])
    out.sort(key=gb.order.key)
    return out


def quotient_algebra(gb: GroebnerBasis) -> QuotientAlgebra:
    return QuotientAlgebra(gb)


def express_in_basis(p_list: Sequence[Polynomial], e_list: Sequence[Polynomial],
                     qa: QuotientAlgebra, gb: GroebnerBasis = None) -> Matrix:
    """Row i holds the coefficients of p_list[i] modulo the ideal in the e_list residues."""
    if qa.basis is None:
        raise PositiveDimensionalError(qa.witness)
    D = len(qa.basis)
    if len(e_list) != D:
        raise NotABasisError(f"{len(e_list)} elements for a {D}-dimensional quotient")
    E = Matrix.from_columns([qa.coords(e) for e in e_list], D)
    if D and E.rank() < D:
        rel = E.kernel()[0]
        terms = " + ".join(f"({c})*e{j + 1}" for j, c in enumerate(rel) if c)
        raise NotABasisError(f"{terms} = 0")
    if not p_list:
        return Matrix([], D)
    P = Matrix.from_columns([qa.coords(p) for p in p_list], D)
    X = E.solve(P) if D else Matrix([[] for _ in p_list], 0)
    return X.transpose() if D else X


# -- multiplicities --------------------------------------------------------------------

def _translate(gens: Sequence[Polynomial], point: Sequence) -> List[Polynomial]:
    ring = gens[0].ring
    if all(not c for c in point):
        return list(gens)
    shift = {name: ring.var(name) + c for name, c in zip(ring.names, point)}
    return [g.substitute(shift) for g in gens]


def _generalized_kernel(R: Matrix) -> List[list]:
    """Basis of ker(R^k) for k large (the generalized 0-eigenspace)."""
    n = R.nrows
    if n == 0:
        return []
    K = R.kernel()
    while K and len(K) < n:
        # {v : R v in span K}
        A = Matrix([r + [-x for x in row] for r, row in
                    zip(R.rows, Matrix.from_columns(K, n).rows)], n + len(K))
        ker = A.kernel()
        newK = Matrix([k[:n] for k in ker], n) if ker else None
        if newK is None:
            break
        Rr, piv = newK.rref()
        basis = [Rr.rows[i] for i in range(len(piv))]
        if len(basis) == len(K):
            break
        K = basis
    return K


def joint_generalized_kernel_dim(mats: Sequence[Matrix]) -> int:
    """dim of the common generalized 0-eigenspace of commuting matrices."""
    if not mats:
        return 0
    D = mats[0].nrows
    W = [[Fraction(int(i == j)) for i in range(D)] for j in range(D)]  # columns
    for M in mats:
        if not W:
            return 0
        r = len(W)
        B = Matrix.from_columns(W, D)
        MB = M * B
        aug = Matrix([b + m for b, m in zip(B.rows, MB.rows)], 2 * r)
        Rr, piv = aug.rref()
        if piv[:r] != list(range(r)):
            raise ValueError("subspace not invariant under a multiplication matrix")
        R = Matrix([row[r:] for row in Rr.rows[:r]], r)
        K = _generalized_kernel(R)
        W = [B.apply(k) for k in K]
    return len(W)


def local_multiplicity(gens: Sequence[Polynomial], point: Sequence = None) -> int:
    """Multiplicity of ``point`` as a solution of a zero-dimensional system."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PositiveDimensionalError("the zero ideal")
    ring = gens[0].ring
    point = [Fraction(0)] * ring.nvars if point is None else [Fraction(c) for c in point]
    moved = _translate(gens, point)
    gb = buchberger(moved)
    qa = QuotientAlgebra(gb)
    if not qa.is_finite:
        raise PositiveDimensionalError(qa.witness)
    if qa.dimension == 0:
        return 0
    return joint_generalized_kernel_dim([qa.mult_matrices[n] for n in ring.names])


def truncated_local_dimensions(gens: Sequence[Polynomial], max_power: int = 40,
                               point: Sequence = None):
    """dim Q[x]/(I + m^k) for k = 1, 2, ... until two consecutive values agree.

    Equal consecutive values mean m^k lies in I locally (Nakayama), so the
    final value is the local multiplicity at ``point``.  Returns
    (multiplicity or None, list of dimensions computed).
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise PositiveDimensionalError("the zero ideal")
    ring = gens[0].ring
    point = [Fraction(0)] * ring.nvars if point is None else [Fraction(c) for c in point]
    moved = _translate(gens, point)
    dims = []
    for k in range(1, max_power + 1):
        dims.append(_truncated_dimension(moved, k))
        if len(dims) >= 2 and dims[-1] == dims[-2]:
            return dims[-1], dims
    return None, dims


def _truncated_dimension(gens: Sequence[Polynomial], k: int) -> int:
    """dim Q[x]/(I + m^k), by linear algebra in Q[x]/m^k.

    The image of I there is spanned by x^a g with |a| < k.
    """
    n = gens[0].ring.nvars
    monos = [e for d in range(k) for e in _monomials_of_degree(n, d)]
    col = {e: i for i, e in enumerate(monos)}
    rows = []
    for g in gens:
        low = {e: c for e, c in g.terms.items() if sum(e) < k}
        if not low:
            continue
        for a in monos:
            da = sum(a)
            row = {}
            for e, c in low.items():
                if da + sum(e) < k:
                    row[col[tuple(x + y for x, y in zip(a, e))]] = c
            if row:
                rows.append(row)
    return len(monos) - _sparse_rank(rows)


def _sparse_rank(rows: List[Dict[int, Fraction]]) -> int:
    """Rank of sparse rows by incremental elimination against pivots."""
    pivots: Dict[int, Dict[int, Fraction]] = {}
    for r in rows:
        r = dict(r)
        while r:
            p = min(r)
            if p not in pivots:
                inv = 1 / r[p]
                pivots[p] = {j: v * inv for j, v in r.items()}
                break
            f = r[p]
            for j, v in pivots[p].items():
                w = r.get(j, 0) - f * v
                if w:
                    r[j] = w
                else:
                    r.pop(j, None)
    return len(pivots)


def _monomials_of_degree(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for k in range(d, -1, -1):
        for rest in _monomials_of_degree(n - 1, d - k):
            yield (k,) + rest
