"""Finite abelian groups in invariant-factor form.

Groups are tuples of invariant factors (n_1, ..., n_t) with
n_t | n_{t-1} | ... | n_1 and every n_i >= 2; the trivial group is the empty
tuple.  Elements are coordinate tuples reduced mod n_i.  Subgroups are stored
by the row Hermite normal form of their coordinate lattice, which makes
set-equality a syntactic check.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod

from .scalars import Cyclotomic, rational_phase

SUBGROUP_GUARD = 1024


class GuardError(ValueError):
    """Enumeration size exceeds the configured guard."""


# -- integer matrix utilities -------------------------------------------------


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul_int(A, B):
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    return [
        [sum(A[i][k] * B[k][j] for k in range(m)) for j in range(p)] for i in range(n)
    ]


def mat_vec_int(A, v):
    return tuple(sum(row[i] * v[i] for i in range(len(v))) for row in A)


def smith_normal_form(M):
    """(P, D, Q) with P*M*Q = D diagonal, d_1 | d_2 | ..., P,Q unimodular."""
    P, _, D, Q, _ = smith_with_inverses(M)
    return P, D, Q


def smith_with_inverses(M):
    """(P, Pinv, D, Q, Qinv) with P*M*Q = D and P*Pinv = Q*Qinv = identity."""
    D = [list(map(int, row)) for row in M]
    rows = len(D)
    cols = len(D[0]) if rows else 0
    P, Pinv = _identity(rows), _identity(rows)
    Q, Qinv = _identity(cols), _identity(cols)

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]
        for r in Pinv:
            r[i], r[j] = r[j], r[i]

    def row_add(i, j, c):  # row i += c * row j
        for k in range(cols):
            D[i][k] += c * D[j][k]
        for k in range(rows):
            P[i][k] += c * P[j][k]
        for r in Pinv:
            r[j] -= c * r[i]

    def row_neg(i):
        for k in range(cols):
            D[i][k] = -D[i][k]
        for k in range(rows):
            P[i][k] = -P[i][k]
        for r in Pinv:
            r[i] = -r[i]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in Q:
            r[i], r[j] = r[j], r[i]
        Qinv[i], Qinv[j] = Qinv[j], Qinv[i]

    def col_add(i, j, c):  # col i += c * col j
        for r in D:
            r[i] += c * r[j]
        for r in Q:
            r[i] += c * r[j]
        for k in range(cols):
            Qinv[j][k] -= c * Qinv[i][k]

    t = 0
    while t < min(rows, cols):
        # locate smallest nonzero entry in the trailing block
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if D[i][j] and (pivot is None or abs(D[i][j]) < abs(D[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        row_swap(t, pivot[0])
        col_swap(t, pivot[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    row_add(i, t, -q)
                    if D[i][t]:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    col_add(j, t, -q)
                    if D[t][j]:
                        col_swap(t, j)
                        dirty = True
            if not dirty:
                # enforce divisibility of the remaining block by the pivot
                d = D[t][t]
                for i in range(t + 1, rows):
                    if any(D[i][j] % d for j in range(t + 1, cols)):
                        row_add(t, i, 1)
                        dirty = True
                        break
        if D[t][t] < 0:
            row_neg(t)
        t += 1
    return P, Pinv, D, Q, Qinv


def hermite_rows(rows: list[list[int]], width: int) -> tuple[tuple[int, ...], ...]:
    """Row HNF of the lattice spanned by ``rows`` inside Z^width.

    Requires the lattice to have full rank (always true here because group
    relations are appended); result is upper triangular with positive pivots
    and entries above each pivot reduced into [0, pivot).
    """
    work = [list(map(int, r)) for r in rows if any(r)]
    out: list[list[int]] = []
    for j in range(width):
        pool = [r for r in work if r[j]]
        work = [r for r in work if not r[j]]
        if not pool:
            raise ValueError("lattice not of full rank")
        piv = pool.pop()
        for r in pool:
            # gcd combination in column j
            while r[j]:
                if abs(r[j]) < abs(piv[j]):
                    piv, r = r, piv
                q = r[j] // piv[j]
                for k in range(width):
                    r[k] -= q * piv[k]
            if any(r):
                work.append(r)
        if piv[j] < 0:
            piv = [-c for c in piv]
        out.append(piv)
    # reduce entries above pivots, leftmost pivot first: subtracting a pivot
    # row touches columns to its right, which later passes then normalize
    for i in range(width):
        p = out[i][i]
        for r in out[:i]:
            q = r[i] // p
            if q:
                for k in range(width):
                    r[k] -= q * out[i][k]
    return tuple(tuple(r) for r in out)


# -- groups -------------------------------------------------------------------


class FinAbGroup:
    """Product of cyclic groups Z_{n_1} x ... x Z_{n_t}, n_t | ... | n_1."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        factors = tuple(int(n) for n in factors)
        for n in factors:
            if n < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(factors, factors[1:]):
            if a % b != 0:
                raise ValueError(f"divisibility chain violated: {b} does not divide {a}")
        self.factors = factors

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return prod(self.factors)

    @property
    def exponent(self) -> int:
        return self.factors[0] if self.factors else 1

    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.factors)

    def reduce(self, g) -> tuple[int, ...]:
        return tuple(int(x) % n for x, n in zip(g, self.factors))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.factors))

    def neg(self, a) -> tuple[int, ...]:
        return tuple((-x) % n for x, n in zip(a, self.factors))

    def sub(self, a, b) -> tuple[int, ...]:
        return tuple((x - y) % n for x, y, n in zip(a, b, self.factors))

    def scale(self, k: int, a) -> tuple[int, ...]:
        return tuple((k * x) % n for x, n in zip(a, self.factors))

    def element_order(self, a) -> int:
        return lcm(1, *(n // gcd(n, x) for x, n in zip(a, self.factors)))

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*[range(n) for n in self.factors]))

    def times(self, other: "FinAbGroup") -> "FinAbGroup":
        """Direct product, renormalized to invariant-factor form."""
        g, _, _ = canonical_presentation(self.factors + other.factors)
        return g

    def __eq__(self, other):
        return isinstance(other, FinAbGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        if not self.factors:
            return "Z1"
        return "x".join(f"Z{n}" for n in self.factors)

    def to_json(self):
        return {"factors": list(self.factors)}


@lru_cache(maxsize=None)
def _canonical_presentation_cached(factors: tuple[int, ...]):
    t = len(factors)
    if t == 0:
        return FinAbGroup(()), [], []
    P, Pinv, D, _, _ = smith_with_inverses([[factors[i] if i == j else 0 for j in range(t)] for i in range(t)])
    ds = [D[i][i] for i in range(t)]
    keep = [i for i, d in enumerate(ds) if d > 1]
    keep.reverse()  # invariant factors decreasing
    group = FinAbGroup(tuple(ds[i] for i in keep))
    to_canon = [P[i] for i in keep]
    from_canon = [[Pinv[r][i] for i in keep] for r in range(t)]
    return group, to_canon, from_canon


def canonical_presentation(factors):
    """Invariant-factor group for Z_{f_1} x ... x Z_{f_k} plus coordinate maps.

    Returns (G, to_canon, from_canon): to_canon maps raw coordinates to G's
    coordinates, from_canon maps back (both plain integer matrices, applied
    mod the target's factors).
    """
    return _canonical_presentation_cached(tuple(int(f) for f in factors))


# -- subgroups ----------------------------------------------------------------


class Subgroup:
    """Subgroup of a FinAbGroup, canonicalized by its coordinate-lattice HNF."""

    __slots__ = ("ambient", "lattice", "_elems")

    def __init__(self, ambient: FinAbGroup, gens):
        self.ambient = ambient
        t = ambient.rank
        rows = [list(ambient.reduce(g)) for g in gens]
        rows += [[ambient.factors[i] if i == j else 0 for j in range(t)] for i in range(t)]
        self.lattice = hermite_rows(rows, t) if t else ()
        self._elems = None

    @property
    def order(self) -> int:
        idx = prod(self.lattice[i][i] for i in range(len(self.lattice)))
        return self.ambient.order // idx

    def gens(self) -> list[tuple[int, ...]]:
        out = []
        for row in self.lattice:
            g = self.ambient.reduce(row)
            if any(g):
                out.append(g)
        return out

    def contains(self, g) -> bool:
        g = list(self.ambient.reduce(g))
        # solve c * lattice = g by ascending back-substitution
        t = len(g)
        coeff = [0] * t
        for j in range(t):
            rem = g[j] - sum(coeff[i] * self.lattice[i][j] for i in range(j))
            if rem % self.lattice[j][j]:
                return False
            coeff[j] = rem // self.lattice[j][j]
        return True

    def elements(self) -> list[tuple[int, ...]]:
        if self._elems is None:
            if self.order > SUBGROUP_GUARD:
                raise GuardError(f"subgroup order {self.order} exceeds guard")
            G = self.ambient
            seen = {G.zero()}
            frontier = [G.zero()]
            gens = self.gens()
            while frontier:
                nxt = []
                for x in frontier:
                    for g in gens:
                        y = G.add(x, g)
                        if y not in seen:
                            seen.add(y)
                            nxt.append(y)
                frontier = nxt
            self._elems = sorted(seen)
        return self._elems

    def key(self):
        return (self.ambient.factors, self.lattice)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Subgroup({self.ambient}, order={self.order})"

    def to_json(self):
        return {"ambient": self.ambient.to_json(), "gens": [list(g) for g in self.gens()]}


def trivial_subgroup(G: FinAbGroup) -> Subgroup:
    return Subgroup(G, [])


def full_subgroup(G: FinAbGroup) -> Subgroup:
    t = G.rank
    return Subgroup(G, [tuple(int(i == j) for j in range(t)) for i in range(t)])


def all_subgroups(G: FinAbGroup) -> list[Subgroup]:
    """Every subgroup, by closure search; complete and duplicate-free."""
    if G.order > SUBGROUP_GUARD:
        raise GuardError(f"group order {G.order} exceeds guard {SUBGROUP_GUARD}")
    elems = G.elements()
    triv = trivial_subgroup(G)
    found = {triv.key(): triv}
    frontier = [triv]
    while frontier:
        nxt = []
        for H in frontier:
            hset = set(H.elements())
            for g in elems:
                if g not in hset:
                    K = Subgroup(G, H.gens() + [g])
                    if K.key() not in found:
                        found[K.key()] = K
                        nxt.append(K)
        frontier = nxt
    return sorted(found.values(), key=lambda s: (s.order, s.lattice))


def quotient(G: FinAbGroup, H: Subgroup):
    """(Q, projection Hom, coset representatives) for G/H."""
    if H.ambient != G:
        raise ValueError("subgroup of a different group")
    t = G.rank
    if t == 0:
        Q = FinAbGroup(())
        return Q, Hom(G, Q, []), [()]
    # rows of H.lattice span the coset lattice; quotient coordinates come from
    # the SNF row transform of its transpose
    B = [[H.lattice[i][j] for i in range(t)] for j in range(t)]
    P, Pinv, D, _, _ = smith_with_inverses(B)
    ds = [D[i][i] for i in range(t)]
    keep = [i for i, d in enumerate(ds) if d > 1]
    keep.reverse()
    Qgrp = FinAbGroup(tuple(ds[i] for i in keep))
    proj = Hom(G, Qgrp, [P[i] for i in keep], check=False)
    reps: dict[tuple, tuple] = {}
    for g in sorted(G.elements()):
        v = proj.apply(g)
        if v not in reps:
            reps[v] = g
    return Qgrp, proj, [reps[v] for v in sorted(reps)]


# -- homomorphisms ------------------------------------------------------------


class Hom:
    """Homomorphism given by an integer matrix acting on coordinates.

    apply(g)_j = sum_i matrix[j][i] * g_i  (mod codomain factor j).
    """

    __slots__ = ("domain", "codomain", "matrix")

    def __init__(self, domain: FinAbGroup, codomain: FinAbGroup, matrix, check=True):
        self.domain = domain
        self.codomain = codomain
        self.matrix = tuple(
            tuple(int(matrix[j][i]) % codomain.factors[j] for i in range(domain.rank))
            for j in range(codomain.rank)
        )
        if check and not self.is_well_defined():
            raise ValueError("matrix does not respect the domain relations")

    def is_well_defined(self) -> bool:
        for i, n in enumerate(self.domain.factors):
            for j, m in enumerate(self.codomain.factors):
                if (n * self.matrix[j][i]) % m:
                    return False
        return True

    def apply(self, g) -> tuple[int, ...]:
        g = self.domain.reduce(g)
        return tuple(
            sum(row[i] * g[i] for i in range(len(g))) % m
            for row, m in zip(self.matrix, self.codomain.factors)
        )

    def compose(self, first: "Hom") -> "Hom":
        """self after first."""
        if first.codomain != self.domain:
            raise ValueError("composition mismatch")
        M = mat_mul_int([list(r) for r in self.matrix], [list(r) for r in first.matrix])
        return Hom(first.domain, self.codomain, M, check=False)

    @staticmethod
    def identity(G: FinAbGroup) -> "Hom":
        t = G.rank
        return Hom(G, G, _identity(t), check=False)

    def is_bijective(self) -> bool:
        if self.domain.order != self.codomain.order:
            return False
        ker, _ = hom_kernel_image(self)
        return ker.order == 1

    def __eq__(self, other):
        return (
            isinstance(other, Hom)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.domain.factors, self.codomain.factors, self.matrix))

    def __repr__(self):
        return f"Hom({self.domain} -> {self.codomain}, {self.matrix})"


def congruence_kernel(G: FinAbGroup, rows, moduli) -> Subgroup:
    """{g in G : sum_i rows[a][i] g_i = 0 (mod moduli[a]) for all a}."""
    t = G.rank
    s = len(rows)
    if s == 0 or t == 0:
        return full_subgroup(G)
    for a in range(s):
        for i in range(t):
            if (G.factors[i] * rows[a][i]) % moduli[a]:
                raise ValueError("condition not constant on cosets of the relations")
    A = [[int(rows[a][i]) for i in range(t)] + [-moduli[a] if b == a else 0 for b in range(s)] for a in range(s)]
    _, _, D, Q, _ = smith_with_inverses(A)
    rank = sum(1 for i in range(min(s, t + s)) if D[i][i])
    gens = []
    for j in range(t + s):
        if j >= rank:
            gens.append(tuple(Q[i][j] for i in range(t)))
    return Subgroup(G, gens)


def hom_kernel_image(f: Hom) -> tuple[Subgroup, Subgroup]:
    ker = congruence_kernel(f.domain, [list(r) for r in f.matrix], list(f.codomain.factors))
    t = f.domain.rank
    basis = [tuple(int(i == j) for j in range(t)) for i in range(t)]
    img = Subgroup(f.codomain, [f.apply(e) for e in basis])
    return ker, img


def homs(dom: FinAbGroup, cod: FinAbGroup, limit=10**7) -> list[Hom]:
    """All homomorphisms dom -> cod by direct enumeration."""
    s, t = dom.rank, cod.rank
    if s == 0 or t == 0:
        return [Hom(dom, cod, [[0] * s for _ in range(t)], check=False)]
    n, m = dom.factors, cod.factors
    choices = []
    for j in range(t):
        for i in range(s):
            step = m[j] // gcd(m[j], n[i])
            choices.append(range(0, m[j], step))
    total = prod(len(c) for c in choices)
    if total > limit:
        raise GuardError(f"homomorphism count {total} exceeds guard")
    out = []
    for flat in itertools.product(*choices):
        M = [list(flat[j * s : (j + 1) * s]) for j in range(t)]
        out.append(Hom(dom, cod, M, check=False))
    return out


def endomorphisms(G: FinAbGroup, invertible_only=False, limit=10**7):
    """All endomorphisms (or automorphisms) of G by direct enumeration."""
    out = homs(G, G, limit)
    if invertible_only:
        out = [f for f in out if f.is_bijective()]
    return out


def automorphisms(G: FinAbGroup) -> list[Hom]:
    return endomorphisms(G, invertible_only=True)


def product_with_maps(A: FinAbGroup, B: FinAbGroup):
    """Direct product in invariant-factor form with pairing and splitting maps."""
    raw_factors = A.factors + B.factors
    P, to_canon, from_canon = canonical_presentation(raw_factors)
    ra = A.rank

    def pair(a, b):
        raw = tuple(a) + tuple(b)
        return P.reduce(
            tuple(sum(row[r] * raw[r] for r in range(len(raw))) for row in to_canon)
        )

    def split(p):
        raw = tuple(
            sum(from_canon[r][k] * p[k] for k in range(P.rank))
            for r in range(len(raw_factors))
        )
        return A.reduce(raw[:ra]), B.reduce(raw[ra:])

    return P, pair, split


# -- characters ---------------------------------------------------------------


class Character:
    """chi(g) = e^(2 pi i sum_i a_i g_i / n_i), stored by exponent tuple a."""

    __slots__ = ("ambient", "exponents")

    def __init__(self, ambient: FinAbGroup, exponents):
        self.ambient = ambient
        self.exponents = tuple(int(a) % n for a, n in zip(exponents, ambient.factors))

    def phase(self, g) -> Fraction:
        """Exponent of chi(g) as a rational mod 1."""
        g = self.ambient.reduce(g)
        r = sum(
            Fraction(a * x, n)
            for a, x, n in zip(self.exponents, g, self.ambient.factors)
        )
        return r % 1 if self.exponents else Fraction(0)

    def eval(self, g) -> Cyclotomic:
        return rational_phase(self.phase(g))

    def mul(self, other: "Character") -> "Character":
        return Character(
            self.ambient,
            [a + b for a, b in zip(self.exponents, other.exponents)],
        )

    def inverse(self) -> "Character":
        return Character(self.ambient, [-a for a in self.exponents])

    def order(self) -> int:
        return self.ambient.element_order(self.exponents)

    def kernel(self) -> Subgroup:
        n = self.ambient.factors
        e = self.ambient.exponent
        row = [self.exponents[i] * (e // n[i]) for i in range(len(n))]
        return congruence_kernel(self.ambient, [row], [e])

    def __eq__(self, other):
        return (
            isinstance(other, Character)
            and self.ambient == other.ambient
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((self.ambient.factors, self.exponents))

    def __repr__(self):
        return f"Character({self.ambient}, {self.exponents})"


def dual_characters(G: FinAbGroup) -> list[Character]:
    return [Character(G, e) for e in G.elements()]


def abelian_structure(elements, op, identity):
    """Invariant factors of a finite abelian group given by a multiplication op.

    Returns (G, coords) with coords mapping each element to G-coordinates;
    the map is an isomorphism onto G.
    """
    elems = list(elements)
    reps: dict = {identity: ()}
    gens = []
    relations = []  # triangular relation rows over the generator exponents
    for x in elems:
        if x in reps:
            continue
        i = len(gens)
        gens.append(x)
        old = list(reps.items())
        reps = {e: c + (0,) for e, c in old}
        # minimal m with x^m landing in the previous subgroup
        y = x
        m = 1
        while y not in reps:
            y = op(y, x)
            m += 1
        rel = [0] * i + [m]
        prev = reps[y]
        relations = [r + [0] for r in relations]
        relations.append([rel[a] - (prev[a] if a < i else 0) for a in range(i + 1)])
        power = identity
        new = {}
        for k in range(1, m):
            power = op(power, x)
            for e, c in reps.items():
                v = op(e, power)
                if v not in reps:
                    new[v] = c[:i] + (c[i] + k,)
        reps.update(new)
    k = len(gens)
    if k == 0:
        return FinAbGroup(()), {identity: ()}
    B = [[relations[r][a] for r in range(len(relations))] for a in range(k)]
    P, _, D, _, _ = smith_with_inverses(B)
    ds = [D[i][i] for i in range(k)]
    keep = [i for i, d in enumerate(ds) if d > 1]
    keep.reverse()
    G = FinAbGroup(tuple(ds[i] for i in keep))
    coords = {}
    for e, c in reps.items():
        coords[e] = tuple(
            sum(P[i][a] * c[a] for a in range(k)) % G.factors[j]
            for j, i in enumerate(keep)
        )
    return G, coords


def subgroup_group(H: Subgroup):
    """Present a subgroup as a standalone group.

    Returns (J, embed, section): J in invariant-factor form, embed mapping
    J-coordinates to ambient elements, section inverting it on H's elements.
    """
    G = H.ambient
    t = G.rank
    gens = H.gens()
    k = len(gens)
    if k == 0:
        J = FinAbGroup(())
        return J, (lambda y: G.zero()), (lambda g: ())
    # relation lattice {c in Z^k : sum_a c_a gens[a] = 0 in G}
    A = [
        [gens[a][i] for a in range(k)]
        + [-G.factors[i] if b == i else 0 for b in range(t)]
        for i in range(t)
    ]
    _, _, D, Q, _ = smith_with_inverses(A)
    rank = sum(1 for i in range(min(t, k + t)) if D[i][i])
    rel = [
        [Q[a][j] for a in range(k)] for j in range(k + t) if j >= rank
    ]  # rows spanning the relation lattice
    B = [[rel[r][a] for r in range(len(rel))] for a in range(k)]
    P, Pinv, D2, _, _ = smith_with_inverses(B)
    ds = [D2[i][i] for i in range(k)]
    keep = [i for i, d in enumerate(ds) if d > 1]
    keep.reverse()
    J = FinAbGroup(tuple(ds[i] for i in keep))
    sect_rows = [P[i] for i in keep]

    def embed(y):
        c = [sum(Pinv[a][keep[j]] * y[j] for j in range(len(keep))) for a in range(k)]
        out = G.zero()
        for a in range(k):
            out = G.add(out, G.scale(c[a], gens[a]))
        return out

    hnf = H.lattice

    def section(g):
        g = list(G.reduce(g))
        coeff = [0] * t
        for j in range(t):
            rem = g[j] - sum(coeff[i] * hnf[i][j] for i in range(j))
            if rem % hnf[j][j]:
                raise ValueError("element outside the subgroup")
            coeff[j] = rem // hnf[j][j]
        c = [coeff[i] for i in range(t) if any(G.reduce(hnf[i]))]
        return tuple(
            sum(row[a] * c[a] for a in range(k)) % J.factors[jj]
            for jj, row in enumerate(sect_rows)
        )

    return J, embed, section
