"""Even positive-definite lattices and their finite quadratic invariants.

A lattice is stored as its integer Gram matrix.  The dual quotient carries a
quadratic form (half the norm of a coset representative, mod 1), and the
module provides the constructions that move between lattices and forms:
discriminant extraction, dual-coset gluing, a table of standard root and
scaled-cubic lattices, realization of an arbitrary nondegenerate form, and
the subgroup correspondence for intermediate lattices.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm, prod

from sympy import Matrix, primerange

from .abelian import (
    FinAbGroup,
    GuardError,
    Subgroup,
    hermite_rows,
    smith_with_inverses,
)
from .forms import (
    Pairing,
    QuadraticForm,
    forms_equivalent,
    indecomposable_form,
    mod1,
)

DISCRIMINANT_GUARD = 10**5
PRIME_BOUND = 10**4
FORM_ORDER_GUARD = 512
FORM_RANK_GUARD = 4


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _elimination_pivots(rows) -> list[Fraction]:
    """Pivots of symmetric Gaussian elimination; all positive iff definite."""
    n = len(rows)
    work = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    for i in range(n):
        piv = work[i][i]
        if piv <= 0:
            return []
        pivots.append(piv)
        for r in range(i + 1, n):
            f = work[r][i] / piv
            if f:
                for c in range(i, n):
                    work[r][c] -= f * work[i][c]
    return pivots


class Lattice:
    """Integer Gram matrix, symmetric, even on the diagonal, positive definite."""

    __slots__ = ("gram", "det", "_inv")

    def __init__(self, gram):
        rows = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("gram matrix must be square")
        for i in range(n):
            if rows[i][i] % 2:
                raise ValueError("diagonal entries must be even")
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        pivots = _elimination_pivots(rows)
        if n and len(pivots) < n:
            raise ValueError("gram matrix must be positive definite")
        det = prod(pivots, start=Fraction(1))
        self.gram = rows
        self.det = int(det)
        self._inv = None

    @property
    def rank(self) -> int:
        return len(self.gram)

    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        """Gram inverse; its columns span the dual in lattice coordinates."""
        if self._inv is None:
            inv = Matrix(self.gram).inv() if self.gram else Matrix(0, 0, [])
            self._inv = tuple(
                tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(self.rank))
                for i in range(self.rank)
            )
        return self._inv

    def direct_sum(self, other: "Lattice") -> "Lattice":
        n, m = self.rank, other.rank
        out = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                out[i][j] = self.gram[i][j]
        for i in range(m):
            for j in range(m):
                out[n + i][n + j] = other.gram[i][j]
        return Lattice(out)

    def key(self):
        return self.gram

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"Lattice(rank={self.rank}, det={self.det})"

    def to_json(self):
        return {"gram": [list(r) for r in self.gram]}

    @staticmethod
    def from_json(obj) -> "Lattice":
        return Lattice(obj["gram"])


class DualVector:
    """Rational coordinates with respect to the lattice basis."""

    __slots__ = ("lattice", "coords")

    def __init__(self, lattice: Lattice, coords):
        cs = tuple(Fraction(c) for c in coords)
        if len(cs) != lattice.rank:
            raise ValueError("coordinate length must match the lattice rank")
        self.lattice = lattice
        self.coords = cs

    def dot(self, other: "DualVector") -> Fraction:
        if other.lattice.gram != self.lattice.gram:
            raise ValueError("vectors live in different lattices")
        g = self.lattice.gram
        n = self.lattice.rank
        return sum(
            (self.coords[i] * g[i][j] * other.coords[j] for i in range(n) for j in range(n)),
            Fraction(0),
        )

    def norm(self) -> Fraction:
        return self.dot(self)

    def in_dual(self) -> bool:
        """Pairing with every lattice vector is an integer."""
        g = self.lattice.gram
        n = self.lattice.rank
        for j in range(n):
            if sum((self.coords[i] * g[i][j] for i in range(n)), Fraction(0)).denominator != 1:
                return False
        return True

    def is_lattice_vector(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def scale(self, k: int) -> "DualVector":
        return DualVector(self.lattice, tuple(k * c for c in self.coords))

    def __repr__(self):
        return f"DualVector({self.coords})"


# -- discriminant data ---------------------------------------------------------


def discriminant(L: Lattice):
    """(dual quotient group, its quadratic form, coset representatives).

    The group is Z^n modulo the Gram column span; the form is half the norm
    of any representative, mod 1.  Representative i spans the i-th invariant
    factor.
    """
    n = L.rank
    if L.det > DISCRIMINANT_GUARD:
        raise GuardError(f"discriminant order {L.det} exceeds guard")
    P, Pinv, D, Q, Qinv = smith_with_inverses([list(r) for r in L.gram])
    ds = [D[i][i] for i in range(n)]
    keep = [i for i in range(n) if ds[i] > 1]
    keep.reverse()
    G = FinAbGroup(tuple(ds[i] for i in keep))
    reps = tuple(
        DualVector(L, tuple(Fraction(Q[r][i], ds[i]) for r in range(n))) for i in keep
    )
    table = {}
    for g in G.elements():
        v = DualVector(
            L,
            tuple(
                sum((g[j] * reps[j].coords[r] for j in range(len(keep))), Fraction(0))
                for r in range(n)
            ),
        )
        table[g] = mod1(v.norm() / 2)
    return G, QuadraticForm(G, table), reps


# -- gluing ----------------------------------------------------------------------


def glue(L: Lattice, cosets) -> Lattice:
    """Enlarge by dual cosets with even norms and integral mutual products."""
    vecs = []
    for c in cosets:
        v = c if isinstance(c, DualVector) else DualVector(L, c)
        if v.lattice.gram != L.gram:
            raise ValueError("coset belongs to a different lattice")
        vecs.append(v)
    for v in vecs:
        if not v.in_dual():
            raise ValueError("coset representative is not in the dual")
        if mod1(v.norm() / 2) != 0:
            raise ValueError("coset norm must be an even integer")
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            if vecs[i].dot(vecs[j]).denominator != 1:
                raise ValueError("coset products must be integers")
    if not vecs:
        return L
    n = L.rank
    den = lcm(*[c.denominator for v in vecs for c in v.coords], 1)
    rows = [[den if i == j else 0 for j in range(n)] for i in range(n)]
    rows += [[int(c * den) for c in v.coords] for v in vecs]
    H = hermite_rows(rows, n)
    index = den**n // prod(H[i][i] for i in range(n))
    B = [[Fraction(H[i][j], den) for j in range(n)] for i in range(n)]
    g = L.gram
    new = [
        [
            sum(
                (B[a][i] * g[i][j] * B[b][j] for i in range(n) for j in range(n)),
                Fraction(0),
            )
            for b in range(n)
        ]
        for a in range(n)
    ]
    if any(x.denominator != 1 for row in new for x in row):
        raise ValueError("glued Gram matrix is not integral")
    out = Lattice([[int(x) for x in row] for row in new])
    if out.det * index * index != L.det:
        raise RuntimeError("glue determinant law violated")
    return out


# -- named lattices -------------------------------------------------------------


def _gram_from_roots(roots) -> Lattice:
    return Lattice(
        [[sum(a * b for a, b in zip(r, s)) for s in roots] for r in roots]
    )


_E_EDGES = {
    6: ((1, 3), (3, 4), (4, 5), (5, 6), (2, 4)),
    7: ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (2, 4)),
    8: ((1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)),
}


def named(name: str) -> Lattice:
    """Standard lattices: A<n>, D<n>, E6, E7, E8, sqrt2n:<n>."""
    s = str(name).strip().replace("_", "")
    if s in ("E6", "E7", "E8"):
        n = int(s[1])
        gram = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        for a, b in _E_EDGES[n]:
            gram[a - 1][b - 1] = gram[b - 1][a - 1] = -1
        return Lattice(gram)
    if s.startswith("A") and s[1:].isdigit():
        n = int(s[1:])
        if n < 1:
            raise ValueError("A-series needs n >= 1")
        gram = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        for i in range(n - 1):
            gram[i][i + 1] = gram[i + 1][i] = -1
        return Lattice(gram)
    if s.startswith("D") and s[1:].isdigit():
        n = int(s[1:])
        if n < 2:
            raise ValueError("D-series needs n >= 2")
        roots = [
            [1 if c == i else -1 if c == i + 1 else 0 for c in range(n)]
            for i in range(n - 1)
        ]
        roots.append([1 if c >= n - 2 else 0 for c in range(n)])
        return _gram_from_roots(roots)
    low = s.lower()
    for prefix in ("sqrt2n:", "sqrt2n(", "sqrt2n"):
        if low.startswith(prefix) and low[len(prefix) :].rstrip(")").isdigit():
            n = int(low[len(prefix) :].rstrip(")"))
            if n < 1:
                raise ValueError("sqrt2n needs n >= 1")
            return Lattice([[2 * n]])
    raise ValueError(f"unknown lattice name {name!r}")


# -- realization of quadratic forms ----------------------------------------------


def _class_with_norm(L: Lattice, target: Fraction) -> DualVector:
    """A dual class whose norm is the target mod 2."""
    G, _, reps = discriminant(L)
    n = L.rank
    for g in G.elements():
        v = DualVector(
            L,
            tuple(
                sum((g[j] * reps[j].coords[r] for j in range(len(reps))), Fraction(0))
                for r in range(n)
            ),
        )
        if mod1((v.norm() - target) / 2) == 0:
            return v
    raise RuntimeError("no dual class with the requested norm")


def _verify_realization(L: Lattice, q: QuadraticForm) -> Lattice:
    _, qL, _ = discriminant(L)
    if forms_equivalent(qL, q) is None:
        raise RuntimeError("realized lattice fails its discriminant check")
    return L


def _odd_prime_glue(p: int, k: int, s: int, prime_bound: int) -> Lattice:
    """Auxiliary-prime gluing for the sign the A-series misses.

    Needs a prime p' = 3 mod 4 whose residue class matches the target sign
    and for which 2 p^k is a square mod p'; both the A-series coset and the
    rank-1 + A + (A1 or E7) glue below then exist.
    """
    N = p**k
    for pp in primerange(3, prime_bound):
        if pp % 4 != 3 or pp == p:
            continue
        if _legendre(pp, p) != s:
            continue
        if _legendre(2 * N, pp) != 1:
            continue
        c = next(c for c in range(1, pp) if (c * c - 2 * N) % pp == 0)
        A = named(f"A{pp - 1}")
        third = named("A1") if (pp * N) % 4 == 3 else named("E7")
        base = Lattice([[2 * pp * N]]).direct_sum(A).direct_sum(third)
        omega = tuple(Fraction(c * (pp - i), pp) for i in range(1, pp))
        w3 = (
            (Fraction(1, 2),)
            if third.rank == 1
            else _class_with_norm(third, Fraction(3, 2)).coords
        )
        zeros_a = (Fraction(0),) * A.rank
        zeros_t = (Fraction(0),) * third.rank
        u1 = (Fraction(1, 2),) + zeros_a + w3
        u2 = (Fraction(1, pp),) + omega + zeros_t
        return glue(base, [u1, u2])
    raise GuardError(f"no admissible auxiliary prime below {prime_bound}")


def _glue_scaled(k: int, mprime: int, ingredient: Lattice) -> Lattice:
    """Glue sqrt(m' 2^k)Z to a Z_{m'} lattice, leaving a 2^k quotient."""
    N = 2**k
    base = Lattice([[mprime * N]]).direct_sum(ingredient)
    gamma = _class_with_norm(ingredient, Fraction(-N, mprime))
    coset = (Fraction(1, mprime),) + gamma.coords
    return glue(base, [coset])


def _realize_two_power(k: int, m: int, prime_bound: int) -> Lattice:
    if k == 1:
        return named("A1") if m % 4 == 1 else named("E7")
    m8 = m % 8
    if m8 == 1:
        return Lattice([[2**k]])
    if k == 2:
        return named({3: "A3", 5: "D5", 7: "D7"}[m8])
    if m8 == 7:
        return named(f"A{2 ** k - 1}")
    if m8 == 3:
        ingredient = named("A2") if k % 2 == 0 else named("E6")
        return _glue_scaled(k, 3, ingredient)
    ingredient = named("A4") if k % 2 == 0 else realize("5^1_+", prime_bound)
    return _glue_scaled(k, 5, ingredient)


def _realize_factor(desc: str, prime_bound: int) -> Lattice:
    q_target, _ = indecomposable_form(desc)
    head, sub = desc.strip().rsplit("_", 1)
    if head.count("^") == 2:
        k = int(head[: len(head) // 2][2:])
        N = 2**k
        if sub == "i":
            ingredient = _realize_two_power(k, -1, prime_bound)
            gamma = _class_with_norm(ingredient, Fraction(-1, N))
            base = (
                Lattice([[N]])
                .direct_sum(Lattice([[N]]))
                .direct_sum(ingredient)
                .direct_sum(ingredient)
            )
            coset = (Fraction(1, N), Fraction(1, N)) + gamma.coords + gamma.coords
        else:
            ingredient = _realize_two_power(k, -3, prime_bound)
            gamma = _class_with_norm(ingredient, Fraction(-3, N))
            base = (
                Lattice([[N]])
                .direct_sum(Lattice([[N]]))
                .direct_sum(Lattice([[N]]))
                .direct_sum(ingredient)
            )
            coset = (Fraction(1, N),) * 3 + gamma.coords
        return _verify_realization(glue(base, [coset]), q_target)
    p_str, k_str = head.split("^")
    p, k = int(p_str), int(k_str)
    if p == 2:
        return _verify_realization(
            _realize_two_power(k, int(sub), prime_bound), q_target
        )
    s = 1 if sub in ("+", "+1", "1") else -1
    N = p**k
    if _legendre((N - 1) // 2, p) == s:
        L = named(f"A{N - 1}")
    elif (p, k, s) == (3, 1, -1):
        L = named("E6")
    else:
        L = _odd_prime_glue(p, k, s, prime_bound)
    return _verify_realization(L, q_target)


def _two_group_splittings(ks):
    """Ways to write a multiset of 2-power exponents as singles and equal pairs."""
    if not ks:
        yield ()
        return
    rest = list(ks[1:])
    for tail in _two_group_splittings(rest):
        yield (("single", ks[0]),) + tail
    for i, other in enumerate(rest):
        if other == ks[0]:
            remaining = rest[:i] + rest[i + 1 :]
            for tail in _two_group_splittings(remaining):
                yield (("pair", ks[0]),) + tail
            break


def _matching_descriptor(q: QuadraticForm) -> str:
    """A product of indecomposable descriptors equivalent to the form."""
    G = q.group
    if G.order > FORM_ORDER_GUARD:
        raise GuardError(f"form order {G.order} exceeds guard")
    if G.rank > FORM_RANK_GUARD:
        raise GuardError(f"form rank {G.rank} exceeds guard")
    if not q.polarization().is_nondegenerate():
        raise ValueError("only nondegenerate forms decompose into indecomposables")
    primes = []
    x = G.order
    d = 2
    while d * d <= x:
        if x % d == 0:
            primes.append(d)
            while x % d == 0:
                x //= d
        d += 1
    if x > 1:
        primes.append(x)
    per_prime = []
    for p in primes:
        ks = []
        for f in G.factors:
            k = 0
            while f % p == 0:
                f //= p
                k += 1
            if k:
                ks.append(k)
        options = []
        if p == 2:
            for split in set(_two_group_splittings(tuple(ks))):
                pools = []
                for kind, k in split:
                    if kind == "single":
                        pools.append(
                            [f"2^{k}_{m}" for m in ((1, 3) if k == 1 else (1, 3, -1, -3))]
                        )
                    else:
                        pools.append([f"2^{k}2^{k}_i", f"2^{k}2^{k}_ii"])
                options.extend(_products(pools))
        else:
            pools = [[f"{p}^{k}_+", f"{p}^{k}_-"] for k in ks]
            options.extend(_products(pools))
        per_prime.append(options)
    target_values = sorted(q.table.values())
    for combo in _products(per_prime):
        desc = " x ".join(part for group_part in combo for part in group_part)
        cand, _ = indecomposable_form(desc)
        if cand.group != G or sorted(cand.table.values()) != target_values:
            continue
        if forms_equivalent(cand, q) is not None:
            return desc
    raise ValueError("no indecomposable product matches the form")


def _products(pools):
    out = [()]
    for pool in pools:
        out = [prefix + (choice,) for prefix in out for choice in pool]
    return out


def realize(target, prime_bound: int = PRIME_BOUND) -> Lattice:
    """An even positive-definite lattice whose discriminant form is the target.

    Accepts an indecomposable-descriptor product or a QuadraticForm (small
    orders only).  Raises GuardError when a bounded search runs out of room.
    """
    if isinstance(target, QuadraticForm):
        if target.group.order == 1:
            return Lattice(())
        return realize(_matching_descriptor(target), prime_bound)
    desc = str(target).strip().replace("*", " x ")
    parts = [part.strip() for part in desc.split(" x ")]
    lat = None
    for part in parts:
        piece = _realize_factor(part, prime_bound)
        lat = piece if lat is None else lat.direct_sum(piece)
    if len(parts) > 1:
        q, _ = indecomposable_form(desc)
        if q.group.order <= FORM_ORDER_GUARD and q.group.rank <= FORM_RANK_GUARD:
            _verify_realization(lat, q)
    return lat


# -- intermediate lattices --------------------------------------------------------


def _check_embedding(L: Lattice, M: Lattice, embed) -> list[list[int]]:
    B = [[int(x) for x in row] for row in embed]
    n = M.rank
    if len(B) != n or any(len(r) != n for r in B):
        raise ValueError("embedding must be a square integer matrix")
    g = M.gram
    for a in range(n):
        for b in range(n):
            v = sum(B[a][i] * g[i][j] * B[b][j] for i in range(n) for j in range(n))
            if v != L.gram[a][b]:
                raise ValueError("embedding rows do not reproduce the sublattice Gram")
    return B


def lattice_quotient(L: Lattice, M: Lattice, embed):
    """(M/L, project, section) for a finite-index sublattice.

    ``embed`` rows are L's basis in M's coordinates.  ``project`` maps integer
    M-coordinates to quotient coordinates, ``section`` lifts them back.
    """
    B = _check_embedding(L, M, embed)
    n = M.rank
    Bt = [[B[r][c] for r in range(n)] for c in range(n)]
    P, Pinv, D, _, _ = smith_with_inverses(Bt)
    ds = [D[i][i] for i in range(n)]
    keep = [i for i in range(n) if ds[i] > 1]
    keep.reverse()
    G = FinAbGroup(tuple(ds[i] for i in keep))

    def project(v):
        return tuple(
            sum(P[i][r] * int(v[r]) for r in range(n)) % ds[i] for i in keep
        )

    def section(g):
        full = [0] * n
        for slot, i in enumerate(keep):
            full[i] = int(g[slot])
        return tuple(
            sum(Pinv[r][i] * full[i] for i in range(n)) for r in range(n)
        )

    return G, project, section


def intermediate(L: Lattice, M: Lattice, H: Subgroup, embed, pairing: Pairing):
    """(M_H, M^H): the sublattices of M matching H and its perp in M/L."""
    G, project, section = lattice_quotient(L, M, embed)
    if H.ambient != G:
        raise ValueError("subgroup must live in the quotient of M by L")
    if not (pairing.is_square and pairing.left == G):
        raise ValueError("pairing must be defined on the quotient group")
    if not pairing.is_nondegenerate():
        raise ValueError("pairing must be nondegenerate")
    B = _check_embedding(L, M, embed)
    n = M.rank

    def matching(sub: Subgroup) -> Lattice:
        rows = [list(r) for r in B] + [list(section(h)) for h in sub.gens()]
        Bh = hermite_rows(rows, n)
        gens = [project(row) for row in Bh]
        if Subgroup(G, gens) != sub:
            raise RuntimeError("intermediate lattice misses its subgroup")
        g = M.gram
        gram = [
            [
                sum(Bh[a][i] * g[i][j] * Bh[b][j] for i in range(n) for j in range(n))
                for b in range(n)
            ]
            for a in range(n)
        ]
        out = Lattice(gram)
        index = G.order // sub.order
        if out.det != M.det * index * index:
            raise RuntimeError("intermediate lattice index mismatch")
        return out

    return matching(H), matching(pairing.perp(H))
