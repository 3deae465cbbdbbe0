"""Pairings and quadratic forms on finite abelian groups.

Pairings are stored by an exponent matrix of rationals mod 1; quadratic forms
by a full value table of rationals mod 1.  The polarization convention is
pair(g, h) = q(g) * q(h) * conj(q(g + h)), i.e. on exponents
B(g, h) = q(g) + q(h) - q(g + h).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import lcm, prod

from .abelian import (
    FinAbGroup,
    GuardError,
    Hom,
    Subgroup,
    automorphisms,
    canonical_presentation,
    congruence_kernel,
    full_subgroup,
    Character,
)
from .scalars import Cyclotomic, rational_phase, root_of_unity, sqrt_nonneg_int


def mod1(x) -> Fraction:
    return Fraction(x) % 1


class Pairing:
    """Bicharacter gamma: left x right -> roots of unity.

    gamma(g, h) = e^(2 pi i g^T E h) with E a matrix of rationals mod 1.
    """

    __slots__ = ("left", "right", "matrix")

    def __init__(self, left: FinAbGroup, right: FinAbGroup, matrix):
        self.left = left
        self.right = right
        E = tuple(
            tuple(mod1(matrix[i][j]) for j in range(right.rank))
            for i in range(left.rank)
        )
        for i, n in enumerate(left.factors):
            for j, m in enumerate(right.factors):
                if (n * E[i][j]).denominator != 1 or (E[i][j] * m).denominator != 1:
                    raise ValueError("entry denominators must divide both factor pairs")
        self.matrix = E

    @property
    def is_square(self) -> bool:
        return self.left == self.right

    def phase(self, g, h) -> Fraction:
        g = self.left.reduce(g)
        h = self.right.reduce(h)
        total = Fraction(0)
        for i, gi in enumerate(g):
            if gi:
                row = self.matrix[i]
                total += gi * sum(row[j] * h[j] for j in range(len(h)) if h[j])
        return mod1(total)

    def eval(self, g, h) -> Cyclotomic:
        return rational_phase(self.phase(g, h))

    def is_symmetric(self) -> bool:
        if not self.is_square:
            return False
        E = self.matrix
        return all(
            E[i][j] == E[j][i] for i in range(len(E)) for j in range(i + 1, len(E))
        )

    def is_alternating(self) -> bool:
        if not self.is_square:
            return False
        E = self.matrix
        t = len(E)
        return all(E[i][i] == 0 for i in range(t)) and all(
            mod1(E[i][j] + E[j][i]) == 0 for i in range(t) for j in range(i + 1, t)
        )

    def transpose(self) -> "Pairing":
        return Pairing(
            self.right,
            self.left,
            [
                [self.matrix[i][j] for i in range(self.left.rank)]
                for j in range(self.right.rank)
            ],
        )

    def conj(self) -> "Pairing":
        return Pairing(self.left, self.right, [[-x for x in row] for row in self.matrix])

    def row_character(self, g) -> Character:
        """gamma(g, .) as a character of the right group."""
        g = self.left.reduce(g)
        exps = []
        for j, m in enumerate(self.right.factors):
            r = sum(g[i] * self.matrix[i][j] for i in range(len(g)))
            exps.append(int(r * m) % m)
        return Character(self.right, exps)

    def _radical(self, side: str) -> Subgroup:
        E = self.matrix if side == "left" else [
            [self.matrix[i][j] for i in range(self.left.rank)]
            for j in range(self.right.rank)
        ]
        grp = self.left if side == "left" else self.right
        other_rank = self.right.rank if side == "left" else self.left.rank
        rows, moduli = [], []
        for j in range(other_rank):
            col = [E[i][j] for i in range(grp.rank)]
            d = lcm(1, *(c.denominator for c in col))
            rows.append([int(c * d) for c in col])
            moduli.append(d)
        return congruence_kernel(grp, rows, moduli)

    def radical(self) -> Subgroup:
        return self._radical("left")

    def right_radical(self) -> Subgroup:
        return self._radical("right")

    def is_nondegenerate(self) -> bool:
        return self.radical().order == 1 and self.right_radical().order == 1

    def perp(self, H: Subgroup) -> Subgroup:
        """{g in left : gamma(g, h) = 1 for all h in H}, H a subgroup of right."""
        if H.ambient != self.right:
            raise ValueError("subgroup of the wrong group")
        rows, moduli = [], []
        for h in H.gens():
            col = [
                sum(self.matrix[i][j] * h[j] for j in range(len(h)))
                for i in range(self.left.rank)
            ]
            d = lcm(1, *(Fraction(c).denominator for c in col))
            rows.append([int(c * d) for c in col])
            moduli.append(d)
        return congruence_kernel(self.left, rows, moduli)

    def pull_back(self, JL: FinAbGroup, JR: FinAbGroup, embedL, embedR) -> "Pairing":
        """Pairing obtained by composing with coordinate maps into each side."""
        M = [
            [self.phase(embedL(ei), embedR(ej)) for ej in _basis(JR)]
            for ei in _basis(JL)
        ]
        return Pairing(JL, JR, M)

    def key(self):
        return (self.left.factors, self.right.factors, self.matrix)

    def __eq__(self, other):
        return isinstance(other, Pairing) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Pairing({self.left}, {self.right}, {self.matrix})"

    def to_json(self):
        return {
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "E": [[str(x) for x in row] for row in self.matrix],
        }

    @staticmethod
    def from_json(obj) -> "Pairing":
        return Pairing(
            FinAbGroup(obj["left"]["factors"]),
            FinAbGroup(obj["right"]["factors"]),
            [[Fraction(s) for s in row] for row in obj["E"]],
        )


class AlternatingPairing(Pairing):
    """Square pairing with gamma(g, h) = conj(gamma(h, g)) and gamma(g, g) = 1."""

    __slots__ = ()

    def __init__(self, group: FinAbGroup, matrix):
        super().__init__(group, group, matrix)
        if not self.is_alternating():
            raise ValueError("pairing is not alternating")

    @property
    def group(self) -> FinAbGroup:
        return self.left


def _basis(G: FinAbGroup):
    t = G.rank
    return [tuple(int(i == j) for j in range(t)) for i in range(t)]


def standard_pairing(G: FinAbGroup) -> Pairing:
    t = G.rank
    return Pairing(
        G, G, [[Fraction(1, G.factors[i]) if i == j else 0 for j in range(t)] for i in range(t)]
    )


def zero_pairing(left: FinAbGroup, right: FinAbGroup | None = None) -> Pairing:
    right = left if right is None else right
    return Pairing(left, right, [[0] * right.rank for _ in range(left.rank)])


def pairing_radical(p: Pairing) -> Subgroup:
    if not p.is_square:
        raise ValueError("radical of a square pairing only")
    return p.radical()


class QuadraticForm:
    """q: G -> roots of unity stored as the full table of exponents mod 1."""

    __slots__ = ("group", "table", "_polar")

    def __init__(self, group: FinAbGroup, table, check=True):
        self.group = group
        self.table = {g: mod1(v) for g, v in table.items()}
        self._polar = None
        if check:
            self._validate()

    def _validate(self):
        G = self.group
        elems = G.elements()
        if set(self.table) != set(elems):
            raise ValueError("table must cover the group exactly")
        if self.table[G.zero()] != 0:
            raise ValueError("q(0) must be 1")
        for g in elems:
            if self.table[g] != self.table[G.neg(g)]:
                raise ValueError("q(-g) = q(g) fails")
        pol = self.polarization()
        for g in elems:
            for h in elems:
                lhs = mod1(self.table[g] + self.table[h] - self.table[G.add(g, h)])
                if lhs != pol.phase(g, h):
                    raise ValueError("polarization is not biadditive")

    def phase(self, g) -> Fraction:
        return self.table[self.group.reduce(g)]

    def eval(self, g) -> Cyclotomic:
        return rational_phase(self.phase(g))

    def polarization(self) -> Pairing:
        if self._polar is None:
            G = self.group
            basis = _basis(G)
            E = [
                [
                    mod1(self.table[ei] + self.table[ej] - self.table[G.add(ei, ej)])
                    for ej in basis
                ]
                for ei in basis
            ]
            self._polar = Pairing(G, G, E)
        return self._polar

    def pair_phase(self, g, h) -> Fraction:
        """Exponent of the polarization pairing at (g, h)."""
        G = self.group
        return mod1(self.table[G.reduce(g)] + self.table[G.reduce(h)] - self.table[G.add(g, h)])

    def times_character(self, chi: Character) -> "QuadraticForm":
        """Pointwise product with a character of order at most 2."""
        if chi.ambient != self.group:
            raise ValueError("character on the wrong group")
        table = {g: mod1(v + chi.phase(g)) for g, v in self.table.items()}
        return QuadraticForm(self.group, table)

    def conj(self) -> "QuadraticForm":
        return QuadraticForm(self.group, {g: mod1(-v) for g, v in self.table.items()}, check=False)

    def direct_sum(self, other: "QuadraticForm") -> "QuadraticForm":
        """Orthogonal sum, renormalized to invariant-factor coordinates."""
        raw = self.group.factors + other.group.factors
        G, _, from_c = canonical_presentation(raw)
        k1 = self.group.rank
        table = {}
        for g in G.elements():
            x = tuple(
                sum(from_c[r][j] * g[j] for j in range(len(g))) % raw[r]
                for r in range(len(raw))
            )
            table[g] = mod1(self.table[self.group.reduce(x[:k1])] + other.table[other.group.reduce(x[k1:])])
        return QuadraticForm(G, table, check=False)

    def key(self):
        return (self.group.factors, tuple(sorted(self.table.items())))

    def __eq__(self, other):
        return isinstance(other, QuadraticForm) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        vals = ", ".join(f"{g}:{v}" for g, v in sorted(self.table.items()))
        return f"QuadraticForm({self.group}, {{{vals}}})"

    def to_json(self):
        return {
            "group": self.group.to_json(),
            "values": [str(self.table[g]) for g in sorted(self.group.elements())],
        }

    @staticmethod
    def from_json(obj) -> "QuadraticForm":
        G = FinAbGroup(obj["group"]["factors"])
        elems = sorted(G.elements())
        if len(obj["values"]) != len(elems):
            raise ValueError("value array length must equal the group order")
        return QuadraticForm(G, {g: Fraction(s) for g, s in zip(elems, obj["values"])})


def polarization(q: QuadraticForm) -> Pairing:
    return q.polarization()


def forms_for_pairing(gamma: Pairing) -> list[QuadraticForm]:
    """All quadratic forms whose polarization is the given pairing."""
    if not gamma.is_square or not gamma.is_symmetric():
        raise ValueError("need a symmetric pairing on a single group")
    if not gamma.is_nondegenerate():
        raise ValueError("need a nondegenerate pairing")
    G = gamma.left
    n = G.factors
    E = gamma.matrix
    diag = []
    for i, ni in enumerate(n):
        if ni % 2:
            diag.append(mod1(E[i][i] * ((ni - 1) // 2)))
        else:
            diag.append(mod1(-E[i][i] / 2))
    base = {}
    for g in G.elements():
        v = sum(g[i] * g[i] * diag[i] for i in range(len(g)))
        v -= sum(
            g[i] * g[j] * E[i][j]
            for i in range(len(g))
            for j in range(i + 1, len(g))
        )
        base[g] = mod1(v)
    out = []
    two_torsion = [i for i, ni in enumerate(n) if ni % 2 == 0]
    for bits in itertools.product((0, 1), repeat=len(two_torsion)):
        exps = [0] * G.rank
        for b, i in zip(bits, two_torsion):
            exps[i] = b * (n[i] // 2)
        chi = Character(G, exps)
        out.append(
            QuadraticForm(G, {g: mod1(base[g] + chi.phase(g)) for g in base})
        )
    out.sort(key=lambda q: q.key())
    return out


def gauss_sum(q: QuadraticForm):
    """(sum, normalized, signature mod 8) of sum_g q(g)."""
    G = q.group
    total = Cyclotomic.zero()
    for g in G.elements():
        total = total + q.eval(g)
    norm = (total * total.conj()).as_rational()
    if norm != G.order:
        raise ValueError("Gauss sum magnitude is not sqrt(|G|); form is degenerate")
    normalized = total / sqrt_nonneg_int(G.order)
    for sigma in range(8):
        if normalized == root_of_unity(8, sigma):
            return total, normalized, sigma
    raise ValueError("normalized Gauss sum is not an 8th root of unity")


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _eps_unit(n: int) -> Cyclotomic:
    # 1 when n = 1 mod 4, -i when n = 3 mod 4
    if n % 4 == 1:
        return Cyclotomic.one()
    if n % 4 == 3:
        return -root_of_unity(4, 1)
    raise ValueError("n must be odd")


def indecomposable_form(descriptor: str):
    """(QuadraticForm, x_cubed) for one indecomposable descriptor.

    Grammar: "p^k_s" with p an odd prime and s one of +,-;
    "2^k_m" with m in {1,-1,3,-3}; "2^k2^k_i" and "2^k2^k_ii".
    Products join descriptors with " x ".
    """
    desc = descriptor.strip()
    if " x " in desc or "*" in desc:
        parts = desc.replace("*", " x ").split(" x ")
        q, x3 = indecomposable_form(parts[0])
        for part in parts[1:]:
            q2, x32 = indecomposable_form(part)
            q = q.direct_sum(q2)
            x3 = x3 * x32
        return q, x3
    try:
        head, sub = desc.rsplit("_", 1)
    except ValueError:
        raise ValueError(f"bad descriptor {descriptor!r}") from None
    if head.count("^") == 2:
        # pair type 2^k2^k
        half = head[: len(head) // 2]
        if half * 2 != head or not half.startswith("2^"):
            raise ValueError(f"bad descriptor {descriptor!r}")
        k = int(half[2:])
        if k < 1:
            raise ValueError(f"bad descriptor {descriptor!r}")
        N = 2**k
        G = FinAbGroup((N, N))
        if sub == "i":
            table = {g: mod1(Fraction(g[0] * g[1], N)) for g in G.elements()}
            x3 = Cyclotomic.one()
        elif sub == "ii":
            table = {
                g: mod1(Fraction(g[0] * g[0] + g[0] * g[1] + g[1] * g[1], N))
                for g in G.elements()
            }
            x3 = Cyclotomic.from_rational(Fraction((-1) ** k))
        else:
            raise ValueError(f"bad descriptor {descriptor!r}")
        return QuadraticForm(G, table), x3
    try:
        p_str, k_str = head.split("^")
        p, k = int(p_str), int(k_str)
    except ValueError:
        raise ValueError(f"bad descriptor {descriptor!r}") from None
    if k < 1:
        raise ValueError(f"bad descriptor {descriptor!r}")
    if p == 2:
        m = int(sub)
        if m not in (1, -1, 3, -3):
            raise ValueError(f"bad descriptor {descriptor!r}")
        N = 2**k
        G = FinAbGroup((N,))
        table = {g: mod1(Fraction(m * g[0] * g[0], 2 * N)) for g in G.elements()}
        eps = -1 if (k % 2 == 1 and m % 8 in (3, 5)) else 1
        x3 = Cyclotomic.from_rational(Fraction(eps)) * root_of_unity(8, -m)
        return QuadraticForm(G, table), x3
    if p < 3 or p % 2 == 0 or any(p % d == 0 for d in range(3, int(p**0.5) + 1, 2)):
        raise ValueError(f"p must be an odd prime in {descriptor!r}")
    if sub in ("+", "+1", "1"):
        s = 1
    elif sub in ("-", "-1"):
        s = -1
    else:
        raise ValueError(f"bad descriptor {descriptor!r}")
    if s == 1:
        m = 1
    else:
        m = next(a for a in range(2, p) if _legendre(a, p) == -1)
    N = p**k
    G = FinAbGroup((N,))
    table = {g: mod1(Fraction(m * g[0] * g[0], N)) for g in G.elements()}
    x3 = _eps_unit(N) if s**k == 1 else _eps_unit(N) * Cyclotomic.from_rational(Fraction(-1))
    return QuadraticForm(G, table), x3


def forms_equivalent(q1: QuadraticForm, q2: QuadraticForm):
    """An automorphism alpha with q1(alpha(g)) = q2(g) for all g, if one exists."""
    if q1.group != q2.group:
        return None
    for alpha in automorphisms(q1.group):
        if all(q1.phase(alpha.apply(g)) == q2.phase(g) for g in q1.group.elements()):
            return alpha
    return None


def alternating_pairings(G: FinAbGroup) -> list[AlternatingPairing]:
    """All alternating pairings; count is prod over i<j of n_j."""
    t = G.rank
    n = G.factors
    pairs = [(i, j) for i in range(t) for j in range(i + 1, t)]
    count = prod(n[j] for _, j in pairs) if pairs else 1
    if count > 10**6:
        raise GuardError(f"alternating pairing count {count} exceeds guard")
    out = []
    for choice in itertools.product(*[range(n[j]) for _, j in pairs]):
        E = [[Fraction(0)] * t for _ in range(t)]
        for (i, j), c in zip(pairs, choice):
            E[i][j] = Fraction(c, n[j])
            E[j][i] = mod1(-E[i][j])
        out.append(AlternatingPairing(G, E))
    return out


def pairing_image_data(eps: Pairing):
    """(J0, kernel) with: phi in image of eps iff J0 is in ker(phi).

    J0 is the right radical (common kernel of all eps(g)); kernel is the left
    radical.
    """
    return eps.right_radical(), eps.radical()
