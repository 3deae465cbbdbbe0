"""Invariants built from invertible simples: discrete torsion and products.

A parameter is a quaternionic-free subgroup of the current group together
with an alternating pairing twisting its canonical bilinear base form.  The
invariant matrix is supported on current orbits and its entries count
stabilizers.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm, prod

from .abelian import Character, FinAbGroup, Subgroup, all_subgroups, subgroup_group
from .forms import AlternatingPairing, Pairing, mod1, pairing_image_data
from .modular import ModularData, ModularInvariant, mat_mul, simple_currents
from .scalars import Cyclotomic, rational_phase


def phase_fraction(x: Cyclotomic) -> Fraction:
    """The rational r with x = exp(2 pi i r); x must be a root of unity."""
    m = lcm(2, x.order)
    for k in range(m):
        r = Fraction(k, m)
        if x == rational_phase(r):
            return r
    raise ValueError("not a root of unity")


def _chain_embed(group: FinAbGroup, chain):
    def embed(y):
        out = group.zero()
        for c, h in zip(y, chain):
            out = group.add(out, group.scale(c, h))
        return out

    return embed


def _canonical_chain(sc, J: Subgroup):
    Jab, embed, _ = subgroup_group(J)
    basis = [
        tuple(1 if i == k else 0 for i in range(Jab.rank)) for k in range(Jab.rank)
    ]
    return Jab, [embed(e) for e in basis]


def _check_chain(sc, J: Subgroup, chain):
    orders = [sc.group.element_order(h) for h in chain]
    for a, b in zip(orders, orders[1:]):
        if a % b:
            raise ValueError("chain orders must form a divisibility tower")
    if prod(orders) != J.order or Subgroup(sc.group, chain) != J:
        raise ValueError("chain does not generate the subgroup")
    return FinAbGroup(tuple(orders))


def _quaternionic_guard(sc, J: Subgroup):
    for j in J.elements():
        if sc.is_quaternionic(j):
            order = sc.group.element_order(j)
            raise ValueError(
                f"current {j} is quaternionic: twist ratio to the power {order} is -1"
            )


def base_epsilon(md: ModularData, J: Subgroup, chain=None) -> Pairing:
    """Canonical bilinear form on the subgroup from its generator chain."""
    sc = simple_currents(md)
    return _base_epsilon(sc, J, chain)[2]


def _base_epsilon(sc, J: Subgroup, chain=None):
    if J.ambient != sc.group:
        raise ValueError("subgroup must live in the current group")
    _quaternionic_guard(sc, J)
    if chain is None:
        Jab, chain = _canonical_chain(sc, J)
    else:
        chain = [sc.group.reduce(h) for h in chain]
        Jab = _check_chain(sc, J, chain)
    s = Jab.rank
    tw = [phase_fraction(sc.q(h)) for h in chain]
    mono = [
        [phase_fraction(sc.grading(sc.label_index[ha], hb)) for hb in chain]
        for ha in chain
    ]
    matrix = [
        [
            mod1(tw[a] if a == b else (-mono[a][b] if a > b else Fraction(0)))
            for b in range(s)
        ]
        for a in range(s)
    ]
    return Jab, chain, Pairing(Jab, Jab, matrix)


class SCParam:
    """Current subgroup with a validated torsion form."""

    __slots__ = ("sc", "J", "group", "chain", "psi", "epsilon", "phi")

    def __init__(self, sc, J, group, chain, psi, epsilon, phi=None):
        self.sc = sc
        self.J = J
        self.group = group
        self.chain = chain
        self.psi = psi
        self.epsilon = epsilon
        self.phi = phi
        self._validate()

    def embed(self, y):
        return _chain_embed(self.sc.group, self.chain)(y)

    def _validate(self):
        sc = self.sc
        embed = _chain_embed(sc.group, self.chain)
        elems = list(self.group.elements())
        for y in elems:
            j = embed(y)
            if self.epsilon.phase(y, y) != phase_fraction(sc.q(j)):
                raise ValueError("diagonal of epsilon must match the twists")
        for y in elems:
            jy = embed(y)
            for z in elems:
                total = mod1(
                    phase_fraction(sc.grading(sc.label_index[embed(z)], jy))
                    + self.epsilon.phase(y, z)
                    + self.epsilon.phase(z, y)
                )
                if total != 0:
                    raise ValueError("epsilon is not balanced against the monodromy")

    def to_json(self):
        return {
            "J": [list(g) for g in self.J.gens()],
            "psi": self.psi.to_json(),
            "phi": list(self.phi.exponents) if self.phi is not None else None,
        }


def make_epsilon(
    md: ModularData, J: Subgroup, psi: AlternatingPairing | None = None, chain=None
) -> SCParam:
    """Torsion parameter with epsilon = psi plus the canonical base form."""
    sc = simple_currents(md)
    Jab, chain, base = _base_epsilon(sc, J, chain)
    if psi is None:
        psi = AlternatingPairing(Jab, [[Fraction(0)] * Jab.rank for _ in range(Jab.rank)])
    if psi.left.factors != Jab.factors:
        raise ValueError("psi must live on the subgroup's chain group")
    matrix = [
        [mod1(base.matrix[i][j] + psi.matrix[i][j]) for j in range(Jab.rank)]
        for i in range(Jab.rank)
    ]
    return SCParam(sc, J, Jab, chain, psi, Pairing(Jab, Jab, matrix))


def param_from_epsilon(md: ModularData, J: Subgroup, epsilon: Pairing, chain=None) -> SCParam:
    """Rebase a raw epsilon; its offset from the base form must alternate."""
    sc = simple_currents(md)
    Jab, chain, base = _base_epsilon(sc, J, chain)
    if epsilon.left.factors != Jab.factors:
        raise ValueError("epsilon must live on the subgroup's chain group")
    diff = [
        [mod1(epsilon.matrix[i][j] - base.matrix[i][j]) for j in range(Jab.rank)]
        for i in range(Jab.rank)
    ]
    psi = AlternatingPairing(Jab, diff)
    return SCParam(sc, J, Jab, chain, psi, epsilon)


def _matrix_from_epsilon(md: ModularData, sc, group, embed, eps: Pairing):
    n = md.dim
    elems = list(group.elements())
    eps_cyc = {
        y: {z: rational_phase(eps.phase(y, z)) for z in elems} for y in elems
    }
    J0ab, _ = pairing_image_data(eps)
    j0_elems = [embed(y) for y in J0ab.elements()]
    M = [[0] * n for _ in range(n)]
    for a in range(n):
        charge = {z: sc.grading(a, embed(z)) for z in elems}
        orbit = {sc.action_table[j0][a] for j0 in j0_elems}
        value = J0ab.order // len(orbit)
        for y in elems:
            if all(charge[z] == eps_cyc[y][z] for z in elems):
                b = sc.action_table[embed(y)][a]
                M[a][b] = value
    return M


def sc_matrix(md: ModularData, param: SCParam) -> ModularInvariant:
    """Invariant supported on current orbits selected by the torsion form."""
    embed = _chain_embed(param.sc.group, param.chain)
    M = _matrix_from_epsilon(md, param.sc, param.group, embed, param.epsilon)
    return ModularInvariant(M, {"source": "sc", "J": param.J.key()})


def s_only_matrix(
    md: ModularData,
    J: Subgroup,
    psi: AlternatingPairing | None = None,
    phi: Character | None = None,
    chain=None,
):
    """S-commuting matrix from a sign-twisted chain; T-commutation may fail."""
    sc = simple_currents(md)
    Jab, chain, base = _base_epsilon(sc, J, chain)
    rank = Jab.rank
    if psi is None:
        psi = AlternatingPairing(Jab, [[Fraction(0)] * rank for _ in range(rank)])
    matrix = [
        [mod1(base.matrix[i][j] + psi.matrix[i][j]) for j in range(rank)]
        for i in range(rank)
    ]
    if phi is not None:
        if phi.ambient.factors != Jab.factors:
            raise ValueError("phi must be a character of the chain group")
        for i in range(rank):
            basis = tuple(1 if k == i else 0 for k in range(rank))
            p = phi.phase(basis)
            if mod1(2 * p) != 0:
                raise ValueError("phi must square to the trivial character")
            matrix[i][i] = mod1(matrix[i][i] + p)
    eps = Pairing(Jab, Jab, matrix)
    embed = _chain_embed(sc.group, chain)
    M = _matrix_from_epsilon(md, sc, Jab, embed, eps)
    Z = [[Cyclotomic.from_rational(Fraction(x)) for x in row] for row in M]
    SZ = mat_mul(md.S, Z)
    ZS = mat_mul(Z, md.S)
    n = md.dim
    if any(SZ[i][j] != ZS[i][j] for i in range(n) for j in range(n)):
        raise ValueError("matrix does not commute with S")
    return tuple(tuple(row) for row in M)


class SCEnumeration:
    """All torsion parameters of a modular datum with their matrices."""

    __slots__ = ("entries", "collisions", "sufficiently_nonzero")

    def __init__(self, entries, collisions, suff):
        self.entries = entries
        self.collisions = collisions
        self.sufficiently_nonzero = suff

    def matrices(self):
        out = []
        for _, z in self.entries:
            if z not in out:
                out.append(z)
        return out

    def matrix_set(self):
        return {z.matrix for _, z in self.entries}


def enumerate_sc(md: ModularData) -> SCEnumeration:
    """Every quaternionic-free subgroup with every alternating twist."""
    from .forms import alternating_pairings

    sc = simple_currents(md)
    entries = []
    for J in all_subgroups(sc.group):
        if any(sc.is_quaternionic(j) for j in J.elements()):
            continue
        Jab, chain = _canonical_chain(sc, J)
        for psi in alternating_pairings(Jab):
            param = make_epsilon(md, J, psi)
            entries.append((param, sc_matrix(md, param)))
    by_matrix: dict = {}
    for param, z in entries:
        by_matrix.setdefault(z.matrix, []).append(param)
    collisions = [group for group in by_matrix.values() if len(group) > 1]
    if sc.sufficiently_nonzero and collisions:
        raise ValueError("duplicate invariants despite separating charges")
    return SCEnumeration(entries, collisions, sc.sufficiently_nonzero)


def invariant_product(md: ModularData, Z1: ModularInvariant, Z2: ModularInvariant):
    """(overlap count, normalized product with the second factor transposed)."""
    n = md.dim
    count = sum(
        1 for a in range(n) if Z1.matrix[md.unit][a] and Z2.matrix[md.unit][a]
    )
    if count == 0:
        raise ValueError("invariants share no unit-row support")
    prod_matrix = [
        [
            sum(Z1.matrix[i][k] * Z2.matrix[j][k] for k in range(n))
            for j in range(n)
        ]
        for i in range(n)
    ]
    out = []
    for row in prod_matrix:
        new = []
        for x in row:
            if x % count:
                raise ValueError("product is not divisible by the overlap count")
            new.append(x // count)
        out.append(new)
    return count, ModularInvariant(out, {"source": "product"})
