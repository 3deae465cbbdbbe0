"""Tambara-Yamagami categories over a finite abelian group with a pairing.

A datum here is a finite abelian group together with a nondegenerate
symmetric pairing and a sign.  From it the module builds the fusion ring
with one non-invertible simple, the associator table with an exhaustive
pentagon checker, exact modular data for the center construction and for
the parity equivariantization, module-category annular matrices, the
transport of pointed invariants through the branching rules, and the
grafted near-group fusion ring.

All scalar output is exact cyclotomic arithmetic; nothing here is floating
point except the Perron eigenvalue helper on fusion rings.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .abelian import FinAbGroup, Subgroup, quotient, subgroup_group
from .forms import (
    AlternatingPairing,
    Pairing,
    QuadraticForm,
    forms_for_pairing,
    gauss_sum,
    mod1,
    standard_pairing,
)
from .modular import ModularData, ModularInvariant, simple_currents
from .pointed import PointedData, weil
from .scalars import Cyclotomic, rational_phase, root_of_unity, sqrt_nonneg_int
from .simple_current import make_epsilon, sc_matrix


class TYData:
    """Group with a nondegenerate symmetric pairing and a sign choice."""

    __slots__ = ("G", "pairing", "sign")

    def __init__(self, G: FinAbGroup, pairing: Pairing, sign: int):
        if pairing.left is not G and pairing.left != G:
            raise ValueError("pairing must live on the given group")
        if not pairing.is_symmetric():
            raise ValueError("pairing must be symmetric")
        if not pairing.is_nondegenerate():
            raise ValueError("pairing must be nondegenerate")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.G = G
        self.pairing = pairing
        self.sign = sign


# -- fusion rings --------------------------------------------------------------


class FusionRing:
    """Based ring with nonnegative integer structure constants."""

    __slots__ = ("labels", "unit", "table", "_index")

    def __init__(self, labels, unit, table):
        self.labels = list(labels)
        self.unit = unit
        self.table = table
        self._index = {la: k for k, la in enumerate(self.labels)}

    def product(self, a, b) -> dict:
        return dict(self.table[(a, b)])

    def structure_constants(self) -> dict:
        return {
            (a, b): dict(self.table[(a, b)])
            for a in self.labels
            for b in self.labels
        }

    def is_commutative(self) -> bool:
        return all(
            self.table[(a, b)] == self.table[(b, a)]
            for a in self.labels
            for b in self.labels
        )

    def is_associative(self) -> bool:
        return self.first_associativity_failure() is None

    def first_associativity_failure(self):
        for a in self.labels:
            for b in self.labels:
                ab = self.table[(a, b)]
                for c in self.labels:
                    left: dict = {}
                    for m, k in ab.items():
                        for t, k2 in self.table[(m, c)].items():
                            left[t] = left.get(t, 0) + k * k2
                    right: dict = {}
                    for m, k in self.table[(b, c)].items():
                        for t, k2 in self.table[(a, m)].items():
                            right[t] = right.get(t, 0) + k * k2
                    left = {t: k for t, k in left.items() if k}
                    right = {t: k for t, k in right.items() if k}
                    if left != right:
                        return (a, b, c, left, right)
        return None

    def has_nonnegative_constants(self) -> bool:
        return all(
            k >= 0 for out in self.table.values() for k in out.values()
        )

    def perron_dimension(self, label) -> float:
        """Largest eigenvalue of the multiplication matrix, by power iteration.

        Iterates on the matrix plus the identity so that bipartite action
        patterns still converge, then shifts the estimate back.
        """
        n = len(self.labels)
        M = [[0.0] * n for _ in range(n)]
        for a, la in enumerate(self.labels):
            out = self.table[(label, la)]
            for lc, k in out.items():
                M[a][self._index[lc]] = float(k)
        for i in range(n):
            M[i][i] += 1.0
        v = [1.0] * n
        est = 1.0
        for _ in range(300):
            w = [sum(M[i][j] * v[j] for j in range(n)) for i in range(n)]
            norm = max(abs(x) for x in w)
            if norm == 0.0:
                return 0.0
            v = [x / norm for x in w]
            est = norm
        return est - 1.0


def ty_fusion(G: FinAbGroup) -> FusionRing:
    """Fusion ring on the invertibles of G plus one self-dual simple.

    The non-invertible simple absorbs every invertible and squares to the
    sum of all of them.
    """
    els = G.elements()
    labels = [("inv", g) for g in els] + [("root",)]
    root = ("root",)
    table = {}
    for g in els:
        for h in els:
            table[(("inv", g), ("inv", h))] = {("inv", G.add(g, h)): 1}
        table[(("inv", g), root)] = {root: 1}
        table[(root, ("inv", g))] = {root: 1}
    table[(root, root)] = {("inv", g): 1 for g in els}
    return FusionRing(labels, ("inv", G.zero()), table)


# -- associators and the pentagon ---------------------------------------------


def ty_associator(data: TYData) -> dict:
    """Associator components in the path basis, keyed by ordered triples.

    Entry format: table[(X, Y, Z)][(total, left_mid, right_mid)] is the
    scalar relating the two parenthesizations, where left_mid runs over
    X*Y and right_mid over Y*Z.  Components not forced away from 1 by the
    pairing or the sign are stored explicitly as 1.
    """
    G = data.G
    fus = ty_fusion(G)
    pair = data.pairing
    inv_rt = sqrt_nonneg_int(G.order).inverse()

    def phase(g, h):
        return rational_phase(mod1(pair.phase(g, h)))

    table: dict = {}
    for X in fus.labels:
        for Y in fus.labels:
            for Z in fus.labels:
                comp: dict = {}
                for p in fus.product(X, Y):
                    for t in fus.product(p, Z):
                        for m in fus.product(Y, Z):
                            if t not in fus.product(X, m):
                                continue
                            if X[0] == "inv" and Y[0] == "root" and Z[0] == "inv":
                                val = phase(X[1], Z[1])
                            elif X[0] == "root" and Y[0] == "inv" and Z[0] == "root":
                                val = phase(Y[1], t[1])
                            elif X[0] == "root" and Y[0] == "root" and Z[0] == "root":
                                val = (
                                    phase(p[1], m[1]).conj()
                                    * inv_rt
                                    * Fraction(data.sign)
                                )
                            else:
                                val = Cyclotomic.one()
                            comp[(t, p, m)] = val
                table[(X, Y, Z)] = comp
    return table


def _compose(f: dict, g: dict) -> dict:
    """Composition g after f for sparse maps src -> {dst: scalar}."""
    out: dict = {}
    for src, row in f.items():
        acc = out.setdefault(src, {})
        for mid, c1 in row.items():
            for dst, c2 in g.get(mid, {}).items():
                acc[dst] = acc.get(dst, Cyclotomic.zero()) + c1 * c2
    return out


def pentagon_check(fusion: FusionRing, associators: dict):
    """Exhaustively verify coherence over all ordered quadruples.

    Returns (True, None) on success, else (False, witness) where the
    witness records the quadruple, the path pair, and both scalars.
    """
    for key, out in fusion.table.items():
        if any(k > 1 for k in out.values()):
            raise ValueError("pentagon path basis requires multiplicity-free fusion")

    def comp(X, Y, Z, t, p, m):
        return associators[(X, Y, Z)][(t, p, m)]

    labels = fusion.labels
    prod = fusion.product
    for X in labels:
        for Y in labels:
            for Z in labels:
                for W in labels:
                    b1 = [
                        (p, q, r)
                        for p in prod(X, Y)
                        for q in prod(p, Z)
                        for r in prod(q, W)
                    ]
                    a1 = {
                        (p, q, r): {
                            (m, q, r): comp(X, Y, Z, q, p, m)
                            for m in prod(Y, Z)
                            if q in prod(X, m)
                        }
                        for (p, q, r) in b1
                    }
                    a2 = {}
                    for row in a1.values():
                        for (m, q, r) in row:
                            a2[(m, q, r)] = {
                                (m, w, r): comp(X, m, W, r, q, w)
                                for w in prod(m, W)
                                if r in prod(X, w)
                            }
                    a3 = {}
                    for row in a2.values():
                        for (m, w, r) in row:
                            a3[(m, w, r)] = {
                                (n, w, r): comp(Y, Z, W, w, m, n)
                                for n in prod(Z, W)
                                if w in prod(Y, n)
                            }
                    b_1 = {
                        (p, q, r): {
                            (p, n, r): comp(p, Z, W, r, q, n)
                            for n in prod(Z, W)
                            if r in prod(p, n)
                        }
                        for (p, q, r) in b1
                    }
                    b_2 = {}
                    for row in b_1.values():
                        for (p, n, r) in row:
                            b_2[(p, n, r)] = {
                                (n, w, r): comp(X, Y, n, r, p, w)
                                for w in prod(Y, n)
                                if r in prod(X, w)
                            }
                    lhs = _compose(_compose(a1, a2), a3)
                    rhs = _compose(b_1, b_2)
                    for src in b1:
                        lrow = {k: v for k, v in lhs.get(src, {}).items() if not v.is_zero()}
                        rrow = {k: v for k, v in rhs.get(src, {}).items() if not v.is_zero()}
                        keys = set(lrow) | set(rrow)
                        for dst in keys:
                            lv = lrow.get(dst, Cyclotomic.zero())
                            rv = rrow.get(dst, Cyclotomic.zero())
                            if lv != rv:
                                return False, ((X, Y, Z, W), src, dst, lv, rv)
    return True, None


# -- square-root conventions ---------------------------------------------------


def _half_phase(r: Fraction) -> Cyclotomic:
    return rational_phase(mod1(r) / 2)


def _anchor_phase(q: QuadraticForm, sign: int) -> Fraction:
    pd = PointedData(q)
    return mod1(Fraction(-pd.signature, 8) + (Fraction(0) if sign == 1 else Fraction(1, 2)))


class SqrtConvention:
    """Chosen square roots of the form values and of the anchor unit.

    root[g] squares to the form value at g; inv_anchor squares to the
    inverse of (sign times the cube of the 24th-root normalization).
    """

    __slots__ = ("q", "sign", "root", "inv_anchor")

    def __init__(self, q: QuadraticForm, sign: int, root: dict, inv_anchor: Cyclotomic):
        for g in q.group.elements():
            if root[g] * root[g] != q.eval(g):
                raise ValueError(f"root at {g} does not square to the form value")
        target = rational_phase(mod1(-_anchor_phase(q, sign)))
        if inv_anchor * inv_anchor != target:
            raise ValueError("anchor root does not square to the anchor unit")
        self.q = q
        self.sign = sign
        self.root = dict(root)
        self.inv_anchor = inv_anchor

    @classmethod
    def canonical(cls, q: QuadraticForm, sign: int) -> "SqrtConvention":
        """Half the canonical phase in [0, 1) for every square root."""
        root = {g: _half_phase(q.phase(g)) for g in q.group.elements()}
        return cls(q, sign, root, _half_phase(-_anchor_phase(q, sign)))

    @classmethod
    def fusion_faithful(cls, q: QuadraticForm, sign: int) -> "SqrtConvention":
        """Root signs aligned so index arithmetic matches the fusion ring.

        Only defined for groups of odd order, where halving is invertible.
        """
        G = q.group
        if G.exponent % 2 == 0:
            raise ValueError("faithful roots need a group of odd order")
        P = q.polarization()
        inv2 = pow(2, -1, G.exponent) if G.exponent > 1 else 1
        root = {}
        for h in G.elements():
            g = G.scale(inv2, h)
            ph = mod1(P.phase(g, g)) + Fraction(mod1(q.phase(h)), 2)
            tau = 1 if rational_phase(mod1(ph)).is_one() else -1
            root[h] = _half_phase(q.phase(h)) * tau
        return cls(q, sign, root, _half_phase(-_anchor_phase(q, sign)))

    def flip(self, g) -> "SqrtConvention":
        root = dict(self.root)
        root[g] = root[g] * Fraction(-1)
        return SqrtConvention(self.q, self.sign, root, self.inv_anchor)

    def anchor_flipped(self) -> "SqrtConvention":
        return SqrtConvention(
            self.q, self.sign, self.root, self.inv_anchor * Fraction(-1)
        )


# -- modular data for the center construction ----------------------------------


def shifted_pair_sum(q: QuadraticForm, a) -> Cyclotomic:
    """Sum of the pairing phases at (l - a, l) over the whole group."""
    G = q.group
    P = q.polarization()
    a = G.reduce(a)
    total = Cyclotomic.zero()
    for l in G.elements():
        total = total + rational_phase(mod1(P.phase(G.sub(l, a), l)))
    return total


def shifted_pair_sum_closed(descriptor: str, a: int) -> Cyclotomic:
    """Closed form of the shifted sum for a single indecomposable factor.

    Supports the odd prime-power types "p^k_s" and the cyclic two-power
    types "2^k_m".  Raises for anything else.
    """
    from .forms import indecomposable_form

    q, _ = indecomposable_form(descriptor)
    G = q.group
    n = G.order
    P = q.polarization()
    base, _, tag = descriptor.partition("_")
    p, _, kk = base.partition("^")
    p = int(p)
    k = int(kk) if kk else 1
    if p ** k != n:
        raise ValueError("descriptor is not a single cyclic factor")
    a = a % n

    def conj_half_pair(ah):
        return rational_phase(mod1(-P.phase((ah,), (ah,))))

    if p % 2 == 1:
        s = 1 if tag == "+" else -1
        inv2 = pow(2, -1, n)
        eps_inv = root_of_unity(8, (n - 1) % 8)
        return (
            eps_inv
            * Fraction(s**k)
            * conj_half_pair((a * inv2) % n)
            * sqrt_nonneg_int(n)
        )
    m = int(tag)
    if k == 1:
        if a % 2 == 1:
            return Cyclotomic.from_rational(Fraction(2))
        return Cyclotomic.zero()
    if a % 2 == 1:
        return Cyclotomic.zero()
    eps = Cyclotomic.one() if m % 4 == 1 else root_of_unity(4, 1)
    jac = 1 if abs(m) == 1 else -1
    one_minus_i = Cyclotomic.one() + root_of_unity(4, 3)
    return (
        one_minus_i
        * eps
        * sqrt_nonneg_int(n)
        * Fraction(jac**k)
        * conj_half_pair(a // 2)
    )


def ty_double(data: TYData, q: QuadraticForm, conv: SqrtConvention | None = None) -> ModularData:
    """Modular data of the center construction for the given datum.

    The form must polarize to the datum's pairing; the convention fixes
    every square root appearing in the matrix entries.
    """
    G = data.G
    n = G.order
    if q.polarization().key() != data.pairing.key():
        raise ValueError("form does not polarize to the datum's pairing")
    if conv is None:
        conv = SqrtConvention.canonical(q, data.sign)
    if conv.q is not q and conv.q.key() != q.key():
        raise ValueError("convention was built for a different form")
    if conv.sign != data.sign:
        raise ValueError("convention was built for a different sign")
    P = q.polarization()
    els = G.elements()

    def zp(g, h):
        return mod1(P.phase(g, h))

    def zeta(g, h):
        return rational_phase(zp(g, h))

    inv_anchor = conv.inv_anchor
    sqrt_q = conv.root
    labels = [("one", g, i) for g in els for i in (0, 1)]
    labels += [("root", g, i) for g in els for i in (0, 1)]
    labels += [("two", g, h) for gi, g in enumerate(els) for h in els[gi + 1:]]
    unit = labels.index(("one", G.zero(), 0))

    inv_rt_n = sqrt_nonneg_int(n).inverse()
    gs = {}
    for a in els:
        tot = Cyclotomic.zero()
        for k in els:
            tot = tot + zeta(G.sub(k, a), k)
        gs[a] = tot
    pref = inv_anchor * inv_anchor

    def s_entry(la, lb):
        ka, kb = la[0], lb[0]
        if ka > kb:
            la, lb = lb, la
            ka, kb = kb, ka
        if (ka, kb) == ("one", "one"):
            return rational_phase(mod1(-2 * zp(la[1], lb[1]))) * Fraction(1, 2 * n)
        if (ka, kb) == ("one", "root"):
            sgn = 1 if la[2] == 0 else -1
            return zeta(la[1], lb[1]).conj() * inv_rt_n * Fraction(sgn, 2)
        if (ka, kb) == ("one", "two"):
            return zeta(la[1], G.add(lb[1], lb[2])).conj() * Fraction(1, n)
        if (ka, kb) == ("root", "two"):
            return Cyclotomic.zero()
        if (ka, kb) == ("two", "two"):
            g, h = la[1], la[2]
            gp, hp = lb[1], lb[2]
            tot = zeta(g, hp) * zeta(h, gp) + zeta(g, gp) * zeta(h, hp)
            return tot.conj() * Fraction(1, n)
        g, h = la[1], lb[1]
        sgn = (-1) ** (la[2] + lb[2])
        val = pref * gs[G.add(g, h)] * sqrt_q[g].inverse() * sqrt_q[h].inverse()
        return val * Fraction(sgn, 2 * n)

    S = [[s_entry(la, lb) for lb in labels] for la in labels]
    T = []
    for la in labels:
        if la[0] == "one":
            T.append(zeta(la[1], la[1]))
        elif la[0] == "two":
            T.append(zeta(la[1], la[2]))
        else:
            sgn = 1 if la[2] == 0 else -1
            T.append(inv_anchor * sqrt_q[la[1]].inverse() * Fraction(sgn))
    return ModularData(labels, unit, S, T)


# -- the parity equivariantization ---------------------------------------------


class DegenerateData:
    """Certificate that the candidate matrix cannot be modular.

    Holds the labels, the attempted matrix, and a pair of indices of two
    rows that are equal entry for entry.
    """

    __slots__ = ("labels", "matrix", "duplicate")

    def __init__(self, labels, matrix, duplicate):
        self.labels = labels
        self.matrix = matrix
        self.duplicate = duplicate


def _plus_minus_classes(G: FinAbGroup):
    """(fixed points of negation, one representative per free pair)."""
    fixed = []
    reps = []
    seen = set()
    for g in G.elements():
        if G.neg(g) == g:
            fixed.append(g)
            continue
        if g in seen:
            continue
        seen.add(g)
        seen.add(G.neg(g))
        reps.append(min(g, G.neg(g)))
    return fixed, reps


def ty_equiv(data: TYData):
    """Modular data of the parity equivariantization, for odd group order.

    For even order the matrix is degenerate; a DegenerateData certificate
    with two identical rows is returned instead.
    """
    G = data.G
    n = G.order
    forms = forms_for_pairing(data.pairing)
    fixed, reps = _plus_minus_classes(G)
    lam = sqrt_nonneg_int(4 * n).inverse()

    if n % 2 == 0:
        P = forms[0].polarization()

        def chi(h):
            return rational_phase(mod1(P.phase(h, h)))

        labels = [("one", h, t) for h in fixed for t in (1, -1)]
        labels += [("two", r) for r in reps]
        labels += [("root", 1), ("root", -1)]

        def s_entry(la, lb):
            ka, kb = la[0], lb[0]
            if ka > kb:
                la, lb = lb, la
                ka, kb = kb, ka
            if (ka, kb) == ("one", "one"):
                return lam
            if (ka, kb) == ("one", "two"):
                return lam + lam
            if (ka, kb) == ("one", "root"):
                return chi(la[1]) * Fraction(la[2], 2)
            if (ka, kb) == ("two", "two"):
                z = rational_phase(mod1(2 * P.phase(la[1], lb[1])))
                return (z + z.conj()) * lam * 2
            return Cyclotomic.zero()

        S = [[s_entry(la, lb) for lb in labels] for la in labels]
        dup = None
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                if all(S[i][k] == S[j][k] for k in range(len(labels))):
                    dup = (i, j)
                    break
            if dup:
                break
        return DegenerateData(labels, S, dup)

    q = forms[0]
    P = q.polarization()
    els = G.elements()
    pd = PointedData(q)

    def zp(g, h):
        return mod1(P.phase(g, h))

    def zeta(g, h):
        return rational_phase(zp(g, h))

    inv_anchor = _half_phase(-_anchor_phase(q, data.sign))
    labels = [("one", 1), ("one", -1)] + [("two", r) for r in reps]
    labels += [("root", 1), ("root", -1)]
    gs2 = Cyclotomic.zero()
    for g in els:
        gs2 = gs2 + zeta(g, g)
    doubled = QuadraticForm(G, {g: mod1(P.phase(g, g)) for g in els})
    _, _, sig2 = gauss_sum(doubled)
    u = rational_phase(mod1(Fraction(-sig2, 24)))
    pref = (pd.x ** 3) * gs2 * lam * data.sign

    def s_entry(la, lb):
        ka, kb = la[0], lb[0]
        if ka > kb:
            la, lb = lb, la
            ka, kb = kb, ka
        if (ka, kb) == ("one", "one"):
            return lam
        if (ka, kb) == ("one", "two"):
            return lam + lam
        if (ka, kb) == ("one", "root"):
            return Cyclotomic.from_rational(Fraction(la[1], 2))
        if (ka, kb) == ("two", "two"):
            z = rational_phase(mod1(2 * zp(la[1], lb[1])))
            return (z + z.conj()) * lam * 2
        if (ka, kb) in (("root", "two"), ("two", "root")):
            return Cyclotomic.zero()
        return pref * Fraction(la[1] * lb[1])

    S = [[s_entry(la, lb) for lb in labels] for la in labels]
    T = []
    for la in labels:
        if la[0] == "one":
            T.append(u)
        elif la[0] == "two":
            T.append(u * zeta(la[1], la[1]))
        else:
            T.append(u * inv_anchor * Fraction(la[1]))
    return ModularData(labels, 0, S, T)


# -- module categories ---------------------------------------------------------


class NimRep:
    """Annular action matrices of the fusion ring on a module's simples."""

    __slots__ = ("labels", "matrices")

    def __init__(self, labels, matrices):
        self.labels = labels
        self.matrices = matrices


def ty_module_nimrep(data: TYData, H: Subgroup, psi: AlternatingPairing | None = None) -> NimRep:
    """Module-category action matrices for a subgroup with a twist.

    Simples split into character labels on the radical of the twist and
    coset labels; the non-invertible simple acts by a constant bipartite
    block whose entry is the square root of the twist's symplectic size.
    """
    G = data.G
    if H.ambient != G:
        raise ValueError("subgroup of a different group")
    J, embed_J, _ = subgroup_group(H)
    if psi is None:
        psi = AlternatingPairing(J, [[Fraction(0)] * J.rank for _ in range(J.rank)])
    if psi.left.factors != J.factors:
        raise ValueError("twist must live on the subgroup's presentation")
    R = psi.radical()
    Rab, embed_R, _ = subgroup_group(R)
    d2, rem = divmod(H.order, Rab.order)
    d = isqrt(d2)
    if rem or d * d != d2:
        raise ValueError("twist radical does not have symplectic index")
    sp = standard_pairing(Rab)
    Q, proj, _ = quotient(G, H)

    xs = [("x", y) for y in Rab.elements()]
    cs = [("c", c) for c in Q.elements()]
    labels = xs + cs
    index = {la: k for k, la in enumerate(labels)}
    rgens = [tuple(int(i == j) for j in range(Rab.rank)) for i in range(Rab.rank)]

    def dual_shift(g):
        """Element of Rab pairing like the ambient pairing against g."""
        for y in Rab.elements():
            if all(
                mod1(sp.phase(y, r)) == mod1(-data.pairing.phase(g, embed_J(embed_R(r))))
                for r in rgens
            ):
                return y
        raise ValueError("pairing restriction is not a character of the radical")

    m = len(labels)
    matrices = {}
    for g in G.elements():
        M = [[0] * m for _ in range(m)]
        y_g = dual_shift(g)
        cg = proj.apply(g)
        for y in Rab.elements():
            M[index[("x", y)]][index[("x", Rab.add(y, y_g))]] = 1
        for c in Q.elements():
            M[index[("c", c)]][index[("c", Q.add(c, cg))]] = 1
        matrices[("inv", g)] = M
    M = [[0] * m for _ in range(m)]
    for la in xs:
        for lb in cs:
            M[index[la]][index[lb]] = d
            M[index[lb]][index[la]] = d
    matrices[("root",)] = M
    return NimRep(labels, matrices)


def equiv_invariant(data: TYData, q: QuadraticForm, H: Subgroup, psi=None) -> ModularInvariant:
    """Invariant of the parity equivariantization from a pointed parameter.

    The parameter (H, psi) selects an invariant of the pointed data for
    the doubled conjugate form; the branching rules transport it.  Odd
    group order only.
    """
    G = data.G
    if G.order % 2 == 0:
        raise ValueError("transport needs a group of odd order")
    if q.polarization().key() != data.pairing.key():
        raise ValueError("form does not polarize to the datum's pairing")
    doubled = QuadraticForm(G, {g: mod1(-2 * q.phase(g)) for g in G.elements()})
    md_w = weil(doubled)
    sc = simple_currents(md_w)
    row_of = {g: k for k, g in enumerate(md_w.labels)}
    gens = [sc.coords[row_of[h]] for h in H.gens()]
    Jsc = Subgroup(sc.group, gens)
    param = make_epsilon(md_w, Jsc, psi)
    Zw = sc_matrix(md_w, param).matrix

    md_e = ty_equiv(data)
    wl = md_w.labels
    widx = {g: k for k, g in enumerate(wl)}
    B = []
    for la in md_e.labels:
        row = [0] * len(wl)
        if la[0] == "one":
            row[widx[G.zero()]] = 1
        elif la[0] == "two":
            row[widx[la[1]]] += 1
            row[widx[G.neg(la[1])]] += 1
        B.append(row)
    m = len(md_e.labels)
    w = len(wl)
    M = [
        [
            sum(B[a][i] * Zw[i][j] * B[b][j] for i in range(w) for j in range(w))
            for b in range(m)
        ]
        for a in range(m)
    ]
    return ModularInvariant(M, {"source": "branching transport", "subgroup": H.key()})


# -- grafted near-group fusion -------------------------------------------------


def hg_fusion(nu: int) -> FusionRing:
    """Grafted fusion ring mixing a (nu x nu) grid with a (nu^2+4) cycle.

    Basis: the unit, a hub object whose square is the sum of everything,
    grid objects indexed by sign classes of the punctured nu-torus, and
    arc objects indexed by sign classes of the punctured cycle.
    """
    if nu % 2 == 0 or nu < 1:
        raise ValueError("only odd grafting sizes are defined")
    m = nu * nu + 4

    def grep(v):
        a, b = v[0] % nu, v[1] % nu
        return min((a, b), ((-a) % nu, (-b) % nu))

    def arep(a):
        a %= m
        return min(a, (-a) % m)

    grids = sorted({grep((a, b)) for a in range(nu) for b in range(nu)} - {(0, 0)})
    arcs = sorted({arep(a) for a in range(1, m)})
    labels = [("one",), ("hub",)]
    labels += [("grid", r) for r in grids]
    labels += [("arc", a) for a in arcs]
    unit = ("one",)
    hub = ("hub",)

    def vec(*pairs):
        out: dict = {}
        for la, c in pairs:
            out[la] = out.get(la, 0) + c
        return out

    def madd(u, v, s=1):
        out = dict(u)
        for la, c in v.items():
            out[la] = out.get(la, 0) + s * c
        return {la: c for la, c in out.items() if c}

    full = {la: 1 for la in labels}
    rest = {la: 1 for la in labels if la != unit}

    def grid_term(v):
        r = grep(v)
        if r == (0, 0):
            return vec((unit, 1), (hub, 1))
        return vec((("grid", r), 1))

    def arc_term(a):
        r = arep(a)
        if r == 0:
            return vec((hub, 1), (unit, -1))
        return vec((("arc", r), 1))

    table = {}
    for la in labels:
        for lb in labels:
            if la == unit:
                table[(la, lb)] = vec((lb, 1))
            elif lb == unit:
                table[(la, lb)] = vec((la, 1))
            elif la == hub and lb == hub:
                table[(la, lb)] = dict(full)
            elif la == hub and lb[0] == "grid":
                table[(la, lb)] = madd(rest, vec((lb, 1)))
            elif lb == hub and la[0] == "grid":
                table[(la, lb)] = madd(rest, vec((la, 1)))
            elif la == hub and lb[0] == "arc":
                table[(la, lb)] = madd(rest, vec((lb, 1)), -1)
            elif lb == hub and la[0] == "arc":
                table[(la, lb)] = madd(rest, vec((la, 1)), -1)
            elif la[0] == "grid" and lb[0] == "grid":
                va, vb = la[1], lb[1]
                out = madd(rest, grid_term((va[0] + vb[0], va[1] + vb[1])))
                out = madd(out, grid_term((va[0] - vb[0], va[1] - vb[1])))
                table[(la, lb)] = out
            elif la[0] == "arc" and lb[0] == "arc":
                out = madd(rest, arc_term(la[1] + lb[1]), -1)
                out = madd(out, arc_term(la[1] - lb[1]), -1)
                table[(la, lb)] = out
            else:
                table[(la, lb)] = dict(rest)
    ring = FusionRing(labels, unit, table)
    if not ring.has_nonnegative_constants():
        raise ValueError("grafted ring has a negative structure constant")
    return ring
