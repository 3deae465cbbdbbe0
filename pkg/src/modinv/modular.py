"""Modular data containers, Verlinde fusion, simple currents, invariants.

All arithmetic is exact over cyclotomic numbers.  The brute-force invariant
search solves the commutant linear system over the rationals and enumerates
bounded nonnegative integer points.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import lcm

from .abelian import FinAbGroup, GuardError, abelian_structure
from .scalars import Cyclotomic

BRUTE_GUARD = 64


# -- matrix helpers over Cyclotomic -------------------------------------------


def mat_mul(A, B):
    n = len(A)
    m = len(B[0])
    k = len(B)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Cyclotomic.zero()
            for t in range(k):
                if not A[i][t].is_zero() and not B[t][j].is_zero():
                    acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_dagger(A):
    n = len(A)
    return [[A[j][i].conj() for j in range(n)] for i in range(n)]


def is_identity_matrix(A) -> bool:
    for i, row in enumerate(A):
        for j, x in enumerate(row):
            if i == j:
                if not x.is_one():
                    return False
            elif not x.is_zero():
                return False
    return True


def as_permutation(A):
    """Permutation p with A[i][p[i]] = 1 if A is a permutation matrix, else None."""
    n = len(A)
    perm = []
    for i in range(n):
        hit = None
        for j in range(n):
            x = A[i][j]
            if x.is_one():
                if hit is not None:
                    return None
                hit = j
            elif not x.is_zero():
                return None
        if hit is None:
            return None
        perm.append(hit)
    return perm if sorted(perm) == list(range(n)) else None


def _is_root_of_unity(x: Cyclotomic) -> bool:
    if not (x * x.conj()).is_one():
        return False
    return (x ** lcm(2, x.order)).is_one()


class ModularData:
    """Labelled (S, T) pair with a distinguished unit row."""

    __slots__ = ("labels", "unit", "S", "T", "_fusion", "_charge")

    def __init__(self, labels, unit, S, T):
        self.labels = tuple(labels)
        self.unit = int(unit)
        self.S = tuple(tuple(row) for row in S)
        self.T = tuple(T)
        if len(self.S) != len(self.labels) or any(
            len(r) != len(self.labels) for r in self.S
        ):
            raise ValueError("S must be square over the labels")
        if len(self.T) != len(self.labels):
            raise ValueError("T must be the diagonal over the labels")
        if not 0 <= self.unit < len(self.labels):
            raise ValueError("unit index out of range")
        self._fusion = None
        self._charge = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)

    def charge_conjugation(self):
        """Permutation c with S^2 the matrix of a -> c(a)."""
        if self._charge is None:
            perm = as_permutation(mat_mul(self.S, self.S))
            if perm is None:
                raise ValueError("S^2 is not a permutation matrix")
            self._charge = tuple(perm)
        return self._charge

    def fusion(self):
        if self._fusion is None:
            self._fusion = verlinde(self)
        return self._fusion

    def to_json(self):
        return {
            "labels": [list(l) if isinstance(l, tuple) else l for l in self.labels],
            "unit": self.unit,
            "S": [[x.to_json() for x in row] for row in self.S],
            "T": [x.to_json() for x in self.T],
        }

    @staticmethod
    def from_json(obj) -> "ModularData":
        labels = [tuple(l) if isinstance(l, list) else l for l in obj["labels"]]
        return ModularData(
            labels,
            obj["unit"],
            [[Cyclotomic.from_json(x) for x in row] for row in obj["S"]],
            [Cyclotomic.from_json(x) for x in obj["T"]],
        )


def validate_modular(md: ModularData) -> list[str]:
    """List of failed identities; empty means the data is modular."""
    report = []
    n = md.dim
    S, T = md.S, md.T
    if any(S[i][j] != S[j][i] for i in range(n) for j in range(i + 1, n)):
        report.append("S symmetric")
    if not is_identity_matrix(mat_mul(S, mat_dagger(S))):
        report.append("S unitary")
    if not all(_is_root_of_unity(t) for t in T):
        report.append("T root of unity")
    S2 = mat_mul(S, S)
    perm = as_permutation(S2)
    if perm is None:
        report.append("S^2 permutation")
    else:
        if perm[md.unit] != md.unit:
            report.append("S^2 fixes unit")
        if any(perm[perm[i]] != i for i in range(n)):
            report.append("S^2 involution")
    ST = [[S[i][j] * T[j] for j in range(n)] for i in range(n)]
    lhs = mat_mul(ST, mat_mul(ST, ST))
    if any(lhs[i][j] != S2[i][j] for i in range(n) for j in range(n)):
        report.append("(ST)^3 = S^2")
    return report


def verlinde(md: ModularData):
    """Fusion tensor N[a][b][c] via the S-matrix; entries must be nonnegative integers."""
    n = md.dim
    S = md.S
    inv0 = []
    for k in range(n):
        x = S[md.unit][k]
        if x.is_zero():
            raise ValueError("unit row of S has a zero entry")
        inv0.append(x.inverse())
    Sbar = [[S[i][j].conj() for j in range(n)] for i in range(n)]
    N = []
    for a in range(n):
        plane = []
        for b in range(n):
            w = [S[a][k] * S[b][k] * inv0[k] for k in range(n)]
            row = []
            for c in range(n):
                acc = Cyclotomic.zero()
                for k in range(n):
                    acc = acc + w[k] * Sbar[c][k]
                if not acc.is_rational():
                    raise ValueError(f"fusion coefficient not rational at {(a, b, c)}")
                r = acc.as_rational()
                if r.denominator != 1 or r < 0:
                    raise ValueError(f"fusion coefficient {r} at {(a, b, c)}")
                row.append(int(r))
            plane.append(tuple(row))
        N.append(tuple(plane))
    return tuple(N)


class SimpleCurrentStructure:
    """Invertible simples of a modular datum, with grading and twists."""

    __slots__ = (
        "md",
        "group",
        "coords",
        "label_index",
        "action_table",
        "quaternionic",
        "sufficiently_nonzero",
    )

    def __init__(self, md, group, coords, label_index, action_table, quaternionic, suff):
        self.md = md
        self.group = group
        self.coords = coords
        self.label_index = label_index
        self.action_table = action_table
        self.quaternionic = quaternionic
        self.sufficiently_nonzero = suff

    def act(self, j, a: int) -> int:
        """Index of j applied to primary index a; j given in group coordinates."""
        return self.action_table[j][a]

    def q(self, j) -> Cyclotomic:
        md = self.md
        return md.T[self.label_index[j]] * md.T[md.unit].conj()

    def grading(self, a: int, j) -> Cyclotomic:
        """Monodromy charge of primary a against current j, a root of unity."""
        md = self.md
        num = md.S[self.label_index[j]][a]
        den = md.S[md.unit][a]
        return num * den.inverse()

    def is_quaternionic(self, j) -> bool:
        return j in self.quaternionic

    def pairing_phase_check(self, j, jp) -> bool:
        G = self.group
        lhs = self.q(j) * self.q(jp) * self.q(G.add(j, jp)).conj()
        rhs = self.grading(self.label_index[jp], j)
        return lhs == rhs


def simple_currents(md: ModularData) -> SimpleCurrentStructure:
    N = md.fusion()
    n = md.dim
    conj = md.charge_conjugation()
    invertible = []
    for j in range(n):
        if N[j][conj[j]][md.unit] != 1:
            continue
        perm = [None] * n
        ok = True
        for a in range(n):
            hits = [c for c in range(n) if N[j][a][c]]
            if len(hits) != 1 or N[j][a][hits[0]] != 1:
                ok = False
                break
            perm[a] = hits[0]
        if ok and sorted(perm) == list(range(n)):
            invertible.append((j, tuple(perm)))
    perms = {j: p for j, p in invertible}
    group, coords = abelian_structure(
        [j for j, _ in invertible], lambda a, b: perms[a][b], md.unit
    )
    label_index = {coords[j]: j for j, _ in invertible}
    action_table = {coords[j]: p for j, p in invertible}
    quaternionic = set()
    for j, _ in invertible:
        cj = coords[j]
        order = group.element_order(cj)
        tw = md.T[j] * md.T[md.unit].conj()
        if (tw**order) == Cyclotomic.from_rational(Fraction(-1)):
            quaternionic.add(cj)
    # class labels by their restriction of the grading to the current group
    jlist = [coords[j] for j, _ in invertible]
    sig_of = []
    signatures = []
    for a in range(n):
        den = md.S[md.unit][a]
        sig = tuple(md.S[label_index[j]][a] * den.inverse() for j in jlist)
        for idx, s in enumerate(signatures):
            if all(x == y for x, y in zip(s, sig)):
                sig_of.append(idx)
                break
        else:
            signatures.append(sig)
            sig_of.append(len(signatures) - 1)
    suff = True
    for x in range(len(signatures)):
        for y in range(len(signatures)):
            found = False
            for a in range(n):
                if sig_of[a] != x:
                    continue
                for b in range(n):
                    if sig_of[b] == y and not md.S[a][b].is_zero():
                        found = True
                        break
                if found:
                    break
            if not found:
                suff = False
    return SimpleCurrentStructure(
        md, group, coords, label_index, action_table, quaternionic, suff
    )


class ModularInvariant:
    """Nonnegative integer matrix commuting with S and T."""

    __slots__ = ("matrix", "provenance")

    def __init__(self, matrix, provenance=None):
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        self.provenance = provenance or {}

    def __eq__(self, other):
        return isinstance(other, ModularInvariant) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"ModularInvariant({self.matrix})"

    def transpose(self) -> "ModularInvariant":
        n = len(self.matrix)
        return ModularInvariant(
            [[self.matrix[j][i] for j in range(n)] for i in range(n)],
            {"transpose_of": self.provenance},
        )

    def to_json(self):
        return {"matrix": [list(r) for r in self.matrix], "provenance": _json_prov(self.provenance)}


def _json_prov(p):
    out = {}
    for k, v in p.items():
        if isinstance(v, (str, int, list)):
            out[k] = v
        elif isinstance(v, tuple):
            out[k] = list(v)
        else:
            out[k] = repr(v)
    return out


def check_invariant(md: ModularData, matrix) -> tuple[bool, dict]:
    """Definition check: integrality, normalization, S/T commutation.

    The report also carries the current-periodicity consequence as a
    secondary entry.
    """
    n = md.dim
    M = [list(map(int, row)) for row in matrix]
    if len(M) != n or any(len(r) != n for r in M):
        raise ValueError("matrix dimension mismatch")
    report = {}
    report["nonnegative"] = all(x >= 0 for row in M for x in row)
    report["unit_normalized"] = M[md.unit][md.unit] == 1
    report["T_commutes"] = all(
        M[a][b] == 0 or md.T[a] == md.T[b] for a in range(n) for b in range(n)
    )
    Z = [[Cyclotomic.from_rational(Fraction(x)) for x in row] for row in M]
    SZ = mat_mul(md.S, Z)
    ZS = mat_mul(Z, md.S)
    report["S_commutes"] = all(
        SZ[i][j] == ZS[i][j] for i in range(n) for j in range(n)
    )
    ok = all(report.values())
    if ok:
        sc = simple_currents(md)
        periodic = True
        for jc, pj in sc.action_table.items():
            j = sc.label_index[jc]
            for jc2, pj2 in sc.action_table.items():
                if M[j][sc.label_index[jc2]] == 0:
                    continue
                for a in range(n):
                    for b in range(n):
                        if M[pj[a]][pj2[b]] != M[a][b]:
                            periodic = False
        report["current_periodicity"] = periodic
    return ok, report


# -- exact commutant enumeration ----------------------------------------------


def _commutant_rows(md: ModularData, positions, pos_index):
    """Rational linear system rows for SZ = ZS restricted to allowed positions."""
    n = md.dim
    S = md.S
    for i in range(n):
        for j in range(n):
            terms = {}
            for b in range(n):
                if (b, j) in pos_index and not S[i][b].is_zero():
                    terms.setdefault((b, j), Cyclotomic.zero())
                    terms[(b, j)] = terms[(b, j)] + S[i][b]
            for a in range(n):
                if (i, a) in pos_index and not S[a][j].is_zero():
                    terms.setdefault((i, a), Cyclotomic.zero())
                    terms[(i, a)] = terms[(i, a)] - S[a][j]
            terms = {v: c for v, c in terms.items() if not c.is_zero()}
            if not terms:
                continue
            order = lcm(*[c.order for c in terms.values()])
            comps = {v: c.at_order(order).canonical() for v, c in terms.items()}
            for k in range(order):
                row = {}
                for v, vec in comps.items():
                    if vec[k]:
                        row[pos_index[v]] = vec[k]
                if row:
                    yield row


def _rref_insert(pivots, row, const):
    """Reduce (row, const) by current pivots; install if independent."""
    while True:
        var = next((v for v in row if v in pivots), None)
        if var is None:
            break
        coeff = row.pop(var)
        prow, pconst = pivots[var]
        for v2, c2 in prow.items():
            row[v2] = row.get(v2, Fraction(0)) - coeff * c2
            if row[v2] == 0:
                del row[v2]
        const = const - coeff * pconst
    row = {v: c for v, c in row.items() if c != 0}
    if not row:
        if const != 0:
            raise _Inconsistent()
        return
    piv = max(row)
    cp = row.pop(piv)
    row = {v: c / cp for v, c in row.items()}
    const = const / cp
    # back substitute into existing rows
    for var, (prow, pconst) in list(pivots.items()):
        if piv in prow:
            coeff = prow.pop(piv)
            for v2, c2 in row.items():
                prow[v2] = prow.get(v2, Fraction(0)) - coeff * c2
                if prow[v2] == 0:
                    del prow[v2]
            pivots[var] = (prow, pconst - coeff * const)
    pivots[piv] = (row, const)


class _Inconsistent(Exception):
    pass


def brute_force_invariants(md: ModularData, entry_bound: int | None = None):
    """All nonnegative integer matrices commuting with S and T.

    Entries are bounded by entry_bound (default: the primary count) and the
    unit entry is fixed to 1.  Complete within the bound.
    """
    n = md.dim
    if n > BRUTE_GUARD:
        raise GuardError(f"primary count {n} exceeds guard {BRUTE_GUARD}")
    bound = n if entry_bound is None else int(entry_bound)
    positions = [
        (a, b) for a in range(n) for b in range(n) if md.T[a] == md.T[b]
    ]
    pos_index = {p: i for i, p in enumerate(positions)}
    if (md.unit, md.unit) not in pos_index:
        raise ValueError("unit diagonal position missing")
    pivots: dict = {}
    try:
        for row in _commutant_rows(md, positions, pos_index):
            _rref_insert(pivots, dict(row), Fraction(0))
        _rref_insert(
            pivots, {pos_index[(md.unit, md.unit)]: Fraction(1)}, Fraction(1)
        )
    except _Inconsistent:
        return []
    nvars = len(positions)
    free = [v for v in range(nvars) if v not in pivots]
    # pivot rows grouped by the free variables they depend on
    order_of = {v: i for i, v in enumerate(free)}
    checks = []  # (last_free_order, pivot_var, row, const)
    for var, (row, const) in pivots.items():
        last = max((order_of[v] for v in row), default=-1)
        checks.append((last, var, row, const))
    by_depth: dict[int, list] = {}
    for last, var, row, const in checks:
        by_depth.setdefault(last, []).append((var, row, const))
    out = []
    assign = {}

    def emit():
        M = [[0] * n for _ in range(n)]
        vals = dict(assign)
        for var, (row, const) in pivots.items():
            vals[var] = const - sum(c * vals[v] for v, c in row.items())
        for (a, b), idx in pos_index.items():
            M[a][b] = int(vals[idx])
        out.append(ModularInvariant(M, {"source": "brute_force"}))

    def dfs(depth):
        if depth == len(free):
            emit()
            return
        for val in range(bound + 1):
            assign[free[depth]] = Fraction(val)
            ok = True
            for var, row, const in by_depth.get(depth, []):
                v = const - sum(c * assign[u] for u, c in row.items())
                if v.denominator != 1 or v < 0 or v > bound:
                    ok = False
                    break
            if ok:
                dfs(depth + 1)
        del assign[free[depth]]

    # pivots depending on no free variable get checked before any branching
    for var, row, const in by_depth.get(-1, []):
        if const.denominator != 1 or const < 0 or const > bound:
            return []
    dfs(0)
    out.sort(key=lambda z: z.matrix)
    return out
