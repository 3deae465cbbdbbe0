"""Pairings, quadratic forms, Gauss sums, indecomposable types."""

import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import close, cphase

from modinv.abelian import (
    FinAbGroup,
    Subgroup,
    dual_characters,
    full_subgroup,
    subgroup_group,
    trivial_subgroup,
)
from modinv.forms import (
    AlternatingPairing,
    Pairing,
    QuadraticForm,
    alternating_pairings,
    forms_equivalent,
    forms_for_pairing,
    gauss_sum,
    indecomposable_form,
    mod1,
    pairing_image_data,
    pairing_radical,
    polarization,
    standard_pairing,
    zero_pairing,
)

F = Fraction


class TestPairing:
    def test_standard(self):
        G = FinAbGroup((5,))
        p = standard_pairing(G)
        assert p.phase((2,), (3,)) == F(6, 5) % 1
        assert p.is_symmetric() and p.is_nondegenerate()

    def test_standard_two_by_two(self):
        G = FinAbGroup((2, 2))
        p = standard_pairing(G)
        assert p.matrix == ((F(1, 2), F(0)), (F(0), F(1, 2)))
        assert pairing_radical(p).order == 1

    def test_trivial_group(self):
        p = standard_pairing(FinAbGroup(()))
        assert p.matrix == ()
        assert p.is_nondegenerate()

    def test_well_definedness_rejected(self):
        G = FinAbGroup((2,))
        with pytest.raises(ValueError):
            Pairing(G, G, [[F(1, 3)]])
        with pytest.raises(ValueError):
            Pairing(G, FinAbGroup((4,)), [[F(1, 4)]])

    def test_radical(self):
        Z4 = FinAbGroup((4,))
        assert pairing_radical(standard_pairing(Z4)).order == 1
        halved = Pairing(Z4, Z4, [[F(1, 2)]])
        rad = pairing_radical(halved)
        assert set(rad.elements()) == {(0,), (2,)}
        assert set(pairing_radical(zero_pairing(Z4)).elements()) == {(0,), (1,), (2,), (3,)}

    def test_eval_matches_float(self):
        G = FinAbGroup((6,))
        p = standard_pairing(G)
        for a in range(6):
            for b in range(6):
                assert close(p.eval((a,), (b,)).approx(), cphase(F(a * b, 6)))

    def test_perp(self):
        G = FinAbGroup((4,))
        p = standard_pairing(G)
        H = Subgroup(G, [(2,)])
        assert set(p.perp(H).elements()) == {(0,), (2,)}
        assert p.perp(trivial_subgroup(G)).order == 4
        assert p.perp(full_subgroup(G)).order == 1

    @pytest.mark.parametrize("factors", [(4,), (2, 2), (6,), (4, 2)])
    def test_perp_order_product(self, factors):
        from modinv.abelian import all_subgroups

        G = FinAbGroup(factors)
        p = standard_pairing(G)
        for H in all_subgroups(G):
            assert p.perp(H).order * H.order == G.order

    def test_row_character(self):
        G = FinAbGroup((4, 2))
        p = standard_pairing(G)
        chi = p.row_character((1, 1))
        for h in G.elements():
            assert chi.phase(h) == p.phase((1, 1), h)

    def test_transpose_conj(self):
        G = FinAbGroup((3,))
        H = FinAbGroup((3,))
        p = Pairing(G, H, [[F(2, 3)]])
        assert p.transpose().phase((1,), (1,)) == F(2, 3)
        assert p.conj().phase((1,), (1,)) == F(1, 3)

    def test_pull_back(self):
        G = FinAbGroup((4, 2))
        p = standard_pairing(G)
        H = Subgroup(G, [(2, 0), (0, 1)])
        J, embed, section = subgroup_group(H)
        q = p.pull_back(J, J, embed, embed)
        for a in J.elements():
            for b in J.elements():
                assert q.phase(a, b) == p.phase(embed(a), embed(b))

    def test_json_round_trip(self):
        G = FinAbGroup((4, 2))
        p = standard_pairing(G)
        assert Pairing.from_json(p.to_json()) == p


class TestSubgroupGroup:
    @pytest.mark.parametrize(
        "factors,gens",
        [((4, 2), [(2, 1)]), ((4, 2), [(1, 0)]), ((6, 2), [(2, 0), (0, 1)]), ((8,), [(2,)])],
    )
    def test_presentation(self, factors, gens):
        G = FinAbGroup(factors)
        H = Subgroup(G, gens)
        J, embed, section = subgroup_group(H)
        assert J.order == H.order
        image = {embed(y) for y in J.elements()}
        assert image == set(H.elements())
        for y in J.elements():
            assert section(embed(y)) == y
        for a in J.elements():
            for b in J.elements():
                assert embed(J.add(a, b)) == G.add(embed(a), embed(b))

    def test_trivial(self):
        G = FinAbGroup((4,))
        J, embed, section = subgroup_group(trivial_subgroup(G))
        assert J.factors == ()
        assert embed(()) == (0,)
        assert section((0,)) == ()


class TestQuadraticForm:
    def test_z3_form(self):
        G = FinAbGroup((3,))
        q = QuadraticForm(G, {(0,): 0, (1,): F(1, 3), (2,): F(1, 3)})
        assert q.phase((2,)) == F(1, 3)
        pol = polarization(q)
        assert pol.matrix == ((F(1, 3),),)

    def test_z3_doubled_form(self):
        # polarization of the doubled form has matrix [[2/3]]
        G = FinAbGroup((3,))
        q = QuadraticForm(G, {(0,): 0, (1,): F(2, 3), (2,): F(2, 3)})
        assert polarization(q).matrix == ((F(2, 3),),)

    def test_z4_eighth_root_form(self):
        G = FinAbGroup((4,))
        q = QuadraticForm(G, {(0,): 0, (1,): F(1, 8), (2,): F(1, 2), (3,): F(1, 8)})
        assert polarization(q).matrix == ((F(3, 4),),)
        assert q.pair_phase((1,), (1,)) == F(3, 4)

    def test_rejects_broken_tables(self):
        G = FinAbGroup((4,))
        with pytest.raises(ValueError):
            QuadraticForm(G, {(0,): 0, (1,): F(1, 8), (2,): F(1, 2), (3,): F(3, 8)})
        with pytest.raises(ValueError):
            QuadraticForm(G, {(0,): F(1, 2), (1,): 0, (2,): 0, (3,): 0})
        with pytest.raises(ValueError):
            QuadraticForm(G, {(0,): 0, (1,): F(1, 8)})
        # additive character: biadditivity of the polarization fails only at
        # nondegeneracy, so a flat table is still a valid (degenerate) form
        flat = QuadraticForm(G, {g: 0 for g in G.elements()})
        assert pairing_radical(polarization(flat)).order == 4

    def test_trivial_group(self):
        q = QuadraticForm(FinAbGroup(()), {(): 0})
        assert polarization(q).matrix == ()

    def test_times_character_and_conj(self):
        G = FinAbGroup((4,))
        q = QuadraticForm(G, {(0,): 0, (1,): F(1, 8), (2,): F(1, 2), (3,): F(1, 8)})
        from modinv.abelian import Character

        psi = Character(G, (2,))
        q2 = q.times_character(psi)
        assert q2.phase((1,)) == F(5, 8)
        assert q2.polarization() == q.polarization()
        assert q.conj().phase((1,)) == F(7, 8)

    def test_direct_sum_renormalizes(self):
        q1, _ = indecomposable_form("2^1_1")
        q2, _ = indecomposable_form("3^1_+")
        q = q1.direct_sum(q2)
        assert q.group.factors == (6,)
        # the order-6 generator decomposes into the two components
        vals = sorted(q.table.values())
        assert q.phase(q.group.zero()) == 0

    def test_json_round_trip(self):
        q, _ = indecomposable_form("2^2_1")
        assert QuadraticForm.from_json(q.to_json()) == q


class TestFormsForPairing:
    def test_z3_unique(self):
        G = FinAbGroup((3,))
        forms = forms_for_pairing(standard_pairing(G))
        assert len(forms) == 1
        assert forms[0].phase((1,)) == F(1, 3)
        assert forms[0].phase((2,)) == F(1, 3)

    def test_z2_both_roots(self):
        G = FinAbGroup((2,))
        gamma = Pairing(G, G, [[F(1, 2)]])
        forms = forms_for_pairing(gamma)
        assert len(forms) == 2
        assert {f.phase((1,)) for f in forms} == {F(1, 4), F(3, 4)}

    def test_z2xz2_count(self):
        forms = forms_for_pairing(standard_pairing(FinAbGroup((2, 2))))
        assert len(forms) == 4

    @pytest.mark.parametrize(
        "factors", [(2,), (3,), (4,), (2, 2), (4, 2), (6,), (3, 3), (8, 2), (12, 2)]
    )
    def test_polarization_round_trip_and_count(self, factors):
        G = FinAbGroup(factors)
        gamma = standard_pairing(G)
        forms = forms_for_pairing(gamma)
        l = sum(1 for n in factors if n % 2 == 0)
        assert len(forms) == 2**l
        for q in forms:
            assert polarization(q) == gamma
        assert len(set(forms)) == len(forms)
        # quotient of any two is a character of order at most 2
        base = forms[0]
        for q in forms:
            diff = {g: mod1(q.phase(g) - base.phase(g)) for g in G.elements()}
            for g in G.elements():
                for h in G.elements():
                    assert mod1(diff[g] + diff[h] - diff[G.add(g, h)]) == 0
                assert mod1(2 * diff[g]) == 0

    def test_degenerate_rejected(self):
        G = FinAbGroup((4,))
        with pytest.raises(ValueError):
            forms_for_pairing(zero_pairing(G))


class TestGaussSum:
    def test_z3(self):
        q, _ = indecomposable_form("3^1_+")
        total, normalized, sigma = gauss_sum(q)
        from modinv.scalars import root_of_unity

        assert total == 1 + 2 * root_of_unity(3, 1)
        assert sigma == 2
        assert normalized == root_of_unity(4, 1)

    def test_z2(self):
        q, _ = indecomposable_form("2^1_1")
        total, normalized, sigma = gauss_sum(q)
        from modinv.scalars import root_of_unity

        assert total == 1 + root_of_unity(4, 1)
        assert sigma == 1

    def test_trivial(self):
        q = QuadraticForm(FinAbGroup(()), {(): 0})
        total, normalized, sigma = gauss_sum(q)
        assert total.is_one() and sigma == 0

    def test_degenerate_raises(self):
        G = FinAbGroup((2,))
        flat = QuadraticForm(G, {(0,): 0, (1,): 0})
        with pytest.raises(ValueError):
            gauss_sum(flat)

    @pytest.mark.parametrize(
        "desc",
        ["2^1_1", "2^2_-1", "2^2_3", "3^1_-", "5^1_+", "2^12^1_i", "2^22^2_ii"],
    )
    def test_float_cross_check(self, desc):
        q, _ = indecomposable_form(desc)
        total, normalized, sigma = gauss_sum(q)
        approx = sum(cphase(q.phase(g)) for g in q.group.elements())
        assert close(total.approx(), approx)
        assert close(normalized.approx(), cmath.exp(2j * cmath.pi * sigma / 8))


DESCRIPTORS = [
    "2^1_1",
    "2^1_-1",
    "2^1_3",
    "2^1_-3",
    "2^2_1",
    "2^2_-1",
    "2^2_3",
    "2^2_-3",
    "2^3_1",
    "2^3_-3",
    "2^4_3",
    "3^1_+",
    "3^1_-",
    "3^2_+",
    "3^2_-",
    "5^1_+",
    "5^1_-",
    "7^1_+",
    "7^1_-",
    "2^12^1_i",
    "2^12^1_ii",
    "2^22^2_i",
    "2^22^2_ii",
]


class TestIndecomposable:
    def test_two_one_one(self):
        q, x3 = indecomposable_form("2^1_1")
        from modinv.scalars import root_of_unity

        assert q.group.factors == (2,)
        assert q.phase((1,)) == F(1, 4)
        assert x3 == root_of_unity(8, -1)

    def test_odd_types(self):
        from modinv.scalars import root_of_unity

        q, x3 = indecomposable_form("3^1_+")
        assert q.phase((1,)) == F(1, 3)
        assert x3 == -root_of_unity(4, 1)  # -i
        q, x3 = indecomposable_form("3^1_-")
        assert q.phase((1,)) == F(2, 3)
        assert x3 == root_of_unity(4, 1)  # i

    def test_hyperbolic_types(self):
        q, x3 = indecomposable_form("2^12^1_i")
        assert q.group.factors == (2, 2)
        assert q.phase((1, 1)) == F(1, 2)
        assert q.phase((1, 0)) == 0
        assert x3.is_one()
        q, x3 = indecomposable_form("2^12^1_ii")
        assert q.phase((1, 0)) == F(1, 2)
        assert q.phase((1, 1)) == F(1, 2)
        assert x3 == Cyclo_minus_one()

    def test_invalid(self):
        for bad in ["4^1_+", "2^0_1", "2^1_2", "3^1_i", "junk", "9^1_+"]:
            with pytest.raises(ValueError):
                indecomposable_form(bad)

    @pytest.mark.parametrize("desc", DESCRIPTORS)
    def test_gauss_consistency(self, desc):
        # normalized Gauss sum is the inverse of x cubed
        q, x3 = indecomposable_form(desc)
        _, normalized, _ = gauss_sum(q)
        assert (normalized * x3).is_one()

    def test_products(self):
        q, x3 = indecomposable_form("2^1_1 x 3^1_+")
        assert q.group.factors == (6,)
        q1, a = indecomposable_form("2^1_1")
        q2, b = indecomposable_form("3^1_+")
        assert x3 == a * b
        _, normalized, _ = gauss_sum(q)
        assert (normalized * x3).is_one()


def Cyclo_minus_one():
    from modinv.scalars import Cyclotomic

    return Cyclotomic.from_rational(F(-1))


class TestEquivalence:
    def test_self(self):
        q, _ = indecomposable_form("3^1_+")
        alpha = forms_equivalent(q, q)
        assert alpha is not None
        assert all(alpha.apply(g) == g for g in q.group.elements()) or all(
            q.phase(alpha.apply(g)) == q.phase(g) for g in q.group.elements()
        )

    def test_two_squared_types_inequivalent(self):
        q1, _ = indecomposable_form("2^2_1")
        q2, _ = indecomposable_form("2^2_-3")
        assert forms_equivalent(q1, q2) is None

    def test_hyperbolic_inequivalent(self):
        q1, _ = indecomposable_form("2^12^1_i")
        q2, _ = indecomposable_form("2^12^1_ii")
        assert forms_equivalent(q1, q2) is None

    def test_mod_four_collapse_on_z2(self):
        q1, _ = indecomposable_form("2^1_1")
        q2, _ = indecomposable_form("2^1_-3")
        assert q1 == q2

    def test_witness_is_checked(self):
        q1, _ = indecomposable_form("3^1_+")
        q2, _ = indecomposable_form("3^1_-")
        assert forms_equivalent(q1, q2) is None

    @staticmethod
    def class_count(gamma):
        classes = []
        for q in forms_for_pairing(gamma):
            for rep in classes:
                if forms_equivalent(rep, q) is not None:
                    break
            else:
                classes.append(q)
        return len(classes)

    @pytest.mark.parametrize(
        "factors,count",
        [((3,), 1), ((4,), 2), ((8,), 1), ((9, 3), 1), ((4, 2), 4), ((2, 2, 2), 4)],
    )
    def test_class_counts_standard(self, factors, count):
        assert self.class_count(standard_pairing(FinAbGroup(factors))) == count

    def test_hyperbolic_pairing_two_classes(self):
        # off-diagonal pairing on Z2 x Z2: exactly the two hyperbolic types
        G = FinAbGroup((2, 2))
        gamma = Pairing(G, G, [[0, F(1, 2)], [F(1, 2), 0]])
        assert self.class_count(gamma) == 2

    def test_diagonal_two_torsion_three_classes(self):
        # (Z2)^2 with the split diagonal pairing carries three inequivalent
        # forms, separated by their Gauss signatures 2, 0, 6 mod 8
        G = FinAbGroup((2, 2))
        forms = forms_for_pairing(standard_pairing(G))
        assert self.class_count(standard_pairing(G)) == 3
        sigmas = sorted(gauss_sum(q)[2] for q in forms)
        assert sigmas == [0, 0, 2, 6]


class TestAlternating:
    @pytest.mark.parametrize(
        "factors,count",
        [((5,), 1), ((12,), 1), ((2, 2), 2), ((3, 3), 3), ((4, 2), 2), ((2, 2, 2), 8)],
    )
    def test_counts(self, factors, count):
        G = FinAbGroup(factors)
        pairings = alternating_pairings(G)
        assert len(pairings) == count
        assert len(set(pairings)) == count
        for p in pairings:
            assert p.is_alternating()
            for g in G.elements():
                assert p.phase(g, g) == 0

    def test_non_alternating_rejected(self):
        G = FinAbGroup((2,))
        with pytest.raises(ValueError):
            AlternatingPairing(G, [[F(1, 2)]])


class TestImageData:
    def test_zero_pairing(self):
        G = FinAbGroup((4,))
        H = FinAbGroup((2,))
        J0, ker = pairing_image_data(zero_pairing(H, G))
        assert J0.order == 4 and ker.order == 2

    def test_z2_into_z4_dual(self):
        Z2, Z4 = FinAbGroup((2,)), FinAbGroup((4,))
        eps = Pairing(Z2, Z4, [[F(1, 2)]])
        J0, ker = pairing_image_data(eps)
        assert set(J0.elements()) == {(0,), (2,)}
        assert ker.order == 1

    def test_nondegenerate(self):
        G = FinAbGroup((6,))
        J0, ker = pairing_image_data(standard_pairing(G))
        assert J0.order == 1 and ker.order == 1

    @pytest.mark.parametrize(
        "lf,rf,E",
        [
            ((2,), (4,), [[F(1, 2)]]),
            ((4,), (4,), [[F(1, 2)]]),
            ((4, 2), (4,), [[F(1, 4)], [F(1, 2)]]),
            ((6,), (6,), [[F(1, 3)]]),
        ],
    )
    def test_image_characterization(self, lf, rf, E):
        J1, J2 = FinAbGroup(lf), FinAbGroup(rf)
        eps = Pairing(J1, J2, E)
        J0, ker = pairing_image_data(eps)
        image = {eps.row_character(g) for g in J1.elements()}
        for chi in dual_characters(J2):
            in_image = chi in image
            kills_J0 = all(chi.phase(h) == 0 for h in J0.elements())
            assert in_image == kills_J0
        # first isomorphism: |J1| / |ker| = |J2| / |J0|
        assert J1.order * J0.order == J2.order * ker.order or (
            J1.order // ker.order == J2.order // J0.order
        )


@st.composite
def random_form(draw):
    factors = draw(
        st.sampled_from([(2,), (3,), (4,), (5,), (2, 2), (4, 2), (6,), (3, 3)])
    )
    G = FinAbGroup(factors)
    forms = forms_for_pairing(standard_pairing(G))
    return draw(st.sampled_from(forms))


class TestProperties:
    @given(random_form())
    @settings(max_examples=60, deadline=None)
    def test_gauss_magnitude(self, q):
        total, normalized, sigma = gauss_sum(q)
        assert (total * total.conj()).as_rational() == q.group.order
        assert (normalized * normalized.conj()).is_one()

    @given(random_form())
    @settings(max_examples=40, deadline=None)
    def test_homogeneity(self, q):
        G = q.group
        for g in G.elements():
            for k in range(2 * G.exponent):
                assert q.phase(G.scale(k, g)) == mod1(k * k * q.phase(g))
