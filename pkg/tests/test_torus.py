from fractions import Fraction

import pytest

from cmtori.quadratic import (
    BiquadraticCM,
    QuadraticField,
    class_number_imaginary,
    is_fundamental_discriminant,
    is_squarefree,
)
from cmtori.torus import (
    CMAlgebraSpec,
    Overrides,
    RouteDisagreementError,
    class_number,
    class_number_family_sqrt_p_j,
    class_number_norm_one,
    global_norm_index,
    hasse_unit_index,
    herglotz_class_number,
    local_index,
    local_index_report,
    q_symbols,
    ramification_profile,
    tamagawa,
    verify_consistency,
)


def iq(m):
    return CMAlgebraSpec((QuadraticField(m),))


def biq(d, j):
    return CMAlgebraSpec((BiquadraticCM(d, j),))


def squarefree_range(lo, hi):
    return [n for n in range(lo, hi) if is_squarefree(n)]


class TestRamificationProfile:
    def test_imaginary_quadratic(self):
        prof = ramification_profile(iq(-1))
        assert prof.t == 1 and prof.S == (2,)
        prof = ramification_profile(iq(-5))
        assert prof.t == 2 and prof.S == (2, 5)

    def test_biq_split(self):
        prof = ramification_profile(biq(17, 1))
        assert (prof.t, prof.s, prof.S) == (2, 1, (2,))
        assert [p.kind for p in prof.places[2]] == ["split", "split"]

    def test_biq_inert(self):
        prof = ramification_profile(biq(5, 1))
        assert (prof.t, prof.s, prof.S) == (1, 0, (2,))
        assert prof.places[2][0].f_v == 2

    def test_biq_totally_ramified(self):
        prof = ramification_profile(biq(2, 1))
        assert (prof.t, prof.s, prof.S) == (1, 0, (2,))
        assert prof.totally_ramified_2
        # same field, other presentation
        assert ramification_profile(biq(2, 2)).totally_ramified_2

    def test_unramified_everywhere(self):
        # the 12th cyclotomic field is unramified over its real subfield at
        # every finite place
        prof = ramification_profile(biq(3, 1))
        assert (prof.t, prof.s, prof.S) == (0, 0, ())

    def test_t_minus_s_is_S(self):
        for d in squarefree_range(2, 60):
            for j in squarefree_range(1, 60):
                prof = ramification_profile(biq(d, j))
                assert prof.t - prof.s == len(prof.S), (d, j)


class TestLocalIndex:
    def test_split_gives_two(self):
        assert local_index(biq(17, 1), 2).e_value == 2

    def test_inert_gives_one(self):
        assert local_index(biq(5, 1), 2).e_value == 1

    def test_totally_ramified_gives_one(self):
        assert local_index(biq(2, 1), 2).e_value == 1
        assert local_index(biq(3, 2), 2).e_value == 1

    def test_product_rank_two(self):
        spec = CMAlgebraSpec((QuadraticField(-1), QuadraticField(-2)))
        entry = local_index(spec, 2)
        assert entry.e_value == 4 and entry.exponent == 2

    def test_same_class_rank_one(self):
        # two copies of the same 2-adic norm group intersect in themselves
        spec = CMAlgebraSpec((QuadraticField(-1), QuadraticField(-5)))
        assert local_index(spec, 2).e_value == 2

    def test_odd_primes(self):
        assert local_index(iq(-5), 5).e_value == 2  # inertia degree 1
        assert local_index(biq(5, 7), 7).e_value == 1  # 7 inert in Q(sqrt 5)
        assert local_index(biq(2, 7), 7).e_value == 2  # 7 splits in Q(sqrt 2)

    def test_report_shape(self):
        rep = local_index_report(iq(-5))
        assert set(rep.entries) == {2, 5}
        assert rep.total_exponent == 2
        for p, entry in rep.entries.items():
            assert entry.e_value == 2**entry.exponent
            assert entry.exponent <= (2 if p == 2 else 1)


class TestGlobalIndex:
    def test_single_imaginary(self):
        g = global_norm_index(iq(-5))
        assert (g.value, g.exact) == (2, True)

    def test_single_biquadratic(self):
        g = global_norm_index(biq(17, 1))
        assert (g.value, g.exact) == (1, True)

    def test_product_bound(self):
        g = global_norm_index(CMAlgebraSpec((QuadraticField(-1), QuadraticField(-2))))
        assert (g.value, g.exact) == (4, False)


class TestHasseUnitIndex:
    def test_values(self):
        assert hasse_unit_index(QuadraticField(-7)) == 1
        assert hasse_unit_index(BiquadraticCM(7, 1)) == 2
        assert hasse_unit_index(BiquadraticCM(2, 1)) == 1
        assert hasse_unit_index(BiquadraticCM(3, 1)) == 2  # 12th cyclotomic
        assert hasse_unit_index(BiquadraticCM(3, 2)) == 2
        assert hasse_unit_index(BiquadraticCM(2, 3)) == 1
        assert hasse_unit_index(BiquadraticCM(5, 1)) == 1
        assert hasse_unit_index(BiquadraticCM(15, 1)) is None

    def test_field_not_presentation(self):
        # Q(sqrt(3), sqrt(-3)) is the 12th cyclotomic field again
        assert hasse_unit_index(BiquadraticCM(3, 3)) == 2

    def test_herglotz(self):
        assert herglotz_class_number(BiquadraticCM(17, 1), 1) == 2
        assert herglotz_class_number(BiquadraticCM(2, 1), 1) == 1
        assert herglotz_class_number(BiquadraticCM(3, 1), 2) == 1
        assert herglotz_class_number(BiquadraticCM(7, 1), 2) == 1


class TestClassNumber:
    @pytest.mark.parametrize(
        "d,j,h",
        [(2, 1, 1), (17, 1, 2), (5, 1, 1), (3, 1, 1), (3, 2, 1), (7, 1, 1), (15, 7, 4)],
    )
    def test_biquadratic_values(self, d, j, h):
        assert class_number(biq(d, j)).h_T == h

    def test_imaginary_quadratic_is_h(self):
        assert class_number(iq(-5)).h_T == class_number_imaginary(-20) == 2
        assert class_number(iq(-1)).h_T == 1

    def test_report_fields(self):
        rep = class_number(biq(17, 1))
        assert rep.h_T1 == 1
        assert rep.tamagawa == 2
        assert rep.h_K == 2 and rep.h_Kplus == 1 and rep.Q == 1
        assert rep.route_agreement and rep.exact
        assert rep.mu_order == 4

    def test_product_interval(self):
        rep = class_number(CMAlgebraSpec((QuadraticField(-1), QuadraticField(-2))))
        assert rep.h_T == (1, 4)
        assert rep.tamagawa == (Fraction(1), Fraction(4))
        assert not rep.exact

    def test_product_exact_when_no_local_obstruction(self):
        # two copies of the 8th cyclotomic component: all e_{T,p} = 1
        rep = class_number(CMAlgebraSpec((BiquadraticCM(2, 1), BiquadraticCM(2, 2))))
        assert rep.exact and rep.h_T == 1
        assert rep.tamagawa == 4

    def test_norm_one(self):
        assert class_number_norm_one(iq(-5)) == 1
        assert class_number_norm_one(biq(17, 1)) == 1
        assert class_number_norm_one(biq(2, 1)) == 1
        assert class_number_norm_one(biq(15, 7)) == 2

    def test_refined_bound(self):
        # h_T 2^(t-r) Q h_K+ / h_K is a power of 2 within the exponent bound
        for spec in (iq(-5), iq(-21), biq(17, 1), biq(7, 2), biq(3, 1), biq(13, 5)):
            rep = class_number(spec)
            assert rep.exact and rep.h_K is not None and rep.Q is not None
            val = (
                Fraction(rep.h_T * rep.Q * rep.h_Kplus, rep.h_K)
                * Fraction(2) ** (rep.profile.t - rep.spec.r)
            )
            e = 0
            while val > 1:
                val /= 2
                e += 1
            assert val == 1, spec
            assert e <= rep.local.total_exponent

    def test_ratio_power_of_two(self):
        for d in squarefree_range(2, 30):
            for j in squarefree_range(1, 20):
                rep = class_number(biq(d, j))
                ratio = Fraction(rep.h_T, rep.h_T1)
                assert ratio >= 1 and ratio.denominator == 1
                assert int(ratio) & (int(ratio) - 1) == 0  # power of two

    def test_imaginary_ratio_is_2_to_t_minus_1(self):
        for D in range(-399, 0):
            if not is_fundamental_discriminant(D):
                continue
            m = D if D % 4 == 1 else D // 4
            rep = class_number(iq(m))
            assert rep.h_T == class_number_imaginary(D)
            assert rep.tamagawa == 1
            assert rep.h_T == rep.h_T1 * 2 ** (rep.profile.t - 1)

    def test_overrides(self):
        rep = class_number(biq(15, 7), Overrides(Q=1))
        assert rep.Q == 1 and rep.h_K == 8
        with pytest.raises(RouteDisagreementError):
            class_number(biq(17, 1), Overrides(h_K=3))
        with pytest.raises(ValueError):
            Overrides(Q=3)

    def test_family_values(self):
        assert class_number_family_sqrt_p_j(2, 1) == 1
        assert class_number_family_sqrt_p_j(7, 1) == 1
        assert class_number_family_sqrt_p_j(5, 1) == 1
        assert class_number_family_sqrt_p_j(17, 1) == 2
        with pytest.raises(ValueError):
            class_number_family_sqrt_p_j(2, 2)
        with pytest.raises(ValueError):
            class_number_family_sqrt_p_j(3, 3)
        with pytest.raises(ValueError):
            class_number_family_sqrt_p_j(4, 1)

    def test_family_matches_pipeline(self):
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
            for j in (1, 2, 3):
                if (p, j) in ((2, 2), (3, 3)):
                    continue
                assert class_number_family_sqrt_p_j(p, j) == class_number(biq(p, j)).h_T


class TestTamagawa:
    def test_values(self):
        assert tamagawa(iq(-1)) == 1
        assert tamagawa(biq(17, 1)) == 2
        lo, hi = tamagawa(CMAlgebraSpec((QuadraticField(-1), QuadraticField(-2))))
        assert (lo, hi) == (1, 4)

    def test_power_of_two_when_exact(self):
        for spec in (iq(-1), iq(-5), biq(2, 1), biq(17, 1), biq(3, 1)):
            tau = tamagawa(spec)
            assert isinstance(tau, Fraction)
            assert tau.denominator == 1
            n = int(tau)
            assert n & (n - 1) == 0
            assert n <= 2 ** (spec.r + 1)


class TestQSymbols:
    def test_biq_2_1(self):
        sym = q_symbols(biq(2, 1))
        assert sym.q_infty == Fraction(1, 2)
        assert sym.q_Z == 2 and sym.q_gamma == 1

    def test_iq_minus_5(self):
        sym = q_symbols(iq(-5))
        assert sym.q_p[2] == 4  # e_{T,2} * 2^d with d = 1
        assert sym.q_p[5] == 2

    def test_gamma_always_one(self):
        for spec in (iq(-7), biq(5, 1), CMAlgebraSpec((QuadraticField(-1), BiquadraticCM(17, 1)))):
            assert q_symbols(spec).q_gamma == 1

    def test_ratio_matches_class_numbers(self):
        for spec in (iq(-5), iq(-21), biq(17, 1), biq(5, 1), biq(2, 1)):
            rep = class_number(spec)
            sym = q_symbols(spec)
            assert sym.shyr_ratio == rep.h_T // rep.h_T1


class TestConsistency:
    def test_spec_examples(self):
        assert verify_consistency(biq(17, 1)).passed
        assert verify_consistency(biq(3, 1)).passed
        assert verify_consistency(iq(-1)).passed

    def test_sweep(self):
        for d in squarefree_range(2, 40):
            for j in squarefree_range(1, 20):
                rep = verify_consistency(biq(d, j))
                assert rep.passed, (d, j, [c for c in rep.checks if not c.passed])

    def test_checks_are_named(self):
        rep = verify_consistency(biq(17, 1))
        names = {c.name for c in rep.checks}
        assert any("t-s=|S|" in n for n in names)
        assert any("Herglotz" in n for n in names)
        assert any("route equality" in n for n in names)


class TestSpecValidation:
    def test_needs_components(self):
        with pytest.raises(ValueError):
            CMAlgebraSpec(())

    def test_rejects_real_quadratic(self):
        with pytest.raises(ValueError):
            CMAlgebraSpec((QuadraticField(5),))

    def test_degree(self):
        assert iq(-1).degree_plus == 1
        assert biq(17, 1).degree_plus == 2
        assert CMAlgebraSpec((QuadraticField(-1), BiquadraticCM(17, 1))).degree_plus == 3
