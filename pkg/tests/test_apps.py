import pytest

from cmtori.apps import (
    IsogenyClassCounts,
    LevelData,
    LevelDataError,
    NoncompactnessNotAsserted,
    ShimuraInput,
    cm_point_count,
    double_coset_cardinality,
    isogeny_class_counts,
    shimura_components,
)
from cmtori.quadratic import BiquadraticCM, QuadraticField
from cmtori.torus import CMAlgebraSpec


def iq(m):
    return CMAlgebraSpec((QuadraticField(m),))


def biq(d, j):
    return CMAlgebraSpec((BiquadraticCM(d, j),))


class TestDoubleCoset:
    def test_maximal(self):
        assert double_coset_cardinality(2, LevelData()) == 2

    def test_scaling(self):
        assert double_coset_cardinality(2, LevelData(index_U=3)) == 6

    def test_non_integral_rejected(self):
        with pytest.raises(LevelDataError):
            double_coset_cardinality(1, LevelData(index_U=2, mu_index=4))

    def test_positive_level(self):
        with pytest.raises(ValueError):
            LevelData(index_U=0)


class TestCMPoints:
    def test_maximal_level_is_class_number(self):
        assert cm_point_count(biq(17, 1)) == 2
        assert cm_point_count(iq(-1)) == 1

    def test_level_scaling(self):
        assert cm_point_count(biq(2, 1), LevelData(index_U=5)) == 5

    def test_linear_in_index(self):
        base = cm_point_count(biq(17, 1))
        for n in (2, 3, 7, 12):
            assert cm_point_count(biq(17, 1), LevelData(index_U=n)) == n * base

    def test_interval_propagates(self):
        spec = CMAlgebraSpec((QuadraticField(-1), QuadraticField(-2)))
        assert cm_point_count(spec, LevelData(index_U=3)) == (3, 12)

    def test_mu_index_must_divide_torsion(self):
        # mu has order 4 for Q(i); 3 does not divide it
        with pytest.raises(LevelDataError):
            cm_point_count(iq(-1), LevelData(mu_index=3))
        assert cm_point_count(iq(-1), LevelData(index_U=4, mu_index=4)) == 1


class TestShimura:
    def test_odd_rank(self):
        inp = ShimuraInput(biq(17, 1), 3, noncompact_assertion=True)
        assert shimura_components(inp) == 2

    def test_even_rank(self):
        inp = ShimuraInput(biq(17, 1), 2, noncompact_assertion=True)
        assert shimura_components(inp) == 1

    def test_eighth_cyclotomic(self):
        inp = ShimuraInput(biq(2, 1), 5, noncompact_assertion=True)
        assert shimura_components(inp) == 1

    def test_depends_only_on_parity(self):
        for n in range(2, 9):
            a = shimura_components(ShimuraInput(biq(17, 1), n, noncompact_assertion=True))
            b = shimura_components(
                ShimuraInput(biq(17, 1), n + 2, noncompact_assertion=True)
            )
            assert a == b

    def test_hypothesis_required(self):
        with pytest.raises(NoncompactnessNotAsserted):
            shimura_components(ShimuraInput(biq(17, 1), 3))

    def test_single_field_only(self):
        with pytest.raises(ValueError):
            ShimuraInput(
                CMAlgebraSpec((QuadraticField(-1), QuadraticField(-2))),
                3,
                noncompact_assertion=True,
            )

    def test_rank_bound(self):
        with pytest.raises(ValueError):
            ShimuraInput(biq(17, 1), 1, noncompact_assertion=True)


class TestIsogenyCounts:
    def test_spec_examples(self):
        assert isogeny_class_counts(biq(17, 1)) == IsogenyClassCounts(1, 2)
        assert isogeny_class_counts(iq(-5)) == IsogenyClassCounts(1, 2)
        assert isogeny_class_counts(biq(2, 1)) == IsogenyClassCounts(1, 1)

    def test_levels_apply_separately(self):
        counts = isogeny_class_counts(
            biq(17, 1), LevelData(index_U=3), LevelData(index_U=5)
        )
        assert counts == IsogenyClassCounts(3, 10)

    def test_maximal_level_identity(self):
        from cmtori.torus import class_number

        for spec in (iq(-5), iq(-23), biq(17, 1), biq(5, 1)):
            rep = class_number(spec)
            counts = isogeny_class_counts(spec)
            assert counts.lambda_count == rep.h_T1
            assert counts.similitude_count == rep.h_T
