"""Randomized invariants, as a complement to the exhaustive sweeps."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from cmtori import cli
from cmtori.padic import hilbert_symbol
from cmtori.quadratic import is_squarefree

nonzero = st.integers(-60, 60).filter(lambda n: n != 0)
rationals = st.builds(Fraction, nonzero, st.integers(1, 40))
padic_primes = st.sampled_from([2, 3, 5, 7, 11, 13])


@given(rationals, rationals, padic_primes)
def test_hilbert_symmetric(a, b, p):
    assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)


@given(rationals, padic_primes)
def test_hilbert_a_minus_a(a, p):
    assert hilbert_symbol(a, -a, p) == 1


@given(rationals, rationals, nonzero, padic_primes)
def test_hilbert_square_class_invariance(a, b, c, p):
    assert hilbert_symbol(a * c * c, b, p) == hilbert_symbol(a, b, p)


@given(rationals, rationals, rationals, padic_primes)
@settings(max_examples=60)
def test_hilbert_bilinear(a, b, c, p):
    assert hilbert_symbol(a, b * c, p) == hilbert_symbol(a, b, p) * hilbert_symbol(
        a, c, p
    )


squarefree_neg = st.integers(-80, -1).filter(is_squarefree)
squarefree_d = st.integers(2, 80).filter(is_squarefree)
squarefree_j = st.integers(1, 80).filter(is_squarefree)

iq_texts = squarefree_neg.map(lambda m: f"iq:{m}")
biq_texts = st.tuples(squarefree_d, squarefree_j).map(lambda t: f"biq:{t[0]},{t[1]}")
component_texts = st.one_of(iq_texts, biq_texts)
spec_texts = st.one_of(
    component_texts,
    st.lists(component_texts, min_size=2, max_size=4).map(
        lambda parts: "prod:" + ";".join(parts)
    ),
)


@given(spec_texts)
def test_parser_round_trips(text):
    spec = cli.parse_field_spec(text)
    assert cli.render_field_spec(spec) == text
    assert cli.parse_field_spec(cli.render_field_spec(spec)) == spec
