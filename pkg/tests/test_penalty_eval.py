import math

import pytest
from hypothesis import given, settings, strategies as st

from expcodes import (CodeLengths, FiniteWeights, GeometricSource, GolombCode, PoissonSource,
                      avg_redundancy, expected_length, geometric_renyi_entropy,
                      golomb_penalty_closed_form, optimal_k, penalty, renyi_entropy,
                      shannon_entropy)
from expcodes.errors import DegenerateRegime, DivergentEntropy, DivergentPenalty, InvalidParameter
from expcodes.model import CustomSource
from expcodes.penalty_eval import penalty_bounds

UNARY = CodeLengths.unary()
P1_A2 = CodeLengths((2, 2, 2, 3), 1)


def direct_log_sum(log_terms):
    m = max(log_terms)
    return m + math.log(math.fsum(math.exp(x - m) for x in log_terms))


def test_geometric_unary():
    assert penalty(GeometricSource(0.5), UNARY, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert expected_length(GeometricSource(0.5), UNARY) == pytest.approx(2.0, rel=1e-15)
    assert expected_length(GeometricSource(0.5), UNARY, closed_form=False) == pytest.approx(2.0, rel=1e-12)


def test_finite_hand_value():
    src = FiniteWeights((0.5, 0.3, 0.2))
    assert penalty(src, CodeLengths((1, 2, 2)), 2.0) == pytest.approx(math.log2(3.0), rel=1e-15)


def test_finite_weights_are_normalized():
    a = penalty(FiniteWeights((5, 3, 2)), CodeLengths((1, 2, 2)), 2.0)
    assert a == pytest.approx(math.log2(3.0), rel=1e-15)


def test_uniform_constant_lengths():
    src = FiniteWeights((1, 1, 1, 1))
    assert expected_length(src, CodeLengths((2, 2, 2, 2))) == 2.0
    for alpha in (0.3, 0.5, 2.0, 5.0):
        assert renyi_entropy(src, alpha) == pytest.approx(2.0, rel=1e-14)


def test_poisson_expected_length_stable():
    src = PoissonSource(1.0)
    v1 = expected_length(src, P1_A2, 1e-8)
    v2 = expected_length(src, P1_A2, 5e-9)
    direct = math.fsum(src.pmf(i) * P1_A2[i] for i in range(200))
    assert abs(v1 - v2) <= 1e-8
    assert v1 == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("theta", [0.1, 0.5, 0.8, 0.95])
@pytest.mark.parametrize("a", [0.3, 0.6, 1.0, 1.2, 2.0, 4.0])
def test_golomb_closed_form_consistency(theta, a):
    k = optimal_k(theta, a)
    lengths = GolombCode(k).code_lengths()
    ref = golomb_penalty_closed_form(theta, a, k)
    assert penalty(GeometricSource(theta), lengths, a) == pytest.approx(ref, rel=1e-12)
    assert penalty(GeometricSource(theta), lengths, a, closed_form=False) == pytest.approx(ref, rel=1e-10)


def test_bounds_contain_direct():
    src = PoissonSource(3.0)
    lengths = CodeLengths((3, 3, 2, 2, 3, 3), 1)
    for a in (0.6, 1.5, 3.0):
        lo, hi = penalty_bounds(src, lengths, a, tol=1e-9)
        direct = direct_log_sum([src.log_pmf(i) + lengths[i] * math.log(a) for i in range(300)]) / math.log(a)
        assert lo - 1e-12 <= direct <= hi + 1e-12
        assert hi - lo <= 1e-9


def test_divergence():
    with pytest.raises(DivergentPenalty):
        penalty(GeometricSource(0.9), UNARY, 1.2)
    with pytest.raises(DivergentPenalty):
        penalty(GeometricSource(0.9), GolombCode(1).code_lengths(), 1.2, closed_form=False)


def test_heavy_tail_custom_source_divergent_entropy():
    # p(i) proportional to 1/((i+1)(i+2)): no geometric ratio certificate exists
    src = CustomSource(lambda i: 1.0 / ((i + 1) * (i + 2)), ratio=lambda j: 1.0)
    with pytest.raises(DivergentEntropy):
        renyi_entropy(src, 0.4)


def test_lengths_must_cover():
    with pytest.raises(InvalidParameter):
        penalty(FiniteWeights((0.5, 0.5)), CodeLengths((1,)), 2.0)
    with pytest.raises(InvalidParameter):
        penalty(GeometricSource(0.5), CodeLengths((1, 1)), 2.0)


def test_degenerate_penalty_defined_entropy_not():
    src = GeometricSource(0.5)
    assert penalty(src, UNARY, 0.4) == pytest.approx(
        1 + math.log(0.5 / (1 - 0.2)) / math.log(0.4), rel=1e-12)
    with pytest.raises(DegenerateRegime):
        avg_redundancy(src, UNARY, 0.4)


def test_renyi_examples():
    g = GeometricSource(0.9)
    assert renyi_entropy(g, 0.5) == pytest.approx(geometric_renyi_entropy(0.9, 2.0), rel=1e-12)
    assert renyi_entropy(g, 0.5, closed_form=False) == pytest.approx(geometric_renyi_entropy(0.9, 2.0), rel=1e-10)
    assert renyi_entropy(GeometricSource(0.5), 1.0) == pytest.approx(2.0, rel=1e-15)
    assert shannon_entropy(GeometricSource(0.5), closed_form=False) == pytest.approx(2.0, rel=1e-11)


def test_poisson_shannon_entropy_direct():
    src = PoissonSource(2.0)
    direct = -math.fsum(src.pmf(i) * math.log2(src.pmf(i)) for i in range(80))
    assert shannon_entropy(src) == pytest.approx(direct, abs=1e-11)


def test_avg_redundancy_examples():
    dyadic = FiniteWeights((0.5, 0.25, 0.125, 0.125))
    assert avg_redundancy(dyadic, CodeLengths((1, 2, 3, 3)), 1.0) == pytest.approx(0.0, abs=1e-15)
    src = FiniteWeights((0.4, 0.3, 0.2, 0.1))
    base = CodeLengths((1, 2, 3, 3))
    for a in (0.7, 1.0, 2.0):
        assert avg_redundancy(src, base.shifted(1), a) == pytest.approx(avg_redundancy(src, base, a) + 1, rel=1e-12)


@pytest.mark.parametrize("src,lengths", [
    (GeometricSource(0.7), GolombCode(2).code_lengths()),
    (PoissonSource(1.0), P1_A2),
    (FiniteWeights((0.4, 0.3, 0.2, 0.1)), CodeLengths((1, 2, 3, 3))),
])
def test_shift_invariance(src, lengths):
    for a in (0.6, 1.0, 1.3):
        base = penalty(src, lengths, a)
        for c in (1, 2):
            assert penalty(src, lengths.shifted(c), a) == pytest.approx(base + c, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 8), min_size=2, max_size=8), st.integers(0, 7),
       st.sampled_from([0.3, 0.7, 1.0, 1.5, 3.0]))
def test_monotone_in_each_length(head, idx, a):
    src = FiniteWeights(tuple(range(len(head), 0, -1)))
    idx %= len(head)
    bumped = list(head)
    bumped[idx] += 1
    assert penalty(src, CodeLengths(tuple(head)), a) <= penalty(src, CodeLengths(tuple(bumped)), a) + 1e-12


@pytest.mark.parametrize("src,lengths", [
    (GeometricSource(0.6), GolombCode(1).code_lengths()),
    (GeometricSource(0.9), GolombCode(7).code_lengths()),
    (PoissonSource(1.0), P1_A2),
    (FiniteWeights((0.4, 0.3, 0.2, 0.1)), CodeLengths((1, 2, 3, 3))),
])
def test_near_linear_matches_expected_length(src, lengths):
    el = expected_length(src, lengths)
    for a in (1 - 1e-6, 1 + 1e-6):
        assert abs(penalty(src, lengths, a) - el) < 1e-4


def test_halving_tol():
    src = PoissonSource(4.0)
    lengths = CodeLengths((4, 3, 3, 3, 3, 3, 4, 4), 1)
    for a in (0.7, 2.0):
        for tol in (1e-6, 1e-9):
            assert abs(penalty(src, lengths, a, tol) - penalty(src, lengths, a, tol / 2)) <= tol
