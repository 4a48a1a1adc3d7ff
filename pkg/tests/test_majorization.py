import numpy as np
from hypothesis import given, strategies as st

from histent.entropy import renyi, von_neumann
from histent.gram import EntanglementSpectrum, build_overlap_matrix, spectrum
from histent.majorization import (
    Regime,
    Relation,
    classify_step,
    compare,
    is_majorized,
    lemma1_extend,
    partial_sums,
)

probs = st.lists(st.floats(0, 1), min_size=1, max_size=20).filter(lambda x: sum(x) > 1e-3).map(
    lambda x: np.sort(np.array(x) / sum(x))[::-1])


def test_partial_sums():
    assert np.allclose(partial_sums([0.5, 0.3, 0.2]), [0.5, 0.8, 1.0])
    assert np.allclose(partial_sums([1.0]), [1.0])
    assert np.allclose(partial_sums(np.full(4, 0.25)), [0.25, 0.5, 0.75, 1.0])
    assert np.allclose(partial_sums([0.2, 0.5, 0.3]), [0.5, 0.8, 1.0])


@given(probs)
def test_partial_sum_invariants(lam):
    s = partial_sums(lam)
    assert np.all(np.diff(s) >= -1e-15)
    assert abs(s[-1] - 1) <= 1e-10
    assert np.all(s <= 1 + 1e-10)


@given(probs)
def test_uniform_and_delta_extremes(lam):
    n = lam.size
    assert is_majorized(np.full(n, 1 / n), lam)
    delta = np.zeros(n)
    delta[0] = 1.0
    assert is_majorized(lam, delta)


def test_incomparable_pair():
    v = compare([0.6, 0.2, 0.2], [0.5, 0.45, 0.05])
    assert v.relation is Relation.INCOMPARABLE
    assert v.slack < 0


def test_zero_padding():
    assert compare([0.5, 0.5], [1.0]).relation is Relation.FIRST_MAJORIZED_BY_SECOND
    assert compare([1.0], [1.0, 0.0, 0.0]).relation is Relation.EQUAL


@given(probs)
def test_reflexive(lam):
    assert compare(lam, lam).relation is Relation.EQUAL
    assert compare(lam, lam, 0.0).relation is Relation.EQUAL


@given(probs, probs)
def test_antisymmetry_and_entropy_order(a, b):
    v = compare(a, b, 0.0)
    back = compare(b, a, 0.0).relation
    if v.relation is Relation.FIRST_MAJORIZED_BY_SECOND:
        assert back is Relation.SECOND_MAJORIZED_BY_FIRST
        assert von_neumann(a).value >= von_neumann(b).value - 1e-10
        for q in (0.5, 2.0, 5.0):
            assert renyi(a, q).value >= renyi(b, q).value - 1e-10
    if v.relation is Relation.EQUAL:
        assert back is Relation.EQUAL


def test_lemma1_cases():
    assert np.allclose(lemma1_extend([1.0], 1).lambdas, [0.5, 0.5])
    out = lemma1_extend(EntanglementSpectrum.from_values([0.5, 0.3, 0.2]), 3)
    assert np.allclose(out.lambdas, [0.375, 0.25, 0.225, 0.15], atol=1e-15)
    assert np.allclose(partial_sums(out), [0.375, 0.625, 0.85, 1.0])


@given(probs)
def test_lemma1_always_majorized(lam):
    out = lemma1_extend(lam, lam.size)
    assert compare(out.lambdas, lam, 0.0).relation is Relation.FIRST_MAJORIZED_BY_SECOND


def test_lemma1_matches_far_append(rng):
    for _ in range(20):
        a = rng.uniform(-5, 5, int(rng.integers(1, 30)))
        n = a.size
        old = spectrum(build_overlap_matrix(a))
        new = spectrum(build_overlap_matrix(np.append(a, 40.0)))
        want = lemma1_extend(old, n).lambdas
        assert np.max(np.abs(new.lambdas[: want.size] - want)) <= 1e-8


def test_classify_orthogonal_step():
    lab = classify_step([0.5, 0.5], [1 / 3] * 3)
    assert lab.label is Regime.I and lab.strict


def test_classify_regime_two():
    lab = classify_step([0.5, 0.25, 0.25], [0.6, 0.2, 0.2])
    assert lab.label is Regime.II and lab.strict
    assert str(lab) == "II"


def test_classify_incomparable():
    assert classify_step([0.6, 0.2, 0.2], [0.5, 0.45, 0.05]).label is Regime.III


def test_classify_equal_is_weaker_claim():
    lab = classify_step([0.5, 0.5], [0.5, 0.5])
    assert lab.label is Regime.III


def test_classify_approximate():
    # new spectrum exceeds the old partial sums by 1e-4 at one point only
    old = [0.5, 0.3, 0.2]
    new = [0.5001, 0.2998, 0.2001]
    exact = compare(new, old, 0.0).relation
    assert exact is Relation.INCOMPARABLE
    lab = classify_step(old, new, 1e-3)
    assert lab.label is Regime.III  # both directions hold within tolerance
    lab = classify_step(old, [0.45, 0.3501, 0.1999], 1e-3)
    assert lab.label is Regime.I and not lab.strict


@given(probs, probs)
def test_label_consistency(a, b):
    lab = classify_step(a, b, 0.0)
    rel = compare(b, a, 0.0).relation
    if lab.label is Regime.I:
        assert rel is Relation.FIRST_MAJORIZED_BY_SECOND
    elif lab.label is Regime.II:
        assert rel is Relation.SECOND_MAJORIZED_BY_FIRST
