import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigenlab.eigenlist import (
    CertifiedPrefix,
    EigenvalueList,
    direct_sum,
    equal_by_moments,
    l1_distance,
    l1_distance_certified,
    list_from_values,
    moment,
    moments,
    tensor,
    tensor_square_equality_implies_equality,
    tensor_top_k,
    uniform,
)
from eigenlab.errors import NegativeEntry, NotAState, SizeCapExceeded

A = [3 / 4, 1 / 4]
B = [3 / 5, 1 / 5, 1 / 5]

entries = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
raw_lists = st.lists(entries, max_size=24)


def brute_sorted(values):
    return sorted((float(v) for v in values if v >= 1e-14), reverse=True)


def brute_products(a, b):
    return brute_sorted(x * y for x in a for y in b)


def random_state_list(rng, size):
    v = rng.random(size)
    return EigenvalueList(v / v.sum())


# -- construction -----------------------------------------------------------


def test_empty_list():
    assert len(list_from_values([])) == 0


def test_sorting_example():
    assert list(list_from_values([0.25, 0.75])) == [0.75, 0.25]


def test_paper_list_already_canonical():
    assert list(list_from_values([3 / 4, 1 / 4])) == [0.75, 0.25]


def test_negative_entry_rejected():
    with pytest.raises(NegativeEntry):
        list_from_values([0.5, -1e-6])


def test_tiny_negatives_clamped_and_trimmed():
    lst = list_from_values([0.5, -5e-13, 1e-15, 0.0])
    assert list(lst) == [0.5]


@given(raw_lists)
def test_sorting_idempotent(raw):
    lst = list_from_values(raw)
    assert list_from_values(lst.values) == lst
    assert list(lst) == brute_sorted(raw)


def test_values_are_read_only():
    lst = list_from_values(A)
    with pytest.raises(ValueError):
        lst.values[0] = 0.1


# -- l1 metric --------------------------------------------------------------


def test_l1_identical():
    assert l1_distance(A, A) == 0.0


def test_l1_paper_lists():
    # |3/4-3/5| + |1/4-1/5| + |0-1/5|
    expected = float(abs(Fraction(3, 4) - Fraction(3, 5)) + abs(Fraction(1, 4) - Fraction(1, 5)) + Fraction(1, 5))
    assert expected == pytest.approx(0.4, abs=1e-15)
    assert l1_distance(A, B) == pytest.approx(expected, abs=1e-15)


def test_l1_pure_vs_uniform_four():
    assert l1_distance([1.0], uniform(4)) == pytest.approx(1.5, abs=1e-15)


@given(raw_lists, raw_lists, raw_lists)
def test_metric_axioms(x, y, z):
    a, b, c = map(list_from_values, (x, y, z))
    assert l1_distance(a, b) >= 0
    assert l1_distance(a, b) == l1_distance(b, a)
    assert l1_distance(a, a) == 0
    assert l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12


# -- direct sum and tensor --------------------------------------------------


def test_direct_sum_paper_example():
    assert list(direct_sum(A, B)) == pytest.approx([3 / 4, 3 / 5, 1 / 4, 1 / 5, 1 / 5], abs=1e-15)


def test_direct_sum_with_empty():
    assert direct_sum(A, []) == list_from_values(A)


@settings(max_examples=200)
@given(st.lists(entries, max_size=32), st.lists(entries, max_size=32))
def test_direct_sum_matches_concatenate_sort(x, y):
    assert list(direct_sum(x, y)) == brute_sorted(x + y)


def test_tensor_paper_example():
    expected = [9 / 20, 3 / 20, 3 / 20, 3 / 20, 1 / 20, 1 / 20]
    assert list(tensor(A, B)) == pytest.approx(expected, abs=1e-15)


def test_tensor_identity():
    assert tensor([1.0], B) == list_from_values(B)


@settings(max_examples=200)
@given(st.lists(entries, max_size=32), st.lists(entries, max_size=32))
def test_tensor_matches_enumeration(x, y):
    assert list(tensor(x, y)) == brute_products(x, y)


@given(st.lists(entries, max_size=64), st.lists(entries, max_size=64))
def test_tensor_commutative_and_sum(x, y):
    ab, ba = tensor(x, y), tensor(y, x)
    assert np.max(np.abs(ab.values - ba.values), initial=0.0) <= 1e-12
    a, b = list_from_values(x), list_from_values(y)
    assert abs(ab.total() - a.total() * b.total()) <= 1e-12 * max(1.0, a.total() * b.total())


@given(st.lists(entries, max_size=12), st.lists(entries, max_size=12), st.lists(entries, max_size=12))
def test_tensor_associative(x, y, z):
    left = tensor(tensor(x, y), z)
    right = tensor(x, tensor(y, z))
    assert left.support == right.support or abs(left.support - right.support) <= 2
    n = max(left.support, right.support)
    assert np.max(np.abs(left.padded(n) - right.padded(n)), initial=0.0) <= 1e-12


def test_tensor_associative_at_64():
    rng = np.random.default_rng(3)
    a, b, c = (EigenvalueList(rng.random(64)) for _ in range(3))
    left = tensor(tensor(a, b), c)
    right = tensor(a, tensor(b, c))
    assert np.max(np.abs(left.values - right.values)) <= 1e-12


def test_tensor_size_cap():
    big = EigenvalueList(np.full(2048, 1 / 2048))
    with pytest.raises(SizeCapExceeded):
        tensor(big, big)


# -- certified top-k --------------------------------------------------------


def test_top_k_paper_example():
    cp = tensor_top_k(A, B, 2)
    assert list(cp.prefix) == pytest.approx([9 / 20, 3 / 20], abs=1e-15)
    assert cp.tail_mass_bound == pytest.approx(0.4, abs=1e-15)


def test_top_k_identity_full():
    lam = list_from_values(B)
    cp = tensor_top_k(lam, [1.0], len(lam))
    assert cp.prefix == lam
    assert cp.tail_mass_bound == 0.0


def test_top_k_beyond_total():
    cp = tensor_top_k(A, B, 100)
    assert cp.prefix == tensor(A, B)
    assert cp.complete


@pytest.mark.parametrize("seed", range(5))
def test_top_k_is_prefix_of_eager(seed):
    rng = np.random.default_rng(seed)
    a = EigenvalueList(rng.random(rng.integers(1, 40)))
    b = EigenvalueList(rng.random(rng.integers(1, 40)))
    eager = tensor(a, b)
    for k in range(1, eager.support + 2):
        cp = tensor_top_k(a, b, k)
        assert np.array_equal(cp.prefix.values, eager.values[:k])
        assert cp.tail_mass_bound >= 0
        assert cp.tail_mass_bound == pytest.approx(a.total() * b.total() - cp.prefix.total(), abs=1e-12)


def test_top_k_tie_order_is_deterministic():
    # every product equals 1/16; ties leave the heap in (i, j) order
    cp = tensor_top_k(uniform(4), uniform(4), 5)
    assert list(cp.prefix) == [1 / 16] * 5
    assert cp.tail_mass_bound == pytest.approx(11 / 16)


def test_top_k_rejects_nonpositive_k():
    with pytest.raises(ValueError):
        tensor_top_k(A, B, 0)


# -- certified distance -----------------------------------------------------


def test_certified_complete_is_exact():
    a = CertifiedPrefix(list_from_values(A), 0.0)
    b = CertifiedPrefix(list_from_values(B), 0.0)
    lo, hi = l1_distance_certified(a, b)
    assert lo == hi == l1_distance(A, B)


@pytest.mark.parametrize("k", [1, 3, 7, 15])
def test_certified_brackets_truncated_uniform(k):
    a_full = tensor(uniform(4), uniform(4))
    b_full = tensor(uniform(3), uniform(5))
    exact = l1_distance(a_full, b_full)
    ca = tensor_top_k(uniform(4), uniform(4), k)
    cb = tensor_top_k(uniform(3), uniform(5), k)
    lo, hi = l1_distance_certified(ca, cb)
    assert lo - 1e-12 <= exact <= hi + 1e-12
    assert hi - lo <= ca.tail_mass_bound + cb.tail_mass_bound + 1e-12


def test_certified_identical_truncations_contain_zero():
    c = tensor_top_k(A, B, 3)
    lo, hi = l1_distance_certified(c, c)
    assert lo <= 0.0 <= hi


@pytest.mark.parametrize("seed", range(20))
def test_certified_random_brackets(seed):
    rng = np.random.default_rng(100 + seed)
    a1, a2, b1, b2 = (EigenvalueList(rng.random(rng.integers(1, 12))) for _ in range(4))
    ka, kb = int(rng.integers(1, 30)), int(rng.integers(1, 30))
    exact = l1_distance(tensor(a1, a2), tensor(b1, b2))
    lo, hi = l1_distance_certified(tensor_top_k(a1, a2, ka), tensor_top_k(b1, b2, kb))
    assert lo - 1e-12 <= exact <= hi + 1e-12


# -- moments ----------------------------------------------------------------


def test_moment_examples():
    assert moment(A, 1) == pytest.approx(1.0, abs=1e-15)
    assert moment(A, 2) == pytest.approx(9 / 16 + 1 / 16, abs=1e-15)
    for q in (1, 2, 5):
        for n in (1, 2, 3):
            assert moment(uniform(q), n) == pytest.approx(q * q ** (-n), rel=1e-14)


def test_moment_multiplicative():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = random_state_list(rng, rng.integers(1, 20))
        b = random_state_list(rng, rng.integers(1, 20))
        ab = tensor(a, b)
        for n in range(1, 8):
            assert abs(moment(ab, n) - moment(a, n) * moment(b, n)) <= 1e-10


def test_equal_by_moments_examples():
    assert equal_by_moments(A, A, 4)
    assert not equal_by_moments(A, B, 3)
    assert not equal_by_moments([0.5, 0.5], [1.0], 2)


@given(raw_lists)
def test_equal_lists_have_equal_moments(raw):
    a = list_from_values(raw)
    b = list_from_values(list(reversed(raw)))
    assert equal_by_moments(a, b, None, 1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_moment_equality_forces_small_l1(seed):
    # brute-force perturbation search: no perturbation that moves the list by
    # 1e-4 or more in l1 keeps every power sum within 1e-9
    rng = np.random.default_rng(seed)
    a = random_state_list(rng, rng.integers(1, 8))
    n_max = a.support + 2
    for scale in 10.0 ** -np.arange(1, 13):
        for _ in range(20):
            delta = rng.standard_normal(a.support) * scale
            if rng.random() < 0.5:
                delta -= delta.mean()
            b = EigenvalueList(np.clip(a.values + delta, 0, None))
            if equal_by_moments(a, b, n_max, 1e-9):
                assert l1_distance(a, b) <= 1e-4
            if l1_distance(a, b) >= 1e-3:
                assert not equal_by_moments(a, b, n_max, 1e-9)


# -- tensor-square injectivity ----------------------------------------------


def test_square_report_equal_lists():
    rep = tensor_square_equality_implies_equality(A, A)
    assert rep.squares_equal and rep.lists_equal


def test_square_report_pure_vs_half():
    rep = tensor_square_equality_implies_equality([1.0], [0.5, 0.5])
    assert not rep.squares_equal and not rep.lists_equal
    assert rep.square_moments_a[1] == 1.0
    assert rep.square_moments_b[1] == pytest.approx(0.25)


def test_square_moments_match_brute_force():
    rng = np.random.default_rng(5)
    a = random_state_list(rng, 5)
    b = random_state_list(rng, 4)
    rep = tensor_square_equality_implies_equality(a, b)
    aa = tensor(a, a)
    for n in range(1, 6):
        assert rep.square_moments_a[n - 1] == pytest.approx(moment(aa, n), abs=1e-14)
    assert not rep.squares_equal and not rep.lists_equal


def test_square_report_needs_states():
    with pytest.raises(NotAState):
        tensor_square_equality_implies_equality([0.5], [1.0])


def test_moments_vector():
    assert np.allclose(moments(A, 3), [1.0, 0.625, 27 / 64 + 1 / 64])


def test_brute_products_oracle_is_independent():
    # sanity check on the oracle itself via itertools
    prods = sorted((x * y for x, y in itertools.product(A, B)), reverse=True)
    assert brute_products(A, B) == prods
