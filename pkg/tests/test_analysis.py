import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from locc_lab import analysis, catalog
from locc_lab.numerics import InvalidInputError, diag_projector, is_proportional_unitary, random_unitary
from locc_lab.protocol import verify_rank_preserving
from locc_lab.states import BipartiteState, StateSet

seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("da,db,r,n", [(4, 4, 2, 4), (5, 5, 2, 4), (3, 3, 2, 1), (6, 4, 3, 2), (7, 5, 1, 35)])
def test_nmax(da, db, r, n):
    assert analysis.nmax(da, db, r) == n


@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 6))
def test_nmax_counts_disjoint_blocks(da, db, r):
    # one state per r x r block of a block-diagonal tiling
    assert analysis.nmax(da, db, r) == len(range(0, da - r + 1, r)) * len(range(0, db - r + 1, r))


def test_multi_nmax():
    assert analysis.multi_nmax([4, 4, 4], 2) == 8
    assert analysis.multi_nmax([5, 3], 2) == analysis.nmax(5, 3, 2)
    with pytest.raises(InvalidInputError):
        analysis.multi_nmax([4], 2)
    with pytest.raises(InvalidInputError):
        analysis.nmax(3, 3, 0)


def test_rank_sum_and_r2_reports():
    ss = catalog.beat_schmidt_states()
    rep = analysis.rank_sum_bound(ss, 2)
    assert (rep.quantity, rep.bound, rep.satisfied) == (12, 10, False)
    assert analysis.rank_sum_bound(ss, 2, swap_roles=True).bound == 10
    ss = catalog.schmidt_sum_b_states(7, 5, 2)
    assert analysis.rank_sum_bound(ss, 2).bound == 14
    assert analysis.rank_sum_bound(ss, 2, swap_roles=True).bound == 15
    rep = analysis.r2_bound(catalog.yu_states())
    assert (rep.quantity, rep.bound, rep.satisfied) == (12, 9, False)
    assert rep.to_json()["formula_id"] == "sum-R-squared"


def test_product_outcome_tradeoff():
    ss = catalog.exstates_states()
    p = diag_projector(4, [0, 1])
    rep = analysis.theorem5_check(ss, p, p, 1)
    assert (rep.quantity, rep.bound) == (2 * 2 + 4, 8) and rep.satisfied
    with pytest.raises(InvalidInputError):
        analysis.theorem5_check(ss, np.eye(4), np.eye(4), 0)  # both survive
    with pytest.raises(InvalidInputError):
        analysis.theorem5_check(ss, p, p, 0)  # annihilates the target
    assert analysis.theorem5_max_residual(4, 4, 4) == 2


def test_one_way_residual_tradeoff():
    ss = catalog.threestates_states(8)
    rep = analysis.theorem6_check(ss, diag_projector(8, range(4)))
    assert rep.quantity == 4 + 8
    assert math.isclose(rep.bound, 8 + 8 / 3)
    assert not rep.satisfied
    assert analysis.theorem6_check(ss, r_target=2).satisfied
    with pytest.raises(InvalidInputError):
        analysis.theorem6_check(ss)


def test_corollary_n_bound():
    assert analysis.corollary7_nbound(8, 8, 4, 8) == 2.0
    assert analysis.corollary7_nbound(8, 8, 2, 4) == math.inf


def test_cascade_ccsp():
    ss = catalog.ccsp_states()
    tree = analysis.cascading_partition(ss)
    assert tree.complete
    party, groups = tree.splits()[0]
    assert party == "B" and (4,) in groups
    proto = analysis.partition_to_protocol(tree, ss)
    assert verify_rank_preserving(proto, ss).ok
    with pytest.raises(InvalidInputError):
        analysis.cascading_partition(ss, first_party="C")


def test_cascade_forced_alice_first_is_incomplete():
    ss = catalog.ccsp_states()
    tree = analysis.cascading_partition(ss, first_party="A")
    assert not tree.complete
    with pytest.raises(InvalidInputError):
        analysis.partition_to_protocol(tree, ss)


def test_not_ccsp_has_no_first_split():
    ss = catalog.not_ccsp_states()
    for party in "AB":
        assert analysis.split_subset(ss, range(4), party) == [(0, 1, 2, 3)]
    assert not analysis.cascading_partition(ss).complete


def test_cascade_split_groups_are_mutually_orthogonal():
    ss = catalog.ccsp_states()
    groups = analysis.split_subset(ss, range(5), "B")
    assert groups == [(0, 1, 2, 3), (4,)]


def test_theorem4():
    assert not analysis.theorem4_check(catalog.yu_states())
    assert analysis.theorem4_check(catalog.keep_rj_counterexample_states())
    assert analysis.theorem4_check(catalog.bennett9_states())


def test_purification_check():
    ss = catalog.exstates_states()
    p = diag_projector(4, [0, 1])
    res = analysis.purification_check(ss, p, p)
    assert res.survivors == [1] and res.pure and res.residual_rank == 2
    res = analysis.purification_check(ss, np.eye(4), np.eye(4))
    assert not res.pure
    res = analysis.purification_check(ss, np.zeros((4, 4)), np.eye(4))
    assert res.survivors == [] and not res.pure


def test_purification_accepts_parallel_survivors():
    # two states that agree on the kept corner give one pure residual
    s1 = BipartiteState.from_terms((2, 2), [(0, 0, 1), (1, 1, 1)])
    s2 = BipartiteState.from_terms((2, 2), [(0, 0, 1), (1, 1, -1)])
    res = analysis.purification_check(StateSet((s1, s2)), diag_projector(2, [0]), np.eye(2))
    assert res.pure and res.survivors == [0, 1] and res.residual_rank == 1


def test_domino_fixed_cases():
    for party in "AB":
        assert analysis.domino_preserves_orthogonality(np.eye(3), party)
        assert not analysis.domino_preserves_orthogonality(np.zeros((3, 3)), party)
        assert not analysis.domino_preserves_orthogonality(np.diag([1, 1, 0]), party)
        assert not analysis.domino_preserves_orthogonality(np.diag([1, 1, 2]), party)
    with pytest.raises(InvalidInputError):
        analysis.domino_preserves_orthogonality(np.eye(2))


@given(seeds, st.floats(1e-3, 1e3))
def test_domino_accepts_scaled_unitaries(seed, c):
    u = random_unitary(3, np.random.default_rng(seed))
    assert analysis.domino_preserves_orthogonality(c * u, "A")
    assert analysis.domino_preserves_orthogonality(c * u, "B")


@given(seeds, st.sampled_from([1e-3, 1e-2, 0.3, -0.3]), st.integers(0, 2))
def test_domino_rejects_unitaries_with_a_stretched_column(seed, eps, col):
    rng = np.random.default_rng(seed)
    d = np.ones(3)
    d[col] += eps
    a = random_unitary(3, rng) @ np.diag(d)
    assert not is_proportional_unitary(a)
    assert not analysis.domino_preserves_orthogonality(a, "A")
    assert not analysis.domino_preserves_orthogonality(a, "B")


@given(seeds)
def test_domino_equivalence_on_gaussian_operators(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert analysis.domino_preserves_orthogonality(a) == is_proportional_unitary(a)
