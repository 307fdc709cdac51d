"""Acceptance gate: one test per criterion, one PASS/FAIL line per criterion.

The lines are collected in ``RESULTS`` and printed at the end of the run by
the terminal-summary hook in ``conftest.py``. Every tolerance is pinned here.
"""
import contextlib
import math

import numpy as np

from conftest import random_kraus
from locc_lab import analysis, catalog
from locc_lab.numerics import Tolerance, diag_projector, is_proportional_unitary, numeric_rank, random_unitary
from locc_lab.measurement import LocalMeasurement, SeparablePovm
from locc_lab.protocol import (
    Leaf,
    Node,
    classify,
    simulate,
    verify_deterministic,
    verify_rank_preserving,
    verify_sep,
)
from locc_lab.sampling import operator_samples
from locc_lab.search import SearchSpec, search_protocols
from locc_lab.states import BipartiteState, residual, schmidt_rank

TOL = Tolerance(rel=1e-9, abs=1e-9)
POVM_TOL = 1e-12          # entrywise completeness of the SEP and rank-sum POVMs
PROB_TOL = 1e-9           # probability conservation over protocol trees
DOMINO_TOL = Tolerance(rel=1e-9, abs=1e-7)
DOMINO_SAMPLES = 10_000
DOMINO_SEED = 20_240_601
RANK_SAMPLES = 1_000
SEED = 12345

RESULTS = []


@contextlib.contextmanager
def criterion(n, text):
    try:
        yield
    except BaseException:
        RESULTS.append(f"FAIL criterion {n:>2}: {text}")
        raise
    RESULTS.append(f"PASS criterion {n:>2}: {text}")


def test_criterion_01_exstates():
    with criterion(1, "exstates-4x4 verifies at r=2, all 4 outcomes rank exactly 2"):
        e = catalog.build("exstates-4x4")
        rep = verify_deterministic(e.protocols[0], e.state_set, 2, TOL)
        assert rep.ok
        live = [r for r in rep.records if r.survivors]
        assert len(live) == 4
        assert all(r.residual_ranks[r.survivors[0]] == 2 for r in live)


def test_criterion_02_sep_povm():
    with criterion(2, "yu-3x3 SEP POVM complete, keeps r=2; rho-hat test false; 12 > 9; nmax=1 < 3"):
        e = catalog.build("yu-3x3")
        povm = e.protocols[0]
        assert isinstance(povm, SeparablePovm)
        assert np.abs(sum(povm.elements()) - np.eye(9)).max() < POVM_TOL
        assert verify_sep(povm, e.state_set, 2, TOL).ok
        assert analysis.theorem4_check(e.state_set, TOL) is False
        r2 = analysis.r2_bound(e.state_set, TOL)
        assert (r2.quantity, r2.bound, r2.satisfied) == (12, 9, False)
        assert analysis.nmax(3, 3, 2) == 1 < len(e.state_set) == 3


def test_criterion_03_beat_schmidt():
    with criterion(3, "beat-schmidt-5x5 verifies at r=2 under K2 while rank sum 12 > 10"):
        e = catalog.build("beat-schmidt-5x5")
        tree = e.protocols[0]
        assert verify_deterministic(tree, e.state_set, 2, TOL).ok
        assert classify(tree, TOL) == "K2"
        rep = analysis.rank_sum_bound(e.state_set, 2, tol=TOL)
        assert (rep.quantity, rep.bound, rep.satisfied) == (12, 10, False)


def test_criterion_04_sum10():
    with criterion(4, "sum10-3x3 verifies at r=1 while rank sum 10 > 9"):
        e = catalog.build("sum10-3x3")
        assert verify_deterministic(e.protocols[0], e.state_set, 1, TOL).ok
        rep = analysis.rank_sum_bound(e.state_set, 1, tol=TOL)
        assert (rep.quantity, rep.bound, rep.satisfied) == (10, 9, False)


def test_criterion_05_cascade():
    with criterion(5, "ccsp-4x6 cascade complete, Bob splits off {5} first, keeps ranks; "
                      "not-ccsp-3x3 has no first split yet a P0 protocol keeps ranks"):
        ss = catalog.ccsp_states()
        tree = analysis.cascading_partition(ss, tol=TOL)
        assert tree.complete
        party, groups = tree.splits()[0]
        assert party == "B" and (4,) in groups  # state 5, 0-based index 4
        assert verify_rank_preserving(analysis.partition_to_protocol(tree, ss, TOL), ss, TOL).ok

        ss = catalog.not_ccsp_states()
        everyone = tuple(range(len(ss)))
        for p in "AB":
            assert analysis.split_subset(ss, everyone, p, TOL) == [everyone]
        e = catalog.build("not-ccsp-3x3")
        assert classify(e.protocols[0], TOL) == "P0"
        assert verify_rank_preserving(e.protocols[0], ss, TOL).ok


def _rank_preserving_locc_entries():
    params = [{}] + [dict(da=6, db=4, r=3), dict(da=8, db=6, r=4)]
    for name in catalog.names():
        for p in (params if name == "schmidt-sum-B" else [{}]):
            e = catalog.build(name, p)
            for proto in e.protocols:
                if isinstance(proto, Node) and verify_rank_preserving(proto, e.state_set, TOL).ok:
                    yield e
                    break


def test_criterion_06_rho_hat():
    with criterion(6, "rho-hat orthogonality holds for every rank-preserving LOCC entry; "
                      "keep-rj set passes it yet search exhausts"):
        entries = list(_rank_preserving_locc_entries())
        assert {e.name for e in entries} >= {"ccsp-4x6", "not-ccsp-3x3", "block-diagonal"}
        for e in entries:
            assert analysis.theorem4_check(e.state_set, TOL), e.name
        ss = catalog.keep_rj_counterexample_states()
        assert analysis.theorem4_check(ss, TOL)
        res = search_protocols(ss, SearchSpec("P2", 2, 4), TOL)
        assert not res.found and res.family_exhausted


def test_criterion_07_domino():
    with criterion(7, f"domino predicate equals proportional-to-unitary on {DOMINO_SAMPLES} operators; "
                      "bennett9 search exhausts"):
        bad, kinds = 0, set()
        for kind, a in operator_samples(DOMINO_SAMPLES, DOMINO_SEED):
            kinds.add(kind)
            unitary = is_proportional_unitary(a, DOMINO_TOL)
            for party in "AB":
                bad += analysis.domino_preserves_orthogonality(a, party, DOMINO_TOL) != unitary
        assert bad == 0
        assert {"unitary", "rank-deficient", "scaled-column"} <= kinds
        res = search_protocols(catalog.bennett9_states(), SearchSpec("P2", 1, 4), TOL)
        assert not res.found and res.family_exhausted


def test_criterion_08_three_states():
    with criterion(8, "appc-threestates(8): D/2 on matched, D/4 on mismatched outcomes; "
                      "one-way cut is ambiguous; 4 + 8 > 8 + 8/3"):
        e = catalog.build("appc-threestates", dict(d=8))
        rep = verify_deterministic(e.protocols[0], e.state_set, 2, TOL)
        assert rep.ok
        for rec in rep.records:
            if rec.survivors:
                (j,) = rec.survivors
                matched = len(rec.path) == 2
                assert rec.residual_ranks[j] == (4 if matched else 2)
        assert any(len(r.path) == 2 and r.survivors for r in rep.records)
        assert any(len(r.path) == 4 and r.survivors for r in rep.records)
        cut = catalog.appc_one_way_truncation(8)
        assert "ambiguous" in verify_deterministic(cut, e.state_set, 1, TOL).reasons()
        t6 = analysis.theorem6_check(e.state_set, diag_projector(8, range(4)), tol=TOL)
        assert t6.quantity == 12 and math.isclose(t6.bound, 8 + 8 / 3) and not t6.satisfied


def test_criterion_09_shift_states():
    with criterion(9, "appd-shift(6,2) keeps rank 3 everywhere; appd-5-2-mixed outcomes (1,1)->2, (2,1)->1"):
        e = catalog.build("appd-shift", dict(d=6, n=2))
        rep = verify_deterministic(e.protocols[0], e.state_set, 3, TOL)
        assert rep.ok
        assert {r.residual_ranks[r.survivors[0]] for r in rep.records if r.survivors} == {3}

        e = catalog.build("appd-5-2-mixed")
        recs = {r.path: r for r in simulate(e.protocols[0], e.state_set, TOL)}
        # outcome labels are 1-based, paths 0-based
        r11, r21 = recs[(("A", 0), ("B", 0))], recs[(("A", 1), ("B", 0))]
        assert len(r11.survivors) == 1 and r11.residual_ranks[r11.survivors[0]] == 2
        assert len(r21.survivors) == 1 and r21.residual_ranks[r21.survivors[0]] == 1


def test_criterion_10_tightness():
    with criterion(10, "block-diagonal(5,5,2) has N=nmax=4 at r=2 under P0; "
                       "schmidt-sum-A(4,6,3) reaches rank sum 8 with a complete POVM"):
        e = catalog.build("block-diagonal", dict(da=5, db=5, r=2))
        assert len(e.state_set) == analysis.nmax(5, 5, 2) == 4
        assert verify_deterministic(e.protocols[0], e.state_set, 2, TOL).ok
        assert classify(e.protocols[0], TOL) == "P0"

        e = catalog.build("schmidt-sum-A", dict(da=4, db=6, r=3))
        assert sum(e.state_set.ranks(TOL)) == 4 * (6 // 3) == 8
        elements = catalog.schmidt_povm(4, 3)
        assert np.abs(sum(elements) - np.eye(4)).max() < POVM_TOL
        root = e.protocols[0]
        assert all(np.allclose(k.conj().T @ k, el) for k, el in zip(root.measurement.kraus, elements))
        assert verify_deterministic(root, e.state_set, 3, TOL).ok


def _random_tree(rng, dims, depth, party):
    if depth == 0:
        return Leaf(None)
    n = int(rng.integers(1, 4))
    ks = random_kraus(rng, dims[0] if party == "A" else dims[1], n)
    nxt = "B" if party == "A" else "A"
    return Node(LocalMeasurement(party, tuple(ks)),
                tuple(_random_tree(rng, dims, depth - 1, nxt) for _ in range(n)))


def test_criterion_11_property_suites():
    with criterion(11, f"rank monotonicity on {RANK_SAMPLES} instances; probability conservation "
                       f"within {PROB_TOL}; Schmidt ranks invariant under local unitaries"):
        rng = np.random.default_rng(SEED)
        for _ in range(RANK_SAMPLES):
            da, db = rng.integers(1, 6, size=2)
            k, ka, kb = (int(rng.integers(1, m + 1)) for m in (min(da, db), da, db))
            coeff = (rng.standard_normal((db, k)) @ rng.standard_normal((k, da))).astype(complex)
            a = rng.standard_normal((da, ka)) @ rng.standard_normal((ka, da))
            b = rng.standard_normal((db, kb)) @ rng.standard_normal((kb, db))
            s = BipartiteState(coeff)
            bound = min(schmidt_rank(s, TOL), numeric_rank(a, TOL), numeric_rank(b, TOL))
            assert schmidt_rank(residual(s, a, b), TOL) <= bound

        trees = []
        for name in catalog.names():
            e = catalog.build(name)
            trees += [(p, e.state_set) for p in e.protocols if isinstance(p, Node)]
        for _ in range(50):
            ss = catalog.sum10_states()
            trees.append((_random_tree(rng, ss.dims, 3, "AB"[int(rng.integers(2))]), ss))
        for tree, ss in trees:
            total = np.sum([r.probability_given_state for r in simulate(tree, ss, TOL)], axis=0)
            assert np.abs(total - 1).max() < PROB_TOL

        for name in catalog.names():
            ss = catalog.build(name).state_set
            ua, ub = random_unitary(ss.dim_a, rng), random_unitary(ss.dim_b, rng)
            assert [schmidt_rank(residual(s, ua, ub), TOL) for s in ss] == ss.ranks(TOL)
