import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_kraus
from locc_lab import catalog
from locc_lab.measurement import (
    LocalMeasurement,
    SeparablePovm,
    SepOutcome,
    check_complete,
    check_projective,
    check_sep_complete,
)
from locc_lab.numerics import InvalidInputError

seeds = st.integers(0, 2**32 - 1)


def test_projective_blocks():
    m = LocalMeasurement.projective("A", 4, [[0, 1], [2, 3]])
    assert len(m) == 2 and m.dim == 4
    assert m.labels == ("1", "2")
    assert check_complete(m) and check_projective(m)
    assert np.array_equal(m.kraus[0].real, np.diag([1, 1, 0, 0]))


def test_with_remainder_completes_partial_blocks():
    m = LocalMeasurement.projective("B", 5, [[0], [3]]).with_remainder()
    assert len(m) == 3 and m.labels[-1] == "rest"
    assert check_projective(m)
    assert np.allclose(m.kraus[2], np.diag([0, 1, 1, 0, 1]))
    full = LocalMeasurement.projective("B", 2, [[0], [1]])
    assert full.with_remainder() is full


def test_with_remainder_has_no_roundoff_leak():
    # sum of K^dagger K equals I up to 1e-16; the remainder must be exactly zero-free
    h = 1 / np.sqrt(2)
    ks = [np.diag([1, h, 0]), np.diag([0, h, 1])]
    m = LocalMeasurement("B", tuple(ks)).with_remainder()
    assert len(m) == 2


def test_with_remainder_rejects_overcomplete():
    with pytest.raises(InvalidInputError):
        LocalMeasurement("A", (np.eye(2), np.eye(2))).with_remainder()


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_random_isometry_kraus_is_complete_not_projective(seed, d, n):
    ks = random_kraus(np.random.default_rng(seed), d, n)
    m = LocalMeasurement("A", tuple(ks))
    assert check_complete(m)
    if n > 1:
        assert not check_projective(m)


def test_projective_check_catches_each_defect():
    not_hermitian = LocalMeasurement("A", (np.array([[0, 1], [0, 0]]), np.array([[1, 0], [0, 0]])))
    assert not check_projective(not_hermitian)
    overlapping = LocalMeasurement("A", (np.diag([1, 0]), np.diag([1, 1])))
    assert not check_complete(overlapping) and not check_projective(overlapping)


@pytest.mark.parametrize("bad", [
    dict(party="C", kraus=(np.eye(2),)),
    dict(party="A", kraus=()),
    dict(party="A", kraus=(np.eye(2), np.eye(3))),
    dict(party="A", kraus=(np.ones((2, 3)),)),
    dict(party="A", kraus=(np.eye(2),), labels=("x", "y")),
])
def test_measurement_validation(bad):
    with pytest.raises(InvalidInputError):
        LocalMeasurement(**bad)


@given(seeds)
def test_measurement_json_round_trip(seed):
    ks = random_kraus(np.random.default_rng(seed), 3, 2)
    m = LocalMeasurement("B", tuple(ks), ("x", "y"))
    back = LocalMeasurement.from_json(m.to_json())
    assert back.party == "B" and back.labels == ("x", "y")
    assert all(np.array_equal(a, b) for a, b in zip(m.kraus, back.kraus))


def test_yu_povm_completeness():
    p = catalog.yu_povm()
    assert p.completeness_deviation() < 1e-12
    assert check_sep_complete(p)
    # each element is alpha (x_A) (x) (x_B) as written, not just some factorization
    e11 = catalog.YU_ALPHA * np.kron(np.diag([1, 0, catalog.YU_BETA]), np.diag([1, 0, catalog.YU_BETA]))
    assert np.allclose(p.elements()[0], e11)


def test_perturbed_yu_povm_is_incomplete():
    p = catalog.yu_povm(alpha=catalog.YU_ALPHA * (1 + 1e-6))
    assert not check_sep_complete(p)


def test_sep_povm_json_round_trip():
    p = catalog.yu_povm()
    back = SeparablePovm.from_json(p.to_json())
    assert back.dims == (3, 3)
    assert [o.declares for o in back.outcomes] == [0, 0, 1, 1, 2, 2]
    assert np.allclose(sum(back.elements()), np.eye(9), atol=1e-12)


def test_sep_povm_validation():
    with pytest.raises(InvalidInputError):
        SeparablePovm((2, 2), ())
    with pytest.raises(InvalidInputError):
        SeparablePovm((2, 2), (SepOutcome(np.eye(3), np.eye(2), 0),))
    with pytest.raises(InvalidInputError):
        SeparablePovm.from_json({"dims": [2, 2]})
