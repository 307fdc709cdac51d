"""Shared oracles and hypothesis settings.

The oracles work on flat state vectors indexed ``a * D_B + b`` and use
explicit Kronecker products and partial traces, so they share no code with
the coefficient-matrix implementation under test.
"""
import os

import numpy as np
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def vec_from_terms(dims, terms):
    da, db = dims
    v = np.zeros(da * db, dtype=complex)
    for a, b, amp in terms:
        v[a * db + b] += amp
    return v


def oracle_residual(vec, a, b):
    return np.kron(a, b) @ vec


def oracle_reduced(vec, dims, party):
    da, db = dims
    rho = np.outer(vec, vec.conj()).reshape(da, db, da, db)
    return np.einsum("ajbj->ab", rho) if party == "A" else np.einsum("iaib->ab", rho)


def oracle_rank(vec, dims, rel=1e-10):
    """Schmidt rank as the number of nonzero eigenvalues of rho_A.

    Eigenvalues are squared Schmidt coefficients and eigvalsh has roundoff
    near 1e-16 * max, so the cutoff here is on the eigenvalues themselves.
    """
    w = np.linalg.eigvalsh(oracle_reduced(vec, dims, "A"))
    if w.max() <= 1e-18:
        return 0
    return int(np.sum(w > rel * w.max()))


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_kraus(rng, dim, n):
    """``n`` Kraus operators cut from a random isometry (complete by construction)."""
    z = random_complex(rng, (n * dim, dim))
    q, _ = np.linalg.qr(z)
    return [q[i * dim:(i + 1) * dim] for i in range(n)]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda l: int(l.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
