"""Constructors for the worked examples: state sets plus the protocols that
distinguish them.

Index conventions: kets ``|mn>`` put Alice's index first. Shift
constructions use three different moduli, noted per entry: ``mod D_B`` for
Bob's shifted index in the rank-sum sets, ``mod D_A`` for Alice's in the
second rank-sum family, and ``mod D`` for the square-system sets.

Some protocols are only sketched in the source material (the final moves
of ``beat-schmidt-5x5``, ``sum10-3x3``, ``appc-5dim-3states``, Bob's side
of the rank-sum constructions, ``one-way-full-rank``). Those steps are
completed by :func:`support_completion`: the last party projects onto the
supports of the surviving states' reduced density operators. The verifier
is what vouches for them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis import cascading_partition, partition_to_protocol
from .measurement import LocalMeasurement, SeparablePovm, SepOutcome
from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    Tolerance,
    basis_projector,
    diag_projector,
    support_projector,
)
from .protocol import (
    Leaf,
    Node,
    classify,
    iter_leaves,
    verify_deterministic,
    verify_rank_preserving,
    verify_sep,
    verify_sep_rank_preserving,
)
from .states import BipartiteState, StateSet, reduced_density, residual

SQ2 = math.sqrt(2.0)


def _st(dims, terms, label):
    return BipartiteState.from_terms(dims, [(a, b, amp) for a, b, amp in terms], label)


def _diag_terms(pairs, amp=1.0):
    return [(a, b, amp) for a, b in pairs]


# -- tree helpers -------------------------------------------------------------

def measure(party, dim, blocks, children, basis=None, tol: Tolerance = DEFAULT_TOL):
    """Projective node on index blocks; an uncovered remainder becomes an extra
    outcome whose child is ``rest_child`` (defaults to an error leaf)."""
    m = LocalMeasurement.projective(party, dim, blocks, basis)
    children = list(children)
    rest_child = children.pop() if len(children) == len(blocks) + 1 else Leaf(None)
    full = m.with_remainder(tol)
    if len(full) > len(m):
        children.append(rest_child)
    return Node(full, tuple(children))


def kraus_node(party, ops, children, labels=()):
    return Node(LocalMeasurement(party, tuple(ops), labels), tuple(children))


def support_completion(ss: StateSet, a_total, b_total, party: str,
                       tol: Tolerance = DEFAULT_TOL) -> Node | Leaf:
    """Final measurement by ``party``: project onto the support of each
    surviving residual's reduced density operator, plus a remainder."""
    survivors = []
    for j, st in enumerate(ss.states):
        res = residual(st, a_total, b_total)
        if res.norm > tol.abs * st.norm:
            survivors.append((j, res))
    if len(survivors) <= 1:
        return Leaf(survivors[0][0] if survivors else None)
    projectors = [support_projector(reduced_density(r, party), tol) for _, r in survivors]
    m = LocalMeasurement(party, tuple(projectors)).with_remainder(tol)
    children = [Leaf(j) for j, _ in survivors] + [Leaf(None)] * (len(m) - len(survivors))
    return Node(m, tuple(children))


def declare_by_survivor(tree, ss: StateSet, tol: Tolerance = DEFAULT_TOL):
    """Replace every leaf verdict by the unique state surviving that path
    (``None`` when nothing survives). Paths with several survivors keep
    their original verdict; verification will flag them."""
    verdicts = {}
    da, db = ss.dims
    for path, leaf, a_ops, b_ops in iter_leaves(tree):
        a = np.eye(da)
        for k in a_ops:
            a = k @ a
        b = np.eye(db)
        for k in b_ops:
            b = k @ b
        alive = [j for j, st in enumerate(ss.states)
                 if residual(st, a, b).norm > tol.abs * st.norm]
        verdicts[path] = alive[0] if len(alive) == 1 else (None if not alive else leaf.verdict)

    def rebuild(t, path):
        if isinstance(t, Leaf):
            return Leaf(verdicts[path])
        return Node(t.measurement, tuple(rebuild(c, path + ((t.party, i),))
                                         for i, c in enumerate(t.children)))

    return rebuild(tree, ())


def grid_protocol(ss: StateSet, a_blocks, b_blocks, a_basis=None, b_basis=None):
    """No-communication protocol: Alice measures her blocks, Bob his (the
    same measurement under every Alice outcome), leaves by survivor."""
    da, db = ss.dims
    bob = measure("B", db, b_blocks, [Leaf(None)] * len(b_blocks), b_basis)
    tree = measure("A", da, a_blocks, [bob] * (len(a_blocks) + 1), a_basis)
    return declare_by_survivor(tree, ss)


def blocks_of(dim: int, size: int):
    return [list(range(s, min(s + size, dim))) for s in range(0, dim, size)]


# -- state sets ---------------------------------------------------------------

def exstates_states() -> StateSet:
    d = (4, 4)
    return StateSet((
        _st(d, _diag_terms([(0, 2), (1, 3), (2, 0), (3, 1)]), "1"),
        _st(d, _diag_terms([(0, 0), (1, 1), (2, 2), (3, 3)]), "2"),
    ), "exstates-4x4")


def yu_states() -> StateSet:
    d = (3, 3)
    return StateSet((
        _st(d, _diag_terms([(0, 0), (2, 2)]), "1"),
        _st(d, _diag_terms([(0, 1), (1, 2)]), "2"),
        _st(d, _diag_terms([(1, 0), (2, 1)]), "3"),
    ), "yu-3x3")


YU_ALPHA = (2 - math.sqrt(3)) / 4
YU_BETA = 2 + math.sqrt(3)


def yu_povm(alpha: float = YU_ALPHA, beta: float = YU_BETA) -> SeparablePovm:
    """Six product outcomes; outcome (m, n) declares state m."""
    # (Alice diagonal, Bob diagonal) of each POVM element before the alpha factor
    shapes = [
        ([1, 0, beta], [1, 0, beta]), ([beta, 0, 1], [beta, 0, 1]),
        ([1, beta, 0], [0, 1, beta]), ([beta, 1, 0], [0, beta, 1]),
        ([0, 1, beta], [1, beta, 0]), ([0, beta, 1], [beta, 1, 0]),
    ]
    outcomes = tuple(
        SepOutcome(math.sqrt(alpha) * np.diag(np.sqrt(xa)), np.diag(np.sqrt(xb)), i // 2)
        for i, (xa, xb) in enumerate(shapes)
    )
    return SeparablePovm((3, 3), outcomes)


def beat_schmidt_states() -> StateSet:
    d = (5, 5)
    return StateSet((
        _st(d, _diag_terms([(0, 0), (1, 1)]), "1"),
        _st(d, _diag_terms([(0, 2), (1, 3), (2, 4)]), "2"),
        _st(d, _diag_terms([(2, 0), (3, 1), (4, 2)]), "3"),
        _st(d, _diag_terms([(0, 4), (2, 2), (3, 3), (4, 0)]), "4"),
    ), "beat-schmidt-5x5")


def beat_schmidt_protocol(ss: StateSet):
    h = 1 / SQ2
    a1, a2 = np.diag([1, 1, 1, h, 0]), np.diag([0, 0, 0, h, 1])
    b1, b2, b3 = np.diag([1, 1, 0, 0, 0]), np.diag([0, 0, 1, h, 0]), np.diag([0, 0, 0, h, 1])
    ident = np.eye(5)
    after_a1 = [support_completion(ss, a1, b, "A") for b in (b1, b2, b3)]
    bob_after_a1 = kraus_node("B", (b1, b2, b3), after_a1, ("B1", "B2", "B3"))
    bob_after_a2 = support_completion(ss, a2, ident, "B")
    return kraus_node("A", (a1, a2), (bob_after_a1, bob_after_a2), ("A1", "A2"))


PHI_BASIS = np.array([[1, 2, 2], [2, 1, -2], [2, -2, 1]], dtype=float).T / 3  # columns Phi_k


def sum10_states() -> StateSet:
    e = np.eye(3)
    phi = [PHI_BASIS[:, k] for k in range(3)]
    h = 1 / SQ2
    psi1 = [(h * e[0], e[0]), (h * phi[0], e[2]), (e[0] + e[1], e[1])]
    psi2 = [(h * e[0], e[0]), (h * phi[0], e[2]), (-(e[0] + e[2]), e[1])]
    return StateSet((
        BipartiteState.from_product_sum(psi1, "1"),
        BipartiteState.from_product_sum(psi2, "2"),
        BipartiteState.from_product_sum([(e[1], e[0])], "3"),
        BipartiteState.from_product_sum([(e[2], e[0])], "4"),
        BipartiteState.from_product_sum([(phi[1], e[2])], "5"),
        BipartiteState.from_product_sum([(phi[2], e[2])], "6"),
    ), "sum10-3x3")


def sum10_protocol(ss: StateSet):
    h = 1 / SQ2
    b1, b2 = np.diag([1, h, 0]), np.diag([0, h, 1])
    std, phi = np.eye(3), PHI_BASIS

    def alice(b_op, basis):
        children = []
        for k in range(3):
            a_op = basis_projector(basis, [k])
            children.append(support_completion(ss, a_op, b_op, "B"))
        return measure("A", 3, [[0], [1], [2]], children, basis)

    return kraus_node("B", (b1, b2), (alice(b1, std), alice(b2, phi)), ("B1", "B2"))


def ccsp_states() -> StateSet:
    d = (4, 6)
    return StateSet((
        _st(d, _diag_terms([(0, 0), (1, 1)]), "1"),
        _st(d, _diag_terms([(0, 2), (1, 3)]), "2"),
        _st(d, [(2, 0, 1), (2, 2, 1), (3, 1, 1), (3, 3, 1)], "3"),
        _st(d, [(2, 0, 1), (2, 2, -1), (3, 1, 1), (3, 3, -1)], "4"),
        _st(d, _diag_terms([(1, 4), (2, 5)]), "5"),
    ), "ccsp-4x6")


def not_ccsp_states() -> StateSet:
    d = (3, 3)
    return StateSet((
        _st(d, _diag_terms([(0, 0), (1, 0)]), "1"),
        _st(d, _diag_terms([(2, 0), (2, 1)]), "2"),
        _st(d, _diag_terms([(0, 1), (0, 2)]), "3"),
        _st(d, _diag_terms([(1, 2), (2, 2)]), "4"),
    ), "not-ccsp-3x3")


def keep_rj_counterexample_states() -> StateSet:
    d = (5, 5)
    return StateSet((
        _st(d, _diag_terms([(0, 1), (1, 2)]), "1"),
        _st(d, _diag_terms([(1, 3), (2, 4)]), "2"),
        _st(d, _diag_terms([(2, 0), (3, 1)]), "3"),
        _st(d, _diag_terms([(3, 2), (4, 3)]), "4"),
    ), "keep-rj-counterexample-5x5")


def bennett9_states() -> StateSet:
    d = (3, 3)
    return StateSet((
        _st(d, [(1, 1, 1)], "1"),
        _st(d, [(0, 0, 1), (0, 1, 1)], "2"),
        _st(d, [(0, 0, 1), (0, 1, -1)], "3"),
        _st(d, [(2, 1, 1), (2, 2, 1)], "4"),
        _st(d, [(2, 1, 1), (2, 2, -1)], "5"),
        _st(d, [(1, 0, 1), (2, 0, 1)], "6"),
        _st(d, [(1, 0, 1), (2, 0, -1)], "7"),
        _st(d, [(0, 2, 1), (1, 2, 1)], "8"),
        _st(d, [(0, 2, 1), (1, 2, -1)], "9"),
    ), "bennett9")


def schmidt_povm(da: int, r: int) -> list[np.ndarray]:
    """Alice's POVM elements for the rank-sum constructions (diagonal).

    With D_A = n_A r + a, the last two elements overlap when a != 0 and the
    overlapping diagonal weights are halved.
    """
    n_a, a = divmod(da, r)
    elements = []
    for m in range(1, n_a):
        elements.append(diag_projector(da, range((m - 1) * r, m * r)))
    w_last = np.zeros(da)
    for k in range(r):
        w_last[k + (n_a - 1) * r] = 0.5 if (a and k >= a) else 1.0
    elements.append(np.diag(w_last).astype(complex))
    if a:
        w_extra = np.zeros(da)
        for k in range(r):
            w_extra[k + da - r] = 0.5 if k <= r - a - 1 else 1.0
        elements.append(np.diag(w_extra).astype(complex))
    return elements


def _schmidt_protocol(ss: StateSet, r: int):
    kraus = [np.sqrt(e) for e in schmidt_povm(ss.dim_a, r)]  # elements are diagonal
    ident = np.eye(ss.dim_b)
    children = [support_completion(ss, k, ident, "B") for k in kraus]
    return kraus_node("A", kraus, children, tuple(f"E{m + 1}" for m in range(len(kraus))))


def schmidt_sum_a_states(da: int, db: int, r: int) -> StateSet:
    if not (1 <= r <= da <= db):
        raise InvalidInputError("schmidt-sum-A needs 1 <= r <= D_A <= D_B")
    n_b = db // r
    states = tuple(
        _st((da, db), [(k, (k + (j - 1) * r) % db, 1) for k in range(da)], str(j))
        for j in range(1, n_b + 1)
    )
    return StateSet(states, f"schmidt-sum-A({da},{db},{r})")


def schmidt_sum_b_states(da: int, db: int, r: int) -> StateSet:
    n_a, a = divmod(da, r) if r >= 1 else (0, 0)
    if not (1 <= r <= db < da) or da > n_a * db:
        raise InvalidInputError("schmidt-sum-B needs 1 <= r <= D_B < D_A <= n_A D_B")
    n_b = db // r
    states = []
    for n in range(1, n_a + 1):
        k_n = r - 1 if n < n_a else r + a - 1
        for j in range(1, n_b + 1):
            terms = [((k + (n - 1) * r) % da, (k + (j - 1) * r) % db, 1) for k in range(k_n + 1)]
            states.append(_st((da, db), terms, str((n - 1) * n_b + j)))
    ss = StateSet(tuple(states), f"schmidt-sum-B({da},{db},{r})")
    want = [r] * (n_b * (n_a - 1)) + [r + a] * n_b
    if ss.ranks() != want:
        raise InvalidInputError(f"schmidt-sum-B({da},{db},{r}) does not give ranks {want}")
    return ss


def one_way_full_rank_states(da: int, db: int) -> StateSet:
    if not (2 <= da <= db):
        raise InvalidInputError("one-way-full-rank needs 2 <= D_A <= D_B")
    return StateSet(tuple(
        _st((da, db), [(k, (k + j - 1) % db, 1) for k in range(da)], str(j))
        for j in range(1, db + 1)
    ), f"one-way-full-rank({da},{db})")


def threestates_states(d: int) -> StateSet:
    if d < 8 or d % 4:
        raise InvalidInputError("appc-threestates needs D >= 8 and a multiple of 4")
    h = d // 2
    return StateSet((
        _st((d, d), [(k, k, 1) for k in range(d)], "1"),
        _st((d, d), [(k, (k + h) % d, 1) for k in range(d)], "2"),
        _st((d, d), [(k, (k + h) % d, (-1) ** k) for k in range(d)], "3"),
    ), f"appc-threestates({d})")


def _pm_projectors(d: int, offset: int) -> list[np.ndarray]:
    """P_+ and P_- pairing |2k + offset> with |2k + 1 + offset>, k < D/4."""
    out = []
    for sign in (1, -1):
        p = np.zeros((d, d), dtype=complex)
        for k in range(d // 4):
            v = np.zeros(d)
            v[2 * k + offset], v[2 * k + 1 + offset] = 1, sign
            p += np.outer(v, v) / 2
        out.append(p)
    return out


def threestates_protocol(ss: StateSet):
    d = ss.dim_a
    h = d // 2
    low, high = list(range(h)), list(range(h, d))
    ident = np.eye(d)

    def finish(bob_offset, alice_offset):
        alice = LocalMeasurement("A", tuple(_pm_projectors(d, alice_offset)), ("A+", "A-"))
        alice = alice.with_remainder()
        alice_node = Node(alice, (Leaf(None),) * len(alice))
        bob = LocalMeasurement("B", tuple(_pm_projectors(d, bob_offset)), ("B+", "B-"))
        bob = bob.with_remainder()
        return Node(bob, (alice_node, alice_node) + (Leaf(None),) * (len(bob) - 2))

    bob_after_a1 = measure("B", d, [low, high], [Leaf(0), finish(h, 0)])
    bob_after_a2 = measure("B", d, [low, high], [finish(0, h), Leaf(0)])
    tree = measure("A", d, [low, high], [bob_after_a1, bob_after_a2])
    return declare_by_survivor(tree, ss)


def appc_one_way_truncation(d: int = 8):
    """The first round of the three-state protocol alone (fails on mismatches)."""
    from .protocol import truncate

    ss = threestates_states(d)
    return truncate(threestates_protocol(ss), 2)


def five_dim_three_states() -> StateSet:
    d = 5
    return StateSet(tuple(
        _st((d, d), [(k, (k + s) % d, 1) for k in range(d)], str(i))
        for i, s in enumerate((0, 2, 3))
    ), "appc-5dim-3states")


def five_dim_protocol(ss: StateSet):
    d = 5
    low, high = [0, 1], [2, 3, 4]
    p = {tuple(x): diag_projector(d, x) for x in ([0], [1], [0, 1], [2, 3], [4], high)}

    def alice_then_bob(b_op, blocks):
        children = [support_completion(ss, p[tuple(bl)], b_op, "B") for bl in blocks]
        return measure("A", d, blocks, children)

    def bob_then_alice(a_op, blocks):
        children = [support_completion(ss, a_op, p[tuple(bl)], "A") for bl in blocks]
        return measure("B", d, blocks, children)

    bob_after_low = measure("B", d, [low, high], [
        Leaf(0),
        alice_then_bob(p[(2, 3, 4)], [[0], [1]]),
    ])
    bob_after_high = measure("B", d, [low, high], [
        bob_then_alice(p[(2, 3, 4)], [[0], [1]]),
        alice_then_bob(p[(2, 3, 4)], [[2, 3], [4]]),
    ])
    tree = measure("A", d, [low, high], [bob_after_low, bob_after_high])
    return declare_by_survivor(tree, ss)


def shift_states(d: int, n: int) -> StateSet:
    if n < 2 or d < n:
        raise InvalidInputError("appd-shift needs N >= 2 and D >= N")
    q = d // n
    if d % q:
        raise InvalidInputError(f"appd-shift needs D = (N + n) floor(D/N); {d} is not a multiple of {q}")
    return StateSet(tuple(
        _st((d, d), [(k, (k + q * (j - 1)) % d, 1) for k in range(d)], str(j))
        for j in range(1, n + 1)
    ), f"appd-shift({d},{n})")


def appd_mixed_states() -> StateSet:
    d = (5, 5)
    return StateSet((
        _st(d, [(k, k, 1) for k in range(5)], "1"),
        _st(d, _diag_terms([(0, 2), (1, 3), (2, 0), (3, 4), (4, 1)]), "2"),
    ), "appd-5-2-mixed")


def block_diagonal_states(da: int, db: int, r: int) -> StateSet:
    if not (1 <= r <= min(da, db)):
        raise InvalidInputError("block-diagonal needs 1 <= r <= min(D_A, D_B)")
    states = []
    for bi in range(da // r):
        for bj in range(db // r):
            terms = [(bi * r + k, bj * r + k, 1) for k in range(r)]
            states.append(_st((da, db), terms, str(len(states) + 1)))
    return StateSet(tuple(states), f"block-diagonal({da},{db},{r})")


# -- registry -------------------------------------------------------------------

@dataclass(frozen=True)
class Expected:
    distinguishable: str  # "yes" | "no" | "unknown-under-search"
    r_floor: int
    rank_preserving: bool
    protocol_class: str | None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    state_set: StateSet
    protocols: tuple
    expected: Expected
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Spec:
    builder: Callable
    defaults: dict
    summary: str


def _exstates(_):
    ss = exstates_states()
    proto = grid_protocol(ss, [[0, 1], [2, 3]], [[0, 1], [2, 3]])
    return ss, (proto,), Expected("yes", 2, False, "P0")


def _yu(_):
    return yu_states(), (yu_povm(),), Expected("yes", 2, True, "SEP")


def _beat(_):
    ss = beat_schmidt_states()
    return ss, (beat_schmidt_protocol(ss),), Expected("yes", 2, False, "K2", {"rank_sum": 12})


def _sum10(_):
    ss = sum10_states()
    return ss, (sum10_protocol(ss),), Expected("yes", 1, False, "K2", {"rank_sum": 10})


def _ccsp(_):
    ss = ccsp_states()
    proto = partition_to_protocol(cascading_partition(ss), ss)
    return ss, (proto,), Expected("yes", 2, True, "P2")


def _not_ccsp(_):
    ss = not_ccsp_states()
    proto = grid_protocol(ss, [[0], [1], [2]], [[0], [1], [2]])
    return ss, (proto,), Expected("yes", 1, True, "P0")


def _keep_rj(_):
    return keep_rj_counterexample_states(), (), Expected("unknown-under-search", 2, True, None)


def _bennett(_):
    return bennett9_states(), (), Expected("unknown-under-search", 1, True, None)


def _schmidt_a(p):
    da, db, r = p["da"], p["db"], p["r"]
    ss = schmidt_sum_a_states(da, db, r)
    n_a = da // r
    # Bob's blocks only depend on Alice's outcome when the shifts wrap unevenly
    cls = "K1" if da % r else ("P1" if n_a > 1 and db % r else "P0")
    return ss, (_schmidt_protocol(ss, r),), Expected(
        "yes", r, n_a == 1 and da % r == 0, cls, {"rank_sum": da * (db // r)})


def _schmidt_b(p):
    da, db, r = p["da"], p["db"], p["r"]
    ss = schmidt_sum_b_states(da, db, r)
    # Bob's support for state (n, j) depends on j alone
    cls = "K1" if da % r else "P0"
    return ss, (_schmidt_protocol(ss, r),), Expected(
        "yes", r, da % r == 0, cls, {"rank_sum": da * (db // r)})


def _one_way(p):
    da, db = p["da"], p["db"]
    ss = one_way_full_rank_states(da, db)
    ident = np.eye(db)
    children = [support_completion(ss, diag_projector(da, [k]), ident, "B") for k in range(da)]
    proto = measure("A", da, [[k] for k in range(da)], children)
    return ss, (proto,), Expected("yes", 1, False, "P0",
                                  {"n_states": db})


def _threestates(p):
    ss = threestates_states(p["d"])
    return ss, (threestates_protocol(ss),), Expected("yes", p["d"] // 4, False, "P2")


def _five_dim(_):
    ss = five_dim_three_states()
    return ss, (five_dim_protocol(ss),), Expected("yes", 1, False, "P2")


def _shift(p):
    d, n = p["d"], p["n"]
    ss = shift_states(d, n)
    q = d // n
    proto = grid_protocol(ss, blocks_of(d, q), blocks_of(d, q))
    return ss, (proto,), Expected("yes", q, False, "P0")


def _mixed(_):
    ss = appd_mixed_states()
    blocks = [[0, 1], [2, 3], [4]]
    return ss, (grid_protocol(ss, blocks, blocks),), Expected("yes", 1, False, "P0")


def _block(p):
    da, db, r = p["da"], p["db"], p["r"]
    ss = block_diagonal_states(da, db, r)
    proto = grid_protocol(ss, blocks_of(da - da % r, r), blocks_of(db - db % r, r))
    from .analysis import nmax

    return ss, (proto,), Expected("yes", r, True, "P0", {"n_states": nmax(da, db, r)})


REGISTRY: dict[str, _Spec] = {
    "exstates-4x4": _Spec(_exstates, {}, "two rank-4 states, P0 keeping rank 2"),
    "yu-3x3": _Spec(_yu, {}, "three rank-2 states, SEP POVM keeping rank 2"),
    "beat-schmidt-5x5": _Spec(_beat, {}, "rank sum 12 > 10, two-way Kraus protocol"),
    "sum10-3x3": _Spec(_sum10, {}, "rank sum 10 > 9 = D_A D_B, two-way"),
    "ccsp-4x6": _Spec(_ccsp, {}, "complete cascading partition, P2 keeps states intact"),
    "not-ccsp-3x3": _Spec(_not_ccsp, {}, "product states, no cascade split, P0"),
    "keep-rj-counterexample-5x5": _Spec(_keep_rj, {}, "orthogonal rho-hat yet stuck"),
    "bennett9": _Spec(_bennett, {}, "nine domino product states"),
    "schmidt-sum-A": _Spec(_schmidt_a, {"da": 4, "db": 6, "r": 3}, "rank-sum bound reached, D_A <= D_B"),
    "schmidt-sum-B": _Spec(_schmidt_b, {"da": 7, "db": 5, "r": 2}, "rank-sum bound reached, D_B < D_A"),
    "one-way-full-rank": _Spec(_one_way, {"da": 3, "db": 4}, "D_B rank-D_A states, one-way"),
    "appc-threestates": _Spec(_threestates, {"d": 8}, "three rank-D states, two-way keeps D/2 or D/4"),
    "appc-5dim-3states": _Spec(_five_dim, {}, "three rank-5 states, two-way"),
    "appd-shift": _Spec(_shift, {"d": 6, "n": 2}, "shift states, P0 keeps floor(D/N)"),
    "appd-5-2-mixed": _Spec(_mixed, {}, "two rank-5 states, outcomes keep rank 1 or 2"),
    "block-diagonal": _Spec(_block, {"da": 5, "db": 5, "r": 2}, "N_max states in r x r blocks, P0"),
}

# parameter order for positional forms such as "block-diagonal:5,5,2"
PARAM_ORDER = {name: list(spec.defaults) for name, spec in REGISTRY.items()}


def names() -> list[str]:
    return list(REGISTRY)


def build(name: str, params: dict | None = None, verify: bool = True) -> CatalogEntry:
    """Construct an entry; with ``verify`` every shipped protocol is checked
    against the expected flags before the entry is returned."""
    if name not in REGISTRY:
        raise InvalidInputError(f"unknown catalog entry {name!r}")
    spec = REGISTRY[name]
    params = dict(params or {})
    unknown = set(params) - set(spec.defaults)
    if unknown:
        raise InvalidInputError(f"{name} takes no parameters {sorted(unknown)}")
    full = {**spec.defaults, **{k: int(v) for k, v in params.items()}}
    ss, protocols, expected = spec.builder(full)
    entry = CatalogEntry(name, ss, tuple(protocols), expected, full)
    if verify:
        failed = [c for c in verify_entry(entry) if not c.ok]
        if failed:
            raise RuntimeError(f"{name}{full}: shipped protocol fails {failed}")
    return entry


def parse_ref(ref: str) -> tuple[str, dict]:
    """Split ``"name"``, ``"name:5,5,2"`` or ``"name:da=5,db=5,r=2"``."""
    name, _, rest = ref.partition(":")
    if name not in REGISTRY:
        raise InvalidInputError(f"unknown catalog entry {name!r}")
    params = {}
    if rest:
        for i, item in enumerate(rest.split(",")):
            key, eq, value = item.partition("=")
            if not eq:
                key, value = PARAM_ORDER[name][i] if i < len(PARAM_ORDER[name]) else "?", item
            try:
                params[key.strip()] = int(value)
            except ValueError as exc:
                raise InvalidInputError(f"bad parameter {item!r}") from exc
    return name, params


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def verify_entry(entry: CatalogEntry, tol: Tolerance = DEFAULT_TOL) -> list[Check]:
    """Re-derive every expected flag of an entry from scratch."""
    exp = entry.expected
    ss = entry.state_set
    checks = []
    ranks = ss.ranks(tol)
    if "rank_sum" in exp.extra:
        checks.append(Check("rank_sum", sum(ranks) == exp.extra["rank_sum"],
                            f"{sum(ranks)} vs {exp.extra['rank_sum']}"))
    if "n_states" in exp.extra:
        checks.append(Check("n_states", len(ss) == exp.extra["n_states"],
                            f"{len(ss)} vs {exp.extra['n_states']}"))
    if not entry.protocols:
        checks.append(Check("no-protocol", exp.distinguishable == "unknown-under-search",
                            "no protocol shipped; negative evidence comes from search"))
    for i, proto in enumerate(entry.protocols):
        tag = f"protocol[{i}]"
        if isinstance(proto, SeparablePovm):
            rep = verify_sep(proto, ss, exp.r_floor, tol)
            checks.append(Check(f"{tag} verify_sep r>={exp.r_floor}", rep.ok,
                                "; ".join(f.reason for f in rep.failures)))
            if exp.rank_preserving:
                rep = verify_sep_rank_preserving(proto, ss, tol)
                checks.append(Check(f"{tag} keeps R_j", rep.ok))
            checks.append(Check(f"{tag} class", exp.protocol_class == "SEP"))
            continue
        rep = verify_deterministic(proto, ss, exp.r_floor, tol)
        checks.append(Check(f"{tag} deterministic r>={exp.r_floor}", rep.ok,
                            "; ".join(f.reason for f in rep.failures)))
        cls = classify(proto, tol)
        checks.append(Check(f"{tag} class", cls == exp.protocol_class,
                            f"{cls} vs {exp.protocol_class}"))
        rp = verify_rank_preserving(proto, ss, tol).ok
        checks.append(Check(f"{tag} rank-preserving={exp.rank_preserving}",
                            rp == exp.rank_preserving))
    return checks
