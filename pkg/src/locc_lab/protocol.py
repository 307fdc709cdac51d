"""LOCC protocol trees: simulation, classification and verification.

A tree is made of :class:`Node` (one party measures, one child per outcome)
and :class:`Leaf` (declares a state index, or ``None`` for an outcome that
should never happen on the given set). Paths are tuples of
``(party, outcome_index)`` with 0-based outcome indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .measurement import (
    LocalMeasurement,
    SeparablePovm,
    check_complete,
    check_projective,
    check_sep_complete,
)
from .numerics import DEFAULT_TOL, InvalidInputError, Tolerance
from .states import StateSet, residual, schmidt_rank

REASONS = (
    "ambiguous",
    "wrong-state-survives",
    "rank-too-low",
    "incomplete-node",
    "non-projective-where-required",
)


@dataclass(frozen=True)
class Leaf:
    verdict: int | None


@dataclass(frozen=True)
class Node:
    measurement: LocalMeasurement
    children: tuple

    def __post_init__(self):
        children = tuple(self.children)
        if len(children) != len(self.measurement):
            raise InvalidInputError(
                f"{len(children)} children for a {len(self.measurement)}-outcome measurement")
        object.__setattr__(self, "children", children)

    @property
    def party(self) -> str:
        return self.measurement.party


ProtocolTree = Union[Node, Leaf]


def tree_to_json(t: ProtocolTree) -> dict:
    if isinstance(t, Leaf):
        return {"leaf": t.verdict}
    return {
        "party": t.party,
        "measurement": t.measurement.to_json(),
        "children": [tree_to_json(c) for c in t.children],
    }


def tree_from_json(obj) -> ProtocolTree:
    if not isinstance(obj, dict):
        raise InvalidInputError("protocol node must be a JSON object")
    if "leaf" in obj:
        v = obj["leaf"]
        return Leaf(None if v is None else int(v))
    try:
        meas = dict(obj["measurement"])
        meas.setdefault("party", obj.get("party"))
        if obj.get("party", meas["party"]) != meas["party"]:
            raise InvalidInputError("node party disagrees with its measurement party")
        return Node(LocalMeasurement.from_json(meas),
                    tuple(tree_from_json(c) for c in obj["children"]))
    except KeyError as exc:
        raise InvalidInputError(f"bad protocol JSON, missing {exc}") from exc


def iter_nodes(t: ProtocolTree, path=()):
    """Yield ``(path, node)`` for every internal node, preorder."""
    if isinstance(t, Node):
        yield path, t
        for i, c in enumerate(t.children):
            yield from iter_nodes(c, path + ((t.party, i),))


def iter_leaves(t: ProtocolTree, path=(), a_ops=(), b_ops=()):
    """Yield ``(path, leaf, a_kraus_list, b_kraus_list)`` in path order."""
    if isinstance(t, Leaf):
        yield path, t, a_ops, b_ops
        return
    for i, (k, c) in enumerate(zip(t.measurement.kraus, t.children)):
        step = ((t.party, i),)
        if t.party == "A":
            yield from iter_leaves(c, path + step, a_ops + (k,), b_ops)
        else:
            yield from iter_leaves(c, path + step, a_ops, b_ops + (k,))


def _compose(ops, dim):
    total = np.eye(dim, dtype=np.complex128)
    for k in ops:
        total = k @ total
    return total


# -- classification ---------------------------------------------------------

def _op_key(k: np.ndarray) -> bytes:
    return (np.round(k, 9) + 0.0).tobytes()


def _meas_key(m: LocalMeasurement) -> tuple:
    return (m.party, tuple(sorted(_op_key(k) for k in m.kraus)))


_STOP = ("stop",)


def classify(t: ProtocolTree, tol: Tolerance = DEFAULT_TOL) -> str:
    """One of P0, K0, P1, K1, P2, K2.

    P/K: projective at every node or not. Communication level: 0 when each
    party's next action depends only on its own earlier outcomes; 1 when on
    every path the root party's measurements all precede the other party's;
    2 otherwise.
    """
    nodes = list(iter_nodes(t))
    dims = {}
    for _, n in nodes:
        if dims.setdefault(n.party, n.measurement.dim) != n.measurement.dim:
            raise InvalidInputError(f"party {n.party} measures on inconsistent dimensions")
    kind = "P" if all(check_projective(n.measurement, tol) for _, n in nodes) else "K"
    if not nodes:
        return kind + "0"

    # Walk every root-to-leaf path, recording (party, measurement key, outcome key).
    paths = []

    def walk(node, steps):
        if isinstance(node, Leaf):
            paths.append(steps)
            return
        mk = _meas_key(node.measurement)
        for k, c in zip(node.measurement.kraus, node.children):
            walk(c, steps + ((node.party, mk, _op_key(k)),))

    walk(t, ())

    unconditioned = True
    for party in ("A", "B"):
        action_for_history = {}
        for steps in paths:
            own = [s for s in steps if s[0] == party]
            for i in range(len(own) + 1):
                history = tuple(s[2] for s in own[:i])
                action = own[i][1] if i < len(own) else _STOP
                if action_for_history.setdefault(history, action) != action:
                    unconditioned = False
    if unconditioned:
        return kind + "0"

    first = t.party
    for steps in paths:
        seen_other = False
        for s in steps:
            if s[0] != first:
                seen_other = True
            elif seen_other:
                return kind + "2"
    return kind + "1"


# -- simulation and verification --------------------------------------------

@dataclass
class OutcomeRecord:
    path: tuple
    a_total: np.ndarray
    b_total: np.ndarray
    declared: int | None
    residual_ranks: list
    probability_given_state: list
    survivors: list

    def to_json(self) -> dict:
        return {
            "path": [f"{p}:{i}" for p, i in self.path],
            "declared": self.declared,
            "survivors": self.survivors,
            "residual_ranks": self.residual_ranks,
            "probability_given_state": self.probability_given_state,
        }


@dataclass(frozen=True)
class Failure:
    path: tuple
    reason: str
    detail: str = ""

    def to_json(self) -> dict:
        return {"path": [f"{p}:{i}" for p, i in self.path], "reason": self.reason,
                "detail": self.detail}


@dataclass
class VerificationReport:
    records: list
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def reasons(self) -> set:
        return {f.reason for f in self.failures}

    def record(self, path) -> OutcomeRecord:
        for r in self.records:
            if r.path == tuple(path):
                return r
        raise KeyError(path)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "failures": [f.to_json() for f in self.failures],
            "outcomes": [r.to_json() for r in self.records],
        }


def _outcome_record(path, a_total, b_total, declared, s: StateSet, tol) -> OutcomeRecord:
    ranks, probs, survivors = [], [], []
    for j, state in enumerate(s.states):
        res = residual(state, a_total, b_total)
        ratio = res.norm / state.norm
        probs.append(ratio ** 2)
        if ratio > tol.abs:
            survivors.append(j)
            ranks.append(schmidt_rank(res, tol))
        else:
            ranks.append(0)
    return OutcomeRecord(path, a_total, b_total, declared, ranks, probs, survivors)


def simulate(t: ProtocolTree, s: StateSet, tol: Tolerance = DEFAULT_TOL) -> list[OutcomeRecord]:
    da, db = s.dims
    for path, n in iter_nodes(t):
        want = da if n.party == "A" else db
        if n.measurement.dim != want:
            raise InvalidInputError(
                f"measurement at {path} acts on dim {n.measurement.dim}, party {n.party} has {want}")
    records = []
    for path, leaf, a_ops, b_ops in iter_leaves(t):
        if leaf.verdict is not None and not (0 <= leaf.verdict < len(s)):
            raise InvalidInputError(f"leaf at {path} declares state {leaf.verdict} of {len(s)}")
        records.append(_outcome_record(path, _compose(a_ops, da), _compose(b_ops, db),
                                       leaf.verdict, s, tol))
    return records


def _judge(rec: OutcomeRecord, floor_for, failures: list):
    if not rec.survivors:
        return
    if len(rec.survivors) > 1:
        failures.append(Failure(rec.path, "ambiguous", f"states {rec.survivors} survive"))
        return
    (j,) = rec.survivors
    if rec.declared != j:
        failures.append(Failure(rec.path, "wrong-state-survives",
                                f"declared {rec.declared}, state {j} survives"))
        return
    floor = floor_for(j)
    if rec.residual_ranks[j] < floor:
        failures.append(Failure(rec.path, "rank-too-low",
                                f"state {j} keeps rank {rec.residual_ranks[j]} < {floor}"))


def _verify_tree(t, s, floor_for, tol, require_projective=False) -> VerificationReport:
    failures = []
    for path, n in iter_nodes(t):
        if not check_complete(n.measurement, tol):
            failures.append(Failure(path, "incomplete-node", "sum K^dagger K != I"))
        elif require_projective and not check_projective(n.measurement, tol):
            failures.append(Failure(path, "non-projective-where-required"))
    records = simulate(t, s, tol)
    for rec in records:
        _judge(rec, floor_for, failures)
    return VerificationReport(records, failures)


def verify_deterministic(t: ProtocolTree, s: StateSet, r_min: int,
                         tol: Tolerance = DEFAULT_TOL,
                         require_projective: bool = False) -> VerificationReport:
    """Every realizable outcome identifies exactly its declared state and
    leaves it with Schmidt rank at least ``r_min``."""
    if r_min < 1:
        raise InvalidInputError("r_min must be positive")
    return _verify_tree(t, s, lambda j: r_min, tol, require_projective)


def verify_rank_preserving(t: ProtocolTree, s: StateSet,
                           tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """Like :func:`verify_deterministic` with each state's own Schmidt rank as floor."""
    ranks = s.ranks(tol)
    return _verify_tree(t, s, lambda j: ranks[j], tol)


def _verify_sep(p: SeparablePovm, s: StateSet, floor_for, tol) -> VerificationReport:
    if tuple(p.dims) != tuple(s.dims):
        raise InvalidInputError(f"POVM dims {p.dims} do not match state dims {s.dims}")
    failures = []
    if not check_sep_complete(p, tol):
        failures.append(Failure((), "incomplete-node",
                                f"sum of POVM elements deviates by {p.completeness_deviation():.3g}"))
    records = []
    for m, o in enumerate(p.outcomes):
        if not (0 <= o.declares < len(s)):
            raise InvalidInputError(f"outcome {m} declares state {o.declares} of {len(s)}")
        rec = _outcome_record((("SEP", m),), o.a, o.b, o.declares, s, tol)
        records.append(rec)
        _judge(rec, floor_for, failures)
    return VerificationReport(records, failures)


def verify_sep(p: SeparablePovm, s: StateSet, r_min: int,
               tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    return _verify_sep(p, s, lambda j: r_min, tol)


def verify_sep_rank_preserving(p: SeparablePovm, s: StateSet,
                               tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    ranks = s.ranks(tol)
    return _verify_sep(p, s, lambda j: ranks[j], tol)


def truncate(t: ProtocolTree, depth: int, verdict: int | None = None) -> ProtocolTree:
    """Cut the tree after ``depth`` measurement rounds, replacing the cut
    subtrees by leaves declaring ``verdict`` (or the first leaf beneath)."""
    if isinstance(t, Leaf):
        return t
    if depth == 0:
        if verdict is not None:
            return Leaf(verdict)
        node = t
        while isinstance(node, Node):
            node = next((c for c in node.children
                         if not (isinstance(c, Leaf) and c.verdict is None)), node.children[0])
        return node
    return Node(t.measurement, tuple(truncate(c, depth - 1, verdict) for c in t.children))
