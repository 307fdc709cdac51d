"""Closed-form bounds and structural conditions on state sets.

Bounds are returned as :class:`BoundReport` so that the CLI can print them
uniformly; structural predicates return plain booleans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .measurement import LocalMeasurement
from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    Tolerance,
    as_matrix,
    support_projector,
)
from .protocol import Leaf, Node, ProtocolTree
from .states import (
    BipartiteState,
    StateSet,
    check_party,
    hat_rho,
    operators_orthogonal,
    pairwise_orthogonal,
    reduced_density,
    residual,
    schmidt_rank,
)


@dataclass(frozen=True)
class BoundReport:
    quantity: float
    bound: float
    formula_id: str

    @property
    def satisfied(self) -> bool:
        return self.quantity <= self.bound + 1e-12

    def to_json(self) -> dict:
        return {"formula_id": self.formula_id, "quantity": self.quantity,
                "bound": self.bound, "satisfied": self.satisfied}


# -- counting bounds --------------------------------------------------------

def nmax(da: int, db: int, r: int) -> int:
    """Largest number of states distinguishable while every outcome keeps rank >= r."""
    if min(da, db, r) < 1:
        raise InvalidInputError("dimensions and r must be positive")
    return (da // r) * (db // r)


def multi_nmax(dims, r: int) -> int:
    dims = list(dims)
    if len(dims) < 2:
        raise InvalidInputError("need at least two parties")
    if r < 1 or min(dims) < 1:
        raise InvalidInputError("dimensions and r must be positive")
    return math.prod(d // r for d in dims)


def nmax_report(s: StateSet, r: int) -> BoundReport:
    return BoundReport(len(s), nmax(s.dim_a, s.dim_b, r), "nmax")


def rank_sum_bound(s: StateSet, r: int, swap_roles: bool = False,
                   tol: Tolerance = DEFAULT_TOL) -> BoundReport:
    """Sum of Schmidt ranks against D_A * floor(D_B / r) (first mover Alice)."""
    if r < 1:
        raise InvalidInputError("r must be positive")
    first, second = (s.dim_b, s.dim_a) if swap_roles else (s.dim_a, s.dim_b)
    return BoundReport(sum(s.ranks(tol)), first * (second // r), "rank-sum-one-way")


def r2_bound(s: StateSet, tol: Tolerance = DEFAULT_TOL) -> BoundReport:
    return BoundReport(sum(r * r for r in s.ranks(tol)), s.dim_a * s.dim_b, "sum-R-squared")


def _annihilated(state: BipartiteState, res: BipartiteState, tol: Tolerance) -> bool:
    return res.norm <= tol.abs * state.norm


def theorem5_check(s: StateSet, a, b, j: int, tol: Tolerance = DEFAULT_TOL) -> BoundReport:
    """2 r_j + max_{k != j} R_k <= D_A + D_B for a product outcome identifying j."""
    if not (0 <= j < len(s)):
        raise InvalidInputError(f"state index {j} out of range")
    res = [residual(st, a, b) for st in s.states]
    if _annihilated(s[j], res[j], tol):
        raise InvalidInputError(f"outcome annihilates state {j}")
    for k, st in enumerate(s.states):
        if k != j and not _annihilated(st, res[k], tol):
            raise InvalidInputError(f"outcome does not identify state {j}: state {k} survives")
    ranks = s.ranks(tol)
    others = max((ranks[k] for k in range(len(s)) if k != j), default=0)
    return BoundReport(2 * schmidt_rank(res[j], tol) + others, s.dim_a + s.dim_b,
                       "product-outcome-tradeoff")


def theorem5_max_residual(da: int, db: int, r_other_max: int) -> int:
    """Largest residual rank the product-outcome tradeoff allows."""
    return max(0, (da + db - r_other_max) // 2)


def theorem6_check(s: StateSet, a=None, r_target: int | None = None,
                   swap_roles: bool = False, tol: Tolerance = DEFAULT_TOL) -> BoundReport:
    """r + mean(R) <= D_first + D_second / N for one outcome of the first mover.

    ``r_target`` defaults to the largest residual rank left by ``a``.
    """
    n = len(s)
    d_first, d_second = (s.dim_b, s.dim_a) if swap_roles else (s.dim_a, s.dim_b)
    if r_target is None:
        if a is None:
            raise InvalidInputError("give an operator or r_target")
        a = as_matrix(a)
        ident = np.eye(d_second)
        pairs = [(ident, a) if swap_roles else (a, ident) for _ in s.states]
        r_target = max(schmidt_rank(residual(st, *p), tol) for st, p in zip(s.states, pairs))
    rbar = sum(s.ranks(tol)) / n
    return BoundReport(r_target + rbar, d_first + d_second / n, "one-way-residual-tradeoff")


def corollary7_nbound(db: int, da: int, r_max: int, rbar: float) -> float:
    """Upper bound on N for one-way protocols; ``math.inf`` when vacuous."""
    denom = r_max + rbar - da
    if denom <= 0:
        return math.inf
    return db / denom


# -- cascading partitions ---------------------------------------------------

@dataclass
class PartitionNode:
    subset: tuple
    party: str | None = None
    children: list = field(default_factory=list)

    @property
    def complete(self) -> bool:
        if not self.children:
            return len(self.subset) == 1
        return all(c.complete for c in self.children)

    def depth(self) -> int:
        return 0 if not self.children else 1 + max(c.depth() for c in self.children)

    def splits(self):
        """Preorder list of ``(party, [child subsets])``."""
        if not self.children:
            return []
        out = [(self.party, [c.subset for c in self.children])]
        for c in self.children:
            out.extend(c.splits())
        return out

    def to_json(self) -> dict:
        out = {"subset": list(self.subset), "complete": self.complete}
        if self.children:
            out["party"] = self.party
            out["children"] = [c.to_json() for c in self.children]
        return out


def split_subset(s: StateSet, subset, party: str, tol: Tolerance = DEFAULT_TOL) -> list[tuple]:
    """Connected components of the non-orthogonality graph of reduced
    density operators on ``party``, restricted to ``subset``."""
    subset = list(subset)
    rhos = {j: reduced_density(s[j], party) for j in subset}
    parent = {j: j for j in subset}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in ((i, j) for n, i in enumerate(subset) for j in subset[n + 1:]):
        if not operators_orthogonal(rhos[i], rhos[j], tol):
            parent[find(i)] = find(j)
    groups = {}
    for j in subset:
        groups.setdefault(find(j), []).append(j)
    return sorted((tuple(g) for g in groups.values()), key=lambda g: g[0])


def _other(party: str) -> str:
    return "B" if party == "A" else "A"


def _cascade(s, subset, party, tol) -> PartitionNode:
    node = PartitionNode(tuple(subset))
    if len(subset) <= 1:
        return node
    parts = split_subset(s, subset, party, tol)
    if len(parts) == 1:
        return node
    node.party = party
    # each part is connected on `party`, so only the other party can split it further
    node.children = [_cascade(s, p, _other(party), tol) for p in parts]
    return node


def cascading_partition(s: StateSet, first_party: str = "auto",
                        tol: Tolerance = DEFAULT_TOL) -> PartitionNode:
    """Alternating-party partition of the set; ``complete`` iff all leaves are singletons.

    In ``auto`` mode Alice-first is tried, then Bob-first; the first complete
    tree wins, otherwise the deeper one is returned.
    """
    everyone = tuple(range(len(s)))
    if first_party != "auto":
        return _cascade(s, everyone, check_party(first_party), tol)
    trees = [_cascade(s, everyone, p, tol) for p in ("A", "B")]
    for t in trees:
        if t.complete:
            return t
    return max(trees, key=lambda t: t.depth())


def partition_to_protocol(p: PartitionNode, s: StateSet,
                          tol: Tolerance = DEFAULT_TOL) -> ProtocolTree:
    """Projective protocol realizing a complete cascading partition.

    Each split measures projectors onto the combined supports of the
    children's reduced density operators, plus a remainder outcome (error
    leaf) when those supports do not fill the local space.
    """
    if not p.complete:
        raise InvalidInputError("partition is not complete")
    if not p.children:
        return Leaf(p.subset[0])
    dim = s.dim_a if p.party == "A" else s.dim_b
    projectors = [
        support_projector(sum(reduced_density(s[j], p.party) for j in c.subset), tol)
        for c in p.children
    ]
    children = [partition_to_protocol(c, s, tol) for c in p.children]
    rest = np.eye(dim) - sum(projectors)
    if np.abs(rest).max() > tol.abs:
        projectors.append(support_projector(rest, tol))
        children.append(Leaf(None))
    labels = tuple(",".join(str(j + 1) for j in c.subset) for c in p.children)
    labels += ("rest",) * (len(projectors) - len(labels))
    return Node(LocalMeasurement(p.party, tuple(projectors), labels), tuple(children))


# -- necessary conditions and predicates -----------------------------------

def theorem4_check(s: StateSet, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Mutual orthogonality of the rho_A (x) rho_B operators (necessary for
    LOCC discrimination that keeps every original Schmidt rank)."""
    return pairwise_orthogonal([hat_rho(st) for st in s.states], tol)


@dataclass(frozen=True)
class PurificationResult:
    survivors: list
    pure: bool
    residual_rank: int

    def to_json(self) -> dict:
        return {"survivors": self.survivors, "pure": self.pure,
                "residual_rank": self.residual_rank}


def purification_check(s: StateSet, gamma_a, gamma_b,
                       tol: Tolerance = DEFAULT_TOL) -> PurificationResult:
    """Does the product operator leave a single pure state (up to norm and phase)?"""
    res = [residual(st, gamma_a, gamma_b) for st in s.states]
    survivors = [j for j, (st, r) in enumerate(zip(s.states, res))
                 if not _annihilated(st, r, tol)]
    if not survivors:
        return PurificationResult([], False, 0)
    ref = res[survivors[0]].vector
    ref = ref / np.linalg.norm(ref)
    for j in survivors[1:]:
        v = res[j].vector / res[j].norm
        if abs(1.0 - abs(np.vdot(ref, v))) > tol.abs:
            return PurificationResult(survivors, False, 0)
    return PurificationResult(survivors, True, schmidt_rank(res[survivors[0]], tol))


@lru_cache(maxsize=1)
def _domino_coeffs() -> np.ndarray:
    from .catalog import bennett9_states

    return np.stack([st.coeff for st in bennett9_states().states])


def domino_preserves_orthogonality(a, party: str = "A",
                                   tol: Tolerance = DEFAULT_TOL) -> bool:
    """Does applying ``a`` on one side keep the nine domino states orthogonal?

    Inner products are compared against ``tol.abs`` scaled by the mean
    squared column norm of ``a`` and the state norms. The zero operator is
    not a realizable outcome and returns False.
    """
    a = as_matrix(a)
    if a.shape != (3, 3):
        raise InvalidInputError("domino check needs a 3x3 operator")
    check_party(party)
    scale = float(np.linalg.norm(a) ** 2) / 3
    if scale <= tol.abs:
        return False
    coeffs = _domino_coeffs()
    res = coeffs @ a.T if party == "A" else a @ coeffs  # rows Bob, columns Alice
    flat = res.reshape(len(coeffs), -1)
    gram = flat.conj() @ flat.T
    norms = np.linalg.norm(coeffs.reshape(len(coeffs), -1), axis=1)
    off = np.abs(gram - np.diag(np.diag(gram)))
    return bool((off <= tol.abs * scale * np.outer(norms, norms)).all())
