"""Exhaustive search over basis-aligned projective protocols.

Every measurement in the family projects onto blocks of a fixed local basis,
so a residual is always the original state with Alice's and Bob's indices
restricted to two sets. The search state is therefore a pair of bitmasks,
which makes memoization cheap.

A negative result only certifies that this family is exhausted; it is not a
proof that no LOCC protocol exists.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .measurement import LocalMeasurement
from .numerics import DEFAULT_TOL, InvalidInputError, Tolerance, as_matrix, is_identity, numeric_rank
from .protocol import Leaf, Node, ProtocolTree, verify_deterministic
from .states import StateSet

MAX_DIM = 6
MAX_ROUNDS = 4


@dataclass(frozen=True)
class SearchSpec:
    comm_class: str = "P2"  # P0 | P1 | P2
    r_min: int = 1
    max_rounds: int = MAX_ROUNDS
    bases: dict = field(default_factory=dict)  # party -> unitary whose columns are the basis
    family: str = "basis-aligned-projective"
    prune: bool = True

    def __post_init__(self):
        if self.comm_class not in ("P0", "P1", "P2"):
            raise InvalidInputError(f"comm_class must be P0, P1 or P2, got {self.comm_class!r}")
        if self.family != "basis-aligned-projective":
            raise InvalidInputError(f"unsupported family {self.family!r}")
        if self.r_min < 1:
            raise InvalidInputError("r_min must be positive")
        if not (1 <= self.max_rounds <= MAX_ROUNDS):
            raise InvalidInputError(f"max_rounds must be in 1..{MAX_ROUNDS}")
        for p in self.bases:
            if p not in ("A", "B"):
                raise InvalidInputError(f"basis given for unknown party {p!r}")


@dataclass
class SearchResult:
    found: bool
    protocol: ProtocolTree | None
    family_exhausted: bool
    nodes_explored: int

    def to_json(self) -> dict:
        from .protocol import tree_to_json

        return {
            "found": self.found,
            "family_exhausted": self.family_exhausted,
            "nodes_explored": self.nodes_explored,
            "protocol": tree_to_json(self.protocol) if self.protocol is not None else None,
        }


def set_partitions(items):
    """All set partitions of ``items``, fewest blocks first."""
    items = list(items)

    def gen(rest):
        if not rest:
            yield []
            return
        first, tail = rest[0], rest[1:]
        for part in gen(tail):
            yield [[first]] + part
            for i in range(len(part)):
                yield part[:i] + [[first] + part[i]] + part[i + 1:]

    out = [sorted(sorted(b) for b in p) for p in gen(items)]
    return sorted(out, key=lambda p: (len(p), p))


def _bits(mask: int, dim: int) -> list[int]:
    return [i for i in range(dim) if mask >> i & 1]


def _mask(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


class _Searcher:
    def __init__(self, s: StateSet, spec: SearchSpec, tol: Tolerance):
        self.s, self.spec, self.tol = s, spec, tol
        self.dims = {"A": s.dim_a, "B": s.dim_b}
        self.bases = {}
        for p in ("A", "B"):
            u = as_matrix(spec.bases[p]) if p in spec.bases else np.eye(self.dims[p])
            if u.shape != (self.dims[p],) * 2 or not is_identity(u.conj().T @ u, tol):
                raise InvalidInputError(f"basis for {p} must be a {self.dims[p]}x{self.dims[p]} unitary")
            self.bases[p] = u
        # coefficients in the chosen local bases: rows Bob, columns Alice
        self.coeffs = [self.bases["B"].conj().T @ st.coeff @ self.bases["A"].conj()
                       for st in s.states]
        self.norms = [np.linalg.norm(c) for c in self.coeffs]
        self.nodes = 0
        self.full = {p: (1 << self.dims[p]) - 1 for p in ("A", "B")}
        self._partitions = {}
        self._memo = {}

    # -- residual bookkeeping -------------------------------------------------

    def _restricted(self, j, ma, mb):
        c = self.coeffs[j]
        return c[np.ix_(_bits(mb, self.dims["B"]), _bits(ma, self.dims["A"]))]

    def survivors(self, ma, mb):
        out = []
        for j in range(len(self.coeffs)):
            r = self._restricted(j, ma, mb)
            if r.size and np.linalg.norm(r) > self.tol.abs * self.norms[j]:
                out.append(j)
        return out

    def status(self, ma, mb, final: bool):
        """'leaf' with a verdict, 'dead', or 'open'."""
        alive = self.survivors(ma, mb)
        if not alive:
            return "leaf", None
        check = self.spec.prune or final or len(alive) == 1
        if check:
            ranks = {j: numeric_rank(self._restricted(j, ma, mb), self.tol) for j in alive}
            if any(r < self.spec.r_min for r in ranks.values()):
                return "dead", None
        if len(alive) == 1:
            return "leaf", alive[0]
        if final:
            return "dead", None
        if self.spec.prune and not self._residuals_orthogonal(alive, ma, mb):
            # basis-aligned complete measurements preserve inner products in
            # sum over outcomes, and each term is an inner product of residuals
            return "dead", None
        return "open", None

    def _residuals_orthogonal(self, alive, ma, mb):
        rs = {j: self._restricted(j, ma, mb) for j in alive}
        for i, j in ((i, j) for n, i in enumerate(alive) for j in alive[n + 1:]):
            if abs(np.vdot(rs[i], rs[j])) > self.tol.abs * np.linalg.norm(rs[i]) * np.linalg.norm(rs[j]):
                return False
        return True

    def active(self, party, ma, mb, alive):
        """Indices of ``party`` carrying amplitude of some survivor."""
        keep = 0
        for j in alive:
            r = self._restricted(j, ma, mb)
            weights = np.linalg.norm(r, axis=0) if party == "A" else np.linalg.norm(r, axis=1)
            own = _bits(ma if party == "A" else mb, self.dims[party])
            keep |= _mask(i for i, w in zip(own, weights) if w > self.tol.abs * self.norms[j])
        return keep

    def partitions(self, mask, dim):
        if mask not in self._partitions:
            self._partitions[mask] = set_partitions(_bits(mask, dim))
        return self._partitions[mask]

    # -- tree assembly --------------------------------------------------------

    def node(self, party, blocks, children):
        """Projective node on ``blocks`` plus one block for untouched indices."""
        dim = self.dims[party]
        covered = set(i for b in blocks for i in b)
        blocks, children = list(blocks), list(children)
        rest = [i for i in range(dim) if i not in covered]
        if rest:
            blocks.append(rest)
            children.append(Leaf(None))
        m = LocalMeasurement.projective(party, dim, blocks, self.bases[party],
                                        tuple(",".join(map(str, b)) for b in blocks))
        return Node(m, tuple(children))

    # -- P0: product grid -----------------------------------------------------

    def grid(self):
        da, db = self.dims["A"], self.dims["B"]
        for pa in self.partitions(self.full["A"], da):
            for pb in self.partitions(self.full["B"], db):
                self.nodes += 1
                verdicts = []
                for ba in pa:
                    row = []
                    for bb in pb:
                        kind, v = self.status(_mask(ba), _mask(bb), final=True)
                        if kind == "dead":
                            break
                        row.append(Leaf(v))
                    else:
                        verdicts.append(row)
                        continue
                    break
                else:
                    bobs = [self.node("B", pb, row) for row in verdicts]
                    return self.node("A", pa, bobs)
        return None

    # -- P1 / P2: alternating AND-OR search ---------------------------------

    def _solve(self, ma, mb, last, rounds):
        key = (ma, mb, last, rounds)
        if key not in self._memo:
            self._memo[key] = self._expand(ma, mb, last, rounds)
        return self._memo[key]

    def _expand(self, ma, mb, last, rounds):
        self.nodes += 1
        kind, verdict = self.status(ma, mb, final=rounds == 0)
        if kind == "leaf":
            return Leaf(verdict)
        if kind == "dead":
            return None
        alive = self.survivors(ma, mb)
        movers = [p for p in ("A", "B") if p != last]
        for party in movers:
            act = self.active(party, ma, mb, alive)
            for part in self.partitions(act, self.dims[party]):
                if len(part) < 2:
                    continue  # a one-block measurement does nothing
                children = []
                for block in part:
                    bm = _mask(block)
                    sub = (self._solve(ma & bm, mb, party, rounds - 1) if party == "A"
                           else self._solve(ma, mb & bm, party, rounds - 1))
                    if sub is None:
                        break
                    children.append(sub)
                else:
                    return self.node(party, part, children)
        return None


def search_protocols(s: StateSet, spec: SearchSpec, tol: Tolerance = DEFAULT_TOL) -> SearchResult:
    """Depth-first search of the basis-aligned projective family."""
    if max(s.dims) > MAX_DIM:
        raise InvalidInputError(f"exhaustive search supports local dims up to {MAX_DIM}, got {s.dims}")
    sr = _Searcher(s, spec, tol)
    if spec.comm_class == "P0":
        tree = sr.grid()
    else:
        rounds = min(spec.max_rounds, 2) if spec.comm_class == "P1" else spec.max_rounds
        tree = sr._solve(sr.full["A"], sr.full["B"], None, rounds)
    if tree is None:
        return SearchResult(False, None, True, sr.nodes)
    report = verify_deterministic(tree, s, spec.r_min, tol)
    if not report.ok:
        raise RuntimeError(f"search produced a protocol that fails verification: {report.reasons()}")
    return SearchResult(True, tree, False, sr.nodes)
