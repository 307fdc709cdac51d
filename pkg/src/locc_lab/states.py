"""Bipartite and multipartite pure states.

A bipartite state on D_A x D_B is stored as its coefficient matrix ``coeff``
with D_B rows and D_A columns: ``coeff[n, m]`` multiplies ``|m>_A |n>_B``.
With this orientation a local outcome ``A (x) B`` maps ``coeff`` to
``B @ coeff @ A.T``. States are kept unnormalized.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    Tolerance,
    as_matrix,
    hs_inner,
    kron,
    numeric_rank,
)

PARTIES = ("A", "B")


def check_party(party: str) -> str:
    if party not in PARTIES:
        raise InvalidInputError(f"party must be 'A' or 'B', got {party!r}")
    return party


@dataclass(frozen=True)
class BipartiteState:
    coeff: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_matrix(self.coeff, "coeff"))

    @property
    def dim_a(self) -> int:
        return self.coeff.shape[1]

    @property
    def dim_b(self) -> int:
        return self.coeff.shape[0]

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def vector(self) -> np.ndarray:
        """State vector in the |m>_A (x) |n>_B ordering (index m * D_B + n)."""
        return self.coeff.T.reshape(-1)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeff))

    @classmethod
    def from_terms(cls, dims, terms: Iterable, label: str = "") -> "BipartiteState":
        """Build from ``(a, b, amplitude)`` triples, summing repeated terms."""
        da, db = dims
        coeff = np.zeros((db, da), dtype=np.complex128)
        for a, b, amp in terms:
            if not (0 <= a < da and 0 <= b < db):
                raise InvalidInputError(f"term |{a}{b}> outside {da}x{db}")
            coeff[b, a] += amp
        return cls(coeff, label)

    @classmethod
    def from_product_sum(cls, pairs, label: str = "") -> "BipartiteState":
        """Build from a list of ``(alice_vector, bob_vector)`` pairs."""
        coeff = sum(np.outer(np.asarray(vb), np.asarray(va)) for va, vb in pairs)
        return cls(coeff, label)

    @classmethod
    def from_vector(cls, vec, dims, label: str = "") -> "BipartiteState":
        da, db = dims
        vec = np.asarray(vec, dtype=np.complex128)
        if vec.shape != (da * db,):
            raise InvalidInputError(f"vector length {vec.shape} does not match {da}x{db}")
        return cls(vec.reshape(da, db).T, label)

    def terms(self, tol: Tolerance = DEFAULT_TOL):
        """Nonzero ``(a, b, amplitude)`` triples."""
        out = []
        for b, a in zip(*np.nonzero(np.abs(self.coeff) > tol.abs)):
            out.append((int(a), int(b), complex(self.coeff[b, a])))
        return sorted(out)


def schmidt_rank(s: BipartiteState, tol: Tolerance = DEFAULT_TOL) -> int:
    return numeric_rank(s.coeff, tol)


def reduced_density(s: BipartiteState, party: str) -> np.ndarray:
    """Unnormalized reduced density operator of one party."""
    check_party(party)
    m = s.coeff
    if party == "B":
        return m @ m.conj().T
    return m.T @ m.conj()


def residual(s: BipartiteState, a, b) -> BipartiteState:
    """State left after the local outcome ``a (x) b``."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != s.dim_a or b.shape[1] != s.dim_b:
        raise InvalidInputError(
            f"operators {a.shape} (x) {b.shape} do not act on {s.dim_a}x{s.dim_b}"
        )
    return BipartiteState(b @ s.coeff @ a.T, s.label)


def hat_rho(s: BipartiteState) -> np.ndarray:
    """rho_A (x) rho_B for one state."""
    return kron(reduced_density(s, "A"), reduced_density(s, "B"))


def pairwise_orthogonal(ms: Sequence, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Tr(X^dagger Y) = 0 for all distinct pairs, relative to the Frobenius norms."""
    ms = [as_matrix(m) for m in ms]
    if len({m.shape for m in ms}) > 1:
        raise InvalidInputError("pairwise_orthogonal needs matrices of one shape")
    norms = [np.linalg.norm(m) for m in ms]
    for i, j in itertools.combinations(range(len(ms)), 2):
        if abs(hs_inner(ms[i], ms[j])) > tol.abs * max(norms[i] * norms[j], 1e-300):
            return False
    return True


def operators_orthogonal(x, y, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Orthogonality of two PSD operators: Tr(xy) <= tol.abs * |x| |y|."""
    return abs(hs_inner(x, y)) <= tol.abs * np.linalg.norm(x) * np.linalg.norm(y)


@dataclass(frozen=True)
class StateSet:
    states: tuple
    name: str = ""
    dims: tuple = field(default=None)

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise InvalidInputError("a state set needs at least one state")
        dims = tuple(self.dims) if self.dims is not None else states[0].dims
        for s in states:
            if s.dims != dims:
                raise InvalidInputError(f"state {s.label!r} has dims {s.dims}, set has {dims}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "dims", dims)
        if not pairwise_orthogonal([s.coeff for s in states], DEFAULT_TOL):
            raise InvalidInputError(f"states of {self.name!r} are not pairwise orthogonal")

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def dim_a(self) -> int:
        return self.dims[0]

    @property
    def dim_b(self) -> int:
        return self.dims[1]

    def ranks(self, tol: Tolerance = DEFAULT_TOL) -> list[int]:
        return [schmidt_rank(s, tol) for s in self.states]

    def to_json(self, tol: Tolerance = DEFAULT_TOL) -> dict:
        return {
            "name": self.name,
            "dims": list(self.dims),
            "states": [
                {
                    "label": s.label,
                    "terms": [
                        {"a": a, "b": b, "re": amp.real, "im": amp.imag}
                        for a, b, amp in s.terms(tol)
                    ],
                }
                for s in self.states
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "StateSet":
        try:
            dims = tuple(int(d) for d in obj["dims"])
            states = [
                BipartiteState.from_terms(
                    dims,
                    [(int(t["a"]), int(t["b"]), complex(t["re"], t.get("im", 0.0)))
                     for t in entry["terms"]],
                    entry.get("label", str(i + 1)),
                )
                for i, entry in enumerate(obj["states"])
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad state set JSON: {exc}") from exc
        if len(dims) != 2 or min(dims) < 1:
            raise InvalidInputError(f"bad dims {dims}")
        return cls(tuple(states), obj.get("name", ""), dims)


def render_grid(ss: StateSet, tol: Tolerance = DEFAULT_TOL) -> str:
    """ASCII occupancy grid: rows are Alice's basis states, columns Bob's.

    Cell (m, n) lists the labels of states with a nonzero |m>_A|n>_B term.
    """
    da, db = ss.dims
    cells = [[[] for _ in range(db)] for _ in range(da)]
    for i, s in enumerate(ss.states):
        for a, b, _ in s.terms(tol):
            cells[a][b].append(s.label or str(i + 1))
    text = [[",".join(c) for c in row] for row in cells]
    width = max([3] + [len(t) for row in text for t in row] + [len(f"{db - 1}B")])
    head_w = len(f"{da - 1}A") + 1
    sep = " " * head_w + "+" + "+".join("-" * (width + 2) for _ in range(db)) + "+"
    lines = [" " * head_w + " " + " ".join(f" {f'{n}B':^{width}} " for n in range(db)), sep]
    for m in range(da):
        lines.append(f"{f'{m}A':>{head_w - 1}} |" + "|".join(f" {t:^{width}} " for t in text[m]) + "|")
        lines.append(sep)
    return "\n".join(lines)


@dataclass(frozen=True)
class MultipartiteState:
    dims: tuple
    coeff: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        coeff = np.asarray(self.coeff, dtype=np.complex128).reshape(-1)
        if any(d < 1 for d in dims) or coeff.size != int(np.prod(dims)):
            raise InvalidInputError(f"{coeff.size} coefficients do not fit dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "coeff", coeff)

    def party_matrix(self, p: int) -> np.ndarray:
        """Coefficients reshaped to (D_p, rest); its rank is that of rho_p."""
        t = self.coeff.reshape(self.dims)
        return np.moveaxis(t, p, 0).reshape(self.dims[p], -1)

    def reduced_density(self, p: int) -> np.ndarray:
        m = self.party_matrix(p)
        return m @ m.conj().T


def generalized_schmidt_rank(s: MultipartiteState, tol: Tolerance = DEFAULT_TOL) -> int:
    """Smallest rank among the single-party reduced density operators."""
    if len(s.dims) < 2:
        raise InvalidInputError("need at least two parties")
    return min(numeric_rank(s.party_matrix(p), tol) for p in range(len(s.dims)))
