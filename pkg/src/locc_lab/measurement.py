"""Local measurements (Kraus sets) and separable POVMs."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    InvalidInputError,
    Tolerance,
    as_matrix,
    basis_projector,
    kron,
    matrix_from_json,
    matrix_to_json,
)
from .states import check_party


@dataclass(frozen=True)
class LocalMeasurement:
    """One party's measurement; every Kraus operator is square on the full
    local space so that composition is a plain matrix product."""

    party: str
    kraus: tuple
    labels: tuple = field(default=())

    def __post_init__(self):
        check_party(self.party)
        kraus = tuple(as_matrix(k, "kraus operator") for k in self.kraus)
        if not kraus:
            raise InvalidInputError("a measurement needs at least one Kraus operator")
        dim = kraus[0].shape[0]
        for k in kraus:
            if k.shape != (dim, dim):
                raise InvalidInputError(f"Kraus operator of shape {k.shape}, expected {dim}x{dim}")
        labels = tuple(self.labels) or tuple(str(i + 1) for i in range(len(kraus)))
        if len(labels) != len(kraus):
            raise InvalidInputError("one label per Kraus operator")
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self):
        return len(self.kraus)

    @classmethod
    def projective(cls, party, dim, blocks, basis=None, labels=()) -> "LocalMeasurement":
        """Projectors onto index blocks of ``basis`` (standard basis by default)."""
        basis = np.eye(dim) if basis is None else np.asarray(basis)
        return cls(party, tuple(basis_projector(basis, b) for b in blocks), labels)

    def with_remainder(self, tol: Tolerance = DEFAULT_TOL) -> "LocalMeasurement":
        """Append ``sqrt(I - sum K^dagger K)`` as an extra outcome when nonzero."""
        rest = np.eye(self.dim) - sum(k.conj().T @ k for k in self.kraus)
        if np.abs(rest).max() <= tol.abs:
            return self
        w, v = np.linalg.eigh((rest + rest.conj().T) / 2)
        if w.min() < -tol.abs:
            raise InvalidInputError("Kraus operators already exceed the identity")
        # eigenvalues within tolerance of zero are zero; sqrt would inflate 1e-16 to 1e-8
        w = np.where(w > tol.abs, w, 0.0)
        root = (v * np.sqrt(w)) @ v.conj().T
        return LocalMeasurement(self.party, self.kraus + (root,), self.labels + ("rest",))

    def to_json(self) -> dict:
        return {
            "party": self.party,
            "kraus": [matrix_to_json(k) for k in self.kraus],
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, obj) -> "LocalMeasurement":
        try:
            return cls(obj["party"], tuple(matrix_from_json(k) for k in obj["kraus"]),
                       tuple(obj.get("labels", ())))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"bad measurement JSON: {exc}") from exc


def check_complete(m: LocalMeasurement, tol: Tolerance = DEFAULT_TOL) -> bool:
    total = sum(k.conj().T @ k for k in m.kraus)
    return bool(np.abs(total - np.eye(m.dim)).max() <= tol.abs)


def check_projective(m: LocalMeasurement, tol: Tolerance = DEFAULT_TOL) -> bool:
    if not check_complete(m, tol):
        return False
    for k in m.kraus:
        if np.abs(k - k.conj().T).max() > tol.abs or np.abs(k @ k - k).max() > tol.abs:
            return False
    for k1, k2 in itertools.combinations(m.kraus, 2):
        if np.abs(k1 @ k2).max() > tol.abs:
            return False
    return True


@dataclass(frozen=True)
class SepOutcome:
    a: np.ndarray
    b: np.ndarray
    declares: int

    def __post_init__(self):
        object.__setattr__(self, "a", as_matrix(self.a, "a"))
        object.__setattr__(self, "b", as_matrix(self.b, "b"))

    @property
    def element(self) -> np.ndarray:
        """POVM element (a^dagger a) (x) (b^dagger b)."""
        return kron(self.a.conj().T @ self.a, self.b.conj().T @ self.b)


@dataclass(frozen=True)
class SeparablePovm:
    dims: tuple
    outcomes: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        outcomes = tuple(self.outcomes)
        if not outcomes:
            raise InvalidInputError("a separable POVM needs at least one outcome")
        for o in outcomes:
            if o.a.shape[1] != dims[0] or o.b.shape[1] != dims[1]:
                raise InvalidInputError(
                    f"outcome operators {o.a.shape} (x) {o.b.shape} do not act on {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "outcomes", outcomes)

    def elements(self) -> list[np.ndarray]:
        return [o.element for o in self.outcomes]

    def completeness_deviation(self) -> float:
        da, db = self.dims
        return float(np.abs(sum(self.elements()) - np.eye(da * db)).max())

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "outcomes": [
                {"a": matrix_to_json(o.a), "b": matrix_to_json(o.b), "declares": o.declares}
                for o in self.outcomes
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "SeparablePovm":
        try:
            return cls(
                tuple(obj["dims"]),
                tuple(SepOutcome(matrix_from_json(o["a"]), matrix_from_json(o["b"]),
                                 int(o["declares"])) for o in obj["outcomes"]),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"bad SEP POVM JSON: {exc}") from exc


def check_sep_complete(p: SeparablePovm, tol: Tolerance = DEFAULT_TOL) -> bool:
    return p.completeness_deviation() <= tol.abs
