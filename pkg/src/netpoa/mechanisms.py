"""Basis functions and tabulated utility-generating mechanisms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import ClassPartition


class MechanismError(ValueError):
    """Structurally invalid basis or mechanism."""


@dataclass(frozen=True)
class BasisFunction:
    """``values[j]`` is the welfare multiplier when ``j`` agents share a resource."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size < 2:
            raise MechanismError("basis needs values for 0..n with n >= 1")
        if v[0] != 0.0:
            raise MechanismError(f"w(0) must be 0, got {v[0]}")
        if not np.all(np.isfinite(v)) or np.any(v[1:] <= 0):
            raise MechanismError("w(j) must be finite and positive for j >= 1")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size - 1

    def __call__(self, j):
        return self.values[j]


def basis_set_covering(n: int) -> BasisFunction:
    if n < 1:
        raise MechanismError(f"n must be >= 1, got {n}")
    return BasisFunction(np.r_[0.0, np.ones(n)])


def basis_power(n: int, d: float) -> BasisFunction:
    if n < 1:
        raise MechanismError(f"n must be >= 1, got {n}")
    if not d > 0:
        raise MechanismError(f"exponent must be positive, got {d}")
    return BasisFunction(np.arange(n + 1, dtype=float) ** d)


@dataclass(frozen=True)
class Mechanism:
    """Per-class tables ``f_j(0), ..., f_j(|N_j|+1)`` with both ends zero."""

    per_class: tuple[np.ndarray, ...]

    def __post_init__(self):
        tables = []
        for j, f in enumerate(self.per_class):
            f = np.array(f, dtype=float).reshape(-1)
            if f.size < 3:
                raise MechanismError(f"class {j + 1}: table needs at least 3 entries, got {f.size}")
            if f[0] != 0.0 or f[-1] != 0.0:
                raise MechanismError(f"class {j + 1}: boundary entries must be zero")
            if not np.all(np.isfinite(f)):
                raise MechanismError(f"class {j + 1}: non-finite entry")
            f.setflags(write=False)
            tables.append(f)
        object.__setattr__(self, "per_class", tuple(tables))

    @property
    def k(self) -> int:
        return len(self.per_class)

    def scaled(self, alpha) -> "Mechanism":
        alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (self.k,))
        return Mechanism(tuple(a * f for a, f in zip(alpha, self.per_class)))


def from_values(values_per_class) -> Mechanism:
    """Mechanism from the interior values ``f_j(1..|N_j|)`` of each class."""
    return Mechanism(tuple(np.r_[0.0, np.asarray(v, dtype=float), 0.0] for v in values_per_class))


def marginal_contribution(w: BasisFunction, part: ClassPartition) -> Mechanism:
    """``f_j(l) = w(l) - w(l-1)`` on ``1..|N_j|`` for every class."""
    tables = []
    for j in range(part.k):
        m = part.n_observed(j)
        if m > w.n:
            raise MechanismError(f"basis covers up to {w.n} agents, class {j + 1} observes {m}")
        tables.append(np.r_[0.0, np.diff(w.values[: m + 1]), 0.0])
    return Mechanism(tuple(tables))


def uniform(f_values, part: ClassPartition) -> Mechanism:
    """Assign one table to every class, truncated to each class's ``|N_j|``.

    ``f_values`` holds ``f(1), f(2), ...`` and must cover the largest ``|N_j|``.
    """
    f_values = np.asarray(f_values, dtype=float)
    tables = []
    for j in range(part.k):
        m = part.n_observed(j)
        if m > f_values.size:
            raise MechanismError(f"table has {f_values.size} values, class {j + 1} needs {m}")
        tables.append(np.r_[0.0, f_values[:m], 0.0])
    return Mechanism(tuple(tables))


@dataclass
class MechanismReport:
    gate: list[bool] = field(default_factory=list)
    boundary: list[bool] = field(default_factory=list)
    length: list[bool] = field(default_factory=list)

    @property
    def first_gate_failure(self) -> int | None:
        for j, ok in enumerate(self.gate):
            if not ok:
                return j
        return None

    @property
    def ok(self) -> bool:
        return all(self.gate) and all(self.boundary) and all(self.length)


def validate_mechanism(f: Mechanism, part: ClassPartition, w: BasisFunction) -> MechanismReport:
    """Check table lengths, boundary zeros and the ``f_j(1) > 0`` gate per class.

    A length mismatch is a structural error and raises; a failed gate only
    means the PoA is zero.
    """
    if f.k != part.k:
        raise MechanismError(f"mechanism has {f.k} tables for {part.k} classes")
    if part.n > w.n:
        raise MechanismError(f"basis covers up to {w.n} agents, partition has {part.n}")
    rep = MechanismReport()
    for j, table in enumerate(f.per_class):
        need = part.n_observed(j) + 2
        if table.size != need:
            raise MechanismError(f"class {j + 1}: table has {table.size} entries, expected {need}")
        rep.length.append(True)
        rep.boundary.append(table[0] == 0.0 and table[-1] == 0.0)
        rep.gate.append(bool(table[1] > 0))
    return rep
