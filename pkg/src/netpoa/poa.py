"""Price-of-anarchy linear programs.

Every program here is assembled from an :class:`~netpoa.index_sets.IndexSet`
and one equilibrium coefficient per (tuple, class):

* a class with a tabulated mechanism contributes
  ``a_j f_j(A_tj) - b_j f_j(A_tj + 1)``;
* a blind or isolated class (agents that only ever count themselves)
  contributes ``a_j - b_j``, the same term scaled by the positive constant
  ``f(1)``, which the class multiplier absorbs.

``poa_primal`` maximises optimal welfare over resource-value profiles theta
with equilibrium welfare normalised to one; ``poa_dual`` is its transposed
program over the reduced tuple set; ``optimize_*`` fold the class multipliers
into the mechanism and minimise the same bound over the mechanism itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .index_sets import (
    DEFAULT_CAP,
    IndexSet,
    IndexTuple,
    build_index_set,
    build_orbit_index_set,
    enumerate_I,
    expected_size,
)
from .mechanisms import BasisFunction, Mechanism, MechanismError, validate_mechanism
from .network import (
    ClassPartition,
    blind_network,
    isolated_network,
    partition_into_classes,
    two_class_partition,
)

BLIND = None  # marker for a class whose agents only observe themselves


class InternalLpError(RuntimeError):
    """An LP that must be optimal for valid input was not."""


@dataclass
class PoaResult:
    poa: float
    lp_value: float
    gate_failed: int | None = None
    theta: np.ndarray | None = None
    index_set: IndexSet | None = None
    lam: np.ndarray | None = None
    mu: float | None = None
    solution: lp.LpSolution | None = None

    def theta_map(self, threshold: float = 0.0) -> dict[IndexTuple, float]:
        if self.theta is None:
            return {}
        keep = np.flatnonzero(self.theta > threshold)
        return {self.index_set[i]: float(self.theta[i]) for i in keep}

    def to_json(self) -> dict:
        return {
            "poa": self.poa,
            "lp_value": None if math.isinf(self.lp_value) else self.lp_value,
            "gate_failed": None if self.gate_failed is None else self.gate_failed + 1,
            "lambda": None if self.lam is None else [float(v) for v in self.lam],
            "mu": self.mu,
        }


@dataclass
class OptimalDesign:
    mechanism: Mechanism
    normalized: Mechanism
    mu_opt: float
    poa_opt: float
    lam: np.ndarray = field(default_factory=lambda: np.zeros(0))
    solution: lp.LpSolution | None = None

    def to_json(self) -> dict:
        return {
            "poa": self.poa_opt,
            "mu": self.mu_opt,
            "mechanism": {"per_class": [t.tolist() for t in self.mechanism.per_class]},
            "normalized": {"per_class": [t.tolist() for t in self.normalized.per_class]},
        }


# ---------------------------------------------------------------------------
# coefficient assembly


def equilibrium_coefficients(iset: IndexSet, tables) -> np.ndarray:
    """``(N, k)`` matrix of per-class equilibrium terms for a fixed mechanism."""
    coef = np.empty((len(iset), iset.k))
    for j, f in enumerate(tables):
        a, b = iset.a[:, j], iset.b[:, j]
        if f is BLIND:
            coef[:, j] = a - b
        else:
            Aj = iset.Aj[:, j]
            coef[:, j] = a * f[Aj] - b * f[Aj + 1]
    return coef


def _mechanism_columns(iset: IndexSet, sizes) -> tuple[np.ndarray, list[int]]:
    """Linear map from the free mechanism values ``f_j(1..m_j)`` to the equilibrium terms.

    ``sizes[j]`` is ``m_j`` for a designed class and ``BLIND`` for a class
    handled by a single multiplier. Returns the ``(N, cols)`` matrix and the
    column offset of each class.
    """
    offsets, col = [], 0
    for m in sizes:
        offsets.append(col)
        col += 1 if m is BLIND else m
    M = np.zeros((len(iset), col))
    rows = np.arange(len(iset))
    for j, m in enumerate(sizes):
        a, b = iset.a[:, j], iset.b[:, j]
        if m is BLIND:
            M[:, offsets[j]] = a - b
            continue
        Aj = iset.Aj[:, j]
        # f_j(0) and f_j(m+1) are fixed at zero and drop out
        inside = (Aj >= 1) & (Aj <= m)
        np.add.at(M, (rows[inside], offsets[j] + Aj[inside] - 1), a[inside])
        inside = Aj + 1 <= m
        np.add.at(M, (rows[inside], offsets[j] + Aj[inside]), -b[inside])
    return M, offsets


def _solve(p: lp.LpProblem, what: str) -> lp.LpSolution:
    sol = lp.solve(p)
    if not sol.optimal:
        raise InternalLpError(f"{what} LP is {sol.status.value}; valid inputs always give a finite optimum")
    lp.check_optimal(sol)
    return sol


def primal_lp(iset: IndexSet, w: BasisFunction, coef: np.ndarray) -> lp.LpProblem:
    k = coef.shape[1]
    A = np.vstack([coef.T, w.values[iset.A][None, :]])
    b = np.r_[np.zeros(k), 1.0]
    return lp.LpProblem(w.values[iset.B], A, b, (">=",) * k + ("=",), "max")


def dual_lp(iset: IndexSet, w: BasisFunction, coef: np.ndarray) -> lp.LpProblem:
    k = coef.shape[1]
    A = np.hstack([coef, -w.values[iset.A][:, None]])
    c = np.r_[np.zeros(k), 1.0]
    lower = np.r_[np.zeros(k), -np.inf]
    return lp.LpProblem(c, A, -w.values[iset.B], ("<=",) * len(iset), "min", lower)


def design_lp(iset: IndexSet, w: BasisFunction, sizes) -> tuple[lp.LpProblem, list[int]]:
    M, offsets = _mechanism_columns(iset, sizes)
    A = np.hstack([M, -w.values[iset.A][:, None]])
    ncol = A.shape[1]
    c = np.zeros(ncol)
    c[-1] = 1.0
    lower = np.full(ncol, -np.inf)
    for j, m in enumerate(sizes):
        if m is BLIND:
            lower[offsets[j]] = 0.0
    return lp.LpProblem(c, A, -w.values[iset.B], ("<=",) * len(iset), "min", lower), offsets


# ---------------------------------------------------------------------------
# fixed mechanism


def _check_inputs(part: ClassPartition, w: BasisFunction, f: Mechanism) -> int | None:
    return validate_mechanism(f, part, w).first_gate_failure


def _same_table(f, g) -> bool:
    if f is BLIND or g is BLIND:
        return f is g
    return f.shape == g.shape and bool(np.array_equal(f, g))


def exchangeable_groups(part: ClassPartition, tables) -> list[list[int]]:
    """Group classes that can be swapped without changing the program.

    Classes ``j`` and ``l`` are swappable when they have the same size and
    mechanism and the transposition of ``j`` and ``l`` maps every observation
    set onto the observation set of the image class. Swappability is
    transitive, so greedy grouping is exact.
    """
    k = part.k
    obs = part.obs_classes

    def swappable(j, l):
        if part.kappa[j] != part.kappa[l] or not _same_table(tables[j], tables[l]):
            return False
        sigma = list(range(k))
        sigma[j], sigma[l] = l, j
        return all(frozenset(sigma[c] for c in obs[m]) == obs[sigma[m]] for m in range(k))

    groups: list[list[int]] = []
    for j in range(k):
        for g in groups:
            if swappable(g[0], j):
                g.append(j)
                break
        else:
            groups.append([j])
    return groups


def _dual_symmetric(part, w, tables, reduced, cap) -> PoaResult:
    # summing the equilibrium rows of a group keeps the optimum: averaging any
    # solution over the group's permutations gives a symmetric one
    groups = exchangeable_groups(part, tables)
    iset = build_orbit_index_set(part.kappa, part.obs_classes, groups, reduced, cap)
    full = equilibrium_coefficients(iset, tables)
    coef = np.stack([full[:, g].sum(axis=1) for g in groups], axis=1)
    sol = _solve(dual_lp(iset, w, coef), "dual PoA")
    V = sol.objective
    lam = np.empty(part.k)
    for gi, g in enumerate(groups):
        lam[g] = sol.x[gi]
    return PoaResult(1.0 / V, V, None, None, iset, lam, float(sol.x[len(groups)]), sol)


def _primal(iset, w, tables) -> PoaResult:
    coef = equilibrium_coefficients(iset, tables)
    sol = _solve(primal_lp(iset, w, coef), "primal PoA")
    W = sol.objective
    k = coef.shape[1]
    # row duals of the max problem: equilibrium rows are <= 0 in the sensitivity convention
    return PoaResult(1.0 / W, W, None, sol.x, iset, -sol.duals[:k], float(sol.duals[k]), sol)


def _dual(iset, w, tables) -> PoaResult:
    coef = equilibrium_coefficients(iset, tables)
    sol = _solve(dual_lp(iset, w, coef), "dual PoA")
    k = coef.shape[1]
    V = sol.objective
    theta = -sol.duals
    return PoaResult(1.0 / V, V, None, np.maximum(theta, 0.0), iset, sol.x[:k], float(sol.x[k]), sol)


def poa_primal(part: ClassPartition, w: BasisFunction, f: Mechanism, cap: int = DEFAULT_CAP) -> PoaResult:
    """PoA as ``1/W*`` where ``W*`` maximises optimal welfare over theta on the full tuple set."""
    gate = _check_inputs(part, w, f)
    if gate is not None:
        return PoaResult(0.0, math.inf, gate)
    return _primal(enumerate_I(part, cap), w, f.per_class)


def poa_dual(
    part: ClassPartition,
    w: BasisFunction,
    f: Mechanism,
    cap: int = DEFAULT_CAP,
    reduced: bool = True,
    symmetric: bool | None = False,
) -> PoaResult:
    """PoA as ``1/V*`` from the multiplier program.

    ``reduced=False`` imposes a constraint for every tuple of the full set
    instead of the reduced one; the value is the same.

    ``symmetric=True`` shares one multiplier across exchangeable classes and
    keeps one tuple per orbit (see :func:`exchangeable_groups`); the value is
    again the same, but no per-tuple theta is returned. ``None`` switches to
    it only when the plain tuple set is above ``cap``.
    """
    gate = _check_inputs(part, w, f)
    if gate is not None:
        return PoaResult(0.0, math.inf, gate)
    if symmetric is None:
        symmetric = expected_size(part.kappa, reduced) > cap
    if symmetric:
        return _dual_symmetric(part, w, f.per_class, reduced, cap)
    iset = build_index_set(part.kappa, part.obs_classes, reduced, cap)
    return _dual(iset, w, f.per_class)


def _design(iset: IndexSet, w: BasisFunction, sizes) -> OptimalDesign:
    p, offsets = design_lp(iset, w, sizes)
    sol = _solve(p, "design")
    mu = sol.objective
    raw, norm, lam = [], [], []
    for j, m in enumerate(sizes):
        if m is BLIND:
            lam.append(sol.x[offsets[j]])
            raw.append(np.array([0.0, 1.0, 0.0]))
            norm.append(np.array([0.0, w.values[1], 0.0]))
            continue
        vals = sol.x[offsets[j] : offsets[j] + m]
        raw.append(np.r_[0.0, vals, 0.0])
        norm.append(np.r_[0.0, vals * (w.values[1] / vals[0]), 0.0])
    return OptimalDesign(Mechanism(tuple(raw)), Mechanism(tuple(norm)), mu, 1.0 / mu, np.array(lam), sol)


def optimize_mechanism(part: ClassPartition, w: BasisFunction, cap: int = DEFAULT_CAP) -> OptimalDesign:
    """PoA-optimal tables ``f_j(1..|N_j|)`` for every class of ``part``."""
    if part.n > w.n:
        raise MechanismError(f"basis covers up to {w.n} agents, partition has {part.n}")
    iset = build_index_set(part.kappa, part.obs_classes, True, cap)
    return _design(iset, w, [part.n_observed(j) for j in range(part.k)])


# ---------------------------------------------------------------------------
# blind / isolated two-class programs


def _two_class(n: int, kappa: int, isolated: bool) -> tuple[ClassPartition, list]:
    """Partition plus, per class, ``BLIND`` or the number of agents it observes."""
    part = two_class_partition(n, kappa, isolated)
    if kappa == n:
        return part, [BLIND]
    observed = n - kappa if isolated else n
    if kappa == 0:
        return part, [observed]
    return part, [BLIND, observed]


def _table(f_nbl, m: int) -> np.ndarray:
    """Normalise ``f_nbl`` to ``(0, f(1), ..., f(m), 0)``.

    Accepts either the interior values or a table already including both
    zero ends; longer tables are truncated to ``m`` interior values.
    """
    f = np.asarray(f_nbl, dtype=float).reshape(-1)
    if f.size >= 2 and f[0] == 0.0 and f.size >= m + 2:
        vals = f[1 : m + 1]
    else:
        vals = f[:m]
    if vals.size < m:
        raise MechanismError(f"mechanism needs {m} values, got {vals.size}")
    return np.r_[0.0, vals, 0.0]


def _poa_two_class(n, kappa, w, f_1, f_nbl, isolated, reduced, cap) -> PoaResult:
    if w.n < n:
        raise MechanismError(f"basis covers up to {w.n} agents, need {n}")
    part, sizes = _two_class(n, kappa, isolated)
    tables = [BLIND if m is BLIND else _table(f_nbl, m) for m in sizes]
    if kappa > 0 and not f_1 > 0:
        return PoaResult(0.0, math.inf, 0)
    for j, t in enumerate(tables):
        if t is not BLIND and not t[1] > 0:
            return PoaResult(0.0, math.inf, j)
    iset = build_index_set(part.kappa, part.obs_classes, reduced, cap)
    return _dual(iset, w, tables)


def poa_blind(
    n: int, kappa: int, w: BasisFunction, f_bl_1: float, f_nbl, reduced: bool = True, cap: int = DEFAULT_CAP
) -> PoaResult:
    """PoA with ``kappa`` blind agents (class 1) and ``n - kappa`` fully informed ones (class 2).

    Only the sign of ``f_bl_1`` matters. ``f_nbl`` holds ``f(1..n)``, with or
    without the zero ends.
    """
    return _poa_two_class(n, kappa, w, f_bl_1, f_nbl, False, reduced, cap)


def poa_isolated(
    n: int, kappa: int, w: BasisFunction, f_iso_1: float, f_nbl, reduced: bool = True, cap: int = DEFAULT_CAP
) -> PoaResult:
    """Like :func:`poa_blind`, but the others observe only each other; ``f_nbl`` is used on ``1..n-kappa``."""
    return _poa_two_class(n, kappa, w, f_iso_1, f_nbl, True, reduced, cap)


def _optimize_two_class(n, kappa, w, isolated, cap) -> OptimalDesign:
    if w.n < n:
        raise MechanismError(f"basis covers up to {w.n} agents, need {n}")
    part, sizes = _two_class(n, kappa, isolated)
    iset = build_index_set(part.kappa, part.obs_classes, True, cap)
    return _design(iset, w, sizes)


def optimize_blind(n: int, kappa: int, w: BasisFunction, cap: int = DEFAULT_CAP) -> OptimalDesign:
    """Optimal ``f_nbl`` with blind agents fixed at ``f_bl(1) = 1``."""
    return _optimize_two_class(n, kappa, w, False, cap)


def optimize_isolated(n: int, kappa: int, w: BasisFunction, cap: int = DEFAULT_CAP) -> OptimalDesign:
    return _optimize_two_class(n, kappa, w, True, cap)


def general_mechanism(part: ClassPartition, f_1: float, f_nbl) -> Mechanism:
    """Give classes that observe one agent the table ``(0, f_1, 0)`` and the rest ``f_nbl``."""
    tables = []
    for j in range(part.k):
        m = part.n_observed(j)
        tables.append(np.array([0.0, f_1, 0.0]) if m == 1 else _table(f_nbl, m))
    return Mechanism(tuple(tables))


@dataclass
class CrossCheck:
    general: PoaResult
    two_class: PoaResult
    tol: float

    @property
    def difference(self) -> float:
        a, b = self.general.lp_value, self.two_class.lp_value
        if math.isinf(a) and math.isinf(b):
            return 0.0
        return abs(a - b)

    @property
    def agree(self) -> bool:
        return self.difference <= self.tol


def cross_check_blind_vs_general(
    n: int,
    kappa: int,
    w: BasisFunction,
    f_nbl,
    f_bl_1: float = 1.0,
    isolated: bool = False,
    tol: float = 2e-6,
    cap: int = DEFAULT_CAP,
) -> CrossCheck:
    """Solve the blind (or isolated) network twice: on its similarity partition and with the two-class program.

    The partition side falls back to the orbit program when its plain tuple
    set is above ``cap`` (every agent blind gives ``4**n`` tuples).
    """
    net = isolated_network(n, kappa) if isolated else blind_network(n, kappa)
    part = partition_into_classes(net)
    general = poa_dual(part, w, general_mechanism(part, f_bl_1, f_nbl), cap, symmetric=None)
    two = _poa_two_class(n, kappa, w, f_bl_1, f_nbl, isolated, True, cap)
    return CrossCheck(general, two, tol)
