"""Explicit resource-allocation games: welfare, utilities, pure Nash equilibria.

Used as ground truth for the LP bounds. Profiles are tuples holding, per
agent, the index of the chosen action in that agent's action set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

from .index_sets import IndexTuple, tuple_stats
from .mechanisms import BasisFunction, Mechanism
from .network import ClassPartition

NE_TOL = 1e-9
DEFAULT_PROFILE_CAP = 1_000_000
THETA_FLOOR = 1e-10

Profile = tuple[int, ...]


class OracleError(RuntimeError):
    pass


class ProfileCapError(OracleError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"game has {count} profiles, above the cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass
class GameInstance:
    values: np.ndarray
    actions: list[list[frozenset[int]]]
    partition: ClassPartition
    w: BasisFunction
    f: Mechanism
    resource_ids: list[str] | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        R = self.values.size
        if np.any(self.values < 0):
            raise OracleError("resource values must be nonnegative")
        if len(self.actions) != self.partition.n:
            raise OracleError(f"{len(self.actions)} action sets for {self.partition.n} agents")
        self.actions = [[frozenset(a) for a in acts] for acts in self.actions]
        for i, acts in enumerate(self.actions):
            if not acts:
                raise OracleError(f"agent {i + 1} has no actions")
            for a in acts:
                if any(not 0 <= r < R for r in a):
                    raise OracleError(f"agent {i + 1} references an unknown resource")
        if self.resource_ids is None:
            self.resource_ids = [f"r{r}" for r in range(R)]

    @property
    def n(self) -> int:
        return len(self.actions)

    @property
    def n_resources(self) -> int:
        return self.values.size

    @cached_property
    def owner(self) -> list[int]:
        return self.partition.class_of()

    @cached_property
    def incidence(self) -> list[np.ndarray]:
        """Per agent, a ``(|A_i|, R)`` 0/1 matrix of its actions."""
        out = []
        for acts in self.actions:
            m = np.zeros((len(acts), self.n_resources), dtype=np.int64)
            for k, a in enumerate(acts):
                m[k, list(a)] = 1
            out.append(m)
        return out

    @cached_property
    def observed_mask(self) -> np.ndarray:
        """``(k, n)`` mask of the agents each class observes."""
        part = self.partition
        mask = np.zeros((part.k, self.n), dtype=bool)
        for j in range(part.k):
            mask[j, list(part.observed_agents(j))] = True
        return mask

    @cached_property
    def cumulative_f(self) -> list[np.ndarray]:
        """``F_j(m) = f_j(1) + ... + f_j(m)``."""
        return [np.concatenate([[0.0], np.cumsum(t[1:])]) for t in self.f.per_class]

    @property
    def n_profiles(self) -> int:
        return math.prod(len(a) for a in self.actions)

    def selection(self, p: Profile) -> np.ndarray:
        """``(n, R)`` 0/1 matrix of who selects what under ``p``."""
        return np.stack([self.incidence[i][p[i]] for i in range(self.n)])


def _check_profile(g: GameInstance, p) -> Profile:
    p = tuple(int(v) for v in p)
    if len(p) != g.n or any(not 0 <= c < len(g.actions[i]) for i, c in enumerate(p)):
        raise OracleError(f"invalid profile {p}")
    return p


def welfare(g: GameInstance, p) -> float:
    p = _check_profile(g, p)
    counts = g.selection(p).sum(axis=0)
    return float(g.values @ g.w.values[counts])


def utility(g: GameInstance, i: int, p) -> float:
    p = _check_profile(g, p)
    j = g.owner[i]
    sel = g.selection(p)
    seen = sel[g.observed_mask[j]].sum(axis=0)
    mine = g.incidence[i][p[i]].astype(bool)
    return float(g.values[mine] @ g.f.per_class[j][seen[mine]])


def potential_G(g: GameInstance, j: int, p) -> float:
    """Class-``j`` potential ``sum_r v_r (f_j(1) + ... + f_j(count_r))`` over observed selectors."""
    p = _check_profile(g, p)
    seen = g.selection(p)[g.observed_mask[j]].sum(axis=0)
    return float(g.values @ g.cumulative_f[j][seen])


def deviate(p: Profile, i: int, action: int) -> Profile:
    return p[:i] + (action,) + p[i + 1 :]


def is_nash(g: GameInstance, p, method: str = "potential", tol: float = NE_TOL) -> bool:
    """No agent gains more than ``tol`` by switching action.

    ``method="potential"`` compares class potentials, ``"utility"``
    compares utilities directly.
    """
    p = _check_profile(g, p)
    for i in range(g.n):
        j = g.owner[i]
        if method == "potential":
            base = potential_G(g, j, p)
            gains = [base - potential_G(g, j, deviate(p, i, a)) for a in range(len(g.actions[i]))]
            if any(-d > tol for d in gains):
                return False
        elif method == "utility":
            base = utility(g, i, p)
            if any(utility(g, i, deviate(p, i, a)) - base > tol for a in range(len(g.actions[i]))):
                return False
        else:
            raise ValueError(f"unknown method {method!r}")
    return True


# ---------------------------------------------------------------------------
# exhaustive enumeration


def _profile_table(g: GameInstance, start: int, stop: int) -> np.ndarray:
    sizes = [len(a) for a in g.actions]
    return np.stack(np.unravel_index(np.arange(start, stop), sizes), axis=1)


def _chunk_scan(g: GameInstance, choice: np.ndarray, tol: float):
    """Welfare and NE flag for a block of profiles (rows of ``choice``)."""
    P = choice.shape[0]
    sel = np.stack([g.incidence[i][choice[:, i]] for i in range(g.n)], axis=1)  # (P, n, R)
    total = sel.sum(axis=1)
    welf = g.w.values[total] @ g.values
    nash = np.ones(P, dtype=bool)
    seen = np.einsum("kn,pnr->pkr", g.observed_mask.astype(np.int64), sel)
    for i in range(g.n):
        j = g.owner[i]
        Fj = g.cumulative_f[j]
        base = Fj[seen[:, j]] @ g.values
        inside = bool(g.observed_mask[j, i])
        for a in range(len(g.actions[i])):
            cnt = seen[:, j] + (g.incidence[i][a][None, :] - sel[:, i]) * inside
            gain = base - Fj[cnt] @ g.values
            nash &= gain >= -tol
    return welf, nash


def scan_profiles(g: GameInstance, cap: int = DEFAULT_PROFILE_CAP, tol: float = NE_TOL, chunk: int = 4096):
    """Welfare of every profile and whether it is a pure NE, in mixed-radix order."""
    total = g.n_profiles
    if total > cap:
        raise ProfileCapError(total, cap)
    welf = np.empty(total)
    nash = np.empty(total, dtype=bool)
    for s in range(0, total, chunk):
        e = min(total, s + chunk)
        welf[s:e], nash[s:e] = _chunk_scan(g, _profile_table(g, s, e), tol)
    return welf, nash


def enumerate_pure_ne(g: GameInstance, cap: int = DEFAULT_PROFILE_CAP, tol: float = NE_TOL) -> list[Profile]:
    _, nash = scan_profiles(g, cap, tol)
    idx = np.flatnonzero(nash)
    if idx.size == 0:
        return []
    sizes = [len(a) for a in g.actions]
    return [tuple(int(v) for v in row) for row in np.stack(np.unravel_index(idx, sizes), axis=1)]


@dataclass
class EmpiricalPoa:
    ratio: float | None
    worst_ne_welfare: float | None
    optimal_welfare: float
    n_equilibria: int


def empirical_poa_report(g: GameInstance, cap: int = DEFAULT_PROFILE_CAP, tol: float = NE_TOL) -> EmpiricalPoa:
    welf, nash = scan_profiles(g, cap, tol)
    opt = float(welf.max())
    if opt <= 0:
        raise OracleError("optimal welfare is zero; every game needs some profile with positive welfare")
    if not nash.any():
        return EmpiricalPoa(None, None, opt, 0)
    worst = float(welf[nash].min())
    return EmpiricalPoa(worst / opt, worst, opt, int(nash.sum()))


def empirical_poa(g: GameInstance, cap: int = DEFAULT_PROFILE_CAP, tol: float = NE_TOL) -> float | None:
    """Worst pure-NE welfare over optimal welfare; ``None`` if there is no pure NE."""
    return empirical_poa_report(g, cap, tol).ratio


# ---------------------------------------------------------------------------
# random games


@dataclass(frozen=True)
class RandomGameSpec:
    max_resources: int = 4
    max_actions: int = 3
    value_low: float = 0.1
    value_high: float = 1.0


def random_game(
    part: ClassPartition, w: BasisFunction, f: Mechanism, rng: np.random.Generator, spec: RandomGameSpec = RandomGameSpec()
) -> GameInstance:
    """Values uniform on ``[value_low, value_high]``; actions are random nonempty resource subsets."""
    R = int(rng.integers(1, spec.max_resources + 1))
    values = rng.uniform(spec.value_low, spec.value_high, size=R)
    actions = []
    for _ in range(part.n):
        n_act = int(rng.integers(1, spec.max_actions + 1))
        masks = rng.integers(1, 2**R, size=n_act)
        actions.append([frozenset(r for r in range(R) if m >> r & 1) for m in masks])
    return GameInstance(values, actions, part, w, f)


# ---------------------------------------------------------------------------
# worst-case instance from a primal certificate


@dataclass
class TightInstance:
    game: GameInstance
    a_ne: Profile
    a_opt: Profile
    copies: int
    support: list[IndexTuple]
    groups: dict[tuple[int, int, int], list[int]] = field(default_factory=dict)
    dropped_mass: float = 0.0
    checks: dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        out = game_to_json(self.game)
        out["a_ne"] = [c + 1 for c in self.a_ne]
        out["a_opt"] = [c + 1 for c in self.a_opt]
        out["copies"] = self.copies
        out["groups"] = [
            {"tuple": str(self.support[s]), "class": j + 1, "l": l + 1, "resources": [self.game.resource_ids[r] for r in rs]}
            for (s, j, l), rs in self.groups.items()
        ]
        out["dropped_mass"] = self.dropped_mass
        out["checks"] = self.checks
        return out


def build_tight_instance(
    part: ClassPartition,
    w: BasisFunction,
    f: Mechanism,
    theta: dict[IndexTuple, float],
    tol: float = 1e-7,
    resource_cap: int = 20_000,
) -> TightInstance:
    """Game whose agents choose between an equilibrium and an optimal action, realising ``theta``.

    Every support tuple ``t`` gets ``copies = lcm(kappa)`` resources of value
    ``theta(t)/copies``, split for each class ``j`` into ``kappa_j`` consecutive
    groups. The agent at position ``i`` of class ``j`` takes ``a_j + x_j``
    groups clockwise from group ``i`` at equilibrium and ``b_j + x_j`` groups
    clockwise from group ``i - b_j`` at the optimum.
    """
    kappa = part.kappa
    copies = reduce(math.lcm, kappa, 1)
    support = [t for t, v in theta.items() if v >= THETA_FLOOR]
    dropped = float(sum(v for v in theta.values() if v < THETA_FLOOR))
    if copies * len(support) > resource_cap:
        raise OracleError(f"instance needs {copies * len(support)} resources, cap is {resource_cap}")

    stats = [tuple_stats(t, part) for t in support]
    norm = sum(w.values[s.A] * theta[t] for t, s in zip(support, stats))
    if abs(norm - 1.0) > tol:
        raise OracleError(f"theta is not normalised: equilibrium welfare {norm}")
    for j in range(part.k):
        fj = f.per_class[j]
        lhs = sum(theta[t] * (t.triples[j][0] * fj[s.Aj[j]] - t.triples[j][2] * fj[s.Aj[j] + 1]) for t, s in zip(support, stats))
        if lhs < -tol:
            raise OracleError(f"theta violates the class {j + 1} equilibrium constraint by {-lhs}")

    values = np.repeat([theta[t] / copies for t in support], copies)
    ids = [f"t{s}q{q}" for s in range(len(support)) for q in range(copies)]
    ne_sets = [set() for _ in range(part.n)]
    opt_sets = [set() for _ in range(part.n)]
    groups: dict[tuple[int, int, int], list[int]] = {}
    for s, t in enumerate(support):
        base = s * copies
        for j, members in enumerate(part.classes):
            kj = kappa[j]
            size = copies // kj
            a, x, b = t.triples[j]
            for l in range(kj):
                groups[(s, j, l)] = list(range(base + l * size, base + (l + 1) * size))
            for pos, agent in enumerate(sorted(members)):
                for l in range(kj):
                    if (l - pos) % kj < a + x:
                        ne_sets[agent].update(groups[(s, j, l)])
                    if (l - pos + b) % kj < b + x:
                        opt_sets[agent].update(groups[(s, j, l)])

    actions = [[frozenset(ne_sets[i]), frozenset(opt_sets[i])] for i in range(part.n)]
    game = GameInstance(values, actions, part, w, f, ids)
    a_ne = (0,) * part.n
    a_opt = (1,) * part.n
    inst = TightInstance(game, a_ne, a_opt, copies, support, groups, dropped)
    inst.checks = check_tight_instance(inst, theta, tol)
    return inst


def check_tight_instance(inst: TightInstance, theta: dict[IndexTuple, float], tol: float = 1e-7) -> dict[str, bool]:
    """Structural properties B.1-B.3 plus welfare and equilibrium checks."""
    g = inst.game
    part = g.partition
    copies = inst.copies
    sel_ne = g.selection(inst.a_ne)
    sel_opt = g.selection(inst.a_opt)
    owner = np.array(g.owner)
    b1 = b2 = b3 = True
    for s, t in enumerate(inst.support):
        res = slice(s * copies, (s + 1) * copies)
        b1 &= bool(np.allclose(g.values[res], theta[t] / copies, rtol=0, atol=1e-15))
        for j in range(part.k):
            a, x, b = t.triples[j]
            in_j = owner == j
            b2 &= bool(np.all(sel_ne[in_j, res].sum(axis=0) == a + x))
            b2 &= bool(np.all(sel_opt[in_j, res].sum(axis=0) == b + x))
            size = copies // part.kappa[j]
            b3 &= bool(np.all(sel_ne[in_j, res].sum(axis=1) == size * (a + x)))
            b3 &= bool(np.all(sel_opt[in_j, res].sum(axis=1) == size * (b + x)))
            b3 &= bool(np.all((sel_ne[in_j, res] & sel_opt[in_j, res]).sum(axis=1) == size * x))
    w_ne = welfare(g, inst.a_ne)
    w_opt = welfare(g, inst.a_opt)
    target = sum(g.w.values[tuple_stats(t, part).B] * theta[t] for t in inst.support)
    return {
        "B.1": b1,
        "B.2": b2,
        "B.3": b3,
        "W(a_ne)=1": abs(w_ne - 1.0) <= tol,
        "W(a_opt)=W*": bool(abs(w_opt - target) <= tol * max(1.0, target)),
        "a_ne is NE": is_nash(g, inst.a_ne),
    }


# ---------------------------------------------------------------------------
# JSON


def game_to_json(g: GameInstance) -> dict:
    ids = g.resource_ids
    return {
        "resources": [{"id": ids[r], "v": float(v)} for r, v in enumerate(g.values)],
        "action_sets": [[sorted(ids[r] for r in a) for a in acts] for acts in g.actions],
    }


def game_from_json(data: dict, part: ClassPartition, w: BasisFunction, f: Mechanism) -> GameInstance:
    ids = [str(r["id"]) for r in data["resources"]]
    pos = {rid: k for k, rid in enumerate(ids)}
    if len(pos) != len(ids):
        raise OracleError("duplicate resource id")
    values = [float(r["v"]) for r in data["resources"]]
    try:
        actions = [[frozenset(pos[str(r)] for r in a) for a in acts] for acts in data["action_sets"]]
    except KeyError as e:
        raise OracleError(f"action references unknown resource {e.args[0]!r}") from None
    return GameInstance(np.array(values), actions, part, w, f, ids)
