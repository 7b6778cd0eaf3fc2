"""Information networks and their similarity-class partitions.

Agents are 0-based internally. JSON files and printed output use 1-based
agent and class numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class NetworkError(ValueError):
    """Invalid network or partition input."""


@dataclass(frozen=True)
class InformationNetwork:
    """``obs[i]`` is the set of agents whose actions agent ``i`` observes."""

    obs: tuple[frozenset[int], ...]
    repaired: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return len(self.obs)

    def observers(self, i: int) -> frozenset[int]:
        return frozenset(l for l in range(self.n) if i in self.obs[l])


def validate_network(obs) -> InformationNetwork:
    """Build a network, inserting ``i`` into ``obs[i]`` when it is missing.

    Agents whose observation set had to be repaired are listed in
    ``repaired``.
    """
    obs = [set(o) for o in obs]
    n = len(obs)
    if n == 0:
        raise NetworkError("network has no agents")
    for i, o in enumerate(obs):
        for l in o:
            if not isinstance(l, int):
                raise NetworkError(f"agent {i + 1} observes a non-integer agent {l!r}")
            if not 0 <= l < n:
                # messages use the 1-based numbering of the input files
                raise NetworkError(f"agent {i + 1} observes agent {l + 1}, outside 1..{n}")
    repaired = tuple(i for i, o in enumerate(obs) if i not in o)
    for i in repaired:
        obs[i].add(i)
    return InformationNetwork(tuple(frozenset(o) for o in obs), repaired)


@dataclass(frozen=True)
class ClassPartition:
    """Agents grouped into classes; ``obs_classes[j]`` are the classes observed by class ``j``."""

    classes: tuple[frozenset[int], ...]
    obs_classes: tuple[frozenset[int], ...]
    kappa: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        classes = tuple(frozenset(c) for c in self.classes)
        obs_classes = tuple(frozenset(o) for o in self.obs_classes)
        if len(classes) != len(obs_classes):
            raise NetworkError("need one observed-class set per class")
        if any(not c for c in classes):
            raise NetworkError("empty class")
        members = sorted(i for c in classes for i in c)
        if members != list(range(len(members))):
            raise NetworkError("classes must partition agents 0..n-1 without overlap")
        k = len(classes)
        for j, o in enumerate(obs_classes):
            if any(not 0 <= l < k for l in o):
                raise NetworkError(f"class {j + 1} observes a non-existent class")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "obs_classes", obs_classes)
        object.__setattr__(self, "kappa", tuple(len(c) for c in classes))

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def n(self) -> int:
        return sum(self.kappa)

    def n_observed(self, j: int) -> int:
        """|N_j|, the number of agents class ``j`` observes."""
        return sum(self.kappa[l] for l in self.obs_classes[j])

    def observed_agents(self, j: int) -> frozenset[int]:
        return frozenset().union(*(self.classes[l] for l in self.obs_classes[j]))

    def class_of(self) -> list[int]:
        owner = [-1] * self.n
        for j, c in enumerate(self.classes):
            for i in c:
                owner[i] = j
        return owner


def partition_into_classes(net: InformationNetwork) -> ClassPartition:
    """Coarsest partition into similarity classes.

    Agents share a class iff they observe the same agents and are observed
    by the same agents. Classes are ordered by smallest member.
    """
    groups: dict[tuple, list[int]] = {}
    for i in range(net.n):
        key = (net.obs[i], net.observers(i))
        groups.setdefault(key, []).append(i)
    classes = sorted((frozenset(g) for g in groups.values()), key=min)
    owner = {i: j for j, c in enumerate(classes) for i in c}
    obs_classes = [frozenset(owner[l] for l in net.obs[min(c)]) for c in classes]
    return ClassPartition(tuple(classes), tuple(obs_classes))


@dataclass
class PartitionReport:
    c1: bool
    c2: bool
    c3: bool
    witnesses: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.c1 and self.c2 and self.c3


def validate_partition(net: InformationNetwork, part: ClassPartition) -> PartitionReport:
    """Check the three class-division conditions separately.

    C.1: every agent is in exactly one class. C.2: each class observes all its
    own members. C.3: each agent's observation set is exactly the union of the
    classes its class is said to observe. Witnesses are 1-based.
    """
    w: dict[str, list] = {"C.1": [], "C.2": [], "C.3": []}
    seen: dict[int, int] = {}
    for j, c in enumerate(part.classes):
        for i in c:
            if i in seen or not 0 <= i < net.n:
                w["C.1"].append(i + 1)
            seen[i] = j
    w["C.1"] += [i + 1 for i in range(net.n) if i not in seen]

    for j, c in enumerate(part.classes):
        for i in c:
            if 0 <= i < net.n and not c <= net.obs[i]:
                w["C.2"].append((j + 1, i + 1))
        if c and all(0 <= i < net.n for i in c):
            target = part.observed_agents(j)
            for i in c:
                if net.obs[i] != target:
                    w["C.3"].append((j + 1, i + 1))
    return PartitionReport(not w["C.1"], not w["C.2"], not w["C.3"], w)


def blind_network(n: int, kappa: int) -> InformationNetwork:
    """Agents ``0..kappa-1`` see only themselves; the rest see everyone."""
    _check_kappa(n, kappa)
    everyone = frozenset(range(n))
    return validate_network([{i} if i < kappa else everyone for i in range(n)])


def isolated_network(n: int, kappa: int) -> InformationNetwork:
    """Agents ``0..kappa-1`` see only themselves and nobody sees them."""
    _check_kappa(n, kappa)
    others = set(range(kappa, n))
    return validate_network([{i} if i < kappa else others for i in range(n)])


def complete_network(n: int) -> InformationNetwork:
    return validate_network([set(range(n))] * n)


def two_class_partition(n: int, kappa: int, isolated: bool = False) -> ClassPartition:
    """Grouping used by the two-class blind/isolated programs.

    Class 1 holds the ``kappa`` blind (or isolated) agents, class 2 the rest;
    empty classes are dropped. Class 1 does not observe its own members, so
    this partition fails C.2 by design.
    """
    _check_kappa(n, kappa)
    if kappa == 0:
        return ClassPartition((frozenset(range(n)),), (frozenset({0}),))
    if kappa == n:
        return ClassPartition((frozenset(range(n)),), (frozenset({0}),))
    blind = frozenset(range(kappa))
    rest = frozenset(range(kappa, n))
    second = frozenset({1}) if isolated else frozenset({0, 1})
    return ClassPartition((blind, rest), (frozenset({0}), second))


def _check_kappa(n: int, kappa: int) -> None:
    if n < 1:
        raise NetworkError(f"need at least one agent, got n={n}")
    if not 0 <= kappa <= n:
        raise NetworkError(f"kappa={kappa} outside [0, {n}]")
