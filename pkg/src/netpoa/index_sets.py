"""Index tuples ``t = ((a_j, x_j, b_j))_j`` over classes and their statistics.

For a resource, ``a_j`` agents of class ``j`` select it only at the
equilibrium, ``x_j`` at both the equilibrium and the optimum, ``b_j`` only
at the optimum. The full set allows any triple with ``a+x+b <= kappa_j``;
the reduced set additionally asks, per class, that ``a*x*b == 0`` or
``a+x+b == kappa_j``.

Tuples are held as one integer array of shape ``(N, k, 3)`` in
lexicographic order (class 1 most significant, then ``a``, ``x``, ``b``).
"""

from __future__ import annotations

import csv
import io
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from math import comb, factorial, prod

import numpy as np

from .network import ClassPartition

DEFAULT_CAP = 5_000_000


class CapacityError(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"index set has {count} tuples, above the cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class IndexTuple:
    triples: tuple[tuple[int, int, int], ...]

    @property
    def a(self) -> tuple[int, ...]:
        return tuple(t[0] for t in self.triples)

    @property
    def x(self) -> tuple[int, ...]:
        return tuple(t[1] for t in self.triples)

    @property
    def b(self) -> tuple[int, ...]:
        return tuple(t[2] for t in self.triples)

    def __str__(self):
        return "(" + ",".join("(%d,%d,%d)" % t for t in self.triples) + ")"


@dataclass(frozen=True)
class TupleStats:
    A: int
    B: int
    Aj: tuple[int, ...]


def triple_count(kappa: int) -> int:
    """Nonnegative triples with sum at most ``kappa``."""
    return comb(kappa + 3, 3)


def class_triples(kappa: int, reduced: bool = False) -> np.ndarray:
    out = [
        (a, x, b)
        for a in range(kappa + 1)
        for x in range(kappa + 1 - a)
        for b in range(kappa + 1 - a - x)
        if not reduced or a * x * b == 0 or a + x + b == kappa
    ]
    return np.array(out, dtype=np.int64).reshape(-1, 3)


def obs_matrix(obs_classes, k: int) -> np.ndarray:
    O = np.zeros((k, k), dtype=np.int64)
    for j, o in enumerate(obs_classes):
        O[j, list(o)] = 1
    return O


class IndexSet(Sequence):
    """Ordered index tuples with precomputed ``A_t``, ``B_t`` and ``A_{t,j}``."""

    def __init__(self, triples: np.ndarray, kappa, obs_classes, multiplicity: np.ndarray | None = None):
        self.triples = triples
        # orbit sizes when each row stands for all its permutations within exchangeable classes
        self.multiplicity = multiplicity
        self.kappa = tuple(kappa)
        self.obs_classes = tuple(frozenset(o) for o in obs_classes)
        a, x, b = triples[..., 0], triples[..., 1], triples[..., 2]
        self.a, self.x, self.b = a, x, b
        self.A = (a + x).sum(axis=1)
        self.B = (b + x).sum(axis=1)
        self.Aj = (a + x) @ obs_matrix(self.obs_classes, len(self.kappa)).T

    @property
    def k(self) -> int:
        return len(self.kappa)

    def __len__(self):
        return self.triples.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return IndexTuple(tuple(tuple(int(v) for v in row) for row in self.triples[i]))

    def position(self) -> dict[IndexTuple, int]:
        return {t: i for i, t in enumerate(self)}

    def stats(self, i: int) -> TupleStats:
        return TupleStats(int(self.A[i]), int(self.B[i]), tuple(int(v) for v in self.Aj[i]))

    def to_csv(self) -> str:
        """Debug dump: ``a_1,x_1,b_1,...,A_t,B_t,A_t1,...``."""
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        head = [f"{s}_{j + 1}" for j in range(self.k) for s in "axb"]
        wr.writerow(head + ["A_t", "B_t"] + [f"A_t{j + 1}" for j in range(self.k)])
        flat = self.triples.reshape(len(self), -1)
        for row, A, B, Aj in zip(flat, self.A, self.B, self.Aj):
            wr.writerow([*row.tolist(), int(A), int(B), *Aj.tolist()])
        return buf.getvalue()


def build_index_set(kappa, obs_classes, reduced: bool = False, cap: int = DEFAULT_CAP) -> IndexSet:
    """Enumerate all tuples for class sizes ``kappa`` (total agents ``sum(kappa)``)."""
    kappa = tuple(int(v) for v in kappa)
    if any(v < 1 for v in kappa):
        raise ValueError(f"class sizes must be positive, got {kappa}")
    per_class = [class_triples(v, reduced) for v in kappa]
    sizes = [len(t) for t in per_class]
    count = prod(sizes) - 1
    if count > cap:
        raise CapacityError(count, cap)
    idx = np.unravel_index(np.arange(1, count + 1), sizes)
    triples = np.stack([per_class[j][idx[j]] for j in range(len(kappa))], axis=1)
    # sum(a+x+b) <= n holds automatically since each class is bounded by kappa_j
    return IndexSet(triples, kappa, obs_classes)


def orbit_count(kappa, groups, reduced: bool = False) -> int:
    total = 1
    for g in groups:
        m = len(class_triples(kappa[g[0]], reduced))
        total *= comb(m + len(g) - 1, len(g))
    return total - 1


def build_orbit_index_set(kappa, obs_classes, groups, reduced: bool = False, cap: int = DEFAULT_CAP) -> IndexSet:
    """One representative per orbit of tuples under permuting classes inside each group.

    ``groups`` partitions the class indices; classes in one group must share
    ``kappa``. A representative gives the classes of a group their triples in
    sorted order, and ``multiplicity`` counts the tuples it stands for.
    """
    kappa = tuple(int(v) for v in kappa)
    groups = [tuple(g) for g in groups]
    if sorted(j for g in groups for j in g) != list(range(len(kappa))):
        raise ValueError("groups must partition the classes")
    for g in groups:
        if len({kappa[j] for j in g}) != 1:
            raise ValueError(f"classes {[j + 1 for j in g]} differ in size")
    count = orbit_count(kappa, groups, reduced)
    if count > cap:
        raise CapacityError(count, cap)
    per_group = []
    for g in groups:
        trip = class_triples(kappa[g[0]], reduced)
        combos = np.array(list(combinations_with_replacement(range(len(trip)), len(g))), dtype=np.int64)
        mult = np.array(
            [factorial(len(g)) // prod(factorial(c) for c in np.unique(row, return_counts=True)[1]) for row in combos]
        )
        per_group.append((trip[combos], mult))
    triples = np.zeros((count, len(kappa), 3), dtype=np.int64)
    multiplicity = np.ones(count, dtype=np.int64)
    # the first combination of every group is all-zero, so skipping row 0 drops the empty tuple
    rows = product(*(range(len(t)) for t, _ in per_group))
    next(rows)
    for r, pick in enumerate(rows):
        for (trip, mult), g, i in zip(per_group, groups, pick):
            triples[r, list(g)] = trip[i]
            multiplicity[r] *= mult[i]
    return IndexSet(triples, kappa, obs_classes, multiplicity)


def enumerate_I(part: ClassPartition, cap: int = DEFAULT_CAP) -> IndexSet:
    return build_index_set(part.kappa, part.obs_classes, False, cap)


def enumerate_IR(part: ClassPartition, cap: int = DEFAULT_CAP) -> IndexSet:
    return build_index_set(part.kappa, part.obs_classes, True, cap)


def expected_size(kappa, reduced: bool = False) -> int:
    if not reduced:
        return prod(triple_count(v) for v in kappa) - 1
    return prod(len(class_triples(v, True)) for v in kappa) - 1


def tuple_stats(t: IndexTuple, part: ClassPartition) -> TupleStats:
    if len(t.triples) != part.k:
        raise ValueError(f"tuple has {len(t.triples)} triples for {part.k} classes")
    ax = [a + x for a, x, _ in t.triples]
    A = sum(ax)
    B = sum(b + x for _, x, b in t.triples)
    Aj = tuple(sum(ax[l] for l in part.obs_classes[j]) for j in range(part.k))
    return TupleStats(A, B, Aj)
