"""Dense two-phase revised simplex.

Problems are given in a general form (row senses ``<=``, ``=``, ``>=``,
variables either nonnegative or free) and converted internally to the
standard form ``min c.z  s.t.  A z = b, z >= 0, b >= 0``.

Dual values follow the sensitivity convention: ``duals[i]`` is the rate
of change of the optimal objective with respect to ``b[i]``. With only
zero or free lower bounds this gives ``objective == b @ duals`` exactly at
an optimum.

LPs with many more rows than columns (the dual PoA programs have one row
per index tuple and only a handful of variables) are solved through their
transposed problem, so the simplex basis stays small either way.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

SENSES = ("<=", "=", ">=")

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8
GAP_TOL = 1e-7
OPT_TOL = 1e-9


class LpError(Exception):
    """Malformed LP input."""


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpProblem:
    """A dense LP.

    ``lower[j]`` is ``0.0`` or ``-inf``; upper bounds are always ``+inf``.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    senses: tuple[str, ...]
    sense: str = "min"
    lower: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim == 1 and A.size == 0:
            A = A.reshape(0, c.size)
        if A.ndim != 2:
            raise LpError(f"constraint matrix must be 2-d, got shape {A.shape}")
        m, n = A.shape
        if c.size != n:
            raise LpError(f"objective has {c.size} entries for {n} columns")
        if b.size != m:
            raise LpError(f"rhs has {b.size} entries for {m} rows")
        senses = tuple(self.senses)
        if len(senses) != m:
            raise LpError(f"{len(senses)} row senses for {m} rows")
        bad = [s for s in senses if s not in SENSES]
        if bad:
            raise LpError(f"unknown row sense {bad[0]!r}")
        if self.sense not in ("min", "max"):
            raise LpError(f"sense must be 'min' or 'max', got {self.sense!r}")
        lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(-1)
        if lower.size != n:
            raise LpError(f"{lower.size} lower bounds for {n} columns")
        if not np.all((lower == 0.0) | (lower == -np.inf)):
            raise LpError("lower bounds must be 0 or -inf")
        for name, arr in (("objective", c), ("constraint matrix", A), ("rhs", b)):
            if not np.all(np.isfinite(arr)):
                raise LpError(f"non-finite entry in {name}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "lower", lower)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    @property
    def free(self) -> np.ndarray:
        return self.lower == -np.inf


@dataclass
class LpSolution:
    status: Status
    objective: float = math.nan
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    iterations: int = 0
    dualized: bool = False
    residuals: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


# ---------------------------------------------------------------------------
# standard-form revised simplex


@dataclass
class _StdResult:
    status: Status
    z: np.ndarray | None = None
    y: np.ndarray | None = None
    iterations: int = 0


def _choose_entering(d, eligible, pricing):
    cand = eligible & (d < -OPT_TOL)
    if not cand.any():
        return -1
    if pricing == "bland":
        return int(np.argmax(cand))
    masked = np.where(cand, d, 0.0)
    return int(np.argmin(masked))


def _iterate(A, b, c, basis, eligible, pricing, max_iter):
    """Run simplex pivots from a feasible basis. Mutates ``basis``."""
    m = A.shape[0]
    it = 0
    degenerate_run = 0
    rule = pricing
    while True:
        if it >= max_iter:
            raise RuntimeError(f"simplex iteration limit {max_iter} reached")
        B = A[:, basis]
        xB = np.linalg.solve(B, b) if m else np.zeros(0)
        y = np.linalg.solve(B.T, c[basis]) if m else np.zeros(0)
        d = c - A.T @ y
        d[basis] = 0.0
        j = _choose_entering(d, eligible, rule)
        if j < 0:
            return Status.OPTIMAL, xB, y, it
        u = np.linalg.solve(B, A[:, j])
        pos = u > PIVOT_TOL
        if not pos.any():
            return Status.UNBOUNDED, xB, y, it
        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(xB[pos], 0.0) / u[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, best))
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        # Dantzig pricing can cycle on degenerate vertices; fall back to Bland.
        if best <= PIVOT_TOL:
            degenerate_run += 1
            if degenerate_run > 50:
                rule = "bland"
        else:
            degenerate_run = 0
            rule = pricing
        basis[r] = j
        it += 1


def _simplex_standard(A, b, c, pricing="bland", max_iter=200_000) -> _StdResult:
    """Solve ``min c.z s.t. A z = b, z >= 0`` with ``b >= 0``."""
    m, n = A.shape
    if m == 0:
        if np.any(c < -OPT_TOL):
            return _StdResult(Status.UNBOUNDED)
        return _StdResult(Status.OPTIMAL, np.zeros(n), np.zeros(0))

    # reuse unit columns (slacks) as the starting basis where possible
    basis = [-1] * m
    for j in range(n):
        col = A[:, j]
        nz = np.flatnonzero(col)
        if nz.size == 1 and col[nz[0]] == 1.0 and basis[nz[0]] < 0:
            basis[nz[0]] = j
    need = [i for i in range(m) if basis[i] < 0]
    n_art = len(need)
    total_iter = 0

    if n_art:
        art = np.zeros((m, n_art))
        for k, i in enumerate(need):
            art[i, k] = 1.0
            basis[i] = n + k
        A1 = np.hstack([A, art])
        c1 = np.concatenate([np.zeros(n), np.ones(n_art)])
        eligible = np.ones(n + n_art, dtype=bool)
        status, xB, _, it = _iterate(A1, b, c1, basis, eligible, pricing, max_iter)
        total_iter += it
        if c1[basis] @ xB > FEAS_TOL * max(1.0, np.abs(b).max()):
            return _StdResult(Status.INFEASIBLE, iterations=total_iter)

        # drive zero-level artificials out of the basis; drop redundant rows
        keep_rows = list(range(m))
        r = 0
        while r < len(basis):
            if basis[r] < n:
                r += 1
                continue
            B = A1[np.ix_(keep_rows, basis)]
            row = np.linalg.solve(B.T, np.eye(len(basis))[r]) @ A1[keep_rows, :n]
            row[[j for j in basis if j < n]] = 0.0
            cand = np.flatnonzero(np.abs(row) > 1e-9)
            if cand.size:
                basis[r] = int(cand[np.argmax(np.abs(row[cand]))])
                r += 1
            else:
                # the artificial's own row is a combination of the others
                del keep_rows[keep_rows.index(need[basis[r] - n])]
                del basis[r]
        A2, b2 = A[keep_rows], b[keep_rows]
    else:
        keep_rows = list(range(m))
        A2, b2 = A, b

    eligible = np.ones(n, dtype=bool)
    status, xB, y2, it = _iterate(A2, b2, c, basis, eligible, pricing, max_iter)
    total_iter += it
    if status is Status.UNBOUNDED:
        return _StdResult(Status.UNBOUNDED, iterations=total_iter)
    z = np.zeros(n)
    z[basis] = np.maximum(xB, 0.0)
    y = np.zeros(m)
    y[keep_rows] = y2
    return _StdResult(Status.OPTIMAL, z, y, total_iter)


# ---------------------------------------------------------------------------
# general form <-> standard form


def _solve_direct(p: LpProblem, pricing: str, max_iter: int) -> LpSolution:
    m, n = p.shape
    free = p.free
    sign = 1.0 if p.sense == "min" else -1.0
    cols = [p.A]
    costs = [sign * p.c]
    if free.any():
        cols.append(-p.A[:, free])
        costs.append(-sign * p.c[free])
    slack_rows = [i for i, s in enumerate(p.senses) if s != "="]
    slack = np.zeros((m, len(slack_rows)))
    for k, i in enumerate(slack_rows):
        slack[i, k] = 1.0 if p.senses[i] == "<=" else -1.0
    cols.append(slack)
    costs.append(np.zeros(len(slack_rows)))
    A = np.hstack(cols)
    c = np.concatenate(costs)
    flip = np.where(p.b < 0, -1.0, 1.0)
    A = A * flip[:, None]
    b = p.b * flip

    res = _simplex_standard(A, b, c, pricing, max_iter)
    if res.status is not Status.OPTIMAL:
        return LpSolution(res.status, iterations=res.iterations)
    x = res.z[:n].copy()
    if free.any():
        x[free] -= res.z[n : n + int(free.sum())]
    duals = sign * flip * res.y
    return LpSolution(Status.OPTIMAL, float(p.c @ x), x, duals, res.iterations)


def canonical_rows(p: LpProblem) -> np.ndarray:
    """Row multipliers turning every inequality into ``>=``."""
    return np.array([-1.0 if s == "<=" else 1.0 for s in p.senses])


def dual_problem(p: LpProblem) -> tuple[LpProblem, np.ndarray]:
    """Transposed LP with the same optimal value as ``p``.

    Returns ``(d, scale)``; if ``u`` is optimal for ``d`` then
    ``scale * u`` are the sensitivity duals of ``p``.
    """
    rho = canonical_rows(p)
    sign = 1.0 if p.sense == "min" else -1.0
    At = (p.A * rho[:, None]).T
    rhs = sign * p.c
    senses = tuple("=" if f else "<=" for f in p.free)
    lower = np.array([-np.inf if s == "=" else 0.0 for s in p.senses])
    bt = rho * p.b
    if p.sense == "min":
        d = LpProblem(bt, At, rhs, senses, "max", lower)
    else:
        d = LpProblem(-bt, At, rhs, senses, "min", lower)
    return d, sign * rho


def _solve_dualized(p: LpProblem, pricing: str, max_iter: int) -> LpSolution:
    d, scale = dual_problem(p)
    sign = 1.0 if p.sense == "min" else -1.0
    dres = _solve_direct(d, pricing, max_iter)
    if dres.status is Status.OPTIMAL:
        # d's rhs is sign*c, so its sensitivity duals are sign*x
        x = sign * dres.duals
        x = np.where(p.free, x, np.maximum(x, 0.0))
        return LpSolution(Status.OPTIMAL, float(p.c @ x), x, scale * dres.x, dres.iterations, dualized=True)
    if dres.status is Status.UNBOUNDED:
        return LpSolution(Status.INFEASIBLE, iterations=dres.iterations, dualized=True)
    # dual infeasible: primal is unbounded or infeasible; test feasibility
    feas = LpProblem(np.zeros(p.shape[1]), p.A, p.b, p.senses, p.sense, p.lower)
    d0, _ = dual_problem(feas)
    r0 = _solve_direct(d0, pricing, max_iter)
    status = Status.UNBOUNDED if r0.status is Status.OPTIMAL else Status.INFEASIBLE
    return LpSolution(status, iterations=dres.iterations + r0.iterations, dualized=True)


def residuals(p: LpProblem, x: np.ndarray, y: np.ndarray) -> dict:
    """Primal infeasibility, dual infeasibility, complementary slackness and gap."""
    Ax = p.A @ x
    viol = np.zeros(p.shape[0])
    for i, s in enumerate(p.senses):
        if s == "<=":
            viol[i] = max(Ax[i] - p.b[i], 0.0)
        elif s == ">=":
            viol[i] = max(p.b[i] - Ax[i], 0.0)
        else:
            viol[i] = abs(Ax[i] - p.b[i])
    bound_viol = np.where(p.free, 0.0, np.maximum(-x, 0.0))
    primal = float(max(viol.max(initial=0.0), bound_viol.max(initial=0.0)))

    sign = 1.0 if p.sense == "min" else -1.0
    red = sign * (p.c - p.A.T @ y)
    yc = sign * y
    dual_viol = np.where(p.free, np.abs(red), np.maximum(-red, 0.0))
    row_viol = np.array(
        [max(-yc[i], 0.0) if s == ">=" else max(yc[i], 0.0) if s == "<=" else 0.0 for i, s in enumerate(p.senses)]
    )
    dual = float(max(dual_viol.max(initial=0.0), row_viol.max(initial=0.0)))
    slack = np.abs(y * (Ax - p.b))
    cs = np.abs(np.where(p.free, 0.0, red * x))
    comp = float(max(slack.max(initial=0.0), cs.max(initial=0.0)))
    gap = float(abs(p.c @ x - p.b @ y))
    return {"primal": primal, "dual": dual, "complementarity": comp, "gap": gap}


def solve(p: LpProblem, *, pricing: str = "dantzig", dualize: bool | None = None, max_iter: int = 200_000) -> LpSolution:
    """Solve ``p``.

    ``pricing`` is ``"bland"`` (lowest index) or ``"dantzig"`` (most negative
    reduced cost, dropping to Bland's rule on long degenerate runs).
    ``dualize=None`` picks the transposed route when rows outnumber columns.
    """
    if pricing not in ("bland", "dantzig"):
        raise ValueError(f"unknown pricing rule {pricing!r}")
    m, n = p.shape
    if dualize is None:
        dualize = m > n
    sol = _solve_dualized(p, pricing, max_iter) if dualize else _solve_direct(p, pricing, max_iter)
    if sol.optimal:
        sol.residuals = residuals(p, sol.x, sol.duals)
    return sol


def check_optimal(sol: LpSolution, feas_tol: float = FEAS_TOL, gap_tol: float = GAP_TOL) -> None:
    """Raise if an optimal solution violates the certificate tolerances."""
    if not sol.optimal:
        raise RuntimeError(f"LP not optimal: {sol.status.value}")
    r = sol.residuals
    scale = max(1.0, abs(sol.objective))
    if r["primal"] > feas_tol * scale:
        raise RuntimeError(f"primal residual {r['primal']:.3g} exceeds tolerance")
    if r["gap"] > gap_tol * scale:
        raise RuntimeError(f"duality gap {r['gap']:.3g} exceeds tolerance")


def to_text(p: LpProblem, name: str = "LP") -> str:
    """Sectioned text dump (ROWS / COLUMNS / RHS / BOUNDS), MPS-like.

    Rows are ``R<i>``, columns ``X<j>``; only nonzero constraint coefficients are listed.
    Numbers are written with ``repr`` so the dump round-trips exactly.
    """
    code = {"<=": "L", "=": "E", ">=": "G"}
    lines = [f"NAME {name}", f"OBJSENSE {p.sense.upper()}", "ROWS", " N OBJ"]
    lines += [f" {code[s]} R{i}" for i, s in enumerate(p.senses)]
    lines.append("COLUMNS")
    for j in range(p.shape[1]):
        # the objective entry is always written so empty columns survive
        lines.append(f" X{j} OBJ {float(p.c[j])!r}")
        for i in np.flatnonzero(p.A[:, j]):
            lines.append(f" X{j} R{i} {float(p.A[i, j])!r}")
    lines.append("RHS")
    lines += [f" RHS R{i} {float(v)!r}" for i, v in enumerate(p.b) if v != 0]
    lines.append("BOUNDS")
    lines += [f" FR BND X{j}" for j in np.flatnonzero(p.free)]
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> LpProblem:
    """Parse the output of :func:`to_text`."""
    inv = {"L": "<=", "E": "=", "G": ">="}
    section = None
    sense = "min"
    rows: list[str] = []
    entries: dict[tuple[str, str], float] = {}
    rhs: dict[str, float] = {}
    free: set[str] = set()
    ncols = 0
    for raw in text.splitlines():
        tok = raw.split()
        if not tok:
            continue
        if not raw.startswith(" "):
            if tok[0] == "OBJSENSE":
                sense = tok[1].lower()
            section = tok[0]
            continue
        if section == "ROWS":
            if tok[0] != "N":
                rows.append(inv[tok[0]])
        elif section == "COLUMNS":
            entries[(tok[0], tok[1])] = float(tok[2])
            ncols = max(ncols, int(tok[0][1:]) + 1)
        elif section == "RHS":
            rhs[tok[1]] = float(tok[2])
        elif section == "BOUNDS":
            free.add(tok[2])
            ncols = max(ncols, int(tok[2][1:]) + 1)
    m = len(rows)
    A = np.zeros((m, ncols))
    c = np.zeros(ncols)
    for (col, row), v in entries.items():
        j = int(col[1:])
        if row == "OBJ":
            c[j] = v
        else:
            A[int(row[1:]), j] = v
    b = np.array([rhs.get(f"R{i}", 0.0) for i in range(m)])
    lower = np.array([-np.inf if f"X{j}" in free else 0.0 for j in range(ncols)])
    return LpProblem(c, A, b, tuple(rows), sense, lower)
