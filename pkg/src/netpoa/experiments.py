"""Parameter sweeps over the number of blind or isolated agents, and oracle checks."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mechanisms import BasisFunction, Mechanism
from .network import ClassPartition, complete_network, partition_into_classes
from .oracle import RandomGameSpec, build_tight_instance, empirical_poa, empirical_poa_report, random_game
from .poa import (
    optimize_blind,
    optimize_isolated,
    optimize_mechanism,
    poa_blind,
    poa_dual,
    poa_isolated,
    poa_primal,
)

POA_TOL = 1e-6


@dataclass
class SweepRow:
    kappa: int
    poa_mc: float
    poa_opt: float
    poa_fstar: float | None = None

    @property
    def gap(self) -> float | None:
        return None if self.poa_fstar is None else self.poa_opt - self.poa_fstar


def full_information_optimum(n: int, w: BasisFunction) -> np.ndarray:
    """Normalised optimal table ``(0, f*(1), ..., f*(n), 0)`` for the complete network."""
    part = partition_into_classes(complete_network(n))
    return optimize_mechanism(part, w).normalized.per_class[0]


def _row(args) -> SweepRow:
    n, kappa, w, mode, fstar = args
    mc = np.diff(w.values[: n + 1])
    if mode == "isolated":
        poa_fn, opt_fn = poa_isolated, optimize_isolated
    else:
        poa_fn, opt_fn = poa_blind, optimize_blind
    row = SweepRow(kappa, poa_fn(n, kappa, w, mc[0], mc).poa, opt_fn(n, kappa, w).poa_opt)
    if fstar is not None:
        row.poa_fstar = poa_fn(n, kappa, w, fstar[1], fstar).poa
    return row


def _run(tasks, jobs: int) -> list[SweepRow]:
    if jobs <= 1:
        return [_row(t) for t in tasks]
    with ProcessPoolExecutor(jobs) as ex:
        return list(ex.map(_row, tasks))


def sweep_blind(n: int, w: BasisFunction, jobs: int = 1) -> list[SweepRow]:
    """Marginal-contribution and optimal PoA for ``kappa = 0..n`` blind agents."""
    return _run([(n, k, w, "blind", None) for k in range(n + 1)], jobs)


def sweep_robustness(
    n: int, w: BasisFunction, mode: str = "blind", fstar: np.ndarray | None = None, jobs: int = 1
) -> list[SweepRow]:
    """PoA of the full-information optimum ``f*`` when ``kappa`` agents go blind or isolated."""
    if mode not in ("blind", "isolated"):
        raise ValueError(f"mode must be 'blind' or 'isolated', got {mode!r}")
    if fstar is None:
        fstar = full_information_optimum(n, w)
    return _run([(n, k, w, mode, fstar) for k in range(n + 1)], jobs)


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    robust = any(r.poa_fstar is not None for r in rows)
    head = ["kappa", "poa_mc", "poa_opt"] + (["poa_fstar", "gap"] if robust else [])
    wr.writerow(head)
    for r in rows:
        line = [r.kappa, repr(float(r.poa_mc)), repr(float(r.poa_opt))]
        if robust:
            line += [repr(float(r.poa_fstar)), repr(float(r.gap))]
        wr.writerow(line)
    return buf.getvalue()


def rows_from_csv(text: str) -> list[SweepRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        fstar = rec.get("poa_fstar")
        rows.append(
            SweepRow(int(rec["kappa"]), float(rec["poa_mc"]), float(rec["poa_opt"]), None if fstar is None else float(fstar))
        )
    return rows


@dataclass
class OracleCheck:
    lp_poa: float
    trials: int
    worst_ratio: float | None = None
    no_equilibrium: int = 0
    violations: list[dict] = field(default_factory=list)
    tight_ratio: float | None = None
    tight_checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        tight_ok = self.tight_ratio is None or (
            abs(self.tight_ratio - self.lp_poa) <= POA_TOL and all(self.tight_checks.values())
        )
        return not self.violations and tight_ok

    def to_json(self) -> dict:
        return {
            "lp_poa": self.lp_poa,
            "trials": self.trials,
            "worst_ratio": self.worst_ratio,
            "no_equilibrium": self.no_equilibrium,
            "violations": self.violations,
            "tight_ratio": self.tight_ratio,
            "tight_checks": self.tight_checks,
            "ok": self.ok,
        }


def oracle_check(
    part: ClassPartition,
    w: BasisFunction,
    f: Mechanism,
    seed: int = 0,
    trials: int = 200,
    spec: RandomGameSpec = RandomGameSpec(),
    tight: bool = True,
) -> OracleCheck:
    """Random games must never beat the LP bound; the tight instance must meet it."""
    res = poa_dual(part, w, f)
    report = OracleCheck(res.poa, trials)
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        g = random_game(part, w, f, rng, spec)
        ratio = empirical_poa(g)
        if ratio is None:
            report.no_equilibrium += 1
            continue
        if report.worst_ratio is None or ratio < report.worst_ratio:
            report.worst_ratio = ratio
        if ratio < res.poa - POA_TOL:
            report.violations.append({"trial": trial, "ratio": ratio})
    if tight and res.gate_failed is None:
        primal = poa_primal(part, w, f)
        inst = build_tight_instance(part, w, f, primal.theta_map())
        report.tight_ratio = empirical_poa_report(inst.game).ratio
        report.tight_checks = inst.checks
    return report
