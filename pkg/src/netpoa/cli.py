"""Command-line entry point: ``netpoa <command> ...``.

Exit codes: 0 success, 2 validation error, 3 capacity error,
4 invariant violation (oracle-check), 5 internal LP error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .index_sets import DEFAULT_CAP, CapacityError
from .io import (
    InputError,
    load_json,
    mechanism_from_json,
    network_from_json,
    parse_basis,
    partition_to_json,
)
from .lp import LpError
from .mechanisms import MechanismError, marginal_contribution
from .network import NetworkError, complete_network, partition_into_classes, validate_partition
from .oracle import OracleError, ProfileCapError
from .poa import InternalLpError, optimize_blind, optimize_isolated, optimize_mechanism, poa_dual, poa_primal

log = logging.getLogger("netpoa")

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_VIOLATION, EXIT_LP = 0, 2, 3, 4, 5


def _emit(obj, out: str | None) -> None:
    text = obj if isinstance(obj, str) else json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_setup(args):
    net = network_from_json(load_json(args.network))
    if net.repaired:
        log.warning("inserted self-observation for agents %s", [i + 1 for i in net.repaired])
    part = partition_into_classes(net)
    w = parse_basis(args.basis, net.n)
    if getattr(args, "mechanism", None):
        f = mechanism_from_json(load_json(args.mechanism))
    else:
        f = marginal_contribution(w, part)
    return net, part, w, f


def cmd_partition(args) -> int:
    net = network_from_json(load_json(args.network))
    part = partition_into_classes(net)
    rep = validate_partition(net, part)
    out = partition_to_json(part)
    out["kappa"] = list(part.kappa)
    out["conditions"] = {"C.1": rep.c1, "C.2": rep.c2, "C.3": rep.c3}
    _emit(out, args.out)
    return EXIT_OK


def cmd_poa(args) -> int:
    _, part, w, f = _load_setup(args)
    out: dict = {}
    results = {}
    if args.method in ("primal", "both"):
        results["primal"] = poa_primal(part, w, f, args.cap)
    if args.method in ("dual", "both"):
        results["dual"] = poa_dual(part, w, f, args.cap)
    main = results.get("dual") or results["primal"]
    out.update(main.to_json())
    out["mechanism"] = {"per_class": [t.tolist() for t in f.per_class]}
    for name, res in results.items():
        out[name] = res.to_json()
    if len(results) == 2 and main.gate_failed is None:
        out["delta"] = abs(results["primal"].lp_value - results["dual"].lp_value)
    if "primal" in results and results["primal"].theta is not None:
        out["theta"] = [{"tuple": str(t), "value": v} for t, v in results["primal"].theta_map(1e-12).items()]
    _emit(out, args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    if args.blind is not None or args.isolated is not None:
        if args.n is None:
            raise InputError("--blind/--isolated need --n")
        w = parse_basis(args.basis, args.n)
        if args.blind is not None:
            design = optimize_blind(args.n, args.blind, w, args.cap)
        else:
            design = optimize_isolated(args.n, args.isolated, w, args.cap)
    else:
        if args.network:
            net = network_from_json(load_json(args.network))
        elif args.n is not None:
            net = complete_network(args.n)
        else:
            raise InputError("give a network file or --n for the complete network")
        part = partition_into_classes(net)
        w = parse_basis(args.basis, net.n)
        design = optimize_mechanism(part, w, args.cap)
    _emit(design.to_json(), args.out)
    return EXIT_OK


def cmd_sweep_blind(args) -> int:
    if args.n > args.max_n:
        raise InputError(f"--n {args.n} above --max-n {args.max_n}")
    w = parse_basis(args.basis, args.n)
    rows = experiments.sweep_blind(args.n, w, args.jobs)
    _emit(experiments.rows_to_csv(rows), args.out)
    return EXIT_OK


def cmd_robustness(args) -> int:
    if args.n > args.max_n:
        raise InputError(f"--n {args.n} above --max-n {args.max_n}")
    w = parse_basis(args.basis, args.n)
    fstar = None
    if args.fstar:
        data = load_json(args.fstar)
        table = data.get("normalized", data.get("mechanism"))["per_class"][0]
        fstar = np.asarray(table, dtype=float)
        if fstar.size != args.n + 2:
            raise InputError(f"f* table has {fstar.size} entries, expected {args.n + 2}")
    rows = experiments.sweep_robustness(args.n, w, args.mode, fstar, args.jobs)
    bad = [r.kappa for r in rows if r.gap < -experiments.POA_TOL]
    if bad:
        log.error("f* beats the optimum at kappa=%s", bad)
    _emit(experiments.rows_to_csv(rows), args.out)
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_oracle_check(args) -> int:
    _, part, w, f = _load_setup(args)
    rep = experiments.oracle_check(part, w, f, args.seed, args.trials)
    _emit(rep.to_json(), args.out)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="netpoa", description="Price of anarchy over information networks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, network=True, basis_default="setcover"):
        if network:
            p.add_argument("network", help="network JSON file")
        p.add_argument("--basis", default=basis_default, help="setcover | power:<d> | file:<path>")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="index-set size cap")

    p = sub.add_parser("partition", help="similarity classes of a network")
    p.add_argument("network")
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("poa", help="PoA of a mechanism on a network")
    common(p)
    p.add_argument("--mechanism", help="mechanism JSON (default: marginal contribution)")
    p.add_argument("--method", choices=("primal", "dual", "both"), default="both")
    p.set_defaults(func=cmd_poa)

    p = sub.add_parser("optimize", help="PoA-optimal mechanism")
    common(p, network=False)
    p.add_argument("network", nargs="?")
    p.add_argument("--n", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--blind", type=int, metavar="KAPPA")
    g.add_argument("--isolated", type=int, metavar="KAPPA")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep-blind", help="MC vs optimal PoA over the number of blind agents")
    common(p, network=False)
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--max-n", type=int, default=15)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep_blind)

    p = sub.add_parser("robustness", help="full-information optimum under blind/isolated failures")
    common(p, network=False, basis_default="power:0.5")
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--max-n", type=int, default=15)
    p.add_argument("--mode", choices=("blind", "isolated"), default="blind")
    p.add_argument("--fstar", help="design JSON from `optimize` to reuse as f*")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("oracle-check", help="brute-force soundness and tightness check")
    common(p)
    p.add_argument("--mechanism")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, NetworkError, MechanismError, LpError) as e:
        log.error("%s", e)
        return EXIT_INPUT
    except (CapacityError, ProfileCapError) as e:
        log.error("%s (count=%d)", e, e.count)
        return EXIT_CAPACITY
    except OracleError as e:
        log.error("%s", e)
        return EXIT_VIOLATION
    except InternalLpError as e:
        log.error("%s", e)
        return EXIT_LP


if __name__ == "__main__":
    sys.exit(main())
