"""Command-line front end: validation, discrimination runs, sweeps and searches.

Exit codes: 0 success, 2 validation failure, 3 infeasible problem, 4 bad
flags. All numeric output is JSON (or CSV for sweeps) and carries the
configuration that produced it.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .measurements import (
    PovmValidationError,
    load_povm,
    povm_violations,
    save_povm,
    make_trine,
)
from .oracle import (
    SearchConfig,
    oracle_measurement_discrimination,
    oracle_min_sum_overlap,
    oracle_state_povm,
    write_report,
)
from .perfect import (
    binary_perfect_check,
    minerror_pair,
    simple_scheme_distance,
    simple_scheme_perfect_check,
)
from .qubit import (
    InfeasibleError,
    discriminate_noisy_pair,
    discriminate_projective_pair,
    hypotheses_with_overlap,
)
from .reduction import lift_tester, make_filter_pair, reduce_pair
from .testers import performance, save_tester
from .trine import trine_sweep, write_sweep_csv

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_BAD_FLAGS = 4


class _BadFlags(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _BadFlags(message)


def _emit(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _angle(value: float, degrees: bool) -> float:
    return float(np.deg2rad(value)) if degrees else float(value)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mdisc", description=__doc__)
    p.add_argument("--version", action="version", version=f"mdisc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a measurement JSON file")
    v.add_argument("povm", help="measurement JSON file")
    v.add_argument("--tol", type=float, default=1e-9, help="validation tolerance")
    v.add_argument("--out", help="write the report JSON here instead of stdout")

    pf = sub.add_parser("perfect", help="perfect-discrimination analysis of two devices")
    pf.add_argument("povm_m", help="first measurement JSON file")
    pf.add_argument("povm_n", help="second measurement JSON file")
    pf.add_argument("--tol", type=float, default=1e-9)
    pf.add_argument("--out")

    d = sub.add_parser("discriminate", help="optimal discrimination of qubit devices")
    kind = d.add_mutually_exclusive_group(required=True)
    kind.add_argument("--projective", action="store_true")
    kind.add_argument("--noisy", action="store_true")
    kind.add_argument("--filters", action="store_true")
    d.add_argument("--F", type=float, default=0.5, help="overlap of the defining states")
    d.add_argument("--eta", type=float, default=0.5, help="prior of the first device")
    d.add_argument("--mu", type=float, default=1.0, help="visibility of the first device")
    d.add_argument("--nu", type=float, default=1.0, help="visibility of the second device")
    d.add_argument("--dim", type=int, default=2, help="space dimension for --filters")
    d.add_argument(
        "--mode",
        choices=["min-error", "unambiguous", "fixed-failure"],
        default="min-error",
    )
    d.add_argument("--pf", type=float, help="target failure rate for fixed-failure")
    d.add_argument("--dump-tester", help="write the optimal tester JSON here")
    d.add_argument("--out")

    t = sub.add_parser("trine-sweep", help="failure-probability sweep for the trine pair")
    t.add_argument("--theta-min", type=float, default=0.0)
    t.add_argument("--theta-max", type=float, default=float(np.pi))
    t.add_argument("--steps", type=int, default=181)
    t.add_argument("--deg", action="store_true", help="angles are given in degrees")
    t.add_argument("--no-verify", action="store_true", help="skip tester cross-checks")
    t.add_argument("--out", required=True, help="output CSV path")

    o = sub.add_parser("oracle", help="brute-force searches and reports")
    o.add_argument(
        "--problem",
        choices=["state", "measurement-simple", "measurement-ancilla", "min-overlap"],
        required=True,
    )
    o.add_argument("--mode", choices=["min-error", "unambiguous", "fixed-failure"],
                   default="min-error")
    o.add_argument("--F", type=float, default=0.5)
    o.add_argument("--eta", type=float, default=0.5)
    o.add_argument("--pf", type=float)
    o.add_argument("--theta", type=float, help="trine rotation angle for device searches")
    o.add_argument("--deg", action="store_true")
    o.add_argument("--povm-m", help="first measurement JSON file (device searches)")
    o.add_argument("--povm-n", help="second measurement JSON file (device searches)")
    o.add_argument("--seed", type=int, default=7)
    o.add_argument("--restarts", type=int, default=8)
    o.add_argument("--refine-rounds", type=int, default=4)
    o.add_argument("--sphere-step-deg", type=float, default=2.0)
    o.add_argument("--out")
    return p


def _cmd_validate(args) -> int:
    try:
        with open(args.povm, encoding="utf-8") as fh:
            obj = json.load(fh)
        from .measurements import decode_complex_matrix, validate_povm

        raw = [decode_complex_matrix(e) for e in obj["effects"]]
        report = {"file": args.povm, "tol": args.tol, "violations": povm_violations(raw)}
        try:
            validate_povm(raw, tol=args.tol)
            report["valid"] = True
            _emit(report, args.out)
            return EXIT_OK
        except PovmValidationError as err:
            report["valid"] = False
            report["error"] = type(err).__name__.removesuffix("Error")
            report["message"] = str(err)
            _emit(report, args.out)
            return EXIT_INVALID
    except (OSError, KeyError, ValueError) as err:
        _emit({"file": args.povm, "valid": False, "message": str(err)}, args.out)
        return EXIT_INVALID


def _cmd_perfect(args) -> int:
    m = load_povm(args.povm_m, tol=args.tol)
    n = load_povm(args.povm_n, tol=args.tol)
    report: dict = {"tol": args.tol}
    if m.n_outcomes == 2 and n.n_outcomes == 2:
        witness = binary_perfect_check(m, n)
        report["binary_witness"] = (
            None
            if witness is None
            else {
                "probe": [[z.real, z.imag] for z in witness.probe],
                "certainty_outcome": witness.certainty_outcome,
                "identified": list(witness.identified),
            }
        )
    check = simple_scheme_perfect_check(m, n)
    me = minerror_pair(m, n)
    dist = simple_scheme_distance(m, n)
    report.update(
        {
            "simple_min_overlap": check.min_value,
            "simple_search_exhaustive": check.exhaustive,
            "cb_pe": me.p_e,
            "cb_value": me.cb_value,
            "cb_exhaustive": me.exhaustive,
            "simple_distance": dist.value,
        }
    )
    _emit(report, args.out)
    return EXIT_OK


def _report_dict(rep) -> dict:
    return {"p_s": rep.p_s, "p_e": rep.p_e, "p_f": rep.p_f, "table": rep.table}


def _cmd_discriminate(args) -> int:
    if args.mode == "fixed-failure" and args.pf is None:
        raise _BadFlags("--mode fixed-failure requires --pf")
    report: dict = {
        "mode": args.mode,
        "eta": args.eta,
        "F": args.F,
    }
    if args.projective:
        h = hypotheses_with_overlap(args.F, args.eta)
        res = discriminate_projective_pair(h.phi, h.psi, args.eta, args.mode, args.pf)
        report["report"] = _report_dict(res.report)
        if res.simple_probe is not None:
            report["simple_probe"] = [[z.real, z.imag] for z in res.simple_probe]
            report["simple_report"] = _report_dict(res.simple_report)
        tester = res.tester
    elif args.noisy:
        h = hypotheses_with_overlap(args.F, args.eta)
        report.update({"mu": args.mu, "nu": args.nu})
        res = discriminate_noisy_pair(
            h.phi, args.mu, h.psi, args.nu, args.eta, args.mode, args.pf
        )
        report["report"] = _report_dict(res.report)
        tester = res.tester
    else:  # filters
        if args.dim < 2:
            raise _BadFlags("--dim must be at least 2")
        phi = np.zeros(args.dim, dtype=complex)
        psi = np.zeros(args.dim, dtype=complex)
        phi[0] = 1.0
        psi[0], psi[1] = args.F, np.sqrt(max(0.0, 1 - args.F**2))
        dev_m, dev_n = make_filter_pair(phi, psi)
        red = reduce_pair(dev_m, dev_n)
        report["reduction"] = {
            "dim": args.dim,
            "reduced_dim": red.reduced_dim,
            "identical_on_support": red.identical_on_support,
        }
        if red.identical_on_support:
            raise _BadFlags("identical filters cannot be discriminated")
        h = hypotheses_with_overlap(args.F, args.eta)
        res = discriminate_projective_pair(h.phi, h.psi, args.eta, args.mode, args.pf)
        tester = lift_tester(res.tester, red)
        rep = performance(tester, [("M", dev_m), ("N", dev_n)], priors=[args.eta, 1 - args.eta])
        report["report"] = _report_dict(rep)
    if args.dump_tester:
        save_tester(tester, args.dump_tester)
        report["tester_file"] = args.dump_tester
    _emit(report, args.out)
    return EXIT_OK


def _cmd_trine_sweep(args) -> int:
    lo = _angle(args.theta_min, args.deg)
    hi = _angle(args.theta_max, args.deg)
    if args.steps < 1:
        raise _BadFlags("--steps must be positive")
    thetas = np.linspace(lo, hi, args.steps)
    rows = trine_sweep(thetas, verify=not args.no_verify)
    write_sweep_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    cfg = SearchConfig(
        sphere_step_deg=args.sphere_step_deg,
        refine_rounds=args.refine_rounds,
        restarts=args.restarts,
        seed=args.seed,
    )
    if args.problem == "state":
        h = hypotheses_with_overlap(args.F, args.eta)
        states = [np.outer(h.phi, h.phi.conj()), np.outer(h.psi, h.psi.conj())]
        result = oracle_state_povm(
            states, [args.eta, 1 - args.eta], args.mode, cfg, p_f=args.pf
        )
    elif args.problem in ("measurement-simple", "measurement-ancilla"):
        if args.povm_m and args.povm_n:
            devs = [load_povm(args.povm_m), load_povm(args.povm_n)]
        elif args.theta is not None:
            theta = _angle(args.theta, args.deg)
            devs = [make_trine(), make_trine(theta, rotated=True)]
        else:
            raise _BadFlags("device searches need --povm-m/--povm-n or --theta")
        scheme = "simple" if args.problem == "measurement-simple" else "ancilla"
        result = oracle_measurement_discrimination(
            devs, [0.5, 0.5], scheme, args.mode, cfg
        )
    else:  # min-overlap
        if args.povm_m and args.povm_n:
            devs = [load_povm(args.povm_m), load_povm(args.povm_n)]
        elif args.theta is not None:
            theta = _angle(args.theta, args.deg)
            devs = [make_trine(), make_trine(theta, rotated=True)]
        else:
            raise _BadFlags("min-overlap needs --povm-m/--povm-n or --theta")
        result = oracle_min_sum_overlap(devs[0], devs[1], cfg)
    if args.out:
        write_report(result, args.out)
        print(f"wrote oracle report to {args.out}")
    else:
        print(json.dumps(result.to_json_dict(), indent=2))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "perfect":
            return _cmd_perfect(args)
        if args.command == "discriminate":
            return _cmd_discriminate(args)
        if args.command == "trine-sweep":
            return _cmd_trine_sweep(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        raise _BadFlags(f"unknown command {args.command!r}")
    except _BadFlags as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_FLAGS
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except PovmValidationError as err:
        print(f"invalid measurement: {err}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
