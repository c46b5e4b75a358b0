"""Command-line interface.

Commands::

    chlab simulate <config>                 run a scenario, write artifacts
    chlab weights certify <config>          certify every tracked weight
    chlab classify <config>                 a-priori verdicts, no integration
    chlab profile <config>                  run with tail profiles forced on
    chlab sweep <config> --axis F --values V1,V2,...
    chlab selftest                          built-in verification suite

``<config>`` is either the name of a builtin scenario (``chlab simulate
--list`` prints them) or the path of a YAML config file.  The flags
``--out DIR``, ``--seed INT``, and ``--quiet`` are accepted by every
command.  Exit status is 0 whenever the requested work completed — a run
that ends in wave breaking is a result, not an error; nonzero is reserved
for bad configs, unreadable files, and failed selftests.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

from .config import ConfigError, Scenario, load_scenario
from .diagnostics import mckean_classify
from .field import momentum_of
from .io import write_summary
from .runner import run_scenario, sweep
from .scenarios import builtin_names, builtin_scenario, describe_builtins
from .weights import CertifyConfig, certify_admissible

__all__ = ["main", "build_parser"]

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_SELFTEST = 1


def _common_flags(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a subcommand's unset flags from clobbering values the
    # root parser already collected (the flags work in both positions).
    parser.add_argument("--out", metavar="DIR", default=argparse.SUPPRESS,
                        help="artifact directory root (default: ./runs)")
    parser.add_argument("--seed", type=int, metavar="INT",
                        default=argparse.SUPPRESS,
                        help="seed recorded in summaries and used by "
                             "sampling-based checks (default: 0)")
    parser.add_argument("--quiet", action="store_const", const=True,
                        default=argparse.SUPPRESS,
                        help="suppress progress output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chlab",
        description="Numerical laboratory for the Camassa-Holm equation in "
                    "nonlocal form: scenario runs, weighted-norm "
                    "persistence, breakdown prediction, tail profiles.")
    _common_flags(parser)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p_sim = sub.add_parser(
        "simulate", help="run one scenario and write its artifacts")
    p_sim.add_argument("config", nargs="?",
                       help="builtin scenario name or YAML config path")
    p_sim.add_argument("--list", action="store_true",
                       help="list builtin scenarios and exit")
    _common_flags(p_sim)

    p_weights = sub.add_parser("weights", help="weight machinery")
    w_sub = p_weights.add_subparsers(dest="weights_command",
                                     metavar="SUBCOMMAND")
    p_cert = w_sub.add_parser(
        "certify", help="admissibility certificates for a scenario's "
                        "tracked weights")
    p_cert.add_argument("config",
                        help="builtin scenario name or YAML config path")
    _common_flags(p_cert)

    p_cls = sub.add_parser(
        "classify", help="run the a-priori breakdown predictors on the "
                         "initial datum (no time integration)")
    p_cls.add_argument("config",
                       help="builtin scenario name or YAML config path")
    _common_flags(p_cls)

    p_prof = sub.add_parser(
        "profile", help="run a scenario with tail-profile accumulation "
                        "forced on")
    p_prof.add_argument("config",
                        help="builtin scenario name or YAML config path")
    _common_flags(p_prof)

    p_sweep = sub.add_parser(
        "sweep", help="repeat a scenario across values of one config field")
    p_sweep.add_argument("config",
                         help="builtin scenario name or YAML config path")
    p_sweep.add_argument("--axis", required=True, metavar="FIELD",
                         help="dotted config path to vary, e.g. "
                              "initial_data.rate or grid.N")
    p_sweep.add_argument("--values", required=True, metavar="V1,V2,...",
                         help="comma-separated values for the axis")
    p_sweep.add_argument("--workers", type=int, default=None, metavar="N",
                         help="parallel worker processes (default: one per "
                              "value, capped at the CPU count)")
    _common_flags(p_sweep)

    p_self = sub.add_parser(
        "selftest", help="run the built-in verification suite")
    p_self.add_argument("--slow", action="store_true",
                        help="include the slow sweep criterion")
    p_self.add_argument("--criterion", type=int, action="append",
                        metavar="N", help="run only the given criterion "
                        "number (repeatable)")
    _common_flags(p_self)

    return parser


def _merged(args: argparse.Namespace, name: str, fallback):
    value = getattr(args, name, None)
    return fallback if value is None else value


def _resolve_scenario(token: str) -> Scenario:
    if token in builtin_names():
        return builtin_scenario(token)
    path = Path(token)
    if path.exists():
        return load_scenario(path)
    raise ConfigError(
        "", f"{token!r} is neither a builtin scenario nor a config file; "
            f"builtins: {', '.join(builtin_names())}")


def _say(quiet: bool, *parts) -> None:
    if not quiet:
        print(*parts)


def _print_run_report(summary: dict, outdir, quiet: bool) -> None:
    if quiet:
        return
    name = summary["scenario"]
    print(f"{name}: {summary['status']} at t={summary['t_final']:.6g} "
          f"({summary['steps']} steps, {summary['timing_seconds']:.2f}s)")
    bracket = summary["t_star_bracket"]
    if bracket:
        print(f"  breakdown bracketed in [{bracket[0]:.6g}, {bracket[1]:.6g}]")
    cons = summary["conservation"]
    print(f"  drift: energy {cons['energy_drift_rel']:.3e}, "
          f"mass {cons['mass_drift_rel']:.3e}")
    if summary["predictors"]:
        pred = summary["predictors"]
        fired = [k for k in ("slope_criterion", "decay_blowup")
                 if pred[k]["fired"]]
        print(f"  predictors: momentum sign "
              f"{pred['momentum_sign']['verdict']}; fired: "
              f"{', '.join(fired) if fired else 'none'}")
    for row in summary["persistence"]:
        print(f"  W[{row['weight_str']}, p={row['p']}]: "
              f"sup {row['sup_W']:.6g}, C_fit {row['C_fit']:.6g}, "
              f"{'ok' if row['passed'] else 'inconsistent'}"
              f"{' (diverged)' if row['diverged'] else ''}")
    if summary["rate_cap"]:
        cap = summary["rate_cap"]
        print(f"  rate cap: max {cap['max_sup']:.6g} vs cap "
              f"{cap['cap']:.6g} -> {'ok' if cap['passed'] else 'EXCEEDED'}")
    if summary["profiles"]:
        p = summary["profiles"]
        if "c1" in p:
            recon = p["reconstruction_error_rel"]
            print(f"  profiles: c1={p['c1']:.6g} c2={p['c2']:.6g}, "
                  f"max eps ({p['max_eps_plus']:.3e}, "
                  f"{p['max_eps_minus']:.3e})"
                  + (f", reconstruction {recon:.3e}"
                     if recon is not None else ""))
        if p.get("error"):
            print(f"  profiles note: {p['error']}")
    for warning in summary["weight_warnings"]:
        print(f"  warning: {warning}")
    if outdir is not None:
        print(f"  artifacts: {outdir}")


def _cmd_simulate(args, out_root, seed, quiet, force_profiles=False) -> int:
    if getattr(args, "list", False):
        for name, description in describe_builtins():
            print(f"{name:26s} {description}")
        return _EXIT_OK
    if not args.config:
        print("error: missing config (or use --list)", file=sys.stderr)
        return _EXIT_CONFIG
    scenario = _resolve_scenario(args.config)
    if force_profiles and not scenario.profiles_enabled:
        scenario = scenario.with_profiles()
    result = run_scenario(scenario, out_root=out_root, seed=seed)
    _print_run_report(result.summary, result.outdir, quiet)
    return _EXIT_OK


def _cmd_certify(args, out_root, seed, quiet) -> int:
    scenario = _resolve_scenario(args.config)
    if not scenario.weights_to_track:
        _say(quiet, f"{scenario.name}: no weights_to_track in this scenario")
        return _EXIT_OK
    records = []
    for i, tw in enumerate(scenario.weights_to_track):
        cert = certify_admissible(tw.weight, tw.weight,
                                  CertifyConfig(seed=seed))
        records.append({"index": i, "weight": str(tw.weight),
                        "p": "inf" if math.isinf(tw.p) else tw.p,
                        "certificate": cert.as_record()})
        _say(quiet, f"W_{i}: {tw.weight}")
        _say(quiet, f"  admissible: {cert.admissible}")
        _say(quiet, f"  moderateness C0 = {cert.C0:.6g}, "
                    f"log-derivative bound A = {cert.A:.6g}")
        integral = ("divergent" if not cert.quadrature_converged
                    else f"{cert.integral_v_exp:.12g}")
        _say(quiet, f"  decay integral of v e^-|x|: {integral}")
        sup_route = cert.lp_v_exp.get(math.inf)
        if sup_route is not None:
            _say(quiet, f"  sup v e^-|x| = {sup_route:.6g}")
    if out_root is not None:
        outdir = Path(out_root) / scenario.run_dirname()
        outdir.mkdir(parents=True, exist_ok=True)
        write_summary(outdir / "weight_certificates.json", {
            "schema_version": 1, "scenario": scenario.name,
            "seed": seed, "certificates": records})
        _say(quiet, f"certificates: {outdir / 'weight_certificates.json'}")
    return _EXIT_OK


def _cmd_classify(args, out_root, seed, quiet) -> int:
    from .runner import _predictor_table

    scenario = _resolve_scenario(args.config)
    u0 = scenario.build_initial()
    table = _predictor_table(u0)
    mc = table["momentum_sign"]
    _say(quiet, f"{scenario.name}: a-priori classification of the initial "
                f"datum")
    x0 = "" if mc["x0"] is None else f" (sign change near x = {mc['x0']:.4g})"
    _say(quiet, f"  momentum sign pattern: {mc['verdict']}{x0} -> "
                f"{'global existence' if mc['predicts_global'] else 'no guarantee'}")
    for key, label in (("slope_criterion", "slope criterion"),
                       ("decay_blowup", "critical-decay test")):
        row = table[key]
        verdict = "breakdown guaranteed" if row["fired"] else "silent"
        _say(quiet, f"  {label}: {verdict} (evidence {row['evidence']:.4e})")
    if out_root is not None:
        outdir = Path(out_root) / scenario.run_dirname()
        outdir.mkdir(parents=True, exist_ok=True)
        write_summary(outdir / "classification.json", {
            "schema_version": 1, "scenario": scenario.name, "seed": seed,
            "config_hash": scenario.content_hash(), "predictors": table})
        _say(quiet, f"classification: {outdir / 'classification.json'}")
    return _EXIT_OK


def _parse_values(raw: str) -> List[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError("values", f"bad sweep value in {raw!r}: {exc}")


def _cmd_sweep(args, out_root, seed, quiet) -> int:
    scenario = _resolve_scenario(args.config)
    values = _parse_values(args.values)
    table = sweep(scenario, args.axis, values, out_root=out_root,
                  workers=args.workers, seed=seed)
    if not quiet:
        print(f"{scenario.name}: sweep over {args.axis}")
        for row in table["rows"]:
            if row["error"]:
                line = f"error: {row['error']}"
            else:
                bracket = row["t_star_bracket"]
                where = (f", breakdown in [{bracket[0]:.4g}, {bracket[1]:.4g}]"
                         if bracket else "")
                line = f"{row['status']} at t={row['t_final']:.6g}{where}"
            print(f"  {args.axis} = {row['value']:<10g} {line}")
        if "dir" in table:
            print(f"  sweep table: {table['dir']}")
    return _EXIT_OK


def _cmd_selftest(args, out_root, seed, quiet) -> int:
    from .acceptance import format_result, run_suite

    del out_root, seed  # criteria pin their own seeds for reproducibility
    results = run_suite(
        include_slow=args.slow,
        numbers=args.criterion,
        report=None if quiet else
        (lambda r: print(format_result(r, verbose=True))),
    )
    failed = [r for r in results if not r.passed]
    if not quiet:
        print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return _EXIT_SELFTEST if failed else _EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return _EXIT_CONFIG

    out_root = _merged(args, "out", "runs")
    seed = int(_merged(args, "seed", 0))
    quiet = bool(_merged(args, "quiet", False))

    try:
        if args.command == "simulate":
            return _cmd_simulate(args, out_root, seed, quiet)
        if args.command == "weights":
            if args.weights_command != "certify":
                print("error: expected 'weights certify'", file=sys.stderr)
                return _EXIT_CONFIG
            return _cmd_certify(args, out_root, seed, quiet)
        if args.command == "classify":
            return _cmd_classify(args, out_root, seed, quiet)
        if args.command == "profile":
            return _cmd_simulate(args, out_root, seed, quiet,
                                 force_profiles=True)
        if args.command == "sweep":
            return _cmd_sweep(args, out_root, seed, quiet)
        if args.command == "selftest":
            return _cmd_selftest(args, out_root, seed, quiet)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    return _EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
