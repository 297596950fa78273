"""Command-line entry point for the verification experiments.

Four subcommands, one per experiment family:

  verify-classical   vertex counts and the exact n-bit payoff bound
  sweep-wirings      exhaustive wiring sweep with per-wiring certification
  quantum            hardy curve, seesaw search, falsification summary
  certify-box        hardy/cabello/locality certificates for a box file

Every report is JSON with sorted keys, so re-running with an identical
configuration reproduces identical bytes except for the ``timing_seconds``
field.  ``--table`` renders the same results as fixed-width text instead.

Exit codes: 0 on success, 1 on invalid input, 2 when a verification found
a counterexample to the bound it was checking.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__, boxes, classical, games

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COUNTEREXAMPLE = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with status 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _frac_str(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _jsonable(value):
    """Recursively convert report values into JSON-serializable ones."""
    if isinstance(value, Fraction):
        return _frac_str(value)
    if isinstance(value, float):
        return "-inf" if value == games.NEG_INF else value
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if type(value).__module__ == "numpy":
        return _jsonable(value.tolist())
    return value


def _report(command: str, config: dict, results: dict, started: float) -> dict:
    return {
        "command": command,
        "config": _jsonable(config),
        "results": _jsonable(results),
        "timing_seconds": round(time.time() - started, 3),
        "version": __version__,
    }


def _print_report(report: dict) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _print_table(headers: list[str], rows: list[list[str]]) -> None:
    widths = [len(h) for h in headers]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    print(line)
    print("  ".join("-" * w for w in widths))
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


def _print_kv(pairs: list[tuple[str, object]]) -> None:
    width = max(len(key) for key, _ in pairs)
    for key, value in pairs:
        print(f"{key.ljust(width)}  {value}")


def _parse_range(text: str) -> tuple[int, int]:
    lo_text, sep, hi_text = text.partition("..")
    if not sep:
        raise ValueError(f"range must look like LO..HI, got {text!r}")
    return int(lo_text), int(hi_text)


def cmd_verify_classical(args) -> int:
    started = time.time()
    game = games.game_by_name(args.game)
    report = classical.verify_classical_bound(game, n=args.bits)
    bound_holds = report.max_payoff <= 0
    results = {
        "bits": report.bits,
        "vertex_count_formula": report.count_formula,
        "vertex_count_enumerated": report.count_enumerated,
        "counts_match": report.count_formula == report.count_enumerated,
        "safe_vertex_count": len(report.safe_assignments),
        "safe_assignments": [list(a) for a in report.safe_assignments],
        "safe_payoffs": list(report.safe_payoffs),
        "max_payoff": report.max_payoff,
        "bound_holds": bound_holds,
    }
    out = _report("verify-classical", {"game": args.game, "bits": args.bits},
                  results, started)
    if args.table:
        _print_kv([
            ("game", args.game),
            ("bits", args.bits),
            ("vertices", f"{report.count_formula} (enumerated {report.count_enumerated})"),
            ("safe vertices", len(report.safe_assignments)),
            ("max payoff", _frac_str(report.max_payoff)),
        ])
        rows = [[str(list(a)), _frac_str(p)]
                for a, p in zip(report.safe_assignments, report.safe_payoffs)]
        _print_table(["assignment", "payoff"], rows)
    else:
        _print_report(out)
    # a positive 1-bit payoff would contradict the classical bound
    if args.bits == 1 and not bound_holds:
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def cmd_sweep_wirings(args) -> int:
    from . import wirings

    started = time.time()
    game = games.game_by_name(args.game)
    id_range = (0, wirings.TOTAL_WIRINGS) if args.range is None else _parse_range(args.range)
    report = wirings.verify_theorem3(
        game,
        workers=args.workers,
        id_range=id_range,
        records_path=args.out,
    )
    results = report.to_json()
    elapsed = results.pop("elapsed_seconds", None)
    config = {
        "game": args.game,
        "workers": args.workers,
        "range": f"{id_range[0]}..{id_range[1]}",
        "out": args.out,
    }
    out = _report("sweep-wirings", config, results, started)
    if elapsed is not None:
        out["timing_seconds"] = round(elapsed, 3)
    if args.table:
        _print_kv([
            ("game", args.game),
            ("range", config["range"]),
            ("total wirings", report.total),
            ("bomb unavoidable", report.bomb_unavoidable),
            ("nonpositive", report.nonpositive),
            ("positive", report.positive),
            ("unique signatures", report.unique_signatures),
            ("positive signatures", report.positive_signatures),
            ("max payoff", _frac_str(report.max_payoff) if report.max_payoff is not None else "none"),
            ("lp cross checks", report.lp_cross_checks),
            ("counterexamples", len(report.counterexamples)),
        ])
    else:
        _print_report(out)
    if report.counterexamples:
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def cmd_quantum(args) -> int:
    from . import quantum

    started = time.time()
    theta = math.pi / 4 if args.theta is None else args.theta
    if not 0.0 <= theta <= math.pi / 4:
        raise ValueError(f"theta must lie in [0, pi/4], got {theta}")

    curve = []
    for k in range(args.grid):
        point = k * (math.pi / 4) / (args.grid - 1) if args.grid > 1 else theta
        curve.append({"theta": point, "h0": quantum.optimize_hardy(point).value})
    global_theta, global_h0 = quantum.optimize_hardy_global()

    seesaw = quantum.seesaw_dmh(theta, restarts=args.restarts, seed=args.seed,
                                tol=args.tolerance)
    target = quantum.optimize_hardy(theta).value / 4
    maximally_entangled = abs(theta - math.pi / 4) < 1e-12
    positive_found = seesaw.best_payoff > 1e-6

    results = {
        "hardy_curve": curve,
        "hardy_global": {"theta": global_theta, "h0": global_h0},
        "seesaw": seesaw.to_json(),
        "hardy_target": target,
        "seesaw_gap": seesaw.best_payoff - target,
        "maximally_entangled": maximally_entangled,
        "positive_payoff_found": positive_found,
    }
    config = {
        "theta": theta,
        "grid": args.grid,
        "restarts": args.restarts,
        "seed": args.seed,
        "tolerance": args.tolerance,
    }
    out = _report("quantum", config, results, started)
    if args.table:
        _print_table(
            ["theta", "h0"],
            [[f"{p['theta']:.6f}", f"{p['h0']:.9f}"] for p in curve],
        )
        _print_kv([
            ("global max", f"h0 = {global_h0:.9f} at theta = {global_theta:.6f}"),
            ("seesaw theta", f"{theta:.6f}"),
            ("seesaw best payoff", f"{seesaw.best_payoff:.3e}"),
            ("hardy target h0/4", f"{target:.3e}"),
            ("gap", f"{seesaw.best_payoff - target:.3e}"),
        ])
    else:
        _print_report(out)
    # positive payoff from the maximally entangled state would be a counterexample
    if maximally_entangled and positive_found:
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def _worst_ns_violation(box: boxes.NSBox) -> tuple[str, float]:
    """Label and magnitude of the largest positivity/no-signaling violation."""
    worst_label, worst = "none", Fraction(0)
    for i, value in enumerate(box.entries):
        if -value > worst:
            worst_label, worst = f"negative entry at flat index {i}", -value
    for x in range(2):
        for y in range(2):
            total = sum(box.entries[boxes.index(a, b, x, y)]
                        for a in range(2) for b in range(2))
            if abs(total - 1) > worst:
                worst_label, worst = f"normalization at x={x} y={y}", abs(total - 1)
    for a in range(2):
        for x in range(2):
            left = sum(box.entries[boxes.index(a, b, x, 0)] for b in range(2))
            right = sum(box.entries[boxes.index(a, b, x, 1)] for b in range(2))
            if abs(left - right) > worst:
                worst_label = f"sender marginal a={a} x={x} depends on receiver input"
                worst = abs(left - right)
    for b in range(2):
        for y in range(2):
            left = sum(box.entries[boxes.index(a, b, 0, y)] for a in range(2))
            right = sum(box.entries[boxes.index(a, b, 1, y)] for a in range(2))
            if abs(left - right) > worst:
                worst_label = f"receiver marginal b={b} y={y} depends on sender input"
                worst = abs(left - right)
    return worst_label, float(worst)


def cmd_certify_box(args) -> int:
    started = time.time()
    try:
        box = boxes.load_box(args.box)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"cannot read box file {args.box!r}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not boxes.validate_ns(box, tol=args.tolerance):
        label, magnitude = _worst_ns_violation(box)
        print(f"box is not a no-signaling distribution: {label} "
              f"(violation {magnitude:.3e})", file=sys.stderr)
        return EXIT_USAGE

    zero_tol = 0.0 if box.exact else args.tolerance
    hardy = boxes.hardy_check(box, tol=zero_tol)
    cabello = boxes.cabello_check(box, tol=zero_tol)
    membership = boxes.local_membership(box, tol=args.tolerance)

    local = {"inside": membership.inside}
    if membership.inside:
        local["weights"] = list(membership.weights)
    else:
        local["separating_functional"] = list(membership.functional)
        local["gap"] = membership.gap
    results = {
        "exact": box.exact,
        "hardy": None if hardy is None else hardy,
        "cabello": None if cabello is None else {"gain": cabello[0], "loss": cabello[1]},
        "chsh": boxes.chsh_value(box),
        "local": local,
    }
    out = _report("certify-box", {"box": args.box, "tolerance": args.tolerance},
                  results, started)
    if args.table:
        _print_kv([
            ("box", args.box),
            ("hardy", "no" if hardy is None else f"h0 = {hardy}"),
            ("cabello", "no" if cabello is None else
             f"gain = {cabello[0]}, loss = {cabello[1]}"),
            ("chsh", boxes.chsh_value(box)),
            ("local", "yes" if membership.inside else f"no (gap {membership.gap})"),
        ])
    else:
        _print_report(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="minehunt",
                     description="Verification reports for the mine-hunting games.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-classical",
                       help="enumerate classical vertices and check the payoff bound")
    p.add_argument("--game", choices=("dmh", "dmh-prime"), default="dmh")
    p.add_argument("--bits", type=int, default=1,
                   help="channel width in bits (default 1)")
    p.add_argument("--table", action="store_true", help="render text instead of JSON")
    p.set_defaults(func=cmd_verify_classical)

    p = sub.add_parser("sweep-wirings",
                       help="classify every wiring of a no-signaling box")
    p.add_argument("--game", choices=("dmh", "dmh-prime"), default="dmh")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--range", metavar="LO..HI", default=None,
                   help="restrict to wiring ids in [LO, HI)")
    p.add_argument("--out", metavar="PATH", default=None,
                   help="stream per-wiring records to a JSON-lines file")
    p.add_argument("--table", action="store_true", help="render text instead of JSON")
    p.set_defaults(func=cmd_sweep_wirings)

    p = sub.add_parser("quantum",
                       help="hardy curve and seesaw payoff search")
    p.add_argument("--theta", type=float, default=None,
                   help="entanglement angle (default pi/4, the maximally entangled state)")
    p.add_argument("--grid", type=int, default=17,
                   help="number of points in the hardy curve table (default 17)")
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--table", action="store_true", help="render text instead of JSON")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("certify-box",
                       help="hardy/cabello/locality certificates for a box file")
    p.add_argument("box", help="path to a box JSON file")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--table", action="store_true", help="render text instead of JSON")
    p.set_defaults(func=cmd_certify_box)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"minehunt {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
