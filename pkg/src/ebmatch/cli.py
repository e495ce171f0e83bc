"""Command line interface.

Subcommands operate on a scenario file and exit with:
0 when the checked property holds (or the requested object was produced),
10 when a property is violated (counterexample found, verification failed,
or a necessary stability condition fails), 20 when a search or iteration
budget ran out before a conclusion, 1 on errors.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import analysis, loynes, stability
from .errors import BudgetExceeded, EbmatchError, SearchExhausted
from .kernel import BACKEND
from .scenario import Scenario, load_scenario, parse_scenario
from .state import format_word

EXIT_OK = 0
EXIT_VIOLATED = 10
EXIT_BUDGET = 20
EXIT_ERROR = 1


def _load(args) -> Scenario:
    path = Path(args.scenario)
    if path.exists():
        return load_scenario(path)
    bundled = resources.files("ebmatch.scenarios").joinpath(args.scenario)
    if bundled.is_file():
        return parse_scenario(bundled.read_text(encoding="utf-8"))
    raise EbmatchError(f"scenario {args.scenario!r} not found")


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(args, name: str, lines) -> None:
    out = _out_dir(args)
    if out is not None:
        (out / name).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _print(lines) -> None:
    for line in lines:
        print(line)


def _couple_str(c_word, s_word) -> str:
    return f"({format_word(c_word)} | {format_word(s_word, server=True)})"


def cmd_verify_subadd(args) -> int:
    sc = _load(args)
    max_len = sc.budget("max_len", 3)
    cex = analysis.check_subadditive(
        sc.structure,
        sc.policy,
        max_len=max_len,
        pieces=sc.subadd_pieces,
        length_cap=max(max_len, 3),
    )
    lines = [f"discipline: {sc.policy.kind}", f"piece length: {max_len}"]
    if cex is None:
        lines.append("sub-additivity: PASS (no counterexample)")
        _print(lines)
        _write_report(args, "subadd.txt", lines)
        return EXIT_OK
    lines += [
        "sub-additivity: FAIL",
        f"piece 1: {_couple_str(*cex.piece1)}",
        f"piece 2: {_couple_str(*cex.piece2)}",
        f"combined unmatched: {cex.combined_unmatched}",
        f"split unmatched: {cex.split_unmatched}",
    ]
    _print(lines)
    _write_report(args, "subadd.txt", lines)
    return EXIT_VIOLATED


def cmd_verify_nonexp(args) -> int:
    sc = _load(args)
    max_count = sc.budget("max_count", 2)
    cex = analysis.check_nonexpansive(sc.structure, sc.policy, max_count=max_count)
    lines = [f"discipline: {sc.policy.kind}", f"count cap: {max_count}"]
    if cex is None:
        lines.append("non-expansiveness: PASS (no counterexample)")
        code = EXIT_OK
    else:
        lines += [
            "non-expansiveness: FAIL",
            f"details: {cex.detail_a} vs {cex.detail_b}",
            f"arrival: ({cex.arrival.c}, s{cex.arrival.s})",
            f"distance: {cex.distance_before} -> {cex.distance_after}",
        ]
        code = EXIT_VIOLATED
    _print(lines)
    _write_report(args, "nonexp.txt", lines)
    return code


def cmd_find_erasing(args) -> int:
    sc = _load(args)
    lines = [f"discipline: {sc.policy.kind}"]
    if sc.erasing_target is None:
        couple = analysis.construct_strong_erasing_couple(
            sc.structure, policy_kinds=(sc.policy.kind,)
        )
        if couple is None:
            lines.append("strong erasing couple: none found")
            _print(lines)
            _write_report(args, "erasing.txt", lines)
            return EXIT_VIOLATED
        lines.append(f"strong erasing couple: {_couple_str(couple.c, couple.s)}")
    else:
        couple = analysis.construct_erasing_couple(
            sc.structure,
            sc.policy,
            sc.erasing_target,
            max_single_len=sc.budget("max_single_len", 4),
        )
        lines += [
            f"target: {_couple_str(sc.erasing_target.w, sc.erasing_target.z)}",
            f"erasing couple: {_couple_str(couple.c, couple.s)}",
        ]
    _print(lines)
    _write_report(args, "erasing.txt", lines)
    return EXIT_OK


def cmd_verify_erasing(args) -> int:
    sc = _load(args)
    if sc.erasing_couple is None:
        raise EbmatchError("scenario has no [erasing] couple to verify")
    c_word, s_word = sc.erasing_couple
    lines = [
        f"discipline: {sc.policy.kind}",
        f"couple: {_couple_str(c_word, s_word)}",
    ]
    if sc.erasing_strong:
        ok = analysis.verify_strong_erasing_couple(sc.structure, sc.policy, c_word, s_word)
        lines.append(f"strong erasing couple: {'PASS' if ok else 'FAIL'}")
    else:
        if sc.erasing_target is None:
            raise EbmatchError("scenario has no erasing target")
        ok = analysis.verify_erasing_couple(
            sc.structure, sc.policy, sc.erasing_target, c_word, s_word
        )
        lines.append(f"erasing couple of target: {'PASS' if ok else 'FAIL'}")
    _print(lines)
    _write_report(args, "erasing.txt", lines)
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_check_stability(args) -> int:
    sc = _load(args)
    if sc.mu is None:
        raise EbmatchError("scenario has no [mu] section")
    ncond = stability.check_ncond(sc.mu)
    scond = stability.check_scond(sc.mu)
    advice = stability.advise_stability(sc.structure, sc.policy, sc.mu)
    lines = [
        f"discipline: {sc.policy.kind}",
        f"subset drift condition: {'PASS' if ncond.holds else 'FAIL'}"
        + (f" (witness {sorted(ncond.witness[1])} on side {ncond.witness[0]})" if ncond.witness else ""),
        f"independent-set condition: {'PASS' if scond.holds else 'FAIL'}"
        + (
            f" (witness A={sorted(scond.witness.A)} B={sorted(scond.witness.B)})"
            if scond.witness is not None and not scond.holds
            else ""
        ),
    ]
    for name, ok in advice.cases:
        lines.append(f"case {name}: {'yes' if ok else 'no'}")
    lines.append(
        f"integrable return time: {'yes' if advice.integrable_return_time else 'unknown'}"
    )
    if sc.iid:
        est = stability.estimate_tau1(
            sc.structure,
            sc.policy,
            sc.mu,
            runs=sc.budget("runs", 100),
            horizon=sc.budget("horizon", 10000),
            seed=args.seed,
        )
        lines.append(
            f"return-time estimate: mean {est.mean:.2f} max {est.max}"
            f" censored {est.censored}/{est.runs}"
        )
    _print(lines)
    _write_report(args, "stability.txt", lines)
    return EXIT_OK if ncond.holds else EXIT_VIOLATED


def cmd_loynes(args) -> int:
    sc = _load(args)
    if not sc.input_pairs:
        raise EbmatchError("scenario has no periodic [input]")
    sample = loynes.periodic_sample(sc.structure, sc.input_pairs)
    solution = loynes.backward_coupling(
        sc.structure, sc.policy, sample, max_backsteps=sc.budget("max_backsteps", 10000)
    )
    if solution is None:
        lines = ["backward coupling: no coupling within budget"]
        _print(lines)
        _write_report(args, "loynes.txt", lines)
        return EXIT_BUDGET
    lines = [
        f"discipline: {sc.policy.kind}",
        f"period: {solution.period}",
        f"coupling depth: {solution.coupling_depth} periods",
    ]
    trace = []
    for k, v in enumerate(solution.values):
        buf = f"{format_word(v.w)}|{format_word(v.z, server=True)}"
        lines.append(f"shift {k}: {buf}")
        trace.append(f"t{k} buffer {buf}")
    points = sorted(loynes.construction_points(solution))
    lines.append(f"construction points: {points}")
    matching = loynes.biinfinite_matching(sc.structure, sc.policy, solution)
    lines.append(f"periodic matching perfect: {matching.is_perfect}")
    for ci, si in sorted(matching.pairs):
        lines.append(f"match c@{ci} s@{si}")
        trace.append(f"t{ci} match c@{ci} s@{si}")
    _print(lines)
    _write_report(args, "loynes.txt", lines)
    out = _out_dir(args)
    if out is not None:
        (out / "trace.txt").write_text("\n".join(trace) + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ebmatch",
        description="Simulation and verification toolkit for bipartite "
        "matching models with arrival compatibilities "
        f"(kernel backend: {BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "verify-subadd": cmd_verify_subadd,
        "verify-nonexp": cmd_verify_nonexp,
        "find-erasing": cmd_find_erasing,
        "verify-erasing": cmd_verify_erasing,
        "check-stability": cmd_check_stability,
        "loynes": cmd_loynes,
    }
    for name, func in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True, help="scenario file or bundled name")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            help="accepted for compatibility; execution is sequential",
        )
        p.add_argument("--out", default=None, help="directory for report files")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BudgetExceeded, SearchExhausted) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except EbmatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
