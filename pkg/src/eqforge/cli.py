"""Command-line front end.

Verbs: gen, check, solve, certify, theorem, synthesize, winpair,
winpair-bench, atlas, scan.  Exit codes: 0 success / verdict true,
1 verdict false (not an equilibrium, undecided, no counterexample),
2 input error.  `--json` switches to machine output; all output is
deterministic (sorted keys, canonical rational strings).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .equilibrium import (
    certify_no_F_equilibrium,
    find_F_equilibrium,
    verify_F_equilibrium,
    verify_general_equilibrium,
    atlas_3x3,
)
from .families import (
    crawford,
    gen_C,
    gen_D,
    nis4_condensed,
    random_normal,
)
from .games import (
    Game,
    InputError,
    TwoValuesGame,
    condensed_from_json,
    condensed_to_json,
    from_condensed,
    game_from_json,
    game_to_json,
    profile_from_json,
    profile_to_json,
    rational,
)
from .theorems import (
    ToleranceUndecidedError,
    cm_nonexistence,
    dm_uniqueness,
    panorama,
    synthesize_counterexample,
)
from .valuations import (
    HalfClass,
    OneParamValuation,
    classify_half,
    cvar_of_distribution,
    is_unimodal,
    x0_of,
    x1_of,
)
from .winpair import bench, find_winning_pair, pair_to_profile

PPAD_LINE = "x0=0; existence for all games; computation PPAD-hard (not implemented)"
EQUAL_LINE = "F(1/2)=b; existence for all games"


@dataclass
class Command:
    """A parsed invocation: the verb plus its validated option namespace."""

    verb: str
    options: argparse.Namespace


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if x is None:
        return "n/a"
    return repr(float(x))


def _emit(payload, ns, human_lines=None) -> None:
    if getattr(ns, "json", False) or human_lines is None:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        for line in human_lines:
            sys.stdout.write(line + "\n")


def _write_or_print(doc: dict, path) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_valuation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--valuation",
        required=True,
        choices=["expectation", "evar", "esd", "cvar"],
        help="valuation kind",
    )
    p.add_argument("--gamma", help="risk weight for evar/esd (rational)")
    p.add_argument("--alpha", help="confidence level for cvar (rational)")
    p.add_argument("--a", default="0", help="cheap cost (rational, default 0)")
    p.add_argument("--b", default="1", help="dear cost (rational, default 1)")


def _build_valuation(ns) -> OneParamValuation:
    a, b = rational(ns.a), rational(ns.b)
    kind = ns.valuation
    if kind == "expectation":
        return OneParamValuation.expectation(a, b)
    if kind == "evar":
        if ns.gamma is None:
            raise InputError("--gamma is required for evar")
        return OneParamValuation.evar(a, b, rational(ns.gamma))
    if kind == "esd":
        if ns.gamma is None:
            raise InputError("--gamma is required for esd")
        return OneParamValuation.esd(a, b, rational(ns.gamma))
    if ns.alpha is None:
        raise InputError("--alpha is required for cvar")
    return OneParamValuation.cvar(a, b, rational(ns.alpha))


def _load_any_game(path):
    """Game file in any supported format -> Game or TwoValuesGame."""
    with open(path) as fh:
        doc = json.load(fh)
    if "col" in doc:
        return from_condensed(condensed_from_json(doc))
    return game_from_json(doc)


def _as_two_values(g) -> TwoValuesGame:
    if isinstance(g, TwoValuesGame):
        return g
    values = sorted({x for row in g.mu1 for x in row} | {x for row in g.mu2 for x in row})
    if len(values) != 2:
        raise InputError(
            f"game has {len(values)} distinct cost values; this verb needs exactly 2"
        )
    return TwoValuesGame(g, values[0], values[1])


def parse_args(argv) -> Command:
    top = argparse.ArgumentParser(
        prog="eqforge",
        description="Two-values games: equilibrium search, certification, "
        "and theorem checking.",
    )
    top.add_argument("--json", action="store_true", help="machine-readable output")
    sub = top.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gen", help="generate a named game")
    p.add_argument(
        "--family", required=True, choices=["D", "C", "crawford", "nis4", "random"]
    )
    p.add_argument("--m", type=int, help="size parameter for D/C")
    p.add_argument("--id", help="nis4 fixture id (1.1, 1.2, 2.3, 2.4)")
    p.add_argument("--n", type=int, help="size for random normal games")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--a", default="0")
    p.add_argument("--b", default="1")
    p.add_argument("-o", "--out", help="output path (default stdout)")

    p = sub.add_parser("check", help="verify a profile")
    p.add_argument("--game", required=True)
    p.add_argument("--profile", required=True)
    _add_valuation_flags(p)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("solve", help="search for an F-equilibrium")
    p.add_argument("--game", required=True)
    _add_valuation_flags(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("-o", "--out")

    p = sub.add_parser("certify", help="certify non-existence")
    p.add_argument("--game", required=True)
    _add_valuation_flags(p)
    p.add_argument("--eps", default="1/1000000", help="improvement margin (rational)")
    p.add_argument("--max-depth", type=int, default=40)

    p = sub.add_parser("theorem", help="evaluate a theorem's clauses")
    p.add_argument(
        "name", choices=["dm-unique", "cm-nonexist", "panorama"], help="which theorem"
    )
    p.add_argument("--m", type=int)
    _add_valuation_flags(p)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("synthesize", help="synthesize a no-equilibrium game")
    _add_valuation_flags(p)
    p.add_argument("-o", "--out")

    p = sub.add_parser("winpair", help="find a winning pair (condensed game)")
    p.add_argument("--condensed", required=True)
    p.add_argument("--emit-profile", action="store_true")

    p = sub.add_parser("winpair-bench", help="scaling benchmark CSV")
    p.add_argument("--nmin", type=int, default=2**14)
    p.add_argument("--nmax", type=int, default=2**20)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("-o", "--out")

    p = sub.add_parser("atlas", help="sweep all 3x3 two-values games")
    _add_valuation_flags(p)
    p.add_argument("-o", "--out", help="per-game CSV path")
    p.add_argument("--workers", type=int)
    p.add_argument("--limit", type=int)

    p = sub.add_parser("scan", help="describe a valuation's regime")
    _add_valuation_flags(p)

    ns = top.parse_args(argv)
    return Command(ns.verb, ns)


def _run_gen(ns) -> int:
    a, b = rational(ns.a), rational(ns.b)
    if ns.family in ("D", "C"):
        if ns.m is None:
            raise InputError("--m is required for families D and C")
        g = gen_D(ns.m, a, b) if ns.family == "D" else gen_C(ns.m, a, b)
        _write_or_print(game_to_json(g), ns.out)
    elif ns.family == "crawford":
        _write_or_print(game_to_json(crawford()), ns.out)
    elif ns.family == "nis4":
        if ns.id is None:
            raise InputError("--id is required for nis4 fixtures")
        _write_or_print(condensed_to_json(nis4_condensed(ns.id, a, b)), ns.out)
    else:
        if ns.n is None:
            raise InputError("--n is required for random normal games")
        _write_or_print(condensed_to_json(random_normal(ns.n, ns.seed, a, b)), ns.out)
    return 0


def _run_check(ns) -> int:
    g = _load_any_game(ns.game)
    v = _build_valuation(ns)
    with open(ns.profile) as fh:
        prof = profile_from_json(json.load(fh))
    if not isinstance(g, TwoValuesGame):
        if ns.valuation != "cvar":
            g = _as_two_values(g)  # raises with a clear message
        else:
            alpha = rational(ns.alpha)

            def value_of(values, probs):
                return cvar_of_distribution(values, probs, alpha)

            report = verify_general_equilibrium(g, value_of, prof, ns.tol)
            _emit(report.to_json(), ns, [f"verdict: {report.verdict}"])
            return 0 if report.is_equilibrium else 1
    report = verify_F_equilibrium(g, v, prof, ns.tol)
    lines = [f"verdict: {report.verdict}"]
    if report.witness:
        w = report.witness
        lines.append(
            f"witness: player {w.player} deviates to strategy {w.strategy} "
            f"({_fmt(w.old)} -> {_fmt(w.new)})"
        )
    _emit(report.to_json(), ns, lines)
    return 0 if report.is_equilibrium else 1


def _run_solve(ns) -> int:
    g = _as_two_values(_load_any_game(ns.game))
    v = _build_valuation(ns)
    found = find_F_equilibrium(g, v, ns.tol)
    if found is None:
        _emit({"found": False}, ns, ["no F-equilibrium found (not a proof)"])
        return 1
    doc = {"found": True, **found.to_json()}
    if ns.out:
        _write_or_print(profile_to_json(found.profile), ns.out)
    s1, s2 = found.profile.supports()
    _emit(
        doc,
        ns,
        [
            f"method: {found.method}",
            f"supports: {len(s1)}x{len(s2)}",
            "profile: " + json.dumps(profile_to_json(found.profile), sort_keys=True),
        ],
    )
    return 0


def _run_certify(ns) -> int:
    g = _as_two_values(_load_any_game(ns.game))
    v = _build_valuation(ns)
    cert = certify_no_F_equilibrium(g, v, rational(ns.eps), ns.max_depth)
    _emit(
        cert.to_json(),
        ns,
        [
            f"verdict: {cert.verdict}",
            f"explored boxes: {cert.explored_boxes}",
            f"max depth reached: {cert.max_depth_reached}",
        ],
    )
    return 0 if cert.certified else 1


def _run_theorem(ns) -> int:
    v = _build_valuation(ns)
    if ns.name == "panorama":
        verdict = panorama(v, ns.tol)
    else:
        if ns.m is None:
            raise InputError("--m is required for this theorem")
        fn = dm_uniqueness if ns.name == "dm-unique" else cm_nonexistence
        verdict = fn(ns.m, v, ns.tol)
    lines = [f"theorem: {verdict.theorem}", f"holds: {verdict.holds}"]
    for name, val in verdict.conditions:
        lines.append(f"  clause {name}: {val}")
    if verdict.witness is not None:
        lines.append("witness: " + json.dumps(verdict.to_json()["witness"], sort_keys=True))
    _emit(verdict.to_json(), ns, lines)
    return 0 if verdict.holds else 1


def _run_synthesize(ns) -> int:
    v = _build_valuation(ns)
    result = synthesize_counterexample(v)
    if result is None:
        reason = "x0=0" if x0_of(v) == 0 else "F(1/2)=b"
        _emit(
            {"outcome": "refusal", "reason": reason},
            ns,
            [f"refusal: {reason} (every game has an F-equilibrium)"],
        )
        return 1
    m, game = result
    if ns.out:
        _write_or_print(game_to_json(game), ns.out)
    _emit(
        {"outcome": "counterexample", "m": m, "game": game_to_json(game)},
        ns,
        [f"counterexample: m={m} ({m + 1}x{m + 1} game)"]
        + ([f"written to {ns.out}"] if ns.out else []),
    )
    return 0


def _run_winpair(ns) -> int:
    with open(ns.condensed) as fh:
        c = condensed_from_json(json.load(fh))
    res = find_winning_pair(c)
    doc = res.to_json()
    if ns.emit_profile:
        if res.outcome == "pair":
            doc["profile"] = profile_to_json(pair_to_profile(res.pair, res.n))
        elif res.outcome == "fully-mixed-uniform":
            from .games import MixedStrategy, Profile

            doc["profile"] = profile_to_json(
                Profile(MixedStrategy.uniform(res.n), MixedStrategy.uniform(res.n))
            )
        else:
            doc["profile"] = None
    lines = [f"outcome: {res.outcome}", f"scans: {res.scans}"]
    if res.pair:
        lines.insert(1, f"pair: rows {list(res.pair[0])} cols {list(res.pair[1])}")
    _emit(doc, ns, lines)
    return 0


def _run_winpair_bench(ns) -> int:
    rows = bench(ns.nmin, ns.nmax, ns.seeds, ns.repeats)
    out_lines = ["n,seed,nanos,scans"]
    out_lines += [f"{n},{seed},{nanos},{scans}" for n, seed, nanos, scans in rows]
    text = "\n".join(out_lines) + "\n"
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _run_atlas(ns) -> int:
    v = _build_valuation(ns)
    summary = atlas_3x3(v, csv_path=ns.out, workers=ns.workers, limit=ns.limit)
    _emit(
        summary,
        ns,
        [
            f"total: {summary['total']}",
            f"solved: {summary['solved']}",
            f"failures: {summary['failures']}",
            "by method: "
            + ", ".join(f"{k}={n}" for k, n in summary["by_method"].items()),
        ],
    )
    return 0 if summary["failures"] == 0 else 1


def _run_scan(ns) -> int:
    v = _build_valuation(ns)
    x0 = x0_of(v)
    half = classify_half(v)
    x1 = None
    if is_unimodal(v) and x0 != 0:
        x1 = x1_of(v)
    if x0 == 0:
        regime = PPAD_LINE
        counter_m = None
    elif half == HalfClass.EQUAL:
        regime = EQUAL_LINE
        counter_m = None
    else:
        m, _ = synthesize_counterexample(v)
        regime = f"counterexample exists: no F-equilibrium in the size-{m} family game"
        counter_m = m
    doc = {
        "x0": _fmt(x0),
        "x1": _fmt(x1),
        "half_class": half.value,
        "regime": regime,
        "counterexample_m": counter_m,
    }
    _emit(
        doc,
        ns,
        [f"x0={_fmt(x0)}", f"x1={_fmt(x1)}", f"F(1/2) vs b: {half.value}", regime],
    )
    return 0


_RUNNERS = {
    "gen": _run_gen,
    "check": _run_check,
    "solve": _run_solve,
    "certify": _run_certify,
    "theorem": _run_theorem,
    "synthesize": _run_synthesize,
    "winpair": _run_winpair,
    "winpair-bench": _run_winpair_bench,
    "atlas": _run_atlas,
    "scan": _run_scan,
}


def run(cmd: Command) -> int:
    try:
        return _RUNNERS[cmd.verb](cmd.options)
    except ToleranceUndecidedError as e:
        sys.stderr.write(f"undecided at tolerance: {e}\n")
        return 1
    except InputError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


def main(argv=None) -> None:
    sys.exit(run(parse_args(argv)))


if __name__ == "__main__":
    main()
