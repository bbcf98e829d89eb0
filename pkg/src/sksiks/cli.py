"""Command-line scenario runner."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import ConfigError, GoalOutOfRange, InvalidParams, SimError
from .iks import cascade
from .parser import story_cascade, to_story_outline
from .sequence import validate_params
from .specfile import load, parse_params, write_trace_csv

DEFAULT_SEED = 20_240_601
DEFAULT_TRIALS = 10_000
DEFAULT_HORIZON = 32


def _common(p: argparse.ArgumentParser, spec_required=True):
    p.add_argument("--spec", required=spec_required, help="scenario JSON file or shipped fixture name")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON)
    p.add_argument("--out", help="write the result (JSON or CSV) to this file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sksiks", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a counting parameter tuple or a scenario file")
    v.add_argument("--params", help="'paper' (the built-in reference tuple) or a JSON file with h, cur, l, s, s_resid, exc, inh")
    v.add_argument("--spec")

    for name in ("query1", "query2"):
        q = sub.add_parser(name, help=f"run {name} on a sequence scenario")
        _common(q)
        q.add_argument("--goal", type=int, required=True)
        if name == "query2":
            q.add_argument("--letter", required=True)
        q.add_argument("--params", help="override the scenario's counting parameters")
        q.add_argument("--trace", help="write the counting trace as CSV")

    pa = sub.add_parser("parse", help="parse a sentence against the scenario's templates")
    _common(pa)
    pa.add_argument("--sentence", required=True)
    pa.add_argument("--judge", action="store_true", help="also run the story cascade")
    pa.add_argument("--trace", help="write the working-memory trace as CSV")

    sw = sub.add_parser("sweep", help="Query 1 latency and decision for a range of goals")
    _common(sw)
    sw.add_argument("--from", dest="first", type=int, default=1)
    sw.add_argument("--to", dest="last", type=int)
    sw.add_argument("--params")

    c = sub.add_parser("cascade", help="run an intuitive cascade from named concepts")
    _common(c)
    c.add_argument("--start", required=True, help="comma-separated concept names")
    c.add_argument("--outputs", default="decision", choices=("decision", "emotion"))
    return ap


def _emit(text: str, out: str | None):
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as e:
            raise ConfigError(f"cannot write {out}: {e.strerror}") from None
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _check_counts(args):
    if args.trials < 1 or args.horizon < 1:
        raise ConfigError("--trials and --horizon must be positive")


def cmd_validate(args) -> int:
    if args.params is None and args.spec is None:
        raise ConfigError("validate needs --params or --spec")
    if args.params is not None:
        bad = validate_params(parse_params(args.params))
        if bad:
            raise InvalidParams(bad)
        print("all inequalities satisfied")
    if args.spec is not None:
        sc = load(args.spec)
        lost = sc.graph.unreachable_outputs()
        if lost:
            raise ConfigError("outputs unreachable from any concept: "
                              + ", ".join(sc.net.label(i) for i in lost))
        if sc.sequence is not None:
            sc.build_sequence()
        print(f"spec ok: {len(sc.net)} neurons, {len(sc.net.edges)} edges")
    return 0


def _sequence(args):
    sc = load(args.spec)
    params = parse_params(args.params) if getattr(args, "params", None) else None
    return sc.build_sequence(params)


def _query_doc(res) -> dict:
    doc = {
        "letter": res.letter,
        "letter_index": res.letter_index,
        "latency_rounds": res.latency_rounds,
        "increments": res.increments,
        "decision_mode": res.decision.mode_label,
        "decision": res.decision.to_json(),
    }
    if res.emotion is not None:
        doc["emotion_mode"] = res.emotion.mode_label
        doc["emotion"] = res.emotion.to_json()
    return doc


def cmd_query(args) -> int:
    _check_counts(args)
    seq = _sequence(args)
    if args.command == "query1":
        res = seq.run_query1(args.goal, args.horizon, args.trials, args.seed)
    else:
        res = seq.run_query2(args.letter, args.goal, args.horizon, args.trials, args.seed)
    if args.trace:
        write_trace_csv(res.trace, args.trace, [seq.net.label(i) for i in range(len(seq.net))])
    summary = (f"letter={res.letter} decision={res.decision.mode_label} "
               f"p={res.decision.probability(res.decision.mode or -1):.4f} "
               f"latency_rounds={res.latency_rounds} t_iks={res.decision.stabilization_round}")
    if args.out:
        _emit(_json(_query_doc(res)), args.out)
    print(summary)
    return 0


def cmd_parse(args) -> int:
    _check_counts(args)
    sc = load(args.spec)
    parser = sc.build_parser(args.seed)
    try:
        rp = parser.parse(args.sentence)
    finally:
        if args.trace and parser.sim is not None:
            write_trace_csv(parser.sim.trace, args.trace,
                            [parser.net.label(i) for i in range(len(parser.net))])
    doc = {"parse": rp.to_json(), "candidate_sizes": parser.sizes}
    if args.judge:
        outline = to_story_outline(rp, sc.graph, sc.lexicon)
        res = story_cascade(outline, sc.graph, args.horizon, args.trials, args.seed)
        doc["judgment"] = res.to_json()
        doc["judgment_mode"] = res.mode_label
    _emit(_json(doc), args.out)
    return 0


def sweep_rows(seq, first: int, last: int, horizon: int, trials: int, seed) -> list[dict]:
    rows = []
    for g in range(first, last + 1):
        res = seq.run_query1(g, horizon, trials, seed, emotion=False)
        rows.append({"g": g, "letter": res.letter, "decision": res.decision.mode_label,
                     "latency_rounds": res.latency_rounds,
                     "t_iks": res.decision.stabilization_round})
    return rows


def latency_fit(rows) -> tuple[int | None, int | None]:
    """Slope d and intercept c of latency = g*d + c, or None if not affine."""
    if len(rows) < 2:
        return None, None
    lat = [r["latency_rounds"] for r in rows]
    diffs = {b - a for a, b in zip(lat, lat[1:])}
    if len(diffs) != 1:
        return None, None
    d = diffs.pop()
    return d, lat[0] - rows[0]["g"] * d


def cmd_sweep(args) -> int:
    _check_counts(args)
    seq = _sequence(args)
    last = seq.k if args.last is None else args.last
    if args.first <= last and not (1 <= args.first and last <= seq.k):
        raise GoalOutOfRange(f"goal range {args.first}..{last} outside 1..{seq.k}")
    rows = sweep_rows(seq, args.first, last, args.horizon, args.trials, args.seed)
    buf = io.StringIO()
    w = csv.DictWriter(buf, ["g", "letter", "decision", "latency_rounds", "t_iks"],
                       lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), args.out)
    d, c = latency_fit(rows)
    if d is not None:
        print(f"d={d} c={c}", file=sys.stderr)
    return 0


def cmd_cascade(args) -> int:
    _check_counts(args)
    sc = load(args.spec)
    start = set()
    for name in filter(None, (s.strip() for s in args.start.split(","))):
        start |= set(sc.graph.representatives(name))
    res = cascade(sc.graph, start, args.horizon, args.trials, args.seed, args.outputs)
    _emit(_json(res.to_json()), args.out)
    return 0


COMMANDS = {"validate": cmd_validate, "query1": cmd_query, "query2": cmd_query,
            "parse": cmd_parse, "sweep": cmd_sweep, "cascade": cmd_cascade}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except SimError as e:
        msg = str(e).strip("'\"").splitlines()[0] if str(e) else ""
        print(f"error: {type(e).__name__}: {msg}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
