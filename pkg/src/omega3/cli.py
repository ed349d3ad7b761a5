"""Command line: ``omega3 verify | reduce | info``.

Exit status is 0 when every check passes, 1 when any check fails and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .checks import CATALOG_IDS, CheckReport, resolve_ids, run_checks, summarize
from .constructions import (
    Quintuple,
    build_resolution,
    divisors,
    module_M,
    module_Ma,
    reduce_quintuple,
    resolution_modules,
    trace_transports_kernel,
)
from .errors import Omega3Error, UsageError
from .groupring import dihedral

DEFAULT_RANGE = (1, 3)
SLOW_N = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_range(text: str) -> tuple[int, int]:
    """``"A..B"`` or ``"A"``."""
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"bad n range {text!r}; expected A..B or A") from None
    if lo < 1 or hi < lo:
        raise UsageError(f"n range {text!r} must satisfy 1 <= A <= B")
    return lo, hi


def bundle(n_range: tuple[int, int], reports: Sequence[CheckReport]) -> dict:
    return {
        "n_range": list(n_range),
        "checks": [r.to_dict() for r in reports],
        "summary": summarize(reports),
    }


def comparison_payload(data: dict) -> str:
    """The bundle with timings removed, serialized canonically."""
    stripped = dict(data)
    stripped["checks"] = [{k: v for k, v in c.items() if k != "elapsed_ms"} for c in data["checks"]]
    return dumps(stripped)


def dumps(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def format_text(data: dict) -> str:
    lines = []
    for c in data["checks"]:
        head = f"{c['status'].upper():5} n={c['n']} {c['id']}"
        if c["params"]:
            head += f" [{c['params']}]"
        lines.append(f"{head} {c['name']}: {c['details']} ({c['elapsed_ms']} ms)")
    s = data["summary"]
    lines.append(f"summary: {s['pass']} pass, {s['fail']} fail, {s['cited']} cited "
                 f"(n = {data['n_range'][0]}..{data['n_range'][1]})")
    return "\n".join(lines) + "\n"


# -- subcommands --------------------------------------------------------------------

def cmd_verify(args) -> int:
    lo, hi = parse_range(args.n) if args.n else DEFAULT_RANGE
    if hi > args.max_n:
        print(f"warning: n capped at --max-n={args.max_n}", file=sys.stderr)
        hi = args.max_n
        if lo > hi:
            raise UsageError(f"n range starts above --max-n={args.max_n}")
    if hi > SLOW_N:
        print(f"warning: n={hi} makes the normal-form computations slow", file=sys.stderr)
    ids = []
    for chunk in args.lemma or []:
        ids.extend(x for x in chunk.split(",") if x.strip())
    selected = resolve_ids(ids)
    reports = run_checks(range(lo, hi + 1), selected, jobs=args.jobs)
    if args.no_timing:
        reports = [CheckReport(**{**r.to_dict(), "elapsed_ms": 0}) for r in reports]
    data = bundle((lo, hi), reports)
    text = dumps(data) if args.format == "json" else format_text(data)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if data["summary"]["fail"] else 0


def cmd_reduce(args) -> int:
    q = Quintuple.parse(args.quintuple)
    bad = q.violations()
    if bad:
        raise UsageError(f"invalid quintuple {q}: {', '.join(bad)}")
    ctx = dihedral(args.n)
    trace = reduce_quintuple(q, args.n)
    seq = trace.replay()
    if seq[-1] != trace.end:
        print(f"replay mismatch: {seq[-1]} != {trace.end}", file=sys.stderr)
        return 1
    transported = trace_transports_kernel(ctx, trace, ambient=args.ambient)
    if args.format == "json":
        sys.stdout.write(dumps({
            "n": args.n,
            "start": list(q.astuple()),
            "steps": [{"op": f"phi{i}'", "exponent": k, "result": list(s.astuple())}
                      for (i, k), s in zip(trace.steps, seq[1:])],
            "end": list(trace.end.astuple()),
            "replay_verified": True,
            "kernel_transport": transported,
        }))
    else:
        print(f"start {q}  (n={args.n})")
        if not trace.steps:
            print("  already reduced: empty trace")
        for step, s in zip(trace.describe(), seq[1:]):
            print(f"  {step:<10} -> {s}")
        print(f"end   {trace.end}")
        where = "ZD^3" if args.ambient else "M/M(a-1)"
        print(f"replay verified; composite automorphism carries the start kernel onto the end kernel "
              f"({where}): {'yes' if transported else 'NO'}")
    return 0 if transported else 1


def cmd_info(args) -> int:
    ctx = dihedral(args.n)
    mods = resolution_modules(ctx)
    _, d2 = build_resolution(ctx)
    info = {
        "n": ctx.n,
        "group_order": ctx.group_order,
        "rank_J": mods["J"].rank,
        "rank_W2": mods["W2"].rank,
        "rank_M": module_M(ctx).rank,
        "rank_M(a-1)": module_Ma(ctx).rank,
        "divisors_l": divisors(2 * ctx.n),
        "d2": [[str(x) for x in row] for row in d2.entries],
    }
    if args.format == "json":
        sys.stdout.write(dumps(info))
        return 0
    print(f"D_{4 * ctx.n}: n={ctx.n}, group order {ctx.group_order}, elements a^i*b^j at index i + {ctx.rot}*j")
    print(f"rank J = {info['rank_J']}  (8n-1)")
    print(f"rank W2 = {info['rank_W2']}  (4n+1)")
    print(f"rank M = {info['rank_M']}  (8n+1)")
    print(f"rank M(a-1) = {info['rank_M(a-1)']}  (8n-4)")
    print(f"l in {{{', '.join(map(str, info['divisors_l']))}}}")
    print("d2 = [[Sigma, 0, 1+ba], [0, 1+b, a-1]], canonical form:")
    print(str(d2))
    return 0


# -- entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="omega3", description="Verify the minimal third syzygies of Z over Z[D_4n].")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the lemma checks")
    v.add_argument("--n", help="range A..B (default 1..3)")
    v.add_argument("--lemma", action="append", help=f"comma-separated ids from: {','.join(CATALOG_IDS)}")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--max-n", type=int, default=6, dest="max_n")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--output", help="write the report here instead of stdout")
    v.add_argument("--no-timing", action="store_true", dest="no_timing",
                   help="report elapsed_ms as 0 so runs compare byte for byte")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="reduce a quintuple to (1,0,0)")
    r.add_argument("-q", "--quintuple", required=True, help="s1,s2,s3,s4,s5")
    r.add_argument("-n", type=int, required=True)
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--ambient", action="store_true", help="check kernel transport in ZD^3")
    r.set_defaults(func=cmd_reduce)

    i = sub.add_parser("info", help="print ranks and the boundary matrix")
    i.add_argument("-n", type=int, required=True)
    i.add_argument("--format", choices=("text", "json"), default="text")
    i.set_defaults(func=cmd_info)
    return p


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``-q -1,0,0,1,1`` through: argparse would read the value as an option."""
    out = []
    it = iter(range(len(argv)))
    skip = False
    for k in it:
        if skip:
            skip = False
            continue
        tok = argv[k]
        if tok in ("-q", "--quintuple") and k + 1 < len(argv) and argv[k + 1].startswith("-"):
            out.append(f"--quintuple={argv[k + 1]}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_negative_values(argv))
        if getattr(args, "n", None) is not None and isinstance(args.n, int) and args.n < 1:
            raise UsageError(f"n must be positive, got {args.n}")
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        return args.func(args)
    except UsageError as exc:
        print(f"omega3: error: {exc}", file=sys.stderr)
        return 2
    except Omega3Error as exc:
        print(f"omega3: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
