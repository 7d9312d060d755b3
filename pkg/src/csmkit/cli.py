"""``csmkit run`` and ``csmkit generate``."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .cases import CaseError, evaluate_raw, load_casefile, summary_line
from .generate import FAMILIES, generate

HARD = {"mismatch", "refused", "failed", "error"}


def _run(args) -> int:
    path = Path(args.casefile)
    try:
        cases = load_casefile(path)
    except CaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = [(c.id, c.kind, c.inputs, c.expect) for c in cases]
    if args.jobs > 1 and len(payload) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(evaluate_raw, payload))
    else:
        entries = [evaluate_raw(p) for p in payload]
    out = Path(args.json) if args.json else path.with_name(path.stem + ".report.jsonl")
    with out.open("w") as fh:
        for e in entries:
            fh.write(json.dumps(e, sort_keys=True) + "\n")
    for e in entries:
        print(summary_line(e))
    bad = sum(e["status"] in HARD for e in entries)
    print(f"{len(entries)} cases, {len(entries) - bad} ok, {bad} failing; report: {out}")
    return 1 if bad else 0


def _generate(args) -> int:
    try:
        doc = generate(args.family, args.n, args.seed, k=args.k, count=args.count)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(doc, indent=1) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="csmkit", description="Verify CSM-class identities on linear strata of P^n.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate a case file")
    r.add_argument("casefile")
    r.add_argument("--jobs", type=int, default=1, help="evaluate up to N cases in parallel")
    r.add_argument("--json", metavar="OUT", help="report path (default: <casefile>.report.jsonl)")
    r.set_defaults(func=_run)

    g = sub.add_parser("generate", help="write a seeded case file")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--k", type=int, default=2, help="hyperplanes per arrangement")
    g.add_argument("--count", type=int, default=5, help="number of instances")
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=_generate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
