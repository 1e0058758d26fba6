"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 input or structure error,
64 usage error.  JSON reports carry ``"schema": "1"`` and are written with
sorted keys so that output bytes depend only on inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from math import comb
from pathlib import Path
from typing import List, Optional, Sequence

from .errors import TokenGraphError
from .factor import cartesian_factorize, reconstruct_disconnected, search_distinct_k_collision
from .graph import Graph, is_c4_diamond_free, is_connected
from .graph6 import emit_graph6, parse_edge_list, parse_graph6_stream
from .iso import are_isomorphic
from .ladders import ladder_classes
from .oracle import generate_corpus, verify_p1_property, verify_reconstruction, verify_unique_reconstructibility
from .reconstruct import ReconstructionResult, reconstruct
from .star import recognize_star_token
from .token import build_token_graph, subset_sidecar

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_USAGE = 64
SCHEMA = "1"
CHECKS = ("roundtrip", "aut", "p1", "prime")

log = logging.getLogger("tokengraph")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_graph(path: str, fmt: str = "auto") -> Graph:
    text = Path(path).read_text()
    if fmt == "auto":
        fmt = "edges" if path.endswith((".edges", ".txt")) else "g6"
    if fmt == "edges":
        return parse_edge_list(text)
    graphs = list(parse_graph6_stream(text))
    if len(graphs) != 1:
        raise TokenGraphError(f"{path}: expected one graph, found {len(graphs)}")
    return graphs[0]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write_json(path: Optional[str], obj) -> None:
    text = _dump(obj)
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- subcommands

def cmd_token(args) -> int:
    g = _read_graph(args.input, args.format)
    tg = build_token_graph(g, args.k)
    out = emit_graph6(tg.graph) + "\n"
    if args.out:
        Path(args.out).write_text(out)
        sidecar = args.sidecar or args.out + ".jsonl"
        Path(sidecar).write_text(subset_sidecar(tg))
    else:
        sys.stdout.write(out)
        if args.sidecar:
            Path(args.sidecar).write_text(subset_sidecar(tg))
    return EXIT_OK


def audit_json(f: Graph, res: ReconstructionResult) -> dict:
    """Plain-data audit of a reconstruction run."""
    factors = []
    dec = res.decomposition
    for i, fc in enumerate(res.factors):
        factors.append({
            "index": i,
            "class": fc.class_id,
            "star_params": list(fc.star_params) if fc.star_params else None,
            "h_graph": emit_graph6(dec.factors[i]) if dec else None,
            "j_graph": emit_graph6(fc.j_graph),
            "psi": list(fc.psi),
            "psi_bar": list(fc.psi_bar),
            "l": fc.l,
            "l_bar": fc.l_bar,
        })
    labels = []
    forward, backward = [], []
    for lab in res.labels:
        i, j = lab.idx
        t = j if lab.source == i else i
        labels.append({
            "edge": list(lab.edge),
            "idx": [i, j],
            "endpoints": {str(c): v for c, v in sorted(lab.endpoints.items())},
            "source": lab.source,
        })
        forward.append([list(lab.edge), lab.source, t])
        backward.append([list(lab.edge), t, lab.source])
    return {
        "schema": SCHEMA,
        "input": emit_graph6(f),
        "h_vertices": list(dec.h_vertices) if dec else [],
        "pi": {str(v): list(p) for v, p in sorted(dec.pi.items())} if dec else {},
        "factors": factors,
        "cross_edges": labels,
        "d_partition": {"forward": forward, "backward": backward},
        "pipeline": res.audit,
        "j_forward": emit_graph6(res.j_forward),
        "j_backward": emit_graph6(res.j_backward),
        "swap": list(res.swap),
    }


def cmd_reconstruct(args) -> int:
    f = _read_graph(args.input, args.format)
    res = reconstruct(f, args.k)
    sys.stdout.write(emit_graph6(res.j_forward) + "\n")
    if args.out:
        Path(args.out).write_text(emit_graph6(res.j_forward) + "\n")
    if args.audit:
        Path(args.audit).write_text(_dump(audit_json(f, res)))
    status = EXIT_OK
    if args.k is not None and not verify_reconstruction(f, res, args.k):
        log.error("F_%d of the output is not isomorphic to the input", args.k)
        status = EXIT_VERIFY
    if args.expect:
        g = _read_graph(args.expect, args.format)
        if not are_isomorphic(res.j_forward, g):
            log.error("output is not isomorphic to the expected graph")
            status = EXIT_VERIFY
    return status


def cmd_reconstruct_disconnected(args) -> int:
    f = _read_graph(args.input, args.format)
    out = reconstruct_disconnected(f, args.n, args.k)
    report = {
        "schema": SCHEMA,
        "input": emit_graph6(f),
        "n": args.n,
        "k": args.k,
        "branch": out.branch,
        "components": [emit_graph6(c) for c in out.nontrivial_components],
        "isolated": out.isolated_count,
        "graph": emit_graph6(out.graph()),
    }
    _write_json(args.report, report)
    if args.report:
        sys.stdout.write(emit_graph6(out.graph()) + "\n")
    return EXIT_OK


def cmd_star_check(args) -> int:
    f = _read_graph(args.input, args.format)
    rec = recognize_star_token(f)
    report = {"schema": SCHEMA, "input": emit_graph6(f), "star": rec is not None}
    if rec is not None:
        params, lab = rec
        report.update({"n": params.n, "k": params.k, "labels": [sorted(s) for s in lab.subsets()]})
    _write_json(args.report, report)
    return EXIT_OK


def cmd_ladders(args) -> int:
    f = _read_graph(args.input, args.format)
    classes = ladder_classes(f)
    report = json.loads(classes.to_json())
    report["input"] = emit_graph6(f)
    report["count"] = len(classes)
    _write_json(args.report, report)
    return EXIT_OK


def cmd_factorize(args) -> int:
    g = _read_graph(args.input, args.format)
    fac = cartesian_factorize(g)
    report = {
        "schema": SCHEMA,
        "input": emit_graph6(g),
        "factors": [emit_graph6(h) for h in fac.factors],
        "coordinates": [list(c) for c in fac.coordinates],
        "prime": len(fac.factors) == 1,
    }
    _write_json(args.report, report)
    return EXIT_OK


def run_check(task) -> dict:
    """One sweep item: (graph6, k, check name)."""
    from .graph6 import parse_graph6

    code, k, check = task
    g = parse_graph6(code)
    row = {"graph": code, "n": g.n, "k": k, "check": check}
    try:
        if check == "roundtrip":
            f = build_token_graph(g, k).graph
            res = reconstruct(f)
            ok = are_isomorphic(res.j_forward, g) and is_c4_diamond_free(res.j_forward)
            row["output"] = emit_graph6(res.j_forward)
        elif check == "aut":
            ok = verify_unique_reconstructibility(g, k)
        elif check == "p1":
            ok = verify_p1_property(build_token_graph(g, k))
        elif check == "prime":
            ok = len(cartesian_factorize(build_token_graph(g, k).graph).factors) == 1
        else:
            raise ValueError(check)
    except TokenGraphError as exc:
        ok = False
        row["error"] = str(exc)
    row["ok"] = bool(ok)
    return row


def sweep_tasks(min_n: int, max_n: int, checks: Sequence[str]) -> List[tuple]:
    tasks = []
    for n in range(min_n, max_n + 1):
        for g in generate_corpus(n):
            code = emit_graph6(g)
            for check in checks:
                if check == "roundtrip":
                    ks = range(2, n // 2 + 1) if n >= 4 else range(0)
                elif check == "aut":
                    ks = range(1, n) if n >= 3 else range(0)
                else:
                    ks = range(1, n)
                tasks.extend((code, k, check) for k in ks)
    return tasks


def _parallel_map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [fn(x) for x in items]


def cmd_sweep(args) -> int:
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise UsageError(f"unknown checks: {', '.join(bad)}")
    tasks = sweep_tasks(args.min_n, args.max_n, checks)
    rows = _parallel_map(run_check, tasks, args.jobs)
    summary = {c: {"pass": 0, "fail": 0} for c in checks}
    for row in rows:
        summary[row["check"]]["pass" if row["ok"] else "fail"] += 1
    report = {"schema": SCHEMA, "min_n": args.min_n, "max_n": args.max_n, "checks": checks,
              "summary": summary, "results": rows}
    _write_json(args.report, report)
    failures = sum(s["fail"] for s in summary.values())
    for c in checks:
        log.info("%s: %d pass, %d fail", c, summary[c]["pass"], summary[c]["fail"])
    return EXIT_VERIFY if failures else EXIT_OK


def verify_collision(pair) -> bool:
    """Independent re-check of one emitted collision pair."""
    (g1, k1), (g2, k2) = pair
    if k1 == k2 or are_isomorphic(g1, g2):
        return False
    if is_connected(g1) or is_connected(g2):
        return False
    if not (is_c4_diamond_free(g1) and is_c4_diamond_free(g2)):
        return False
    if comb(g1.n, k1) != comb(g2.n, k2):
        return False
    return are_isomorphic(build_token_graph(g1, k1).graph, build_token_graph(g2, k2).graph)


def cmd_collision_search(args) -> int:
    pairs = search_distinct_k_collision(args.max_n, jobs=args.jobs, min_k=args.min_k)
    rows = []
    for pair in pairs:
        (g1, k1), (g2, k2) = pair
        rows.append({"g1": emit_graph6(g1), "k1": k1, "g2": emit_graph6(g2), "k2": k2,
                     "verified": verify_collision(pair)})
    report = {"schema": SCHEMA, "max_n": args.max_n, "min_k": args.min_k,
              "count": len(rows), "pairs": rows}
    _write_json(args.report, report)
    return EXIT_OK if all(r["verified"] for r in rows) else EXIT_VERIFY


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tokengraph", description="Token graph construction and reconstruction.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_input(sp, required=True):
        sp.add_argument("--input", required=required, help="graph6 file or edge list (.edges/.txt)")
        sp.add_argument("--format", choices=("auto", "g6", "edges"), default="auto")

    sp = sub.add_parser("token", help="build F_k(G)")
    graph_input(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--out", help="graph6 output path (default stdout)")
    sp.add_argument("--sidecar", help="JSON-lines vertex-to-subset map (default OUT.jsonl)")
    sp.set_defaults(func=cmd_token)

    sp = sub.add_parser("reconstruct", help="recover G from a connected token graph")
    graph_input(sp)
    sp.add_argument("--expect", help="graph the output must be isomorphic to")
    sp.add_argument("--k", type=int, help="token count, used for verification only")
    sp.add_argument("--out", help="graph6 output path")
    sp.add_argument("--audit", help="JSON audit output path")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("reconstruct-disconnected", help="recover G from a disconnected token graph")
    graph_input(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--report", help="JSON report path (default stdout)")
    sp.set_defaults(func=cmd_reconstruct_disconnected)

    sp = sub.add_parser("star-check", help="recognize token graphs of stars")
    graph_input(sp)
    sp.add_argument("--report", help="JSON report path (default stdout)")
    sp.set_defaults(func=cmd_star_check)

    sp = sub.add_parser("ladders", help="ladder classes of a graph")
    graph_input(sp)
    sp.add_argument("--report", help="JSON report path (default stdout)")
    sp.set_defaults(func=cmd_ladders)

    sp = sub.add_parser("factorize", help="Cartesian prime factorization")
    graph_input(sp)
    sp.add_argument("--report", help="JSON report path (default stdout)")
    sp.set_defaults(func=cmd_factorize)

    sp = sub.add_parser("sweep", help="run oracle checks over the corpus")
    sp.add_argument("--max-n", type=int, required=True)
    sp.add_argument("--min-n", type=int, default=3)
    sp.add_argument("--checks", default=",".join(CHECKS))
    sp.add_argument("--report", help="JSON report path (default stdout)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("collision-search", help="search distinct-k token graph collisions")
    sp.add_argument("--max-n", type=int, required=True)
    sp.add_argument("--min-k", type=int, default=1)
    sp.add_argument("--report", help="JSON report path (default stdout)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_collision_search)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"tokengraph: usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    if getattr(args, "jobs", 1) < 1:
        sys.stderr.write("tokengraph: usage error: --jobs must be >= 1\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"tokengraph: usage error: {exc}\n")
        return EXIT_USAGE
    except (TokenGraphError, OSError) as exc:
        sys.stderr.write(f"tokengraph: error: {exc}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
