"""Command-line front end: fetch -> build -> analyze / compare -> report.

Each stage reads and writes plain files (NDJSON dump, Pajek graph, JSON
reports), so a long pipeline can resume at any stage. Reports are
deterministic for fixed inputs and seeds regardless of --workers; wall
clock per phase goes to stderr, never into the report files.

Exit codes: 0 success, 1 usage error, 2 fetch failure, 3 data/parse error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
import time
from typing import Optional

from . import __version__, pajek
from .fetch import FetchError, FetchJob, fetch_transactions, load_config, resolve_endpoint
from .metrics import SamplePlan, build_metrics_report, histogram_lines
from .nullmodel import small_world_compare
from .records import RecordSchemaError, build_graph, read_dump_lenient, write_dump

log = logging.getLogger("ledgergraph")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FETCH = 2
EXIT_DATA = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_when(text: str) -> int:
    """ISO-8601 UTC date or datetime -> unix seconds."""
    try:
        moment = _dt.datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"{text!r} is not an ISO-8601 date (e.g. 2020-09-01)"
        ) from None
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=_dt.timezone.utc)
    return int(moment.timestamp())


def _json_bytes(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sample", type=float, default=0.10,
                   help="node sample fraction for ASPL (default 0.10; 1.0 = exact)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--component", choices=["weak", "strong"], default="weak",
                   help="main component kind to measure (default weak)")
    p.add_argument("--undirected", action="store_true",
                   help="measure path lengths on the undirected projection")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads for shortest-path phases (default 1)")
    p.add_argument("--hubs", type=int, default=10,
                   help="how many top-degree hubs get a load centrality (default 10)")


def build_arg_parser() -> _Parser:
    parser = _Parser(prog="ledgergraph",
                     description="Transaction-graph retrieval and small-world analysis for "
                                 "distributed ledgers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download transactions into a normalized dump")
    p.add_argument("--ledger", required=True,
                   choices=["bitcoin", "dogecoin", "ethereum", "ethereum_internal", "ripple"])
    p.add_argument("--from", dest="start", required=True, type=_parse_when,
                   metavar="DATE", help="interval start (inclusive), ISO-8601 UTC")
    p.add_argument("--to", dest="end", required=True, type=_parse_when,
                   metavar="DATE", help="interval end (exclusive), ISO-8601 UTC")
    p.add_argument("--workers", type=int, default=1, help="concurrent fetchers (default 1)")
    p.add_argument("--out", required=True, help="dump file to write (NDJSON)")
    p.add_argument("--source", help="explorer base URL or local dump file")
    p.add_argument("--in", dest="source_file", metavar="FILE",
                   help="local dump file to re-window (same as --source with a path)")
    p.add_argument("--config", help="JSON config file with per-ledger url/key entries")
    p.add_argument("--page-size", type=int, default=100,
                   help="transactions per request for interval sources (max 100)")

    p = sub.add_parser("build", help="build a Pajek graph from a dump")
    p.add_argument("--in", dest="dump", required=True, help="normalized dump file")
    p.add_argument("--out", required=True, help="Pajek file to write")
    p.add_argument("--labels", action="store_true",
                   help="write address labels into the Pajek file (bigger output)")

    p = sub.add_parser("analyze", help="compute the metrics report for a Pajek graph")
    p.add_argument("--in", dest="graph", required=True, help="Pajek file")
    p.add_argument("--out", required=True, help="metrics report JSON to write")
    p.add_argument("--stats", help="ingestion stats JSON (carries the edge-reuse ratio)")
    _add_analysis_flags(p)

    p = sub.add_parser("compare", help="analyze plus a size-matched random-graph comparison")
    p.add_argument("--in", dest="graph", required=True, help="Pajek file")
    p.add_argument("--out", required=True, help="small-world report JSON to write")
    p.add_argument("--stats", help="ingestion stats JSON (carries the edge-reuse ratio)")
    _add_analysis_flags(p)

    p = sub.add_parser("report", help="pretty-print a metrics or comparison report")
    p.add_argument("--in", dest="report", required=True, help="report JSON file")
    return parser


# -- commands -----------------------------------------------------------------


def _dump_sort_key(record):
    return (record.timestamp, record.senders, record.recipients, record.tx_kind)


def cmd_fetch(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else None
    source = args.source or args.source_file
    api_key = None
    if source is None or source.startswith(("http://", "https://")):
        url, api_key = resolve_endpoint(args.ledger, override=source, config=config)
        source = url
    try:
        job = FetchJob(ledger=args.ledger, start=args.start, end=args.end,
                       source=source, workers=args.workers, page_size=args.page_size,
                       api_key=api_key)
    except ValueError as exc:
        print(f"ledgergraph fetch: {exc}", file=sys.stderr)
        return EXIT_USAGE

    t0 = time.perf_counter()
    try:
        result = fetch_transactions(job)
    except FetchError as exc:
        if exc.partial is not None and exc.partial.records:
            _write_dump_sorted(exc.partial.records, args.out)
            print(f"wrote {len(exc.partial.records)} records fetched before the failure",
                  file=sys.stderr)
        print(f"ledgergraph fetch: {exc}", file=sys.stderr)
        for rng in exc.failed_ranges:
            print(f"  failed: {rng}", file=sys.stderr)
        return EXIT_FETCH
    except OSError as exc:
        print(f"ledgergraph fetch: {exc}", file=sys.stderr)
        return EXIT_FETCH
    _write_dump_sorted(result.records, args.out)
    log.info("fetch phase took %.2fs", time.perf_counter() - t0)
    if result.skipped_payloads:
        log.warning("skipped %d malformed payload(s)", result.skipped_payloads)
    print(len(result.records))
    return EXIT_OK


def _write_dump_sorted(records, path: str) -> None:
    records = sorted(records, key=_dump_sort_key)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_dump(records, fh)


def cmd_build(args: argparse.Namespace) -> int:
    try:
        with open(args.dump, encoding="utf-8") as fh:
            records, skipped = read_dump_lenient(fh)
    except RecordSchemaError as exc:
        print(f"ledgergraph build: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"ledgergraph build: {exc}", file=sys.stderr)
        return EXIT_DATA
    t0 = time.perf_counter()
    graph, stats = build_graph(records, skipped_records=skipped)
    log.info("graph build took %.2fs", time.perf_counter() - t0)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        pajek.write_pajek(graph, fh, include_labels=args.labels)
    _write_text(args.out + ".stats.json", _json_bytes(stats.to_json_dict()))
    print(f"{stats.nodes} nodes, {stats.unique_arcs} arcs from {stats.transactions} "
          f"transactions ({stats.skipped_records} skipped lines)")
    return EXIT_OK


def _load_graph(path: str):
    with open(path, encoding="utf-8") as fh:
        return pajek.read_pajek(fh)


def _make_plan(args: argparse.Namespace) -> SamplePlan:
    return SamplePlan(
        fraction=args.sample,
        seed=args.seed,
        component="weak_main" if args.component == "weak" else "strong_main",
        treat_as_undirected=args.undirected,
    )


def _stats_edge_reuse(path: Optional[str]) -> Optional[float]:
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        stats = json.load(fh)
    value = stats.get("edge_reuse_ratio")
    return float(value) if value is not None else None


def _histogram_base(out_path: str) -> str:
    return out_path[:-5] if out_path.endswith(".json") else out_path


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        plan = _make_plan(args)
    except ValueError as exc:
        print(f"ledgergraph analyze: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        t0 = time.perf_counter()
        graph = _load_graph(args.graph)
        log.info("graph load took %.2fs", time.perf_counter() - t0)
        t0 = time.perf_counter()
        report = build_metrics_report(
            graph, plan, hub_count=args.hubs, workers=args.workers,
            edge_reuse_ratio=_stats_edge_reuse(args.stats),
        )
        log.info("metrics took %.2fs", time.perf_counter() - t0)
    except (pajek.PajekParseError, ValueError, OSError) as exc:
        print(f"ledgergraph analyze: {exc}", file=sys.stderr)
        return EXIT_DATA
    _write_text(args.out, _json_bytes(report.to_json_dict()))
    base = _histogram_base(args.out)
    hist = report.degree_histogram
    _write_text(base + ".degree_in.txt", histogram_lines(hist.in_degree))
    _write_text(base + ".degree_out.txt", histogram_lines(hist.out_degree))
    _write_text(base + ".degree_total.txt", histogram_lines(hist.total_degree))
    print(f"ACC {report.graph_acc:.6g}, main component ASPL {report.main_component_aspl:.6g}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    try:
        plan = _make_plan(args)
    except ValueError as exc:
        print(f"ledgergraph compare: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        t0 = time.perf_counter()
        graph = _load_graph(args.graph)
        log.info("graph load took %.2fs", time.perf_counter() - t0)
        report = small_world_compare(
            graph, plan, seed=args.seed, hub_count=args.hubs, workers=args.workers,
            edge_reuse_ratio=_stats_edge_reuse(args.stats),
        )
    except (pajek.PajekParseError, ValueError, OSError) as exc:
        print(f"ledgergraph compare: {exc}", file=sys.stderr)
        return EXIT_DATA
    for phase, seconds in (report.timings or {}).items():
        log.info("%s: %.2fs", phase, seconds)
    # timings stay out of the file so reports are byte-stable across runs
    _write_text(args.out, _json_bytes(report.to_json_dict(include_timings=False)))
    sigma = f"{report.sigma:.6g}" if report.sigma is not None else "undefined"
    print(f"sigma {sigma}")
    return EXIT_OK


def _format_metrics(doc: dict, indent: str = "") -> str:
    sizes = doc["component_sizes"]
    lines = [
        f"{indent}graph ACC            {doc['graph_acc']:.6g}",
        f"{indent}main component ASPL  {doc['main_component_aspl']:.6g}",
        f"{indent}main component ACC   {doc['main_component_acc']:.6g}",
        f"{indent}edge reuse ratio     {doc['edge_reuse_ratio']:.6g}",
        f"{indent}weak main size       {sizes['weak_main']['size']} "
        f"({sizes['weak_main']['fraction']:.1%} of {sizes['nodes']})",
        f"{indent}strong main size     {sizes['strong_main']['size']} "
        f"({sizes['strong_main']['fraction']:.1%})",
        f"{indent}sample               {doc['sample']['fraction']:.0%} of "
        f"{doc['sample']['component']}, seed {doc['sample']['seed']}, "
        f"{doc['sample']['pairs_used']} pairs",
        f"{indent}hubs (degree: load centrality)",
    ]
    for degree, load in doc["hub_load"]:
        lines.append(f"{indent}  {degree}: {load:.6g}")
    return "\n".join(lines)


def cmd_report(args: argparse.Namespace) -> int:
    try:
        with open(args.report, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"ledgergraph report: {exc}", file=sys.stderr)
        return EXIT_DATA
    if "sigma" in doc:
        print("real graph:")
        print(_format_metrics(doc["real"], "  "))
        if doc.get("random"):
            print("random graph:")
            print(_format_metrics(doc["random"], "  "))
        for name in ("acc_ratio", "aspl_ratio", "sigma"):
            value = doc.get(name)
            shown = f"{value:.6g}" if value is not None else \
                f"undefined ({doc.get('undefined', {}).get(name, 'n/a')})"
            print(f"{name:10s} {shown}")
    elif "graph_acc" in doc:
        print(_format_metrics(doc))
    else:
        print("ledgergraph report: unrecognized report document", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    handlers = {
        "fetch": cmd_fetch,
        "build": cmd_build,
        "analyze": cmd_analyze,
        "compare": cmd_compare,
        "report": cmd_report,
    }
    return handlers[args.command](args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
