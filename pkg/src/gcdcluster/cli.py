"""Command-line frontend.

Subcommands expose the engine end to end: ``greedy`` prints partitions,
``verify`` runs the regularity sweep (JSONL to stdout, one object per checked
integer plus a summary), ``tables`` regenerates the threshold table and the
three-prime census, ``n0`` runs the irregularity search, and ``conflicts``
answers conflict-count and move-delta queries.

stdout carries only machine-readable output; progress goes to stderr.  Exit
codes: 0 success (all checks pass), 1 a verification anomaly was found, 2 a
resource guard refused the work, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import greedy as greedy_mod
from . import thresholds
from .errors import ResourceGuardError
from .partition import count_conflicts, canonical_partition, partition_to_csv
from .primes import (DEFAULT_SIEVE_LIMIT, PrimeTable, build_prime_table,
                     load_prime_cache, save_prime_cache)

EXIT_OK = 0
EXIT_ANOMALY = 1
EXIT_REFUSED = 2
EXIT_USAGE = 64

CACHE_ENV = "GCDCLUSTER_CACHE_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    start: int | None = None
    stop: int | None = None
    mode: str = "accelerated"
    fmt: str = "csv"
    out: str | None = None
    limit: int | None = None
    cache: str | None = None
    workers: int = 1
    guard: int | None = None
    which: str | None = None
    i: int | None = None
    j: int | None = None
    t: int | None = None
    force: bool = False
    long_run: bool = False
    p: int | None = None
    bound: int | None = None
    to_class: int | None = None


def _build_parser() -> _Parser:
    # SUPPRESS keeps a subcommand's copy of these flags from clobbering values
    # parsed before the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limit", type=int, default=argparse.SUPPRESS,
                        help="prime sieve limit (default: sized per command; "
                             f"flagship jobs want {DEFAULT_SIEVE_LIMIT})")
    common.add_argument("--seed-cache", dest="cache", default=argparse.SUPPRESS,
                        help="prime cache file to reuse/create "
                             f"(or set ${CACHE_ENV} for an auto-named cache)")
    parser = _Parser(prog="gcdcluster", parents=[common],
                     description="greedy gcd clustering of the integers, exactly")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    g = add_parser("greedy", help="run the greedy clustering, print the partition")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--mode", choices=("reference", "accelerated"), default="accelerated")
    g.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    g.add_argument("--out", default=None)
    g.add_argument("--guard", type=int, default=None,
                   help="override the reference-mode size guard")

    v = add_parser("verify", help="check canonical class selection over a range")
    v.add_argument("--from", dest="start", type=int, required=True)
    v.add_argument("--to", dest="stop", type=int, required=True)
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--out", default=None, help="JSONL path (default stdout)")

    t = add_parser("tables", help="emit the threshold table or the census")
    t.add_argument("--which", choices=("n1", "census"), required=True)
    t.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    t.add_argument("--i", type=int, default=None)
    t.add_argument("--j", type=int, default=None)
    t.add_argument("--t", type=int, default=None)
    t.add_argument("--p", type=int, default=None, help="census: single prime")
    t.add_argument("--bound", type=int, default=None, help="census: explicit bound")
    t.add_argument("--force", action="store_true",
                   help="allow indices beyond the verified range i <= 20")
    t.add_argument("--long-run", action="store_true",
                   help="census: include the slow p=67 row")

    n0 = add_parser("n0", help="search for the first irregular integer")
    n0.add_argument("--bound", type=int, default=2 * 10 ** 8)

    c = add_parser("conflicts", help="conflict counts and move deltas")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--guard", type=int, default=None)
    c.add_argument("--to-class", dest="to_class", type=int, default=None,
                   help="score moving n itself from its canonical class here "
                        "(tally-based, works at any scale)")
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for f in ("n", "start", "stop", "mode", "fmt", "out", "limit", "cache",
              "workers", "guard", "which", "i", "j", "t", "force", "long_run",
              "p", "bound", "to_class"):
        if hasattr(args, f):
            setattr(cfg, f, getattr(args, f))
    return cfg


def _get_table(limit: int, cache: str | None) -> PrimeTable:
    path = cache
    if path is None and os.environ.get(CACHE_ENV):
        path = os.path.join(os.environ[CACHE_ENV], "gcdcluster-primes.bin")
    if path and os.path.exists(path):
        try:
            table = load_prime_cache(path, limit=limit)
            print(f"loaded prime cache {path} (limit {limit})", file=sys.stderr)
            return table
        except Exception as exc:  # stale or undersized cache: rebuild
            print(f"cache {path} unusable ({exc}); rebuilding", file=sys.stderr)
    table = build_prime_table(limit)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        save_prime_cache(table, path)
        print(f"saved prime cache {path}", file=sys.stderr)
    return table


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w"), True


def cmd_greedy(cfg: RunConfig) -> int:
    if cfg.n < 2:
        print("greedy: --n must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    if cfg.mode == "reference":
        guard = cfg.guard if cfg.guard is not None else greedy_mod.DEFAULT_REFERENCE_GUARD
        state = greedy_mod.run_reference(cfg.n, guard=guard)
    else:
        table = _get_table(cfg.limit or max(cfg.n, 1000), cfg.cache)
        state = greedy_mod.run_accelerated(cfg.n, table)
    fh, close = _open_out(cfg.out)
    try:
        if cfg.fmt == "csv":
            fh.write(partition_to_csv(state.partition))
        else:
            classes: dict[int, list[int]] = {}
            for m in range(2, state.partition.n + 1):
                classes.setdefault(state.partition.label(m), []).append(m)
            fh.write(json.dumps({
                "n": state.partition.n,
                "mode": state.mode,
                "conflicts": state.conflicts,
                "anomalies": [list(a) for a in state.anomalies],
                "classes": {str(c): ms for c, ms in sorted(classes.items())},
            }) + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def _verify_chunk(chunk: tuple[int, int]) -> tuple[list[str], int, int, list]:
    start, stop = chunk
    table = _WORKER_TABLE
    lines: list[str] = []
    report = greedy_mod.verify_range(
        start, stop, table, collect_records=True)
    for rec in report.records:
        lines.append(rec.to_json())
    return lines, report.checked, report.auto_passed, report.anomalies


_WORKER_TABLE: PrimeTable | None = None


def _worker_init(limit: int, cache: str | None):
    global _WORKER_TABLE
    _WORKER_TABLE = _get_table(limit, cache)


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.start < 2 or cfg.stop < cfg.start:
        print(f"verify: bad range [{cfg.start}, {cfg.stop}]", file=sys.stderr)
        return EXIT_USAGE
    limit = cfg.limit or max(cfg.stop, 1000)
    fh, close = _open_out(cfg.out)
    try:
        if cfg.workers <= 1:
            table = _get_table(limit, cfg.cache)

            def progress(n, report):
                print(f"verify: at n={n}, {report.checked} checked, "
                      f"{len(report.anomalies)} anomalies", file=sys.stderr)

            report = greedy_mod.verify_range(cfg.start, cfg.stop, table,
                                             jsonl_fh=fh, progress=progress)
            anomalies = report.anomalies
        else:
            spans = _split_range(cfg.start, cfg.stop, cfg.workers * 8)
            checked = auto = 0
            anomalies = []
            with ProcessPoolExecutor(max_workers=cfg.workers,
                                     initializer=_worker_init,
                                     initargs=(limit, cfg.cache)) as pool:
                for lines, ck, ap, anom in pool.map(_verify_chunk, spans):
                    for line in lines:
                        fh.write(line + "\n")
                    checked += ck
                    auto += ap
                    anomalies.extend(anom)
            summary = greedy_mod.VerifyReport(cfg.start, cfg.stop, checked,
                                              auto, anomalies)
            fh.write(summary.summary_json() + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_ANOMALY if anomalies else EXIT_OK


def _split_range(start: int, stop: int, parts: int) -> list[tuple[int, int]]:
    width = max(1, (stop - start + 1) // parts)
    spans = []
    a = start
    while a <= stop:
        b = min(stop, a + width - 1)
        spans.append((a, b))
        a = b + 1
    return spans


def cmd_tables(cfg: RunConfig) -> int:
    table = _get_table(cfg.limit or 1_000_000, cfg.cache)
    if cfg.which == "n1":
        if cfg.i is not None:
            if cfg.i > 20 and not cfg.force:
                print("tables: i > 20 is outside the verified range "
                      "(pass --force to compute anyway)", file=sys.stderr)
                return EXIT_USAGE
            j = cfg.j if cfg.j is not None else cfg.i - 1
            if cfg.t is not None:
                records = [thresholds.n1_table(cfg.i, j, cfg.t, table)]
            else:
                records = [r for r in thresholds.table1_records(table) if r.i == cfg.i]
        else:
            records = thresholds.table1_records(table)
        if cfg.fmt == "csv":
            sys.stdout.write(thresholds.table1_csv(records, table))
        else:
            sys.stdout.write(json.dumps([r.__dict__ for r in records]) + "\n")
    else:
        if cfg.p is not None:
            if cfg.bound is not None:
                c = thresholds.census_three_factor(cfg.p, cfg.bound, table)
                rows = [{"p": c.p, "bound": c.bound, "count": c.count,
                         "reported": None, "residual": None}]
            else:
                rows = thresholds.census_report(table, ps=(cfg.p,))
        else:
            rows = thresholds.census_report(
                table, include_remark_prime=cfg.long_run)
        if cfg.fmt == "csv":
            lines = ["p,count"] + [f"{r['p']},{r['count']}" for r in rows]
            sys.stdout.write("\n".join(lines) + "\n")
        else:
            sys.stdout.write(json.dumps(rows) + "\n")
    return EXIT_OK


def cmd_n0(cfg: RunConfig) -> int:
    table = _get_table(cfg.limit or 1000, cfg.cache)
    value = thresholds.find_n0(cfg.bound, table)
    sys.stdout.write(json.dumps({
        "bound": cfg.bound,
        "found": value is not None,
        "value": value,
    }) + "\n")
    return EXIT_OK


def cmd_conflicts(cfg: RunConfig) -> int:
    from .counts import ClassTally, class_size, tally_even_class, tally_fast
    from .partition import conflict_delta_of_move
    from .primes import factorize

    table = _get_table(cfg.limit or max(cfg.n, 1000), cfg.cache)
    if cfg.to_class is None:
        part = canonical_partition(cfg.n, table)
        guard = cfg.guard if cfg.guard is not None else 100_000
        total = count_conflicts(part, guard=guard)
        sys.stdout.write(json.dumps({"n": cfg.n, "clustering": "canonical",
                                     "conflicts": total}) + "\n")
        return EXIT_OK
    n = cfg.n
    if n % 2 == 0:
        print("conflicts: move scoring is defined for odd n", file=sys.stderr)
        return EXIT_USAGE
    f = factorize(n, table)
    i = table.prime_index(f.distinct_primes[0])
    tallies = {1: tally_even_class(n, f)}
    for j in range(2, i):
        tallies[j] = tally_fast(j, n, f, table)
    tallies[i] = ClassTally(i, n, class_size(i, n - 1, table), 0)
    delta = conflict_delta_of_move(n, i, cfg.to_class, tallies)
    sys.stdout.write(json.dumps({"n": n, "from_class": i,
                                 "to_class": cfg.to_class, "delta": delta}) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from_args(args)
    handlers = {"greedy": cmd_greedy, "verify": cmd_verify, "tables": cmd_tables,
                "n0": cmd_n0, "conflicts": cmd_conflicts}
    try:
        return handlers[cfg.command](cfg)
    except ResourceGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
