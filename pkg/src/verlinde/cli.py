"""Command-line front end: characters, verification suites, graph listings.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 unsupported product.  Every failure path prints a single diagnostic line
with a machine-parsable ``error[...]`` prefix on stderr.  Output is
deterministic: rerunning a command, with any worker count, is
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from .cohft import verlinde_chern_character
from .errors import InvalidInputError, UnsupportedProductError
from .fusion import (
    FusionDatum,
    builtin_sl2,
    builtin_slr_level1,
    format_fraction,
    load_fusion_datum,
)
from .graphs import (
    automorphism_order,
    classify_locus,
    enumerate_stable_graphs,
    graph_to_json,
)
from .tautology import TautClass, tautclass_to_json
from .verify import run_suite

_LOCI = ("full", "smooth", "rational_tails", "compact_type")


class _Parser(argparse.ArgumentParser):
    # argparse normally prints usage and exits 2 on its own; route the
    # message through the shared single-line diagnostic path instead
    def error(self, message: str):
        raise InvalidInputError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs of a character evaluation."""

    algebra: str
    level: int | None
    rank_r: int | None
    datum_path: str | None
    g: int
    n: int
    labels_raw: str | None
    max_degree: int
    locus: str
    fmt: str
    zero_lambda_genus0: bool
    threads: int

    def validate(self) -> None:
        if self.g < 0 or self.n < 0:
            raise InvalidInputError("genus and marking count must be nonnegative")
        if 2 * self.g - 2 + self.n <= 0:
            raise InvalidInputError(
                f"(g, n) = ({self.g}, {self.n}) is unstable: need 2g - 2 + n > 0"
            )
        if self.max_degree < 0:
            raise InvalidInputError("max degree must be nonnegative")
        if self.locus not in _LOCI:
            raise InvalidInputError(f"locus must be one of {', '.join(_LOCI)}")
        if self.threads < 1:
            raise InvalidInputError("threads must be at least 1")

    def build_datum(self) -> FusionDatum:
        if self.algebra == "sl2":
            if self.level is None:
                raise InvalidInputError("--algebra sl2 requires --level")
            return builtin_sl2(self.level)
        if self.algebra == "slr1":
            if self.rank_r is None:
                raise InvalidInputError("--algebra slr1 requires --rank")
            return builtin_slr_level1(self.rank_r)
        if self.algebra == "file":
            if not self.datum_path:
                raise InvalidInputError("--algebra file requires --datum <path>")
            try:
                with open(self.datum_path, "r", encoding="utf-8") as handle:
                    text = handle.read()
            except OSError as exc:
                raise InvalidInputError(f"cannot read datum file: {exc}") from exc
            return load_fusion_datum(text)
        raise InvalidInputError(f"unknown algebra {self.algebra!r}")

    def parse_labels(self, datum: FusionDatum):
        text = (self.labels_raw or "").strip()
        parts = [p.strip() for p in text.split(",") if p.strip()] if text else []
        if len(parts) != self.n:
            raise InvalidInputError(f"expected {self.n} labels, got {len(parts)}")
        numeric = all(isinstance(m, int) for m in datum.labels)
        labels = []
        for part in parts:
            if numeric:
                try:
                    labels.append(int(part))
                except ValueError:
                    raise InvalidInputError(
                        f"label {part!r} is not an integer"
                    ) from None
            else:
                labels.append(part)
        for label in labels:
            datum.index(label)
        return tuple(labels)


def _render_class(cls: TautClass, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(tautclass_to_json(cls), indent=2, sort_keys=True) + "\n"
    lines = [
        f"g={cls.g} n={cls.n} truncation={cls.truncation} terms={len(cls.terms)}"
    ]
    for lam, dec, coeff in cls.sorted_terms():
        graph = dec.graph
        verts = " ".join(
            f"v{v}:g{graph.genera[v]}[{','.join(map(str, graph.markings_at(v)))}]"
            for v in range(graph.num_vertices)
        )
        edges = ",".join(f"{a}-{b}" for a, b in graph.edges) or "-"
        hpsi = ",".join(f"({x},{y})" for x, y in dec.hpsi) or "-"
        lpsi = ",".join(map(str, dec.lpsi)) or "-"
        lines.append(
            f"deg={lam + dec.degree} lambda={lam} coeff={format_fraction(coeff)} "
            f"vertices({verts}) edges({edges}) hpsi({hpsi}) lpsi({lpsi})"
        )
    return "\n".join(lines) + "\n"


def cmd_ch(args: argparse.Namespace) -> int:
    config = RunConfig(
        algebra=args.algebra,
        level=args.level,
        rank_r=args.rank,
        datum_path=args.datum,
        g=args.genus,
        n=args.n,
        labels_raw=args.labels,
        max_degree=args.max_degree,
        locus=args.locus,
        fmt=args.format,
        zero_lambda_genus0=args.zero_lambda_genus0,
        threads=args.threads,
    )
    config.validate()
    datum = config.build_datum()
    labels = config.parse_labels(datum)
    cls = verlinde_chern_character(
        datum,
        config.g,
        config.n,
        labels,
        config.max_degree,
        zero_lambda_genus0=config.zero_lambda_genus0,
        threads=config.threads,
    )
    if config.locus != "full":
        cls = cls.restrict(config.locus)
    sys.stdout.write(_render_class(cls, config.fmt))
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    checks = run_suite(args.suite)
    failures = 0
    for check in checks:
        status = "pass" if check.passed else "fail"
        failures += 0 if check.passed else 1
        print(f"[{status}] {check.name}: expected {check.expected}; got {check.actual}")
    print(f"{len(checks) - failures} of {len(checks)} checks passed")
    if failures:
        print(
            f"error[verification-failed]: {failures} of {len(checks)} checks failed",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_graphs(args: argparse.Namespace) -> int:
    if args.max_edges < 0:
        raise InvalidInputError("max edges must be nonnegative")
    graphs = enumerate_stable_graphs(args.genus, args.n, args.max_edges)
    if args.format == "json":
        body = {
            "g": args.genus,
            "n": args.n,
            "max_edges": args.max_edges,
            "graphs": [
                {
                    "graph": graph_to_json(graph),
                    "automorphisms": automorphism_order(graph),
                    "locus": classify_locus(graph, args.genus),
                }
                for graph in graphs
            ],
        }
        sys.stdout.write(json.dumps(body, indent=2, sort_keys=True) + "\n")
        return 0
    print(f"stable graphs of (g,n)=({args.genus},{args.n}) with <= {args.max_edges} edges: {len(graphs)}")
    for i, graph in enumerate(graphs):
        verts = " ".join(
            f"v{v}:g{graph.genera[v]}[{','.join(map(str, graph.markings_at(v)))}]"
            for v in range(graph.num_vertices)
        )
        edges = ",".join(f"{a}-{b}" for a, b in graph.edges) or "-"
        print(
            f"#{i} vertices({verts}) edges({edges}) "
            f"aut={automorphism_order(graph)} locus={classify_locus(graph, args.genus)}"
        )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="verlinde",
        description=(
            "Exact Chern characters of Verlinde bundles as decorated "
            "stable-graph sums."
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="{ch,verify,graphs}")

    default_threads = os.cpu_count() or 1

    ch = sub.add_parser("ch", help="evaluate a total Chern character")
    ch.add_argument("--algebra", required=True, choices=("sl2", "slr1", "file"))
    ch.add_argument("--level", type=int, help="level for --algebra sl2")
    ch.add_argument("--rank", type=int, help="r for --algebra slr1")
    ch.add_argument("--datum", help="JSON fusion-datum path for --algebra file")
    ch.add_argument("--genus", type=int, required=True)
    ch.add_argument("-n", type=int, required=True, help="number of markings")
    ch.add_argument("--labels", help="comma-separated labels, one per marking")
    ch.add_argument("--max-degree", type=int, required=True)
    ch.add_argument("--locus", default="full", choices=_LOCI)
    ch.add_argument("--format", default="json", choices=("json", "text"))
    ch.add_argument(
        "--zero-lambda-genus0",
        action="store_true",
        help="drop positive lambda powers when the genus is 0",
    )
    ch.add_argument("--threads", type=int, default=default_threads)
    ch.set_defaults(func=cmd_ch)

    verify = sub.add_parser("verify", help="run the built-in verification suites")
    verify.add_argument(
        "--suite",
        default="all",
        choices=("all", "ranks", "symplectic", "graphs", "slope", "closedform", "twoloop"),
    )
    verify.set_defaults(func=cmd_verify)

    graphs = sub.add_parser("graphs", help="list stable graphs with |Aut| and locus")
    graphs.add_argument("--genus", type=int, required=True)
    graphs.add_argument("-n", type=int, required=True, help="number of markings")
    graphs.add_argument("--max-edges", type=int, required=True)
    graphs.add_argument("--format", default="json", choices=("json", "text"))
    graphs.set_defaults(func=cmd_graphs)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            raise InvalidInputError("a subcommand is required: ch, verify or graphs")
        return args.func(args)
    except UnsupportedProductError as exc:
        print(f"error[unsupported-product]: {exc}", file=sys.stderr)
        return 3
    except InvalidInputError as exc:
        print(f"error[invalid-input]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
