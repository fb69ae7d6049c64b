"""Command-line entry point.

Exit codes: 0 on success, 1 on a domain error (with a machine-readable JSON
object on stderr), 2 on a usage error.  Output is deterministic: identical
inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .amplitudes import correlator_series, oracle_coefficient
from .errors import FeynhopfError
from .graphs import matchings_by_class
from .hopf import (Monomial, antipode_recursive, coproduct, element_to_json,
                   tensor_to_json)
from .ingest import load_json, parse_character, parse_model, parse_nesting
from .renorm import renorm_report
from .rgflow import rg_report
from .scalars import rational_to_string
from .wick import enumerate_pairings, moment_1d


def _emit(obj, stream) -> None:
    stream.write(json.dumps(obj, indent=2) + "\n")


def _parse_profile(text: str) -> dict:
    """--vertices 3:2,4:1 -> {3: 2, 4: 1}"""
    profile: dict = {}
    if not text:
        return profile
    for chunk in text.split(","):
        try:
            m, n = chunk.split(":")
            m, n = int(m), int(n)
        except ValueError:
            raise FeynhopfError(f"bad vertex profile entry {chunk!r}; "
                                "expected m:count")
        if m < 1 or n < 0 or m in profile:
            raise FeynhopfError(f"bad vertex profile entry {chunk!r}")
        if n:
            profile[m] = n
    return profile


def cmd_moments(args, out) -> int:
    out.write(rational_to_string(moment_1d(args.n)) + "\n")
    return 0


def cmd_pairings(args, out) -> int:
    pairings = enumerate_pairings(args.n)
    if args.list:
        _emit({"n": args.n, "count": len(pairings),
               "pairings": [[list(p) for p in pg.pairs] for pg in pairings]},
              out)
    else:
        out.write(f"{len(pairings)}\n")
    return 0


def cmd_graphs(args, out) -> int:
    profile = _parse_profile(args.vertices)
    classes = matchings_by_class(args.external, profile)
    rows = []
    for canon in sorted(classes):
        graph, count = classes[canon]
        if args.exclude_vacuum:
            ext = graph.external_vertex_set
            if any(not (set(c) & ext) for c in graph.components()):
                continue
        grading = graph.gradings()
        rows.append({
            "canonical": canon,
            "aut": graph.automorphism_order(),
            "matchings": count,
            "nu": grading.nu,
            "loops": grading.loops,
            "graph": graph.to_json(),
        })
    if args.dot:
        os.makedirs(args.dot, exist_ok=True)
        for i, row in enumerate(rows):
            graph, _ = classes[row["canonical"]]
            path = os.path.join(args.dot, f"graph_{i:03d}.dot")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(graph.to_dot())
    _emit({"external": args.external,
           "vertices": {str(m): n for m, n in sorted(profile.items())},
           "count": len(rows), "graphs": rows}, out)
    return 0


def cmd_correlator(args, out) -> int:
    model, warnings = parse_model(load_json(args.model))
    rows = []
    for sc in correlator_series(model, args.max_order):
        row = {"orders": {str(m): n for m, n in sc.multidegree},
               "value": rational_to_string(sc.value)}
        if args.oracle:
            oracle = oracle_coefficient(model, dict(sc.multidegree))
            row["oracle"] = rational_to_string(oracle)
            row["match"] = oracle == sc.value
        rows.append(row)
    doc = {"series": rows}
    if warnings:
        doc["warnings"] = warnings
    _emit(doc, out)
    return 0


def cmd_hopf(args, out) -> int:
    corpus = parse_nesting(load_json(args.nesting))
    gens = {}
    for gen in corpus.in_degree_order():
        mono = Monomial.of(gen)
        gens[gen.gid] = {
            "degree": gen.degree,
            "coproduct": tensor_to_json(coproduct(mono)),
            "antipode": element_to_json(antipode_recursive(mono)),
        }
    _emit({"generators": gens}, out)
    return 0


def cmd_renorm(args, out) -> int:
    corpus = parse_nesting(load_json(args.nesting))
    character = parse_character(load_json(args.character), corpus)
    _emit(renorm_report(character, corpus), out)
    return 0


def cmd_rg(args, out) -> int:
    corpus = parse_nesting(load_json(args.nesting))
    character = parse_character(load_json(args.character), corpus)
    _emit(rg_report(character, corpus, t_degree=args.t_degree), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feynhopf",
        description="Exact Feynman calculus: correlators, graphs, the graph "
                    "Hopf algebra, Birkhoff renormalization and RG flow.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="1D Gaussian moment <x^n>")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(fn=cmd_moments)

    p = sub.add_parser("pairings", help="perfect matchings of {1..n}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--list", action="store_true",
                   help="emit the pairings, not just the count")
    p.set_defaults(fn=cmd_pairings)

    p = sub.add_parser("graphs",
                       help="isomorphism classes of Feynman graphs")
    p.add_argument("--external", type=int, required=True,
                   help="number of labeled external vertices")
    p.add_argument("--vertices", default="",
                   help="internal profile, e.g. 3:2,4:1")
    p.add_argument("--dot", metavar="DIR",
                   help="write one DOT file per class into DIR")
    p.add_argument("--exclude-vacuum", action="store_true",
                   help="drop classes containing vacuum components")
    p.set_defaults(fn=cmd_graphs)

    p = sub.add_parser("correlator",
                       help="perturbative series of a correlator")
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--max-order", type=int, required=True,
                   help="bound on the total number of internal vertices")
    oracle = p.add_mutually_exclusive_group()
    oracle.add_argument("--oracle", dest="oracle", action="store_true",
                        default=True,
                        help="also evaluate the Wick oracle (default)")
    oracle.add_argument("--no-oracle", dest="oracle", action="store_false")
    p.set_defaults(fn=cmd_correlator)

    p = sub.add_parser("hopf", help="coproduct and antipode tables")
    p.add_argument("--nesting", required=True, help="nesting JSON path")
    p.set_defaults(fn=cmd_hopf)

    p = sub.add_parser("renorm",
                       help="BP counterterms and Birkhoff decomposition")
    p.add_argument("--character", required=True,
                   help="character JSON path, or - for stdin")
    p.add_argument("--nesting", required=True)
    p.set_defaults(fn=cmd_renorm)

    p = sub.add_parser("rg", help="renormalization-group flow and beta")
    p.add_argument("--character", required=True,
                   help="character JSON path, or - for stdin")
    p.add_argument("--nesting", required=True)
    p.add_argument("--t-degree", type=int, default=None,
                   help="highest power of t to report")
    p.set_defaults(fn=cmd_rg)

    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args, stdout)
    except FeynhopfError as exc:
        stderr.write(json.dumps({"error": exc.to_json()}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
