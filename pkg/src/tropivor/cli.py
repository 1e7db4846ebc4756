"""Command-line front end.

    tropivor <bisector|voronoi|classify|circumcenters|genpos|verify|bench|render>
             --input FILE [--algorithm A] [--seed N] [--samples N] [--svg FILE] [--parallel]

Input documents look like
    {"schema": "tropivor/1", "dimension": 2, "sites": [["0","0","0"], ["0","1","3"]], "seed": 42}
and every output document carries the same schema tag.  Rationals travel as
strings.  Exit codes: 0 success, 2 parse error, 3 precondition or
degeneracy, 4 verification failure, 1 anything unexpected.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from . import _kernel, bisect, oracle, render, sweep2d, voronoi
from .errors import ParseError, PreconditionError, TropivorError, VerificationError
from .serialize import rat_str, to_jsonable
from .trop_core import (
    SiteSet,
    TorusPoint,
    as_rational,
    bisected_ordered_partition,
    set_general_position,
    weak_general_position,
)

SCHEMA = "tropivor/1"
ALGORITHMS = ("standard", "incremental", "sweep")
EXIT_OK, EXIT_INTERNAL, EXIT_PARSE, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2, 3, 4


# ---------------------------------------------------------------- input documents


@dataclass
class InputDocument:
    dimension: int
    sites: list
    seed: Optional[int] = None
    flags: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj) -> "InputDocument":
        if not isinstance(obj, dict):
            raise ParseError("input document must be a JSON object")
        schema = obj.get("schema", SCHEMA)
        if schema != SCHEMA:
            raise ParseError("unsupported schema", schema)
        d = obj.get("dimension")
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise ParseError("dimension must be a positive integer", d)
        raw = obj.get("sites")
        if not isinstance(raw, list) or not raw:
            raise ParseError("sites must be a non-empty list")
        sites = []
        for k, s in enumerate(raw):
            if not isinstance(s, list) or len(s) != d + 1:
                raise ParseError(f"site {k} must list d+1 = {d + 1} coordinates", k, s)
            sites.append(TorusPoint(as_rational(c) for c in s))
        seed = obj.get("seed")
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
            raise ParseError("seed must be an integer", seed)
        flags = obj.get("flags", {})
        if not isinstance(flags, dict):
            raise ParseError("flags must be an object", flags)
        return cls(d, sites, seed, dict(flags))

    def to_json(self) -> dict:
        out = {
            "schema": SCHEMA,
            "dimension": self.dimension,
            "sites": [[rat_str(c) for c in s.coords] for s in self.sites],
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.flags:
            out["flags"] = dict(self.flags)
        return out

    def site_set(self) -> SiteSet:
        return SiteSet(self.sites)


def parse_document(text: str) -> InputDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("invalid JSON", str(e)) from None
    return InputDocument.from_json(obj)


def load_document(path: str) -> InputDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError("cannot read input", path, str(e)) from None
    return parse_document(text)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _out(kind: str, **body) -> dict:
    doc = {"schema": SCHEMA, "kind": kind}
    doc.update({k: to_jsonable(v) for k, v in body.items()})
    return doc


# ---------------------------------------------------------------- helpers


def _seed(args, doc: Optional[InputDocument]) -> int:
    if args.seed is not None:
        return args.seed
    if doc is not None and doc.seed is not None:
        return doc.seed
    return 0


def _degenerate(args, doc: Optional[InputDocument]) -> bool:
    return bool(args.allow_degenerate or (doc is not None and doc.flags.get("allow_degenerate")))


def _workers(args) -> int:
    return max(1, os.cpu_count() or 1) if args.parallel else 1


def _subset(S: SiteSet, text: Optional[str]) -> SiteSet:
    if not text:
        return S
    try:
        idx = [int(t) for t in text.split(",")]
    except ValueError:
        raise ParseError("--sites takes comma-separated indices", text) from None
    for i in idx:
        if not 0 <= i < len(S):
            raise PreconditionError("site index out of range", i, len(S))
    return SiteSet([S[i] for i in idx])


def build_diagram(S: SiteSet, algorithm: str, seed: int, allow_degenerate: bool):
    if algorithm == "standard":
        return voronoi.voronoi_standard(S, allow_degenerate=allow_degenerate)
    if algorithm == "incremental":
        return voronoi.voronoi_incremental(S, seed, allow_degenerate=allow_degenerate)
    if algorithm == "sweep":
        if S.dim != 2:
            raise PreconditionError("the sweep algorithm supports d = 2 only", S.dim)
        return sweep2d.sweep(S, allow_degenerate=allow_degenerate)
    raise PreconditionError("unknown algorithm", algorithm)


def _write_svg(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------- subcommands


def cmd_bisector(args) -> tuple[dict, int]:
    doc = load_document(args.input)
    S = _subset(doc.site_set(), args.sites)
    cells = bisect.bisector_k(S, allow_degenerate=_degenerate(args, doc))
    if args.svg:
        _write_svg(args.svg, render.render_bisector(S, cells))
    body = {
        "sites": S.to_json(),
        "empty": not cells,
        "cells": cells,
        "components": bisect.cell_components(cells) if cells else 0,
    }
    return _out("bisector", **body), EXIT_OK


def cmd_voronoi(args) -> tuple[dict, int]:
    doc = load_document(args.input)
    S = doc.site_set()
    D = build_diagram(S, args.algorithm, _seed(args, doc), _degenerate(args, doc))
    if args.svg:
        _write_svg(args.svg, render.render_diagram(S, D))
    body = {"algorithm": args.algorithm, "sites": S.to_json()}
    if args.algorithm == "sweep":
        body["dcel"] = D.to_json()
        body["events"] = {
            "site": D.stats.site_events,
            "circle": D.stats.circle_events,
            "piece": D.stats.piece_events,
        }
    else:
        body["diagram"] = D.to_json()
        body["cells"] = len(D.cells)
        if args.algorithm == "incremental":
            body["seed"] = _seed(args, doc)
    return _out("voronoi", **body), EXIT_OK


def _parse_vector(text: str) -> list:
    parts = [t for t in text.replace("(", "").replace(")", "").split(",") if t.strip()]
    if len(parts) < 2:
        raise ParseError("a vector needs at least two coordinates", text)
    return [as_rational(t.strip()) for t in parts]


def cmd_classify(args) -> tuple[dict, int]:
    if args.vector:
        v = _parse_vector(args.vector)
        if max(v) == min(v):
            raise PreconditionError("zero vector in the torus", args.vector)
        bop = bisected_ordered_partition(v)
        return _out("classify", vector=[rat_str(x) for x in v], bop=bop, maximal=bop.is_maximal()), EXIT_OK
    if not args.input:
        raise ParseError("classify needs --input or --vector")
    doc = load_document(args.input)
    S = doc.site_set()
    pairs = []
    for i, j in combinations(range(len(S)), 2):
        bop = bisect.bop_class(S[i], S[j])
        pairs.append({"pair": [i, j], "bop": bop.to_json(), "maximal": bop.is_maximal()})
    return _out("classify", pairs=pairs), EXIT_OK


def cmd_circumcenters(args) -> tuple[dict, int]:
    doc = load_document(args.input)
    S = _subset(doc.site_set(), args.sites)
    pts = bisect.circumcenters(S)
    brute = oracle.brute_circumcenters(S)
    if pts != brute:
        raise VerificationError("circumcenter paths disagree", pts, brute)
    radii = [rat_str(oracle.nearest_sites(x, S)[0]) for x in pts]
    return _out("circumcenters", sites=S.to_json(), points=pts, radii=radii, oracle_agrees=True), EXIT_OK


def _tied_coordinates(v: TorusPoint) -> list:
    c = v.coords
    return [[i + 1, j + 1] for i, j in combinations(range(len(c)), 2) if c[i] == c[j]]


def cmd_genpos(args) -> tuple[dict, int]:
    doc = load_document(args.input)
    S = doc.site_set()
    weak = weak_general_position(S)
    body: dict = {"sites": len(S), "weak": bool(weak)}
    if not weak:
        i, j = weak.witness
        ties = _tied_coordinates(S[i] - S[j])
        # planes x_p = x_q containing every site, the usual reason for failure
        common = [[p, q] for p, q in ties if len({s.coords[p - 1] - s.coords[q - 1] for s in S}) == 1]
        body["general"] = False
        body["witness"] = {
            "pair": [i, j],
            "tied_coordinates": ties,
            "common_planes": [f"x_{p} = x_{q}" for p, q in common],
        }
        return _out("genpos", **body), EXIT_OK
    if len(S) < 2:
        body["general"] = True
        return _out("genpos", **body), EXIT_OK
    chk = set_general_position(S)
    body["general"] = bool(chk)
    if not chk:
        idx, faces = chk.witness
        body["witness"] = {"sites": list(idx), "faces": [f.signs for f in faces]}
    return _out("genpos", **body), EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    doc = load_document(args.input)
    S = doc.site_set()
    seed = _seed(args, doc)
    D = build_diagram(S, args.algorithm, seed, _degenerate(args, doc))
    cfg = oracle.SampleConfig(seed=seed, count=args.samples)
    rep = oracle.verify_diagram(S, D, cfg, workers=_workers(args))
    body = {"algorithm": args.algorithm, "seed": seed, "report": rep.to_json()}
    return _out("verify", **body), (EXIT_OK if rep.passed else EXIT_VERIFY)


def _harmonic(n: int) -> float:
    return sum(1 / k for k in range(1, n + 1))


def _slope(ns, ts) -> Optional[float]:
    pts = [(math.log(n), math.log(t)) for n, t in zip(ns, ts) if t > 0]
    if len(pts) < 2:
        return None
    return statistics.linear_regression([p[0] for p in pts], [p[1] for p in pts]).slope


def cmd_bench(args) -> tuple[dict, int]:
    doc = load_document(args.input) if args.input else None
    d = args.dimension or (doc.dimension if doc else 2)
    seed = _seed(args, doc)
    try:
        sizes = [int(t) for t in args.sizes.split(",")]
    except ValueError:
        raise ParseError("--sizes takes comma-separated integers", args.sizes) from None
    algos = ALGORITHMS if args.algorithm == "all" else (args.algorithm,)
    algos = [a for a in algos if a != "sweep" or d == 2]
    rows = []
    for a in algos:
        ts = []
        for n in sizes:
            S = oracle.random_site_set(d, n, seed=seed + n)
            best = math.inf
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                build_diagram(S, a, seed, False)
                best = min(best, time.perf_counter() - t0)
            ts.append(best)
            row = {"algorithm": a, "n": n, "seconds": round(best, 6)}
            if a == "incremental":
                T = voronoi.build_tree(S, seed)
                depths = T.depths()
                row["mean_depth"] = round(statistics.fmean(depths), 4)
                row["depth_bound"] = round(d * (d + 1) * _harmonic(n), 4)
            rows.append(row)
        rows.append({"algorithm": a, "loglog_slope": None if (s := _slope(sizes, ts)) is None else round(s, 3)})
    return _out("bench", dimension=d, seed=seed, backend=_kernel.BACKEND, results=rows), EXIT_OK


def cmd_render(args) -> tuple[dict, int]:
    doc = load_document(args.input)
    S = doc.site_set()
    if S.dim != 2:
        raise PreconditionError("render needs d = 2", S.dim)
    if args.bisector:
        T = _subset(S, args.sites)
        text = render.render_bisector(T, bisect.bisector_k(T, allow_degenerate=_degenerate(args, doc)))
    else:
        D = build_diagram(S, args.algorithm, _seed(args, doc), _degenerate(args, doc))
        text = render.render_diagram(S, D)
    if args.svg:
        _write_svg(args.svg, text)
        return _out("render", svg=args.svg), EXIT_OK
    sys.stdout.write(text)
    return None, EXIT_OK


COMMANDS = {
    "bisector": cmd_bisector,
    "voronoi": cmd_voronoi,
    "classify": cmd_classify,
    "circumcenters": cmd_circumcenters,
    "genpos": cmd_genpos,
    "verify": cmd_verify,
    "bench": cmd_bench,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropivor", description="Tropical bisectors and Voronoi diagrams.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", "-i", help="input JSON document")
    p.add_argument("--output", "-o", help="write the JSON result here instead of stdout")
    p.add_argument("--algorithm", "-a", default="standard", choices=ALGORITHMS + ("all",))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=10_000, help="oracle samples for verify")
    p.add_argument("--svg", help="also write an SVG picture (d = 2)")
    p.add_argument("--parallel", action="store_true", help="use a process pool for oracle sampling")
    p.add_argument("--sites", help="comma-separated site indices (bisector, circumcenters, render)")
    p.add_argument("--vector", help="classify a raw vector such as 3,1,6,4,6,3,1")
    p.add_argument("--allow-degenerate", action="store_true", help="skip the weak general position check")
    p.add_argument("--bisector", action="store_true", help="render: draw the bisector of --sites")
    p.add_argument("--sizes", default="5,10,15", help="bench: site counts")
    p.add_argument("--repeats", type=int, default=1, help="bench: repetitions per size (best time kept)")
    p.add_argument("--dimension", type=int, default=None, help="bench: dimension without an input file")
    return p


def run(args) -> tuple[Optional[dict], int]:
    if args.command not in ("classify", "bench") and not args.input:
        raise ParseError(f"{args.command} needs --input")
    if args.algorithm == "all" and args.command != "bench":
        raise ParseError("--algorithm all is only meaningful for bench")
    return COMMANDS[args.command](args)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc, code = run(args)
    except TropivorError as e:
        sys.stderr.write(dumps({"schema": SCHEMA, "kind": "error", "error": e.to_dict()}))
        return e.exit_code
    except Exception as e:  # pragma: no cover - last resort
        sys.stderr.write(dumps({"schema": SCHEMA, "kind": "error",
                                "error": {"kind": "internal", "message": repr(e), "witnesses": []}}))
        return EXIT_INTERNAL
    if doc is not None:
        text = dumps(doc)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
