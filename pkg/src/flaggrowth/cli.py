"""Command-line driver: ``flaggrowth <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 cell budget exceeded, 3 internal
inconsistency detected by one of the built-in cross-checks.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import __version__
from .chains import field_label, reduced_betti, reduced_betti_at
from .complexes import SimplicialComplex, builtin, dumps, is_flag, library, load
from .davis import build_davis, davis_betti, mv_check
from .linalg import SizeLimitError
from .nerve import coefficient_nerve_homology, collapse_report, nerve_subcomplex
from .salvetti import (DEFAULT_BUDGET, CoverSpec, InconsistencyError, build_cover_complex,
                       cover_betti, rational_betti_by_characters, torsion_rank_profile)

log = logging.getLogger("flaggrowth")

CACHE_ENV = "FLAGGROWTH_CACHE_DIR"
CSV_HEADER = ["complex", "index", "n", "field", "degree", "betti", "normalized", "target"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- caching -------------------------------------------------------------------

class ResultCache:
    """One JSON file per key; unreadable entries are treated as missing."""

    def __init__(self, root):
        self.root = Path(root) if root else None

    def key(self, kind: str, L: SimplicialComplex, **params) -> str:
        payload = json.dumps({"kind": kind, "complex": dumps(L), "version": __version__, **params},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def get(self, key):
        if self.root is None:
            return None
        path = self.root / f"{key}.json"
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            return None

    def put(self, key, value):
        if self.root is None:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(value, fh, sort_keys=True)
        os.replace(tmp, self.root / f"{key}.json")

    def betti(self, kind, L, spec, char, seed, compute):
        key = self.key(kind, L, spec=spec.describe() if spec else None,
                       exponents=list(spec.exponents) if spec else None, field=char, seed=seed)
        hit = self.get(key)
        if (isinstance(hit, dict) and hit.get("key") == key and isinstance(hit.get("value"), list)
                and all(isinstance(x, int) for x in hit["value"])):
            log.info("cache hit %s", key[:12])
            return hit["value"]
        value = [int(x) for x in compute()]
        self.put(key, {"key": key, "value": value})
        return value


# -- helpers -------------------------------------------------------------------

def load_complex(source: str) -> SimplicialComplex:
    if source.startswith("builtin:"):
        return builtin(source[len("builtin:"):])
    path = Path(source)
    if path.exists():
        return load(path)
    try:
        return builtin(source)
    except KeyError:
        raise UsageError(f"no such file or builtin complex: {source!r}") from None


def parse_field_tag(tag: str) -> int:
    t = tag.strip().lower()
    if t == "q":
        return 0
    if t.startswith("f:"):
        try:
            p = int(t[2:])
        except ValueError:
            raise UsageError(f"bad field tag {tag!r}") from None
        from sympy import isprime
        if not isprime(p):
            raise UsageError(f"{p} is not prime")
        return p
    raise UsageError(f"field must be 'q' or 'f:<prime>', got {tag!r}")


def parse_n(text: str, L: SimplicialComplex) -> list[CoverSpec]:
    """``2`` or ``1,2,3`` (uniform exponents) or ``a=2,b=3`` (one exponent per vertex)."""
    text = text.strip()
    try:
        if "=" in text:
            mapping = dict(item.split("=") for item in text.split(","))
            return [CoverSpec.of(L, {k.strip(): int(v) for k, v in mapping.items()})]
        ns = [int(x) for x in text.split(",") if x.strip()]
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad --n value {text!r}: {exc}") from None
    if not ns or min(ns) < 1:
        raise UsageError("--n needs exponents >= 1")
    return [CoverSpec.uniform(L, n) for n in ns]


def fmt_fraction(x: Fraction) -> str:
    return f"{x} ({float(x):.6f})"


def _table_rows(name, index, n, char, betti, target=None):
    rows = []
    for i, b in enumerate(betti):
        t = "" if target is None else str(target[i])
        rows.append([name, index, n, field_label(char), i, b, fmt_fraction(Fraction(b, index)), t])
    return rows


def emit(args, rows=None, payload=None):
    """Write CSV rows or a JSON payload to stdout."""
    out = sys.stdout
    if args.out == "json":
        if payload is None:
            payload = [dict(zip(CSV_HEADER, r)) for r in rows]
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    if rows is None:
        rows = _flatten(payload)
        header = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        out.write(buf.getvalue())
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    out.write(buf.getvalue())


def _flatten(payload):
    if isinstance(payload, list):
        return [{k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()}
                for r in payload]
    return _flatten([payload])


def _single_spec(args, L):
    specs = parse_n(args.n, L)
    if len(specs) != 1:
        raise UsageError("this subcommand takes a single exponent or mapping for --n")
    return specs[0]


# -- subcommands ---------------------------------------------------------------

def cmd_library(args, cache):
    rows = [{"name": k, "description": v} for k, v in library().items()]
    emit(args, payload=rows)


def cmd_betti(args, cache):
    L = load_complex(args.complex)
    char = parse_field_tag(args.field)
    betti = cache.betti("reduced", L, None, char, args.seed,
                        lambda: reduced_betti(L, char, args.seed))
    emit(args, _table_rows(L.name, 1, "", char, betti))


def _cover_betti_cached(cache, L, spec, char, seed, budget, complex_=None):
    def compute():
        return cover_betti(L, spec, char, seed, budget, complex_=complex_).betti
    return cache.betti("cover", L, spec, char, seed, compute)


def cmd_cover_scan(args, cache):
    L = load_complex(args.complex)
    char = parse_field_tag(args.field)
    rows = []
    target = [0] + reduced_betti(L, char, args.seed)
    for spec in parse_n(args.n, L):
        betti = _cover_betti_cached(cache, L, spec, char, args.seed, args.budget)
        rows += _table_rows(L.name, spec.order, spec.describe(), char, betti, target)
    emit(args, rows)


def cmd_torsion(args, cache):
    L = load_complex(args.complex)
    p = parse_field_tag(args.field)
    if p == 0:
        raise UsageError("torsion needs a prime field, e.g. --field f:2")
    spec = _single_spec(args, L)
    bq = _cover_betti_cached(cache, L, spec, 0, args.seed, args.budget)
    bp = _cover_betti_cached(cache, L, spec, p, args.seed, args.budget)
    t = _torsion_from(L, spec, p, args.seed, bq, bp)
    payload = {"complex": L.name, "n": spec.describe(), "index": spec.order, "p": p,
               "betti_Q": bq, f"betti_F_{p}": bp, "torsion_ranks": t}
    emit(args, payload=payload)


def _torsion_from(L, spec, p, seed, bq, bp):
    from .salvetti import BettiTable
    tq = BettiTable(L.name, spec.describe(), spec.order, "Q", bq)
    tp = BettiTable(L.name, spec.describe(), spec.order, field_label(p), bp)
    return torsion_rank_profile(L, spec, p, seed, tables=(tq, tp))


def cmd_nerve_check(args, cache):
    L = load_complex(args.complex)
    char = parse_field_tag(args.field)
    spec = _single_spec(args, L)
    nerve = nerve_subcomplex(L)
    dims = coefficient_nerve_homology(L, spec, char, args.seed, args.budget)
    report = collapse_report(L, spec, char, args.seed, args.budget)
    if args.out == "csv":
        emit(args, payload=report)
        return
    payload = {"complex": L.name, "n": spec.describe(), "field": field_label(char),
               "maximal_simplices": len(L.facets), "nerve_f_vector": list(nerve.f_vector),
               "coefficient_homology": dims,
               "expected": [reduced_betti_at(L, i - 1, char, args.seed) * spec.order
                            for i in range(len(dims))],
               "collapse": report}
    emit(args, payload=payload)


def cmd_davis(args, cache):
    L = load_complex(args.complex)
    char = parse_field_tag(args.field)

    def compute():
        return davis_betti(L, char, args.seed, args.budget).betti
    betti = cache.betti("davis", L, None, char, args.seed, compute)
    emit(args, _table_rows(L.name, 1 << len(L.vertices), "", char, betti))


def cmd_mv_check(args, cache):
    L = load_complex(args.complex)
    char = parse_field_tag(args.field)
    verts = [args.vertex] if args.vertex else list(L.vertices)
    if args.vertex and args.vertex not in L.vertices:
        raise UsageError(f"{args.vertex!r} is not a vertex of {L.name}")
    dc = build_davis(L, args.budget, seed=args.seed)
    reports = [mv_check(L, v, char, args.seed, args.budget, davis=dc).to_dict() for v in verts]
    emit(args, payload=reports)
    if not all(r["exact"] and r["surjective"] for r in reports):
        raise InconsistencyError("Mayer-Vietoris check failed")


def repro_rp2(seed: int = 0, budget: int = DEFAULT_BUDGET, cache=None) -> dict:
    """Flag RP^2, n = 2: Betti numbers over Q and F_2 and the 2-torsion profile."""
    cache = cache or ResultCache(None)
    L = builtin("rp2_flag")
    spec = CoverSpec.uniform(L, 2)
    cx = build_cover_complex(L, spec, budget)
    dd = cx.check_dd(seed)
    bq = _cover_betti_cached(cache, L, spec, 0, seed, budget, cx)
    b2 = _cover_betti_cached(cache, L, spec, 2, seed, budget, cx)
    chars = cache.betti("characters", L, spec, 0, seed,
                        lambda: rational_betti_by_characters(L, spec, seed))
    t = _torsion_from(L, spec, 2, seed, bq, b2)
    top = len(bq) - 1
    verdict = {
        "flag": is_flag(L),
        "boundary_squares_to_zero": dd,
        "rational_routes_agree": chars == bq,
        "b3_F2_exceeds_Q": b2[top] > bq[top],
        "t2_H3_zero": t[top] == 0,
        "t2_H2_equals_b3_excess": t[top - 1] == b2[top] - bq[top] and t[top - 1] > 0,
    }
    verdict["pass"] = all(verdict.values())
    return {
        "complex": L.name,
        "f_vector": list(L.f_vector),
        "n": 2,
        "index": spec.order,
        "seed": seed,
        "cells": cx.dims,
        "betti": {"Q": bq, "F_2": b2},
        "normalized": {"Q": [str(Fraction(b, spec.order)) for b in bq],
                       "F_2": [str(Fraction(b, spec.order)) for b in b2]},
        "reduced_betti_L": {"Q": reduced_betti(L, 0), "F_2": reduced_betti(L, 2)},
        "torsion_ranks_p2": t,
        "verdict": verdict,
    }


def cmd_repro(args, cache):
    if args.target != "rp2":
        raise UsageError(f"unknown reproduction {args.target!r}; available: rp2")
    result = repro_rp2(args.seed, args.budget, cache)
    sys.stdout.write(json.dumps(result, indent=2, sort_keys=True) + "\n")
    if not result["verdict"]["pass"]:
        raise InconsistencyError("rp2 verdict failed")


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for random primes (default 0)")
    common.add_argument("--threads", type=int, default=None, help="numba worker threads")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="max cells in one degree (default %(default)s)")
    common.add_argument("--out", choices=("csv", "json"), default="csv")
    common.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV),
                        help=f"result cache directory (default ${CACHE_ENV}, unset = no cache)")
    common.add_argument("-v", "--verbose", action="store_true")

    def with_complex(p, field="q", n=None):
        p.add_argument("--complex", required=True, help="builtin:NAME or path to a facet file")
        p.add_argument("--field", default=field, help="q or f:<prime>")
        if n is not None:
            p.add_argument("--n", default=n, help="exponent(s): 2 | 1,2,3 | a=2,b=3")

    parser = _Parser(prog="flaggrowth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("betti", parents=[common], help="reduced Betti numbers of a complex")
    with_complex(p)
    p.set_defaults(func=cmd_betti)
    p = sub.add_parser("cover-scan", parents=[common], help="normalized Betti numbers of covers")
    with_complex(p, n="1,2,3")
    p.set_defaults(func=cmd_cover_scan)
    p = sub.add_parser("torsion", parents=[common], help="p-torsion ranks of a cover")
    with_complex(p, field="f:2", n="2")
    p.set_defaults(func=cmd_torsion)
    p = sub.add_parser("nerve-check", parents=[common], help="nerve, coefficient identity, collapse report")
    with_complex(p, n="2")
    p.set_defaults(func=cmd_nerve_check)
    p = sub.add_parser("davis", parents=[common], help="Betti numbers of the Davis complex Y_L")
    with_complex(p)
    p.set_defaults(func=cmd_davis)
    p = sub.add_parser("mv-check", parents=[common], help="Mayer-Vietoris checks on Y_L")
    with_complex(p, field="f:2")
    p.add_argument("--vertex", default=None, help="vertex to remove (default: every vertex)")
    p.set_defaults(func=cmd_mv_check)
    p = sub.add_parser("library", parents=[common], help="list builtin complexes")
    p.set_defaults(func=cmd_library)
    p = sub.add_parser("repro", parents=[common], help="canned reproductions (rp2)")
    p.add_argument("target", help="rp2")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.budget <= 0:
            raise UsageError("--budget must be positive")
    except UsageError as exc:
        print(f"flaggrowth: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads:
        import numba
        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    cache = ResultCache(args.cache_dir)
    try:
        args.func(args, cache)
    except (UsageError, KeyError, ValueError) as exc:
        if isinstance(exc, SizeLimitError):
            print(f"flaggrowth: budget exceeded: {exc}", file=sys.stderr)
            return 2
        print(f"flaggrowth: {exc}", file=sys.stderr)
        return 1
    except InconsistencyError as exc:
        print(f"flaggrowth: inconsistency: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
