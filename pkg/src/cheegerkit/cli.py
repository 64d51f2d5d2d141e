"""Command-line interface.

Every subcommand writes a JSON document (``schema_version``, the command,
the input hash) unless ``--format`` asks for CSV tables or human text.
Exit codes: 0 success, 1 verification failure, 2 usage error, 3 input error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from .complex import INF, Chain, complex_to_json, format_number, load_complex
from .errors import (
    CheegerKitError,
    ComplexError,
    DimensionError,
    EnumerationCapError,
    InfiniteCoverError,
    NotRationalHomologySphere,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3
THREADS_ENV = "CHEEGERKIT_THREADS"


class InputError(CheegerKitError):
    """Bad input file or parameters detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _norm(text: str):
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INF
    if t in ("1", "2"):
        return int(t)
    raise argparse.ArgumentTypeError(f"norm must be 1, 2 or inf, got {text}")


# -- input handling ------------------------------------------------------------------


def _add_source(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--input", "-i", help="complex JSON file")
    g.add_argument("--named", help="fixture name, e.g. rp2-6, lens(3,1), zn-presentation(5)")
    g.add_argument("--hypercube", type=_positive_int, metavar="DEG", help="hypercube of this degree")
    g.add_argument("--simplex-boundary", type=_positive_int, metavar="N", help="boundary of the N-simplex")
    g.add_argument("--random", nargs=4, metavar=("N", "DIM", "P", "SEED"), help="random complex")
    g.add_argument("--graph", nargs=3, metavar=("N", "EXTRA", "SEED"), help="random connected graph")
    p.add_argument("--skeleton", type=int, help="skeleton dimension for --hypercube (default: min(deg, 3))")
    p.add_argument("--unaugmented", action="store_true", help="do not augment the chain complex")


def _load(args):
    """(complex, provenance hash).  The hash is of the file bytes or of the generator call."""
    from . import constructors as C

    aug = not getattr(args, "unaugmented", False)
    if args.input:
        path = Path(args.input)
        if not path.is_file():
            raise InputError(f"{path}: no such file")
        data = path.read_bytes()
        X = load_complex(path)
        if not aug:
            X = X.with_augmentation(False)
        return X, hashlib.sha256(data).hexdigest()
    if args.named:
        X = C.named_complex(args.named, aug)
        key = f"named:{args.named}:{aug}"
    elif args.hypercube:
        k = args.skeleton if args.skeleton is not None else min(args.hypercube, 3)
        X = C.hypercube_skeleton(args.hypercube, k, aug)
        key = f"hypercube:{args.hypercube}:{k}:{aug}"
    elif args.simplex_boundary:
        X = C.simplex_boundary(args.simplex_boundary, aug)
        key = f"simplex-boundary:{args.simplex_boundary}:{aug}"
    elif args.random:
        n, dim, p, seed = args.random
        X = C.random_complex(int(n), int(dim), float(p), int(seed), aug)
        key = f"random:{n}:{dim}:{p}:{seed}:{aug}"
    else:
        n, extra, seed = args.graph
        X = C.random_connected_graph(int(n), float(extra), int(seed), aug)
        key = f"graph:{n}:{extra}:{seed}:{aug}"
    return X, hashlib.sha256(key.encode()).hexdigest()


def _envelope(command: str, input_hash: str | None, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "input_hash": input_hash, **body}


# -- output --------------------------------------------------------------------------


def _human(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_human(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(_human(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def _emit(args, doc: dict, table: list[dict] | None = None):
    fmt = getattr(args, "format", "json")
    if fmt == "csv":
        if table is None:
            raise InputError("this subcommand has no tabular output; use --format json")
        buf = io.StringIO()
        if table:
            w = csv.DictWriter(buf, fieldnames=list(table[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(table)
        text = buf.getvalue()
    elif fmt == "human":
        text = _human(doc) + "\n"
    else:
        text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------------


def cmd_generate(args) -> int:
    X, h = _load(args)
    doc = complex_to_json(X)
    doc["input_hash"] = h
    doc["counts"] = list(X.counts())
    _emit(args, doc)
    return EXIT_OK


def _cheeger_entry(X, i, args, coboundary=False):
    from .filling import cheeger, check_witness

    variant = args.variant
    if variant == "plain" and coboundary:
        variant = "coexact"
    t = time.perf_counter()
    v = cheeger(X, i, args.p, variant=variant, method=args.method, cap=args.cap, budget=args.budget,
                coboundary=coboundary, samples=args.samples, seed=args.seed)
    entry = v.to_json()
    entry["witness_verified"] = check_witness(X, v) if v.method in ("brute", "lp-enum") else None
    if args.timing:
        entry["runtime"] = round(time.perf_counter() - t, 6)
    return entry


def cmd_cheeger(args) -> int:
    from .filling import tilde_h2

    X, h = _load(args)
    if args.variant == "tilde":
        v = tilde_h2(X, args.p, method="heuristic" if args.method == "heuristic" else "brute",
                     budget=args.budget, samples=args.samples, seed=args.seed)
        body = {"complex": X.name, "value": v.to_json()}
    else:
        if args.variant == "coexact" and not args.coboundary:
            raise InputError("variant coexact needs --coboundary")
        body = {"complex": X.name, "value": _cheeger_entry(X, args.dim, args, args.coboundary)}
    _emit(args, _envelope("cheeger", h, body))
    return EXIT_OK


def _homology_summary(X) -> dict:
    from .homology import homology

    return {str(i): homology(X, i).to_json() for i in range(0, X.dims + 1)}


def _spectral_summary(X) -> dict:
    from .spectral import spectral_report

    return {str(i): spectral_report(X, i).to_json() for i in range(0, X.dims + 1)}


def cmd_analyze(args) -> int:
    from .filling import cheeger
    from .homology import diameter
    from .spectral import cheeger_l2_down

    X, h = _load(args)
    entries = {}
    for i in range(0, X.dims + 1):
        try:
            e = _cheeger_entry(X, i, args)
        except EnumerationCapError as exc:
            e = {"error": str(exc)}
        if args.p == 2 and "value" in e:
            s = cheeger_l2_down(X, i)
            e["spectral_value"] = format_number(s)
        entries[str(i)] = e
    body = {
        "complex": X.name,
        "counts": list(X.counts()),
        "homology": _homology_summary(X),
        "spectral": _spectral_summary(X),
        "cheeger": entries,
    }
    if X.dims >= 1 and X.augmented and X.size(0) > 1:
        try:
            body["diameter"] = diameter(X)
        except ComplexError:
            pass
    _emit(args, _envelope("analyze", h, body))
    return EXIT_OK


def _read_chain(args, X) -> Chain:
    if args.chain:
        path = Path(args.chain)
        if not path.is_file():
            raise InputError(f"{path}: no such file")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return Chain.from_json(data)
    if args.cells is None or args.dim is None:
        raise InputError("give --chain FILE or --dim with --cells i:c,...")
    coeffs = {}
    for part in args.cells.split(","):
        k, _, c = part.partition(":")
        coeffs[int(k)] = Fraction(c or "1")
    return Chain(args.dim, coeffs)


def cmd_fill(args) -> int:
    from .filling import min_cofilling, min_filling

    X, h = _load(args)
    alpha = _read_chain(args, X)
    fr = (min_cofilling if args.cofill else min_filling)(X, alpha, args.p)
    body = {"complex": X.name, "chain": alpha.to_json(), "cofill": args.cofill, "filling": fr.to_json()}
    _emit(args, _envelope("fill", h, body))
    return EXIT_OK if fr.feasible else EXIT_FAIL


def cmd_homology(args) -> int:
    X, h = _load(args)
    groups = _homology_summary(X)
    _emit(args, _envelope("homology", h, {"complex": X.name, "groups": groups}),
          [{"dim": int(k), "betti": v["betti"], "torsion": " ".join(map(str, v["torsion"])), "group": v["group"]}
           for k, v in groups.items()])
    return EXIT_OK


def cmd_cover(args) -> int:
    from .homology import diameter, torsdiameter_report, universal_abelian_cover

    X, h = _load(args)
    cov = universal_abelian_cover(X)
    checks = cov.check()
    body = {
        "base": X.name,
        "group": list(cov.group.factors),
        "order": cov.group.order,
        "checks": checks,
        "base_counts": list(X.counts()),
        "cover_counts": list(cov.total.counts()),
    }
    if args.diameter:
        rep = torsdiameter_report([X])
        body["diameter"] = rep.to_json()
    else:
        body["cover_diameter"] = diameter(cov.total)
    if args.emit_complex:
        body["cover"] = complex_to_json(cov.total)
    _emit(args, _envelope("cover", h, body))
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def _parse_link(args):
    from .surgery import FramedLink

    if args.matrix:
        # inline JSON matrix, or a file holding JSON or CSV
        text = args.matrix.strip()
        if not text.startswith(("[", "{")):
            path = Path(args.matrix)
            if not path.is_file():
                raise InputError(f"{path}: no such file")
            text = path.read_text()
        try:
            return FramedLink.from_text(text), hashlib.sha256(text.encode()).hexdigest()
        except (ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"{args.matrix}: {exc}") from exc
    name = args.link.strip().lower()
    key = hashlib.sha256(f"link:{name}".encode()).hexdigest()
    if name == "hopf":
        return FramedLink.hopf(), key
    if name.startswith("unknot"):
        _, _, f = name.partition(":")
        return FramedLink.unknot(int(f or 0)), key
    raise InputError(f"unknown link {args.link!r}; use hopf, unknot[:framing] or --matrix")


def cmd_surgery(args) -> int:
    from .surgery import meridian_contraction, min_dominant_slope, parse_q_range, torsion_growth_table

    link, h = _parse_link(args)
    body = {"Lk": [list(r) for r in link.Lk], "min_dominant_slope": min_dominant_slope(link)}
    table = None
    if args.q_range:
        rows = torsion_growth_table(link, parse_q_range(args.q_range))
        table = [{"q": r.q, "order": r.order if r.order is not None else "inf", "group": r.group,
                  "rational_homology_sphere": r.rhs} for r in rows]
        body["table"] = table
    if args.contract is not None:
        a = [Fraction(v) for v in args.contract.split(",")]
        q = args.q if args.q is not None else 2 * max(link.max_row_sum(), 1)
        body["contraction"] = meridian_contraction(link, q, a).to_json()
    _emit(args, _envelope("surgery", h, body), table)
    return EXIT_OK


def cmd_probe(args) -> int:
    from .homology import chain_contraction_probe

    X, h = _load(args)
    rep = chain_contraction_probe(X, args.p)
    _emit(args, _envelope("probe", h, rep.to_json()))
    return EXIT_OK if rep.telescoping_ok else EXIT_FAIL


def cmd_fibration(args) -> int:
    from .constructors import build_fibration
    from .fibration import leray_serre_check

    params = {"seed": args.seed}
    if args.nb:
        params["nb"] = args.nb
    if args.nf:
        params["nf"] = args.nf
    F = build_fibration(args.kind, **params)
    rep = leray_serre_check(F, args.p, cap=args.cap, method=args.method)
    h = hashlib.sha256(json.dumps({"kind": args.kind, **params}, sort_keys=True).encode()).hexdigest()
    _emit(args, _envelope("fibration", h, rep.to_json()))
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_hypercube(args) -> int:
    from .constructors import hypercube_skeleton
    from .transport import (
        HypercubeWord,
        hypercube_contract_word,
        hypercube_decompose,
        random_closed_word,
        verify_decomposition,
        verify_word_contraction,
    )

    deg = args.deg
    if args.action == "contract":
        if args.word:
            try:
                w = HypercubeWord.from_coordinates(deg, [int(c) for c in args.word.split(",")])
            except ValueError as exc:
                raise InputError(f"bad word: {exc}") from exc
        else:
            w = random_closed_word(deg, args.length, np.random.default_rng(args.seed))
        X = hypercube_skeleton(deg, 2)
        res = hypercube_contract_word(w, X)
        errs = verify_word_contraction(res, X)
        doc = res.to_json(full=args.full)
        doc["word"] = w.coordinates
        doc["verified"] = not errs
        doc["errors"] = errs
        key = f"contract:{deg}:{w.coordinates}"
    else:
        if deg < 3:
            raise InputError("the decomposition needs deg >= 3")
        X = hypercube_skeleton(deg, 3)
        if args.cell is not None:
            if not 0 <= args.cell < X.size(2):
                raise InputError(f"cell {args.cell} outside 0..{X.size(2) - 1}")
            c = Chain.unit(2, args.cell)
        else:
            rng = np.random.default_rng(args.seed)
            idx = rng.choice(X.size(2), size=min(args.support, X.size(2)), replace=False)
            c = Chain(2, {int(k): int(v) for k, v in zip(idx, rng.integers(1, 4, size=len(idx)) * rng.choice([-1, 1], size=len(idx)))})
        dec = hypercube_decompose(c, deg, Fraction(str(args.tol)), X)
        errs = verify_decomposition(dec)
        doc = dec.to_json(full=args.full)
        doc["verified"] = not errs
        doc["errors"] = errs
        key = f"decompose:{deg}:{sorted(c.coeffs.items())}"
    h = hashlib.sha256(key.encode()).hexdigest()
    _emit(args, _envelope(f"hypercube-{args.action}", h, doc))
    return EXIT_OK if not errs else EXIT_FAIL


def _run_check(cid: str):
    from .verify import CHECKS, run

    suite = CHECKS[cid][0]
    return run(suite, [cid])[0]


def cmd_verify(args) -> int:
    from .verify import CHECKS, run

    threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    if threads > 1:
        ids = [cid for cid, (s, _) in CHECKS.items() if args.suite == "all" or s == args.suite]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_check, ids))
    else:
        results = run(args.suite)
    ok = all(r.ok for r in results)
    checks = [r.to_json() for r in results]
    if not args.timing:
        # runtimes would make the report differ between identical runs
        checks = [{k: v for k, v in c.items() if k != "seconds"} for c in checks]
    doc = _envelope("verify", None, {
        "suite": args.suite,
        "passed": sum(r.ok for r in results),
        "failed": sum(not r.ok for r in results),
        "ok": ok,
        "checks": checks,
    })
    table = [{"id": r.id, "suite": r.suite, "ok": r.ok, "detail": r.detail} for r in results]
    _emit(args, doc, table)
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv", "human"), default="json")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.add_argument("--seed", type=int, default=0)


def _cheeger_opts(p: argparse.ArgumentParser):
    p.add_argument("--p", type=_norm, default=1, help="norm: 1, 2 or inf")
    p.add_argument("--variant", choices=("plain", "exact", "coexact", "tilde"), default="plain")
    p.add_argument("--method", choices=("brute", "lp-enum", "heuristic"), default="brute")
    p.add_argument("--cap", type=_positive_int, default=30, help="largest cell count for exact enumeration")
    p.add_argument("--budget", type=_positive_int, default=300_000, help="largest number of candidate LPs")
    p.add_argument("--samples", type=_positive_int, default=200, help="samples for the heuristic method")
    p.add_argument("--timing", action="store_true", help="include runtimes (output is then not reproducible)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cheegerkit", description="Exact Cheeger constants, fillings and homology of cell complexes.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="homology, spectra and Cheeger constants in every dimension")
    _add_source(p)
    _cheeger_opts(p)
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="re-run every invariant check")
    p.add_argument("--suite", default="all",
                   choices=("all", "complex", "spectral", "filling", "transport", "homology", "constructors", "surgery", "fibration", "cli"))
    p.add_argument("--timing", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="emit a complex as JSON")
    _add_source(p)
    _common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fill", help="minimal filling or cofilling of a chain")
    _add_source(p)
    p.add_argument("--chain", help="chain JSON file")
    p.add_argument("--dim", type=int, help="chain dimension when using --cells")
    p.add_argument("--cells", help="coefficients as index:value,...")
    p.add_argument("--cofill", action="store_true", help="solve d beta = alpha instead")
    p.add_argument("--p", type=_norm, default=1)
    _common(p)
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("cheeger", help="one Cheeger constant with its witness")
    _add_source(p)
    p.add_argument("--dim", type=int, default=0)
    p.add_argument("--coboundary", action="store_true", help="the coboundary constant h^i")
    _cheeger_opts(p)
    _common(p)
    p.set_defaults(func=cmd_cheeger)

    p = sub.add_parser("homology", help="integral homology groups")
    _add_source(p)
    _common(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("cover", help="universal abelian cover and its checks")
    _add_source(p)
    p.add_argument("--diameter", action="store_true", help="diameter ratio row")
    p.add_argument("--emit-complex", action="store_true", help="include the cover complex JSON")
    _common(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("surgery", help="homology of slope-q surgery on a framed link")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help="linking matrix: inline JSON, or a JSON or CSV file")
    g.add_argument("--link", help="hopf or unknot[:framing]")
    p.add_argument("--q-range", help="slopes a:b inclusive")
    p.add_argument("--contract", help="meridian vector a_1,...,a_n to contract")
    p.add_argument("--q", type=int, help="slope for --contract (default 2 * max row sum)")
    _common(p)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("probe", help="chain contraction probe on a closed 3-complex")
    _add_source(p)
    p.add_argument("--p", type=_norm, default=1)
    _common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("fibration", help="compare Cheeger constants along a graph fibration")
    p.add_argument("kind", choices=("prism", "identity", "point", "product"))
    p.add_argument("--nb", type=_positive_int, help="base size for product fibrations")
    p.add_argument("--nf", type=_positive_int, help="fiber size for product fibrations")
    p.add_argument("--p", type=_norm, default=1)
    p.add_argument("--cap", type=_positive_int, default=80)
    p.add_argument("--method", choices=("auto", "brute", "lp-enum"), default="auto")
    _common(p)
    p.set_defaults(func=cmd_fibration)

    p = sub.add_parser("hypercube", help="hypercube word contraction and Laplacian decomposition")
    p.add_argument("action", choices=("contract", "decompose"))
    p.add_argument("--deg", type=_positive_int, required=True)
    p.add_argument("--word", help="comma-separated coordinates of a closed walk")
    p.add_argument("--length", type=_positive_int, default=20, help="random word length")
    p.add_argument("--cell", type=int, help="decompose this unit 2-cell")
    p.add_argument("--support", type=_positive_int, default=6, help="support size of a random 2-chain")
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    p.add_argument("--full", action="store_true", help="include chains and certificate steps")
    _common(p)
    p.set_defaults(func=cmd_hypercube)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ComplexError, DimensionError, InfiniteCoverError, NotRationalHomologySphere,
            FileNotFoundError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT


def run_to_string(argv) -> str:
    """Run a subcommand in-process and return what it printed."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        main(list(argv))
    return buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
