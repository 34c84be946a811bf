"""Command line front end: ``extremal verify | export | search``.

Certificates go to stdout as JSON lines, one per check, followed by a
summary object.  Exit status: 0 when every check passes, 1 on usage errors
(bad flags, refused long runs, unreadable checkpoints), 2 when a check
fails or the surface cannot be built.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

from . import __version__
from .checks import SUITES, run_suite
from .gf import build_field
from .surface import NonHermitianError, SingularSurfaceError, Surface, build_surface

log = logging.getLogger("extremal")

FORMAT_VERSION = 1


class UsageError(Exception):
    pass


def _header(x: Surface) -> dict:
    return {"tool": "extremal", "version": __version__, "format": FORMAT_VERSION,
            "field": x.F.describe(), "model": x.model}


def _load_matrix(F, path: str):
    from .forms import loads

    with open(path) as fh:
        return loads(F, fh.read())


def _surface(args) -> Surface:
    try:
        F = build_field(args.p, args.e)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.model == "custom":
        if not args.matrix:
            raise UsageError("--model custom needs --matrix FILE")
        try:
            f = _load_matrix(F, args.matrix)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read matrix: {exc}") from exc
        return build_surface(F, f)
    return build_surface(F, args.model)


def _emit(out, obj):
    out.write(json.dumps(obj, sort_keys=True, default=_jsonable) + "\n")
    out.flush()


def _jsonable(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    return str(o)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, out) -> int:
    x = _surface(args)
    suites = SUITES if args.suite == "all" else (args.suite,)
    head = _header(x)
    t0 = time.perf_counter()
    failed = []
    n = 0
    for suite in suites:
        for c, secs in run_suite(x, suite):
            n += 1
            cert = dict(head, suite=suite, check=c.name,
                        expected={"formula": c.formula, "value": c.expected},
                        observed=c.observed, passed=c.passed, seconds=round(secs, 4))
            if c.witness is not None:
                cert["witness"] = c.witness
            _emit(out, cert)
            if not c.passed:
                failed.append(c.name)
    _emit(out, dict(head, summary=True, suites=list(suites), checks=n, failed=failed,
                    passed=not failed, seconds=round(time.perf_counter() - t0, 3)))
    return 0 if not failed else 2


# ---------------------------------------------------------------------------
# export


def _matrix_csv(M) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in M:
        w.writerow([int(v) for v in row])
    return buf.getvalue()


def export_text(x: Surface, what: str, fmt: str) -> str:
    """Deterministic export of one object family."""
    from . import proj

    if what == "points":
        if fmt == "csv":
            return proj.points_csv(x.points)
        return json.dumps([list(p.coords) for p in x.points], separators=(",", ":"))
    if what == "lines":
        if fmt == "csv":
            return proj.lines_csv(x.lines)
        return json.dumps([[list(r) for r in l.basis] for l in x.lines], separators=(",", ":"))
    if what == "incidence":
        M = x.incidence.astype(int)
        if fmt == "csv":
            return _matrix_csv(M)
        return json.dumps(M.tolist(), separators=(",", ":"))
    if what == "chords":
        from .chords import chord_table, chords_csv

        if fmt == "csv":
            return chords_csv(x)
        tab = chord_table(x)
        return json.dumps([{"line": [list(r) for r in c.line.basis], "star_points": list(c.star_points),
                            "dual": int(tab.dual[i])} for i, c in enumerate(tab.chords)], separators=(",", ":"))
    if what == "configs":
        from .quadrics import config_table, configs_json

        if fmt == "json":
            return configs_json(x)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "quadric", "ruling_L", "ruling_M"])
        for i, c in enumerate(config_table(x).configs):
            w.writerow([i, " ".join(map(str, c.quadric.coeffs)), " ".join(map(str, c.ruling_L)),
                        " ".join(map(str, c.ruling_M))])
        return buf.getvalue()
    if what == "doubles":
        from .doubles import SearchGuardError, decompose, doubles_json, search_doubles

        try:
            found = search_doubles(x, "exhaustive")
        except SearchGuardError as exc:
            raise UsageError(str(exc)) from exc
        if fmt == "json":
            return doubles_json(x, found)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "setA", "setB", "decompositions"])
        for i, dd in enumerate(sorted(found, key=lambda t: (t.setA, t.setB))):
            w.writerow([i, " ".join(map(str, dd.setA)), " ".join(map(str, dd.setB)), len(decompose(x, dd))])
        return buf.getvalue()
    raise UsageError(f"unknown export {what!r}")


def cmd_export(args, out) -> int:
    x = _surface(args)
    text = export_text(x, args.what, args.format)
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


# ---------------------------------------------------------------------------
# search


def cmd_search(args, out) -> int:
    from .doubles import CorruptCheckpoint, SearchGuardError, chord_pairs, decompose, search_doubles

    if not args.doubles:
        raise UsageError("search needs --doubles")
    x = _surface(args)
    head = _header(x)
    mode = "chord_pairs_only" if args.mode == "chord-pairs" else "exhaustive"
    checkpoint = args.resume or args.checkpoint
    t0 = time.perf_counter()

    def progress(line, n_line, n_total):
        log.info("root line %d: %d doubles (running total %d)", line, n_line, n_total)

    try:
        found = search_doubles(x, mode, long_running=args.long_running, checkpoint=checkpoint,
                               threads=args.threads, progress=progress)
    except SearchGuardError as exc:
        raise UsageError(str(exc)) from exc
    except CorruptCheckpoint as exc:
        raise UsageError(str(exc)) from exc
    summary = dict(head, summary=True, mode=args.mode, doubles=len(found))
    if mode == "chord_pairs_only":
        summary["chord_pairs"] = len(chord_pairs(x))
        summary["expected"] = {"formula": "1/16(q^3+1)(q^2+1)(q-1)^2q^7",
                               "value": (x.q**3 + 1) * (x.q**2 + 1) * (x.q - 1) ** 2 * x.q**7 // 16}
    undecomposed = [dd.to_json() for dd in sorted(found, key=lambda t: (t.setA, t.setB)) if not decompose(x, dd)]
    summary["undecomposed"] = len(undecomposed)
    summary["conjecture"] = "all decomposed" if not undecomposed else "counterexample found"
    if undecomposed:
        summary["counterexamples"] = undecomposed[:10]
    summary["seconds"] = round(time.perf_counter() - t0, 3)
    if args.out:
        from .doubles import doubles_json

        with open(args.out, "w") as fh:
            fh.write(doubles_json(x, found) + "\n")
    _emit(out, summary)
    return 0 if not undecomposed else 2


# ---------------------------------------------------------------------------


def _add_surface_args(sp):
    sp.add_argument("--p", type=int, default=2, help="characteristic")
    sp.add_argument("--e", type=int, default=1, help="q = p^e")
    sp.add_argument("--model", default="fermat", choices=("fermat", "antidiagonal", "custom"))
    sp.add_argument("--matrix", help="file with a 4x4 form matrix (n, then n*n element codes)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extremal", description="Extremal surfaces over F_{q^2}: build, verify, export, search.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run verification suites and print certificates")
    _add_surface_args(v)
    v.add_argument("--suite", default="all", choices=(*SUITES, "all"))

    e = sub.add_parser("export", help="write points, lines, incidence, chords, configs or doubles")
    _add_surface_args(e)
    e.add_argument("--what", required=True, choices=("points", "lines", "incidence", "chords", "configs", "doubles"))
    e.add_argument("--format", default="csv", choices=("csv", "json"))
    e.add_argument("--out", help="output file (default stdout)")

    s = sub.add_parser("search", help="search for double 2d configurations")
    _add_surface_args(s)
    s.add_argument("--doubles", action="store_true", help="search for doubles (the only search target)")
    s.add_argument("--mode", default="exhaustive", choices=("exhaustive", "chord-pairs"))
    s.add_argument("--checkpoint", help="write progress to this file")
    s.add_argument("--resume", help="resume from (and keep writing) this checkpoint")
    s.add_argument("--long-running", action="store_true", help="allow exhaustive runs above q = 3")
    s.add_argument("--threads", type=int, default=None, help="worker processes (default EXTREMAL_THREADS or 1)")
    s.add_argument("--out", help="write the doubles as JSON to this file")
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    cmd = {"verify": cmd_verify, "export": cmd_export, "search": cmd_search}[args.cmd]
    try:
        return cmd(args, out)
    except UsageError as exc:
        print(f"extremal: {exc}", file=sys.stderr)
        return 1
    except (SingularSurfaceError, NonHermitianError) as exc:
        print(f"extremal: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
