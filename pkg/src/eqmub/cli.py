"""Command-line front end: construct, verify, compare, diagnose-fiducial, export-gram.

Exit codes: 0 when every requested check passes, 1 on a failed check,
2 on bad arguments, 3 on I/O errors. Results go to stdout (or --out);
progress goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time

import numpy as np

from . import constructions as con
from .abelian import singer_difference_set
from .cyclotomic import CycArray, Cyclotomic
from .fields import gf
from .lineset import (
    Backend,
    dumps,
    equivalence_certificate_check,
    export_gram_csv,
    is_equiangular,
    is_flat,
    is_mub_family,
    lineset_from_json,
    lineset_to_json,
    match_columns_up_to_phase,
    meets_with_equality,
)
from .reports import Check
from .semifield import semifield_make_dickson, semifield_make_field
from .spin import TypeIIMatrix, is_spin_model, is_type_ii, potts, quadratic_circulant

log = logging.getLogger("eqmub")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    """Unreadable or malformed input file."""


# ---------------------------------------------------------------------------
# helpers


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _read_json(path: str | None):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path or 'stdin'}: {exc}") from exc


def _load(path: str | None, tol: float):
    doc = _read_json(path)
    try:
        return doc, lineset_from_json(doc, tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path or 'stdin'}: malformed line set ({exc})") from exc


def _backend(args) -> Backend:
    if args.backend is None:
        return Backend.from_env(args.tol)
    return Backend(args.backend, args.tol)


def _apply_backend(ls, args):
    # float files stay float unless exact is requested explicitly
    if args.backend is None and not ls.backend.exact:
        return ls.with_backend(Backend("float", args.tol))
    backend = _backend(args)
    if backend.exact and not ls.backend.exact:
        raise UsageError("float input cannot be verified with the exact backend")
    return ls if backend.exact else ls.with_backend(backend)


def _matrix_of(ls):
    return ls.data if ls.backend.exact else ls.to_complex()


def _report_line(name: str, chk: Check) -> dict:
    return {"check": name, **chk.to_json()}


# ---------------------------------------------------------------------------
# construct


def _build(args):
    kind = args.kind
    if kind == "singer-eal":
        G, D = singer_difference_set(args.q)
        ls = con.eal_from_difference_set(G, D)
        return ls, "equiangular"
    if kind == "semifield-mub":
        if args.semifield == "field":
            E = semifield_make_field(gf(args.q))
        else:
            q0 = math.isqrt(args.q)
            if q0 * q0 != args.q:
                raise UsageError("--q for a Dickson semifield is its order q0^2")
            E = semifield_make_dickson(q0)
        log.info("building Hughes-group MUBs for %s of order %d", E.kind, E.q)
        return con.mubs_from_semifield(E).lines, "mub"
    if kind == "wf":
        return con.wf(args.q).lines, "mub"
    if kind == "alltop":
        fam = con.alltop(args.q)
        if args.unitary_out:
            cert = con.alltop_wf_equivalence(args.q)
            doc = {"matrix": _matrix_json(cert.U), "perm": cert.perm,
                   "phases": [p.to_json() for p in cert.phases]}
            with open(args.unitary_out, "w") as fh:
                fh.write(dumps(doc) + "\n")
        return fam.lines, "mub"
    if kind == "hoggar":
        return con.hoggar(), "equiangular"
    if kind == "spin-circulant":
        return quadratic_circulant(args.n), "spin"
    if kind == "potts":
        exact = True if args.backend == "exact" else None
        return potts(args.v, args.sign, exact=exact), "spin"
    raise UsageError(f"unknown construction {kind}")


def _matrix_json(M: CycArray) -> list:
    return [[x.to_json() for x in row] for row in M.tolist()]


def cmd_construct(args) -> int:
    t0 = time.perf_counter()
    obj, expect = _build(args)
    if isinstance(obj, TypeIIMatrix):
        doc = obj.to_json()
        ls = lineset_from_json(doc, args.tol)
    else:
        ls, doc = obj, lineset_to_json(obj)
    log.info("built %d vectors in C^%d (%.2fs)", ls.m, ls.dim, time.perf_counter() - t0)
    _emit(dumps(doc), args.out)
    if args.no_verify:
        return EXIT_OK
    report = _verify(ls, expect, args)
    sys.stderr.write(dumps(report) + "\n")
    return EXIT_OK if report["ok"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify


def _verify(ls, expect: str, args) -> dict:
    ls = _apply_backend(ls, args)
    t0 = time.perf_counter()
    checks = []
    if expect == "equiangular":
        chk = is_equiangular(ls, threads=args.threads)
        checks.append(_report_line("equiangular", chk))
        if chk:
            flat = is_flat(ls)
            checks.append(_report_line("flat", flat))
            try:
                checks.append(_report_line("relative bound", meets_with_equality(ls, chk.info["alpha"])))
            except ValueError as exc:
                checks.append({"check": "relative bound", "ok": True, "witness": None,
                               "info": {"note": str(exc)}})
        ok = bool(chk)
    elif expect == "mub":
        chk = is_mub_family(ls, threads=args.threads)
        checks.append(_report_line("mub", chk))
        ok = bool(chk)
    elif expect in ("type2", "spin"):
        M = _matrix_of(ls)
        t2 = is_type_ii(M, args.tol)
        checks.append(_report_line("type2", t2))
        ok = bool(t2)
        if expect == "spin" and ok:
            sp = is_spin_model(M, args.tol)
            sp.info.pop("mu", None)
            checks.append(_report_line("spin", sp))
            ok = bool(sp)
    else:
        raise UsageError(f"unknown expectation {expect}")
    log.info("verified %s in %.2fs", expect, time.perf_counter() - t0)
    return {"ok": ok, "expect": expect, "lines": ls.m, "dim": ls.dim, "checks": checks}


def cmd_verify(args) -> int:
    doc, ls = _load(args.file, args.tol)
    expect = args.expect
    if expect is None:
        # inferred from structure only; claimed properties in metadata are ignored
        if doc.get("kind") == "matrix":
            expect = "spin"
        else:
            expect = "mub" if ls.partition else "equiangular"
    report = _verify(ls, expect, args)
    _emit(dumps(report), args.out)
    return EXIT_OK if report["ok"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# compare


def _load_unitary(doc):
    rows = doc["matrix"] if isinstance(doc, dict) else doc
    first = rows[0][0]
    if isinstance(first, dict):
        return CycArray.from_scalars([[Cyclotomic.from_json(e) for e in row] for row in rows])
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def cmd_compare(args) -> int:
    A = _load(args.a, args.tol)[1]
    B = _load(args.b, args.tol)[1]
    udoc = _read_json(args.unitary)
    try:
        U = _load_unitary(udoc)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{args.unitary}: malformed matrix ({exc})") from exc
    perm = udoc.get("perm") if isinstance(udoc, dict) else None
    phases = udoc.get("phases") if isinstance(udoc, dict) else None
    if perm is None or phases is None:
        if A.backend.exact and isinstance(U, CycArray):
            img = A.data @ U.T
            match = match_columns_up_to_phase(img.T, B.data.T)
        else:
            Uc = U.to_complex() if isinstance(U, CycArray) else U
            match = match_columns_up_to_phase((A.to_complex() @ Uc.T).T, B.to_complex().T)
        if match is None:
            _emit(dumps({"ok": False, "witness": None, "info": {"kind": "no projective matching"}}), args.out)
            return EXIT_FAIL
        perm, phases = match
    else:
        phases = [Cyclotomic.from_json(p) if isinstance(p, dict) else complex(*p) for p in phases]
    try:
        chk = equivalence_certificate_check(A, B, U, perm, phases)
    except ValueError as exc:
        chk = Check(False, None, {"error": str(exc)})
    out = chk.to_json()
    out["perm"] = [int(p) for p in perm]
    _emit(dumps(out), args.out)
    return EXIT_OK if chk else EXIT_FAIL


# ---------------------------------------------------------------------------
# fiducial diagnostics and gram export


def _fiducial_vector(doc):
    if isinstance(doc, dict) and "vectors" in doc:
        ls = lineset_from_json(doc)
        return ls.data[0] if ls.backend.exact else ls.to_complex()[0]
    vec = doc["vector"] if isinstance(doc, dict) else doc
    if vec and isinstance(vec[0], dict):
        return CycArray.from_scalars([Cyclotomic.from_json(e) for e in vec])
    return np.array([complex(re, im) for re, im in vec])


def cmd_diagnose(args) -> int:
    try:
        v = _fiducial_vector(_read_json(args.file))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{args.file}: expected a line set or {{\"vector\": [...]}} ({exc})") from exc
    diag = con.fiducial_diagnostics(v, args.tol)
    out = diag.to_json()
    _emit(dumps(out), args.out)
    return EXIT_OK if diag.all_odd else EXIT_FAIL


def cmd_export_gram(args) -> int:
    ls = _apply_backend(_load(args.file, args.tol)[1], args)
    rows = export_gram_csv(ls, args.csv, threads=args.threads)
    log.info("wrote %d Gram entries to %s", rows, args.csv)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--threads", type=_positive, default=d, help="worker threads (default: all cores)")
    parser.add_argument("--backend", choices=("exact", "float"), default=d,
                        help="scalar backend (default: $EQMUB_BACKEND or exact)")
    parser.add_argument("--tol", type=float, default=argparse.SUPPRESS if suppress else 1e-9,
                        help="float tolerance on squared moduli")
    parser.add_argument("--out", default=d, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqmub", description=__doc__.splitlines()[0])
    _common(p, suppress=False)
    p.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a line set, MUB family or matrix")
    cs = c.add_subparsers(dest="kind", required=True)
    for name in ("singer-eal", "wf", "alltop"):
        sp = cs.add_parser(name)
        sp.add_argument("--q", type=_positive, required=True)
    sm = cs.add_parser("semifield-mub")
    sm.add_argument("--kind", dest="semifield", choices=("field", "dickson"), default="field")
    sm.add_argument("--q", type=_positive, required=True, help="order of the semifield")
    cs.add_parser("hoggar")
    sc = cs.add_parser("spin-circulant")
    sc.add_argument("--n", type=_positive, required=True)
    po = cs.add_parser("potts")
    po.add_argument("--v", type=_positive, required=True)
    po.add_argument("--sign", choices=("+", "-"), default="+")
    for sp in cs.choices.values():
        _common(sp, suppress=True)
        sp.add_argument("--no-verify", action="store_true", help="skip the verification report")
    cs.choices["alltop"].add_argument("--unitary-out", help="also write the certificate U = A_0^* here")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="recompute every property from the vectors in FILE")
    v.add_argument("file")
    v.add_argument("--expect", choices=("equiangular", "mub", "type2", "spin"))
    v.set_defaults(func=cmd_verify)

    cmp_ = sub.add_parser("compare", help="check an equivalence certificate B = U A up to phases")
    cmp_.add_argument("a")
    cmp_.add_argument("b")
    cmp_.add_argument("--unitary", required=True)
    cmp_.set_defaults(func=cmd_compare)

    d = sub.add_parser("diagnose-fiducial", help="alpha/l profile of a candidate fiducial vector")
    d.add_argument("file", nargs="?", default="-")
    d.set_defaults(func=cmd_diagnose)

    e = sub.add_parser("export-gram", help="write normalized Gram entries as CSV")
    e.add_argument("file")
    e.add_argument("--csv", required=True)
    e.set_defaults(func=cmd_export_gram)

    for sp in (v, cmp_, d, e):
        _common(sp, suppress=True)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if not logging.getLogger().handlers and not log.handlers:
        h = logging.StreamHandler(sys.stderr)
        h.setFormatter(logging.Formatter("%(message)s"))
        log.addHandler(h)
    log.setLevel(logging.WARNING if args.quiet else logging.INFO)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        sys.stderr.write(f"eqmub: I/O error: {exc}\n")
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"eqmub: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
