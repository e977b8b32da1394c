"""Command-line entry point: ``addcomb <command> [flags]``.

Every command prints (or writes) one JSON report.  Exit status is 0 when
all bounds in the report hold, 2 when some bound fails, 1 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
from pathlib import Path
import sys
import time

import numpy as np

from . import __version__
from .bitmatrix import BitMatrix
from .checks import Bound, bound
from .errors import AddCombError
from .fileio import read_fn, read_set, write_fn, write_set
from .fourier import best_affine_approx, u2_via_spectrum, wht_spectrum
from .generators import KINDS, GenSpec, generate
from .gf2core import FnTable, SubsetF2n, basis, difference_set, set_stats
from .gowers import gowers_norm_exact, gowers_norm_sampled
from .inverse3 import u3_inverse_pipeline
from .reduction import QuadraticForm, pfr_decompose
from .verify import run_verify


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _jsonable(obj):
    if isinstance(obj, BitMatrix):
        return {"rows": obj.rows, "cols": obj.cols, "data": [format(r, "x") for r in obj.data]}
    if isinstance(obj, QuadraticForm):
        return obj.to_json()
    if isinstance(obj, FnTable):
        return {"n": obj.dom_dim, "m": obj.codom_dim, "table": [format(int(v), "x") for v in obj.table]}
    if isinstance(obj, np.ndarray):
        return [int(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_gen(args) -> tuple[dict, list[Bound]]:
    if not args.out:
        raise UsageError("gen requires --out")
    params = {"K": args.K, "v": args.v, "r": args.r, "degree": args.degree, "rho": args.rho}
    spec = GenSpec(args.kind, args.n, args.m, args.seed, params)
    planted = generate(spec)
    out = Path(args.out)
    results = {"path": str(out), "kind": args.kind}
    if isinstance(planted.value, SubsetF2n):
        write_set(planted.value, out)
        results["size"] = planted.value.size
    else:
        write_fn(planted.value, out)
        if args.kind == "structured_hom" and args.n <= 13:
            results["k_delta"] = difference_set(planted.value).size
    meta = {"spec": {"kind": args.kind, "n": args.n, "m": args.m, "seed": args.seed, "params": params},
            "plant": _jsonable(planted.meta)}
    out.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    results["meta"] = str(out.with_suffix(".meta.json"))
    return results, []


def cmd_setstats(args) -> tuple[dict, list[Bound]]:
    S = read_set(args.inp)
    st = set_stats(S)
    results = {
        "size": st.size,
        "sumset_size": st.sumset_size,
        "doubling": str(st.doubling),
        "span_size": st.span_size,
        "ruzsa_bound": None if st.ruzsa_bound is None else str(st.ruzsa_bound),
        "ruzsa_log2": st.ruzsa_log2,
        "greentao_exponent": str(st.greentao_exponent),
    }
    checks = [
        bound("sumset_size >= size", st.sumset_size, ">=", st.size),
        bound("sumset_size <= min(2^n, size^2)", st.sumset_size, "<=", min(1 << S.dim, st.size**2)),
        bound("span_size >= size", st.span_size, ">=", st.size),
    ]
    if st.ruzsa_bound is not None:
        checks.append(bound("span_size <= K^2 2^(K^4) |S|", st.span_size, "<=", st.ruzsa_bound))
    return results, checks


def cmd_delta(args) -> tuple[dict, list[Bound]]:
    f = read_fn(args.inp)
    D = difference_set(f)
    results = {"size": D.size, "values": [format(v, "x") for v in sorted(D.values)]}
    return results, [bound("f(0) in Delta f", int(f(0) in D), "==", 1)]


def cmd_spectrum(args) -> tuple[dict, list[Bound]]:
    f = read_fn(args.inp)
    spec = wht_spectrum(f)
    aff = best_affine_approx(f)
    u2 = u2_via_spectrum(f)
    results = {
        "top": [{"alpha": format(a, "x"), "coeff": c} for a, c in spec.top(args.top)],
        "u2": u2,
        "best_affine": {"alpha": format(aff.alpha.code, "x"), "shift_bit": aff.shift_bit,
                        "agreement": str(aff.agreement)},
    }
    parseval = abs(float(np.sum(spec.coeffs**2)) - 1.0)
    return results, [
        bound("Parseval error", parseval, "<=", 1e-12),
        bound("U2 >= 2a - 1", u2, ">=", float(2 * aff.agreement - 1)),
    ]


def cmd_norms(args) -> tuple[dict, list[Bound]]:
    f = read_fn(args.inp)
    if args.samples is not None and not args.exact:
        r = gowers_norm_sampled(f, args.d, args.samples, args.seed, args.workers)
    else:
        r = gowers_norm_exact(f, args.d)
    results = r.to_dict()
    if r.mode == "sampled":
        results["mean"] = r.mean
    else:
        results["power"] = str(r.power)
    return results, [bound("U^d <= 1", r.value, "<=", 1.0), bound("U^d >= 0", r.value, ">=", 0.0)]


def cmd_pfr(args) -> tuple[dict, list[Bound]]:
    f = read_fn(args.inp)
    quad = None
    if args.quad:
        try:
            quad = QuadraticForm.from_json(Path(args.quad).read_text())
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.quad}: invalid JSON ({exc})") from None
    rep = pfr_decompose(f, quad)
    return rep.to_dict(), list(rep.checks)


def cmd_u3(args) -> tuple[dict, list[Bound]]:
    f = read_fn(args.inp)
    rep = u3_inverse_pipeline(f, tau=args.tau)
    checks = [
        bound("0 <= final correlation <= 1", rep["step8"]["correlation"], ">=", 0.0),
        bound("S' within S", rep["step5"]["size"], "<=", rep["step4"]["size"]),
        bound("S'' within S'", rep["step6"]["size"], "<=", rep["step5"]["size"]),
    ]
    return rep, checks


def cmd_verify(args) -> tuple[dict, list[Bound]]:
    groups = run_verify(args.level)
    results = {name: {"checks": len(bs), "failed": sum(not b.holds for b in bs)} for name, bs in groups.items()}
    return results, [b for bs in groups.values() for b in bs]


COMMANDS = {
    "gen": cmd_gen,
    "setstats": cmd_setstats,
    "delta": cmd_delta,
    "spectrum": cmd_spectrum,
    "norms": cmd_norms,
    "pfr-pipeline": cmd_pfr,
    "u3-pipeline": cmd_u3,
    "verify": cmd_verify,
}

_NEEDS_INPUT = {"setstats", "delta", "spectrum", "norms", "pfr-pipeline", "u3-pipeline"}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="addcomb", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--in", dest="inp")
    p.add_argument("--out")
    p.add_argument("--json", nargs="?", const="-", default="-",
                   help="write the report to this path (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--kind", choices=KINDS, default="random_function")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--v", type=int, default=0)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--quad")
    p.add_argument("--timing", action="store_true", help="record wall-clock time (breaks byte stability)")
    return p


def _emit(text: str, dest: str | None) -> None:
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command in _NEEDS_INPUT and not args.inp:
            raise UsageError(f"{args.command} requires --in")
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        start = time.perf_counter()
        results, checks = COMMANDS[args.command](args)
        elapsed = int((time.perf_counter() - start) * 1000) if args.timing else 0
    except (UsageError, AddCombError, OSError) as exc:
        sys.stderr.write(f"addcomb: error: {exc}\n")
        return 1

    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("timing",)}
    files = {}
    for key in ("inp", "quad"):
        if inputs.get(key):
            files[inputs[key]] = _sha256(inputs[key])
    inputs["files"] = files
    report = {
        "command": args.command,
        "version": __version__,
        "inputs": inputs,
        "results": _jsonable(results),
        "bounds": [b.to_dict() for b in checks],
        "timing_ms": elapsed,
        "worker_count": args.workers,
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    dest = args.json
    if dest == "-" and args.command != "gen" and args.out:
        dest = args.out
    _emit(text, dest)
    return 0 if all(b.holds for b in checks) else 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
