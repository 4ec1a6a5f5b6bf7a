"""Command-line front end.

Every command writes JSON (sorted keys) to stdout or ``--out``; table
commands write CSV with 15 significant digits.  Exit status is 0 on
success, 1 when a numeric step fails or a declared check does not pass,
and 2 on usage errors.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import dos, herglotz, jacobi, potential
from .measures import SetUnion, cdf, cauchy_transform

MODEL_GRAMMAR = """model grammar:
  free
  periodic:a=A1,...,Ap;b=B1,...,Bp
  qp:lambda=L,alpha=golden|X,theta=T        (also quasiperiodic:...)
  random:seed=S,a=LO:HI,b=LO:HI
  table:a=A1,...,AL;b=B1,...,BL             (free tail after the table)
  {"kind": ...}                             (JSON descriptor)"""

THREADS_ENV = "JACOBISPEC_THREADS"


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# parsing helpers


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _keyvals(body, sep):
    out = {}
    for part in body.split(sep):
        if not part.strip():
            continue
        key, _, val = part.partition("=")
        if not _:
            raise UsageError(f"expected key=value, got {part!r}")
        out[key.strip()] = val.strip()
    return out


def parse_model(spec):
    """CoeffModel from the documented text grammar or a JSON descriptor."""
    spec = spec.strip()
    try:
        if spec.startswith("{"):
            return jacobi.model_from_dict(json.loads(spec))
        kind, _, body = spec.partition(":")
        kind = kind.strip().lower()
        if kind == "free" and not body:
            return jacobi.FreeModel()
        if kind in ("periodic", "table"):
            kv = _keyvals(body, ";")
            a, b = _floats(kv["a"]), _floats(kv["b"])
            cls = jacobi.PeriodicModel if kind == "periodic" else jacobi.TableModel
            return cls(a, b)
        if kind in ("qp", "quasiperiodic"):
            kv = _keyvals(body, ",")
            alpha = kv.get("alpha", "golden")
            alpha = alpha if alpha == "golden" else float(alpha)
            return jacobi.QuasiPeriodicModel(float(kv["lambda"]), alpha, float(kv.get("theta", 0.0)))
        if kind == "random":
            kv = _keyvals(body, ",")
            rng = lambda s: tuple(float(v) for v in s.split(":"))  # noqa: E731
            return jacobi.RandomModel(int(kv["seed"]), rng(kv.get("a", "1:1")), rng(kv.get("b", "-1:1")))
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise UsageError(f"malformed model {spec!r}: {exc}\n{MODEL_GRAMMAR}") from exc
    raise UsageError(f"unknown model {spec!r}\n{MODEL_GRAMMAR}")


def parse_set(text):
    try:
        E = SetUnion.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if E.empty:
        raise UsageError("interval union must be nonempty")
    return E


def parse_complex(text):
    try:
        parts = _floats(text)
    except ValueError as exc:
        raise UsageError(f"expected 're,im', got {text!r}") from exc
    if len(parts) == 1:
        return complex(parts[0], 0.0)
    if len(parts) != 2:
        raise UsageError(f"expected 're,im', got {text!r}")
    return complex(*parts)


def parse_grid(text, default):
    """'default', 'lo:hi:n' (real), or 're,im;re,im;...' (complex list)."""
    if text in (None, "default"):
        return default
    if ";" in text or "," in text:
        return [parse_complex(p) for p in text.split(";") if p.strip()]
    try:
        lo, hi, n = text.split(":")
        return list(np.linspace(float(lo), float(hi), int(n)))
    except ValueError as exc:
        raise UsageError(f"expected 'lo:hi:n' or 're,im;...', got {text!r}") from exc


def parse_ints(text):
    try:
        vals = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad N-list {text!r}") from exc
    if not vals or any(v < 1 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise UsageError("N-list must be positive and increasing")
    return vals


def positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerances must be positive")
    return v


def positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _arg(parse):
    """Adapt a parser so argparse reports its message verbatim."""

    def convert(text):
        try:
            return parse(text)
        except UsageError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    convert.__name__ = parse.__name__
    return convert


def default_threads():
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def fan_out(func, items, threads):
    """Ordered map over items with at most ``threads`` workers."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# --------------------------------------------------------------------------
# output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def emit_json(doc, path=None):
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_csv(header, rows, path=None):
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.15g}" if isinstance(v, (float, np.floating)) else v for v in row])
    finally:
        if path:
            fh.close()


# --------------------------------------------------------------------------
# commands

DEFAULT_Z_GRID = [complex(x, 0.5) for x in np.linspace(-2.5, 2.5, 10)]


def cmd_dos(args):
    d = dos.dos_measure(args.model, args.N)
    emit_csv(["lambda", "weight"], zip(d.eigenvalues, d.dk.atom_wt), args.out)
    if args.cdf_out:
        lo, hi = d.eigenvalues[0] - 0.5, d.eigenvalues[-1] + 0.5
        ts = np.linspace(lo, hi, args.cdf_points)
        emit_csv(["t", "k"], zip(ts, cdf(d.dk, ts)), args.cdf_out)
    if args.out:
        emit_json({"N": d.N, "A": d.A, "atoms": int(d.eigenvalues.size), "mass": d.dk.mass})
    return 0


def cmd_lyapunov(args):
    xs = np.asarray(parse_grid(args.grid, list(np.linspace(-3, 3, 61))))
    chunks = np.array_split(xs, max(1, min(args.threads, xs.size)))
    parts = fan_out(lambda c: dos.lyapunov_many(args.model, c, args.N), chunks, args.threads)
    gam = np.concatenate(parts)
    if np.iscomplexobj(xs):
        emit_csv(["re", "im", "gamma"], zip(xs.real, xs.imag, gam), args.out)
    else:
        emit_csv(["x", "gamma"], zip(xs, gam), args.out)
    return 0


def cmd_thouless(args):
    zs = parse_grid(args.grid, DEFAULT_Z_GRID)
    d = dos.dos_measure(args.model, args.N)

    def row(z):
        lhs = dos.lyapunov(args.model, z, args.N)
        rhs = float(dos.thouless_rhs(d, z))
        return {"z": complex(z), "lyapunov": lhs, "thouless": rhs,
                "relative": abs(lhs - rhs) / max(abs(rhs), 1e-300)}

    rows = fan_out(row, zs, args.threads)
    worst = max(r["relative"] for r in rows)
    passed = worst <= args.tol
    emit_json({"N": args.N, "A": d.A, "rows": rows, "max_relative": worst, "tol": args.tol, "passed": passed}, args.out)
    return 0 if passed else 1


def cmd_identities(args):
    zs = parse_grid(args.grid, [1j, 0.5 + 1j, -1 + 0.5j])
    rows = dos.check_identities(args.model, zs, parse_ints(args.N))
    worst = max(r.moment_residual for r in rows)
    passed = worst <= args.tol
    emit_json({"rows": [r.to_dict() for r in rows], "max_moment_residual": worst, "passed": passed}, args.out)
    return 0 if passed else 1


def cmd_wpair(args):
    w = dos.w_pair(args.model, parse_complex(args.z), args.N)
    emit_json({"z": w.z, "w_plus": w.w_plus, "w_minus": w.w_minus, "residual": w.residual,
               "tail_error": w.tail_error, "flagged": w.flagged}, args.out)
    return 1 if w.flagged else 0


def cmd_equilibrium(args):
    r = potential.equilibrium(args.set, args.nodes)
    emit_json(r.to_dict(), args.out)
    return 0 if r.residual <= args.tol else 1


def cmd_capacity(args):
    emit_json({"set": args.set.to_list(), "capacity": potential.capacity(args.set, args.nodes)}, args.out)
    return 0


def _herglotz_for(args):
    if args.function == "equilibrium":
        omega = potential.equilibrium(args.set).omega
        return lambda z: cauchy_transform(omega, z)
    if args.x is None:
        raise UsageError("--x is required for the atom construction")
    return herglotz.from_krein(herglotz.atom_constructor(args.set, args.x))


def cmd_reflectionless(args):
    F = _herglotz_for(args)
    grid = args.set.interior_grid(args.points, margin=1e-3)
    rep = herglotz.is_reflectionless(F, args.set, grid, args.tol)
    emit_json(rep.to_dict(), args.out)
    return 0 if rep.passed else 1


def cmd_krein(args):
    try:
        xi = herglotz.KreinFn.from_json(args.xi)
    except (ValueError, KeyError, herglotz.KreinError) as exc:
        raise UsageError(f"bad Krein function: {exc}") from exc
    G = herglotz.from_krein(xi, args.c)
    doc = {"xi": xi.to_dict(), "c": args.c}
    if args.z:
        doc["G"] = complex(G(parse_complex(args.z)))
    if args.x is not None:
        kv = herglotz.krein_xi(G, args.x)
        doc["recovered_xi"] = kv.value
        doc["converged"] = kv.converged
        doc["expected_xi"] = float(xi(args.x))
    emit_json(doc, args.out)
    return 0


def cmd_pointmass(args):
    possible = herglotz.pointmass_possible(args.set, args.x)
    doc = {"x": args.x, "possible": possible}
    if possible:
        xi = herglotz.atom_constructor(args.set, args.x)
        doc["xi"] = xi.to_dict()
        doc["point_mass"] = herglotz.point_mass(herglotz.from_krein(xi), args.x)
    emit_json(doc, args.out)
    return 0


def cmd_dap(args):
    xs = [float(v) for v in args.x.split(",")]
    reps = fan_out(lambda x: dos.check_dap_gamma(args.model, x, args.N, args.resolution), xs, args.threads)
    ok = all(r.dap is not None and r.difference <= args.tol for r in reps)
    emit_json({"rows": [r.to_dict() for r in reps], "tol": args.tol, "passed": ok}, args.out)
    return 0 if ok else 1


def cmd_inequalities(args):
    d = dos.dos_measure(args.model, args.N)
    rep = potential.check_inequalities(d, args.Z, args.K, args.tol)
    emit_json(rep.to_dict(), args.out)
    return 0 if rep.passed else 1


# --------------------------------------------------------------------------
# argument parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(2)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--threads", type=int, default=default_threads(),
                        help=f"cap on parallel grid fan-out (default: ${THREADS_ENV} or CPU count)")

    p = _Parser(prog="jacobispec", description=__doc__.splitlines()[0],
                epilog=MODEL_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", help="JSON file with a 'command' key and flag values")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    def model_N(sp, N=1000):
        sp.add_argument("--model", type=_arg(parse_model), default=jacobi.FreeModel())
        sp.add_argument("--N", type=positive_int, default=N)

    sp = add("dos", cmd_dos, "eigenvalue atoms of dk_N (CSV)")
    model_N(sp)
    sp.add_argument("--cdf-out", help="also write the (t, k_N(t)) table here")
    sp.add_argument("--cdf-points", type=positive_int, default=1001)

    sp = add("lyapunov", cmd_lyapunov, "gamma_N on a grid (CSV)")
    model_N(sp)
    sp.add_argument("--grid", help="'lo:hi:n' or 're,im;re,im;...'")

    sp = add("thouless-check", cmd_thouless, "exact finite-N Thouless identity")
    model_N(sp, 500)
    sp.add_argument("--grid", default="default")
    sp.add_argument("--tol", type=positive, default=1e-9)

    sp = add("identities", cmd_identities, "w_+ + w_- = i pi, g = w_+', moment identity")
    sp.add_argument("--model", type=_arg(parse_model), default=jacobi.FreeModel())
    sp.add_argument("--N", default="500,1000", help="increasing comma-separated list")
    sp.add_argument("--grid", default="default")
    sp.add_argument("--tol", type=positive, default=1e-8)

    sp = add("w-pair", cmd_wpair, "w_+ and w_- at one z")
    model_N(sp, 500)
    sp.add_argument("--z", default="0,1")

    sp = add("equilibrium", cmd_equilibrium, "equilibrium measure of an interval union")
    sp.add_argument("--set", type=_arg(parse_set), required=True)
    sp.add_argument("--nodes", type=positive_int, default=potential.DEFAULT_NODES)
    sp.add_argument("--tol", type=positive, default=potential.FROSTMAN_TOL)

    sp = add("capacity", cmd_capacity, "logarithmic capacity")
    sp.add_argument("--set", type=_arg(parse_set), required=True)
    sp.add_argument("--nodes", type=positive_int, default=potential.DEFAULT_NODES)

    sp = add("reflectionless", cmd_reflectionless, "Re F(t + i0) = 0 on E?")
    sp.add_argument("--set", type=_arg(parse_set), required=True)
    sp.add_argument("--function", choices=["equilibrium", "atom"], default="equilibrium")
    sp.add_argument("--x", type=float)
    sp.add_argument("--points", type=positive_int, default=50)
    sp.add_argument("--tol", type=positive, default=1e-3)

    sp = add("krein", cmd_krein, "Herglotz function from a Krein function and back")
    sp.add_argument("--xi", required=True, help='JSON {"breaks": [...], "values": [...]}')
    sp.add_argument("--c", type=float, default=0.0)
    sp.add_argument("--z", help="evaluate G at 're,im'")
    sp.add_argument("--x", type=float, help="recover xi(x) from boundary values")

    sp = add("pointmass", cmd_pointmass, "can a reflectionless measure on E have an atom at x?")
    sp.add_argument("--set", type=_arg(parse_set), required=True)
    sp.add_argument("--x", type=float, required=True)

    sp = add("dap-check", cmd_dap, "approximate derivative of gamma against -Re g")
    model_N(sp, 200_000)
    sp.add_argument("--x", default="0")
    sp.add_argument("--resolution", type=positive_int, default=16)
    sp.add_argument("--tol", type=positive, default=1e-2)

    sp = add("inequalities", cmd_inequalities, "cap(Z) <= A <= cap(K), |Z| <= 4A")
    model_N(sp)
    sp.add_argument("--Z", type=_arg(parse_set), required=True)
    sp.add_argument("--K", type=_arg(parse_set), required=True)
    sp.add_argument("--tol", type=positive, default=0.01)
    return p


def _config_argv(path):
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict) or "command" not in cfg:
        raise UsageError("config must be a JSON object with a 'command' key")
    argv = [str(cfg.pop("command"))]
    for key, val in cfg.items():
        flag = "--" + key.replace("_", "-") if len(key) > 1 else "--" + key
        if key in ("N", "Z", "K"):
            flag = "--" + key
        if isinstance(val, dict):
            val = json.dumps(val, sort_keys=True)
        elif isinstance(val, list):
            val = ",".join(str(v) for v in val)
        argv += [flag, str(val)]
    return argv


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if "--config" in argv:
            i = argv.index("--config")
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            cfg_argv = _config_argv(argv[i + 1])
            rest = argv[:i] + argv[i + 2 :]
            if rest and not rest[0].startswith("-"):
                rest = rest[1:]
            argv = cfg_argv + rest
        args = parser.parse_args(argv)
        args.threads = max(1, args.threads)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    except Exception as exc:  # numeric failure: report and exit 1
        emit_json({"error": str(exc), "type": type(exc).__name__})
        return 1


if __name__ == "__main__":
    sys.exit(main())
