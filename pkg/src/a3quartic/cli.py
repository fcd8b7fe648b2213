"""Command line entry point: ``python -m a3quartic <command> ...``.

Exit status is 0 when every equality and gate checked by the run holds, 1
when one fails (the failing invariant is named on stderr) and 2 on usage
errors.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import platform
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, _accel, arithfun, calibration, density, polytope, surface, torsor, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# ---------------------------------------------------------------------------
# serialization

def _plain(obj):
    """Recursively turn reports into JSON-ready values; rationals become "num/den"."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, arithfun.ZetaScaled):
        return {"cofactor": _plain(obj.cofactor), "zeta2_power": obj.zeta2_power}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, separators=(",", ":"))
        else:
            out[key] = v
    return out


def to_json(report) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def to_csv(report) -> str:
    """One row per entry of ``rows`` (or a single row), provenance as columns."""
    data = _plain(report)
    prov = {"provenance": data.get("provenance", {})}
    if isinstance(data.get("rows"), list) and data["rows"]:
        rows = [_flatten({**r, **prov}) for r in data["rows"]]
    else:
        rows = [_flatten(data)]
    header = []
    for r in rows:
        header += [k for k in r if k not in header]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in header})
    return buf.getvalue()


def provenance(args, **extra):
    p = {"package": __version__, "backend": _accel.BACKEND, "numpy": np.__version__,
         "python": platform.python_version(), "command": args.command}
    p.update(extra)
    return p


# ---------------------------------------------------------------------------
# commands; each returns (report dict, ok flag, failure message, text summary)

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {v}")
    return v


def _ladder(text):
    try:
        vals = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}")
    if not vals or any(v < 2 for v in vals) or any(b <= a for a, b in zip(vals, vals[1:])):
        raise argparse.ArgumentTypeError("ladder must be strictly increasing heights >= 2")
    return vals


def cmd_count(args):
    t = time.perf_counter()
    if args.direct:
        n, method = surface.count_direct(args.B).count, "direct"
    else:
        n, method = 2 * torsor.count(args.B), "torsor"
    rep = {"B": args.B, "method": method, "count": n}
    if args.timing:
        rep["seconds"] = time.perf_counter() - t
    return rep, True, "", str(n)


def cmd_lift(args):
    x = args.x
    try:
        T = torsor.lift(x)
    except torsor.InvariantError as e:
        rep = {"point": x, "error": str(e), "invariant": e.invariant}
        return rep, False, f"lift failed: {e}", f"lift failed: {e}"
    eq = torsor.check_equations(T)
    back = tuple(torsor.to_point(T))
    sign = 1 if x[2] > 0 else -1
    ok = (back == tuple(sign * c for c in x) and bool(eq) and torsor.check_coprim123(T)
          and torsor.check_coprimality(T))
    rep = {"point": x, "eta": list(T.eta), "alpha": [T.alpha1, T.alpha2, T.alpha4],
           "alpha3": T.alpha3, "equations": eq, "coprim123": torsor.check_coprim123(T),
           "gcd1_7": torsor.check_coprimality(T), "round_trip": back == tuple(sign * c for c in x)}
    eta = ",".join(map(str, T.eta))
    text = f"eta=({eta}) alpha=({T.alpha1},{T.alpha2},{T.alpha4})"
    return rep, ok, "" if ok else "round trip or torsor invariant failed", text


def cmd_peyre(args):
    t = time.perf_counter()
    br = density.peyre_constant(args.pmax, args.tol)
    rep = {"breakdown": br, "alpha_tilde": br.alpha_tilde, "alpha_polytope": br.alpha_polytope,
           "c": br.c, "c_err": br.c_err}
    checks = {"alpha_polytope_eq_2_alpha_tilde": br.alpha_polytope == 2 * br.alpha_tilde,
              "assemblies_agree": br.assemblies_agree}
    if args.samples:
        om = density.omega_infty_mc(args.samples, args.seed)
        pv, pse = polytope.polytope_alpha_mc(args.samples, args.seed)
        rep["omega_infty_mc"] = om
        rep["polytope_mc"] = {"estimate": pv, "se": pse}
        checks["omega_mc_within_3se"] = abs(om.value - br.omega_infty) <= 3 * om.error + br.omega_infty_err
        checks["polytope_mc_within_3se"] = abs(pv - float(br.alpha_polytope)) <= 3 * pse
    rep["checks"] = checks
    if args.timing:
        rep["seconds"] = time.perf_counter() - t
    ok = all(checks.values())
    bad = [k for k, v in checks.items() if not v]
    return rep, ok, f"failed: {', '.join(bad)}", f"c = {br.c:.12g} +- {br.c_err:.2g}"


def _arith_suite():
    """Exact identities plus the psi and psi' mean-value residuals on the validation range."""
    checks = {}
    checks["phi_circ_flat_parity"] = all(
        arithfun.phi_circ(n) * arithfun.phi_flat(n)
        == (1 if n % 2 else 2) * arithfun.phi_star(n) for n in range(1, 10**4 + 1))
    checks["local_factor_identity_p_le_100"] = all(
        density.local_factor_identity(p) for p in arithfun.primes_upto(100).tolist())
    gate = calibration.GATES["lemma12"].bound
    worst = verify.lemma12_max(range(21, 51))
    checks["lemma12_validation_within_gate"] = worst <= gate
    return {"checks": checks, "lemma12_max": worst, "lemma12_gate": gate}, all(checks.values())


def cmd_lemmas(args):
    t = time.perf_counter()
    if args.suite == "arith":
        rep, ok = _arith_suite()
        bad = [k for k, v in rep["checks"].items() if not v]
        text = "arith: " + ("ok" if ok else "failed " + ", ".join(bad))
        rep["suite"] = "arith"
    else:
        reports = verify.run_suite(args.suite, args.role)
        gate = calibration.GATES[calibration.SUITE_GATE[args.suite]]
        worst = max(r.normalized for r in reports)
        parity = sorted({verify.parity_class(r.instance["eta"][:5]) for r in reports})
        ok = worst <= gate.bound and len(parity) == 3
        rep = {"suite": args.suite, "role": args.role, "gate": gate, "max_normalized": worst,
               "parity_classes": [list(p) for p in parity], "rows": reports}
        bad = [] if ok else [f"max normalized {worst:.4g} vs gate {gate.bound}"
                             if worst > gate.bound else "parity classes missing"]
        text = f"{args.suite}: {len(reports)} instances, max normalized {worst:.4g} (gate {gate.bound})"
    if args.timing:
        rep["seconds"] = time.perf_counter() - t
    return rep, ok, "; ".join(bad), text


def cmd_fit(args):
    ladder = verify.fit_asymptotic(args.ladder, direct_max=args.direct_max)
    if not args.timing:
        for r in ladder.rows:
            r.seconds = None
    gates = {"consistent": ladder.consistent,
             "a_increasing_or_banded": verify.ladder_gate_a(ladder),
             "b_ratio_gap_nonincreasing": verify.ladder_gate_b(ladder)}
    rep = {"c_peyre": ladder.c_peyre, "meta": ladder.meta, "gates": gates, "rows": ladder.rows}
    lines = [f"B={r.B} N={r.n_torsor} c_fit={r.c_fit:.6g} ratio={r.ratio:.4g}"
             for r in ladder.rows]
    bad = [k for k, v in gates.items() if not v]
    return rep, not bad, "failed gates: " + ", ".join(bad), "\n".join(lines)


def cmd_local_factors(args):
    primes = arithfun.primes_upto(args.pmax).tolist()
    rows = [{"p": p, "omega_p": density.omega_p(p), "euler_factor": density.euler_factor(p),
             "identity": density.local_factor_identity(p)} for p in primes]
    ok = all(r["identity"] for r in rows)
    bad = [str(r["p"]) for r in rows if not r["identity"]]
    return ({"pmax": args.pmax, "rows": rows}, ok, "identity fails at p = " + ", ".join(bad),
            f"{len(rows)} primes, identity {'holds' if ok else 'fails'}")


# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=10**7,
                        help="Monte Carlo samples (0 disables the MC cross-checks)")
    common.add_argument("--workers", type=_positive_int, default=None)
    common.add_argument("--timing", action="store_true",
                        help="include wall-clock timings (reports are then not reproducible)")

    p = argparse.ArgumentParser(prog="a3quartic", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="N_{U,H}(B)")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--direct", action="store_true")
    g.add_argument("--torsor", action="store_true")
    c.add_argument("B", type=_positive_int)
    c.set_defaults(func=cmd_count)

    c = sub.add_parser("lift", parents=[common], help="torsor point over x0..x4")
    c.add_argument("x", type=int, nargs=5)
    c.set_defaults(func=cmd_lift)

    c = sub.add_parser("peyre", parents=[common], help="leading constant")
    c.add_argument("--pmax", type=_positive_int, default=10**5)
    c.add_argument("--tol", type=_positive_float, default=1e-8)
    c.set_defaults(func=cmd_peyre)

    c = sub.add_parser("lemmas", parents=[common], help="lemma instance suites")
    c.add_argument("--suite", choices=("arith", "inter", "sum7", "sum6"), required=True)
    c.add_argument("--role", choices=("validation", "calibration"), default="validation")
    c.set_defaults(func=cmd_lemmas)

    c = sub.add_parser("fit", parents=[common], help="asymptotic fit on a height ladder")
    c.add_argument("--ladder", type=_ladder, default=[10**3, 10**4, 10**5, 10**6])
    c.add_argument("--direct-max", type=int, default=10**4)
    c.set_defaults(func=cmd_fit)

    c = sub.add_parser("local-factors", parents=[common], help="per-prime identities")
    c.add_argument("--pmax", type=_positive_int, default=100)
    c.set_defaults(func=cmd_local_factors)
    return p


def run(argv=None):
    """Returns (exit status, rendered output, output path or None)."""
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on usage errors
    if args.samples < 0:
        parser.error("--samples must be >= 0")
    if args.workers:
        _accel.set_workers(args.workers)
    try:
        rep, ok, why, text = args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE, "", None
    extra = {"seed": args.seed, "samples": args.samples}
    for k in ("pmax", "tol", "suite", "role", "direct_max"):
        if hasattr(args, k):
            extra[k] = getattr(args, k)
    rep = {**rep, "ok": ok, "provenance": provenance(args, **extra)}
    if args.format == "json":
        out = to_json(rep)
    elif args.format == "csv":
        out = to_csv(rep)
    else:
        out = text + "\n"
    if not ok:
        print(f"FAILED: {why}", file=sys.stderr)
    return (EXIT_OK if ok else EXIT_FAIL), out, args.output


def main(argv=None):
    status, out, path = run(argv)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(out)
    elif out:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
