"""Command line interface: todakit <command> --input curve.json --output dir/."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import equilibrium, identities, isoflow, pell, schlesinger, theta, variational
from .curve import build_curve
from .errors import InputError, TodakitError

TOLERANCES = {
    "drift": 1e-6,        # b-period drift per unit path
    "snap": 1e-13,        # corrector residual before Pell re-certification
    "rational": 1e-8,     # rational measure detection
    "identity": 1e-8,     # residue identities
    "variational": 1e-5,  # relative FD error of variational formulas
    "pell": 1e-10,        # Pell residual
    "toda": 1e-6,         # lattice equation residual
    "sum_rule": 1e-10,
    "constrained": 1e-6,
}


class ValidationFailure(TodakitError):
    """A reported residual exceeds its tolerance (exit 1)."""


class FlowStopped(TodakitError):
    """The flow left the admissible region; partial trajectory written."""


def _tolerances(pairs):
    tol = dict(TOLERANCES)
    for p in pairs or []:
        key, _, val = p.partition("=")
        if key not in tol:
            raise InputError(f"unknown tolerance {key!r}; known: {sorted(tol)}")
        try:
            tol[key] = float(val)
        except ValueError as e:
            raise InputError(f"bad tolerance value {p!r}") from e
    scale = float(os.environ.get("TODAKIT_TOL_SCALE", "1"))
    return {k: v * scale for k, v in tol.items()}


def _load_curve(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read curve file: {e}") from e
    if not isinstance(data, dict) or not {"genus", "x", "u"} <= set(data):
        raise InputError('curve JSON needs "genus", "x", "u"')
    return data


def _curve(data):
    try:
        return build_curve(int(data["genus"]), [float(t) for t in data["x"]],
                           [float(t) for t in data["u"]])
    except (TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"malformed curve JSON: {e}") from e


def _vector(text, g, what):
    if text is None:
        return None
    try:
        v = np.array([complex(t.replace("i", "j")) for t in text.split(",")])
    except ValueError as e:
        raise InputError(f"bad {what} {text!r}") from e
    if v.shape != (g,):
        raise InputError(f"{what} needs {g} entries")
    return v


def _range(text, integer=False):
    parts = text.split(":")
    try:
        if integer:
            a, b = int(parts[0]), int(parts[1])
            return list(range(a, b + 1))
        a, b, h = (float(t) for t in parts)
    except (ValueError, IndexError) as e:
        raise InputError(f"bad range {text!r}") from e
    n = int(round((b - a) / h))
    return [a + k * h for k in range(n + 1)]


def _dump(out: Path, name, obj):
    text = obj if isinstance(obj, str) else json.dumps(obj, indent=2) + "\n"
    (out / name).write_text(text)


# ---------------------------------------------------------------- commands

def cmd_periods(args, tol, out):
    from .periods import normalized_holomorphic_basis
    _dump(out, "periods.json", normalized_holomorphic_basis(_curve(args.data)).to_json())


def cmd_flow(args, tol, out):
    curve = _curve(args.data)
    if args.path is None:
        raise InputError("flow needs --path")
    pts, h = isoflow.parse_path(args.path, curve.genus)
    if np.max(np.abs(pts[0] - np.array(curve.x))) > 1e-12:
        raise InputError("path must start at the curve's x")
    alpha = _vector(args.alpha, curve.genus, "alpha")
    try:
        traj = isoflow.integrate_flow(curve, pts[1:], h, alpha, tol["drift"])
    except TodakitError as e:
        if hasattr(e, "trajectory"):
            _dump(out, "trajectory.csv", e.trajectory.to_csv())
        raise FlowStopped(f"{type(e).__name__}: {e}") from e
    _dump(out, "trajectory.csv", traj.to_csv())
    x, u, d = traj.steps[-1]
    _dump(out, "flow.json", {"end": {"x": list(map(float, x)), "u": list(map(float, u))},
                             "max_drift": float(max(np.max(np.abs(s[2])) for s in traj.steps)),
                             "steps": len(traj.steps) - 1,
                             "min_abs_omega_u": float(np.min(traj.omega_u))})


def cmd_equilibrium(args, tol, out):
    curve = _curve(args.data)
    rep = equilibrium.equilibrium_report(curve, tol["rational"])
    _dump(out, "equilibrium.json", rep)


def _nk(args, curve, tol):
    if args.N is not None:
        k = None if args.k is None else tuple(int(t) for t in args.k.split(","))
        return args.N, k
    det = equilibrium.rational_measure_detect(equilibrium.equilibrium_measures(curve),
                                              tol["rational"])
    if det is None:
        raise pell.NotRational("measures are not rational with denominator <= 64")
    return det.N, det.k


def cmd_pell(args, tol, out):
    curve = _curve(args.data)
    N, k = _nk(args, curve, tol)
    cert = pell.chebyshev_from_curve(curve, N, k)
    _dump(out, "certificate.json", cert.to_json())
    if cert.residual > tol["pell"]:
        raise ValidationFailure(f"Pell residual {cert.residual:.3g}")


def cmd_toda(args, tol, out):
    curve = _curve(args.data)
    data = theta.toda_wave_vectors(curve)
    ns = _range(args.n, integer=True)
    ts = _range(args.t)
    rows = theta.lattice_table(data, ns, ts, args.jobs)
    _dump(out, "lattice.csv", theta.lattice_csv(rows))
    worst = max(theta.lattice_residual(data, n, t) for n in ns for t in ts)
    side = data.to_json()
    side["max_toda_residual"] = worst
    side["max_abs_imag_c"] = float(max(abs(r[2].imag) for r in rows))
    side["calibration_K"] = [float(np.real(data.scale)), float(np.imag(data.scale))]
    if args.N is not None:
        side["periodicity"], side["lattice_condition"] = theta.periodicity_check(data, args.N)
    _dump(out, "lattice.json", side)
    if worst > tol["toda"]:
        raise ValidationFailure(f"Toda residual {worst:.3g}")


def cmd_schlesinger(args, tol, out):
    curve = _curve(args.data)
    alpha = _vector(args.alpha, curve.genus, "alpha")
    mats = schlesinger.build_residue_matrices(curve, alpha, args.scale)
    _dump(out, "schlesinger.json", schlesinger.matrices_json(mats) + "\n")
    rule = schlesinger.sum_rule_check(mats, curve.genus)
    res = schlesinger.constrained_residual(curve, alpha, args.scale)
    _dump(out, "schlesinger_check.json", {"sum_rule": rule, "constrained": res})
    if rule > tol["sum_rule"] or max(res.values()) > tol["constrained"]:
        raise ValidationFailure("Schlesinger check failed")


def cmd_validate(args, tol, out):
    curve = _curve(args.data)
    alpha = _vector(args.alpha, curve.genus, "alpha")
    res = identities.residue_identities(curve, alpha)
    var = variational.validate_variational(curve, alpha)
    report = {"identities": {k: float(v) for k, v in res.items()},
              "variational": var,
              "passed": bool(max(res.values()) < tol["identity"]
                             and max(v[-1] for v in var.values()) < tol["variational"])}
    _dump(out, "validate.json", report)
    if not report["passed"]:
        raise ValidationFailure("identity or variational check failed")


def cmd_sw_deform(args, tol, out):
    data = args.data
    if int(data["genus"]) == 0:
        _dump(out, "sw_deform.json", {"genus": 0, "samples": [],
                                      "note": "genus 0 support admits no nontrivial deformation"})
        return
    curve = _curve(data)
    N, k = _nk(args, curve, tol)
    steps = [(curve.x, curve.u, None)]
    if args.path is not None:
        pts, h = isoflow.parse_path(args.path, curve.genus)
        steps = equilibrium.isoequilibrium_flow(curve, pts[1:], h, tol["drift"]).steps
    samples = []
    target = isoflow.bperiods(curve)
    for x, u, _ in steps:
        # snap the RK4 sample onto the isoperiodic curve before certifying
        c, _, _ = isoflow.newton_period_corrector(x, u, target, tol=tol["snap"])
        cert = pell.chebyshev_from_curve(c, N, k)
        roots = np.roots(cert.Q[::-1]) if len(cert.Q) > 1 else np.array([])
        k = cert.k
        samples.append({"x": list(c.x), "u": list(c.u),
                        "residual": cert.residual,
                        "double_zeros": int(np.sum(np.abs(roots.imag) < 1e-8)),
                        "signature": list(cert.signature)})
    counts = {s["double_zeros"] for s in samples}
    expected = N - curve.genus - 1
    _dump(out, "sw_deform.json", {"N": N, "k": list(k), "expected_double_zeros": expected,
                                  "samples": samples,
                                  "double_zero_count_constant": counts == {expected}})
    if counts != {expected} or max(s["residual"] for s in samples) > tol["pell"]:
        raise ValidationFailure("Pell structure lost along the deformation")


COMMANDS = {
    "periods": cmd_periods, "flow": cmd_flow, "equilibrium": cmd_equilibrium,
    "pell": cmd_pell, "toda": cmd_toda, "schlesinger": cmd_schlesinger,
    "validate": cmd_validate, "sw-deform": cmd_sw_deform,
}


def build_parser():
    p = argparse.ArgumentParser(prog="todakit", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--path")
    p.add_argument("--alpha")
    p.add_argument("--N", type=int)
    p.add_argument("--k")
    p.add_argument("--n", default="-4:4")
    p.add_argument("--t", default="0:1:0.1")
    p.add_argument("--scale", type=float, default=1.0, help="Schlesinger parameter t")
    p.add_argument("--tol", action="append", metavar="KEY=VAL")
    p.add_argument("--jobs", type=int, default=1)
    return p


def _join_negative(argv):
    """Let "--n -4:4" through: argparse would read -4:4 as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in ("--n", "--t", "--alpha", "--path", "--k"):
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_join_negative(argv))
    except SystemExit as e:
        return 2 if e.code else 0
    out = Path(args.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
        tol = _tolerances(args.tol)
        args.data = _load_curve(args.input)
        COMMANDS[args.command](args, tol, out)
    except InputError as e:
        _report(out, args.command, e)
        return 2
    except TodakitError as e:
        _report(out, args.command, e)
        return 1
    return 0


def _report(out, command, e):
    err = {"command": command, "error": type(e).__name__, "message": str(e)}
    try:
        _dump(out, "error.json", err)
    except OSError:
        pass
    print(json.dumps(err), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
