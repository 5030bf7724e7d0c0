"""Command-line entry point: ``python -m dilatesim <command>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

import numpy as np

from . import blockenc, circuit_io, dilation, experiments, qsvt
from .circuits import count_resources
from .config import load_config
from .numerics import skew_defect

OPERATORS = ("D", "Hnorm", "P", "Gh", "GhTilde", "FhTilde", "Fh", "delta")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def triple_report(M: int, beta: int) -> dict:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ops = dilation.DilationOperators.build(M)
        tr = dilation.build_triple(beta, M)
    delta = np.abs(ops.delta)
    lo = M / (2 * beta + 1)
    return {
        "M": M,
        "beta": beta,
        "theta": tr.theta,
        "h": ops.h,
        "sbp_residual": dilation.sbp_residual(ops.D, ops.Hnorm),
        "gh_tilde_h_skew_defect": dilation.h_skew_defect(ops.GhTilde, ops.Hnorm),
        "fh_skew_defect": skew_defect(ops.Fh),
        "fh_tilde_skew_defect": skew_defect(ops.FhTilde),
        "delta_norm": float(np.linalg.norm(ops.delta, 2)),
        "delta_outside_corners": float(delta[~dilation.corner_mask(M)].max(initial=0.0)),
        "C": tr.C,
        "C_squared": tr.C**2,
        "C_squared_interval": [lo, lo + 1],
        "mid_indices": [int(tr.mid_indices[0]), int(tr.mid_indices[-1])],
        "max_lr_defect": max(abs(tr.evaluate(tr.r, int(x)) - 1) for x in tr.mid_indices),
        "interior_defect": dilation.interior_defect(beta, M),
        "C_theta_h2": dilation.c_theta(beta) / M**2,
        "power_of_two_register": (M + 1) & M == 0,
    }


def operator_matrix(M: int, name: str) -> np.ndarray:
    ops = dilation.DilationOperators.build(M)
    return getattr(ops, name)


def _csv_rows(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _num(x: float) -> str:
    return repr(float(x))


def cmd_triple(args) -> str:
    return _dump(triple_report(args.M, args.beta))


def cmd_operator(args) -> str:
    return circuit_io.matrix_csv(operator_matrix(args.M, args.op), tol=args.tol)


def _config_run(args):
    cfg = load_config(args.config)
    beta = args.beta if args.beta is not None else cfg.beta
    if beta is None:
        raise SystemExit("beta must be given on the command line or in the config")
    return cfg, beta


def cmd_evolve(args) -> str:
    cfg, beta = _config_run(args)
    M = args.M if args.M is not None else cfg.M
    if M is None:
        raise SystemExit("M must be given on the command line or in the config")
    spec = cfg.spec
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        run = experiments.end_to_end(spec, beta, M, args.x)
        bound = experiments.theorem_bound(experiments.BoundInputs(beta, M, spec.T, spec.K_max))
    x = args.x if args.x is not None else M // 2
    return _dump(
        {
            "M": M,
            "beta": beta,
            "x": x,
            "T": spec.T,
            "kappa": cfg.kappa_text,
            "error": run.error,
            "worst_mid_error": max(run.errors.values()),
            "bound": bound,
            "approx": [[z.real, z.imag] for z in run.approx],
            "truth": [[z.real, z.imag] for z in run.truth],
            "warnings": sorted({str(w.message) for w in caught}),
        }
    )


def cmd_scaling(args) -> str:
    cfg, beta = _config_run(args)
    rows = experiments.scaling_sweep(cfg.spec, beta, sorted(args.M_list))
    return _csv_rows(
        ["M", "measured_error", "bound_value", "slope_estimate"],
        [[r.M, _num(r.measured_error), _num(r.bound_value), _num(r.slope_estimate)] for r in rows],
    )


def cmd_resources(args) -> str:
    rc = count_resources(qsvt.prep_circuit(args.m, args.beta))
    return circuit_io.resources_csv(rc)


def block_encoding(which: str, m: int, theta: float):
    """``(encoding, target)`` for a named builder; ``total`` uses H = Z, K = -I."""
    M = 2**m - 1
    if which == "init":
        return blockenc.build_u_init(m), np.diag(np.arange(M + 1) / M)
    if which == "D":
        return blockenc.build_u_d(m, theta), blockenc.d_matrix(m, theta)
    if which == "R":
        return blockenc.build_u_r(m), blockenc.shift_matrix(m)
    if which == "thetaF":
        return blockenc.build_u_theta_f(m, theta), blockenc.theta_fh_matrix(m, theta)
    if which == "total":
        H, K = np.diag([1.0, -1.0]), -np.eye(2)
        tot = blockenc.combine_total(
            blockenc.from_matrix(H, label="H"),
            blockenc.from_matrix(K, label="K"),
            blockenc.build_u_theta_f(m, theta),
        )
        return tot.encoding, blockenc.total_target(H, K, blockenc.theta_fh_matrix(m, theta))
    raise ValueError(f"unknown encoding {which!r}")


def cmd_block_encode(args) -> str:
    be, target = block_encoding(args.which, args.m, args.theta)
    rc = count_resources(be.circuit)
    defect = blockenc.block_defect(be, target)
    text = circuit_io.export_text(be.circuit, expand_open=args.expand_open, decompose=args.decompose)
    parts = [
        f"# {args.which}: m={args.m} theta={args.theta!r} alpha={be.alpha!r} "
        f"ancillas={be.num_ancillas} width={be.circuit.width}",
        f"# block_defect={defect!r}",
        text.rstrip("\n"),
        "",
        circuit_io.resources_csv(rc).rstrip("\n"),
    ]
    if args.circuit_out:
        with open(args.circuit_out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return "\n".join(parts) + "\n"


def cmd_prep_rh(args) -> str:
    res = qsvt.prepare_rh(args.m, args.beta, args.amplify)
    out = {
        "m": args.m,
        "beta": args.beta,
        "fidelity": res.fidelity,
        "success_probability": res.success_probability,
        "iterates": res.iterates,
        "gate_counts": dict(sorted(res.gate_counts.items())),
    }
    if args.amplify:
        out["amplify"] = args.amplify
        out["amplified_probability"] = res.amplified_probability
        out["amplified_fidelity"] = res.amplified_fidelity
    return _dump(out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dilatesim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("triple", help="structural report for the discrete dilation triple")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--beta", type=int, required=True)
    s.set_defaults(func=cmd_triple)

    s = sub.add_parser("operator", help="dilation operator as row,col,re,im CSV")
    s.add_argument("--M", type=int, required=True)
    s.add_argument("--op", choices=OPERATORS, default="Fh")
    s.add_argument("--tol", type=float, default=0.0, help="omit entries with |a_ij| <= tol")
    s.set_defaults(func=cmd_operator)

    s = sub.add_parser("evolve", help="single end-to-end run as JSON")
    s.add_argument("--config", required=True)
    s.add_argument("--M", type=int)
    s.add_argument("--beta", type=int)
    s.add_argument("--x", type=int, help="mid index (default M/2)")
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("scaling", help="error and bound versus M as CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--beta", type=int)
    s.add_argument("--M-list", dest="M_list", type=int, nargs="+", required=True)
    s.set_defaults(func=cmd_scaling)

    s = sub.add_parser("resources", help="gate counts of the |r_h> preparation circuit as CSV")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--beta", type=int, required=True)
    s.set_defaults(func=cmd_resources)

    s = sub.add_parser("block-encode", help="circuit text, resources and block defect")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--theta", type=float, default=2 / 7)
    s.add_argument("--which", choices=("init", "D", "R", "thetaF", "total"), required=True)
    s.add_argument("--expand-open", action="store_true", help="X-conjugate open controls")
    s.add_argument("--decompose", action="store_true", help="lower MCX gates to Toffolis")
    s.add_argument("--circuit-out", help="also write the circuit text to this file")
    s.set_defaults(func=cmd_block_encode)

    s = sub.add_parser("prep-rh", help="simulate the |r_h> preparation as JSON")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--beta", type=int, required=True)
    s.add_argument("--amplify", nargs="?", const="exact", choices=("standard", "exact"))
    s.set_defaults(func=cmd_prep_rh)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"dilatesim: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
