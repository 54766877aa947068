"""Command-line front end.

Subcommands: analyze, design, verify, sweep, geometry.  Exit codes follow a
fixed contract: 0 = success/admissible, 2 = inadmissible sequence,
1 = usage or input error.  All numbers print with 12 significant digits so
outputs are reproducible byte-for-byte for fixed seeds and inputs.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from nusample import analysis, design, fileio, simulate
from nusample.errors import InputError, NuSampleError, RankDeficientError
from nusample.lti import check_minimality, observability_canonical

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INADMISSIBLE = 2

RESIDUAL_TOL = 1e-8


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _tolerance(args) -> float:
    if getattr(args, "tol", None) is not None:
        if args.tol <= 0:
            raise InputError("tolerance must be positive")
        return args.tol
    env = os.environ.get("NUSAMPLE_TOL")
    if env is not None:
        try:
            value = float(env)
        except ValueError as exc:
            raise InputError(f"NUSAMPLE_TOL={env!r} is not a number") from exc
        if value <= 0:
            raise InputError("NUSAMPLE_TOL must be positive")
        return value
    return analysis.DEFAULT_ADMISSIBILITY_FACTOR


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nusample",
                description="Reachability/observability analysis and sampling-"
                            "schedule design for nonuniformly sampled SISO LTI systems")
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="joint test, degree metrics, factorization factors")
    pa.add_argument("--system", required=True)
    pa.add_argument("--instants", required=True)
    pa.add_argument("--tol", type=float, default=None,
                    help="admissibility tolerance factor (overrides NUSAMPLE_TOL)")

    pd = sub.add_parser("design", help="synthesize a sampling sequence")
    pd.add_argument("--system", required=True)
    pd.add_argument("--t0", type=float, required=True)
    pd.add_argument("--method", choices=["auto", "closed", "geometric", "generic"],
                    default="auto")
    pd.add_argument("--m", type=int, default=0, help="branch integer for the closed form")
    pd.add_argument("--t1", type=float, default=None,
                    help="second instant for the geometric method "
                         "(default: t0 + pi/(2 b))")
    pd.add_argument("--m-max", type=int, default=design.DEFAULT_M_MAX)
    pd.add_argument("--dmin", type=float, default=0.05)
    pd.add_argument("--dmax", type=float, default=5.0)
    pd.add_argument("--steps", type=int, default=200)
    pd.add_argument("--trace", default=None, help="write the geometry trace CSV here")

    pv = sub.add_parser("verify", help="deadbeat and reconstruction round trips")
    pv.add_argument("--system", required=True)
    pv.add_argument("--instants", required=True)
    pv.add_argument("--seed", type=int, required=True)

    ps = sub.add_parser("sweep", help="CSV sweep over uniformly scaled intervals")
    ps.add_argument("--system", required=True)
    ps.add_argument("--from", dest="start", type=float, required=True)
    ps.add_argument("--to", dest="stop", type=float, required=True)
    ps.add_argument("--points", type=int, required=True)
    ps.add_argument("--noise", type=float, default=1e-4)
    ps.add_argument("--trials", type=int, default=50)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--tol", type=float, default=None)

    pg = sub.add_parser("geometry", help="third-order spiral construction trace")
    pg.add_argument("--system", required=True)
    pg.add_argument("--instants", required=True)
    pg.add_argument("--out", required=True)

    return p


# ---------------------------------------------------------------------------
# subcommands

def run_analyze(args) -> int:
    spec = fileio.load_system(args.system)
    seq = fileio.load_sequence(args.instants)
    if len(seq.instants) != spec.n:
        raise InputError(f"system order is {spec.n} but the sequence has "
                         f"{len(seq.instants)} instants")
    report = analysis.analyze(spec, seq, tol_factor=_tolerance(args))
    print(f"determinant = {fmt(report.determinant)}")
    print(f"smallest_singular_value = {fmt(report.sigma_min)}")
    print(f"condition_number = {fmt(report.condition_number)}")
    print(f"threshold = {fmt(report.threshold)}")
    print(f"admissible = {'yes' if report.is_admissible else 'no'}")
    minimal = check_minimality(spec)
    print(f"minimal = {'yes' if minimal.minimal else 'no'}")
    if report.degree is not None:
        print(f"gram_determinant = {fmt(report.degree.normalized_gram_det)}")
        print(f"min_principal_angle = {fmt(report.degree.min_principal_angle)}")
        print(f"degree_condition_number = {fmt(report.degree.condition_number)}")
    if report.factors is not None:
        f = report.factors
        print(f"factor_N1 = {fmt(f.N1)}")
        print(f"factor_N2 = {fmt(f.N2)}")
        print(f"factor_M1 = {fmt(f.M1)}")
        print(f"factor_M2 = {fmt(f.M2)}")
        print(f"basis_ratio_ctrl = {fmt(f.ratio_ctrl)}")
        print(f"basis_ratio_obs = {fmt(f.ratio_obs)}")
    return EXIT_OK if report.is_admissible else EXIT_INADMISSIBLE


def _auto_method(spec) -> str:
    blocks = spec.eigen.blocks
    if spec.n == 2 and len(blocks) == 1 and blocks[0].kind == "pair":
        return "closed"
    if spec.n == 3 and sorted(b.kind for b in blocks) == ["pair", "real"]:
        pair = next(b for b in blocks if b.kind == "pair")
        if pair.value.real != 0.0:
            return "geometric"
    return "generic"


def run_design(args) -> int:
    spec = fileio.load_system(args.system)
    method = args.method if args.method != "auto" else _auto_method(spec)
    trace = None
    if method == "closed":
        blocks = spec.eigen.blocks
        if spec.n != 2 or len(blocks) != 1 or blocks[0].kind != "pair":
            raise InputError("closed-form design needs a 2nd-order complex pair")
        a, b = blocks[0].value.real, blocks[0].value.imag
        result = design.optimal_interval_second_order(a, b, args.t0, args.m)
    elif method == "geometric":
        pair = next((b for b in spec.eigen.blocks if b.kind == "pair"), None)
        if pair is None:
            raise InputError("geometric design needs a complex pair")
        t1 = args.t1 if args.t1 is not None else args.t0 + math.pi / (2.0 * pair.value.imag)
        result, trace = design.next_instant_third_order(spec, args.t0, t1,
                                                        m_max=args.m_max)
    else:
        result = design.design_sequence_generic(spec, args.t0,
                                                bounds=(args.dmin, args.dmax),
                                                steps=args.steps)
    print(f"method = {result.method}")
    print("instants = " + " ".join(fmt(t) for t in result.sequence.instants))
    if result.branch_m is not None:
        print(f"branch_m = {result.branch_m}")
    print(f"gram_determinant = {fmt(result.metric.normalized_gram_det)}")
    print(f"min_principal_angle = {fmt(result.metric.min_principal_angle)}")
    if trace is not None and args.trace is not None:
        design.export_geometry_csv(trace, args.trace)
        print(f"trace_written = {args.trace}")
    return EXIT_OK


def run_verify(args) -> int:
    spec = fileio.load_system(args.system)
    seq = fileio.load_sequence(args.instants)
    if len(seq.instants) != spec.n:
        raise InputError(f"system order is {spec.n} but the sequence has "
                         f"{len(seq.instants)} instants")
    if seq.final_instant is None:
        raise InputError("verify needs 'final_instant' for the controllability leg")
    real = observability_canonical(spec)
    rng = np.random.default_rng(args.seed)
    x0 = rng.standard_normal(spec.n)
    try:
        plan = simulate.deadbeat_inputs(real, x0, seq)
        traj = simulate.simulate_impulse_train(real, x0, plan)
        residual_ctrl = float(np.linalg.norm(traj.final_state) / np.linalg.norm(x0))
        av = analysis.alphas(seq)
        jf_outputs = np.array([float(real.c @ simulate.state_transition(real, x0, a))
                               for a in av.alphas])
        x0_hat = simulate.reconstruct_initial_state(real, jf_outputs, av)
        residual_rec = float(np.linalg.norm(x0_hat - x0) / np.linalg.norm(x0))
    except RankDeficientError as exc:
        print("inadmissible_sequence = yes")
        print(f"condition_number = {fmt(exc.condition_number)}")
        return EXIT_INADMISSIBLE
    print(f"deadbeat_residual = {fmt(residual_ctrl)}")
    print(f"reconstruction_residual = {fmt(residual_rec)}")
    ok = residual_ctrl <= RESIDUAL_TOL and residual_rec <= RESIDUAL_TOL
    print(f"verified = {'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_INADMISSIBLE


def _noise_amplification(spec, real, seq, eps, trials, rng) -> float:
    av = analysis.alphas(seq)
    errors = []
    for _ in range(trials):
        x0 = rng.standard_normal(spec.n)
        outputs = np.array([float(real.c @ simulate.state_transition(real, x0, a))
                            for a in av.alphas])
        noisy = outputs + rng.normal(0.0, eps, spec.n)
        try:
            x0_hat = simulate.reconstruct_initial_state(real, noisy, av)
        except RankDeficientError:
            return math.inf
        errors.append(float(np.linalg.norm(x0_hat - x0)))
    return float(np.median(errors)) / eps


def run_sweep(args) -> int:
    spec = fileio.load_system(args.system)
    if args.points < 1:
        raise InputError("need at least one sweep point")
    if args.noise <= 0:
        raise InputError("noise magnitude must be positive")
    real = observability_canonical(spec)
    tol = _tolerance(args)
    writer = csv.writer(sys.stdout)
    writer.writerow(["scale", "determinant", "gram_det",
                     "condition_number", "noise_amplification"])
    scales = np.linspace(args.start, args.stop, args.points)
    minimal = check_minimality(spec).minimal
    for idx, s in enumerate(scales):
        if s <= 0:
            raise InputError("interval scale must stay positive over the sweep")
        seq = analysis.SamplingSequence(tuple(i * s for i in range(spec.n)),
                                        final_instant=spec.n * s)
        av = analysis.alphas(seq)
        report = analysis.joint_test(analysis.fundamental_matrix(spec.eigen, av), tol)
        gram = (analysis.degree_metrics(spec, av).normalized_gram_det
                if minimal else math.nan)
        rng = np.random.default_rng(args.seed * 1000003 + idx)
        amp = _noise_amplification(spec, real, seq, args.noise, args.trials, rng)
        writer.writerow([fmt(s), fmt(report.determinant), fmt(gram),
                         fmt(report.condition_number), fmt(amp)])
    return EXIT_OK


def run_geometry(args) -> int:
    spec = fileio.load_system(args.system)
    seq = fileio.load_sequence(args.instants)
    if len(seq.instants) < 2:
        raise InputError("geometry needs at least two instants (t0, t1)")
    t0, t1 = seq.instants[0], seq.instants[1]
    result, trace = design.next_instant_third_order(spec, t0, t1)
    design.export_geometry_csv(trace, args.out)
    print("instants = " + " ".join(fmt(t) for t in result.sequence.instants))
    print(f"branch_m = {result.branch_m}")
    print(f"rotation_angle = {fmt(trace.rotation_angle)}")
    print(f"mu = {fmt(trace.mu)}")
    print(f"gram_determinant = {fmt(result.metric.normalized_gram_det)}")
    print(f"trace_written = {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        runner = {
            "analyze": run_analyze,
            "design": run_design,
            "verify": run_verify,
            "sweep": run_sweep,
            "geometry": run_geometry,
        }[args.command]
        return runner(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except NuSampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
