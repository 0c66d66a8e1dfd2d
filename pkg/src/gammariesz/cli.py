"""Command-line interface: ``gammariesz <command> ...``.

Exit codes: 0 success, 2 negative verdict (not a Riesz basis, not orthonormal,
infeasible sampling), 1 any other error.  Set ``RIESZ_LOG=DEBUG`` (or INFO,
WARNING, ...) for log output on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from .dual import dual_exact_laurent, dual_generator
from .exceptions import (
    GammaRieszError,
    InfeasibleSamplingError,
    NonMonomialDeterminantError,
    NotRieszBasisError,
)
from .io import (
    generator_from_json,
    read_json,
    samples_from_csv,
    samples_to_csv,
    series_to_csv,
    signal_from_json,
    signal_to_json,
    write_json,
)
from .oracles import run_verification
from .sampling import (
    OrbitExpansion,
    coefficients_from_samples,
    dinf_crystal,
    dinf_spline_case,
    pointwise_sample_signal,
    sample_function,
    spline_generator,
)
from .signal import GammaSignal
from .spectral import FrequencyGrid, onb_check, riesz_analyze, transfer_matrix
from .validation import as_fraction, check_grid_size, check_sampling_offset, check_tolerance

logger = logging.getLogger("gammariesz")

EXIT_OK, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2


def _emit(text: str, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _tolerance(args):
    return check_tolerance(args.det_floor, args.atol, args.rtol, args.max_refine)


def _grid(args, group):
    return FrequencyGrid.for_group(group, check_grid_size(args.grid))


def _load_signal(path) -> GammaSignal:
    return signal_from_json(read_json(path))


def _load_generator(path):
    return spline_generator() if path is None else generator_from_json(read_json(path))


# -- commands ------------------------------------------------------------------


def cmd_analyze(args) -> int:
    f = _load_signal(args.signal)
    report = riesz_analyze(transfer_matrix(f, _grid(args, f.group)), _tolerance(args))
    _emit(write_json(report), args.output)
    return EXIT_OK if report.riesz else EXIT_NEGATIVE


def cmd_dual(args) -> int:
    f = _load_signal(args.signal)
    if args.exact:
        try:
            res = dual_exact_laurent(f)
        except NonMonomialDeterminantError as exc:
            logger.error("%s", exc)
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NEGATIVE
    else:
        res = None
        if not f.group.is_finite:
            try:
                res = dual_exact_laurent(f)
            except NonMonomialDeterminantError:
                logger.info("determinant is not a monomial; using the grid dual")
        if res is None:
            res = dual_generator(f, _grid(args, f.group), _tolerance(args))
        if res.tail_energy or res.edge_energy:
            logger.warning("dual truncation: tail energy %.3g, edge energy %.3g", res.tail_energy, res.edge_energy)
    _emit(write_json(signal_to_json(res.signal)), args.output)
    return EXIT_OK


def cmd_onb_check(args) -> int:
    f = _load_signal(args.signal)
    tol = _tolerance(args)
    F = transfer_matrix(f, _grid(args, f.group))
    ok = onb_check(F, f, tol)
    dev = float(np.max(np.abs(F.gram() - np.eye(F.kappa))))
    _emit(write_json({"onb": ok, "max_deviation": dev, "atol": tol.atol, "grid": F.grid.describe()}), args.output)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _function_to_sample(args):
    phi = _load_generator(args.generator)
    if args.coeffs is None:
        return phi
    a = _load_signal(args.coeffs)
    return OrbitExpansion(dinf_crystal(), phi, a)


def cmd_sample(args) -> int:
    p = as_fraction(args.p)
    f = _function_to_sample(args)
    _emit(samples_to_csv(sample_function(dinf_crystal(), f, p)), args.output)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    crystal = dinf_crystal()
    p = as_fraction(args.p)
    phi = _load_generator(args.generator)
    with open(args.samples) as fh:
        samples = samples_from_csv(fh.read(), crystal.group)
    fp = pointwise_sample_signal(crystal, phi, p)
    try:
        g = dual_exact_laurent(fp).signal
    except NonMonomialDeterminantError:
        g = dual_generator(fp, _grid(args, crystal.group), _tolerance(args)).signal
    Phi = OrbitExpansion(crystal, phi, g)
    t = np.linspace(args.t_min, args.t_max, args.points)
    values = OrbitExpansion(crystal, Phi, samples)(t)
    _emit(series_to_csv(t, values), args.output)
    return EXIT_OK


def _spline_report(p: Fraction, seed: int, args) -> tuple:
    case = dinf_spline_case(p)
    report = {
        "p": p,
        "phi_values": case.values,
        "C": case.C,
        "D": case.D,
        "C_text": str(case.C),
        "D_text": str(case.D),
        "feasible": case.feasible,
        "compact_support": case.compact_support,
        "filters": {"f1": {str(k): v for k, v in case.f1.items()}, "f-1": {str(k): v for k, v in case.fm1.items()}},
    }
    if not case.feasible:
        report["message"] = f"|C| <= 2|D| (C={case.C}, D={case.D}): sampling at n +/- p is not stable"
        return report, EXIT_NEGATIVE
    size = check_grid_size(args.grid) or (1 << 16)
    analysis = case.analysis(size, _tolerance(args))
    A_closed, B_closed = case.closed_bounds(size)
    report["bounds"] = {
        "A_eig": analysis.A_eig,
        "B_eig": analysis.B_eig,
        "A_sing": analysis.A_sing,
        "B_sing": analysis.B_sing,
        "closed_form_A_eig": A_closed,
        "closed_form_B_eig": B_closed,
        "condition_eig": analysis.condition_eig,
        "condition_sing": analysis.condition_sing,
        "condition_closed_form": float(np.sqrt(B_closed / A_closed)),
        "det_inf": analysis.det_inf,
        "grid_size": size,
        "riesz": analysis.riesz,
        "note": "condition_eig = sqrt(B_eig/A_eig) on the grid; condition_closed_form uses the closed-form "
                "extrema of the filters; condition_sing = sqrt(condition_eig)",
    }
    dual = case.dual()
    Phi = case.interpolator()
    report["dual"] = {"exact": dual.exact, "coefficients": signal_to_json(dual.signal)["phases"]}
    report["interpolator"] = {
        "support": [Phi.lower[0], Phi.upper[0]],
        "coefficients": signal_to_json(dual.signal)["phases"],
    }
    # round trip on a random element of the space
    rng = np.random.default_rng(seed)
    crystal = case.crystal
    items = [((n,), h, rng.standard_normal()) for h in range(2) for n in range(-4, 5)]
    a = GammaSignal.from_items(crystal.group, [((n, h), v) for n, h, v in items])
    f = OrbitExpansion(crystal, case.phi, a)
    samples = sample_function(crystal, f, p)
    t = np.linspace(-4, 4, 1000)
    err = float(np.max(np.abs(OrbitExpansion(crystal, Phi, samples)(t) - f(t))))
    coef_err = coefficients_from_samples(samples, dual.signal).max_abs_diff(a)
    report["round_trip"] = {"seed": seed, "points": 1000, "max_error": err, "coefficient_error": float(coef_err)}
    return report, EXIT_OK


def cmd_demo(args) -> int:
    p = check_sampling_offset(args.p)
    report, code = _spline_report(p, args.seed, args)
    _emit(write_json(report), args.output)
    return code


def cmd_verify(args) -> int:
    rep = run_verification(seed=args.seed)
    if args.json:
        _emit(write_json(rep.to_dict()), args.output)
    else:
        lines = [
            f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}  (error {c['error']:.2e} <= {c['tol']:.0e})"
            for c in rep.checks
        ]
        lines.append("all checks passed" if rep.passed else "SOME CHECKS FAILED")
        _emit("\n".join(lines), args.output)
    return EXIT_OK if rep.passed else EXIT_ERROR


# -- parser ------------------------------------------------------------------------


def _common(sp, spectral=True):
    sp.add_argument("-o", "--output", help="write the result here instead of stdout")
    if spectral:
        sp.add_argument("--grid", type=int, default=None, help="frequency-grid size per dimension (power of 2)")
        sp.add_argument("--max-refine", type=int, default=6, help="maximum number of grid doublings")
        sp.add_argument("--det-floor", type=float, default=1e-10, help="Riesz threshold on ess inf |det F|")
        sp.add_argument("--atol", type=float, default=1e-9, help="absolute tolerance (unitarity checks)")
        sp.add_argument("--rtol", type=float, default=1e-9, help="relative tolerance for grid refinement")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gammariesz",
        description="Riesz-basis analysis, dual generators and sampling for semidirect-product groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("analyze", help="bounds and verdicts for a generator (JSON report)")
    sp.add_argument("signal", help="signal JSON file")
    _common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("dual", help="dual generator (signal JSON)")
    sp.add_argument("signal")
    sp.add_argument("--exact", action="store_true", help="require the exact Laurent route")
    _common(sp)
    sp.set_defaults(func=cmd_dual)

    sp = sub.add_parser("onb-check", help="orthonormal-basis test")
    sp.add_argument("signal")
    _common(sp)
    sp.set_defaults(func=cmd_onb_check)

    sp = sub.add_parser("sample", help="pointwise samples f(n + p), f(n - p) on D_inf (CSV)")
    sp.add_argument("--generator", help="piecewise-polynomial JSON (default: the degree-6 spline)")
    sp.add_argument("--coeffs", help="signal JSON: sample sum a(gamma) U(gamma) phi instead of phi")
    sp.add_argument("--p", default="1/4", help="sampling offset (exact rational, e.g. 0.25 or 1/4)")
    _common(sp, spectral=False)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("reconstruct", help="rebuild a function from D_inf samples (CSV of t,value)")
    sp.add_argument("samples", help="samples CSV (n,h,value)")
    sp.add_argument("--generator")
    sp.add_argument("--p", default="1/4")
    sp.add_argument("--t-min", type=float, default=-4.0)
    sp.add_argument("--t-max", type=float, default=4.0)
    sp.add_argument("--points", type=int, default=1000)
    _common(sp)
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("demo", help="worked examples")
    sp.add_argument("name", choices=["dinf-spline"])
    sp.add_argument("--p", default="1/4", help="sampling offset in (0, 1/2)")
    sp.add_argument("--seed", type=int, default=0)
    _common(sp)
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("verify", help="cross-check fast paths against brute-force oracles")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    _common(sp, spectral=False)
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("RIESZ_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleSamplingError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except NotRieszBasisError as exc:
        print(f"not a Riesz basis: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (GammaRieszError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
