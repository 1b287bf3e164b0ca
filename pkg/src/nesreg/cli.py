"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 invalid input (bad flags,
out-of-domain parameters, unwritable output), 3 numeric failure
(singularity, non-convergence, broken weak-coupling assumption). Errors are
reported on stderr as ``{"error": {"kind": ..., "message": ...}}``.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from nesreg import blurred_lt as blt
from nesreg import effective_dimension as ed
from nesreg import kinematics as kin
from nesreg import loop
from nesreg import verify as ver
from nesreg.errors import DomainError, NESError, NumericError
from nesreg.io import render_csv, render_json, table_records

EXIT_OK, EXIT_FAILED, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(render_json({"error": {"kind": "usage", "message": message}}))
        self.exit(EXIT_VALIDATION)


def _table(columns, rows):
    return {"columns": tuple(columns), "rows": rows}


def _emit(args, payload):
    """Render ``payload`` (a table or a flat record) in the requested format."""
    fmt = args.format
    if "columns" in payload:
        cols, rows = payload["columns"], payload["rows"]
        text = render_csv(cols, rows) if fmt == "csv" else render_json(table_records(cols, rows))
    elif fmt == "json":
        text = render_json(payload)
    else:
        flat = {k: v for k, v in payload.items() if not isinstance(v, (list, tuple, np.ndarray))}
        text = render_csv(tuple(flat), [tuple(flat.values())])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_figure2(args):
    return _table(ed.FIGURE2_COLUMNS, ed.figure2_data(args.points, args.sigma_max))


def cmd_figure3(args):
    masses = args.mass_gev or [128.0, 190.0, ed.DEFAULT_CONSTANTS.planck_energy_gev]
    rows = ed.figure3_data(masses, args.points, (args.ratio_min, args.ratio_max))
    return _table(ed.FIGURE3_COLUMNS, rows)


def _kstar_from(args):
    if args.kstar is not None:
        return args.kstar
    return loop.kstar(args.mass_gev)


def cmd_dzero(args):
    return loop.dzero(_kstar_from(args), args.mode, args.tolerance).as_record()


def cmd_mass_correction(args):
    return loop.mass_correction(args.mass_gev, args.coupling, args.mode, tolerance=args.tolerance).as_record()


def cmd_theta_table(args):
    return _table(loop.THETA_COLUMNS, loop.theta_table(args.mass_gev or loop.DEFAULT_MASSES_GEV))


def _blur_model(args):
    if args.rho_prime is not None and args.sigma is not None:
        raise DomainError("give either --sigma or --rho-prime, not both")
    if args.rho_prime is None:
        return blt.make_model(args.rho, args.sigma if args.sigma is not None else 0.5,
                              args.s2, args.e2, args.seed, args.dim)
    sigma = kin.sigma_between_frames(args.rho, args.rho_prime)[0].sigma
    return blt.FluctuationModel(
        g=kin.metric_from_rho(args.rho, dim=args.dim),
        g_prime=kin.metric_from_rho(args.rho_prime, dim=args.dim),
        boost=kin.boost_from_sigma(sigma, dim=args.dim),
        s2=args.s2,
        e2=args.e2,
        seed=args.seed,
    )


def cmd_blur_estimate(args):
    model = _blur_model(args)
    mom = blt.accumulate_moments(model, args.samples)
    n_true = model.boost.matrix
    inv = blt.estimate_inverse_form(mom, model.g, model.s2, n_true)
    adj = blt.estimate_adjugate_form(mom, n_true=n_true)
    report = {
        "dim": model.dim,
        "rho": model.g.rho,
        "rho_prime": model.g_prime.rho,
        "sigma": model.boost.sigma,
        "seed": model.seed,
        "inverse_max_abs_error": inv.max_abs_error,
        "adjugate_max_abs_error": adj.max_abs_error,
    }
    report.update(blt.residual_variance_check(model, mom))
    if args.format == "csv":
        d = model.dim
        rows = [(i, j, n_true[i, j], inv.n_hat[i, j], adj.n_hat[i, j]) for i in range(d) for j in range(d)]
        return _table(("row", "col", "n_true", "n_hat_inverse", "n_hat_adjugate"), rows)
    report.update(n_true=n_true.tolist(), n_hat_inverse=inv.n_hat.tolist(), n_hat_adjugate=adj.n_hat.tolist())
    return report


def cmd_verify(args):
    results = ver.run_properties(args.filter, seed=args.seed, rho=args.rho)
    if args.format == "text":
        width = max(len(f"{r[0]}/{r[1]}") for r in results)
        lines = [
            f"{(r[0] + '/' + r[1]).ljust(width)}  {r[2].upper():<18} residual={r[3]:.3e} tol={r[4]:.1e} {r[5]}".rstrip()
            for r in results
        ]
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(args, _table(ver.VERIFY_COLUMNS, results))
    return EXIT_OK if all(r[2] == "pass" for r in results) else EXIT_FAILED


def build_parser():
    parser = _Parser(prog="nesreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, default_format="csv", formats=("csv", "json")):
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=formats, default=default_format)
        p.add_argument("--seed", type=int, default=0)

    def mode(p):
        p.add_argument("--mode", choices=[m.value for m in loop.Mode], default=loop.Mode.PAPER.value)
        p.add_argument("--tolerance", type=float, default=1e-10, help="relative tolerance of the quadrature")

    p = sub.add_parser("figure2", help="metric parameters versus velocity ratio")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--sigma-max", type=float, default=10.0)
    common(p)
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("figure3", help="effective dimension versus E/E_p")
    p.add_argument("--mass-gev", type=float, action="append")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--ratio-min", type=float, default=1e-20)
    p.add_argument("--ratio-max", type=float, default=1e3)
    common(p)
    p.set_defaults(func=cmd_figure3)

    p = sub.add_parser("dzero", help="regularized loop integral D(0)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--mass-gev", type=float, default=128.0)
    g.add_argument("--kstar", type=float)
    mode(p)
    common(p)
    p.set_defaults(func=cmd_dzero)

    p = sub.add_parser("mass-correction", help="Theta, corrected mass and lifetime")
    p.add_argument("--mass-gev", type=float, default=128.0)
    p.add_argument("--coupling", type=float, default=0.0, help="coupling w in 1/(J s)")
    mode(p)
    common(p)
    p.set_defaults(func=cmd_mass_correction)

    p = sub.add_parser("theta-table", help="Theta for several rest energies")
    p.add_argument("--mass-gev", type=float, action="append")
    common(p)
    p.set_defaults(func=cmd_theta_table)

    p = sub.add_parser("blur-estimate", help="Monte Carlo recovery of a blurred boost")
    p.add_argument("--dim", type=int, choices=(2, 3, 4), default=4)
    p.add_argument("--rho", type=float, default=0.0, help="observer metric parameter")
    p.add_argument("--rho-prime", type=float, help="particle metric parameter (sets sigma)")
    p.add_argument("--sigma", type=float, help="boost velocity ratio (default 0.5)")
    p.add_argument("--s2", type=float, default=1.0)
    p.add_argument("--e2", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=1_000_000)
    common(p, default_format="json")
    p.set_defaults(func=cmd_blur_estimate)

    p = sub.add_parser("verify", help="run the invariant property suite")
    p.add_argument("--filter", action="append", choices=ver.GROUPS)
    p.add_argument("--rho", type=float, help="also check the metric at this rho")
    common(p, default_format="text", formats=("text", "csv", "json"))
    p.set_defaults(func=cmd_verify)
    return parser


def _fail(exc, code):
    kind = getattr(exc, "kind", type(exc).__name__)
    sys.stderr.write(render_json({"error": {"kind": kind, "message": str(exc)}}))
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            result = args.func(args)
            if args.command == "verify":
                return result
            _emit(args, result)
    except NumericError as exc:
        return _fail(exc, EXIT_NUMERIC)
    except (NESError, ValueError) as exc:
        return _fail(exc, EXIT_VALIDATION)
    except OSError as exc:
        return _fail(exc, EXIT_VALIDATION)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
