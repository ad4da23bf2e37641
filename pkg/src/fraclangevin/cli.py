"""Command-line front end.

    fraclangevin forward --input problem.toml [--out DIR]
    fraclangevin inverse --input problem.toml [--out DIR]
    fraclangevin verify  --input problem.toml [--out DIR] [--steps M] [--tol X]
    fraclangevin ml --alpha A --mu M --x X [X ...]

CSV goes to ``DIR/<command>.csv`` or, without ``--out``, to stdout. Human
readable notes go to stderr unless ``--quiet``.

Exit codes: 0 ok/unique, 1 invalid input, 2 gamma = 1, 3 solvable but not
unique, 4 unsolvable, 5 numerical failure (including a failed verification).
"""

from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateGamma,
    DimensionMismatch,
    DomainError,
    FracLangevinError,
    QuadratureError,
    Unsolvable,
)
from .forward import SampledSource, solve_forward
from .inverse import recover_source
from .mittag_leffler import MlParams, ml_eval
from .oracle import default_grid, integrate_mode
from .problem_file import load_problem

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_GAMMA_ONE = 2
EXIT_NON_UNIQUE = 3
EXIT_UNSOLVABLE = 4
EXIT_NUMERIC = 5

#: Closed form vs oracle is compared on at most this many + 1 oracle nodes.
VERIFY_POINTS = 64


def fmt(x) -> str:
    """17 significant digits, locale independent."""
    return format(float(x), ".17g")


def _row(*cells) -> str:
    return ",".join(c if isinstance(c, str) else fmt(c) for c in cells) + "\n"


class Reporter:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, msg: str):
        if not self.quiet:
            print(msg, file=sys.stderr)


def _emit(text: str, out_dir, name: str):
    if out_dir is None:
        sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / f"{name}.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def forward_csv(sol) -> str:
    buf = io.StringIO()
    buf.write("t,k,u_k\n")
    for i, t in enumerate(sol.t):
        for k in range(sol.u.shape[0]):
            buf.write(_row(t, str(k + 1), sol.u[k, i]))
    buf.write("# t,norm,norm1,tail\n")
    for i, t in enumerate(sol.t):
        buf.write("# " + _row(t, sol.norm[i], sol.norm1[i], sol.tail[i]))
    buf.write("# " + _row("nonlocal_residual", sol.nonlocal_residual))
    return buf.getvalue()


def cmd_forward(args, say) -> int:
    pf = load_problem(args.input)
    spec = pf.forward_spec()
    sol = solve_forward(spec, pf.nodes)
    _emit(forward_csv(sol), args.out, "forward")
    say(f"forward: {spec.n_modes} modes, {sol.t.size} times, "
        f"non-local residual {sol.nonlocal_residual:.3g}")
    return EXIT_OK


def inverse_csv(spec, res) -> str:
    cls = res.classification
    lam = spec.forward.eigenvalues
    free = set(res.free_indices)
    buf = io.StringIO()
    buf.write("k,lambda_k,f_k,delta_k,condition,free\n")
    for k in range(lam.size):
        buf.write(_row(str(k + 1), lam[k], res.f[k], cls.delta_values[k],
                       res.condition_numbers[k], "1" if k in free else "0"))
    buf.write("# " + _row("regime", cls.regime.value))
    buf.write("# " + _row("K0", ";".join(str(k + 1) for k in res.free_indices)))
    buf.write("# " + _row("unique", "1" if res.unique else "0"))
    buf.write("# " + _row("lower_bound_constant", cls.lower_bound_constant))
    buf.write("# " + _row("observation_residual", res.observation_residual))
    return buf.getvalue()


def cmd_inverse(args, say) -> int:
    pf = load_problem(args.input)
    spec = pf.inverse_spec()
    res = recover_source(spec)
    _emit(inverse_csv(spec, res), args.out, "inverse")
    cls = res.classification
    say(f"inverse: regime {cls.regime.value}, ||u(t0) - omega|| = {res.observation_residual:.3g}")
    if not res.unique:
        say("inverse: solvable but not unique; free modes (f_k set to 0): "
            + ", ".join(str(k + 1) for k in res.free_indices))
        return EXIT_NON_UNIQUE
    return EXIT_OK


def verify_rows(pf, steps: int, tol: float):
    """Closed form vs oracle for every mode; returns (rows, nonlocal residual, passed)."""
    spec = pf.forward_spec()
    grid = default_grid(spec.alpha, spec.T, steps)
    idx = np.unique(np.round(np.linspace(0, grid.M, min(VERIFY_POINTS, grid.M) + 1)).astype(int))
    sol = solve_forward(spec, grid.nodes[idx])
    rows = []
    ok = True
    for m in sol.modes:
        k = m.k
        if isinstance(spec.source, SampledSource):
            f = lambda t, k=k: spec.source.at(k, t)
        else:
            f = float(spec.source.f[k])
        run = integrate_mode(spec.alpha, spec.beta, m.lambda_k, m.b_k, float(spec.psi[k]), f, grid)
        closed = sol.u[k]
        scale = max(float(np.max(np.abs(closed))), 1e-300)
        err = float(np.max(np.abs(run.trajectory[idx] - closed))) / scale
        passed = err <= tol
        ok &= passed
        rows.append((k, m.lambda_k, err, run.residual_late, run.observed_order, passed))
    nl_ok = sol.nonlocal_residual <= 1e-6 * (1.0 + float(np.linalg.norm(spec.phi)))
    return rows, sol.nonlocal_residual, ok and nl_ok


def cmd_verify(args, say) -> int:
    pf = load_problem(args.input)
    steps = args.steps if args.steps is not None else pf.steps
    tol = args.tol if args.tol is not None else pf.tol
    rows, nl, ok = verify_rows(pf, steps, tol)
    buf = io.StringIO()
    buf.write("k,lambda_k,rel_error,residual_late,observed_order,pass\n")
    for k, lam, err, late, order, passed in rows:
        buf.write(_row(str(k + 1), lam, err, late, order, "1" if passed else "0"))
    buf.write("# " + _row("steps", str(steps)))
    buf.write("# " + _row("tol", tol))
    buf.write("# " + _row("nonlocal_residual", nl))
    buf.write("# " + _row("verdict", "PASS" if ok else "FAIL"))
    _emit(buf.getvalue(), args.out, "verify")
    for k, lam, err, late, order, passed in rows:
        say(f"mode {k + 1}: lambda={lam:g} rel_error={err:.3g} order={order:.2f} "
            f"{'pass' if passed else 'FAIL'}")
    say(f"verify: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_ml(args, say) -> int:
    params = MlParams(args.alpha, args.mu)
    buf = io.StringIO()
    buf.write("alpha,mu,x,value,regime,terms_used,error_bound\n")
    for x in args.x:
        r = ml_eval(params, x)
        buf.write(_row(args.alpha, args.mu, x, r.value, r.regime.name, str(r.terms_used), r.error_bound))
    _emit(buf.getvalue(), args.out, "ml")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraclangevin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, metavar="PATH", help="TOML problem file")
        p.add_argument("--out", metavar="DIR", help="directory for CSV output (default stdout)")
        p.add_argument("--quiet", action="store_true", help="no notes on stderr")

    common(sub.add_parser("forward", help="solve the forward non-local problem"))
    common(sub.add_parser("inverse", help="recover a constant source from u(t0) = omega"))
    p = sub.add_parser("verify", help="compare closed forms with the time-stepping oracle")
    common(p)
    p.add_argument("--steps", type=int, metavar="M", help="oracle grid steps")
    p.add_argument("--tol", type=float, metavar="X", help="relative L-inf tolerance")
    p = sub.add_parser("ml", help="evaluate E_{alpha,mu}(-x)")
    common(p, needs_input=False)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    return parser


COMMANDS = {"forward": cmd_forward, "inverse": cmd_inverse, "verify": cmd_verify, "ml": cmd_ml}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    say = Reporter(args.quiet)
    try:
        return COMMANDS[args.command](args, say)
    except DegenerateGamma as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GAMMA_ONE
    except Unsolvable as exc:
        print(f"error: unsolvable: {exc}", file=sys.stderr)
        return EXIT_UNSOLVABLE
    except (ConvergenceError, QuadratureError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, DimensionMismatch) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FracLangevinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
