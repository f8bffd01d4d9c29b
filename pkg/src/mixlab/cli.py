"""``mixlab`` command line: simulate, spectrum, dimension, lyapunov, markov, bf, kms.

Every command builds a report ``{command, version, config, config_hash,
results, diagnostics, wall_clock}``. With ``--out PREFIX`` the report goes
to ``PREFIX.json`` and tables to ``PREFIX[-name].csv`` (per ``--format``);
without it the report is printed. Exit codes: 2 invalid input,
3 numerical non-convergence, 4 inadmissible parameter.
"""

import argparse
import math
import os
import sys
import time
import warnings
from fractions import Fraction

import numpy as np

from . import __version__
from .cfrac import Coset, expansion
from .dimension import (
    AsymptoticRegimeWarning,
    HausdorffDimension,
    dimension_refinement,
    hensley_dim_asymptotic,
    lyapunov_spectral,
)
from .exceptions import ConvergenceError, DomainError, InadmissibleParameterError, MixlabError
from .io import atomic_write, config_hash, csv_text, dumps
from .kms import KMSState, kms_beta_bound, var0_h
from .lyapunov import GibbsDigitSampler, lyapunov_mc
from .markov import (
    block_structure_ok,
    bowen_franks,
    build_AN,
    is_aperiodic,
    is_irreducible,
    k_theory,
    spectral_radius,
)
from .mixmaster import GOLDEN, GeodesicData, axis_frequencies, evolve_universe
from .surd import parse_surd
from .transfer import TransferOperator

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_INADMISSIBLE = 0, 2, 3, 4
# options that change where or how results are written, not what they are
NON_RESULT_KEYS = {"config", "out", "format", "threads", "command"}


class Outcome:
    def __init__(self, results, diagnostics=None, tables=None, files=None, summary=""):
        self.results = results
        self.diagnostics = diagnostics or {}
        self.tables = tables or {}
        self.files = files or {}
        self.summary = summary


def bound(text):
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "none", "oo"):
        return None
    try:
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"N must be an integer or 'inf', got {text!r}")


def int_list(text):
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def float_list(text):
    """``a,b,c`` or ``start:stop:count``."""
    t = str(text).replace(" ", "")
    try:
        if ":" in t:
            a, b, n = t.split(":")
            return np.linspace(float(a), float(b), int(n)).tolist()
        return [float(v) for v in t.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected floats or start:stop:count, got {text!r}")


def parse_omega(text):
    """Surd names and expressions exactly, ``p/q`` exactly, decimals with a warning."""
    t = str(text).strip()
    if "sqrt" in t or t in ("golden", "sqrt2m1"):
        return parse_surd(t)
    if "/" in t:
        try:
            return Fraction(t)
        except ValueError:
            raise DomainError(f"cannot parse {text!r}") from None
    try:
        value = float(t)
    except ValueError:
        raise DomainError(f"cannot parse omega {text!r}") from None
    warnings.warn(
        "decimal omega is only reliable to about 15 significant digits; "
        "prefer a surd expression or --digits",
        UserWarning,
        stacklevel=2,
    )
    return value


def read_config(path):
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _common(p, *, seed=False, tol=None):
    p.add_argument("--config", help="key = value file; command-line flags take precedence")
    p.add_argument("--out", help="output prefix; writes PREFIX.json and CSV tables")
    p.add_argument("--format", choices=("json", "csv", "both"), default="json")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $MIXLAB_THREADS or 1)")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if tol is not None:
        p.add_argument("--tol", type=float, default=tol)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mixlab", description="Mixmaster dynamics and continued-fraction invariants."
    )
    parser.add_argument("--version", action="version", version=f"mixlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="eras and cycles of a mixmaster universe")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--omega", help="forward endpoint: golden, sqrt2m1, (a+b*sqrt(d))/c, decimal")
    src.add_argument("--digits", type=int_list, help="explicit digits, e.g. 3,1,2")
    p.add_argument("--omega-minus", type=float, default=-GOLDEN)
    p.add_argument("--coset", default="0", help="initial sheet: 0, 1 or inf")
    p.add_argument("--eras", type=int, default=10)
    p.add_argument("--backward", type=int, default=0, help="eras reconstructed from omega-minus")
    p.add_argument("--max-cycles", type=int, default=10_000)
    _common(p, seed=True)

    p = sub.add_parser("spectrum", help="leading eigenvalue and pressure of the transfer operator")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--beta-sweep", type=float_list, help="list a,b,c or start:stop:count")
    p.add_argument("--N", type=bound, default=None)
    p.add_argument("--M", type=int, default=None, help="collocation size")
    p.add_argument("--depth", type=int, default=None, help="Ulam cylinder depth")
    p.add_argument("--coset", action="store_true", help="three-sheet operator")
    p.add_argument("--samples", type=int, default=101, help="eigenfunction grid size")
    _common(p, tol=1e-12)

    p = sub.add_parser("dimension", help="Hausdorff dimension of E_N")
    p.add_argument("--N", type=bound, default=2)
    p.add_argument("--M", type=int, default=32)
    p.add_argument("--depth", type=int_list, default=None,
                   help="Ulam refinement depths (default 8,10,12 for N=2)")
    _common(p, tol=1e-10)

    p = sub.add_parser("lyapunov", help="Lyapunov exponent: spectral and Monte Carlo")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--omega", help="a single point (surd, fraction, decimal)")
    src.add_argument("--digits", type=int_list, help="a single digit string")
    p.add_argument("--N", type=bound, default=None)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--length", type=int, default=10_000, help="digits per sample")
    p.add_argument("--h", type=float, default=1e-3, help="finite-difference step in beta")
    _common(p, seed=True)

    p = sub.add_parser("markov", help="the matrix A_N and its graph properties")
    p.add_argument("--N", type=bound, default=2)
    p.add_argument("--convention", choices=("lemma", "transpose"), default="lemma")
    _common(p)

    p = sub.add_parser("bf", help="Bowen-Franks group and K-theory of A_N")
    p.add_argument("--N", type=bound, default=2)
    _common(p)

    p = sub.add_parser("kms", help="KMS admissibility and cylinder masses")
    p.add_argument("--N", type=bound, default=2)
    p.add_argument("--beta", type=float, default=1.2)
    p.add_argument("--depth", type=int, default=None, help="Ulam cylinder depth")
    p.add_argument("--length", type=int, default=2, help="word length of the mass table")
    _common(p, seed=True, tol=1e-13)
    return parser


def _need_finite(N, what):
    if N is None:
        raise DomainError(f"{what} needs a finite --N")
    return N


def cmd_simulate(a):
    if a.digits:
        omega = a.digits
    elif a.omega:
        omega = parse_omega(a.omega)
    else:
        omega = parse_surd("golden")
    if isinstance(omega, Fraction):
        raise DomainError(
            f"omega+ = {omega} is rational: the geodesic ends at a cusp after "
            f"{len(expansion(omega).digits(10**6))} eras"
        )
    g = GeodesicData(omega, a.omega_minus, Coset.parse(a.coset))
    traj = evolve_universe(g, a.eras, backward=a.backward)
    if traj.cusp:
        raise DomainError(f"orbit reaches a cusp after {len(traj)} eras (rational endpoint)")
    results = {
        "digits": traj.digits,
        "axis_frequencies": axis_frequencies(traj),
        "trajectory": traj.to_json(a.max_cycles),
    }
    diag = {"eras_requested": a.eras, "eras_produced": len(traj), "truncated": traj.truncated}
    lines = [f"{'era':>4} {'k':>4} {'u':>12} {'axes':>5} {'coset':>5} {'delta':>10}"]
    for e in traj:
        lines.append(f"{e.n:>4} {e.k:>4} {e.u:>12.6f} {e.axes:>5} {str(e.coset):>5} {e.delta:>10.6f}")
    if traj.truncated:
        lines.append(f"warning: digits exhausted after {len(traj)} eras (truncated)")
    return Outcome(results, diag, files={"cycles.csv": traj.to_csv(a.max_cycles)},
                   summary="\n".join(lines))


def _spectrum_one(a, beta):
    scheme = "ulam" if a.depth is not None else "collocation"
    resolution = a.depth if a.depth is not None else a.M
    est = TransferOperator(beta=beta, N=a.N, scheme=scheme, resolution=resolution,
                           coset=a.coset, tol=a.tol).fit()
    return est


def cmd_spectrum(a):
    if a.beta_sweep:
        rows = []
        for beta in a.beta_sweep:
            est = _spectrum_one(a, beta)
            rows.append((beta, est.eigenvalue_, est.pressure_, est.residual_))
        results = {"sweep": [dict(zip(("beta", "eta", "pressure", "residual"), r)) for r in rows],
                   **{k: v for k, v in est.to_json().items() if k in ("N", "scheme", "resolution")}}
        lines = [f"{'beta':>10} {'eta':>20} {'P':>20}"]
        lines += [f"{r[0]:>10.5f} {r[1]:>20.14f} {r[2]:>20.14f}" for r in rows]
        return Outcome(results, {"points": len(rows), "tol": a.tol},
                       tables={"sweep": (("beta", "eta", "pressure", "residual"), rows)},
                       summary="\n".join(lines))
    est = _spectrum_one(a, a.beta)
    basis = est.operator_.basis
    sheets = ("0", "1", "inf") if a.coset else ("f",)
    if hasattr(basis, "midpoints"):
        order = np.argsort(basis.midpoints)
        x = basis.midpoints[order]
        f = est.eigenfunction_.reshape(len(sheets), -1)[:, order]
    else:
        x = np.linspace(0.0, 1.0, a.samples)
        f = est.transform(x).reshape(len(x), -1).T
    header = ("x",) + tuple(f"f_{s}" if a.coset else "f" for s in sheets)
    rows = [(xi, *f[:, i]) for i, xi in enumerate(x)]
    results = est.to_json()
    summary = (f"beta={a.beta} N={'inf' if a.N is None else a.N} scheme={results['scheme']} "
               f"resolution={results['resolution']}\neta = {est.eigenvalue_:.15g}\n"
               f"P   = {est.pressure_:.15g}")
    return Outcome(results, {"residual": est.residual_, "iterations": est.n_iter_, "tol": a.tol},
                   tables={"eigenfunction": (header, rows)}, summary=summary)


def cmd_dimension(a):
    N = _need_finite(a.N, "dimension")
    est = HausdorffDimension(N=N, tol=a.tol, resolution=a.M).fit()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticRegimeWarning)
        asym = hensley_dim_asymptotic(N)
    depths = a.depth if a.depth else ([8, 10, 12] if N == 2 else [])
    table, extrap = dimension_refinement(N, depths, tol=a.tol) if depths else ([], None)
    results = {
        "N": N,
        "dimension": est.dimension_,
        "beta_star": est.beta_star_,
        "asymptotic": asym,
        "asymptotic_regime": N >= 8,
        "refinement": [{"depth": d, "dimension": v, "diff": dd} for d, v, dd in table],
        "extrapolated": extrap,
    }
    diag = {"scheme": "collocation", "M": a.M, "tol": a.tol,
            "pressure_at_root": est.pressure_at_root_, "solver_steps": len(est.history_)}
    lines = [f"dim E_{N} = {est.dimension_:.12f}  (collocation M={a.M})",
             f"asymptotic formula: {asym:.12f}"]
    if table:
        lines.append(f"{'depth':>6} {'dimension':>16} {'difference':>12}")
        for d, v, dd in table:
            lines.append(f"{d:>6} {v:>16.12f} {'' if dd is None else f'{dd:>12.3e}'}")
        lines.append(f"extrapolated: {extrap:.12f}")
    rows = [(d, v) for d, v, _ in table]
    return Outcome(results, diag, tables={"refinement": (("depth", "dimension"), rows)},
                   summary="\n".join(lines))


def cmd_lyapunov(a):
    if a.omega or a.digits:
        point = a.digits if a.digits else parse_omega(a.omega)
        est = lyapunov_mc(point, a.length)
        results = {"mode": "point", "lyapunov": est.mean, "n_digits": a.length}
        summary = f"lambda = {est.mean:.12f} over {a.length} digits"
        return Outcome(results, {"discarded": est.n_discarded}, summary=summary)
    threads = a.threads
    if a.N is None:
        spectral = lyapunov_spectral(None, a.h)
        mc = lyapunov_mc("lebesgue", a.length, a.samples, a.seed, threads=threads)
        reference = math.pi**2 / (6 * math.log(2))
    else:
        sampler = GibbsDigitSampler(N=a.N).fit()
        spectral = lyapunov_spectral(a.N, a.h, beta=sampler.beta_star_)
        mc = lyapunov_mc(sampler, a.length, a.samples, a.seed, threads=threads)
        reference = None
    results = {"N": a.N, "spectral": spectral, "monte_carlo": mc.to_json(),
               "relative_difference": (mc.mean - spectral) / spectral}
    if reference is not None:
        results["lambda_0"] = reference
    summary = (f"spectral  lambda = {spectral:.10f}\n"
               f"Monte Carlo lambda = {mc.mean:.10f} +- {mc.stderr:.2e} "
               f"({mc.n_samples} samples x {a.length} digits)")
    return Outcome(results, {"h": a.h, "seed": a.seed}, summary=summary)


def cmd_markov(a):
    N = _need_finite(a.N, "markov")
    m = build_AN(N, a.convention)
    conn = is_irreducible(m)
    per = is_aperiodic(m) if conn else None
    results = {
        **m.to_json(),
        "block_structure_ok": block_structure_ok(m),
        "irreducible": conn.irreducible,
        "period": per.period if per else None,
        "aperiodic": per.aperiodic if per else False,
        "spectral_radius": spectral_radius(m),
    }
    summary = (f"A_{N}: {m.size}x{m.size}, irreducible={conn.irreducible}, "
               f"period={results['period']}, spectral radius={results['spectral_radius']}")
    return Outcome(results, {"states": [f"({k},{t})" for k, t in m.states]},
                   files={"edges": m.edge_list()}, summary=summary)


def cmd_bf(a):
    N = _need_finite(a.N, "bf")
    m = build_AN(N)
    bf = bowen_franks(m)
    kt = k_theory(m)
    results = {"N": N, "bowen_franks": bf.to_json(), "k_theory": kt.to_json(),
               "transpose_agrees": bowen_franks(m.transpose()).divisors == bf.divisors}
    summary = (f"BF(A_{N}) = {bf.group()}  det(I - A) = {bf.det}\n"
               f"K0 torsion = {kt.K0_torsion}, K0 free rank = {kt.K0_free_rank}, "
               f"K1 rank = {kt.K1_rank}")
    rows = [(i, d) for i, d in enumerate(bf.divisors)]
    return Outcome(results, tables={"divisors": (("index", "divisor"), rows)}, summary=summary)


def cmd_kms(a):
    N = _need_finite(a.N, "kms")
    bound_ = kms_beta_bound(N)
    if not a.beta < bound_:
        raise InadmissibleParameterError(
            f"beta={a.beta} is not below the uniqueness bound {bound_:.6f} for N={N}"
        )
    state = KMSState(N=N, beta=a.beta, depth=a.depth, tol=a.tol).fit()
    v = var0_h(a.beta, N)
    level = state.finite_level_state(a.length)
    rows = [(" ".join(map(str, w)), *level["weights"][i]) for i, w in enumerate(level["words"])]
    results = {
        **state.spec_.to_json(),
        "var0": {"formula_value": v.formula_value, "exact_value": v.exact_value,
                 "x_min": v.x_min, "x_max": v.x_max},
        "cylinder_masses": [{"word": list(w), "masses": level["weights"][i].tolist()}
                            for i, w in enumerate(level["words"])],
        "level_norm": level["norm"],
    }
    lines = [f"beta={a.beta} < bound {bound_:.6f}: admissible, u = P(beta) = {state.spec_.u:.10f}",
             f"{'word':>12} {'t=0':>12} {'t=1':>12} {'t=inf':>12}"]
    lines += [f"{r[0]:>12} {r[1]:>12.8f} {r[2]:>12.8f} {r[3]:>12.8f}" for r in rows]
    return Outcome(results, {"depth": state.depth_, "residual": state.result_.residual,
                             "tol": a.tol},
                   tables={"masses": (("word", "t0", "t1", "tinf"), rows)},
                   summary="\n".join(lines))


COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "dimension": cmd_dimension,
    "lyapunov": cmd_lyapunov,
    "markov": cmd_markov,
    "bf": cmd_bf,
    "kms": cmd_kms,
}


def _parse(parser, argv):
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        sub = parser._subparsers._group_actions[0].choices[args.command]
        config = read_config(args.config)
        known = {a.dest for a in sub._actions}
        unknown = set(config) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        sub.set_defaults(**config)
        args = parser.parse_args(argv)
    if args.threads is None:
        env = os.environ.get("MIXLAB_THREADS")
        args.threads = int(env) if env else 1
    if args.threads < 1:
        raise DomainError("--threads must be >= 1")
    for name in ("tol",):
        if hasattr(args, name) and not getattr(args, name) > 0:
            raise DomainError(f"--{name} must be > 0")
    return args


def run(argv=None):
    """Run a command and return ``(exit_code, report)``."""
    parser = build_parser()
    args = _parse(parser, argv)
    config = {k: v for k, v in sorted(vars(args).items()) if k not in NON_RESULT_KEYS}
    config = {"command": args.command, **config}
    t0 = time.perf_counter()
    outcome = COMMANDS[args.command](args)
    report = {
        "command": args.command,
        "version": __version__,
        "config": config,
        "config_hash": config_hash(config),
        "results": outcome.results,
        "diagnostics": outcome.diagnostics,
        "wall_clock": round(time.perf_counter() - t0, 6),
    }
    if args.out:
        if args.format in ("json", "both"):
            atomic_write(args.out + ".json", dumps(report))
        if args.format in ("csv", "both"):
            for name, (header, rows) in outcome.tables.items():
                atomic_write(f"{args.out}-{name}.csv", csv_text(header, rows))
        for name, text in outcome.files.items():
            atomic_write(f"{args.out}-{name}" if "." in name else f"{args.out}.{name}", text)
        print(outcome.summary)
    else:
        print(outcome.summary)
        print(dumps(report), end="")
    return EXIT_OK, report


def main(argv=None):
    try:
        code, _ = run(argv)
        return code
    except InadmissibleParameterError as exc:
        print(f"mixlab: inadmissible parameter: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except ConvergenceError as exc:
        print(f"mixlab: no convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DomainError, MixlabError, ValueError, OSError) as exc:
        print(f"mixlab: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
