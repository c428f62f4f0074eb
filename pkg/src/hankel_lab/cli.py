"""Command line entry point.

Exit codes: 0 every asserted check passed, 1 a check failed, 2 the
configuration could not be used, 3 a numerical or I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__
from .coefficients import (
    IndicatorAbove,
    a_widom,
    predicted_coefficients,
    u_frak,
    u_indicator,
    w0,
    w1,
)
from .config import load_config
from .errors import ConfigError, InputError, NumericalError, UnsupportedError
from .output import fmt, spectrum_report, write_outputs, write_report

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("coeff", "spectrum", "sweep", "identities", "growth", "wilf", "version")

log = logging.getLogger("hankel_lab")


def build_parser():
    p = argparse.ArgumentParser(prog="hankel-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "version":
            continue
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", help="output directory (overrides output.dir)")
        sp.add_argument("--deterministic", action="store_true",
                        help="omit timings so repeated runs are byte-identical")
        sp.add_argument("--verbose", action="store_true", help="log progress to stderr")
        if name == "spectrum":
            sp.add_argument("--alpha", type=float, help="alpha (or b) to use; default the first")
    return p


def _line(name, value):
    if isinstance(value, str):
        return f"{name} = {value}"
    return f"{name} = {float(value):.7g}"


# --------------------------------------------------------------------------
# subcommands


def cmd_coeff(run):
    sw = run.sweep
    if sw is None or sw.lam is None:
        raise ConfigError("coeff needs a configuration with lambda_domain and omega_domain")
    lam, omega, a, g, m = sw.lam, sw.omega, sw.symbol, sw.g, sw.policy.m
    if a.is_constant:
        v0 = w0(a.constant_value, lam, omega).value
    else:
        v0 = w0(lambda x, xi: a(x, xi), lam, omega).value
    print(_line("w0", v0))
    print(_line("w1", w1(1.0, lam, omega, m).value))
    if isinstance(g, IndicatorAbove):
        print(_line("a_widom(g,1)", "n/a"))
        print(_line("u_indicator(lambda,1)", float(u_indicator(g.lam, 1.0))))
    else:
        print(_line("a_widom(g,1)", a_widom(g, 1.0)))
        print(_line("u_frak(g,1)", u_frak(g, 1.0)))
    kind = {"hs_norm": "trace_H"}.get(sw.experiment, sw.experiment)
    try:
        pred = predicted_coefficients(kind, g, a, lam, omega, b=sw.weight, m=m)
    except UnsupportedError as exc:
        print(_line("predicted_A", f"n/a ({exc})"))
        return EXIT_OK
    scale = 0.5 if sw.experiment == "hs_norm" else 1.0
    print(_line("predicted_A", scale * pred["A"]))
    print(_line("predicted_D", pred["D"]))
    return EXIT_OK


def cmd_spectrum(run, alpha=None):
    from .asymptotics.sweeps import band_space, wilf_matrix
    from .operators.dump import write_matrix
    from .operators.spectral import hermitian_eigen

    sw = run.sweep
    if sw is None:
        raise ConfigError("spectrum needs a sweep configuration")
    alpha = sw.alphas[0] if alpha is None else alpha
    os.makedirs(run.out_dir, exist_ok=True)
    dump = run.settings["output"]["dump"]
    if sw.experiment == "wilf":
        M = wilf_matrix(sw.wilf, alpha)
        values = hermitian_eigen(M).values
        kind = "eigen"
        matrix = M.matrix
        N = M.shape[0]
    else:
        bs = band_space(sw, alpha)
        s = bs.g_singular_values(sw.symbol, sw.lam)
        values, kind, N = s.values, "singular", bs.grid.N
        matrix = bs.g_factor(sw.symbol, sw.lam) if dump else None
    written = spectrum_report(run.out_dir, values, kind, alpha, N)
    if dump and matrix is not None:
        path = os.path.join(run.out_dir, "matrix.bin")
        write_matrix(path, matrix)
        written.append(path)
    print(f"kind = {kind}")
    print(_line("alpha", alpha))
    print(f"N = {N}")
    print(f"count = {len(values)}")
    print(_line("max", float(np.max(values)) if len(values) else 0.0))
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def _print_checks(checks):
    for c in checks:
        mark = "PASS" if c.passed else "FAIL"
        print(f"{mark} {c.name} value={fmt(c.value)} limit={fmt(c.limit)}"
              + (f" ({c.detail})" if c.detail else ""))


def cmd_sweep(run):
    from .asymptotics.sweeps import sweep_or_empty

    exp = run.experiment
    if exp == "identity_suite":
        return cmd_identities(run)
    if exp == "growth_suite":
        return cmd_growth(run)
    result = sweep_or_empty(run.sweep)
    files = write_outputs(result, run.out_dir, run.echo(), run.deterministic,
                          run.settings["output"]["plot"])
    for r in result.records:
        print(f"alpha={fmt(r.alpha)} N={r.N} measured={fmt(r.measured)} "
              f"predicted={fmt(r.predicted)} gate={fmt(r.gate_margin)}")
    if result.fit is not None:
        print("fit " + " ".join(f"{k}={fmt(v)}" for k, v in sorted(result.fit.coefficients.items()))
              + f" r2={fmt(result.fit.r2)}")
    _print_checks(result.checks)
    print(f"verdict = {result.verdict}")
    for p in files:
        log.info("wrote %s", p)
    return EXIT_OK if result.verdict == "pass" else EXIT_CHECK


def _default_instances(run):
    from .asymptotics.suites import Instance

    sw = run.sweep
    if sw is None or sw.lam is None:
        raise ConfigError("identities needs domains in the configuration")
    alphas = (20.0, 40.0) if sw.lam.dimension == 1 else (8.0,)
    return [Instance(f"d{sw.lam.dimension}_alpha{a:g}", sw.lam, sw.omega, a, sw.symbol)
            for a in alphas]


def cmd_identities(run):
    from .asymptotics.suites import identity_suite
    from .operators.grid import GridPolicy

    instances = run.instances if run.experiment == "identity_suite" else _default_instances(run)
    pol = run.policy
    if run.experiment != "identity_suite":
        pol = GridPolicy(L=pol.L, margin=pol.margin, oversample=2.0, snap_L=pol.snap_L, m=pol.m)
    rep = identity_suite(instances, pol, run.settings["checks"]["identity_tol"])
    write_report(rep, run.out_dir, run.echo(), run.deterministic, False)
    _print_checks(rep.checks)
    print(f"verdict = {rep.verdict}")
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_growth(run):
    from .asymptotics.suites import growth_suite

    if run.experiment != "growth_suite":
        raise ConfigError("growth needs a growth_suite configuration")
    rep = growth_suite(**run.growth)
    write_report(rep, run.out_dir, run.echo(), run.deterministic, run.settings["output"]["plot"])
    seq = rep.sequences
    keys = [k for k in seq if k != "alpha"]
    print(",".join(["alpha"] + keys))
    for i, al in enumerate(seq["alpha"]):
        print(",".join([fmt(al)] + [fmt(seq[k][i]) for k in keys]))
    _print_checks(rep.checks)
    print(f"verdict = {rep.verdict}")
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_wilf(run):
    if run.experiment != "wilf":
        raise ConfigError("wilf needs a wilf configuration")
    return cmd_sweep(run)


# --------------------------------------------------------------------------


def run_command(argv=None):
    """Parse ``argv``, run the subcommand and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.command == "version":
        print(f"hankel-lab {__version__}")
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        run = load_config(args.config, args.out, args.deterministic, args.verbose)
        if args.command == "coeff":
            return cmd_coeff(run)
        if args.command == "spectrum":
            return cmd_spectrum(run, args.alpha)
        if args.command == "sweep":
            return cmd_sweep(run)
        if args.command == "identities":
            return cmd_identities(run)
        if args.command == "growth":
            return cmd_growth(run)
        if args.command == "wilf":
            return cmd_wilf(run)
    except (ConfigError, InputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, OSError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    raise AssertionError(args.command)


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
