"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

THREADS_ENV = "AXIEULER_THREADS"

log = logging.getLogger("axieuler")


class UsageError(Exception):
    pass


def _float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(v):
        raise argparse.ArgumentTypeError("nan is not allowed")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _exponent(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    if "/" in text:
        num, den = text.split("/", 1)
        return _float(num) / _float(den)
    return _float(text)


def set_threads(n: int | None) -> None:
    if n is None:
        env = os.environ.get(THREADS_ENV)
        if not env:
            return
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV}={env!r} is not an integer") from None
    import numba

    if not 1 <= n <= numba.config.NUMBA_NUM_THREADS:
        raise UsageError(f"thread count must be in [1, {numba.config.NUMBA_NUM_THREADS}], got {n}")
    numba.set_num_threads(n)


# -- subcommands -------------------------------------------------------------


def cmd_kernel(args) -> int:
    from .io import fmt
    from .kernel import H_closed, H_quad

    if not 0 <= args.s_min <= args.s_max < 1:
        raise UsageError("need 0 <= --s-min <= --s-max < 1")
    if args.s_count < 1 or (args.s_count == 1 and args.s_min != args.s_max):
        raise UsageError("--s-count must be >= 1 (and 1 only when --s-min == --s-max)")
    s = np.linspace(args.s_min, args.s_max, args.s_count)
    hc, hq = H_closed(s), H_quad(s, args.order)
    out = sys.stdout
    out.write("s,H_closed,H_quad,upper_bound\n")
    for row in zip(s, hc, hq, 4 * s / (1 - s)):
        out.write(",".join(fmt(v) for v in row) + "\n")
    return 0


def cmd_verify(args) -> int:
    from . import verify
    from .io import FileFormatError, write_json

    names = args.lemma or None
    if names:
        bad = sorted(set(names) - set(verify.CHECKS))
        if bad:
            raise UsageError(f"unknown --lemma {', '.join(bad)}; choose from {', '.join(verify.CHECKS)}")
    baseline = None
    if args.write_baseline:
        baseline = verify.make_baseline(args.corpus_size, args.seed)
        write_json(args.baseline or verify.baseline_path(), baseline)
    else:
        path = args.baseline or verify.baseline_path()
        try:
            baseline = verify.load_baseline(path)
        except (OSError, json.JSONDecodeError) as exc:
            raise FileFormatError(f"{path}: cannot load baseline ({exc})") from None
    reports = verify.run_checks(names, args.resolution, args.corpus_size, args.seed, baseline)
    meta = {"seed": args.seed, "corpus_size": args.corpus_size, "resolution": args.resolution}
    if args.json:
        print(verify.reports_json(reports, **meta))
    else:
        for r in reports:
            print(r.line())
    return 0 if all(r.passed for r in reports) else 1


def cmd_norms(args) -> int:
    from .io import read_scalar_field
    from .lorentz import LorentzExponents, WeightedSamples, lorentz_quasinorm

    try:
        exps = LorentzExponents(args.p, args.q)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    field = read_scalar_field(args.field)
    value = lorentz_quasinorm(WeightedSamples.from_field(field, args.weight_dim), exps)
    print(f"{args.p:g},{args.q:g},{value!r}")
    return 0


def cmd_reconstruct(args) -> int:
    from .biot_savart import ReconstructionJob, velocity_from_vorticity
    from .io import VECTOR_HEADER, read_scalar_field, read_targets, write_rows
    from .kernel import KernelParams

    omega = read_scalar_field(args.omega)
    g = omega.grid
    if args.targets == "grid":
        R, Z = g.mesh()
        targets = np.column_stack([R.ravel(), Z.ravel()])
    else:
        targets = read_targets(args.targets)
    eps = max(g.hr, g.hz) if args.epsilon is None else args.epsilon
    try:
        params = KernelParams(d=args.dim, tau_order=args.tau_order, epsilon=eps)
        job = ReconstructionJob(omega, targets, params, exclude_diagonal=eps == 0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    u = velocity_from_vorticity(job)
    rows = (tuple(t) + tuple(v) for t, v in zip(targets.tolist(), u.tolist()))
    if args.out:
        write_rows(args.out, VECTOR_HEADER, rows)
    else:
        from .io import fmt

        sys.stdout.write(",".join(VECTOR_HEADER) + "\n")
        for row in rows:
            sys.stdout.write(",".join(fmt(v) for v in row) + "\n")
    return 0


def cmd_simulate(args) -> int:
    from .io import FileFormatError, read_json, write_rows
    from .simulator import DiagnosticsRecord, SimulationConfig, SimulationError, run

    doc = read_json(args.config)
    base = Path(args.config).resolve().parent
    try:
        config = SimulationConfig.from_json(doc, base=base)
    except KeyError as exc:
        raise FileFormatError(f"{args.config}: missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"{args.config}: {exc}") from None
    out_dir = Path(args.out_dir or doc.get("out_dir", "."))
    if not out_dir.is_absolute() and args.out_dir is None:
        out_dir = base / out_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    def snapshot(step, p):
        rows = zip(p.r.tolist(), p.z.tolist(), p.eta.tolist(), p.volume.tolist())
        write_rows(out_dir / f"particles_{step}.csv", ("r", "z", "eta", "volume"), rows)

    try:
        records = run(config, snapshot=snapshot)
    except SimulationError as exc:
        log.error("simulation aborted: %s", exc)
        return 1
    write_rows(out_dir / "diagnostics.csv", DiagnosticsRecord.FIELDS, (r.row() for r in records))
    bad = [r for r in records if r.omega_sup > r.envelope * (1 + 1e-12)]
    if bad:
        log.error("growth envelope violated at t=%g", bad[0].t)
        return 1
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .verify import CHECKS

    p = argparse.ArgumentParser(prog="axieuler", description="Axisymmetric Euler kernel, norm and vortex tools.")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help=f"numba thread count (default: ${THREADS_ENV} or all cores)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="tabulate H(s) by closed form and quadrature")
    k.add_argument("--table", action="store_true", help="emit the CSV table (the default action)")
    k.add_argument("--s-min", type=_float, default=0.0)
    k.add_argument("--s-max", type=_float, default=0.99)
    k.add_argument("--s-count", type=int, default=100)
    k.add_argument("--order", type=_positive_int, default=64, help="quadrature nodes")
    k.set_defaults(func=cmd_kernel)

    v = sub.add_parser("verify", help="run the numerical certificates")
    v.add_argument("--lemma", action="append", metavar="NAME", help=f"only run NAME (one of {', '.join(CHECKS)})")
    v.add_argument("--resolution", type=_positive_int, default=2048)
    v.add_argument("--corpus-size", type=_positive_int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true", help="print a JSON report")
    v.add_argument("--baseline", type=Path, default=None, help="baseline constants file")
    v.add_argument("--write-baseline", action="store_true")
    v.set_defaults(func=cmd_verify)

    n = sub.add_parser("norms", help="Lorentz quasinorm of a scalar field")
    n.add_argument("field", type=Path)
    n.add_argument("--p", type=_exponent, required=True)
    n.add_argument("--q", type=_exponent, default=math.inf)
    n.add_argument("--weight-dim", type=int, default=4)
    n.set_defaults(func=cmd_norms)

    r = sub.add_parser("reconstruct", help="velocity from vorticity")
    r.add_argument("omega", type=Path)
    r.add_argument("--dim", type=int, default=4)
    r.add_argument("--epsilon", type=_float, default=None, help="mollifier (default: max cell size)")
    r.add_argument("--tau-order", type=_positive_int, default=16)
    r.add_argument("--targets", default="grid", help="CSV with header r,z, or 'grid'")
    r.add_argument("--out", type=Path, default=None)
    r.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("simulate", help="vortex particle run")
    s.add_argument("--config", type=Path, required=True)
    s.add_argument("--out-dir", type=Path, default=None, help="overrides out_dir in the config")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    from .io import FileFormatError

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        set_threads(args.threads)
        return args.func(args)
    except (UsageError, FileFormatError) as exc:
        print(f"axieuler {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"axieuler {args.command}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"axieuler {args.command}: {exc}", file=sys.stderr)
        return 2
