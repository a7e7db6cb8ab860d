"""Command-line front end.

Exit codes: 0 ok, 2 usage or validation error, 3 missing data or failed
evaluations, 4 singular pencil, 5 verification failure (strict mode), 6
simulation divergence.

Settings resolve as command-line flag, then ``LPV_LOEWNER_*`` environment
variable, then the ``--config`` JSON document, then the built-in default.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from lpv_loewner import benchmark
from lpv_loewner.errors import (DivergenceError, DividedDifferenceError, IncompleteDataError,
                                InvalidArgumentError, SingularPencilError, SingularResolventError,
                                UndefinedReferenceError)
from lpv_loewner.lti import (TangentialData, build_loewner, interleaved_axis_points, interpolation_residuals,
                             rank_diagnostics, realize, svd_project)
from lpv_loewner.pencil import (InterpolationScheme, ReducedLpv, assemble_from_samples, assemble_intrusive,
                                reduce, verify_interpolation)
from lpv_loewner.serialization import read_json, write_json, write_text
from lpv_loewner.simulation import SignalSpec, SimulationConfig, relative_error, simulate
from lpv_loewner.system import LpvSsa, random_system
from lpv_loewner.transfer import SampleSet, eval_batch, eval_H0

log = logging.getLogger("lpv_loewner")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SINGULAR, EXIT_VERIFY, EXIT_DIVERGED = 0, 2, 3, 4, 5, 6
ENV_PREFIX = "LPV_LOEWNER_"

DEFAULTS = {
    "out": "out",
    "tol_interp": 1e-9,
    "tol_rank": None,
    "strict": False,
    "seed": 0,
    "mode": "data-driven",
}


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# -- settings ---------------------------------------------------------------

def _env(name, kind):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return None
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    try:
        return kind(raw)
    except ValueError:
        raise CliError(EXIT_USAGE, f"bad value for {ENV_PREFIX + name.upper()}: {raw!r}") from None


class Settings:
    """Resolved options for one invocation."""

    _kinds = {"out": str, "tol_interp": float, "tol_rank": float, "strict": bool, "seed": int}

    def __init__(self, args):
        self.args = args
        config_path = getattr(args, "config", None) or os.environ.get(ENV_PREFIX + "CONFIG")
        self.config = {}
        self.config_dir = os.getcwd()
        if config_path:
            self.config = _load_json(config_path, "config")
            self.config_dir = os.path.dirname(os.path.abspath(config_path))

    def get(self, name, kind=str):
        """Flag, environment, config, default: first one set wins."""
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        kind = self._kinds.get(name, kind)
        value = _env(name, kind)
        if value is not None:
            return value
        conf = self.config.get(name)
        if conf is None:
            conf = self.config.get("tolerances", {}).get(name.replace("tol_", "")) if name.startswith("tol_") else None
        if conf is not None:
            return conf
        return DEFAULTS.get(name)

    def path_or_inline(self, name):
        """A command-line path, or the config entry (a path or an inline document)."""
        value = getattr(self.args, name, None)
        if value is not None:
            return _load_json(value, name)
        env = os.environ.get(ENV_PREFIX + name.upper())
        if env:
            return _load_json(env, name)
        conf = self.config.get(name)
        if isinstance(conf, str):
            return _load_json(os.path.join(self.config_dir, conf), name)
        return conf


def _load_json(path, what):
    try:
        return read_json(path)
    except FileNotFoundError:
        raise CliError(EXIT_USAGE, f"{what} file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise CliError(EXIT_USAGE, f"{what} file {path} is not valid JSON: {e}") from None


def _load_system(settings, required=True):
    doc = settings.path_or_inline("system")
    if doc is None:
        if required:
            raise CliError(EXIT_USAGE, "no system given (--system or config 'system')")
        return None
    return LpvSsa.from_dict(doc)


def _load_scheme(settings, n_p):
    doc = settings.path_or_inline("scheme")
    if doc is None:
        raise CliError(EXIT_USAGE, "no scheme given (--scheme or config 'scheme')")
    return InterpolationScheme.from_dict(doc).check(n_p)


def _orders(settings, N):
    raw = getattr(settings.args, "orders", None)
    if raw is not None:
        orders = _int_list(raw)
    else:
        orders = settings.config.get("orders") or [N + 1]
    orders = [int(r) for r in orders]
    for r in orders:
        if r > N + 1:
            raise CliError(EXIT_USAGE, f"order {r} exceeds N+1 = {N + 1}")
        if r < 1:
            raise CliError(EXIT_USAGE, f"order {r} must be at least 1")
    return orders


def _int_list(text):
    try:
        return [int(tok) for tok in str(text).replace(" ", "").split(",") if tok]
    except ValueError:
        raise CliError(EXIT_USAGE, f"expected comma-separated integers, got {text!r}") from None


def _out(settings, name):
    return os.path.join(settings.get("out"), name)


# -- commands -----------------------------------------------------------------

def cmd_sample(settings):
    """Evaluate every sample the data-driven assembly needs."""
    sys_ = _load_system(settings)
    scheme = _load_scheme(settings, sys_.n_p)
    requests = scheme.required_samples(sys_.n_p)
    results = eval_batch(sys_, requests)
    failed = [smp for smp in results if not smp.ok]
    if failed:
        lines = "\n".join(f"  word={list(s.word)} args={list(s.args)}: {s.error}" for s in failed)
        raise CliError(EXIT_DATA, f"{len(failed)} sample evaluation(s) failed:\n{lines}")
    path = getattr(settings.args, "output", None) or _out(settings, "samples.json")
    write_json(path, SampleSet(results).to_list())
    print(f"wrote {len(results)} samples to {path}")
    return EXIT_OK


def _build_pencil(settings, sys_, scheme, n_p):
    mode = settings.get("mode")
    if mode == "intrusive":
        if sys_ is None:
            raise CliError(EXIT_USAGE, "intrusive mode needs a system")
        return assemble_intrusive(sys_, scheme), sys_
    if mode != "data-driven":
        raise CliError(EXIT_USAGE, f"unknown mode {mode!r}")
    samples_doc = settings.path_or_inline("samples")
    if samples_doc is not None:
        samples = SampleSet.from_list(samples_doc)
    elif sys_ is not None:
        samples = SampleSet(eval_batch(sys_, scheme.required_samples(n_p)))
    else:
        raise CliError(EXIT_USAGE, "data-driven mode needs --samples or a system to sample")
    return assemble_from_samples(samples, scheme, n_p), (sys_ if sys_ is not None else samples)


def _reduce_all(settings):
    sys_ = _load_system(settings, required=False)
    n_p = sys_.n_p if sys_ is not None else getattr(settings.args, "n_p", None) or settings.config.get("n_p")
    scheme_doc = settings.path_or_inline("scheme")
    if scheme_doc is None:
        raise CliError(EXIT_USAGE, "no scheme given (--scheme or config 'scheme')")
    scheme = InterpolationScheme.from_dict(scheme_doc)
    if n_p is None:
        n_p = max(scheme.q_left + scheme.q_right, default=0)
        samples_doc = settings.path_or_inline("samples")
        if samples_doc:
            n_p = max([n_p] + [max(d["word"], default=0) for d in samples_doc])
    scheme.check(n_p)
    orders = _orders(settings, scheme.N)
    pencil, reference = _build_pencil(settings, sys_, scheme, n_p)
    models = {r: reduce(pencil, r) for r in orders}
    return sys_, scheme, pencil, models, reference


def cmd_reduce(settings):
    """Assemble, reduce to each requested order, verify the interpolation conditions."""
    _, scheme, pencil, models, reference = _reduce_all(settings)
    tol = settings.get("tol_interp")
    reports = {}
    strict_failed = []
    for r, model in models.items():
        path = _out(settings, f"model_r{r}.json")
        write_json(path, model.to_dict())
        full_order = r == pencil.size
        rep = verify_interpolation(reference, model, scheme, tol if full_order else None)
        reports[str(r)] = rep.to_dict()
        if full_order and not rep.passed:
            strict_failed.append(r)
        print(f"order {r}: wrote {path}; max interpolation residual {rep.max_residual:.3e}"
              + ("" if full_order else " (informational)"))
    write_json(_out(settings, "pencil.json"), pencil.to_dict())
    write_json(_out(settings, "verification.json"), {"tol": tol, "orders": reports})
    if strict_failed:
        msg = f"interpolation conditions failed at tol {tol:g} for order(s) {strict_failed}"
        if settings.get("strict"):
            raise CliError(EXIT_VERIFY, msg)
        log.warning(msg)
    return EXIT_OK


def _signals(settings, n_p):
    sim = settings.config.get("simulation", {})
    u = SignalSpec.from_dict(sim["u"]) if "u" in sim else benchmark.benchmark_input()
    if "p" in sim:
        p = [SignalSpec.from_dict(d) for d in sim["p"]]
    else:
        p = benchmark.benchmark_scheduling()
    if len(p) != n_p:
        raise CliError(EXIT_USAGE, f"system has n_p={n_p} but {len(p)} scheduling signals are configured")
    t_end = getattr(settings.args, "t_end", None) or sim.get("t_end", benchmark.T_END)
    steps = getattr(settings.args, "steps", None) or sim.get("steps", benchmark.STEPS)
    return u, p, SimulationConfig(float(t_end), int(steps))


def cmd_simulate(settings):
    """Simulate the full model and reduced models; write CSV and a JSON summary."""
    sys_ = _load_system(settings)
    u, p, cfg = _signals(settings, sys_.n_p)
    model_paths = getattr(settings.args, "models", None) or settings.config.get("models")
    if model_paths:
        models = {}
        for path in model_paths:
            m = ReducedLpv.from_dict(_load_json(path, "model"))
            models[int(m.provenance.get("order", m.n_x))] = m
    else:
        _, _, _, models, _ = _reduce_all(settings)
    for r, m in models.items():
        if m.n_p != sys_.n_p:
            raise CliError(EXIT_USAGE, f"model of order {r} has n_p={m.n_p}, system has {sys_.n_p}")
    orders = sorted(models)
    full = simulate(sys_, u, p, cfg)
    y_red, err, max_err, imag = {}, {}, {}, {}
    absolute = not np.any(full.y.values)
    for r in orders:
        res = simulate(models[r], u, p, cfg)
        y_red[r], imag[r] = res.y.values, res.imag_max
        if absolute:
            err[r] = np.abs(full.y.values - res.y.values)
            max_err[r] = float(np.max(err[r]))
        else:
            pointwise, max_err[r] = relative_error(full.y, res.y)
            err[r] = pointwise.values
    csv_path = _out(settings, "simulation.csv")
    write_text(csv_path, benchmark.simulation_csv(full.y.t, full.y.values, y_red, err, orders))
    summary = {"csv": os.path.basename(csv_path), "steps": cfg.steps, "t_end": cfg.t_end,
               "error": "absolute (reference identically zero)" if absolute else "relative to max|y_full|",
               "max_rel": {str(r): max_err[r] for r in orders},
               "imag_max": {str(r): imag[r] for r in orders}}
    write_json(_out(settings, "simulation_summary.json"), summary)
    for r in orders:
        print(f"order {r}: max error {max_err[r]:.3e}, max |Im y| {imag[r]:.3e}")
    return EXIT_OK


def cmd_paper(settings):
    """Run the built-in three-state, two-parameter reproduction."""
    args = settings.args
    q_left = tuple(_int_list(args.q_left)) if args.q_left else benchmark.DEFAULT_WORDS
    q_right = tuple(_int_list(args.q_right)) if args.q_right else benchmark.DEFAULT_WORDS
    steps = args.steps or benchmark.STEPS
    report = benchmark.run_paper_example(settings.get("out"), q_left=q_left, q_right=q_right, steps=steps,
                                     mode=settings.get("mode"), tol=settings.get("tol_interp"))
    for r in report.orders:
        print(f"r={r}: max relative error {report.max_rel[r]:.3e}, max |Im y| {report.imag_max[r]:.3e}")
    print(f"interpolation conditions: {'pass' if report.verification.passed else 'FAIL'} "
          f"(max residual {report.verification.max_residual:.3e})")
    if not report.verification.passed:
        raise CliError(EXIT_VERIFY, "full-order interpolation conditions failed")
    return EXIT_OK


def cmd_lti(settings):
    """Classical Loewner realization from tangential data, with rank diagnostics."""
    args = settings.args
    doc = settings.path_or_inline("data")
    if doc is not None:
        data = TangentialData.from_dict(doc)
    elif args.random_order:
        rng = np.random.default_rng(settings.get("seed"))
        model = random_system(rng, args.random_order, 0)
        M = args.points or args.random_order
        mu, lam = interleaved_axis_points(M)
        data = TangentialData.siso(mu, [eval_H0(model, s) for s in mu], lam, [eval_H0(model, s) for s in lam])
        write_json(_out(settings, "lti_data.json"), data.to_dict())
    else:
        raise CliError(EXIT_USAGE, "lti needs --data or --random-order")
    L, Ls = build_loewner(data)
    diag = rank_diagnostics(L, Ls, np.concatenate([data.mu, data.lam]), settings.get("tol_rank"))
    R = realize(data)
    order = args.order
    if order is None and diag.n:
        order = diag.n
    if order is not None and order != R.order:
        R = svd_project(R, order)
    left, right = interpolation_residuals(R, data)
    write_json(_out(settings, "lti_realization.json"), R.to_dict())
    report = {"M": data.M, "order": R.order, "rank": diag.to_dict(),
              "left_residuals": left.tolist(), "right_residuals": right.tolist()}
    write_json(_out(settings, "lti_report.json"), report)
    print(f"M={data.M} rank n={diag.n} realization order {R.order}; "
          f"max interpolation residual {np.nanmax(np.concatenate([left, right])):.3e}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _global_flags(defaults_suppressed):
    g = argparse.ArgumentParser(add_help=False)
    kw = {"default": argparse.SUPPRESS} if defaults_suppressed else {}
    g.add_argument("--config", help="JSON experiment configuration", **kw)
    g.add_argument("--out", help="output directory (default: out)", **kw)
    g.add_argument("--tol-interp", type=float, dest="tol_interp", help="interpolation tolerance (1e-9)", **kw)
    g.add_argument("--tol-rank", type=float, dest="tol_rank", help="relative SVD rank cutoff", **kw)
    g.add_argument("--strict", action="store_const", const=True, help="fail on verification errors", **kw)
    g.add_argument("--seed", type=int, help="seed for randomly generated test data", **kw)
    g.add_argument("-v", "--verbose", action="store_const", const=True, **kw)
    return g


def build_parser():
    parser = argparse.ArgumentParser(prog="lpv-loewner", parents=[_global_flags(False)],
                                     description="Loewner-framework reduction of affine LPV systems.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_flags(True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=func)
        return p

    p = add("sample", cmd_sample, "evaluate the transfer-function samples a scheme requires")
    p.add_argument("--system")
    p.add_argument("--scheme")
    p.add_argument("-o", "--output", help="sample file (default: <out>/samples.json)")

    p = add("reduce", cmd_reduce, "assemble the LPV Loewner pencil and reduce it")
    p.add_argument("--system")
    p.add_argument("--scheme")
    p.add_argument("--samples", help="sample file for data-driven mode")
    p.add_argument("--mode", choices=("intrusive", "data-driven"))
    p.add_argument("--orders", help="comma-separated reduced orders (default: N+1)")
    p.add_argument("--n-p", type=int, dest="n_p", help="parameter count when no system is given")

    p = add("simulate", cmd_simulate, "Euler-simulate full and reduced models")
    p.add_argument("--system")
    p.add_argument("--scheme")
    p.add_argument("--samples")
    p.add_argument("--mode", choices=("intrusive", "data-driven"))
    p.add_argument("--orders")
    p.add_argument("--models", nargs="+", help="reduced model files instead of reducing on the fly")
    p.add_argument("--steps", type=int)
    p.add_argument("--t-end", type=float, dest="t_end")

    p = add("paper", cmd_paper, "reproduce the three-state two-parameter study")
    p.add_argument("--q-left", help="left expansion word, e.g. 1,2")
    p.add_argument("--q-right", help="right expansion word, e.g. 1,2")
    p.add_argument("--steps", type=int)
    p.add_argument("--mode", choices=("intrusive", "data-driven"))

    p = add("lti", cmd_lti, "classical Loewner realization from tangential data")
    p.add_argument("--data", help="tangential data file")
    p.add_argument("--order", type=int, help="projection order (default: detected rank)")
    p.add_argument("--random-order", type=int, help="sample a seeded random stable SISO system instead")
    p.add_argument("--points", type=int, help="left/right point count for --random-order")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", None) else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(Settings(args))
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except IncompleteDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except SingularResolventError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except SingularPencilError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SINGULAR
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except (InvalidArgumentError, DividedDifferenceError, UndefinedReferenceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
