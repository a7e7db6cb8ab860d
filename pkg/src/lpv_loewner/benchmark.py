"""Preset reproducing the three-state, two-parameter study.

The system, signals and interpolation points are fixed; expansion words
default to ``q_left = q_right = (1, 2)``.  Output is a set of CSV curves
(original and reduced outputs, relative errors) plus a JSON summary.
"""
import os
from dataclasses import dataclass

import numpy as np

from lpv_loewner.pencil import InterpolationScheme, assemble_from_samples, assemble_intrusive, reduce, verify_interpolation
from lpv_loewner.serialization import write_json, write_text
from lpv_loewner.simulation import SignalSpec, SimulationConfig, relative_error, simulate
from lpv_loewner.system import LpvSsa
from lpv_loewner.transfer import SampleSet, eval_batch

A0 = [[-1.0, 1.0, -1.0], [-1.0, -2.0, 1.0], [-1.0, 1.0, -3.0]]
A1 = [[1.0, -1.0, -1.0], [-1.0, 2.0, 0.0], [-1.0, 0.0, 2.0]]
A2 = [[0.0, -1.0, 1.0], [0.0, 1.0, 2.0], [2.0, 1.0, 0.0]]
B0 = [1.0, 0.0, 0.0]
C0 = [1.0, -1.0, -1.0]

MU = (2j, 4j, 6j)
LAMBDA = (3j, 5j, 8j)
DEFAULT_WORDS = (1, 2)
T_END = 10.0
STEPS = 50_000


def benchmark_system():
    return LpvSsa([A0, A1, A2], B0, C0)


def benchmark_scheme(q_left=DEFAULT_WORDS, q_right=DEFAULT_WORDS):
    return InterpolationScheme(MU, LAMBDA, q_left, q_right)


def benchmark_input():
    """``u(t) = 0.1 cos(20 t) exp(-0.1 t)``."""
    return SignalSpec("cosine-decay", a=0.1, omega=20.0, sigma=0.1)


def benchmark_scheduling():
    """``p_1 = 2.5 sin(5 pi t)``, ``p_2 = 1.25 sin(7 pi t)``."""
    return [SignalSpec("sine", a=2.5, omega=5 * np.pi), SignalSpec("sine", a=1.25, omega=7 * np.pi)]


def benchmark_config(steps=STEPS):
    return SimulationConfig(T_END, steps)


def sample_benchmark(sys, scheme):
    """Exactly the samples the data-driven assembly needs."""
    return SampleSet(eval_batch(sys, scheme.required_samples(sys.n_p)))


@dataclass
class BenchmarkReport:
    orders: tuple
    max_rel: dict
    imag_max: dict
    t: np.ndarray
    y_full: np.ndarray
    y_reduced: dict
    err: dict
    verification: object
    models: dict
    csv_paths: dict

    def summary(self):
        return {
            "orders": list(self.orders),
            "max_rel": {str(r): self.max_rel[r] for r in self.orders},
            "imag_max": {str(r): self.imag_max[r] for r in self.orders},
            "verification_passed": self.verification.passed,
            "verification_max_residual": self.verification.max_residual,
            "csv": {k: os.path.basename(v) for k, v in self.csv_paths.items()},
        }


def simulation_csv(t, y_full, y_reduced, err, orders):
    """CSV text with header ``t,y_full,y_r1..,err_r1..`` at 17 significant digits."""
    header = ["t", "y_full"] + [f"y_r{r}" for r in orders] + [f"err_r{r}" for r in orders]
    cols = [t, y_full] + [y_reduced[r] for r in orders] + [err[r] for r in orders]
    return _csv(header, cols)


def _csv(header, cols):
    data = np.column_stack(cols)
    lines = [",".join(header)]
    lines.extend(",".join(f"{v:.17g}" for v in row) for row in data)
    return "\n".join(lines) + "\n"


def run_paper_example(out_dir=None, q_left=DEFAULT_WORDS, q_right=DEFAULT_WORDS, steps=STEPS,
                      mode="data-driven", orders=(1, 2, 3), tol=1e-9):
    """Assemble, reduce to each order, simulate, and compare with the original.

    With `out_dir` set, writes ``simulation.csv`` (all columns),
    ``outputs.csv`` (original and reduced outputs), ``errors.csv``,
    ``verification.json`` and ``summary.json``.
    """
    sys = benchmark_system()
    scheme = benchmark_scheme(q_left, q_right)
    if mode == "data-driven":
        pencil = assemble_from_samples(sample_benchmark(sys, scheme), scheme, sys.n_p)
    else:
        pencil = assemble_intrusive(sys, scheme)
    models = {r: reduce(pencil, r) for r in orders}

    cfg = benchmark_config(steps)
    u, p = benchmark_input(), benchmark_scheduling()
    full = simulate(sys, u, p, cfg)
    y_red, err, max_rel, imag_max = {}, {}, {}, {}
    for r in orders:
        res = simulate(models[r], u, p, cfg)
        y_red[r] = res.y.values
        imag_max[r] = res.imag_max
        pointwise, max_rel[r] = relative_error(full.y, res.y)
        err[r] = pointwise.values

    full_order = pencil.size
    full_model = models[full_order] if full_order in models else reduce(pencil, full_order)
    verification = verify_interpolation(sys, full_model, scheme, tol)

    report = BenchmarkReport(tuple(orders), max_rel, imag_max, full.y.t, full.y.values, y_red, err,
                         verification, models, {})
    if out_dir is not None:
        t = full.y.t
        paths = {
            "simulation": os.path.join(out_dir, "simulation.csv"),
            "outputs": os.path.join(out_dir, "outputs.csv"),
            "errors": os.path.join(out_dir, "errors.csv"),
        }
        write_text(paths["simulation"], simulation_csv(t, full.y.values, y_red, err, orders))
        write_text(paths["outputs"], _csv(["t", "y_full"] + [f"y_r{r}" for r in orders],
                                          [t, full.y.values] + [y_red[r] for r in orders]))
        write_text(paths["errors"], _csv(["t"] + [f"err_r{r}" for r in orders],
                                         [t] + [err[r] for r in orders]))
        report.csv_paths = paths
        write_json(os.path.join(out_dir, "verification.json"), verification.to_dict())
        write_json(os.path.join(out_dir, "summary.json"), report.summary())
    return report
