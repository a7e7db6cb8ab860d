"""Explicit Euler simulation of LPV models and output error metrics."""
from dataclasses import dataclass

import numpy as np

from lpv_loewner.errors import DivergenceError, InvalidArgumentError, UndefinedReferenceError
from lpv_loewner.system import validate

_KINDS = ("cosine-decay", "sine", "constant", "samples")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled values ``values[j]`` at ``t0 + j h``."""

    t0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values))

    @property
    def t(self):
        return self.t0 + self.h * np.arange(len(self.values))

    def same_grid(self, other):
        return (len(self.values) == len(other.values) and self.t0 == other.t0 and self.h == other.h)


@dataclass(frozen=True)
class SignalSpec:
    """Scalar signal: ``a cos(omega t) exp(-sigma t)``, ``a sin(omega t)``,
    the constant ``a``, or linear interpolation of `series`."""

    kind: str
    a: float = 0.0
    omega: float = 0.0
    sigma: float = 0.0
    series: TimeSeries = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"unknown signal kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "samples" and self.series is None:
            raise InvalidArgumentError("a 'samples' signal needs a TimeSeries")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "cosine-decay":
            return self.a * np.cos(self.omega * t) * np.exp(-self.sigma * t)
        if self.kind == "sine":
            return self.a * np.sin(self.omega * t)
        if self.kind == "constant":
            return np.full(t.shape, float(self.a))
        ts = self.series.t
        lo, hi = ts[0], ts[-1]
        if np.any(t < lo - 1e-12 * max(1, abs(lo))) or np.any(t > hi + 1e-12 * max(1, abs(hi))):
            raise InvalidArgumentError(f"sampled signal covers [{lo}, {hi}] only")
        return np.interp(t, ts, np.real(self.series.values))

    def to_dict(self):
        if self.kind == "samples":
            return {"kind": "samples", "t0": self.series.t0, "h": self.series.h,
                    "values": np.real(self.series.values).tolist()}
        return {"kind": self.kind, "a": self.a, "omega": self.omega, "sigma": self.sigma}

    @classmethod
    def from_dict(cls, doc):
        kind = doc.get("kind")
        if kind == "samples":
            return cls("samples", series=TimeSeries(float(doc["t0"]), float(doc["h"]),
                                                    np.asarray(doc["values"], dtype=float)))
        return cls(kind, float(doc.get("a", 0.0)), float(doc.get("omega", 0.0)), float(doc.get("sigma", 0.0)))


@dataclass(frozen=True)
class SimulationConfig:
    t_end: float
    steps: int

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise InvalidArgumentError(f"steps must be a positive integer, got {self.steps!r}")
        h = self.t_end / self.steps
        if not (np.isfinite(h) and h > 0):
            raise InvalidArgumentError(f"step size t_end/steps = {h!r} must be positive and finite")

    @property
    def h(self):
        return self.t_end / self.steps

    @property
    def t(self):
        return self.h * np.arange(self.steps + 1)


@dataclass(frozen=True, eq=False)
class SimulationResult:
    y: TimeSeries
    imag_max: float


_CHUNK = 4096


def simulate(model, u, p, cfg):
    """Explicit Euler from ``x(0) = 0``.

    ``x_{j+1} = x_j + h (A(p(t_j)) x_j + B u(t_j))``, ``y_j = C x_j``.  Complex
    models are integrated in complex arithmetic; the returned series holds
    the real part and `imag_max` the largest ``|Im y_j|``.

    Raises
    ------
    DivergenceError
        When the state becomes non-finite; carries the step index.
    """
    problems = validate(model)
    if problems:
        raise InvalidArgumentError("invalid model: " + "; ".join(problems))
    p = list(p)
    if len(p) != model.n_p:
        raise InvalidArgumentError(f"model has n_p={model.n_p} but {len(p)} scheduling signals given")
    h = cfg.h
    t = cfg.t
    u_vals = np.asarray(u(t), dtype=float)
    p_vals = np.array([np.asarray(sig(t), dtype=float) for sig in p]).reshape(len(p), len(t))

    dtype = np.result_type(model.dtype, float)
    A0 = np.asarray(model.A[0], dtype=dtype)
    Ai = np.array([np.asarray(a, dtype=dtype) for a in model.A[1:]]).reshape(model.n_p, model.n_x, model.n_x)
    B = np.asarray(model.B, dtype=dtype)
    C = np.asarray(model.C, dtype=dtype)

    x = np.zeros(model.n_x, dtype=dtype)
    y = np.zeros(cfg.steps + 1, dtype=dtype)
    bu = h * np.outer(u_vals, B)
    with np.errstate(over="ignore", invalid="ignore"):
        for start in range(0, cfg.steps, _CHUNK):
            stop = min(start + _CHUNK, cfg.steps)
            # I + h A(p(t_j)) for the whole chunk
            step_mats = np.eye(model.n_x, dtype=dtype) + h * (
                A0 + np.einsum("ij,ikl->jkl", p_vals[:, start:stop], Ai))
            for j in range(start, stop):
                x = step_mats[j - start] @ x + bu[j]
                y[j + 1] = C @ x
            if not np.all(np.isfinite(y[start + 1:stop + 1])):
                bad = start + 1 + int(np.argmin(np.isfinite(y[start + 1:stop + 1])))
                raise DivergenceError(bad)
            if not np.all(np.isfinite(x)):
                raise DivergenceError(stop)
    imag_max = float(np.max(np.abs(y.imag))) if np.iscomplexobj(y) else 0.0
    return SimulationResult(TimeSeries(0.0, h, np.ascontiguousarray(y.real)), imag_max)


def relative_error(y_ref, y_test):
    """Pointwise ``|y_ref - y_test| / max_t |y_ref|`` and its maximum.

    Normalizing by the sup of the reference keeps the curve finite at the
    reference's zero crossings.
    """
    if not y_ref.same_grid(y_test):
        raise InvalidArgumentError("time series are on different grids")
    scale = np.max(np.abs(y_ref.values)) if len(y_ref.values) else 0.0
    if scale == 0:
        raise UndefinedReferenceError("reference output is identically zero")
    pointwise = np.abs(y_ref.values - y_test.values) / scale
    return TimeSeries(y_ref.t0, y_ref.h, pointwise), float(np.max(pointwise))
