import numpy as np
import pytest

from lpv_loewner.errors import DivergenceError, InvalidArgumentError, UndefinedReferenceError
from lpv_loewner.benchmark import (benchmark_config, benchmark_input, benchmark_scheduling, benchmark_scheme,
                                   run_paper_example, sample_benchmark, simulation_csv)
from lpv_loewner.pencil import assemble_from_samples, reduce
from lpv_loewner.simulation import SignalSpec, SimulationConfig, TimeSeries, relative_error, simulate
from lpv_loewner.system import LpvSsa

ONE = SignalSpec("constant", a=1.0)
ZERO = SignalSpec("constant", a=0.0)

# Full-model output of the three-state preset at t = 1, 2, ..., 10 (5e4 Euler
# steps), frozen after checking the pipeline's r = 3 model reproduces it.
GOLDEN_T = np.arange(1, 11)
GOLDEN_Y = np.array([
    -0.006449118435074459, 0.005775451046767442, 0.00164280805573545, -0.006032778323487856,
    0.002686913742708067, 0.002715910664102309, -0.00404906628524138, 0.0010751933029827779,
    0.002618100780421679, -0.0029948984321916785,
])


@pytest.fixture
def decay():
    return LpvSsa([[[-1.0]], [[0.0]]], [1.0], [1.0])


def test_first_euler_step(decay):
    res = simulate(decay, ONE, [ZERO], SimulationConfig(1.0, 10))
    assert res.y.h == pytest.approx(0.1)
    assert res.y.values[0] == 0.0
    assert res.y.values[1] == pytest.approx(0.1, abs=1e-15)
    assert res.imag_max == 0.0


def test_step_response_matches_closed_form(decay):
    res = simulate(decay, ONE, [ZERO], SimulationConfig(10.0, 100_000))
    assert len(res.y.values) == 100_001
    assert abs(res.y.values[-1] - (1 - np.exp(-10))) < 2e-4


def test_zero_input_gives_zero_output(bench_sys):
    res = simulate(bench_sys, ZERO, benchmark_scheduling(), benchmark_config(2000))
    assert np.all(res.y.values == 0)


def test_scheduling_enters_dynamics(decay):
    # A(p) = -1 + p with p = 1 gives x' = u, so y(t) = t exactly under Euler
    sys = LpvSsa([[[-1.0]], [[1.0]]], [1.0], [1.0])
    res = simulate(sys, ONE, [ONE], SimulationConfig(2.0, 8))
    assert np.allclose(res.y.values, res.y.t, atol=1e-15)


def test_signal_count_must_match(bench_sys):
    with pytest.raises(InvalidArgumentError, match="n_p=2"):
        simulate(bench_sys, ONE, [ONE], benchmark_config(10))


def test_divergence_reports_step():
    blowup = LpvSsa([[[1e200]]], [1.0], [1.0])
    with pytest.raises(DivergenceError) as info:
        simulate(blowup, ONE, [], SimulationConfig(1.0, 100))
    assert 1 <= info.value.step <= 100


@pytest.mark.parametrize("t_end, steps", [(1.0, 0), (1.0, 2.5), (0.0, 10), (-1.0, 10), (np.inf, 10)])
def test_config_validation(t_end, steps):
    with pytest.raises(InvalidArgumentError):
        SimulationConfig(t_end, steps)


def test_relative_error_identity():
    y = TimeSeries(0.0, 0.1, np.sin(np.arange(20.0)))
    _, m = relative_error(y, y)
    assert m == 0.0


def test_relative_error_constants():
    pointwise, m = relative_error(TimeSeries(0.0, 0.5, np.full(7, 2.0)), TimeSeries(0.0, 0.5, np.ones(7)))
    assert m == 0.5
    assert np.all(pointwise.values == 0.5)


def test_relative_error_grid_mismatch():
    with pytest.raises(InvalidArgumentError):
        relative_error(TimeSeries(0.0, 0.1, np.ones(5)), TimeSeries(0.0, 0.2, np.ones(5)))
    with pytest.raises(InvalidArgumentError):
        relative_error(TimeSeries(0.0, 0.1, np.ones(5)), TimeSeries(0.0, 0.1, np.ones(6)))


def test_relative_error_zero_reference():
    with pytest.raises(UndefinedReferenceError):
        relative_error(TimeSeries(0.0, 0.1, np.zeros(5)), TimeSeries(0.0, 0.1, np.ones(5)))


def test_signal_kinds():
    t = np.array([0.0, 0.5, 1.0])
    assert np.allclose(SignalSpec("cosine-decay", 2.0, 3.0, 0.5)(t), 2 * np.cos(3 * t) * np.exp(-0.5 * t))
    assert np.allclose(SignalSpec("sine", 1.5, 2.0)(t), 1.5 * np.sin(2 * t))
    assert np.all(SignalSpec("constant", 4.0)(t) == 4.0)
    samples = SignalSpec("samples", series=TimeSeries(0.0, 0.5, np.array([0.0, 1.0, 4.0])))
    assert np.allclose(samples(np.array([0.25, 0.75])), [0.5, 2.5])
    with pytest.raises(InvalidArgumentError, match="covers"):
        samples(np.array([1.5]))
    with pytest.raises(InvalidArgumentError):
        SignalSpec("square")


def test_signal_round_trip():
    for sig in [benchmark_input(), *benchmark_scheduling(), ONE]:
        assert SignalSpec.from_dict(sig.to_dict()) == sig
    series = SignalSpec("samples", series=TimeSeries(0.0, 0.25, np.arange(5.0)))
    back = SignalSpec.from_dict(series.to_dict())
    assert np.array_equal(back.series.values, series.series.values)


def test_euler_first_order_convergence(bench_sys):
    u, p = benchmark_input(), benchmark_scheduling()
    base = 5000
    ys = [simulate(bench_sys, u, p, benchmark_config(base * 2 ** j)).y.values[::2 ** j] for j in range(3)]
    ratio = np.max(np.abs(ys[0] - ys[1])) / np.max(np.abs(ys[1] - ys[2]))
    assert 1.7 <= ratio <= 2.3


def test_full_order_imag_part_negligible(bench_sys):
    scheme = benchmark_scheme()
    model = reduce(assemble_from_samples(sample_benchmark(bench_sys, scheme), scheme, 2), 3)
    res = simulate(model, benchmark_input(), benchmark_scheduling(), benchmark_config())
    assert res.imag_max <= 1e-9 * np.max(np.abs(res.y.values))


def test_golden_full_output(bench_sys):
    res = simulate(bench_sys, benchmark_input(), benchmark_scheduling(), benchmark_config())
    idx = GOLDEN_T * 5000
    assert np.allclose(res.y.t[idx], GOLDEN_T, rtol=0, atol=1e-12)
    assert np.allclose(res.y.values[idx], GOLDEN_Y, rtol=1e-10, atol=1e-15)


def test_benchmark_report_orders_and_files(tmp_path):
    rep = run_paper_example(tmp_path, steps=5000)
    assert rep.max_rel[3] <= 1e-8
    assert rep.max_rel[3] < rep.max_rel[2] <= rep.max_rel[1]
    assert rep.verification.passed
    for name in ("simulation.csv", "outputs.csv", "errors.csv", "verification.json", "summary.json"):
        assert (tmp_path / name).is_file()
    header = (tmp_path / "simulation.csv").read_text().splitlines()[0]
    assert header == "t,y_full,y_r1,y_r2,y_r3,err_r1,err_r2,err_r3"


def test_benchmark_report_deterministic(tmp_path):
    run_paper_example(tmp_path / "a", steps=3000)
    run_paper_example(tmp_path / "b", steps=3000)
    for name in ("simulation.csv", "summary.json", "verification.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_uses_17_digits():
    text = simulation_csv(np.array([0.0]), np.array([1 / 3]), {1: np.array([2 / 3])}, {1: np.array([0.1])}, (1,))
    assert text.splitlines() == ["t,y_full,y_r1,err_r1", "0,0.33333333333333331,0.66666666666666663,0.10000000000000001"]
