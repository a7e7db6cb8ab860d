import numpy as np
import pytest

from lpv_loewner.benchmark import benchmark_system
from lpv_loewner.pencil import InterpolationScheme
from lpv_loewner.system import LpvSsa, random_system


def rel_err(got, want):
    got, want = np.asarray(got), np.asarray(want)
    scale = np.max(np.abs(want))
    return np.max(np.abs(got - want)) / (scale if scale > 0 else 1.0)


def explicit_H(sys, word, args):
    """Oracle: generalized transfer function through explicit inverses."""
    n = sys.n_x
    phi = [np.linalg.inv(s * np.eye(n) - sys.A[0]) for s in args]
    M = phi[0]
    for q, P in zip(word, phi[1:]):
        M = P @ sys.A[q] @ M
    return complex(sys.C @ M @ sys.B)


def imag_axis_points(rng, count, spacing=0.7, lo=0.3):
    """Distinct points on the imaginary axis with a minimum gap."""
    omegas = lo + np.cumsum(spacing + rng.uniform(0, 1.5, size=count))
    return 1j * rng.permutation(omegas)


def random_instance(rng, max_nx=5, max_np=3, max_N=3):
    """Random stable system with a disjoint imaginary-axis scheme."""
    n_x = int(rng.integers(1, max_nx + 1))
    n_p = int(rng.integers(1, max_np + 1))
    N = int(rng.integers(0, max_N + 1))
    sys = random_system(rng, n_x, n_p)
    pts = imag_axis_points(rng, 2 * (N + 1))
    words = rng.integers(1, n_p + 1, size=(2, N))
    scheme = InterpolationScheme(pts[:N + 1], pts[N + 1:], words[0], words[1])
    return sys, scheme


@pytest.fixture
def scalar_sys():
    """A_0 = -1, A_1 = 2, B = C = 1."""
    return LpvSsa([[[-1.0]], [[2.0]]], [1.0], [1.0])


@pytest.fixture
def bench_sys():
    return benchmark_system()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_sys(rng):
    return random_system(rng, 4, 2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
