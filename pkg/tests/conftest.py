import numpy as np
import pytest

from reconlab import codes, kernels


@pytest.fixture(scope="session")
def worked_H():
    """The 6-bit peeling worked example's parity-check matrix."""
    return codes.ParityCheckMatrix.from_rows([[0, 1, 4], [1, 2, 5], [0, 3, 5], [2, 3, 4]], 6)


@pytest.fixture(scope="session")
def worked_case(worked_H):
    u = np.array([1, 0, 1, 1, 0, 1], dtype=np.uint8)
    return {
        "H": worked_H,
        "u": u,
        "s": codes.syndrome(worked_H, u),          # [1, 0, 1, 0]
        "u_hat": np.array([1, 0, 0, 1, 0, 1], dtype=np.uint8),  # bit 2 wrong
        "e": np.array([2, 4], dtype=np.int64),
        "ebar": np.array([0, 1, 3, 5], dtype=np.int64),
    }


@pytest.fixture(scope="session")
def small_peg():
    dist = codes.DegreeDistribution(col_mult={3: 240}, row_mult={4: 180})
    return codes.build_peg(dist, 240, seed=5)


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request):
    return kernels.get_backend(request.param)


#: one line per acceptance criterion, re-emitted after the test summary
ACCEPTANCE_LOG: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
