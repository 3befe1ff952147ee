import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from iccregion import icc_model  # noqa: E402
from iccregion.icc_model import ChannelParams, SweepConfig  # noqa: E402

FIG2 = dict(P1=6.0, P2=1.5, a12=0.74, a21=0.74)
ROOT = Path(__file__).resolve().parents[1]

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def record_criterion(request):
    """Store a one-line verdict for an acceptance criterion."""
    store = request.config.stash[_RESULTS]

    def record(number: int, ok: bool, detail: str):
        store[number] = (ok, detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_RESULTS, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        ok, detail = store[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture(scope="session")
def fig2():
    return ChannelParams(**FIG2)


@pytest.fixture(scope="session")
def fig2_sweeps():
    """Full-resolution sweeps and polished intercepts at K = 1 and K = 4."""
    out = {}
    for k in (1.0, 4.0):
        params = ChannelParams(**FIG2, K=k)
        result = icc_model.sweep(params, SweepConfig())
        out[k] = (result, icc_model.polished_intercepts(params, SweepConfig(), result))
    return out


@pytest.fixture(scope="session")
def zero_coop_sweep():
    cfg = SweepConfig(resolution=17, lambda_grid=(0.0,), zero_cooperation=True)
    return icc_model.sweep(ChannelParams(**FIG2, K=0.0), cfg)
