import pytest

from quarnet.netgen import gen_ba
from quarnet.simulate import EpidemicParams


def pytest_terminal_summary(terminalreporter):
    from conftest_acceptance import LOG

    if LOG:
        terminalreporter.section("acceptance criteria")
        for line in LOG:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ba10():
    """The workhorse graph of the experiment suites: BA, n=10^4, m=10."""
    return gen_ba(10000, 10, seed=3)


@pytest.fixture(scope="session")
def ba10_sweep(ba10):
    """Shared fine sweep on ba10 at beta=0.5 (used by several acceptance
    criteria); computed once per session."""
    from quarnet.experiments import SweepSpec, sweep_single

    spec = SweepSpec(
        graph=ba10,
        params=EpidemicParams(0.5, 1.0, 10),
        thresholds=tuple(round(0.02 * i, 10) for i in range(51)),
        trials=100,
        master_seed=7,
        workers=2,
    )
    return sweep_single(spec)
