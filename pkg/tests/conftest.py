import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from riesz_flow.grid import GridField, build_domain

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def unit_1d():
    return build_domain(1, (0.0, 1.0), 1024)


@pytest.fixture(scope="session")
def small_1d():
    return build_domain(1, (0.0, 1.0), 64)


@pytest.fixture(scope="session")
def small_2d():
    return build_domain(2, [(0.0, 1.0), (0.0, 1.0)], 24)


def random_field(domain, seed):
    rng = np.random.default_rng(seed)
    return GridField(domain, rng.standard_normal(domain.n_cells))


# criterion number -> list of (ok, detail); printed at the end of the session
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def record():
    def _record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE.setdefault(number, []).append((bool(ok), detail))
        return bool(ok)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p[0] for p in parts)
        detail = "; ".join(p[1] for p in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}")
