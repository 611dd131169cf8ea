import numpy as np
import pytest

from stvsi import ScenarioSpec, gen

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    _ACCEPTANCE.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def composite_traj():
    return gen(
        ScenarioSpec("composite", r0=0.6, alpha=0.8, amp=0.05, omega=2 * np.pi * 1.2,
                     alpha_osc=0.6, duration=5.0)
    )
