from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from elrc.parse import load_kb

KB_DIR = Path(__file__).resolve().parent.parent / "kbs"

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def kb_path(name: str) -> Path:
    return KB_DIR / name


@pytest.fixture(scope="session")
def bloodcells():
    return load_kb(kb_path("bloodcells.dkb"))


@pytest.fixture(scope="session")
def exinfty():
    return load_kb(kb_path("exinfty.dkb"))


@pytest.fixture(scope="session")
def penguin():
    return load_kb(kb_path("penguin.dkb"))


@pytest.fixture(scope="session")
def nosafe():
    return load_kb(kb_path("nosafe.dkb"))


@pytest.fixture(scope="session")
def abox_nominals():
    return load_kb(kb_path("abox_nominals.dkb"))


@pytest.fixture(scope="session")
def bloodcells_individuals():
    return load_kb(kb_path("bloodcells_individuals.dkb"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
