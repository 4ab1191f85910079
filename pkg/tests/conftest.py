from __future__ import annotations

import sys
import warnings

import pytest
from hypothesis import HealthCheck, settings

from sosclique.certificate import CertificateParams, DegenerateCertificateWarning
from sosclique.graphs import Graph

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def make_params(n: int, r: int, k: int) -> CertificateParams:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCertificateWarning)
        return CertificateParams(n, r, k)


@pytest.fixture
def four_cycle() -> Graph:
    return Graph.cycle(4)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split()[2])):
        terminalreporter.write_line(line)
