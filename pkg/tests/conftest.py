"""Shared fixtures."""

import numpy as np
import pytest

from slelab.rng import RngStream


@pytest.fixture
def rng():
    return RngStream(20240601)


def ks_two_sample_p(x, y):
    from scipy.stats import ks_2samp

    return ks_2samp(np.asarray(x), np.asarray(y)).pvalue


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record (and print) one ``criterion N ... PASS/FAIL`` line."""

    def _report(number, text, passed):
        line = f"criterion {number:2d} {text} {'PASS' if passed else 'FAIL'}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
