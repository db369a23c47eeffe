from __future__ import annotations

import pytest

from syzkit import dualbase, locus, subdivision


@pytest.fixture(scope="session")
def std_weight():
    return subdivision.standard_weight()


@pytest.fixture(scope="session")
def std_locus(std_weight):
    return locus.singular_locus(std_weight)


@pytest.fixture(scope="session")
def std_mirror(std_weight):
    """(kahler weight, Delta_w, its dual hull, mirror locus) for the standard weight."""
    kw = dualbase.kahler_weight(std_weight)
    dw = dualbase.build_delta_w(kw)
    dwd = dualbase.build_delta_w_dual(kw)
    gp = locus.mirror_locus(dw, dualbase.face_map_pi(dw))
    return kw, dw, dwd, gp


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_report(request):
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])
    tr = request.config.pluginmanager.getplugin("terminalreporter")

    def report(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        lines.append(line)
        if tr is not None:
            tr.write_line("")
            tr.write_line(line)

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
