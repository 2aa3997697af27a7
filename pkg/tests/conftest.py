import itertools

import pytest
from hypothesis import HealthCheck, settings

from collinear.exact import collinear_int

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def brute_collinear_tuples(points, r):
    """Oracle: every r-subset tested pairwise-against-first by integer minors."""
    count = 0
    for combo in itertools.combinations(points, r):
        p, q = combo[0], combo[1]
        if all(collinear_int(p, q, s) for s in combo[2:]):
            count += 1
    return count


def brute_lines(points, min_pts):
    """Oracle: distinct point sets spanned by pairs, kept when large enough."""
    lines = set()
    for p, q in itertools.combinations(points, 2):
        on = frozenset(s for s in points if collinear_int(p, q, s))
        if len(on) >= min_pts:
            lines.add(on)
    return lines


@pytest.fixture(scope="session")
def grid32():
    from collinear.grid import grid_points
    return list(grid_points(3, 2))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
