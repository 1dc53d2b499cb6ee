"""Shared fixtures and the per-criterion acceptance summary."""

import pytest

CRITERIA = {
    1: "kernel identity (closed form vs quadrature)",
    2: "kernel bounds 0 <= H(s) <= 4s/(1-s)",
    3: "weak-L2 norm of g below sqrt(8 pi)",
    4: "Lorentz engine exactness",
    5: "test field divergence and curl at second order",
    6: "Biot-Savart reconstruction oracle",
    7: "pointwise velocity domination",
    8: "stretching ratio corpus",
    9: "particle conservation and mirror symmetry",
    10: "growth envelope",
    11: "decay hypothesis check",
}

_results: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    entry = _results.setdefault(marker.args[0], {"ok": True, "notes": []})
    if rep.failed or rep.skipped:
        entry["ok"] = False
    if rep.when == "call":
        entry["notes"] += [f"{k}={v}" for k, v in item.user_properties]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        entry = _results.get(n)
        status = "NOT RUN" if entry is None else ("PASS" if entry["ok"] else "FAIL")
        notes = "; ".join(entry["notes"]) if entry else ""
        terminalreporter.write_line(f"criterion {n:2d}: {status:4s} {title}" + (f"  [{notes}]" if notes else ""))
