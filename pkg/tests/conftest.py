import numpy as np
import pytest

from halfsplit import Dataset, load_iris


def clouds(centers, per_class, sigma, seed):
    """Gaussian clouds, rows grouped by class."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    labels = np.repeat(np.arange(len(centers)), per_class)
    x = centers[labels] + sigma * rng.standard_normal((labels.size, centers.shape[1]))
    return Dataset(x, labels)


def dense_inverse_plane(rows, signs, mu):
    """Independent route: build E explicitly and invert the system matrix."""
    rows = np.asarray(rows, dtype=float).reshape(len(signs), -1)
    e = np.hstack([rows, -np.ones((rows.shape[0], 1))])
    d_e = np.asarray(signs, dtype=float)
    z = np.linalg.inv(np.eye(e.shape[1]) / mu + e.T @ e) @ (e.T @ d_e)
    return z[:-1], z[-1]


@pytest.fixture(scope="session")
def iris():
    return load_iris()


@pytest.fixture
def square_corners():
    """Four unit clouds at (+-5, +-5); class k sits at corner k in binary order."""
    corners = [(-5, -5), (5, -5), (-5, 5), (5, 5)]
    return clouds(corners, 50, 1.0, seed=7)


# ---------------------------------------------------------------- acceptance summary

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion this test checks")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("criterion")
    if marker:
        number, title = marker
        entry = _acceptance.setdefault(number, {"title": title, "ok": True, "seconds": 0.0, "parts": []})
        entry["ok"] &= report.passed
        entry["seconds"] += report.duration
        entry["parts"].append((report.nodeid.split("::")[-1], report.passed))


@pytest.fixture(autouse=True)
def _tag_criterion(request, record_property):
    marker = request.node.get_closest_marker("criterion")
    if marker:
        record_property("criterion", tuple(marker.args))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        e = _acceptance[number]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"[{status}] C{number} {e['title']} ({e['seconds']:.2f} s)")
        if len(e["parts"]) > 1 and not e["ok"]:
            for name, ok in e["parts"]:
                terminalreporter.write_line(f"         {'pass' if ok else 'FAIL'}  {name}")
