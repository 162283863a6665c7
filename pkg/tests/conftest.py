import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2


def random_dichotomic(rng, n):
    q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    signs = np.array([1.0 if i < (n + 1) // 2 else -1.0 for i in range(n)])
    m = (q * signs) @ q.conj().T
    return (m + m.conj().T) / 2


def random_unit(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


# --- acceptance summary ---------------------------------------------------------

CRITERIA = {
    1: "classical limit is exactly 2",
    2: "tensor optimizer reaches 2*sqrt(2)",
    3: "global optimizer reaches 3.43 within 2*sqrt(3) and B*B <= 16",
    4: "regimes nest with gaps >= 0.5",
    5: "hidden-variable models stay <= 2",
    6: "zero-expression residue < 1e-10",
    7: "quantum photon pair violates at 2*sqrt(2)",
    8: "Boole bounds match oracle and witnesses",
    9: "reruns are byte-identical",
}
_outcomes = {}


def pytest_runtest_logreport(report):
    cid = _criterion_of(report)
    if cid is None or not (report.when == "call" or report.failed):
        return
    _outcomes.setdefault(cid, []).append((report.nodeid.split("::")[-1], report.passed))


def _criterion_of(report):
    for name in report.keywords:
        if name.startswith("criterion_"):
            return int(name.split("_")[1])
    return None


def pytest_collection_modifyitems(items):
    # expose the marker argument as a keyword so log reports can see it
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.keywords[f"criterion_{mark.args[0]}"] = True


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_outcomes):
        checks = _outcomes[cid]
        failed = [name for name, ok in checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {cid}: {status}  {CRITERIA.get(cid, '')} ({len(checks) - len(failed)}/{len(checks)} checks)"
        if failed:
            line += "  failing: " + ", ".join(failed)
        terminalreporter.write_line(line)
