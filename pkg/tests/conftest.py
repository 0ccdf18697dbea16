import re

import numpy as np
import pytest

from chancomp.channels import KrausSet
from chancomp.linalg import random_density, random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20260914)


def dephasing(d=2):
    ops = []
    for k in range(d):
        e = np.zeros((d, d))
        e[k, k] = 1.0
        ops.append(e)
    return KrausSet.from_list(ops)


def random_kraus(d_a, d_b, n, rng):
    """Random trace-preserving Kraus set from a random isometry."""
    g = rng.normal(size=(d_b * n, d_a)) + 1j * rng.normal(size=(d_b * n, d_a))
    q, _ = np.linalg.qr(g)
    return KrausSet(q.reshape(d_b, n, d_a).transpose(1, 0, 2))


def random_unital(d, n, rng):
    """Mixture of unitaries, unital and trace preserving."""
    w = rng.dirichlet(np.ones(n))
    return KrausSet(np.stack([np.sqrt(w[k]) * random_unitary(d, rng) for k in range(n)]))


def padded_spectrum(m, size):
    ev = np.sort(np.linalg.eigvalsh(m))[::-1]
    out = np.zeros(size)
    k = min(size, ev.size)
    out[:k] = ev[:k]
    return out


def same_nonzero_spectrum(a, b, tol):
    n = max(a.shape[0], b.shape[0])
    return float(np.max(np.abs(padded_spectrum(a, n) - padded_spectrum(b, n)))) <= tol


# ---- acceptance summary --------------------------------------------------

_CRITERIA = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "criterion":
            _CRITERIA.append((value, report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    def order(row):
        digits = re.match(r"\d+", row[0]).group()
        return int(digits), row[0], row[1]

    for crit, name, outcome in sorted(_CRITERIA, key=order):
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {crit:>4}  {mark}  {name}")
    terminalreporter.write_line("")
    totals = {}
    for crit, _, outcome in _CRITERIA:
        key = re.match(r"\d+", crit).group()
        ok, n = totals.get(key, (0, 0))
        totals[key] = (ok + (outcome == "passed"), n + 1)
    for key in sorted(totals, key=int):
        ok, n = totals[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok == n else 'FAIL'} ({ok}/{n} checks)")


__all__ = ["random_density", "random_unitary"]
