import os

import pytest
from hypothesis import HealthCheck, settings

from ffdensity.characters import FamilySpec
from ffdensity.density import FamilyData
from ffdensity.gfpoly import field_make

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

THREADS = min(8, os.cpu_count() or 1)

# Families exercised by the density checks: (q, setting, genus).
SHIPPED = [(7, "kummer", 1), (5, "nonkummer", 2)]
EXTENDED = SHIPPED + [(7, "kummer", 2), (7, "kummer", 3), (7, "kummer", 4), (5, "nonkummer", 4)]


class FamilyCache:
    def __init__(self):
        self._ctx = {}
        self._fam = {}

    def ctx(self, q):
        if q not in self._ctx:
            self._ctx[q] = field_make(q)
        return self._ctx[q]

    def spec(self, q, setting, g, ell=3):
        return FamilySpec(self.ctx(q), ell, setting, g)

    def family(self, q, setting, g, zeros=True):
        key = (q, setting, g)
        if key not in self._fam:
            self._fam[key] = FamilyData.build(self.spec(q, setting, g))
        fam = self._fam[key]
        if zeros:
            fam.compute_zeros(threads=THREADS)
        return fam


@pytest.fixture(scope="session")
def families():
    return FamilyCache()


@pytest.fixture(scope="session")
def ctx7(families):
    return families.ctx(7)


@pytest.fixture(scope="session")
def ctx5(families):
    return families.ctx(5)


# ---- acceptance report lines, printed once at the end of the run

CRITERIA: dict[str, str] = {}


@pytest.fixture
def criterion():
    def record(key, ok, detail):
        CRITERIA[key] = f"CRITERION {key}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for key in sorted(CRITERIA, key=lambda k: (int(k.split()[0].rstrip("abc")), k)):
            terminalreporter.write_line(CRITERIA[key])
