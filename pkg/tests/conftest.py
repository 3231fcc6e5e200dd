import pytest

from becknerlab import stochastic
from becknerlab.functionals import load_corpus


@pytest.fixture(scope="session")
def corpus():
    funcs, grade = load_corpus()
    return funcs, grade


@pytest.fixture(autouse=True)
def _fresh_ensembles():
    yield
    stochastic.clear_cache()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
