import json

import pytest

from mubody import cli

# criterion number -> list of (test name, passed, detail)
_CRITERIA: dict[int, list] = {}

CRITERION_TITLES = {
    1: "constant identity c_{n,p} int |u.v|^p = 2",
    2: "closed-form anchors (mu of disk, Gamma of disk, Pi^+ of square)",
    3: "identity suites at algebraic precision",
    4: "dual-functional identities and Prop3.1/3.2/3.5",
    5: "inequality suites, zero gated failures, seeds 7/42/1337",
    6: "equality-case detection",
    7: "oracle equivalence against Monte Carlo",
    8: "determinism and exit code of the default verify run",
    9: "convergence of mu(Pi^{0,*} simplex) under grid doubling",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _CRITERIA.setdefault(mark.args[0], []).append((item.name, rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        rows = _CRITERIA[n]
        ok = all(r[1] for r in rows)
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {CRITERION_TITLES.get(n, '')}")
        for name, passed, detail in rows:
            tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}" + (f"  [{detail}]" if detail else ""))


# default verification runs are expensive, so they are shared by the session

_REPORTS: dict = {}


def default_report(tmp_path_factory, seed: int, run: int = 0):
    """Report dict of ``mubody verify --seed <seed>`` with the default config."""
    key = (seed, run)
    if key not in _REPORTS:
        out = tmp_path_factory.mktemp(f"verify{seed}_{run}") / "report.json"
        code = cli.main(["verify", "--seed", str(seed), "--format", "json", "--out", str(out)])
        text = out.read_text()
        _REPORTS[key] = (code, text, json.loads(text))
    return _REPORTS[key]


@pytest.fixture(scope="session")
def reports(tmp_path_factory):
    return lambda seed, run=0: default_report(tmp_path_factory, seed, run)
