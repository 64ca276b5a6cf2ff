from itertools import combinations

from hypothesis import HealthCheck, settings, strategies as st

from unituran.hypergraph import Hypergraph

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def hypergraphs(draw, k=3, min_n=3, max_n=6, max_edges=None):
    n = draw(st.integers(min_n, max_n))
    pool = list(combinations(range(n), k))
    cap = len(pool) if max_edges is None else min(max_edges, len(pool))
    edges = draw(st.lists(st.sampled_from(pool), max_size=cap, unique=True)) if pool else []
    return Hypergraph(k, n, tuple(edges))


# one summary line per acceptance criterion
_criteria: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    status = "PASS" if report.passed else "FAIL"
    _criteria[props["criterion"]] = (status, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        status, detail = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {detail}")
