import io

import pytest

from citeproj.graph import load_citation_graph
from citeproj.projection import ProjectionPair

META_HEADER = "paper_id,year,area\n"


def make_graph(edges, meta_rows=()):
    edge_text = "".join(f"{u}\t{v}\n" for u, v in edges)
    meta_text = META_HEADER + "".join(f"{p},{y},{a}\n" for p, y, a in meta_rows)
    return load_citation_graph(io.StringIO(edge_text), io.StringIO(meta_text))


def make_pair(n_cited, edges, focal="v0"):
    """Projection pair over cited papers c0..c{n-1} from positional edges."""
    width = len(str(max(n_cited - 1, 0)))
    cited = tuple(f"c{i:0{width}d}" for i in range(n_cited))
    return ProjectionPair(focal, cited, tuple(sorted((cited[u], cited[v]) for u, v in edges)))


def clique(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@pytest.fixture
def data_dir(request):
    return request.path.parent / "data"


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
