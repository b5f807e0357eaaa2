import pytest

from concurflow.netmodel import (
    Commodity,
    Edge,
    Network,
    Path,
    PathSystem,
    infer_traversals,
)

# One line per acceptance criterion, printed in the terminal summary so the
# verdicts are visible without -s.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_network(nodes, edges, commodities):
    """edges: (id, tail, head, cap, directed); commodities: (source, sink, bound)."""
    return Network(
        nodes=tuple(nodes),
        edges=tuple(Edge(*e) for e in edges),
        commodities=tuple(
            Commodity(i, s, t, b) for i, (s, t, b) in enumerate(commodities, start=1)
        ),
    )


def make_system(network, path_edge_ids):
    """path_edge_ids: per commodity, list of edge-id lists (oriented by chaining)."""
    groups = []
    for ci, paths in enumerate(path_edge_ids, start=1):
        source = network.commodities[ci - 1].source
        groups.append(
            tuple(Path(ci, infer_traversals(network, source, ids)) for ids in paths)
        )
    return PathSystem(network, tuple(groups))


def t1_system():
    """One shared directed edge of capacity 1, two commodities with bounds 1 and 2."""
    net = make_network(
        ["s", "t"],
        [("e1", "s", "t", 1.0, True)],
        [("s", "t", 1.0), ("s", "t", 2.0)],
    )
    return make_system(net, [[["e1"]], [["e1"]]])


def t2_system():
    """Two disjoint directed edges, caps 0.5 and 1.0, unit bounds."""
    net = make_network(
        ["s1", "t1", "s2", "t2"],
        [("e1", "s1", "t1", 0.5, True), ("e2", "s2", "t2", 1.0, True)],
        [("s1", "t1", 1.0), ("s2", "t2", 1.0)],
    )
    return make_system(net, [[["e1"]], [["e2"]]])


def t3_system():
    """A single commodity with bound 1 on a slack edge of capacity 2."""
    net = make_network(
        ["s", "t"],
        [("e1", "s", "t", 2.0, True)],
        [("s", "t", 1.0)],
    )
    return make_system(net, [[["e1"]]])


@pytest.fixture
def t1():
    return t1_system()


@pytest.fixture
def t2():
    return t2_system()


@pytest.fixture
def t3():
    return t3_system()
