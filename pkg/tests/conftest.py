import pytest

from cardgroup import Constraint

# small constraints (n <= 6) checked exhaustively against the oracles
CORPUS = [
    Constraint(1, (1,)),
    Constraint(2, (0, 1)),
    Constraint(3, (0, 0, 1)),
    Constraint(3, (1, 1), {2: [(1, 3)]}),
    Constraint(4, (0, 2)),
    Constraint(4, (2, 1), {2: [(1,)]}),
    Constraint(5, (3, 1)),
    Constraint(5, (1, 2), {2: [(5,)]}, dummies={5: "Role B"}),
    Constraint(6, (0, 3)),
    Constraint(6, (6,)),
    Constraint(6, (2, 2), {2: [(5,), (6,)]}, dummies={5: "Role A", 6: "Role B"}),
    Constraint(6, (1, 1, 1), {2: [(2,)], 3: [(5, 6)]}, dummies={6: "6"}),
    Constraint(6, (0, 0, 2), {3: [(1,), (2, 3)]}),
    Constraint(6, (2, 0, 0, 1), {4: [(1, 3, 6)]}),
    Constraint(6, (1, 1, 1)),
]

# the running examples
PINNED_TRIPLES = Constraint(9, (0, 0, 3), {3: [(1,), (8, 9)]})
ONE_PAIR = Constraint(5, (3, 1))
ROLES = Constraint(9, (2, 2, 1), {2: [(8,)], 3: [(9,)]}, dummies={8: "Role B", 9: "Role C"})
ELEVEN = Constraint(11, (3, 2, 0, 1))

LARGER = [PINNED_TRIPLES, ROLES, ELEVEN, Constraint(7, (0, 2, 1))]


def corpus_id(c):
    return str(c).replace(" ", "_")


@pytest.fixture(params=CORPUS, ids=corpus_id)
def corpus_constraint(request):
    return request.param


_ACCEPTANCE_LINES = []


def record_acceptance(line):
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
