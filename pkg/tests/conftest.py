import pytest

from anytime_cdg.constraints import bundled_grammar
from anytime_cdg.model import nodes_from_tokens

DEMO_SENTENCE = "Tom reads the letter".split()


@pytest.fixture(scope="session")
def demo():
    return bundled_grammar("demo")


@pytest.fixture(scope="session")
def demo_lattice():
    return bundled_grammar("demo_lattice")


@pytest.fixture
def demo_nodes(demo):
    return nodes_from_tokens(demo, DEMO_SENTENCE)


def pytest_terminal_summary(terminalreporter):
    from report import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
