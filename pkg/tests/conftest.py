from fractions import Fraction

import pytest

from bshyper.structures import FiniteStructure, Signature


def sig(*specs):
    return Signature.parse(list(specs) or ["E=1/2"])


def graph(vertices, edges=(), alpha="1/2"):
    return FiniteStructure(sig(f"E={alpha}"), vertices, {"E": [list(e) for e in edges]})


def star3(alpha="1/2"):
    return graph("abdx", ["ax", "bx", "dx"], alpha)


def triangle(alpha="1/2"):
    return graph("abc", ["ab", "bc", "ac"], alpha)


def complete(n, alpha="1/2", drop=0):
    vs = [f"v{i}" for i in range(n)]
    es = [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)]
    return graph(vs, es[drop:], alpha)


F = Fraction


@pytest.fixture
def half():
    return sig("E=1/2")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
