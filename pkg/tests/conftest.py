import pytest

from rwb import parse_theory
from rwb.structure import Structure
from rwb.syntax import Signature

TRANS = "sort A; rel R(A,A); axiom [x:A,y:A,z:A] R(x,y) & R(y,z) |- R(x,z);"


@pytest.fixture
def binary():
    return parse_theory("sort A; rel R(A, A);")


@pytest.fixture
def trans():
    return parse_theory(TRANS)


def graph(sig: Signature, elements, edges, rel="R", sort="A") -> Structure:
    return Structure(sig, {sort: set(elements)}, {rel: set(edges)})
