import pytest
from hypothesis import strategies as st

from max4pc.tree import Tree, path, prufer_decode, star

# the ten-vertex tree whose block traversal is worked through by hand
EXAMPLE_EDGES = [(1, 2), (2, 3), (2, 4), (4, 5), (4, 8), (5, 6), (5, 10), (6, 7), (8, 9)]

EXAMPLE_BASIS_MAX = [(1, 2), (1, 4), (2, 4), (2, 8), (4, 8), (8, 9),
                     (4, 5), (4, 6), (5, 6), (6, 7)]


@pytest.fixture
def p3() -> Tree:
    return path(3)


@pytest.fixture
def p4() -> Tree:
    return path(4)


@pytest.fixture
def s4() -> Tree:
    return star(4)


@pytest.fixture
def example_tree() -> Tree:
    return Tree.from_edges(10, EXAMPLE_EDGES)


@st.composite
def prufer_sequences(draw, min_n: int = 3, max_n: int = 9) -> list[int]:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    return draw(st.lists(st.integers(min_value=1, max_value=n), min_size=n - 2, max_size=n - 2))


@st.composite
def trees(draw, min_n: int = 3, max_n: int = 9) -> Tree:
    return prufer_decode(draw(prufer_sequences(min_n, max_n)))
