import asyncio
import json

import pytest

from conftest import EXAMPLE_BASIS_MAX, EXAMPLE_EDGES
from max4pc.errors import NotATree
from max4pc.server import call_tool, list_tools, tree_from_arguments

EXAMPLE = ",".join(f"{u}-{v}" for u, v in EXAMPLE_EDGES)


def call(name, arguments):
    content = asyncio.run(call_tool(name, arguments))
    assert len(content) == 1 and content[0].type == "text"
    return json.loads(content[0].text)


def test_list_tools():
    tools = asyncio.run(list_tools())
    assert [t.name for t in tools] == [
        "build_matrix", "rank", "snf", "inertia", "basis", "verify_tree", "star_eigen",
    ]
    basis = next(t for t in tools if t.name == "basis")
    assert basis.inputSchema["required"] == ["start_leaf"]
    assert {"edges", "prufer"} <= set(basis.inputSchema["properties"])


def test_tree_arguments():
    assert tree_from_arguments({"edges": "1-2,2-3"}) == tree_from_arguments({"prufer": [2]})
    with pytest.raises(ValueError):
        tree_from_arguments({})


def test_matrix_and_invariants():
    assert call("build_matrix", {"edges": "1-2,2-3"})["entries"] == [[2, 3, 2], [3, 4, 3], [2, 3, 2]]
    assert call("build_matrix", {"prufer": [2], "kind": "min4pc"})["entries"] == [
        [0, 1, 2], [1, 0, 1], [2, 1, 0],
    ]
    assert call("rank", {"edges": "1-2,2-3,3-4"}) == {"rank": 4}
    assert call("snf", {"prufer": [2, 3]}) == {"invariant_factors": [0, 0, 1, 1, 2, 2]}
    assert call("inertia", {"prufer": [2, 3]}) == {"n_zero": 2, "n_plus": 2, "n_minus": 2}


def test_basis_tool():
    payload = call("basis", {"edges": EXAMPLE, "start_leaf": 1, "policy": "max"})
    assert [tuple(p) for p in payload["pairs"]] == EXAMPLE_BASIS_MAX
    assert payload["provenance"][0]["step"] == "2c"


def test_verify_and_star_tools():
    results = call("verify_tree", {"edges": EXAMPLE, "checks": ["T1-rank", "T5-inertia"]})
    assert [(r["id"], r["status"]) for r in results] == [("T1-rank", "pass"), ("T5-inertia", "pass")]
    star = call("star_eigen", {"n": 5})
    assert star["status"] == "pass"
    assert star["expected"].startswith("x^10 - 32x^9 - 24x^8")


def test_errors():
    with pytest.raises(ValueError, match="Unknown tool"):
        asyncio.run(call_tool("eigenvalues", {}))
    with pytest.raises(NotATree):
        asyncio.run(call_tool("rank", {"edges": "1-2,2-1"}))
