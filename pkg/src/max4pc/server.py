import asyncio
import json
import logging
from typing import Any, Sequence

from mcp.server import NotificationOptions, Server
from mcp.server.models import InitializationOptions
from mcp.types import TextContent, Tool

from .basis import basis_from_leaf
from .linalg import exact_rank, smith_normal_form, symmetric_inertia
from .models import CheckId, ChoicePolicy, SnfResult
from .pairs import MatrixKind, build_matrix, to_json
from .tree import Tree, parse_edge_string, prufer_decode
from .verify import verify_star_eigen, verify_tree

logger = logging.getLogger(__name__)

server = Server("max4pc")

TREE_PROPERTIES = {
    "edges": {
        "type": "string",
        "description": 'Tree as inline edges, e.g. "1-2,2-3,2-4"'
    },
    "prufer": {
        "type": "array",
        "items": {"type": "integer", "minimum": 1},
        "description": "Tree as a Prüfer sequence (length n-2)"
    }
}


def _tree_schema(**extra: dict) -> dict:
    return {
        "type": "object",
        "properties": {**TREE_PROPERTIES, **extra}
    }


def tree_from_arguments(arguments: dict) -> Tree:
    if "edges" in arguments and arguments["edges"]:
        return parse_edge_string(arguments["edges"])
    if "prufer" in arguments:
        return prufer_decode([int(v) for v in arguments["prufer"]])
    raise ValueError("Provide the tree as 'edges' or 'prufer'")


def _text(payload: str) -> list[TextContent]:
    return [TextContent(type="text", text=payload)]


@server.list_tools()
async def list_tools() -> list[Tool]:
    return [
        Tool(
            name="build_matrix",
            description="Build the Max4PC, Min4PC or 2-Steiner pair matrix of a tree",
            inputSchema=_tree_schema(kind={
                "type": "string",
                "enum": [k.value for k in MatrixKind],
                "description": "Which pair matrix to build (default max4pc)"
            })
        ),
        Tool(
            name="rank",
            description="Exact rank of the Max4PC matrix of a tree",
            inputSchema=_tree_schema()
        ),
        Tool(
            name="snf",
            description="Invariant factors of the Max4PC matrix, zeros first",
            inputSchema=_tree_schema()
        ),
        Tool(
            name="inertia",
            description="Exact (zero, positive, negative) eigenvalue counts of Max4PC",
            inputSchema=_tree_schema()
        ),
        Tool(
            name="basis",
            description="Row basis of Max4PC from the block traversal started at a leaf",
            inputSchema={
                **_tree_schema(
                    start_leaf={"type": "integer", "minimum": 1},
                    policy={"type": "string", "enum": ["min", "max", "random"]},
                    seed={"type": "integer"}
                ),
                "required": ["start_leaf"]
            }
        ),
        Tool(
            name="verify_tree",
            description="Check rank, determinant, SNF and inertia formulas on one tree",
            inputSchema=_tree_schema(
                checks={
                    "type": "array",
                    "items": {"type": "string", "enum": [c.value for c in CheckId]}
                },
                seed={"type": "integer"}
            )
        ),
        Tool(
            name="star_eigen",
            description="Check the characteristic polynomial and eigenvalues of Max4PC for the star S_n",
            inputSchema={
                "type": "object",
                "properties": {
                    "n": {
                        "type": "integer",
                        "minimum": 3,
                        "description": "Number of vertices"
                    }
                },
                "required": ["n"]
            }
        )
    ]


@server.call_tool()
async def call_tool(name: str, arguments: Any) -> Sequence[TextContent]:
    arguments = arguments or {}
    logger.debug(f"call_tool {name} {arguments}")

    if name == "star_eigen":
        return _text(verify_star_eigen(int(arguments["n"])).model_dump_json())

    if name not in ("build_matrix", "rank", "snf", "inertia", "basis", "verify_tree"):
        raise ValueError(f"Unknown tool: {name}")

    t = tree_from_arguments(arguments)

    if name == "build_matrix":
        kind = MatrixKind(arguments.get("kind", "max4pc"))
        return _text(to_json(build_matrix(t, kind)))

    elif name == "basis":
        policy = ChoicePolicy(mode=arguments.get("policy", "min"), seed=arguments.get("seed", 0))
        return _text(basis_from_leaf(t, int(arguments["start_leaf"]), policy).model_dump_json())

    elif name == "verify_tree":
        results = verify_tree(t, arguments.get("checks"), seed=arguments.get("seed", 0))
        return _text(json.dumps([r.model_dump(mode="json") for r in results]))

    entries = build_matrix(t, MatrixKind.MAX4PC).entries
    if name == "rank":
        return _text(json.dumps({"rank": exact_rank(entries)}))
    elif name == "snf":
        factors = smith_normal_form(entries).zeros_first()
        return _text(SnfResult(invariant_factors=factors).model_dump_json())
    return _text(symmetric_inertia(entries).model_dump_json())


async def serve():
    from mcp.server.stdio import stdio_server

    logging.basicConfig(
        level=logging.DEBUG,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        filename='/tmp/max4pc_server.log',
        filemode='w'
    )
    logger.debug("Starting max4pc server...")

    try:
        async with stdio_server() as (read_stream, write_stream):
            logger.debug("Server streams initialized")
            await server.run(
                read_stream,
                write_stream,
                InitializationOptions(
                    server_name="max4pc",
                    server_version="0.1.0",
                    capabilities=server.get_capabilities(
                        notification_options=NotificationOptions(),
                        experimental_capabilities={}
                    )
                )
            )
    except Exception as e:
        logger.error(f"Server error: {str(e)}", exc_info=True)
        raise


def main():
    asyncio.run(serve())


if __name__ == "__main__":
    main()
