"""Command-line frontend for the max4pc library.

Exit codes: 0 on success, 1 when verify/sweep report a failed check, 2 on
usage errors and invalid input. Artifacts go to stdout (or --output);
diagnostics go to stderr.
"""
import argparse
import json
import logging
import re
import sys
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict, TypeAdapter, ValidationError

from .basis import basis_from_leaf
from .errors import MalformedInput, Max4pcError
from .linalg import (bareiss_det, char_poly, descartes_inertia, exact_rank,
                     smith_normal_form, symmetric_inertia)
from .models import (BasisSet, CheckId, ChoicePolicy, SampleSpec, SnfResult,
                     TheoremCheck)
from .pairs import MatrixKind, build_matrix, submatrix, to_csv, to_json
from .tree import Tree, parse_edge_string, parse_tree, prufer_decode, random_tree
from .verify import sweep, verify_tree

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class CommandSpec(BaseModel):
    """Validated form of the parsed command line."""

    model_config = ConfigDict(extra="forbid")

    subcommand: Literal["matrix", "rank", "snf", "inertia", "basis", "det",
                        "verify", "sweep", "gen", "charpoly"]
    input: str | None = None
    edges: str | None = None
    prufer: str | None = None
    output: str | None = None
    log_file: str = "/tmp/max4pc.log"
    verbose: bool = False

    kind: MatrixKind = MatrixKind.MAX4PC
    format: Literal["csv", "json"] = "json"
    start_leaf: int | None = None
    policy: Literal["min", "max", "random"] = "min"
    seed: int = 0
    basis: str | None = None
    checks: list[CheckId] | None = None
    exhaustive: int = 0
    sample: list[SampleSpec] = []
    jobs: int = 1
    timing: bool = False
    n: int | None = None


def _add_tree_input(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--input", "-i", help="edge-list file (default: stdin)")
    source.add_argument("--edges", help='inline tree, e.g. "1-2,2-3"')
    source.add_argument("--prufer", help='Prüfer sequence, e.g. "1,1,2"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="max4pc",
        description="Exact Max4PC, Min4PC and 2-Steiner pair matrices of trees",
    )
    parser.add_argument("--output", "-o", help="write the artifact here instead of stdout")
    parser.add_argument("--log-file", default="/tmp/max4pc.log")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("matrix", help="emit a pair matrix")
    _add_tree_input(p)
    p.add_argument("--kind", choices=[k.value for k in MatrixKind], default="max4pc")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    for name, text in (("rank", "exact rank of Max4PC"),
                       ("snf", "Smith normal form of Max4PC"),
                       ("inertia", "exact inertia of Max4PC"),
                       ("charpoly", "characteristic polynomial of Max4PC")):
        _add_tree_input(sub.add_parser(name, help=text))

    p = sub.add_parser("basis", help="run the block traversal from a leaf")
    _add_tree_input(p)
    p.add_argument("--start-leaf", type=int, required=True)
    p.add_argument("--policy", choices=["min", "max", "random"], default="min")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("det", help="determinant of Max4PC[B,B]")
    _add_tree_input(p)
    p.add_argument("--basis", required=True, help="basis file: BasisSet JSON or one pair per line")

    p = sub.add_parser("verify", help="check the closed-form results on one tree")
    _add_tree_input(p)
    p.add_argument("--check", dest="checks", action="append",
                   choices=[c.value for c in CheckId], help="restrict to these checks")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sweep", help="verify over a corpus of trees")
    p.add_argument("--exhaustive", type=int, default=0, metavar="N",
                   help="every labeled tree with 3 <= n <= N")
    p.add_argument("--sample", action="append", default=[], metavar="n:count:seed")
    p.add_argument("--check", dest="checks", action="append",
                   choices=[c.value for c in CheckId])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true", help="add per-check wall-clock timings to the report")

    p = sub.add_parser("gen", help="random labeled tree in edge-list format")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    return parser


def load_tree(spec: CommandSpec) -> Tree:
    if spec.edges is not None:
        return parse_edge_string(spec.edges)
    if spec.prufer is not None:
        try:
            seq = [int(tok) for tok in re.split(r"[,\s]+", spec.prufer.strip()) if tok]
        except ValueError:
            raise MalformedInput(f"bad Prüfer sequence {spec.prufer!r}")
        return prufer_decode(seq)
    if spec.input is not None:
        with open(spec.input) as f:
            return parse_tree(f.read())
    return parse_tree(sys.stdin.read())


def load_basis_pairs(text: str) -> list[tuple[int, int]]:
    """Accept BasisSet JSON (as emitted by `basis`) or one "i j" pair per line."""
    if text.lstrip().startswith("{"):
        return BasisSet.model_validate_json(text).pairs
    pairs = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = [tok for tok in re.split(r"[\s,\-]+", line) if tok]
        if len(tokens) != 2:
            raise MalformedInput(f"expected one pair per line, got {line!r}")
        try:
            pairs.append((int(tokens[0]), int(tokens[1])))
        except ValueError:
            raise MalformedInput(f"non-integer label in {line!r}")
    return pairs


def _emit(text: str, output: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if output:
        with open(output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def execute(spec: CommandSpec) -> tuple[str, int]:
    """Run one subcommand; returns the artifact text and the exit code."""
    if spec.subcommand == "gen":
        if spec.n is None or spec.n < 1:
            raise MalformedInput("gen needs --n >= 1")
        return random_tree(spec.n, spec.seed).to_edge_list(), 0

    if spec.subcommand == "sweep":
        report = sweep(spec.exhaustive, spec.sample, checks=spec.checks,
                       jobs=spec.jobs, seed=spec.seed)
        return report.to_json(include_timing=spec.timing), 1 if report.failures else 0

    t = load_tree(spec)
    logger.info(f"{spec.subcommand}: tree with n={t.n}")

    if spec.subcommand == "matrix":
        m = build_matrix(t, spec.kind)
        return (to_csv(m) if spec.format == "csv" else to_json(m)), 0

    if spec.subcommand == "verify":
        results = verify_tree(t, spec.checks, seed=spec.seed)
        text = TypeAdapter(list[TheoremCheck]).dump_json(results, indent=2).decode()
        return text, 0 if all(r.passed for r in results) else 1

    if spec.subcommand == "basis":
        if spec.start_leaf is None:
            raise MalformedInput("basis needs --start-leaf")
        policy = ChoicePolicy(mode=spec.policy, seed=spec.seed)
        return basis_from_leaf(t, spec.start_leaf, policy).model_dump_json(), 0

    m = build_matrix(t, MatrixKind.MAX4PC)
    if spec.subcommand == "rank":
        return json.dumps({"rank": exact_rank(m.entries)}), 0
    if spec.subcommand == "snf":
        factors = smith_normal_form(m.entries).zeros_first()
        return SnfResult(invariant_factors=factors).model_dump_json(), 0
    if spec.subcommand == "inertia":
        return symmetric_inertia(m.entries).model_dump_json(), 0
    if spec.subcommand == "charpoly":
        p = char_poly(m.entries)
        return json.dumps({
            "coefficients": p.coefficients,
            "polynomial": str(p),
            "descartes": descartes_inertia(p).model_dump(),
        }), 0

    # det
    with open(spec.basis) as f:
        pairs = load_basis_pairs(f.read())
    det = bareiss_det(submatrix(m, pairs, pairs))
    return json.dumps({"det": det, "pairs": [list(p) for p in pairs]}), 0


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    fields = {k: v for k, v in vars(args).items() if v is not None}
    try:
        fields["sample"] = [SampleSpec.parse(s) for s in fields.get("sample", [])]
        spec = CommandSpec(**fields)
    except (ValueError, ValidationError) as e:
        print(f"max4pc: invalid arguments: {e}", file=sys.stderr)
        return 2

    logging.basicConfig(
        level=logging.DEBUG if spec.verbose else logging.INFO,
        format=LOG_FORMAT,
        filename=spec.log_file,
        filemode='w',
    )

    try:
        text, code = execute(spec)
    except Max4pcError as e:
        logger.error(f"{spec.subcommand} failed: {e}")
        print(f"max4pc: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (OSError, ValidationError) as e:
        print(f"max4pc: {e}", file=sys.stderr)
        return 2

    _emit(text, spec.output)
    if code:
        print(f"max4pc: {spec.subcommand} reported failed checks", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
