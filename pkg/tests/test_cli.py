import io
import json

import pytest

from conftest import EXAMPLE_BASIS_MAX, EXAMPLE_EDGES
from max4pc import verify
from max4pc.cli import load_basis_pairs, run

EXAMPLE = ",".join(f"{u}-{v}" for u, v in EXAMPLE_EDGES)


@pytest.fixture
def cli(capsys, tmp_path):
    log = str(tmp_path / "max4pc.log")

    def invoke(*argv):
        code = run(["--log-file", log, *argv])
        out, err = capsys.readouterr()
        return code, out, err

    return invoke


def test_matrix_csv(cli):
    code, out, _ = cli("matrix", "--kind", "max4pc", "--edges", "1-2,2-3")
    assert code == 0
    assert out == "1-2,1-3,2-3\n2,3,2\n3,4,3\n2,3,2\n"


def test_matrix_json_steiner(cli):
    code, out, _ = cli("matrix", "--kind", "steiner2", "--format", "json", "--edges", "1-2,2-3")
    assert code == 0
    assert json.loads(out)["entries"] == [[1, 2, 2], [2, 2, 2], [2, 2, 1]]


def test_snf_of_p4(cli):
    code, out, _ = cli("snf", "--edges", "1-2,2-3,3-4")
    assert code == 0
    assert out == '{"invariant_factors":[0,0,1,1,2,2]}\n'


def test_rank_inertia_charpoly(cli):
    assert json.loads(cli("rank", "--prufer", "2,3")[1]) == {"rank": 4}
    assert json.loads(cli("inertia", "--prufer", "2 3")[1]) == {"n_zero": 2, "n_plus": 2, "n_minus": 2}
    payload = json.loads(cli("charpoly", "--edges", "1-2,2-3")[1])
    assert payload["coefficients"] == [1, -8, -2, 0]
    assert payload["polynomial"] == "x^3 - 8x^2 - 2x"
    assert payload["descartes"] == {"n_zero": 1, "n_plus": 1, "n_minus": 1}


def test_basis_then_det(cli, tmp_path):
    code, out, _ = cli("basis", "--edges", EXAMPLE, "--start-leaf", "1", "--policy", "max")
    assert code == 0
    basis = json.loads(out)
    assert [tuple(p) for p in basis["pairs"]] == EXAMPLE_BASIS_MAX

    basis_file = tmp_path / "basis.json"
    basis_file.write_text(out)
    code, out, _ = cli("det", "--edges", EXAMPLE, "--basis", str(basis_file))
    assert code == 0
    assert json.loads(out)["det"] == -256


def test_det_from_pair_lines(cli, tmp_path):
    basis_file = tmp_path / "basis.txt"
    basis_file.write_text("# P4 basis\n1 2\n1-3\n2,3\n3 4\n")
    code, out, _ = cli("det", "--edges", "1-2,2-3,3-4", "--basis", str(basis_file))
    assert code == 0
    assert json.loads(out) == {"det": 4, "pairs": [[1, 2], [1, 3], [2, 3], [3, 4]]}


def test_load_basis_pairs_rejects_triples():
    with pytest.raises(ValueError):
        load_basis_pairs("1 2 3\n")


def test_gen_output_feeds_other_subcommands(cli, tmp_path):
    code, out, _ = cli("gen", "--n", "9", "--seed", "4")
    assert code == 0
    assert out.splitlines()[0] == "9"
    assert cli("gen", "--n", "9", "--seed", "4")[1] == out

    tree_file = tmp_path / "tree.txt"
    tree_file.write_text(out)
    for sub in ("rank", "snf", "inertia", "verify"):
        code, _, err = cli(sub, "--input", str(tree_file))
        assert code == 0, err
    code, _, _ = cli("matrix", "--input", str(tree_file), "--kind", "min4pc")
    assert code == 0


def test_stdin_and_output_file(cli, tmp_path, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("3\n1 2\n2 3\n"))
    target = tmp_path / "rank.json"
    code, out, _ = cli("--output", str(target), "rank")
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text()) == {"rank": 2}


def test_verify_exit_codes(cli, monkeypatch):
    code, out, _ = cli("verify", "--edges", EXAMPLE, "--check", "T1-rank", "--check", "T2/T4d-det")
    assert code == 0
    assert [r["id"] for r in json.loads(out)] == ["T1-rank", "T2/T4d-det"]

    monkeypatch.setattr(verify, "exact_rank", lambda m: 0)
    code, out, err = cli("verify", "--edges", EXAMPLE, "--check", "T1-rank")
    assert code == 1
    assert json.loads(out)[0]["status"] == "fail"
    assert "failed checks" in err


def test_sweep(cli):
    code, out, _ = cli("sweep", "--exhaustive", "4", "--sample", "6:2:0",
                       "--check", "T1-rank")
    assert code == 0
    report = json.loads(out)
    assert report["trees_checked"] == 3 + 16 + 2
    assert report["failures"] == 0
    assert "timing_ms" not in report
    assert report["corpus"]["samples"] == [{"n": 6, "count": 2, "seed": 0}]


@pytest.mark.parametrize("argv", [
    (),
    ("rank", "--bogus"),
    ("frobnicate",),
    ("sweep", "--sample", "6:2"),
    ("matrix", "--kind", "avg"),
    ("rank", "--edges", "1-2", "--prufer", "1"),
])
def test_usage_errors(cli, argv):
    code, out, _ = cli(*argv)
    assert code == 2
    assert out == ""


@pytest.mark.parametrize("argv, name", [
    (("rank", "--edges", "1-2,2-3,3-1"), "NotATree"),
    (("rank", "--edges", "1-2,2-x"), "MalformedInput"),
    (("basis", "--edges", "1-2,2-3,3-4", "--start-leaf", "2"), "NotALeaf"),
    (("basis", "--edges", "1-2,1-3,1-4", "--start-leaf", "9"), "NotALeaf"),
    (("basis", "--edges", "1-2,1-3,1-4", "--start-leaf", "-1"), "NotALeaf"),
    (("rank", "--prufer", "1,9"), "LabelOutOfRange"),
])
def test_domain_errors(cli, argv, name):
    code, out, err = cli(*argv)
    assert code == 2
    assert out == ""
    assert name in err


def test_missing_input_file(cli, tmp_path):
    code, _, err = cli("rank", "--input", str(tmp_path / "absent.txt"))
    assert code == 2
    assert "absent.txt" in err


def test_sweep_timings_are_opt_in(cli):
    code, plain, _ = cli("sweep", "--exhaustive", "4", "--check", "T1-rank")
    assert code == 0
    _, again, _ = cli("sweep", "--exhaustive", "4", "--check", "T1-rank")
    assert plain == again
    assert "timing_ms" not in json.loads(plain)
    code, timed, _ = cli("sweep", "--exhaustive", "4", "--check", "T1-rank", "--timing")
    assert code == 0
    assert "T1-rank" in json.loads(timed)["timing_ms"]
