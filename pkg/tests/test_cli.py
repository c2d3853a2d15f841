import json
import subprocess
import sys

import pytest

from conftest import S9, fixture_path, load_fixture
from scgroups.cli import EXIT_FAIL, EXIT_LIMIT, EXIT_OK, EXIT_USAGE, run
from scgroups.cpr import emit_text, from_tuple
from scgroups.sggi import GeneratorTuple, clear_memo, dual

EXAMPLES = ["s9_example.json", "s10_example.json", "s13_example.json"]
AUGMENTED = ["s9_augmented.json", "s10_augmented.json", "s13_augmented.json"]


def scg(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def simplex5(tmp_path):
    t = GeneratorTuple.from_cycles([[(1, 2)], [(2, 3)], [(3, 4)], [(4, 5)]], 5)
    path = tmp_path / "simplex5.json"
    path.write_text(t.to_json())
    return path


class TestCheck:
    @pytest.mark.parametrize("name,order", list(zip(EXAMPLES, ["362880", "3628800", "6227020800"])))
    def test_examples_pass(self, capsys, name, order):
        code, out, _ = scg(capsys, "check", fixture_path(name))
        assert code == EXIT_OK
        assert f"group order: {order}" in out
        assert "full symmetric group: yes" in out
        assert out.strip().endswith("string C-group: yes")

    @pytest.mark.parametrize("name", AUGMENTED)
    def test_augmented_fail(self, capsys, name):
        code, out, _ = scg(capsys, "check", fixture_path(name))
        assert code == EXIT_FAIL
        assert "intersection property: fails" in out
        assert "witness:" in out

    def test_verbose(self, capsys):
        code, out, _ = scg(capsys, "check", fixture_path("s9_example.json"), "--verbose")
        assert code == EXIT_OK
        assert "schlafli type: {" in out
        assert "rho_0 =" in out and "rho_2 =" in out

    def test_json(self, capsys):
        code, out, _ = scg(capsys, "check", fixture_path("s10_augmented.json"), "--json")
        assert code == EXIT_FAIL
        rep = json.loads(out)
        assert rep["is_string_c_group"] is False

    def test_not_string(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n": 3, "rank": 3, "generators": [[2, 1, 3], [1, 3, 2], [3, 2, 1]]}))
        code, out, _ = scg(capsys, "check", path)
        assert code == EXIT_FAIL
        assert "string property: fails" in out

    def test_cpr_text_input(self, capsys, tmp_path):
        path = tmp_path / "s9.cpr"
        path.write_text("# S_9 example\n" + emit_text(from_tuple(S9)))
        code, out, _ = scg(capsys, "check", path)
        assert code == EXIT_OK and "group order: 362880" in out

    def test_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO(S9.to_json()))
        code, _, _ = scg(capsys, "check", "-")
        assert code == EXIT_OK

    def test_unreadable_and_garbage(self, capsys, tmp_path):
        code, _, err = scg(capsys, "check", tmp_path / "missing.json")
        assert code == EXIT_USAGE and "cannot read" in err
        bad = tmp_path / "bad.txt"
        bad.write_text("hello\n")
        code, _, _ = scg(capsys, "check", bad)
        assert code == EXIT_USAGE
        bad.write_text("cpr 2 1 0\n1 2\n")
        code, _, err = scg(capsys, "check", bad)
        assert code == EXIT_USAGE and "line 2" in err
        bad.write_text('{"n": 3, "rank": 1, "generators": [[1, 2, 3]]}')
        code, _, _ = scg(capsys, "check", bad)
        assert code == EXIT_USAGE

    def test_limit_env(self, capsys, monkeypatch):
        clear_memo()  # a cached verdict would bypass the limit
        monkeypatch.setenv("SCG_INTERSECTION_LIMIT", "10")
        code, _, err = scg(capsys, "check", fixture_path("s10_augmented.json"))
        assert code == EXIT_LIMIT and "resource limit" in err
        monkeypatch.setenv("SCG_INTERSECTION_LIMIT", "lots")
        code, _, _ = scg(capsys, "check", fixture_path("s9_example.json"))
        assert code == EXIT_USAGE


class TestSmallCommands:
    def test_schlafli(self, capsys, simplex5):
        code, out, _ = scg(capsys, "schlafli", simplex5)
        assert code == EXIT_OK and out.strip() == "{3,3,3}"

    def test_dual_twice_is_identity(self, capsys, tmp_path):
        for name in EXAMPLES + AUGMENTED:
            src = fixture_path(name)
            once, twice = tmp_path / "once.json", tmp_path / "twice.json"
            assert scg(capsys, "dual", src, "--out", once)[0] == EXIT_OK
            assert scg(capsys, "dual", once, "--out", twice)[0] == EXIT_OK
            code, out, _ = scg(capsys, "dual", twice)
            assert out == once.read_text()
            assert GeneratorTuple.from_json(twice.read_text()) == load_fixture(name)
            with open(src) as fh:
                assert twice.read_text().strip() == fh.read().strip()

    def test_dual_content(self, capsys):
        code, out, _ = scg(capsys, "dual", fixture_path("s9_example.json"))
        assert GeneratorTuple.from_json(out) == dual(S9)

    def test_render(self, capsys, tmp_path):
        code, out, _ = scg(capsys, "render", fixture_path("s9_augmented.json"), "--format", "dot")
        assert code == EXIT_OK and 'label="-1"' in out
        code, out, _ = scg(capsys, "render", fixture_path("s9_example.json"), "--format", "text")
        assert out.startswith("cpr 9 3 0\n")
        path = tmp_path / "g.cpr"
        scg(capsys, "render", fixture_path("s13_example.json"), "--out", path)
        code, out, _ = scg(capsys, "check", path)
        assert code == EXIT_OK


class TestReduce:
    def test_applicable(self, capsys, simplex5):
        code, out, err = scg(capsys, "reduce", simplex5, "--check")
        assert code == EXIT_OK
        red = GeneratorTuple.from_json(out)
        assert red.rank == 3 and red.order() == 120
        assert "# string C-group: yes" in err and "# group order preserved: yes" in err

    def test_not_applicable(self, capsys, tmp_path):
        t = GeneratorTuple.from_cycles([[(1, 2)], [(2, 3)], [(3, 4)], [(4, 5), (6, 7)]], 7)
        path = tmp_path / "t.json"
        path.write_text(t.to_json())
        code, out, err = scg(capsys, "reduce", path)
        assert code == EXIT_FAIL and out == "" and "even order" in err

    def test_rank_too_small(self, capsys):
        code, _, _ = scg(capsys, "reduce", fixture_path("s9_example.json"))
        assert code == EXIT_USAGE


class TestAugment:
    @pytest.mark.parametrize(
        "name,edge,fails",
        [
            ("s9_example.json", "{1,2}", "imprimitivity"),
            ("s10_example.json", "{2,3}", "parity"),
            ("s13_example.json", "{2,3}", "imprimitivity"),
        ],
    )
    def test_examples(self, capsys, name, edge, fails):
        code, out, _ = scg(capsys, "augment", fixture_path(name), "--all", "--check")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "1 candidate edge"
        assert lines[1].startswith(f"edge {edge}: ")
        assert "theorem applies: no" in lines[1]
        assert f"(fails: {fails})" in lines[1]
        assert lines[1].endswith("verified: false")
        aug = GeneratorTuple.from_json(lines[2].strip())
        assert aug == load_fixture(name.replace("example", "augmented"))

    def test_explain(self, capsys):
        code, out, _ = scg(capsys, "augment", fixture_path("s10_example.json"), "--edge", "3,2", "--explain")
        assert code == EXIT_OK
        assert "blocks [[3, 10], [4, 9], [5, 8], [6, 7]]" in out
        assert "rho_0, rho_1, rho_2 all even: FAIL" in out

    def test_json(self, capsys):
        code, out, _ = scg(capsys, "augment", fixture_path("s13_example.json"), "--json", "--check")
        (rec,) = json.loads(out)
        assert rec["edge"] == [2, 3] and rec["verified"] is False
        assert rec["report"]["failed"] == ["imprimitivity"]

    def test_bad_edge(self, capsys):
        code, _, err = scg(capsys, "augment", fixture_path("s9_example.json"), "--edge", "3,4")
        assert code == EXIT_FAIL and "not a candidate" in err
        code, _, _ = scg(capsys, "augment", fixture_path("s9_example.json"), "--edge", "x")
        assert code == EXIT_USAGE

    def test_precondition(self, capsys, simplex5):
        code, _, err = scg(capsys, "augment", simplex5)
        assert code == EXIT_FAIL and "rank 3" in err

    def test_edge_and_all_exclusive(self, capsys):
        code, _, _ = scg(capsys, "augment", fixture_path("s9_example.json"), "--all", "--edge", "1,2")
        assert code == EXIT_USAGE


class TestEnumerate:
    def test_jsonl(self, capsys, tmp_path):
        out = tmp_path / "s5.jsonl"
        code, _, err = scg(capsys, "enumerate", "--n", 5, "--rank", 4, "--out", out)
        assert code == EXIT_OK and "1 representations" in err
        lines = out.read_text().splitlines()
        assert json.loads(lines[0])["count"] == 1
        rec = json.loads(lines[1])
        assert rec["schlafli"] == [3, 3, 3] and rec["rrt"] == 1 and rec["merge"] is True

    def test_no_dual(self, capsys):
        code, out, _ = scg(capsys, "enumerate", "--n", 5, "--rank", 3, "--no-dual")
        assert json.loads(out.splitlines()[0])["dedup"] == "iso"

    def test_big_required(self, capsys):
        code, _, err = scg(capsys, "enumerate", "--n", 9, "--rank", 3)
        assert code == EXIT_USAGE and "--big" in err

    def test_bad_args(self, capsys):
        assert scg(capsys, "enumerate", "--n", 5, "--rank", 5)[0] == EXIT_USAGE
        assert scg(capsys, "enumerate", "--n", 5, "--rank", 3, "--jobs", 0)[0] == EXIT_USAGE
        assert scg(capsys, "enumerate", "--n", 5)[0] == EXIT_USAGE
        assert scg(capsys, "frobnicate")[0] == EXIT_USAGE
        assert scg(capsys, "check", fixture_path("s9_example.json"), "--bogus")[0] == EXIT_USAGE

    def test_limit(self, capsys, monkeypatch):
        monkeypatch.setenv("SCG_INTERSECTION_LIMIT", "2")
        code, _, err = scg(capsys, "enumerate", "--n", 6, "--rank", 4)
        assert code == EXIT_LIMIT


class TestTable1:
    def test_rows_5_6(self, capsys):
        code, out, _ = scg(capsys, "table1", "--from", 5, "--to", 6)
        assert code == EXIT_OK
        rows = [line.split() for line in out.splitlines()]
        assert rows[0] == ["G", "Rk", "3", "Rk", "4", "RRT", "RAT"]
        assert rows[1] == ["S_5", "4", "1", "1", "1"]
        assert rows[2] == ["S_6", "2", "4", "2", "2"]

    def test_json(self, capsys):
        code, out, _ = scg(capsys, "table1", "--from", 5, "--to", 5, "--json")
        assert json.loads(out) == [{"n": 5, "rk3": 4, "rk4": 1, "rrt": 1, "rat": 1}]

    def test_bad_range(self, capsys):
        assert scg(capsys, "table1", "--from", 4, "--to", 6)[0] == EXIT_USAGE
        assert scg(capsys, "table1", "--from", 5, "--to", 9)[0] == EXIT_USAGE


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "scgroups", "check", fixture_path("s9_example.json")], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "string C-group: yes" in proc.stdout
