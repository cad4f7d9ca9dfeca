import json

import pytest
from click.testing import CliRunner

from cli import cli as cli_module
from cli.cli import cli
from core.errors import PreconditionError


@pytest.fixture
def run(state_dir):
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, list(args))

    return invoke


class TestBasics:
    def test_version(self, run):
        result = run("--version")
        assert result.exit_code == 0
        assert "0.1.0" in result.output

    def test_dh(self, run):
        result = run("dh", "b[b]")
        assert result.exit_code == 0
        assert result.output.strip() == "1 * <b,b> + 1 * <b[b]>"

    def test_dh_json(self, run):
        result = run("dh", "b[b]", "--json")
        payload = json.loads(result.output)
        assert payload["combo"] == "1 * <b,b> + 1 * <b[b]>"
        assert len(payload["terms"]) == 2

    def test_dh_divfree(self, run):
        result = run("dh", "b", "--divfree")
        assert result.exit_code == 0
        assert result.output.strip() == "0"

    def test_dv(self, run):
        assert run("dv", "b").output.strip() == "1 * o1"

    def test_bad_forest(self, run):
        result = run("dh", "b[")
        assert result.exit_code == 1
        assert "❌" in result.output

    def test_wrong_grade(self, run):
        assert run("dh", "<b>").exit_code == 1


class TestEnumeration:
    def test_enumerate(self, run):
        result = run("enumerate", "-N", "2")
        assert result.exit_code == 0
        assert result.output.split("\n")[:2] == ["<b> b", "b[b]"]

    def test_enumerate_orbits(self, run):
        result = run("enumerate", "-N", "3", "-n", "2", "--orbits", "--json")
        assert json.loads(result.output)["forests"] == ["b b[b]"]

    def test_max_order(self, run):
        result = run("enumerate", "-N", "20")
        assert result.exit_code == 1
        assert "max_order" in result.output

    def test_dims_are_cached(self, run, state_dir):
        result = run("dims", "-N", "3", "--json")
        assert result.exit_code == 0
        record = json.loads(result.output)
        assert (record["forests"], record["dim"]) == (6, 6)
        state = json.loads((state_dir / "state.json").read_text())
        assert state["entries"]["dim:3:1:0:standard"] == 6

    def test_dims_csv(self, run):
        result = run("dims", "-N", "2", "-n", "0", "--csv")
        lines = result.output.strip().split("\n")
        assert lines[0] == "N,n,p,divfree,forests,dim"
        assert lines[1] == "2,0,0,False,3,3"

    def test_tables(self, run):
        result = run("tables", "-K", "10", "--which", "solenoidal")
        assert result.exit_code == 0
        last = result.output.strip().split("\n")[-1].split()
        assert last == ["10", "7261", "5045", "2216", "937"]

    def test_tables_json(self, run):
        payload = json.loads(run("tables", "-K", "7", "--json").output)
        assert payload["bottom_rows"][6]["functional"] == 571


class TestOperators:
    def test_euler_star(self, run):
        assert run("euler", "<b[b]>", "--kind", "star").output.strip() == "2 * <b[o1]>"

    def test_homotopy(self, run):
        assert run("homotopy", "hH", "<b,b>").output.strip() == "1 * b[b]"
        assert run("homotopy", "ibp", "<b> <b>").output.strip() == "1 * <b> b"

    def test_antiderivative_precondition(self, run):
        result = run("homotopy", "antiderivative", "<b,b>")
        assert result.exit_code == 1
        assert "E^0" in result.output

    def test_divfree_remainder(self, run):
        payload = json.loads(run("homotopy", "divfree", "b", "--json").output)
        assert payload == {"h": "0", "remainder": "1 * b"}

    def test_solenoidal_gen(self, run):
        payload = json.loads(run("solenoidal", "gen", "-N", "3", "--json").output)
        assert payload["dim"] == 1
        assert payload["generators"]

    def test_annihilators_need_input(self, run):
        assert run("annihilators").exit_code == 1


class TestChecks:
    def test_exactness(self, run):
        result = run("exactness", "-N", "2")
        assert result.exit_code == 0
        assert "✅ exact at N=2" in result.output

    def test_exactness_strict(self, run):
        result = run("exactness", "-N", "1", "--divfree", "--strict")
        assert result.exit_code == 2
        assert "witness: 1 * b" in result.output

    def test_vp_check(self, run, tmp_path):
        feasible = tmp_path / "ok.json"
        feasible.write_text(json.dumps({"b": 1}))
        assert run("vp-check", str(feasible)).exit_code == 0
        blocked = tmp_path / "bamboo.json"
        blocked.write_text(json.dumps({"b": 1, "b[b]": "1/2"}))
        result = run("vp-check", str(blocked))
        assert result.exit_code == 2
        assert "obstruction at order 2" in result.output

    def test_vp_check_bad_file(self, run, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        assert run("vp-check", str(path)).exit_code == 1

    def test_eval(self, run, tmp_path):
        field = tmp_path / "field.json"
        field.write_text(json.dumps({"d": 2, "components": ["x1*x2", "x2"]}))
        result = run("eval", "b", "--field", str(field))
        assert result.output.strip().split("\n") == ["[1] x1*x2", "[2] x2"]
        assert run("eval", "b[b]", "--check-dh").exit_code == 0

    def test_check_paper(self, run, state_dir, monkeypatch):
        monkeypatch.setattr(cli_module, "acceptance_checks", lambda quick, threads, seed: [("ok", lambda: None)])
        result = run("check-paper", "--quick")
        assert result.exit_code == 0
        assert "[+] ok ... ok" in result.output
        assert (state_dir / "check.log").exists()

    def test_check_paper_failure(self, run, monkeypatch):
        def broken():
            raise AssertionError("mismatch")

        monkeypatch.setattr(cli_module, "acceptance_checks", lambda quick, threads, seed: [("broken", broken)])
        assert run("check-paper").exit_code == 2

    def test_check_paper_domain_error(self, run, monkeypatch):
        def unavailable(quick, threads, seed):
            raise PreconditionError("order 20 exceeds max_order 14")

        monkeypatch.setattr(cli_module, "acceptance_checks", unavailable)
        result = run("check-paper", "--quick")
        assert result.exit_code == 1
        assert "❌ order 20 exceeds max_order 14" in result.output

    def test_check_paper_bad_log_file(self, run, tmp_path, monkeypatch):
        monkeypatch.setattr(cli_module, "acceptance_checks", lambda quick, threads, seed: [("ok", lambda: None)])
        result = run("check-paper", "--log-file", str(tmp_path / "missing" / "check.log"))
        assert result.exit_code == 1
        assert "❌" in result.output


class TestCache:
    def test_show_and_clear(self, run):
        run("dims", "-N", "2")
        payload = json.loads(run("cache", "show", "--json").output)
        assert payload["entries"] == 2
        result = run("cache", "clear")
        assert "Removed 2" in result.output
        assert json.loads(run("cache", "show", "--json").output)["entries"] == 0

    def test_bad_config(self, tmp_path, monkeypatch):
        monkeypatch.delenv("AROMAKIT_THREADS", raising=False)
        config = tmp_path / "bad.yml"
        config.write_text("threads: 0\n")
        result = CliRunner().invoke(cli, ["--config", str(config), "dims", "-N", "1"])
        assert result.exit_code == 1
