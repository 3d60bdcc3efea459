"""HTTP API equivalence with in-process calls, plus the CLI commands."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from agentacl import forest_to_json
from agentacl.casestudies import write_demo_config
from agentacl.cli import main as cli_main
from agentacl.service import Runtime, create_app, load_service_config


@pytest.fixture()
def runtime(tmp_path):
    config_path = write_demo_config(tmp_path)
    rt = Runtime(load_service_config(config_path))
    yield rt
    rt.close()


@pytest.fixture()
def client(runtime):
    return TestClient(create_app(runtime))


class TestEndpoints:
    def test_trees_echo_loaded_definitions(self, client, runtime):
        body = client.get("/api/trees").json()
        assert set(body) == {"tictactoe", "calendar", "expedia", "wallet"}
        assert body["calendar"] == forest_to_json(runtime.engine.forest("calendar"))

    def test_permission_crud(self, client):
        created = client.post(
            "/api/permissions",
            json={"app": "calendar", "rvs": "Year(2026)::Month(June)", "action": "read"},
        ).json()
        assert created["warnings"] == []
        perm_id = created["id"]
        listing = client.get("/api/permissions", params={"app": "calendar"}).json()
        assert [p["id"] for p in listing] == [perm_id]
        assert listing[0]["rvs"] == "Calendar:Year(2026)::Month(June)"
        removed = client.delete(f"/api/permissions/{perm_id}")
        assert removed.status_code == 200
        assert client.get("/api/permissions").json() == []
        assert client.delete(f"/api/permissions/{perm_id}").status_code == 404

    def test_redundancy_warning_over_http(self, client):
        client.post(
            "/api/permissions",
            json={"app": "calendar", "rvs": "Year(2026)", "action": "read"},
        )
        second = client.post(
            "/api/permissions",
            json={"app": "calendar", "rvs": "Year(2026)::Month(October)", "action": "read"},
        ).json()
        assert len(second["warnings"]) == 1
        assert second["warnings"][0]["rvs"] == "Calendar:Year(2026)"

    def test_validation_error_is_400(self, client):
        response = client.post(
            "/api/permissions",
            json={"app": "calendar", "rvs": "Year(2026)::Day(1)", "action": "read"},
        )
        assert response.status_code == 400
        assert "error" in response.json()

    def test_check_equals_in_process_call(self, client, runtime):
        payload = {"app": "tictactoe", "endpoint": "get_games", "args": {}}
        http_result = client.post("/api/check", json=payload).json()
        direct = runtime.gate.intercept("tictactoe", "get_games", {}).to_json()
        assert http_result == direct

    def test_check_flow(self, client):
        deny = client.post(
            "/api/check", json={"app": "tictactoe", "endpoint": "get_games", "args": {}}
        ).json()
        assert deny["outcome"] == "deny"
        assert deny["message"] == "permission denied: missing [read on Game:GameId(?)]"
        client.post(
            "/api/permissions",
            json={"app": "tictactoe", "rvs": "GameId(?)", "action": "read"},
        )
        allow = client.post(
            "/api/check", json={"app": "tictactoe", "endpoint": "get_games", "args": {}}
        ).json()
        assert allow["outcome"] == "allow" and allow["directive"] is None

    def test_evaluate_dom_equals_in_process(self, client, runtime):
        from agentacl.casestudies import GAME_PAGE_URL, game_page, game_web_config
        from agentacl.web import compute_mask

        html = (
            __import__("importlib").resources.files("agentacl.casestudies")
            / "data"
            / "game.html"
        ).read_text()
        http_plan = client.post(
            "/api/evaluate-dom", json={"url": GAME_PAGE_URL, "html": html}
        ).json()
        direct = compute_mask(
            runtime.engine,
            "tictactoe",
            game_web_config(),
            game_page(),
            runtime.store.capture_snapshot("tictactoe"),
        ).to_json()
        assert http_plan == direct
        assert len(http_plan["blocked"]) == 4
        # and matches the checked-in golden after key sorting
        golden = (Path(__file__).parent / "goldens" / "game_mask_no_grants.json").read_text()
        assert json.dumps(http_plan, sort_keys=True, indent=2) + "\n" == golden

    def test_evaluate_dom_unknown_url(self, client):
        response = client.post(
            "/api/evaluate-dom", json={"url": "http://elsewhere/", "html": "<p>x</p>"}
        )
        assert response.status_code == 404

    def test_logs_filters(self, client):
        client.post(
            "/api/permissions",
            json={"app": "calendar", "rvs": "Year(2026)", "action": "read"},
        )
        client.post(
            "/api/check", json={"app": "tictactoe", "endpoint": "get_games", "args": {}}
        )
        records = client.get("/api/logs").json()
        assert [r["kind"] for r in records] == ["perm_created", "access_denied"]
        denied = client.get("/api/logs", params={"kind": "access_denied"}).json()
        assert len(denied) == 1
        assert denied[0]["detail"]["check"]["needs"][0]["remaining"] == ["Game:GameId(?)"]
        assert client.get("/api/logs", params={"app": "wallet"}).json() == []
        after = client.get("/api/logs", params={"after_seq": 1}).json()
        assert [r["seq"] for r in after] == [2]

    def test_mode_get_put(self, client):
        assert client.get("/api/mode", params={"app": "calendar"}).json() == {
            "app": "calendar",
            "mode": "ask",
        }
        response = client.put("/api/mode", json={"app": "calendar", "mode": "infer"})
        assert response.json()["mode"] == "infer"
        assert client.get("/api/mode", params={"app": "calendar"}).json()["mode"] == "infer"
        assert client.put("/api/mode", json={"app": "calendar", "mode": "llm"}).status_code == 400
        assert client.get("/api/mode", params={"app": "ghost"}).status_code == 404

    def test_rendered_permissions(self, client):
        client.post(
            "/api/permissions",
            json={"app": "calendar", "rvs": "Year(2026)::Month(June)", "action": "read"},
        )
        [entry] = client.get("/api/permissions/rendered").json()
        assert entry["text"] == (
            "Allow read access to Calendar resources where Year is 2026 and Month is June."
        )


class TestPersistenceAcrossRestart:
    def test_state_survives(self, tmp_path):
        config_path = write_demo_config(tmp_path)
        rt = Runtime(load_service_config(config_path))
        client = TestClient(create_app(rt))
        client.post(
            "/api/permissions",
            json={"app": "tictactoe", "rvs": "GameId(?)", "action": "read"},
        )
        rt.close()
        rt2 = Runtime(load_service_config(config_path))
        client2 = TestClient(create_app(rt2))
        perms = client2.get("/api/permissions").json()
        assert len(perms) == 1 and perms[0]["rvs"] == "Game:GameId(?)"
        rt2.close()


class TestConfig:
    def test_env_overrides(self, tmp_path, monkeypatch):
        config_path = write_demo_config(tmp_path)
        monkeypatch.setenv("AGENTACL_LISTEN", "0.0.0.0:9001")
        monkeypatch.setenv("AGENTACL_DATA_DIR", str(tmp_path / "elsewhere"))
        config = load_service_config(config_path)
        assert config.listen == "0.0.0.0:9001"
        assert config.host == "0.0.0.0" and config.port == 9001
        assert config.data_dir == tmp_path / "elsewhere"


class TestCli:
    def test_validate_shipped_configs(self, tmp_path):
        write_demo_config(tmp_path)
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            [
                "validate",
                str(tmp_path / "forests" / "game.forest.json"),
                str(tmp_path / "forests" / "calendar.forest.json"),
                str(tmp_path / "web" / "game.web.json"),
                str(tmp_path / "web" / "outlook.web.json"),
            ],
        )
        assert result.exit_code == 0, result.output
        assert result.output.count("OK") == 4

    def test_validate_catches_selector_typo(self, tmp_path):
        bad = tmp_path / "bad.web.json"
        bad.write_text(json.dumps({"read": ["button:contians('Delete')"]}))
        runner = CliRunner()
        result = runner.invoke(cli_main, ["validate", str(bad)])
        assert result.exit_code == 1
        assert "contians" in result.output or "pseudo" in result.output

    def test_validate_catches_tree_errors(self, tmp_path):
        bad = tmp_path / "bad.forest.json"
        bad.write_text(
            json.dumps(
                {
                    "trees": {
                        "C": {"name": "Year", "children": [{"name": "M"}, {"name": "M"}]}
                    },
                    "actions": ["read"],
                }
            )
        )
        runner = CliRunner()
        result = runner.invoke(cli_main, ["validate", str(bad)])
        assert result.exit_code == 1

    def test_check_command(self, tmp_path):
        config_path = write_demo_config(tmp_path)
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            [
                "check",
                "--config",
                str(config_path),
                "--app",
                "tictactoe",
                "--endpoint",
                "get_games",
                "--args",
                "{}",
            ],
        )
        assert result.exit_code == 2  # denied
        decision = json.loads(result.output)
        assert decision["outcome"] == "deny"

    def test_replay_command_zero_divergences(self, tmp_path):
        config_path = write_demo_config(tmp_path)
        rt = Runtime(load_service_config(config_path))
        client = TestClient(create_app(rt))
        client.post(
            "/api/check", json={"app": "tictactoe", "endpoint": "get_games", "args": {}}
        )
        client.post(
            "/api/permissions",
            json={"app": "tictactoe", "rvs": "GameId(?)", "action": "read"},
        )
        client.post(
            "/api/check", json={"app": "tictactoe", "endpoint": "get_games", "args": {}}
        )
        rt.close()
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            ["replay", "--config", str(config_path), str(rt.audit_path)],
        )
        assert result.exit_code == 0, result.output
        assert "0 divergences" in result.output

    def test_serve_rejects_bad_config(self, tmp_path):
        bad = tmp_path / "config.json"
        bad.write_text(json.dumps({"applications": []}))
        runner = CliRunner()
        result = runner.invoke(cli_main, ["serve", "--config", str(bad)])
        assert result.exit_code != 0
