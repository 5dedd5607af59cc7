import json

import pytest

from auric.cli import main
from auric.scenarios import generate, scenario_to_text

PORTRAITS = {
    "owner_id": "alice",
    "portraits": [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]],
    "created_ts": 0,
}


@pytest.fixture
def store_dir(tmp_path):
    return str(tmp_path / "store")


def run(store_dir, *argv):
    return main(["--store", store_dir, *argv])


def portraits_file(tmp_path):
    path = tmp_path / "portraits.json"
    path.write_text(json.dumps(PORTRAITS), "utf-8")
    return str(path)


class TestEnrollAndIngest:
    def test_enroll(self, tmp_path, store_dir, capsys):
        assert run(store_dir, "enroll", portraits_file(tmp_path)) == 0
        assert "enrolled alice dimension=2" in capsys.readouterr().out

    def test_enroll_bad_count(self, tmp_path, store_dir, capsys):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"owner_id": "a", "portraits": [[1.0, 0.0]]}), "utf-8")
        assert run(store_dir, "enroll", str(path)) == 1
        assert "error:" in capsys.readouterr().err

    def test_ingest_flow(self, tmp_path, store_dir, capsys):
        run(store_dir, "enroll", portraits_file(tmp_path))
        capsys.readouterr()
        stream = tmp_path / "events.jsonl"
        stream.write_text(
            '{"ts":0,"kind":"UNLOCK"}\n'
            '{"ts":10,"kind":"WINDOW_STATE","app":"messages","window":"w"}\n'
            '{"ts":20,"kind":"CAPTURE","face":[0.6,0.8]}\n'
            '{"ts":30,"kind":"SCREEN_OFF"}\n', "utf-8")
        assert run(store_dir, "ingest", str(stream)) == 0
        out = capsys.readouterr().out
        assert "segments=1 captures=1" in out
        assert "ingested 1 session(s)" in out

    def test_ingest_reports_bad_lines(self, tmp_path, store_dir, capsys):
        run(store_dir, "enroll", portraits_file(tmp_path))
        capsys.readouterr()
        stream = tmp_path / "events.jsonl"
        stream.write_text('{"ts":0,"kind":"UNLOCK"}\nnot json\n', "utf-8")
        assert run(store_dir, "ingest", str(stream)) == 1
        assert "line 2:" in capsys.readouterr().err

    def test_ingest_requires_profile(self, tmp_path, store_dir, capsys):
        stream = tmp_path / "events.jsonl"
        stream.write_text('{"ts":0,"kind":"UNLOCK"}\n', "utf-8")
        assert run(store_dir, "ingest", str(stream)) == 1
        assert "enroll" in capsys.readouterr().err


class TestReplayAndQueries:
    def test_replay_then_query_flow(self, store_dir, capsys):
        assert run(store_dir, "replay", "--scenario", "unattended", "--seed", "1") == 0
        out = capsys.readouterr().out
        assert "replay unattended seed=1: PASS" in out
        session_id = next(line.split()[1] for line in out.splitlines()
                          if line.startswith("appended "))
        date = session_id[:10]

        assert run(store_dir, "days", "--threshold", "0.6") == 0
        days_out = capsys.readouterr().out
        assert f"{date} sessions=1 flagged=true" in days_out

        assert run(store_dir, "sessions", date, "--threshold", "0.6") == 0
        sessions_out = capsys.readouterr().out
        assert session_id in sessions_out
        assert "flagged=true" in sessions_out

        assert run(store_dir, "show", session_id) == 0
        show_out = capsys.readouterr().out
        assert "apps: messages,email,browser" in show_out
        assert "Opened messages" in show_out

    def test_replay_from_file(self, tmp_path, store_dir, capsys):
        scenario_path = tmp_path / "s.scenario"
        scenario_path.write_text(scenario_to_text(generate("social-share", 2)), "utf-8")
        assert run(store_dir, "replay", "--file", str(scenario_path)) == 0
        assert "PASS" in capsys.readouterr().out

    def test_days_empty_store(self, store_dir, capsys):
        assert run(store_dir, "days") == 0
        assert capsys.readouterr().out == ""

    def test_du(self, store_dir, capsys):
        run(store_dir, "replay", "--scenario", "unattended", "--seed", "1")
        capsys.readouterr()
        assert run(store_dir, "du", "--estimate", "8") == 0
        out = capsys.readouterr().out
        assert out.startswith("total=")
        assert "estimate(8)=" in out

    def test_usage_error_exit_code(self, store_dir):
        with pytest.raises(SystemExit) as excinfo:
            main(["--store", store_dir, "days", "--bogus"])
        assert excinfo.value.code == 2


class TestStoreResolution:
    def test_env_var_default(self, tmp_path, monkeypatch, capsys):
        env_store = tmp_path / "env-store"
        monkeypatch.setenv("AURIC_STORE", str(env_store))
        assert main(["replay", "--scenario", "unattended", "--seed", "1"]) == 0
        capsys.readouterr()
        assert env_store.is_dir()
        assert main(["days", "--threshold", "0.6"]) == 0
        assert "flagged=true" in capsys.readouterr().out

    def test_flag_overrides_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("AURIC_STORE", str(tmp_path / "env-store"))
        flag_store = tmp_path / "flag-store"
        assert main(["--store", str(flag_store), "replay",
                     "--scenario", "unattended", "--seed", "1"]) == 0
        capsys.readouterr()
        assert flag_store.is_dir()
        assert not (tmp_path / "env-store").exists()


class TestConfigAndBanner:
    def test_config_get_set(self, store_dir, capsys):
        assert run(store_dir, "config", "get", "threshold") == 0
        assert capsys.readouterr().out.strip() == "0.6"
        assert run(store_dir, "config", "set", "threshold", "0.3") == 0
        assert capsys.readouterr().out.strip() == "threshold=0.3"
        assert run(store_dir, "config", "get", "threshold") == 0
        assert capsys.readouterr().out.strip() == "0.3"

    def test_config_set_out_of_range(self, store_dir, capsys):
        assert run(store_dir, "config", "set", "threshold", "1.5") == 1
        assert "threshold must be in [0,1]" in capsys.readouterr().err

    def test_config_unknown_key(self, store_dir, capsys):
        assert run(store_dir, "config", "get", "volume") == 1
        assert "unknown config key" in capsys.readouterr().err

    def test_banner_follows_notifications_setting(self, store_dir, capsys):
        assert run(store_dir, "banner", "status") == 0
        assert capsys.readouterr().out.strip() == "visible"
        run(store_dir, "config", "set", "notifications_visible", "false")
        capsys.readouterr()
        assert run(store_dir, "banner", "status") == 0
        assert capsys.readouterr().out.strip() == "hidden"

    def test_aggregation_set(self, store_dir, capsys):
        assert run(store_dir, "config", "set", "aggregation", "majority") == 0
        assert capsys.readouterr().out.strip() == "aggregation=MAJORITY"
