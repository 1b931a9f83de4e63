import json
import os
import shutil
import signal
import subprocess
import sys
import time
from pathlib import Path

import pytest

from corvid.cli import main

CORVID = [sys.executable, "-m", "corvid.cli"]


def run_main(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestLint:
    def test_ok_bundle(self, myskill_dir, capsys):
        code, out, _ = run_main(["skill", "lint", str(myskill_dir)], capsys)
        assert code == 0
        assert out.strip().endswith("OK")

    def test_broken_bundle_prints_positioned_error(self, tmp_path, myskill_dir, capsys):
        broken = tmp_path / "myskill"
        shutil.copytree(myskill_dir, broken)
        (broken / "dialog" / "nlu.md").write_text("## intent:x\n- bad [slot](a?b?c)\n")
        code, _, err = run_main(["skill", "lint", str(broken)], capsys)
        assert code == 1
        assert "nlu.md:2" in err


class TestTrainAndNlu:
    @pytest.fixture
    def assistant_dir(self, tmp_path, myskill_dir, light_skill_dir):
        skills = tmp_path / "skills"
        skills.mkdir()
        shutil.copytree(myskill_dir, skills / "myskill")
        shutil.copytree(light_skill_dir, skills / "light_control")
        return tmp_path

    def test_train_writes_artifacts(self, assistant_dir, capsys):
        code, out, _ = run_main(["train", str(assistant_dir)], capsys)
        assert code == 0
        for name in ("nlu_examples.jsonl", "lm.bin", "nlu.bin"):
            assert (assistant_dir / name).is_file(), name
        assert "2 skills" in out

    def test_nlu_parse_prints_result(self, assistant_dir, capsys):
        run_main(["train", str(assistant_dir)], capsys)
        code, out, _ = run_main(
            ["nlu", "parse", "--model", str(assistant_dir / "nlu.bin"),
             "book us a flight from new york to berlin"], capsys)
        assert code == 0
        assert "myskill-book_flight" in out
        assert "New York" in out
        assert "role=start" in out

    def test_nlu_eval_prints_metrics(self, assistant_dir, tmp_path, capsys):
        run_main(["train", str(assistant_dir)], capsys)
        testset = tmp_path / "testset.jsonl"
        rows = [
            {"text": "book me a flight from augsburg to berlin",
             "intent_id": "myskill-book_flight",
             "slots": [["city", "start", "Augsburg"], ["city", "destination", "Berlin"]]},
            {"text": "turn on the light in the lab",
             "intent_id": "light_control-turn_on_light",
             "slots": [["room", None, "lab"]]},
        ]
        testset.write_text("\n".join(json.dumps(r) for r in rows))
        code, out, _ = run_main(
            ["nlu", "eval", "--model", str(assistant_dir / "nlu.bin"),
             "--testset", str(testset)], capsys)
        assert code == 0
        assert "intent_accuracy: 1.0000" in out
        assert "full_accuracy:   1.0000" in out


class TestStoreCli:
    def test_add_then_serve_flow(self, tmp_path, myskill_dir, capsys):
        code, out, _ = run_main(
            ["store", "add", str(myskill_dir), "--catalog", str(tmp_path / "cat")], capsys)
        assert code == 0
        assert "indexed myskill" in out
        assert (tmp_path / "cat" / "myskill.json").is_file()
        assert (tmp_path / "cat" / "myskill.tar.gz").is_file()

    def test_add_rejects_broken_bundle(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        code, _, err = run_main(
            ["store", "add", str(tmp_path / "empty"), "--catalog", str(tmp_path / "cat")],
            capsys)
        assert code == 1
        assert "store add failed" in err


class TestSkillToggle:
    def test_start_stop_status(self, tmp_path, myskill_dir, capsys):
        skills = tmp_path / "skills"
        skills.mkdir()
        shutil.copytree(myskill_dir, skills / "myskill")
        code, out, _ = run_main(
            ["skill", "stop", "myskill", "--assistant-dir", str(tmp_path)], capsys)
        assert code == 0 and (skills / "myskill" / ".disabled").exists()
        code, out, _ = run_main(
            ["skill", "status", "--assistant-dir", str(tmp_path)], capsys)
        assert "disabled" in out
        run_main(["skill", "start", "myskill", "--assistant-dir", str(tmp_path)], capsys)
        assert not (skills / "myskill" / ".disabled").exists()


class TestInstallCli:
    def test_install_from_local_dir(self, tmp_path, myskill_dir, capsys):
        code, out, _ = run_main(
            ["skill", "install", str(myskill_dir), "--assistant-dir", str(tmp_path)],
            capsys)
        assert code == 0
        assert (tmp_path / "skills" / "myskill" / "config.yaml").is_file()


def _read_line_with_prefix(proc, prefix: str, timeout: float = 30.0) -> str:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        line = proc.stdout.readline()
        if not line:
            time.sleep(0.05)
            continue
        if prefix in line:
            return line.strip()
    raise AssertionError("never saw %r in process output" % prefix)


@pytest.mark.slow
class TestProcessEndToEnd:
    def test_master_and_satellite_processes(self, tmp_path, light_skill_dir):
        skills = tmp_path / "skills"
        skills.mkdir()
        shutil.copytree(light_skill_dir, skills / "light_control")
        assert subprocess.run(CORVID + ["train", str(tmp_path)],
                              capture_output=True).returncode == 0

        (tmp_path / "assistant.yaml").write_text(
            "listen: 127.0.0.1:0\n"
            "satellites:\n  Alpha: alpha-secret\n"
            "skills_dir: skills\n"
            "nlu_model: nlu.bin\n"
            "lm_model: lm.bin\n")
        master = subprocess.Popen(
            CORVID + ["dialog", "--config", str(tmp_path / "assistant.yaml")],
            stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True,
            cwd=str(tmp_path))
        try:
            ready = _read_line_with_prefix(master, "assistant ready on ")
            bus_addr = ready.rsplit(" ", 1)[-1]
            time.sleep(1.5)  # let the skill process subscribe

            script = tmp_path / "alpha.script"
            script.write_text("+0 computer turn on the light in the lab\n")
            satellite = subprocess.run(
                CORVID + ["satellite", "--id", "Alpha", "--bus", bus_addr,
                          "--token", "alpha-secret", "--script", str(script)],
                capture_output=True, text=True, timeout=60)
            assert satellite.returncode == 0, satellite.stderr
            assert "Alpha> turning the light in the lab on" in satellite.stdout
        finally:
            master.send_signal(signal.SIGTERM)
            try:
                master.wait(timeout=10)
            except subprocess.TimeoutExpired:
                master.kill()

    def test_bus_command_starts_and_stops(self):
        proc = subprocess.Popen(CORVID + ["bus", "--listen", "127.0.0.1:0"],
                                stdout=subprocess.PIPE, stderr=subprocess.DEVNULL,
                                text=True)
        try:
            line = _read_line_with_prefix(proc, "bus listening on ")
            assert "127.0.0.1:" in line
        finally:
            proc.send_signal(signal.SIGTERM)
            try:
                assert proc.wait(timeout=10) == 0
            except subprocess.TimeoutExpired:
                proc.kill()
                raise

    def test_store_serve_command(self, tmp_path, myskill_dir):
        subprocess.run(CORVID + ["store", "add", str(myskill_dir),
                                 "--catalog", str(tmp_path / "cat")],
                       capture_output=True, check=True)
        proc = subprocess.Popen(
            CORVID + ["store", "serve", "--catalog", str(tmp_path / "cat"),
                      "--listen", "127.0.0.1:0"],
            stdout=subprocess.PIPE, stderr=subprocess.DEVNULL, text=True)
        try:
            line = _read_line_with_prefix(proc, "store listening on ")
            base = line.rsplit(" ", 1)[-1]
            import urllib.request
            with urllib.request.urlopen(base + "/skills", timeout=10) as resp:
                doc = json.loads(resp.read())
            assert [s["name"] for s in doc["skills"]] == ["myskill"]
        finally:
            proc.send_signal(signal.SIGTERM)
            try:
                proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                proc.kill()
