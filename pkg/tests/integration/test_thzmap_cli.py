from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

SCENE = {
    "walls": [
        {
            "id": "front",
            "a": [-1.0, 1.2],
            "b": [1.0, 1.2],
            "material": "Cement",
            "tag": "wall",
            "backscatter_db": -40.0,
        },
    ],
    "trx": {"position": [0.0, 0.0], "scan": [60.0, 2.0, 120.0]},
    "frequency": {"start_hz": 290e9, "stop_hz": 310e9, "n_points": 401},
}

CONFIG = """\
scene_path: scene.json
output_dir: out
seed: 3
noise:
  snr_db: 25.0
sage:
  max_paths: 8
  max_em_iterations: 3
"""


@pytest.fixture
def workspace(tmp_path: Path) -> Path:
    (tmp_path / "scene.json").write_text(json.dumps(SCENE), encoding="utf-8")
    (tmp_path / "config.yaml").write_text(CONFIG, encoding="utf-8")
    return tmp_path


def test_pipeline_writes_every_artifact(workspace: Path) -> None:
    result = run_thzmap_cli(workspace, "pipeline", "--config", "config.yaml")

    out = workspace / "out"
    for name in ("response.bin", "padp.csv", "report.json", "ranging.json", "identification.json", "run_meta.json"):
        assert (out / name).exists(), name
    for method in ("max_search", "sage", "sage_plus_removal"):
        assert (out / f"estimates_{method}.csv").exists()
        assert (out / f"map_{method}.csv").exists()
        assert (out / f"map_{method}.svg").read_text(encoding="utf-8").lstrip().startswith("<?xml")
        assert f"{method}: MDE" in result.stdout

    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert set(report["ranging"]) == {"max_search", "sage", "sage_plus_removal"}
    assert report["provenance"]["seed"] == 3
    assert report["path_counts"]["corner_retro"] == 0
    assert report["path_counts"]["wall_scatter"] > 0
    assert report["ranging"]["sage_plus_removal"]["mde_cm"] <= report["ranging"]["sage"]["mde_cm"] + 0.5


def test_pipeline_identifies_the_tagged_wall(workspace: Path) -> None:
    run_thzmap_cli(workspace, "pipeline", "--config", "config.yaml", "--method", "sage")

    identifications = json.loads((workspace / "out" / "identification.json").read_text(encoding="utf-8"))
    assert [item["wall_id"] for item in identifications] == ["front"]
    wall = identifications[0]
    assert wall["query_rl_db"] == pytest.approx(11.84, abs=1.0)
    assert {entry["name"] for entry in wall["ranked"][:2]} <= {"Cement", "Ceramic", "Fiber cement"}


def test_pipeline_is_deterministic_for_a_seed(workspace: Path) -> None:
    run_thzmap_cli(workspace, "pipeline", "--config", "config.yaml", "--method", "max_search", "--output", "a")
    run_thzmap_cli(workspace, "pipeline", "--config", "config.yaml", "--method", "max_search", "--output", "b")

    first = (workspace / "a" / "report.json").read_text(encoding="utf-8")
    second = (workspace / "b" / "report.json").read_text(encoding="utf-8")
    assert first == second
    assert (workspace / "a" / "response.bin").read_bytes() == (workspace / "b" / "response.bin").read_bytes()


def test_stepwise_commands_chain_through_files(workspace: Path) -> None:
    simulated = run_thzmap_cli(workspace, "simulate", "--config", "config.yaml")
    assert "401 x 31" in simulated.stdout

    run_thzmap_cli(
        workspace, "estimate", "--config", "config.yaml", "--method", "max_search", "--response", "out/response.bin"
    )
    estimates = workspace / "out" / "estimates_max_search.csv"
    assert estimates.exists()

    mapped = run_thzmap_cli(
        workspace, "map", "--config", "config.yaml", "--method", "max_search", "--estimates", str(estimates)
    )
    assert "max_search: MDE" in mapped.stdout
    ranging = json.loads((workspace / "out" / "ranging.json").read_text(encoding="utf-8"))
    assert ranging["max_search"]["n_points"] > 0


def test_db_query_ranks_the_bundled_values(tmp_path: Path) -> None:
    result = run_thzmap_cli(tmp_path, "db", "query", "--rl", "10.38")

    payload = json.loads(result.stdout)
    assert payload["ranked"][0] == {"name": "Cement", "delta_db": pytest.approx(1.46)}
    assert payload["confidence_margin_db"] == pytest.approx(0.26)


def test_db_import_merges_into_a_new_database(tmp_path: Path) -> None:
    source = tmp_path / "extra.csv"
    source.write_text("name,category,frequency_hz,rl_db\nGlass,building,3e11,5.5\n", encoding="utf-8")

    result = run_thzmap_cli(tmp_path, "db", "import", str(source), "--db", "materials.csv")
    assert "imported 1 materials" in result.stdout

    listed = run_thzmap_cli(tmp_path, "db", "list", "--db", "materials.csv")
    assert listed.stdout.strip() == "Glass [building] 300 GHz: 5.5 dB"


def test_malformed_database_exits_with_input_error(tmp_path: Path) -> None:
    broken = tmp_path / "broken.csv"
    broken.write_text("name,category,frequency_hz,rl_db\nGlass,building,3e11,-1\n", encoding="utf-8")

    result = run_thzmap_cli(tmp_path, "db", "list", "--db", str(broken), check=False)

    assert result.returncode == 2
    assert "line 2: reflection loss must be >= 0 dB" in result.stderr


def test_missing_config_exits_with_input_error(tmp_path: Path) -> None:
    result = run_thzmap_cli(tmp_path, "pipeline", "--config", "nope.yaml", check=False)

    assert result.returncode == 2
    assert "config file not found" in result.stderr


def test_negative_seed_exits_with_input_error(workspace: Path) -> None:
    result = run_thzmap_cli(workspace, "simulate", "--config", "config.yaml", "--seed", "-1", check=False)

    assert result.returncode == 2
    assert "--seed must be >= 0" in result.stderr


def test_unknown_material_exits_with_input_error(workspace: Path) -> None:
    scene = json.loads((workspace / "scene.json").read_text(encoding="utf-8"))
    scene["walls"][0]["material"] = "Unobtainium"
    (workspace / "scene.json").write_text(json.dumps(scene), encoding="utf-8")

    result = run_thzmap_cli(workspace, "simulate", "--config", "config.yaml", check=False)

    assert result.returncode == 2
    assert "Unobtainium" in result.stderr


def test_empty_map_exits_with_numerical_error(workspace: Path) -> None:
    run_thzmap_cli(workspace, "simulate", "--config", "config.yaml")
    run_thzmap_cli(
        workspace, "estimate", "--config", "config.yaml", "--method", "max_search", "--response", "out/response.bin"
    )

    result = run_thzmap_cli(
        workspace,
        "map",
        "--config",
        "config.yaml",
        "--method",
        "max_search",
        "--estimates",
        "out/estimates_max_search.csv",
        "--cutoff-db",
        "100",
        check=False,
    )

    assert result.returncode == 3
    assert "no paths above" in result.stderr


def run_thzmap_cli(tmp_path: Path, *args: str, check: bool = True) -> subprocess.CompletedProcess[str]:
    script_path = Path(__file__).resolve().parents[2] / "scripts" / "thzmap.py"
    return subprocess.run(
        [sys.executable, str(script_path), *args],
        cwd=tmp_path,
        check=check,
        capture_output=True,
        text=True,
    )
