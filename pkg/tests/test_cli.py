import csv
import json
import subprocess
import sys

import pytest

from citeproj.cli import main
from citeproj.pipeline import RunConfig, StageError, run_pipeline


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    rc = main(["synth", "--mix", "12", "30", "6", "--years", "1990-1993", "--areas", "CS,NS", "--seed", "3",
               "--out", str(out)])
    assert rc == 0
    return out


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_synth_files(corpus):
    labels = _rows(corpus / "labels.csv")
    assert labels[0] == ["paper_id", "class"]
    assert len(labels) == 49
    assert _rows(corpus / "meta.csv")[0] == ["paper_id", "year", "area"]


def test_stagewise_commands(corpus, tmp_path, capsys):
    common = ["--edges", str(corpus / "edges.tsv"), "--meta", str(corpus / "meta.csv"), "--out", str(tmp_path)]
    assert main(["ingest"] + common) == 0
    assert "48 eligible" in capsys.readouterr().out
    assert json.loads((tmp_path / "ingest.json").read_text())["cycle_edge_count"] == 0
    assert main(["metrics"] + common) == 0
    assert main(["impact"] + common) == 0
    assert main(["report", "--out", str(tmp_path)]) == 0
    table = _rows(tmp_path / "table1.csv")
    assert len(table) == 1 + 12
    assert main(["temporal", "--cutoff-year", "1991", "--out", str(tmp_path)]) == 0
    assert main(["nullmodel", "--swap-factor", "5"] + common) == 0
    null = json.loads((tmp_path / "nullmodel.json").read_text())
    assert len(null["metrics"]) == 5


def test_project_command(corpus, tmp_path):
    paper = _rows(corpus / "labels.csv")[1][0]
    dest = tmp_path / "proj.tsv"
    rc = main(["project", "--edges", str(corpus / "edges.tsv"), "--meta", str(corpus / "meta.csv"), "--paper", paper,
               "--output", str(dest)])
    assert rc == 0
    text = dest.read_text()
    assert text.startswith("# gp\n") and "# gp0\n" in text


def test_project_unknown_paper(corpus, capsys):
    rc = main(["project", "--edges", str(corpus / "edges.tsv"), "--meta", str(corpus / "meta.csv"), "--paper", "nope"])
    assert rc == 1
    assert "nope" in capsys.readouterr().err


def test_missing_meta_names_path(corpus, tmp_path, capsys):
    missing = tmp_path / "absent.csv"
    rc = main(["run", "--edges", str(corpus / "edges.tsv"), "--meta", str(missing), "--out", str(tmp_path)])
    assert rc == 1
    assert str(missing) in capsys.readouterr().err


def test_config_file_and_flag_precedence(corpus, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"edges": str(corpus / "edges.tsv"), "meta": str(corpus / "meta.csv"),
                               "min_refs": 100, "out": str(tmp_path)}))
    assert main(["--config", str(cfg), "ingest"]) == 0
    assert json.loads((tmp_path / "ingest.json").read_text())["eligible_focal_papers"] == 0
    assert main(["--config", str(cfg), "ingest", "--min-refs", "10"]) == 0
    assert json.loads((tmp_path / "ingest.json").read_text())["eligible_focal_papers"] == 48


def test_bad_fractions(corpus, tmp_path, capsys):
    rc = main(["impact", "--edges", str(corpus / "edges.tsv"), "--meta", str(corpus / "meta.csv"),
               "--high-frac", "0.8", "--low-frac", "0.5", "--out", str(tmp_path)])
    assert rc == 1
    assert "[" in capsys.readouterr().err


def test_run_pipeline_artifacts(corpus, tmp_path):
    cfg = RunConfig(str(corpus / "edges.tsv"), str(corpus / "meta.csv"), str(tmp_path), swap_factor=5,
                    cutoff_year=1991)
    paths = run_pipeline(cfg)
    for name in ("ingest.json", "metrics.csv", "impact.csv", "table1.csv", "report.json", "fig4_curves.csv",
                 "nullmodel.json", "temporal.json", "fig3_clustering.csv", "fig5_density.csv",
                 "fig2_focal_constraint.csv"):
        assert name in paths
    with pytest.raises(StageError, match="temporal"):
        run_pipeline(RunConfig(str(corpus / "edges.tsv"), str(corpus / "meta.csv"), str(tmp_path / "x"),
                               nullmodel=False, cutoff_year=1800))


def test_entry_point_module(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "citeproj.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "synth" in proc.stdout
