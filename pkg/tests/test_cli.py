import json

import numpy as np
import pandas as pd
import pytest

from dendrodist.cli import main
from dendrodist.config import RunConfig, load_config, parse_config_text
from dendrodist.editdist import beta_measure
from dendrodist.generators import random_dendrogram
from dendrodist.pipeline import DistanceMatrix, distance_matrix
from dendrodist.trees import parse, serialize

VIEWS = {"first-order": 9, "shape": 5, "GLCM": 8, "GLRLM": 7, "GLZLM": 6, "NGLDM": 5}


def write_features(path, n_rows=42, seed=0):
    rng = np.random.default_rng(seed)
    cols = [f"{v}_{i}" for v, n in VIEWS.items() for i in range(n)]
    df = pd.DataFrame(rng.normal(size=(n_rows, len(cols))), columns=cols)
    df.insert(0, "cloud_id", [f"p{i % 6}" for i in range(n_rows)])
    df.insert(0, "id", [f"l{i}" for i in range(n_rows)])
    df.to_csv(path, index=False)
    return path


def write_clouds(path, sizes, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for c, n in enumerate(sizes):
        for i in range(n):
            x, y = rng.normal(size=2)
            rows.append({"id": f"c{c}_{i}", "cloud_id": f"c{c}", "x": x, "y": y})
    pd.DataFrame(rows).to_csv(path, index=False)
    return path


def write_trees(directory, trees):
    directory.mkdir(parents=True, exist_ok=True)
    for i, t in enumerate(trees):
        (directory / f"t{i:02d}.json").write_text(serialize(t))
    return directory


def tree_files(seed=0, n=8):
    rng = np.random.default_rng(seed)
    return [random_dendrogram(rng, int(rng.integers(2, 8))) for _ in range(n)]


def snapshot(directory):
    return {p.relative_to(directory).as_posix(): p.read_bytes() for p in sorted(directory.rglob("*")) if p.is_file()}


def run(*args):
    return main([str(a) for a in args])


# ---------------------------------------------------------------- reduce


def test_reduce_twelve_columns(tmp_path):
    src = write_features(tmp_path / "f.csv")
    assert run("reduce", "--features", src, "--out", tmp_path / "o") == 0
    df = pd.read_csv(tmp_path / "o" / "reduced.csv")
    assert [c for c in df.columns if "_PC" in c] == [f"{v}_PC{k}" for v in VIEWS for k in (1, 2)]
    assert len(pd.read_csv(tmp_path / "o" / "variance.csv")) == 12


def test_reduce_with_view_file(tmp_path):
    src = write_features(tmp_path / "f.csv")
    cols = [c for c in pd.read_csv(src).columns if c not in ("id", "cloud_id")]
    pd.DataFrame({"feature_name": cols, "view_name": ["a" if i < 20 else "b" for i in range(40)]}).to_csv(
        tmp_path / "v.csv", index=False
    )
    assert run("reduce", "--features", src, "--views", tmp_path / "v.csv", "--components", 3, "--out", tmp_path / "o") == 0
    assert pd.read_csv(tmp_path / "o" / "reduced.csv").shape[1] == 2 + 6


@pytest.mark.parametrize("content", ["", "id,cloud_id,shape_a\n"])
def test_reduce_empty_input(tmp_path, capsys, content):
    (tmp_path / "f.csv").write_text(content)
    assert run("reduce", "--features", tmp_path / "f.csv", "--out", tmp_path / "o") == 2
    assert "no lesions" in capsys.readouterr().err


def test_reduce_schema_error_names_columns(tmp_path, capsys):
    pd.DataFrame({"cloud_id": ["a"], "volume": [1.0]}).to_csv(tmp_path / "f.csv", index=False)
    assert run("reduce", "--features", tmp_path / "f.csv", "--out", tmp_path / "o") == 2
    assert "volume" in capsys.readouterr().err


def test_missing_required_option(tmp_path, capsys):
    assert run("reduce", "--out", tmp_path) == 2
    assert "--features" in capsys.readouterr().err


# ---------------------------------------------------------------- trees


def test_trees_one_per_cloud(tmp_path, capsys):
    src = write_clouds(tmp_path / "c.csv", [7, 1, 3])
    assert run("trees", "--input", src, "--out", tmp_path / "o") == 0
    trees = {p.stem: parse(p.read_text()) for p in (tmp_path / "o" / "trees").iterdir()}
    assert trees["c0"].n_leaves == 7
    assert trees["c1"].n_vertices == 1
    assert trees["c2"].n_leaves == 3
    assert "single point" in capsys.readouterr().err


def test_trees_accept_reduced_table(tmp_path):
    src = write_features(tmp_path / "f.csv")
    run("reduce", "--features", src, "--out", tmp_path / "r")
    assert run("trees", "--input", tmp_path / "r" / "reduced.csv", "--out", tmp_path / "t") == 0
    assert len(list((tmp_path / "t" / "trees").iterdir())) == 6


# ---------------------------------------------------------------- distances


def test_distances_two_clouds(tmp_path):
    d = write_trees(tmp_path / "t", tree_files(n=2))
    assert run("distances", "--trees", d, "--out", tmp_path / "o") == 0
    m = pd.read_csv(tmp_path / "o" / "matrix.csv", index_col=0).to_numpy()
    assert m.shape == (2, 2) and m[0, 0] == m[1, 1] == 0.0


def test_point_mass_at_zero_matches_edit(tmp_path):
    d = write_trees(tmp_path / "t", tree_files(1))
    run("distances", "--trees", d, "--metric", "edit", "--out", tmp_path / "e")
    run("distances", "--trees", d, "--metric", "pruned", "--mu-family", "point-mass-list", "--out", tmp_path / "p")
    assert (tmp_path / "e" / "matrix.csv").read_text() == (tmp_path / "p" / "matrix.csv").read_text()


def test_distances_match_api(tmp_path):
    trees = tree_files(2)
    d = write_trees(tmp_path / "t", trees)
    run("distances", "--trees", d, "--out", tmp_path / "o")
    got = DistanceMatrix.read_csv(tmp_path / "o" / "matrix.csv").values
    want = distance_matrix(trees, "pruned", beta_measure(2, 8)).values
    assert np.array_equal(got, want)


def test_distances_budget_exit_code(tmp_path, capsys):
    rng = np.random.default_rng(0)
    d = write_trees(tmp_path / "t", [random_dendrogram(rng, 3), random_dendrogram(rng, 9)])
    assert run("distances", "--trees", d, "--budget-leaves", 5, "--out", tmp_path / "o") == 3
    assert "(t00, t01)" in capsys.readouterr().err


def test_distances_manifest_records_measure(tmp_path):
    d = write_trees(tmp_path / "t", tree_files(n=3))
    run("distances", "--trees", d, "--mu-alpha", 2.5, "--mu-beta", 15, "--out", tmp_path / "o")
    man = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert man["config"]["mu_alpha"] == 2.5 and man["config"]["rescale"] == "population"
    assert man["outputs"]["matrix.csv"]
    assert len(man["inputs"]) == 3


# ---------------------------------------------------------------- stratify


def write_matrix(path, v):
    ids = [f"i{k}" for k in range(len(v))]
    pd.DataFrame(v, index=ids, columns=ids).rename_axis("id").to_csv(path)
    return path


def two_blocks(n=4):
    lab = np.repeat([0, 1], n)
    v = np.where(lab[:, None] == lab[None], 0.0, 3.0)
    np.fill_diagonal(v, 0.0)
    return v


def test_stratify_two_blocks(tmp_path):
    src = write_matrix(tmp_path / "m.csv", two_blocks())
    ref = tmp_path / "ref.csv"
    pd.DataFrame({"id": [f"i{k}" for k in range(8)], "label": [0] * 4 + [1] * 3 + [0]}).to_csv(ref, index=False)
    args = ["stratify", "--matrix", src, "--reference", ref, "--dbscan-eps", 1.0, "--dbscan-min-pts", 2]
    assert run(*args, "--out", tmp_path / "o") == 0
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["k"] == 2 and report["silhouette"] == 1.0
    assert 0.0 <= report["rand_index_vs_reference"] <= 1.0
    assert report["dbscan"] == {"n_clusters": 2, "n_noise": 0, "rand_index_vs_selection": 1.0}


def test_stratify_needs_six_items(tmp_path, capsys):
    src = write_matrix(tmp_path / "m.csv", two_blocks(2))
    assert run("stratify", "--matrix", src, "--out", tmp_path / "o") == 2
    assert "at least 6" in capsys.readouterr().err


def test_stratify_with_curves(tmp_path):
    trees = tree_files(3, n=8)
    d = write_trees(tmp_path / "t", trees)
    run("distances", "--trees", d, "--out", tmp_path / "m")
    assert run("stratify", "--matrix", tmp_path / "m" / "matrix.csv", "--trees", d, "--out", tmp_path / "o") == 0
    curves = pd.read_csv(tmp_path / "o" / "curves.csv")
    assert curves.columns[0] == "h" and len(curves) == 256


# ---------------------------------------------------------------- simulate


def test_simulate_small(tmp_path):
    args = ["simulate", "--seed", 5, "--n-per-group", 6]
    assert run(*args, "--out", tmp_path / "a") == 0
    assert run(*args, "--out", tmp_path / "b") == 0
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert len([k for k, v in man.items() if isinstance(v, dict) and ("file" in v or "directory" in v)]) >= 6
    assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")


def test_simulate_requires_seed(tmp_path, capsys):
    assert run("simulate", "--n-per-group", 3, "--out", tmp_path) == 2
    assert "--seed" in capsys.readouterr().err


# ---------------------------------------------------------------- determinism


def test_commands_byte_identical_across_jobs(tmp_path):
    feats = write_features(tmp_path / "f.csv")
    for jobs in (1, 3):
        out = tmp_path / f"j{jobs}"
        assert run("reduce", "--features", feats, "--jobs", jobs, "--out", out / "r") == 0
        assert run("trees", "--input", out / "r" / "reduced.csv", "--jobs", jobs, "--out", out / "t") == 0
        assert run("distances", "--trees", out / "t" / "trees", "--jobs", jobs, "--out", out / "d") == 0
    for step in ("r", "t", "d"):
        a, b = snapshot(tmp_path / "j1" / step), snapshot(tmp_path / "j3" / step)
        # the manifest records input paths, which differ between the two runs
        a.pop("manifest.json"), b.pop("manifest.json")
        assert a == b


# ---------------------------------------------------------------- config


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# run\nmu-alpha = 3\nmu_beta = 9  # trailing\nmetric = edit\n")
    c = load_config(cfg, {"mu_beta": 11.0, "jobs": None})
    assert (c.mu_alpha, c.mu_beta, c.metric, c.jobs) == (3.0, 11.0, "edit", 1)


def test_config_file_drives_cli(tmp_path):
    d = write_trees(tmp_path / "t", tree_files(n=3))
    (tmp_path / "run.cfg").write_text(f"trees = {d}\nmetric = edit\nout = {tmp_path / 'o'}\n")
    assert run("distances", "--config", tmp_path / "run.cfg") == 0
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["config"]["metric"] == "edit"


def test_config_errors():
    with pytest.raises(ValueError, match="x.cfg:2: unknown key"):
        parse_config_text("seed = 1\ncolour = red\n", "x.cfg")
    with pytest.raises(ValueError, match="bad value"):
        parse_config_text("seed = one\n")
    with pytest.raises(ValueError, match="expected"):
        parse_config_text("seed\n")


def test_config_round_trip():
    c = RunConfig(seed=4, metric="edit", mu_alpha=2.5, dbscan_eps=0.3)
    assert RunConfig(**parse_config_text(c.to_text())) == c
