"""Command-line front end.

Subcommands run one pipeline step each and write their outputs plus a
``manifest.json`` into ``--out``. Exit codes: 0 success, 2 invalid input,
3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import warnings
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .config import RunConfig, load_config
from .editdist import measure_from_options
from .errors import BudgetExceededError, DendrodistError
from .hclust import PointCloud, build_dendrogram
from .pipeline.clustering import (
    ClusterAssignment,
    dbscan_matrix,
    format_assignment_csv,
    rand_index,
    silhouette_select,
)
from .pipeline.curves import format_curves_csv, height_curves
from .pipeline.matrix import DistanceMatrix, distance_matrix, format_matrix_csv
from .pipeline.simulation import SimulationConfig, run_simulation_study
from .reduce import FeatureTable, ViewSpec, reduce_table
from .trees import parse, serialize

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3
RESERVED_COLUMNS = ("id", "cloud_id", "group")


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _file_sha(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class _Outputs:
    """Collects written files for the manifest."""

    def __init__(self, out: Path):
        self.out = out
        out.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        self.files[name] = _sha(text)
        return path

    def manifest(self, command: str, cfg: RunConfig, keys, inputs) -> Path:
        data = {
            "command": command,
            "version": __version__,
            "config": {k: getattr(cfg, k) for k in keys},
            "inputs": {str(p): _file_sha(p) for p in inputs},
            "outputs": dict(sorted(self.files.items())),
        }
        return self.write_raw("manifest.json", json.dumps(data, indent=2, sort_keys=True) + "\n")

    def write_raw(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text)
        return path


def _read_rows(path: Path) -> pd.DataFrame:
    try:
        df = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise ValueError(f"no lesions: {path} is empty") from None
    if len(df) == 0:
        raise ValueError(f"no lesions: {path} has a header but no rows")
    return df


def _require(value, name: str):
    if value is None:
        raise ValueError(f"missing required option --{name.replace('_', '-')}")
    return value


# ---------------------------------------------------------------- commands


def cmd_reduce(cfg: RunConfig) -> Path:
    src = Path(_require(cfg.features, "features"))
    table = FeatureTable.from_frame(_read_rows(src))
    if cfg.views:
        spec = ViewSpec.read_csv(cfg.views, cfg.components)
    else:
        spec = ViewSpec.by_prefix(table.columns, k=cfg.components)
    reduced, comps = reduce_table(table, spec, ddof=cfg.ddof)
    out = _Outputs(Path(cfg.out))
    frame = reduced.to_frame()
    out.write("reduced.csv", frame.to_csv(index=False, float_format="%.17g", lineterminator="\n"))
    lines = ["view,component,explained_ratio"]
    for c in comps:
        lines += [f"{c.view},{i + 1},{float(r)!r}" for i, r in enumerate(c.explained_ratio)]
    out.write("variance.csv", "\n".join(lines) + "\n")
    inputs = [src] + ([Path(cfg.views)] if cfg.views else [])
    return out.manifest("reduce", cfg, ("features", "views", "components", "ddof"), inputs)


def read_clouds(path: Path) -> list[PointCloud]:
    df = _read_rows(path)
    if "cloud_id" not in df.columns:
        raise ValueError(f"missing column 'cloud_id' in {path}; found {list(df.columns)}")
    feats = [c for c in df.columns if c not in RESERVED_COLUMNS]
    bad = [c for c in feats if not pd.api.types.is_numeric_dtype(df[c])]
    if bad:
        raise ValueError(f"non-numeric feature columns in {path}: {bad}")
    clouds = []
    for cid, block in df.groupby(df["cloud_id"].astype(str), sort=False):
        labels = tuple(block["id"].astype(str)) if "id" in block.columns else None
        clouds.append(PointCloud(block[feats].to_numpy(dtype=float), labels, cid))
    return clouds


def _safe_name(s: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", s)


def cmd_trees(cfg: RunConfig) -> Path:
    src = Path(_require(cfg.input, "input"))
    clouds = read_clouds(src)
    out = _Outputs(Path(cfg.out))
    for c in clouds:
        if c.n == 1:
            warnings.warn(f"cloud {c.cloud_id} has a single point; its tree is a single vertex")
        out.write(f"trees/{_safe_name(c.cloud_id)}.json", serialize(build_dendrogram(c, cfg.linkage)))
    return out.manifest("trees", cfg, ("input", "linkage"), [src])


def read_trees(directory: Path):
    files = sorted(Path(directory).glob("*.json"))
    if not files:
        raise ValueError(f"no tree files in {directory}")
    return [f.stem for f in files], [parse(f.read_text()) for f in files], files


def cmd_distances(cfg: RunConfig) -> Path:
    ids, trees, files = read_trees(Path(_require(cfg.trees, "trees")))
    mu = measure_from_options(cfg.mu_family, cfg.mu_alpha, cfg.mu_beta, cfg.mu_grid) if cfg.metric == "pruned" else None
    m = distance_matrix(
        trees, cfg.metric, mu, rescale_mode=cfg.rescale, budget_leaves=cfg.budget_leaves, jobs=cfg.jobs, ids=ids
    )
    out = _Outputs(Path(cfg.out))
    out.write("matrix.csv", format_matrix_csv(m))
    keys = ("trees", "metric", "mu_family", "mu_alpha", "mu_beta", "mu_grid", "rescale", "budget_leaves")
    return out.manifest("distances", cfg, keys, files)


def _read_assignment(path: Path, ids) -> ClusterAssignment:
    df = pd.read_csv(path, dtype={"id": str})
    lookup = dict(zip(df["id"].astype(str), df["label"]))
    missing = [i for i in ids if i not in lookup]
    if missing:
        raise ValueError(f"reference assignment lacks ids {missing[:5]}")
    return ClusterAssignment(ids, [int(lookup[i]) for i in ids])


def cmd_stratify(cfg: RunConfig) -> Path:
    src = Path(_require(cfg.matrix, "matrix"))
    m = DistanceMatrix.read_csv(src)
    sel = silhouette_select(m, cfg.cluster_linkage, (cfg.k_min, cfg.k_max))
    out = _Outputs(Path(cfg.out))
    out.write("assignment.csv", format_assignment_csv(sel.assignment))
    report = {"k": sel.k, "silhouette": sel.score, "scores": {str(k): v for k, v in sel.scores.items()}}
    inputs = [src]
    if cfg.dbscan_eps is not None:
        db = dbscan_matrix(m, cfg.dbscan_eps, cfg.dbscan_min_pts)
        out.write("dbscan.csv", format_assignment_csv(db))
        report["dbscan"] = {
            "n_clusters": db.n_clusters,
            "n_noise": sum(1 for x in db.labels if x < 0),
            "rand_index_vs_selection": rand_index(sel.assignment, db),
        }
    if cfg.reference is not None:
        ref = _read_assignment(Path(cfg.reference), m.ids)
        report["rand_index_vs_reference"] = rand_index(sel.assignment, ref)
        inputs.append(Path(cfg.reference))
    if cfg.trees is not None:
        ids, trees, files = read_trees(Path(cfg.trees))
        by_id = dict(zip(ids, trees))
        lab = dict(zip(sel.assignment.ids, sel.assignment.labels))
        keep = [i for i in m.ids if i in by_id]
        curves = height_curves([by_id[i] for i in keep], [lab[i] for i in keep])
        out.write("curves.csv", format_curves_csv(curves))
        inputs.extend(files)
    out.write("report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    keys = ("matrix", "cluster_linkage", "k_min", "k_max", "dbscan_eps", "dbscan_min_pts", "reference", "trees")
    return out.manifest("stratify", cfg, keys, inputs)


def cmd_simulate(cfg: RunConfig) -> Path:
    seed = _require(cfg.seed, "seed")
    sim = SimulationConfig(
        seed=seed,
        n_per_group=cfg.n_per_group,
        linkage=cfg.linkage,
        mu_alpha=cfg.mu_alpha,
        mu_beta=cfg.mu_beta,
        rescale=cfg.rescale,
        jobs=cfg.jobs,
        min_cluster_fraction=cfg.min_cluster_fraction,
    )
    mu = measure_from_options(cfg.mu_family, cfg.mu_alpha, cfg.mu_beta, cfg.mu_grid)
    run_simulation_study(seed, mu, Path(cfg.out), sim)
    return Path(cfg.out) / "manifest.json"


COMMANDS = {
    "reduce": cmd_reduce,
    "trees": cmd_trees,
    "distances": cmd_distances,
    "stratify": cmd_stratify,
    "simulate": cmd_simulate,
}


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=S, help="key = value configuration file; flags override it")
    common.add_argument("--seed", type=int, default=S)
    common.add_argument("--out", default=S, help="output directory")
    common.add_argument("--jobs", type=int, default=S, help="worker processes for distance matrices")

    p = argparse.ArgumentParser(prog="dendrodist", parents=[common], description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("reduce", parents=[common], help="impute, standardize and apply per-view PCA")
    r.add_argument("--features", default=S, help="CSV with cloud_id, optional id, and feature columns")
    r.add_argument("--views", default=S, help="CSV with feature_name, view_name")
    r.add_argument("--components", type=int, default=S, help="components kept per view")
    r.add_argument("--ddof", type=int, default=S, help="0 for population sd, 1 for sample sd")

    t = sub.add_parser("trees", parents=[common], help="one dendrogram per cloud")
    t.add_argument("--input", default=S, help="CSV with cloud_id and numeric coordinates")
    t.add_argument("--linkage", choices=["single", "complete", "average", "ward"], default=S)

    d = sub.add_parser("distances", parents=[common], help="pairwise tree distance matrix")
    d.add_argument("--trees", default=S, help="directory of tree JSON files")
    d.add_argument("--metric", choices=["edit", "pruned"], default=S)
    d.add_argument("--mu-family", dest="mu_family", choices=["beta", "uniform-grid", "point-mass-list"], default=S)
    d.add_argument("--mu-alpha", dest="mu_alpha", type=float, default=S)
    d.add_argument("--mu-beta", dest="mu_beta", type=float, default=S)
    d.add_argument("--mu-grid", dest="mu_grid", type=int, default=S, help="grid size for uniform-grid")
    d.add_argument("--rescale", choices=["population", "per-tree", "none"], default=S)
    d.add_argument("--budget-leaves", dest="budget_leaves", type=int, default=S)

    s = sub.add_parser("stratify", parents=[common], help="silhouette-selected clustering of a matrix")
    s.add_argument("--matrix", default=S)
    s.add_argument("--cluster-linkage", dest="cluster_linkage", choices=["single", "complete", "average", "ward"], default=S)
    s.add_argument("--k-min", dest="k_min", type=int, default=S)
    s.add_argument("--k-max", dest="k_max", type=int, default=S)
    s.add_argument("--dbscan-eps", dest="dbscan_eps", type=float, default=S)
    s.add_argument("--dbscan-min-pts", dest="dbscan_min_pts", type=int, default=S)
    s.add_argument("--reference", default=S, help="CSV (id, label) to compare against")
    s.add_argument("--trees", default=S, help="tree directory for height curves")

    m = sub.add_parser("simulate", parents=[common], help="two-group simulation study")
    m.add_argument("--n-per-group", dest="n_per_group", type=int, default=S)
    m.add_argument("--linkage", choices=["single", "complete", "average", "ward"], default=S)
    m.add_argument("--mu-family", dest="mu_family", choices=["beta", "uniform-grid", "point-mass-list"], default=S)
    m.add_argument("--mu-alpha", dest="mu_alpha", type=float, default=S)
    m.add_argument("--mu-beta", dest="mu_beta", type=float, default=S)
    m.add_argument("--rescale", choices=["population", "per-tree", "none"], default=S)
    m.add_argument("--min-cluster-fraction", dest="min_cluster_fraction", type=float, default=S)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    try:
        cfg = load_config(config_path, args)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            manifest = COMMANDS[command](cfg)
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (DendrodistError, ValueError, KeyError, FileNotFoundError, pd.errors.ParserError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    print(manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
