"""Synthetic two-group population of point clouds and the study run on it."""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..editdist import PruningMeasure, beta_measure
from ..hclust import Linkage, PointCloud, build_dendrogram
from ..rng import make_rng
from ..trees import MergeTree, serialize
from .clustering import ClusterAssignment, format_assignment_csv, hcluster_matrix, silhouette
from .matrix import DistanceMatrix, distance_matrix, format_matrix_csv, mean_block_ratio


@dataclass(frozen=True)
class SimulationConfig:
    seed: int = 0
    n_per_group: int = 50
    size_ranges: tuple[tuple[int, int], tuple[int, int]] = ((2, 20), (2, 10))
    sds: tuple[float, float] = (1.0, 2.0)
    dim: int = 2
    linkage: str = "average"
    cluster_linkage: str = "average"
    mu_alpha: float = 2.0
    mu_beta: float = 8.0
    rescale: str = "population"
    jobs: int = 1
    min_cluster_fraction: float = 0.1


def simulate_clouds(seed: int, config: SimulationConfig | None = None) -> tuple[list[PointCloud], list[int]]:
    """Two groups of clouds with Gaussian coordinates.

    Group 1 clouds have uniform sizes in ``size_ranges[0]`` and coordinate
    sd ``sds[0]``; group 2 likewise with the second entries. Each cloud has
    its own random stream, so the population does not depend on draw order.
    """
    cfg = config or SimulationConfig(seed=seed)
    clouds, groups = [], []
    for g, ((lo, hi), sd) in enumerate(zip(cfg.size_ranges, cfg.sds), start=1):
        for i in range(cfg.n_per_group):
            rng = make_rng(seed, g, i)
            n = int(rng.integers(lo, hi + 1))
            pts = rng.normal(0.0, sd, size=(n, cfg.dim))
            clouds.append(PointCloud(pts, cloud_id=f"g{g}_{i:03d}"))
            groups.append(g)
    return clouds, groups


def pooled_sd(clouds: list[PointCloud], members) -> float:
    """Sample sd of all coordinates of all points in the given clouds."""
    x = np.concatenate([clouds[i].points.ravel() for i in members])
    return float(x.std(ddof=1))


def trimmed_two_cut(m: DistanceMatrix, linkage, min_size: int) -> tuple[list[int], ClusterAssignment]:
    """Two-cluster cut after repeatedly dropping undersized clusters.

    While a side of the 2-cut has fewer than ``min_size`` items, those items
    are set aside as outliers and the rest is reclustered. Returns the kept
    indices and the cut over them.
    """
    keep = list(range(m.size))
    while True:
        sub = DistanceMatrix(m.values[np.ix_(keep, keep)], [m.ids[i] for i in keep])
        cut = hcluster_matrix(sub, linkage, 2)
        small = {lab for lab in (0, 1) if cut.labels.count(lab) < min_size}
        if not small or len(keep) - sum(cut.labels.count(s) for s in small) < 2:
            return keep, cut
        keep = [i for i, lab in zip(keep, cut.labels) if lab not in small]


@dataclass
class CutSummary:
    assignment: ClusterAssignment
    kept: list[int]
    silhouette: float
    compact: int
    compact_purity: float
    compact_recall: float
    sds: dict[int, float]
    sizes: dict[int, int]
    all_ids: tuple[str, ...] = ()

    @property
    def outliers(self) -> list[int]:
        kept = set(self.kept)
        return [i for i in range(len(self.all_ids)) if i not in kept]

    def full_assignment(self) -> ClusterAssignment:
        """Labels for every item; trimmed outliers get -1."""
        labels = [-1] * len(self.all_ids)
        for i, lab in zip(self.kept, self.assignment.labels):
            labels[i] = lab
        return ClusterAssignment(self.all_ids, labels)

    def as_dict(self) -> dict:
        return {
            "silhouette": self.silhouette,
            "outliers": [self.all_ids[i] for i in self.outliers],
            "compact_label": self.compact,
            "compact_purity": self.compact_purity,
            "compact_recall": self.compact_recall,
            "pooled_sd": {str(k): v for k, v in self.sds.items()},
            "sizes": {str(k): v for k, v in self.sizes.items()},
        }


def summarize_cut(m: DistanceMatrix, kept: list[int], a: ClusterAssignment, groups, clouds) -> CutSummary:
    """Silhouette, the most compact cluster and its group-1 content.

    ``a`` labels the items ``kept`` of ``m``. The compact cluster is the one
    with the smallest mean within-cluster distance among clusters with at
    least two members.
    """
    all_ids = m.ids
    m = DistanceMatrix(m.values[np.ix_(kept, kept)], [m.ids[i] for i in kept])
    groups = [groups[i] for i in kept]
    clouds = [clouds[i] for i in kept]
    labels = sorted(set(a.labels))
    spread = {}
    for lab in labels:
        idx = a.members(lab)
        if len(idx) >= 2:
            block = m.values[np.ix_(idx, idx)]
            spread[lab] = block[np.triu_indices(len(idx), 1)].mean()
    compact = min(spread, key=spread.get) if spread else labels[0]
    mem = a.members(compact)
    g = np.asarray(groups)
    purity = float(np.mean(g[mem] == 1))
    recall = float(np.sum(g[mem] == 1) / max(1, np.sum(g == 1)))
    sds = {lab: pooled_sd(clouds, a.members(lab)) for lab in labels}
    sizes = {lab: len(a.members(lab)) for lab in labels}
    return CutSummary(a, list(kept), silhouette(m, a), compact, purity, recall, sds, sizes, all_ids)


@dataclass
class SimulationReport:
    config: SimulationConfig
    clouds: list[PointCloud]
    groups: list[int]
    trees: list[MergeTree]
    edit: DistanceMatrix
    pruned: DistanceMatrix
    edit_cut: CutSummary
    pruned_cut: CutSummary
    block_ratio: dict[str, float]
    artifacts: dict[str, str] = field(default_factory=dict)
    # wall-clock seconds per stage; kept out of the artifacts so reruns stay byte-identical
    timings: dict[str, float] = field(default_factory=dict)

    def statistics(self) -> dict:
        return {
            "edit": self.edit_cut.as_dict(),
            "pruned": self.pruned_cut.as_dict(),
            "group1_within_over_cross": self.block_ratio,
        }


def run_simulation_study(seed: int = 0, mu: PruningMeasure | None = None, out_dir=None, config: SimulationConfig | None = None) -> SimulationReport:
    """Build trees for the simulated population, compute both distance
    matrices, cut each into two clusters, and summarize the recovery."""
    cfg = config or SimulationConfig(seed=seed)
    mu = mu or beta_measure(cfg.mu_alpha, cfg.mu_beta)
    clouds, groups = simulate_clouds(seed, cfg)
    trees = [build_dendrogram(c, cfg.linkage) for c in clouds]
    ids = [c.cloud_id for c in clouds]
    t0 = time.perf_counter()
    dm_edit = distance_matrix(trees, "edit", rescale_mode=cfg.rescale, jobs=cfg.jobs, ids=ids)
    t1 = time.perf_counter()
    dm_pruned = distance_matrix(trees, "pruned", mu, rescale_mode=cfg.rescale, jobs=cfg.jobs, ids=ids)
    t2 = time.perf_counter()
    link = Linkage(cfg.cluster_linkage)
    min_size = max(1, math.ceil(cfg.min_cluster_fraction * len(trees)))
    edit_cut = summarize_cut(dm_edit, *trimmed_two_cut(dm_edit, link, min_size), groups, clouds)
    pruned_cut = summarize_cut(dm_pruned, *trimmed_two_cut(dm_pruned, link, min_size), groups, clouds)
    ratio = {
        "edit": mean_block_ratio(dm_edit, groups, 1, 2),
        "pruned": mean_block_ratio(dm_pruned, groups, 1, 2),
    }
    report = SimulationReport(cfg, clouds, groups, trees, dm_edit, dm_pruned, edit_cut, pruned_cut, ratio)
    report.timings = {"edit_matrix": t1 - t0, "pruned_matrix": t2 - t1}
    if out_dir is not None:
        write_simulation_artifacts(report, Path(out_dir), mu)
    return report


def _write(path: Path, text: str, manifest: dict, key: str) -> None:
    path.write_text(text)
    manifest[key] = {"file": path.name, "sha256": hashlib.sha256(text.encode()).hexdigest()}


def clouds_csv(clouds: list[PointCloud], groups: list[int]) -> str:
    dim = clouds[0].dim
    lines = ["cloud_id,group,id," + ",".join(f"x{k}" for k in range(dim))]
    for c, g in zip(clouds, groups):
        for i, p in enumerate(c.points):
            lines.append(f"{c.cloud_id},{g},{c.cloud_id}_{i}," + ",".join(repr(float(v)) for v in p))
    return "\n".join(lines) + "\n"


def write_simulation_artifacts(report: SimulationReport, out: Path, mu: PruningMeasure) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    (out / "trees").mkdir(exist_ok=True)
    manifest: dict = {}
    _write(out / "clouds.csv", clouds_csv(report.clouds, report.groups), manifest, "clouds")
    tree_hashes = {}
    for c, t in zip(report.clouds, report.trees):
        text = serialize(t)
        (out / "trees" / f"{c.cloud_id}.json").write_text(text)
        tree_hashes[c.cloud_id] = hashlib.sha256(text.encode()).hexdigest()
    manifest["trees"] = {"directory": "trees", "sha256": tree_hashes}
    _write(out / "matrix_edit.csv", format_matrix_csv(report.edit), manifest, "matrix_edit")
    _write(out / "matrix_pruned.csv", format_matrix_csv(report.pruned), manifest, "matrix_pruned")
    _write(out / "assignment_edit.csv", format_assignment_csv(report.edit_cut.full_assignment()), manifest, "assignment_edit")
    _write(out / "assignment_pruned.csv", format_assignment_csv(report.pruned_cut.full_assignment()), manifest, "assignment_pruned")
    stats = report.statistics()
    _write(out / "report.json", json.dumps(stats, indent=2, sort_keys=True) + "\n", manifest, "report")
    cfg = report.config
    manifest["invocation"] = {
        "command": "simulate",
        "seed": cfg.seed,
        "linkage": cfg.linkage,
        "cluster_linkage": cfg.cluster_linkage,
        "rescale": cfg.rescale,
        "measure": mu.describe(),
        "n_per_group": cfg.n_per_group,
    }
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    (out / "manifest.json").write_text(text)
    report.artifacts = {k: v["file"] for k, v in manifest.items() if isinstance(v, dict) and "file" in v}
    return manifest
