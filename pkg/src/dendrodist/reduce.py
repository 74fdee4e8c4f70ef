"""Feature-table preprocessing: imputation, standardization, per-view PCA."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import SchemaError

DEFAULT_VIEW_NAMES = ("first-order", "shape", "GLCM", "GLRLM", "GLZLM", "NGLDM")


class ConstantColumnWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FeatureTable:
    """Rows are observations (lesions) grouped by ``cloud_ids`` (patients).

    Missing values are NaN.
    """

    values: np.ndarray
    columns: tuple[str, ...]
    cloud_ids: tuple[str, ...]
    row_ids: tuple[str, ...] = ()

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2:
            raise SchemaError("feature values must be a 2-d array")
        if vals.shape[0] < 1:
            raise SchemaError("no lesions")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "columns", tuple(str(c) for c in self.columns))
        object.__setattr__(self, "cloud_ids", tuple(str(c) for c in self.cloud_ids))
        rows = tuple(str(r) for r in self.row_ids) or tuple(str(i) for i in range(vals.shape[0]))
        object.__setattr__(self, "row_ids", rows)
        if len(self.columns) != vals.shape[1]:
            raise SchemaError(f"{vals.shape[1]} value columns but {len(self.columns)} names")
        if len(self.cloud_ids) != vals.shape[0] or len(rows) != vals.shape[0]:
            raise SchemaError("cloud_ids and row_ids need one entry per row")
        if len(set(self.columns)) != len(self.columns):
            raise SchemaError("duplicate column names")

    def replace(self, values=None, columns=None) -> "FeatureTable":
        return FeatureTable(
            self.values if values is None else values,
            self.columns if columns is None else columns,
            self.cloud_ids,
            self.row_ids,
        )

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    def to_frame(self) -> pd.DataFrame:
        df = pd.DataFrame(self.values, columns=list(self.columns))
        df.insert(0, "cloud_id", list(self.cloud_ids))
        df.insert(0, "id", list(self.row_ids))
        return df

    @classmethod
    def from_frame(cls, df: pd.DataFrame, cloud_column: str = "cloud_id", id_column: str = "id") -> "FeatureTable":
        if len(df) == 0:
            raise SchemaError("no lesions")
        if cloud_column not in df.columns:
            raise SchemaError(f"missing column {cloud_column!r}; found {list(df.columns)}")
        feats = [c for c in df.columns if c not in (cloud_column, id_column)]
        bad = [c for c in feats if not pd.api.types.is_numeric_dtype(df[c])]
        if bad:
            raise SchemaError(f"non-numeric feature columns: {bad}")
        rows = df[id_column].astype(str).tolist() if id_column in df.columns else ()
        return cls(df[feats].to_numpy(dtype=float), tuple(feats), tuple(df[cloud_column].astype(str)), tuple(rows))


@dataclass(frozen=True)
class ViewSpec:
    """Ordered views, each a named group of columns, with ``k`` components kept per view."""

    views: tuple[tuple[str, tuple[str, ...]], ...]
    k: int = 2

    def __post_init__(self):
        if self.k < 1:
            raise SchemaError("k must be >= 1")
        for name, cols in self.views:
            if len(cols) < self.k:
                raise SchemaError(f"view {name!r} has {len(cols)} columns, fewer than k={self.k}")
        all_cols = [c for _, cols in self.views for c in cols]
        dup = sorted({c for c in all_cols if all_cols.count(c) > 1})
        if dup:
            raise SchemaError(f"columns assigned to more than one view: {dup}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.views)

    def check_partition(self, columns) -> None:
        assigned = {c for _, cols in self.views for c in cols}
        missing = [c for c in columns if c not in assigned]
        unknown = sorted(assigned - set(columns))
        if missing or unknown:
            raise SchemaError(f"view assignment mismatch: unassigned {missing}, unknown {unknown}")

    @classmethod
    def from_pairs(cls, pairs, k: int = 2) -> "ViewSpec":
        """From ``(feature_name, view_name)`` pairs; views keep first-seen order."""
        order: dict[str, list[str]] = {}
        for feat, view in pairs:
            order.setdefault(str(view), []).append(str(feat))
        return cls(tuple((v, tuple(cols)) for v, cols in order.items()), k)

    @classmethod
    def read_csv(cls, path: str | Path, k: int = 2) -> "ViewSpec":
        df = pd.read_csv(path)
        need = {"feature_name", "view_name"}
        if not need <= set(df.columns):
            raise SchemaError(f"view file needs columns {sorted(need)}; found {list(df.columns)}")
        return cls.from_pairs(zip(df["feature_name"], df["view_name"]), k)

    @classmethod
    def by_prefix(cls, columns, names=DEFAULT_VIEW_NAMES, k: int = 2) -> "ViewSpec":
        """Assign each column to the view whose name prefixes it (case-insensitive)."""
        pairs = []
        for c in columns:
            hits = [n for n in names if c.lower().startswith(n.lower())]
            if not hits:
                raise SchemaError(f"column {c!r} matches no view prefix in {list(names)}")
            pairs.append((c, max(hits, key=len)))
        by_view = {n: [] for n in names}
        for c, n in pairs:
            by_view[n].append(c)
        return cls(tuple((n, tuple(cols)) for n, cols in by_view.items() if cols), k)


def impute(table: FeatureTable) -> FeatureTable:
    """Fill missing entries with the median of the observed column values."""
    vals = table.values.copy()
    for j, name in enumerate(table.columns):
        col = vals[:, j]
        miss = np.isnan(col)
        if miss.all():
            raise SchemaError(f"column uninformative: {name!r} has no observed values")
        if miss.any():
            col[miss] = np.median(col[~miss])
    return table.replace(values=vals)


def zscore(table: FeatureTable, ddof: int = 0) -> FeatureTable:
    """Center each column and divide by its standard deviation.

    ``ddof=0`` uses the population convention. Constant columns become zero
    with a warning.
    """
    vals = table.values
    if np.isnan(vals).any():
        raise SchemaError("zscore needs an imputed table")
    mean = vals.mean(axis=0)
    sd = vals.std(axis=0, ddof=ddof) if vals.shape[0] > ddof else np.zeros(vals.shape[1])
    out = np.zeros_like(vals)
    const = []
    for j in range(vals.shape[1]):
        if sd[j] > 0 and np.ptp(vals[:, j]) > 0:
            out[:, j] = (vals[:, j] - mean[j]) / sd[j]
        else:
            const.append(table.columns[j])
    if const:
        warnings.warn(f"constant columns mapped to zero: {const}", ConstantColumnWarning, stacklevel=2)
    return table.replace(values=out)


@dataclass(frozen=True)
class ViewComponents:
    view: str
    loadings: np.ndarray  # (k, n_columns)
    explained_ratio: np.ndarray  # (k,)
    columns: tuple[str, ...] = field(default_factory=tuple)


def _block_pca(block: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    centered = block - block.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    vt = vt[:k].copy()
    for i in range(vt.shape[0]):
        j = int(np.argmax(np.abs(vt[i])))
        if vt[i, j] < 0:
            vt[i] = -vt[i]
    var = s**2
    total = var.sum()
    ratio = var[:k] / total if total > 0 else np.zeros(min(k, len(var)))
    if vt.shape[0] < k:
        # fewer rows than components: pad with zero directions
        pad = np.zeros((k - vt.shape[0], block.shape[1]))
        vt = np.vstack([vt, pad])
        ratio = np.concatenate([ratio, np.zeros(k - len(ratio))])
    return centered @ vt.T, vt, ratio


def view_pca(table: FeatureTable, spec: ViewSpec, return_components: bool = False):
    """Project each view's column block onto its top ``k`` principal axes.

    Output columns are ``<view>_PC1 .. <view>_PCk`` in view order. Each axis
    is oriented so its largest-magnitude loading is positive.
    """
    spec.check_partition(table.columns)
    scores, names, comps = [], [], []
    for view, cols in spec.views:
        idx = [table.columns.index(c) for c in cols]
        sc, vt, ratio = _block_pca(table.values[:, idx], spec.k)
        scores.append(sc)
        names.extend(f"{view}_PC{i + 1}" for i in range(spec.k))
        comps.append(ViewComponents(view, vt, ratio, tuple(cols)))
    out = table.replace(values=np.hstack(scores), columns=tuple(names))
    return (out, comps) if return_components else out


def reduce_table(table: FeatureTable, spec: ViewSpec, ddof: int = 0):
    """impute, then zscore, then view_pca; returns the table and components."""
    return view_pca(zscore(impute(table), ddof=ddof), spec, return_components=True)
