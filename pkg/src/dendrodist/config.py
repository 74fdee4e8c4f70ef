"""Plain-text key-value run configuration.

One ``key = value`` per line; ``#`` starts a comment; keys use underscores
or hyphens interchangeably. Command-line flags override file values.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path


@dataclass
class RunConfig:
    seed: int | None = None
    out: str = "out"
    jobs: int = 1
    # reduce
    features: str | None = None
    views: str | None = None
    components: int = 2
    ddof: int = 0
    # trees
    input: str | None = None
    linkage: str = "average"
    # distances
    trees: str | None = None
    metric: str = "pruned"
    mu_family: str = "beta"
    mu_alpha: float = 2.0
    mu_beta: float = 8.0
    mu_grid: int = 64
    rescale: str = "population"
    budget_leaves: int = 25
    # stratify
    matrix: str | None = None
    cluster_linkage: str = "ward"
    k_min: int = 2
    k_max: int = 5
    dbscan_eps: float | None = None
    dbscan_min_pts: int = 3
    reference: str | None = None
    # simulate
    n_per_group: int = 50
    min_cluster_fraction: float = 0.1

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    typ = _TYPES[key].replace(" | None", "")
    if raw in ("None", ""):
        return None
    if typ == "int":
        return int(raw)
    if typ == "float":
        return float(raw)
    return raw


def parse_config_text(text: str, source: str = "<config>") -> dict:
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{n}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ValueError(f"{source}:{n}: unknown key {key!r}")
        try:
            out[key] = _convert(key, raw)
        except ValueError:
            raise ValueError(f"{source}:{n}: bad value {raw!r} for {key}") from None
    return out


def load_config(path: str | Path | None, overrides: dict) -> RunConfig:
    """Defaults, then the file, then non-None ``overrides``."""
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text(), str(path)))
    values.update({k: v for k, v in overrides.items() if v is not None and k in _TYPES})
    return RunConfig(**values)
