"""Merge trees: storage, validation, canonical forms and text formats.

A merge tree is a rooted tree with a height on every vertex that strictly
increases from child to father. Edge weights are height differences.
Vertices are dense integer ids ``0..n-1``; edges are ``(child, father)``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidTreeError, TreeParseError

__all__ = [
    "MergeTree",
    "CanonicalForm",
    "Violation",
    "ValidationReport",
    "validate",
    "check",
    "canonicalize",
    "total_weight",
    "signature",
    "isomorphic",
    "serialize",
    "parse",
    "to_newick",
    "scale_heights",
    "max_height",
]


@dataclass(frozen=True)
class MergeTree:
    heights: tuple[float, ...]
    edges: tuple[tuple[int, int], ...]
    root: int
    labels: tuple[str | None, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "heights", tuple(float(h) for h in self.heights))
        object.__setattr__(self, "edges", tuple((int(c), int(f)) for c, f in self.edges))
        object.__setattr__(self, "root", int(self.root))
        if self.labels is not None:
            labels = tuple(None if x is None else str(x) for x in self.labels)
            if len(labels) != len(self.heights):
                raise InvalidTreeError("labels must have one entry per vertex")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_parents(cls, parents: Sequence[int], heights: Sequence[float], labels=None):
        """Build from a parent array where the root has parent -1."""
        roots = [v for v, p in enumerate(parents) if p < 0]
        if len(roots) != 1:
            raise InvalidTreeError(f"expected exactly one root, found {len(roots)}")
        edges = [(v, p) for v, p in enumerate(parents) if p >= 0]
        return cls(tuple(heights), tuple(edges), roots[0], labels)

    @classmethod
    def single_vertex(cls, height: float = 0.0, label: str | None = None):
        return cls((height,), (), 0, None if label is None else (label,))

    @property
    def n_vertices(self) -> int:
        return len(self.heights)

    @cached_property
    def parents(self) -> tuple[int, ...]:
        par = [-1] * self.n_vertices
        for c, f in self.edges:
            if par[c] != -1:
                raise InvalidTreeError(f"vertex {c} has more than one father")
            par[c] = f
        return tuple(par)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for c, f in self.edges:
            ch[f].append(c)
        return tuple(tuple(sorted(x)) for x in ch)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n_vertices) if not self.children[v])

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    def weight(self, v: int) -> float:
        """Weight of the edge from ``v`` to its father (0 for the root)."""
        p = self.parents[v]
        return 0.0 if p < 0 else self.heights[p] - self.heights[v]

    @property
    def is_dendrogram(self) -> bool:
        return all(self.heights[v] == 0.0 for v in self.leaves)


class CanonicalForm(MergeTree):
    """Merge tree without non-root vertices of order 2, in canonical order.

    Vertices are numbered in post-order with children visited in signature
    order, so the root is ``n - 1``, every subtree occupies a contiguous id
    range ending at its top vertex, and isomorphic inputs produce equal
    objects. Only :func:`canonicalize` should construct these.
    """

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        size = [1] * self.n_vertices
        for v in range(self.n_vertices):
            for c in self.children[v]:
                size[v] += size[c]
        return tuple(size)


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{v.kind}: {v.message}" for v in self.violations)


def validate(t: MergeTree, min_weight: float = 0.0) -> ValidationReport:
    """Report every violated invariant of ``t``; an empty report means valid.

    Edge weights must be strictly greater than ``min_weight``.
    """
    out: list[Violation] = []
    n = len(t.heights)
    if n == 0:
        return ValidationReport((Violation("empty", (), "tree has no vertices"),))
    for v, h in enumerate(t.heights):
        if not math.isfinite(h):
            out.append(Violation("non-finite height", (v,), f"vertex {v} has height {h}"))
    if not 0 <= t.root < n:
        out.append(Violation("bad root", (t.root,), f"root {t.root} is not a vertex"))
    par: list[list[int]] = [[] for _ in range(n)]
    for k, (c, f) in enumerate(t.edges):
        if not (0 <= c < n and 0 <= f < n):
            out.append(Violation("unknown vertex", (c, f), f"edge {k} ({c}, {f}) names a missing vertex"))
            continue
        if c == f:
            out.append(Violation("cycle", (c,), f"edge {k} is a self-loop on {c}"))
            continue
        par[c].append(f)
    for v in range(n):
        if len(par[v]) > 1:
            out.append(Violation("multiple fathers", (v, *par[v]), f"vertex {v} has fathers {par[v]}"))
    if 0 <= t.root < n and par[t.root]:
        out.append(Violation("root has father", (t.root, *par[t.root]), f"root {t.root} has a father"))
    # follow first fathers upward; every vertex must reach the root
    status: list[str | None] = [None] * n
    for s in range(n):
        path: list[int] = []
        pos: dict[int, int] = {}
        v = s
        while True:
            if status[v] is not None:
                outcome = status[v]
                break
            if v in pos:
                cyc = tuple(sorted(path[pos[v]:]))
                out.append(Violation("cycle", cyc, f"vertices {list(cyc)} form a cycle"))
                outcome = "broken"
                break
            pos[v] = len(path)
            path.append(v)
            if v == t.root:
                outcome = "ok"
                break
            if not par[v]:
                out.append(Violation("disconnected", (v,), f"vertex {v} has no father but is not the root"))
                outcome = "broken"
                break
            v = par[v][0]
        for u in path:
            status[u] = outcome
    for c, f in t.edges:
        if 0 <= c < n and 0 <= f < n and c != f:
            hc, hf = t.heights[c], t.heights[f]
            if not hf - hc > min_weight:
                kind = "non-monotone heights" if hf < hc else "non-positive weight"
                out.append(Violation(kind, (c, f), f"edge ({c}, {f}) has weight {hf - hc}"))
    if t.labels is not None and len(t.labels) != n:
        out.append(Violation("labels", (), "labels length differs from vertex count"))
    return ValidationReport(tuple(out))


def check(t: MergeTree, min_weight: float = 0.0) -> None:
    report = validate(t, min_weight)
    if not report.ok:
        raise InvalidTreeError(f"invalid tree: {report}", report)


# ---------------------------------------------------------------- canonical form


def _postorder(children: Sequence[Sequence[int]], root: int) -> list[int]:
    order, stack = [], [(root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            order.append(v)
            continue
        stack.append((v, True))
        for c in reversed(children[v]):
            stack.append((c, False))
    return order


def _height_signatures(heights, children, root) -> dict[int, tuple]:
    sig: dict[int, tuple] = {}
    for v in _postorder(children, root):
        sig[v] = (heights[v], tuple(sorted(sig[c] for c in children[v])))
    return sig


def canonicalize(t: MergeTree, min_weight: float = 0.0) -> CanonicalForm:
    """Ghost every non-root vertex with exactly one child and renumber.

    A ghosted chain becomes one edge whose weight is the chain's total,
    since heights of the surviving vertices are untouched.
    """
    if isinstance(t, CanonicalForm):
        return t
    check(t, min_weight)
    ch = t.children
    keep_children: dict[int, list[int]] = {}
    for v in _postorder(ch, t.root):
        if v != t.root and len(ch[v]) == 1:
            continue
        kids = []
        for c in ch[v]:
            while len(ch[c]) == 1:
                c = ch[c][0]
            kids.append(c)
        keep_children[v] = kids
    sig = _height_signatures(t.heights, keep_children, t.root)
    ordered = {v: sorted(kids, key=sig.__getitem__) for v, kids in keep_children.items()}
    order = _postorder(ordered, t.root)
    new_id = {v: i for i, v in enumerate(order)}
    heights = tuple(t.heights[v] for v in order)
    edges = tuple((new_id[c], new_id[v]) for v in order for c in ordered[v])
    edges = tuple(sorted(edges))
    labels = None if t.labels is None else tuple(t.labels[v] for v in order)
    return CanonicalForm(heights, edges, len(order) - 1, labels)


def total_weight(t: MergeTree) -> float:
    """Sum of all edge weights.

    Evaluated as the exactly rounded sum of ``(k_v - 1) * f(v)`` plus the root
    height, where ``k_v`` is the number of children. Order-2 vertices
    contribute exactly zero, so ghosting leaves the result bit-identical.
    """
    ch = t.children
    terms = [(len(ch[v]) - 1) * t.heights[v] for v in range(t.n_vertices) if len(ch[v]) != 1]
    terms.append(t.heights[t.root])
    return math.fsum(terms)


def max_height(t: MergeTree) -> float:
    return max(t.heights)


def scale_heights(t: MergeTree, factor: float) -> MergeTree:
    """Divide every height by ``factor`` (> 0); the class of ``t`` is kept."""
    if not factor > 0:
        raise ValueError("scale factor must be positive")
    return type(t)(tuple(h / factor for h in t.heights), t.edges, t.root, t.labels)


# ---------------------------------------------------------------- isomorphism


def signature(t: MergeTree, by: str = "heights") -> tuple:
    """Order-independent recursive signature of ``t``.

    ``by="heights"`` keys each vertex on its height (merge-tree isomorphism);
    ``by="weights"`` keys each vertex on the weight of its father edge, which
    identifies weighted tree shapes regardless of absolute height.
    """
    ch = t.children
    sig: dict[int, tuple] = {}
    for v in _postorder(ch, t.root):
        key = t.heights[v] if by == "heights" else t.weight(v)
        sig[v] = (key, tuple(sorted(sig[c] for c in ch[v])))
    return sig[t.root]


def isomorphic(a: MergeTree, b: MergeTree, by: str = "heights") -> bool:
    return a.n_vertices == b.n_vertices and signature(a, by) == signature(b, by)


# ---------------------------------------------------------------- text formats


def serialize(t: MergeTree) -> str:
    """JSON text with one vertex or edge per line."""
    lines = ["{", f'  "root": {t.root},', '  "vertices": [']
    verts = []
    for v, h in enumerate(t.heights):
        item = {"id": v, "height": h}
        if t.labels is not None and t.labels[v] is not None:
            item["label"] = t.labels[v]
        verts.append("    " + json.dumps(item))
    lines.append(",\n".join(verts))
    lines.append("  ],")
    lines.append('  "edges": [')
    if t.edges:
        lines.append(",\n".join(f"    [{c}, {f}]" for c, f in t.edges))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _edge_position(text: str, k: int) -> tuple[int, int] | tuple[None, None]:
    start = text.find('"edges"')
    if start < 0:
        return None, None
    for i, m in enumerate(re.finditer(r"\[\s*-?\d+\s*,\s*-?\d+\s*\]", text[start:])):
        if i == k:
            return _line_col(text, start + m.start())
    return None, None


def parse(text: str) -> MergeTree:
    """Inverse of :func:`serialize`. File ids are renumbered densely in order."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise TreeParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(obj, dict):
        raise TreeParseError("top level must be an object", 1, 1)
    for key in ("vertices", "edges", "root"):
        if key not in obj:
            raise TreeParseError(f"missing key {key!r}", 1, 1)
    ids: dict[int, int] = {}
    heights: list[float] = []
    labels: list[str | None] = []
    for k, item in enumerate(obj["vertices"]):
        if not isinstance(item, dict) or "id" not in item or "height" not in item:
            raise TreeParseError(f"vertex entry {k} needs 'id' and 'height'")
        vid, h = item["id"], item["height"]
        if not isinstance(vid, int) or isinstance(vid, bool):
            raise TreeParseError(f"vertex entry {k} has non-integer id {vid!r}")
        if not isinstance(h, (int, float)) or isinstance(h, bool):
            raise TreeParseError(f"vertex {vid} has non-numeric height {h!r}")
        if vid in ids:
            raise TreeParseError(f"duplicate vertex id {vid}")
        ids[vid] = len(heights)
        heights.append(float(h))
        labels.append(item.get("label"))
    edges = []
    for k, e in enumerate(obj["edges"]):
        if not (isinstance(e, list) and len(e) == 2):
            line, col = _edge_position(text, k)
            raise TreeParseError(f"edge {k} must be a [child, father] pair", line, col)
        for end in e:
            if end not in ids:
                line, col = _edge_position(text, k)
                raise TreeParseError(f"edge {k} names missing vertex {end!r}", line, col)
        edges.append((ids[e[0]], ids[e[1]]))
    if obj["root"] not in ids:
        raise TreeParseError(f"root {obj['root']!r} is not a listed vertex")
    has_labels = any(x is not None for x in labels)
    return MergeTree(tuple(heights), tuple(edges), ids[obj["root"]], tuple(labels) if has_labels else None)


def to_newick(t: MergeTree) -> str:
    """Newick text with branch lengths equal to edge weights."""
    ch = t.children
    out: dict[int, str] = {}
    for v in _postorder(ch, t.root):
        name = t.labels[v] if t.labels is not None and t.labels[v] is not None else ("" if ch[v] else f"v{v}")
        name = re.sub(r"[\s(),:;\[\]']", "_", name)
        body = "(" + ",".join(out[c] for c in ch[v]) + ")" + name if ch[v] else name
        out[v] = body if v == t.root else f"{body}:{t.weight(v)!r}"
    return out[t.root] + ";"


def leaf_chain_weights(t: MergeTree) -> list[float]:
    """Weight from each leaf up to the root."""
    return [t.heights[t.root] - t.heights[v] for v in t.leaves]


def relabel(t: MergeTree, labels: Iterable[str | None] | None) -> MergeTree:
    return type(t)(t.heights, t.edges, t.root, None if labels is None else tuple(labels))
