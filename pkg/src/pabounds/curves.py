"""Pairs of multicurves on a closed surface, stored by intersection data."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import networkx as nx
import numpy as np


class InvalidCurveSystem(ValueError):
    """Raised when an operation needs a valid system and gets an invalid one."""


@dataclass(frozen=True)
class CurveMeta:
    id: str
    separating: bool = False
    homology: Optional[tuple[int, ...]] = None
    pair_id: Optional[str] = None

    def __post_init__(self):
        if self.homology is not None:
            object.__setattr__(self, "homology", tuple(int(x) for x in self.homology))

    def to_json(self) -> dict:
        out: dict = {"id": self.id, "separating": self.separating}
        if self.homology is not None:
            out["homology"] = list(self.homology)
        if self.pair_id is not None:
            out["pair_id"] = self.pair_id
        return out

    @classmethod
    def from_json(cls, d: dict) -> "CurveMeta":
        return cls(
            id=str(d["id"]),
            separating=bool(d.get("separating", False)),
            homology=d.get("homology"),
            pair_id=d.get("pair_id"),
        )


@dataclass(frozen=True)
class CurveSystem:
    """Multicurves ``A`` (rows) and ``B`` (columns) on a genus-``g`` surface.

    ``intersections[i][j]`` is the geometric intersection number of
    ``a_curves[i]`` with ``b_curves[j]``.  ``filling`` is an asserted flag:
    filling cannot be decided from intersection numbers alone.
    ``deltas`` optionally records homology classes of auxiliary test curves.
    """

    genus: int
    a_curves: tuple[CurveMeta, ...]
    b_curves: tuple[CurveMeta, ...]
    intersections: tuple[tuple[int, ...], ...]
    filling: bool = False
    deltas: tuple[tuple[int, ...], ...] = field(default=())
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "a_curves", tuple(self.a_curves))
        object.__setattr__(self, "b_curves", tuple(self.b_curves))
        object.__setattr__(
            self, "intersections", tuple(tuple(int(x) for x in row) for row in self.intersections)
        )
        object.__setattr__(self, "deltas", tuple(tuple(int(x) for x in d) for d in self.deltas))

    @property
    def matrix(self) -> np.ndarray:
        m, n = len(self.a_curves), len(self.b_curves)
        return np.array(self.intersections, dtype=np.int64).reshape(m, n)

    @property
    def curves(self) -> tuple[CurveMeta, ...]:
        return self.a_curves + self.b_curves

    def curve(self, curve_id: str) -> CurveMeta:
        for c in self.curves:
            if c.id == curve_id:
                return c
        raise KeyError(curve_id)

    # serialization ------------------------------------------------------

    def to_json(self) -> dict:
        entries = [
            [i, j, n]
            for i, row in enumerate(self.intersections)
            for j, n in enumerate(row)
            if n != 0
        ]
        out = {
            "genus": self.genus,
            "a_curves": [c.to_json() for c in self.a_curves],
            "b_curves": [c.to_json() for c in self.b_curves],
            "intersections": entries,
        }
        if self.filling:
            out["filling"] = True
        if self.deltas:
            out["deltas"] = [list(d) for d in self.deltas]
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_json(cls, d: dict) -> "CurveSystem":
        a = [CurveMeta.from_json(c) for c in d["a_curves"]]
        b = [CurveMeta.from_json(c) for c in d["b_curves"]]
        mat = [[0] * len(b) for _ in a]
        for entry in d.get("intersections", []):
            i, j, n = entry
            if not (0 <= i < len(a) and 0 <= j < len(b)):
                raise InvalidCurveSystem(f"intersection entry {entry} out of range")
            mat[i][j] = n
        return cls(
            genus=int(d["genus"]),
            a_curves=a,
            b_curves=b,
            intersections=mat,
            filling=bool(d.get("filling", False)),
            deltas=d.get("deltas", ()),
            name=d.get("name", ""),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def load(cls, path) -> "CurveSystem":
        return cls.from_json(json.loads(Path(path).read_text()))


def validate(system: CurveSystem) -> list[str]:
    """Return the violated invariants of ``system``; empty means valid."""
    problems: list[str] = []
    m, n = len(system.a_curves), len(system.b_curves)
    rows = system.intersections
    if system.genus < 2:
        problems.append("genus: must be at least 2")
    if len(rows) != m or any(len(r) != n for r in rows):
        problems.append(f"shape: intersections must be {m}x{n}")
        return problems
    if any(x < 0 for r in rows for x in r):
        problems.append("nonnegative: intersection numbers must be nonnegative")
    if m + n and not nx.is_connected(_graph_from_rows(system)):
        problems.append("connected: intersection graph is disconnected")

    ids = [c.id for c in system.curves]
    if len(set(ids)) != len(ids):
        problems.append("ids: curve ids must be unique")
    for c in system.curves:
        if c.homology is None:
            continue
        if len(c.homology) != 2 * system.genus:
            problems.append(f"homology-length: {c.id} has length {len(c.homology)}")
        elif c.separating and any(c.homology):
            problems.append(f"separating: {c.id} is separating with nonzero homology")

    by_pair: dict[str, list[CurveMeta]] = {}
    for c in system.curves:
        if c.pair_id is not None:
            by_pair.setdefault(c.pair_id, []).append(c)
    for pid, members in sorted(by_pair.items()):
        vecs = [np.array(c.homology) for c in members if c.homology is not None]
        for v in vecs[1:]:
            if len(v) == len(vecs[0]) and not (
                np.array_equal(v, vecs[0]) or np.array_equal(v, -vecs[0])
            ):
                problems.append(f"pair: curves in pair {pid} are not homologous up to sign")
                break
    return problems


def require_valid(system: CurveSystem) -> None:
    problems = validate(system)
    if problems:
        raise InvalidCurveSystem("; ".join(problems))


def _graph_from_rows(system: CurveSystem) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(("a", i) for i in range(len(system.a_curves)))
    G.add_nodes_from(("b", j) for j in range(len(system.b_curves)))
    for i, row in enumerate(system.intersections):
        for j, x in enumerate(row):
            if x > 0:
                G.add_edge(("a", i), ("b", j), label=x)
    return G


def bipartite_graph(system: CurveSystem) -> nx.Graph:
    """Labeled bipartite intersection graph of a valid system.

    Nodes are ``("a", i)`` / ``("b", j)`` carrying the curve id; an edge
    exists iff the curves intersect, labeled by the intersection number.
    """
    require_valid(system)
    G = _graph_from_rows(system)
    for i, c in enumerate(system.a_curves):
        G.nodes["a", i]["id"] = c.id
    for j, c in enumerate(system.b_curves):
        G.nodes["b", j]["id"] = c.id
    return G


def matrix_from_graph(G: nx.Graph) -> np.ndarray:
    m = sum(1 for v in G if v[0] == "a")
    n = sum(1 for v in G if v[0] == "b")
    N = np.zeros((m, n), dtype=np.int64)
    for u, v, lab in G.edges(data="label"):
        (i, j) = (u[1], v[1]) if u[0] == "a" else (v[1], u[1])
        N[i, j] = lab
    return N


def gram_row_sums_from_graph(G: nx.Graph) -> list[int]:
    """Row sums of ``N N^T`` by summing label products over length-2 paths."""
    m = sum(1 for v in G if v[0] == "a")
    sums = []
    for i in range(m):
        total = 0
        for b, lab1 in G[("a", i)].items():
            for _, e in G[b].items():
                total += lab1["label"] * e["label"]
        sums.append(total)
    return sums


def symplectic_pairing(v: Sequence[int], w: Sequence[int]) -> int:
    """Algebraic intersection in the basis ``(a_1..a_g, b_1..b_g)`` with a_i.b_i = 1."""
    g = len(v) // 2
    return sum(v[i] * w[g + i] - v[g + i] * w[i] for i in range(g))


def algebraic_consistency(system: CurveSystem) -> list[str]:
    """Necessary conditions linking homology data to intersection numbers.

    Curves within one multicurve are disjoint, so their algebraic
    intersection vanishes; across multicurves the algebraic count is bounded
    by, and congruent mod 2 to, the geometric one.
    """
    problems = []
    for group in (system.a_curves, system.b_curves):
        for x in range(len(group)):
            for y in range(x + 1, len(group)):
                u, v = group[x].homology, group[y].homology
                if u is not None and v is not None and symplectic_pairing(u, v) != 0:
                    problems.append(f"disjoint: {group[x].id} and {group[y].id} pair nontrivially")
    for i, a in enumerate(system.a_curves):
        for j, b in enumerate(system.b_curves):
            if a.homology is None or b.homology is None:
                continue
            alg = symplectic_pairing(a.homology, b.homology)
            geo = system.intersections[i][j]
            if abs(alg) > geo or (geo - alg) % 2:
                problems.append(f"parity: {a.id}.{b.id} algebraic {alg} vs geometric {geo}")
    return problems
