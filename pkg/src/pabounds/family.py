"""Generation of the multicurve families and their twist words.

Most genera are assembled from two marked pieces: ``P`` (genus three, with
subscripted curves and arcs that can be switched off) and ``Q`` (genus one,
crossed by one alpha strand and one beta strand).  Pieces are glued end to
end; arcs meeting across an interface merge into closed curves.  Genera
2, 4, 5 and 8, the genus-two variant ``f2'`` and the two genus-two examples
used for fixed-space dimensions 3 and 1 are loaded from JSON fixtures.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional, Sequence

import networkx as nx

from .curves import CurveMeta, CurveSystem, InvalidCurveSystem, require_valid

FIXTURE_ENV = "PABOUNDS_FIXTURES"
FIXTURE_GENERA = (2, 4, 5, 8)


class IncompatibleAssembly(ValueError):
    def __init__(self, index: int, message: str):
        super().__init__(f"piece {index}: {message}")
        self.index = index


def fixture_dir() -> Path:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


def load_fixture(name: str) -> dict:
    path = fixture_dir() / f"{name}.json"
    if not path.exists():
        raise FileNotFoundError(f"unknown fixture {name!r} (looked in {path.parent})")
    return json.loads(path.read_text())


# twist words --------------------------------------------------------------


@dataclass(frozen=True)
class TwistWord:
    """Product of Dehn twists, written left to right as in ``T_A T_B^{-1}``.

    The rightmost letter acts first.
    """

    letters: tuple[tuple[str, int], ...]

    def __post_init__(self):
        letters = tuple((str(c), int(s)) for c, s in self.letters)
        for _, s in letters:
            if s not in (1, -1):
                raise ValueError(f"twist sign must be +1 or -1, got {s}")
        object.__setattr__(self, "letters", letters)

    def check_against(self, system: CurveSystem) -> None:
        ids = {c.id for c in system.curves}
        missing = [c for c, _ in self.letters if c not in ids]
        if missing:
            raise InvalidCurveSystem(f"twist word names unknown curves: {missing}")

    def without(self, curve_id: str) -> "TwistWord":
        return TwistWord(tuple(l for l in self.letters if l[0] != curve_id))

    def to_json(self) -> list:
        return [[c, s] for c, s in self.letters]

    @classmethod
    def from_json(cls, data: Iterable) -> "TwistWord":
        return cls(tuple((c, s) for c, s in data))


def multitwist_word(system: CurveSystem, b_sign: int = -1) -> TwistWord:
    """``T_A T_B^{b_sign}`` with every A twist positive."""
    letters = [(c.id, 1) for c in system.a_curves]
    letters += [(c.id, b_sign) for c in system.b_curves]
    return TwistWord(tuple(letters))


# pieces -------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """A marked piece: ``P`` restricted to the subscripts in ``subset``, ``Q`` or ``E``."""

    kind: str
    subset: frozenset = frozenset()

    @classmethod
    def P(cls, *labels: str) -> "Piece":
        bad = set(labels) - {"l", "m", "r"}
        if bad:
            raise ValueError(f"unknown P subscripts {sorted(bad)}")
        return cls("P", frozenset(labels))

    @classmethod
    def Q(cls) -> "Piece":
        return cls("Q")

    @classmethod
    def E(cls) -> "Piece":
        """Genus-one end cap with a separating alpha-curve."""
        return cls("E")

    def __str__(self) -> str:
        if self.kind in ("Q", "E"):
            return self.kind
        order = [s for s in "lmr" if s in self.subset]
        return "P(" + ",".join(order) + ")"

    @property
    def table(self) -> dict:
        return _piece_tables()[self.kind]

    @property
    def genus(self) -> int:
        return self.table["genus"]

    def _keep(self, item: dict) -> bool:
        tag = item.get("tag")
        return tag is None or tag in self.subset

    def curves(self) -> list[dict]:
        return [c for c in self.table["curves"] if self._keep(c)]

    def arcs(self) -> list[dict]:
        return [a for a in self.table["arcs"] if self._keep(a)]

    def edges(self) -> list[tuple[str, str, int]]:
        present = {c["id"] for c in self.curves()} | {a["id"] for a in self.arcs()}
        return [(u, v, n) for u, v, n in self.table["edges"] if u in present and v in present]

    def stubs(self, side: str) -> list[dict]:
        arcs = [a for a in self.arcs() if a["side"] in (side, "through")]
        return sorted(arcs, key=lambda a: a["kind"])


@lru_cache(maxsize=None)
def _piece_tables() -> dict:
    return load_fixture("pieces")["pieces"]


def parse_assembly(text: str) -> list[Piece]:
    """Parse strings like ``"P(r) + Q + 2*P(l,r) + P(l)"``."""
    pieces: list[Piece] = []
    for term in text.replace(" ", "").split("+"):
        count = 1
        if "*" in term:
            c, term = term.split("*", 1)
            count = int(c)
        if term in ("Q", "E"):
            piece = Piece(term)
        elif term.startswith("P(") and term.endswith(")"):
            inner = term[2:-1]
            piece = Piece.P(*[s for s in inner.split(",") if s])
        else:
            raise ValueError(f"cannot parse piece {term!r}")
        pieces.extend([piece] * count)
    return pieces


def assembly_genus(pieces: Sequence[Piece]) -> int:
    return sum(p.genus for p in pieces)


def check_compatible(pieces: Sequence[Piece]) -> None:
    if not pieces:
        raise IncompatibleAssembly(0, "empty assembly")
    if pieces[0].stubs("left"):
        raise IncompatibleAssembly(0, f"{pieces[0]} has left arcs but starts the sum")
    if pieces[-1].stubs("right"):
        raise IncompatibleAssembly(len(pieces) - 1, f"{pieces[-1]} has right arcs but ends the sum")
    for i in range(len(pieces) - 1):
        right = [a["kind"] for a in pieces[i].stubs("right")]
        left = [a["kind"] for a in pieces[i + 1].stubs("left")]
        if right != left:
            raise IncompatibleAssembly(
                i + 1, f"{pieces[i]} followed by {pieces[i + 1]}: stubs {right} vs {left}"
            )


def glue(pieces: Sequence[Piece], name: str = "") -> CurveSystem:
    """Glue pieces end to end, cap both ends, and return the curve system."""
    pieces = list(pieces)
    check_compatible(pieces)
    genus = assembly_genus(pieces)

    handle_index: dict[tuple[int, str], int] = {}
    for p, piece in enumerate(pieces):
        for h in piece.table["handles"]:
            handle_index[(p, h)] = len(handle_index)

    # union-find over arc fragments; through-arcs are one fragment
    arcs = nx.Graph()
    for p, piece in enumerate(pieces):
        for a in piece.arcs():
            arcs.add_node((p, a["id"]), kind=a["kind"], homology=a["homology"])
    for p in range(len(pieces) - 1):
        for x, y in zip(pieces[p].stubs("right"), pieces[p + 1].stubs("left")):
            arcs.add_edge((p, x["id"]), (p + 1, y["id"]))

    owner: dict[tuple[int, str], str] = {}
    records: list[dict] = []  # id, kind, pair, homology terms, order key

    for p, piece in enumerate(pieces):
        for c in piece.curves():
            cid = f"{p}.{c['id']}"
            owner[(p, c["id"])] = cid
            records.append(
                {
                    "id": cid,
                    "kind": c["kind"],
                    "pair": None if c["pair"] is None else f"{p}.{c['pair']}",
                    "separating": bool(c.get("separating", False)),
                    "terms": [(p, h) for h in c["homology"]],
                    "order": (p, 0),
                }
            )
    for comp in nx.connected_components(arcs):
        comp = sorted(comp)
        kind = arcs.nodes[comp[0]]["kind"]
        first = comp[0][0]
        cid = f"J{first}{kind}"
        for node in comp:
            owner[node] = cid
        terms = [(p, h) for (p, aid) in comp for h in arcs.nodes[(p, aid)]["homology"]]
        records.append(
            {
                "id": cid,
                "kind": kind,
                "pair": f"J{first}",
                "separating": False,
                "terms": terms,
                "order": (first, 1),
            }
        )
    records.sort(key=lambda r: (r["order"], r["id"]))

    def vector(terms) -> tuple[int, ...]:
        v = [0] * (2 * genus)
        for t in terms:
            v[handle_index[t]] += 1
        return tuple(v)

    a_recs = [r for r in records if r["kind"] == "a"]
    b_recs = [r for r in records if r["kind"] == "b"]
    a_pos = {r["id"]: i for i, r in enumerate(a_recs)}
    b_pos = {r["id"]: j for j, r in enumerate(b_recs)}
    N = [[0] * len(b_recs) for _ in a_recs]
    for p, piece in enumerate(pieces):
        for u, v, n in piece.edges():
            cu, cv = owner[(p, u)], owner[(p, v)]
            if cu in a_pos and cv in b_pos:
                N[a_pos[cu]][b_pos[cv]] += n
            elif cv in a_pos and cu in b_pos:
                N[a_pos[cv]][b_pos[cu]] += n
            else:
                raise IncompatibleAssembly(p, f"edge {u}-{v} joins two curves of one multicurve")

    def meta(r) -> CurveMeta:
        return CurveMeta(
            id=r["id"], separating=r["separating"], homology=vector(r["terms"]), pair_id=r["pair"]
        )

    first_h = handle_index[(0, pieces[0].table["handles"][0])]
    last_h = handle_index[(len(pieces) - 1, pieces[-1].table["handles"][-1])]
    deltas = []
    for h in (first_h, last_h):
        d = [0] * (2 * genus)
        d[genus + h] = 1
        deltas.append(tuple(d))

    return CurveSystem(
        genus=genus,
        a_curves=[meta(r) for r in a_recs],
        b_curves=[meta(r) for r in b_recs],
        intersections=N,
        filling=True,
        deltas=deltas,
        name=name or " + ".join(str(p) for p in pieces),
    )


def sum_pieces(pieces: Sequence[Piece]) -> CurveSystem:
    return glue(pieces)


# families -----------------------------------------------------------------


def family_assembly(g: int) -> Optional[list[Piece]]:
    """Piece sum for ``g``, or ``None`` when the genus comes from a fixture.

    The three residue classes use ``k >= 2`` for ``g = 3k`` and ``3k + 1``
    and ``k >= 3`` for ``g = 3k + 2``; the last sum contains two ``Q``
    pieces and has genus ``3k + 2`` by piece bookkeeping.
    """
    if g < 2:
        raise ValueError(f"genus must be at least 2, got {g}")
    if g in FIXTURE_GENERA:
        return None
    if g == 3:
        return [Piece.P("m")]
    k, rem = divmod(g, 3)
    middle = [Piece.P("l", "r")] * (k - 2)
    if rem == 0:
        return [Piece.P("m", "r")] + middle + [Piece.P("l")]
    if rem == 1:
        return [Piece.P("r"), Piece.Q()] + middle + [Piece.P("l")]
    return [Piece.P("r"), Piece.Q()] + middle + [Piece.Q(), Piece.P("l")]


def load_system(name: str) -> tuple[CurveSystem, TwistWord]:
    data = load_fixture(name)
    system = CurveSystem.from_json(data["system"])
    word = TwistWord.from_json(data["word"])
    word.check_against(system)
    return system, word


@lru_cache(maxsize=None)
def build_family(g: int) -> tuple[CurveSystem, TwistWord]:
    """``(A_g u B_g, f_g)``; ``f_g = T_A T_B^{-1}`` except ``f_2 = T_A T_B``."""
    pieces = family_assembly(g)
    if pieces is None:
        system, word = load_system(f"genus{g}")
    else:
        system = glue(pieces, name=f"genus {g}: " + " + ".join(str(p) for p in pieces))
        word = multitwist_word(system, b_sign=-1)
    if system.genus != g:
        raise InvalidCurveSystem(f"assembly for g={g} has genus {system.genus}")
    require_valid(system)
    return system, word


def build_f2prime() -> tuple[CurveSystem, TwistWord]:
    return load_system("f2prime")


def build_k3_k1_examples() -> tuple[tuple[CurveSystem, TwistWord], tuple[CurveSystem, TwistWord]]:
    return load_system("kappa3"), load_system("kappa1")


def build_odd_variant(k: int) -> tuple[CurveSystem, TwistWord]:
    """Family for ``g0 = (k+1)/2`` with one nonseparating curve dropped.

    The dropped curve is the last beta-curve whose class pairs trivially with
    the first auxiliary class ``delta_0`` and whose removal keeps the
    intersection graph connected.
    """
    if k % 2 == 0 or k < 5:
        raise ValueError(f"odd variant needs odd k >= 5, got {k}")
    g0 = (k + 1) // 2
    system, word = build_family(g0)
    from .curves import symplectic_pairing, validate

    delta0 = system.deltas[0] if system.deltas else None
    for j in reversed(range(len(system.b_curves))):
        c = system.b_curves[j]
        if c.separating or c.homology is None or not any(c.homology):
            continue
        if delta0 is not None and symplectic_pairing(delta0, c.homology) != 0:
            continue
        reduced = CurveSystem(
            genus=system.genus,
            a_curves=system.a_curves,
            b_curves=system.b_curves[:j] + system.b_curves[j + 1 :],
            intersections=[row[:j] + row[j + 1 :] for row in system.intersections],
            filling=system.filling,
            deltas=system.deltas,
            name=f"{system.name} minus {c.id}",
        )
        if not validate(reduced):
            return reduced, word.without(c.id)
    raise InvalidCurveSystem(f"no removable curve for g0={g0}")
