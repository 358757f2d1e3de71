"""Generalized Cartan matrices, validation, glueing and the one-node extension.

>>> a2 = builtin("a2")
>>> validate(a2)
[]
>>> glued, flat, sharp = glue(a2, ["2"])
>>> glued.nodes
('1♭', '2', '1♯')
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

FLAT = "♭"
SHARP = "♯"
EXTRA_NODE = "0"


@dataclass(frozen=True)
class CartanData:
    nodes: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(str(n) for n in self.nodes))
        object.__setattr__(self, "matrix", tuple(tuple(int(x) for x in row) for row in self.matrix))
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate node labels")
        if len(self.matrix) != len(self.nodes) or any(len(r) != len(self.nodes) for r in self.matrix):
            raise ValueError("matrix must be square with one row per node")

    @property
    def rank(self) -> int:
        return len(self.nodes)

    def index(self, node: str) -> int:
        try:
            return self.nodes.index(str(node))
        except ValueError:
            raise KeyError(f"unknown node {node!r}") from None

    def entry(self, i: str, j: str) -> int:
        return self.matrix[self.index(i)][self.index(j)]

    def to_json(self) -> dict:
        return {"nodes": list(self.nodes), "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, obj: dict) -> "CartanData":
        matrix = obj["matrix"]
        nodes = obj.get("nodes") or [str(k + 1) for k in range(len(matrix))]
        return cls(tuple(nodes), tuple(tuple(r) for r in matrix))


@dataclass(frozen=True)
class NodeTag:
    base: str
    copy: str  # "flat", "sharp" or "glued"

    def label(self) -> str:
        if self.copy == "glued":
            return self.base
        return self.base + (FLAT if self.copy == "flat" else SHARP)


def from_matrix(matrix, nodes=None) -> CartanData:
    if nodes is None:
        nodes = [str(k + 1) for k in range(len(matrix))]
    return CartanData(tuple(nodes), tuple(tuple(r) for r in matrix))


def type_a(n: int) -> CartanData:
    m = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    return from_matrix(m)


BUILTINS = {
    "a1": lambda: type_a(1),
    "a2": lambda: type_a(2),
    "a3": lambda: type_a(3),
    "a4": lambda: type_a(4),
    "affine_a1": lambda: from_matrix([[2, -2], [-2, 2]]),
    "hyperbolic_2_3": lambda: from_matrix([[2, -2], [-3, 2]]),
}


def builtin(name: str) -> CartanData:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin Cartan matrix {name!r}") from None


def load(source: str) -> CartanData:
    """A builtin name or a path to a JSON file."""
    if source in BUILTINS:
        return builtin(source)
    with open(source) as fh:
        return CartanData.from_json(json.load(fh))


def symmetrizer(data: CartanData) -> list[Fraction] | None:
    """Positive d with d_i a_ij = d_j a_ji, normalized to 1 on the first node of each component."""
    n = data.rank
    a = data.matrix
    d: list[Fraction | None] = [None] * n
    for root in range(n):
        if d[root] is not None:
            continue
        d[root] = Fraction(1)
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j == i or a[i][j] == 0 or a[j][i] == 0:
                    continue
                want = d[i] * a[i][j] / a[j][i]
                if d[j] is None:
                    if want <= 0:
                        return None
                    d[j] = want
                    stack.append(j)
                elif d[j] != want:
                    return None
    return d


def validate(data: CartanData) -> list[str]:
    """Every violated invariant as a message; an empty list means valid."""
    out = []
    n, a, lab = data.rank, data.matrix, data.nodes
    for i in range(n):
        if a[i][i] != 2:
            out.append(f"diagonal entry at ({lab[i]},{lab[i]}) is {a[i][i]}, not 2")
    for i in range(n):
        for j in range(n):
            if i != j and a[i][j] > 0:
                out.append(f"positive off-diagonal entry at ({lab[i]},{lab[j]})")
    for i in range(n):
        for j in range(i + 1, n):
            if (a[i][j] == 0) != (a[j][i] == 0):
                out.append(f"zero-symmetry broken at ({lab[i]},{lab[j]})")
    if not out and symmetrizer(data) is None:
        out.append("not symmetrizable")
    return out


def extend_shriek(data: CartanData) -> CartanData:
    """Append node 0 joined to every old node by entries -2."""
    if EXTRA_NODE in data.nodes:
        raise ValueError(f"node label {EXTRA_NODE!r} already in use")
    n = data.rank
    rows = [list(r) + [-2] for r in data.matrix]
    rows.append([-2] * n + [2])
    return CartanData(data.nodes + (EXTRA_NODE,), tuple(tuple(r) for r in rows))


def glue(data: CartanData, K) -> tuple[CartanData, dict[str, str], dict[str, str]]:
    """Two copies of the diagram identified along K.

    Returns the glued data with the flat and sharp label injections.
    Nodes are ordered as the flat copy (glued nodes in place) then the
    non-glued sharp nodes.
    """
    K = {str(k) for k in K}
    if not K <= set(data.nodes):
        raise ValueError(f"glueing set {sorted(K - set(data.nodes))} not among nodes")
    flat, sharp = {}, {}
    for i in data.nodes:
        if i in K:
            flat[i] = sharp[i] = NodeTag(i, "glued").label()
        else:
            flat[i] = NodeTag(i, "flat").label()
            sharp[i] = NodeTag(i, "sharp").label()
    nodes = [flat[i] for i in data.nodes] + [sharp[i] for i in data.nodes if i not in K]
    # each new node remembers its base node and which copies it belongs to
    origin = {}
    for i in data.nodes:
        origin[flat[i]] = (i, {"flat", "sharp"} if i in K else {"flat"})
        if i not in K:
            origin[sharp[i]] = (i, {"sharp"})
    m = []
    for p in nodes:
        bp, cp = origin[p]
        row = []
        for q in nodes:
            bq, cq = origin[q]
            row.append(data.entry(bp, bq) if cp & cq else 0)
        m.append(tuple(row))
    return CartanData(tuple(nodes), tuple(m)), flat, sharp
