"""Finite ranked posets and the checks run on cell closure posets.

The order is stored as a cover relation; the transitive closure is kept as
integer bitmasks so interval queries stay cheap for a few hundred elements.

>>> p = GradedPoset.from_relation(["a", "b", "c", "d"], {"a": 0, "b": 1, "c": 1, "d": 2},
...                               lambda x, y: x == y or x == "a" or y == "d")
>>> is_graded(p), is_thin(p), is_eulerian(p)
(True, True, True)
"""

from __future__ import annotations

import json
from itertools import combinations


class GradedPoset:
    def __init__(self, ids, ranks: dict, covers, labels: dict | None = None):
        self.ids = [str(x) for x in ids]
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate element ids")
        self.index = {x: k for k, x in enumerate(self.ids)}
        self.rank = {str(k): int(v) for k, v in ranks.items()}
        if set(self.rank) != set(self.ids):
            raise ValueError("every element needs a rank")
        self.covers = sorted({(str(a), str(b)) for a, b in covers})
        for a, b in self.covers:
            if a not in self.index or b not in self.index:
                raise ValueError(f"cover ({a},{b}) mentions an unknown element")
            if a == b:
                raise ValueError(f"cover ({a},{b}) is a loop")
        self.labels = labels or {}
        self._closure()

    def _closure(self):
        n = len(self.ids)
        up = [[] for _ in range(n)]
        indeg = [0] * n
        for a, b in self.covers:
            up[self.index[a]].append(self.index[b])
            indeg[self.index[b]] += 1
        order = [k for k in range(n) if indeg[k] == 0]
        head = 0
        while head < len(order):
            k = order[head]
            head += 1
            for m in up[k]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    order.append(m)
        if len(order) != n:
            raise ValueError("cover relation has a cycle")
        self._topo = order
        self._up = up
        self._down = [[] for _ in range(n)]
        for k in range(n):
            for m in up[k]:
                self._down[m].append(k)
        below = [0] * n
        for k in order:
            mask = 1 << k
            for m in self._down[k]:
                mask |= below[m]
            below[k] = mask
        self._below = below
        above = [0] * n
        for k in reversed(order):
            mask = 1 << k
            for m in up[k]:
                mask |= above[m]
            above[k] = mask
        self._above = above

    @classmethod
    def from_relation(cls, ids, ranks: dict, leq, labels=None) -> "GradedPoset":
        """Build from a comparison function by transitive reduction."""
        ids = [str(x) for x in ids]
        n = len(ids)
        strict_up = [0] * n
        for a in range(n):
            for b in range(n):
                if a != b and leq(ids[a], ids[b]):
                    strict_up[a] |= 1 << b
        covers = []
        for a in range(n):
            shadow = 0
            mask = strict_up[a]
            while mask:
                low = mask & -mask
                shadow |= strict_up[low.bit_length() - 1]
                mask ^= low
            mask = strict_up[a] & ~shadow
            while mask:
                low = mask & -mask
                covers.append((ids[a], ids[low.bit_length() - 1]))
                mask ^= low
        return cls(ids, ranks, covers, labels)

    def __len__(self) -> int:
        return len(self.ids)

    def leq(self, x, y) -> bool:
        return bool(self._below[self.index[str(y)]] >> self.index[str(x)] & 1)

    def _members(self, mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def interval(self, x, y) -> list[str]:
        mask = self._above[self.index[str(x)]] & self._below[self.index[str(y)]]
        return [self.ids[k] for k in self._members(mask)]

    def down_set(self, y) -> list[str]:
        return [self.ids[k] for k in self._members(self._below[self.index[str(y)]])]

    def minimal(self) -> list[str]:
        return [self.ids[k] for k in range(len(self.ids)) if not self._down[k]]

    def maximal(self) -> list[str]:
        return [self.ids[k] for k in range(len(self.ids)) if not self._up[k]]

    def bottom(self):
        m = self.minimal()
        return m[0] if len(m) == 1 else None

    def top(self):
        m = self.maximal()
        return m[0] if len(m) == 1 else None

    def sub(self, keep) -> "GradedPoset":
        """Induced subposet (covers recomputed from the order)."""
        keep = [x for x in self.ids if x in set(keep)]
        return GradedPoset.from_relation(keep, {x: self.rank[x] for x in keep}, self.leq,
                                         {x: self.labels[x] for x in keep if x in self.labels})

    def with_bottom(self, bid: str = "0hat") -> "GradedPoset":
        r = min(self.rank.values(), default=0) - 1
        covers = list(self.covers) + [(bid, m) for m in self.minimal()]
        return GradedPoset([bid] + self.ids, {bid: r, **self.rank}, covers, dict(self.labels))

    def with_top(self, tid: str = "1hat") -> "GradedPoset":
        r = max(self.rank.values(), default=0) + 1
        covers = list(self.covers) + [(m, tid) for m in self.maximal()]
        return GradedPoset(self.ids + [tid], {**self.rank, tid: r}, covers, dict(self.labels))

    def sorted_ids(self) -> list[str]:
        return sorted(self.ids, key=lambda x: (self.rank[x], x))

    def rank_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for x in self.ids:
            out[self.rank[x]] = out.get(self.rank[x], 0) + 1
        return dict(sorted(out.items()))


def _chain_lengths(p: GradedPoset, k: int) -> tuple[dict, dict]:
    """Shortest and longest saturated chain lengths from element k upwards."""
    lo, hi = {k: 0}, {k: 0}
    for m in p._topo:
        if m not in lo:
            continue
        for t in p._up[m]:
            lo[t] = min(lo.get(t, lo[m] + 1), lo[m] + 1)
            hi[t] = max(hi.get(t, hi[m] + 1), hi[m] + 1)
    return lo, hi


def is_graded(p: GradedPoset) -> bool:
    """Every closed interval has all maximal chains of one length, matching the rank difference."""
    for a, b in p.covers:
        if p.rank[b] != p.rank[a] + 1:
            return False
    for k in range(len(p.ids)):
        lo, hi = _chain_lengths(p, k)
        if lo != hi:
            return False
    return True


def is_thin(p: GradedPoset) -> bool:
    """Every closed interval of rank difference two has exactly four elements."""
    for k, x in enumerate(p.ids):
        for m in p._members(p._above[k]):
            y = p.ids[m]
            if p.rank[y] - p.rank[x] == 2 and len(p.interval(x, y)) != 4:
                return False
    return True


def mobius(p: GradedPoset, x, y, _memo=None) -> int:
    x, y = str(x), str(y)
    if not p.leq(x, y):
        raise ValueError(f"{x} and {y} are not comparable as x <= y")
    memo = {} if _memo is None else _memo
    return _mobius(p, x, y, memo)


def _mobius(p, x, y, memo) -> int:
    if (x, y) in memo:
        return memo[(x, y)]
    if x == y:
        val = 1
    else:
        val = -sum(_mobius(p, x, z, memo) for z in p.interval(x, y) if z != y)
    memo[(x, y)] = val
    return val


def mobius_row(p: GradedPoset, x) -> dict[str, int]:
    """mu(x, y) for all y >= x, by one sweep in a linear extension."""
    k = p.index[str(x)]
    up = p._above[k]
    mu: dict[int, int] = {}
    for m in p._topo:
        if not up >> m & 1:
            continue
        if m == k:
            mu[m] = 1
            continue
        between = up & p._below[m] & ~(1 << m)
        mu[m] = -sum(mu[t] for t in p._members(between))
    return {p.ids[m]: v for m, v in mu.items()}


def is_eulerian(p: GradedPoset, require_bounds: bool = True) -> bool:
    """mu(x, y) = (-1)^(rank y - rank x) on every interval.

    With require_bounds the poset must have a unique minimum and maximum.
    """
    if require_bounds and (p.bottom() is None or p.top() is None):
        raise ValueError("an Eulerian check needs a unique minimum and maximum")
    for x in p.ids:
        for y, val in mobius_row(p, x).items():
            if val != (-1) ** (p.rank[y] - p.rank[x]):
                return False
    return True


def euler_sum(p: GradedPoset, ids=None) -> int:
    ids = p.ids if ids is None else ids
    return sum((-1) ** p.rank[x] for x in ids)


def ball_euler_check(face_poset: GradedPoset, top_dim: int) -> dict:
    """Alternating cell counts of a cell complex and of its boundary.

    The boundary is every cell of dimension below top_dim.  A closed ball of
    dimension d has sum 1 and boundary sum 1 + (-1)^(d-1); a d-sphere has
    sum 1 + (-1)^d.
    """
    total = euler_sum(face_poset)
    boundary = [x for x in face_poset.ids if face_poset.rank[x] < top_dim]
    bsum = euler_sum(face_poset, boundary)
    sphere_target = 1 + (-1) ** (top_dim - 1)
    return {
        "cells": len(face_poset),
        "euler_sum": total,
        "boundary_cells": len(boundary),
        "boundary_sum": bsum,
        "ball_ok": total == 1,
        "boundary_sphere_ok": bsum == sphere_target,
        "sphere_ok": total == 1 + (-1) ** top_dim,
        "ok": total == 1 and bsum == sphere_target,
    }


def face_poset_checks(faces: GradedPoset) -> dict:
    """Checks on the face poset of a closed cell: the poset with a bottom adjoined
    must be graded, thin and Eulerian, the Euler sums must be those of a ball
    with sphere boundary, and the boundary must be everything but the top cell.
    """
    if not faces.ids:
        raise ValueError("empty face poset")
    d = max(faces.rank.values())
    hat = faces.with_bottom()
    euler = ball_euler_check(faces, d)
    top = faces.top()
    boundary = {x for x in faces.ids if faces.rank[x] < d}
    checks = {
        "graded": is_graded(hat),
        "thin": is_thin(hat),
        "eulerian": is_eulerian(hat, require_bounds=False),
        "ball": euler["ball_ok"],
        "boundary_sphere": euler["boundary_sphere_ok"],
        "boundary_is_all_but_top": top is not None and boundary == set(faces.ids) - {top},
    }
    return {"checks": checks, "dim": d, "cells": euler["cells"], "euler_sum": euler["euler_sum"],
            "boundary_sum": euler["boundary_sum"], "ok": all(checks.values())}


def maximal_chains(p: GradedPoset) -> list[tuple[str, ...]]:
    out = []

    def walk(k, acc):
        if not p._up[k]:
            out.append(tuple(p.ids[t] for t in acc))
            return
        for m in sorted(p._up[k], key=lambda t: p.ids[t]):
            walk(m, acc + [m])

    for k in sorted(range(len(p.ids)), key=lambda t: p.ids[t]):
        if not p._down[k]:
            walk(k, [k])
    return out


def brute_shelling(p: GradedPoset, facet_limit: int = 8):
    """Search for a shelling of the order complex of p.

    Facets are the maximal chains.  Returns a list of facets in shelling
    order, None when no shelling exists, or "skipped" when there are more
    than facet_limit facets.
    """
    facets = [frozenset(c) for c in maximal_chains(p)]
    if len({len(f) for f in facets}) > 1:
        raise ValueError("poset is not pure: maximal chains differ in length")
    if len(facets) > facet_limit:
        return "skipped"
    if not facets:
        return []
    d = len(facets[0])

    def ok(prev, f):
        inters = [f & g for g in prev]
        codim1 = [s for s in inters if len(s) == d - 1]
        return all(any(s <= c for c in codim1) for s in inters)

    def search(order, rest):
        if not rest:
            return order
        for f in sorted(rest, key=sorted):
            if not order or ok(order, f):
                found = search(order + [f], rest - {f})
                if found is not None:
                    return found
        return None

    found = search([], frozenset(facets))
    if found is None:
        return None
    return [tuple(sorted(f, key=lambda x: (p.rank[x], x))) for f in found]


def export_json(p: GradedPoset) -> str:
    elements = []
    for x in p.sorted_ids():
        item = {"id": x}
        item.update(p.labels.get(x, {}))
        item["rank"] = p.rank[x]
        elements.append(item)
    key = {x: (p.rank[x], x) for x in p.ids}
    covers = sorted(p.covers, key=lambda c: (key[c[0]], key[c[1]]))
    return json.dumps({"elements": elements, "covers": [list(c) for c in covers]}, indent=1, sort_keys=False)


def load_json(text: str) -> GradedPoset:
    obj = json.loads(text)
    ids = [str(e["id"]) for e in obj["elements"]]
    ranks = {str(e["id"]): e["rank"] for e in obj["elements"]}
    labels = {str(e["id"]): {k: v for k, v in e.items() if k not in ("id", "rank")} for e in obj["elements"]}
    return GradedPoset(ids, ranks, [tuple(c) for c in obj["covers"]], labels)


def export_dot(p: GradedPoset) -> str:
    lines = ["digraph poset {", "  rankdir=BT;"]
    for x in p.sorted_ids():
        lines.append(f'  "{x}" [label="{x}\\nrank {p.rank[x]}"];')
    key = {x: (p.rank[x], x) for x in p.ids}
    for a, b in sorted(p.covers, key=lambda c: (key[c[0]], key[c[1]])):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def chain(n: int) -> GradedPoset:
    """The chain 0 < 1 < ... < n-1."""
    ids = [str(k) for k in range(n)]
    return GradedPoset(ids, {x: int(x) for x in ids}, [(str(k), str(k + 1)) for k in range(n - 1)])


def boolean_lattice(k: int) -> GradedPoset:
    subsets = [frozenset(c) for r in range(k + 1) for c in combinations(range(k), r)]
    name = {s: "{" + ",".join(map(str, sorted(s))) + "}" for s in subsets}
    covers = [(name[s], name[s | {i}]) for s in subsets for i in range(k) if i not in s]
    return GradedPoset([name[s] for s in subsets], {name[s]: len(s) for s in subsets}, covers)
