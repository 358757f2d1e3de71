"""Twisted Bruhat orders, the pair posets ^JQ and Q_K, and the maps into glued groups.

For J a set of nodes every w factors as w = w_J * ^Jw with w_J in W_J and
^Jw in ^JW.  The twisted length is ^Jl(w) = l(^Jw) - l(w_J), and v ^J<= w
holds when some u in W_J has w_J <= v_J u^-1 and u * ^Jv <= ^Jw.

Since u * ^Jv is length-additive, the second condition forces
l(u) <= l(^Jw) - l(^Jv); only those u are enumerated.

>>> from tnnflag.cartan import builtin
>>> from tnnflag.weyl import from_word
>>> a2 = builtin("a2")
>>> t = TwistedContext(a2, {"1"})
>>> twisted_length(t, from_word(a2, ["1"]))
-1
>>> twisted_leq(t, from_word(a2, ["1"]), from_word(a2, []))
True
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from tnnflag.cartan import CartanData, extend_shriek, glue, EXTRA_NODE
from tnnflag.topo import GradedPoset
from tnnflag.weyl import (
    WeylElement,
    bruhat_leq,
    coset_decompose,
    enumerate_upto,
    from_word,
    is_min_left,
    is_min_right,
    simple_reflection,
    subword_products,
)


@dataclass(frozen=True)
class TwistedContext:
    ambient: CartanData
    J: frozenset

    def __post_init__(self):
        J = frozenset(str(j) for j in self.J)
        if not J <= set(self.ambient.nodes):
            raise ValueError(f"J = {sorted(J)} is not a set of nodes")
        object.__setattr__(self, "J", J)


@dataclass(frozen=True)
class CellPair:
    v: WeylElement
    w: WeylElement
    kind: str  # "twisted" or "projected"
    subset: frozenset

    def __post_init__(self):
        object.__setattr__(self, "subset", frozenset(str(j) for j in self.subset))
        if self.kind == "twisted":
            if not twisted_leq(TwistedContext(self.v.ctx, self.subset), self.v, self.w):
                raise ValueError("twisted pair needs v ^J<= w")
        elif self.kind == "projected":
            if not in_qk(self.subset, self.v, self.w):
                raise ValueError("projected pair needs v <= w with w in W^K")
        else:
            raise ValueError(f"unknown pair kind {self.kind!r}")


def word_text(w: WeylElement) -> str:
    return ".".join(w.word) or "e"


def pair_id(v: WeylElement, w: WeylElement) -> str:
    return word_text(v) + "|" + word_text(w)


@lru_cache(maxsize=None)
def _decompose(w: WeylElement, J: frozenset) -> tuple[WeylElement, WeylElement]:
    return coset_decompose(w, J)


def decompose(tctx: TwistedContext, w: WeylElement) -> tuple[WeylElement, WeylElement]:
    return _decompose(w, tctx.J)


def twisted_length(tctx: TwistedContext, w: WeylElement) -> int:
    wj, jw = decompose(tctx, w)
    return jw.length - wj.length


def twisted_leq(tctx: TwistedContext, v: WeylElement, w: WeylElement) -> bool:
    return _twisted_leq(v, w, tctx.J)


@lru_cache(maxsize=None)
def _twisted_leq(v: WeylElement, w: WeylElement, J: frozenset) -> bool:
    vj, jv = _decompose(v, J)
    wj, jw = _decompose(w, J)
    room = jw.length - jv.length
    if room < 0:
        return False
    for u in enumerate_upto(v.ctx, room, gens=J):
        if bruhat_leq(u * jv, jw) and bruhat_leq(wj, vj * u.inverse()):
            return True
    return False


def twisted_interval(tctx: TwistedContext, v: WeylElement, w: WeylElement) -> list[WeylElement]:
    """{x : v ^J<= x ^J<= w}, sorted by (twisted length, word)."""
    if not twisted_leq(tctx, v, w):
        raise ValueError(f"{v} is not ^J-below {w}")
    return list(_twisted_interval(v, w, tctx.J))


@lru_cache(maxsize=None)
def _twisted_interval(v, w, J):
    tctx = TwistedContext(v.ctx, J)
    vj, jv = _decompose(v, J)
    wj, jw = _decompose(w, J)
    tails = [b for b in subword_products(jw) if is_min_left(b, J)]
    heads = enumerate_upto(v.ctx, vj.length + jw.length - jv.length, gens=J)
    found = set()
    for b in tails:
        for a in heads:
            x = a * b
            if x not in found and twisted_leq(tctx, v, x) and twisted_leq(tctx, x, w):
                found.add(x)
    return tuple(sorted(found, key=lambda x: (twisted_length(tctx, x), x.words_key())))


def _pair_poset(elements, leq, rank_of, pairs_leq, bottom: bool) -> GradedPoset:
    """Poset on comparable pairs (a, b) ordered by a <= a' <= b' <= b."""
    pairs = [(a, b) for a in elements for b in elements if leq(a, b)]
    ids = [pair_id(a, b) for a, b in pairs]
    lookup = dict(zip(ids, pairs))
    ranks = {i: rank_of(b) - rank_of(a) for i, (a, b) in zip(ids, pairs)}
    labels = {i: {"v": list(a.word), "w": list(b.word)} for i, (a, b) in zip(ids, pairs)}
    p = GradedPoset.from_relation(ids, ranks, lambda x, y: pairs_leq(lookup[x], lookup[y]), labels)
    return p.with_bottom() if bottom else p


def build_jq_poset(tctx: TwistedContext, v: WeylElement, w: WeylElement, bottom: bool = False) -> GradedPoset:
    """Pairs (v', w') with v ^J<= v' ^J<= w' ^J<= w, ordered by containment of intervals."""
    elements = twisted_interval(tctx, v, w)

    def leq(a, b):
        return twisted_leq(tctx, a, b)

    return _pair_poset(elements, leq, lambda x: twisted_length(tctx, x),
                       lambda small, big: leq(big[0], small[0]) and leq(small[1], big[1]), bottom)


def in_qk(K, v: WeylElement, w: WeylElement) -> bool:
    return is_min_right(w, K) and bruhat_leq(v, w)


def qk_leq(K, small: tuple, big: tuple) -> bool:
    """(v', w') below (v, w): some u in W_K has v <= v'u <= w'u <= w."""
    return _qk_leq(frozenset(str(k) for k in K), small[0], small[1], big[0], big[1])


@lru_cache(maxsize=None)
def _qk_leq(K, v1, w1, v, w) -> bool:
    room = w.length - w1.length
    if room < 0:
        return False
    for u in enumerate_upto(v.ctx, room, gens=K):
        a, b = v1 * u, w1 * u
        if bruhat_leq(v, a) and bruhat_leq(a, b) and bruhat_leq(b, w):
            return True
    return False


def build_qk_poset(K, v: WeylElement, w: WeylElement, bottom: bool = False) -> GradedPoset:
    K = frozenset(str(k) for k in K)
    if not in_qk(K, v, w):
        raise ValueError(f"({v}, {w}) is not in Q_K")
    cands = []
    for w1 in subword_products(w):
        if not is_min_right(w1, K):
            continue
        for v1 in subword_products(w1):
            if bruhat_leq(v1, w1) and qk_leq(K, (v1, w1), (v, w)):
                cands.append((v1, w1))
    cands.sort(key=lambda p: (p[1].length - p[0].length, p[0].words_key(), p[1].words_key()))
    ids = [pair_id(a, b) for a, b in cands]
    lookup = dict(zip(ids, cands))
    ranks = {i: b.length - a.length for i, (a, b) in zip(ids, cands)}
    labels = {i: {"v": list(a.word), "w": list(b.word)} for i, (a, b) in zip(ids, cands)}
    p = GradedPoset.from_relation(ids, ranks, lambda x, y: qk_leq(K, lookup[x], lookup[y]), labels)
    return p.with_bottom() if bottom else p


def map_word(ctx: CartanData, word, label_map: dict) -> WeylElement:
    return from_word(ctx, [label_map[x] for x in word])


@dataclass(frozen=True)
class GluedGroup:
    base: CartanData
    K: frozenset
    data: CartanData
    flat: dict
    sharp: dict

    @classmethod
    def build(cls, base: CartanData, K) -> "GluedGroup":
        K = frozenset(str(k) for k in K)
        data, flat, sharp = glue(base, K)
        return cls(base, K, data, flat, sharp)

    def __hash__(self):
        return hash((self.base, self.K))

    def flat_of(self, x: WeylElement) -> WeylElement:
        return map_word(self.data, x.word, self.flat)

    def sharp_of(self, x: WeylElement) -> WeylElement:
        return map_word(self.data, x.word, self.sharp)

    def flat_nodes(self) -> frozenset:
        return frozenset(self.flat.values())


def tilde_nu(K, v: WeylElement, w: WeylElement, glued: GluedGroup) -> WeylElement:
    """nu(v, w) = v^flat (w^-1)^sharp in the group glued along K.

    With this orientation the flat factor is the W_J part and the sharp
    factor the ^JW part for J the flat nodes, so twisted lengths of images
    equal the dimensions l(w) - l(v) up to a common shift.
    """
    if not in_qk(K, v, w):
        raise ValueError(f"({v}, {w}) is not in Q_K")
    return glued.flat_of(v) * glued.sharp_of(w.inverse())


def tilde_nu_transposed(v: WeylElement, w: WeylElement, glued: GluedGroup) -> WeylElement:
    """The alternative orientation w^flat (v^-1)^sharp, kept for comparison."""
    return glued.flat_of(w) * glued.sharp_of(v.inverse())


@dataclass(frozen=True)
class SpadeImage:
    image: WeylElement
    left_part: WeylElement
    right_part: WeylElement
    identity_holds: bool
    right_part_minimal: bool


@lru_cache(maxsize=None)
def spade_group(base: CartanData, J: frozenset) -> GluedGroup:
    return GluedGroup.build(extend_shriek(base), J)


def spadesuit_map(J, v: WeylElement, x: WeylElement) -> SpadeImage:
    """v^sharp (s_0 x)^sharp in the extended glued group, with its coset factorization.

    The factorization v_J^flat * (^Jv s_0 x)^sharp is computed independently
    and compared with the product; right_part_minimal records that the sharp
    factor has no left descent among the flat nodes.
    """
    J = frozenset(str(j) for j in J)
    g = spade_group(v.ctx, J)
    big = g.data
    s0 = simple_reflection(big, g.sharp[EXTRA_NODE])
    image = g.sharp_of(v) * s0 * g.sharp_of(x)
    vj, jv = coset_decompose(v, J)
    ext = g.base
    tail = from_word(ext, list(jv.word) + [EXTRA_NODE] + list(x.word))
    left = g.flat_of(vj)
    right = g.sharp_of(tail)
    minimal = is_min_left(right, g.flat_nodes())
    return SpadeImage(image, left, right, image == left * right, minimal)


def qk_elements(K, elements, max_rank: int) -> list[tuple[WeylElement, WeylElement]]:
    """All (v, w) in Q_K with v, w drawn from elements and l(w) - l(v) <= max_rank."""
    K = frozenset(str(k) for k in K)
    out = [(v, w) for w in elements if is_min_right(w, K)
           for v in elements if w.length - v.length <= max_rank and bruhat_leq(v, w)]
    out.sort(key=lambda p: (p[1].length - p[0].length, p[0].words_key(), p[1].words_key()))
    return out


def check_nu_order(K, pairs, glued: GluedGroup | None = None) -> dict:
    """Compare the Q_K order on pairs with the twisted order on their nu-images.

    Every pair of elements is checked in both directions, which covers every
    Q_K interval whose elements all lie in pairs.  The glued group may be
    supplied (possibly altered) to test sensitivity.
    """
    K = frozenset(str(k) for k in K)
    if not pairs:
        return {"checks": 0, "failures": [], "ok": True}
    g = glued or GluedGroup.build(pairs[0][0].ctx, K)
    tctx = TwistedContext(g.data, g.flat_nodes())
    images = [g.flat_of(v) * g.sharp_of(w.inverse()) for v, w in pairs]
    failures = []
    if len(set(images)) != len(images):
        failures.append({"kind": "not injective"})
    checks = 0
    for a, pa in enumerate(pairs):
        for b, pb in enumerate(pairs):
            checks += 1
            lhs = qk_leq(K, pa, pb)
            rhs = twisted_leq(tctx, images[a], images[b])
            if lhs != rhs:
                failures.append({"kind": "order mismatch", "small": pair_id(*pa), "big": pair_id(*pb),
                                 "qk": lhs, "twisted": rhs})
    return {"checks": checks, "failures": failures, "ok": not failures}


def check_spade(base: CartanData, J, max_v: int = 4, max_x: int = 2) -> dict:
    """The coset identity and minimality of the sharp factor for all short v and x."""
    J = frozenset(str(j) for j in J)
    failures = []
    checks = 0
    for v in enumerate_upto(base, max_v):
        for x in enumerate_upto(base, max_x):
            checks += 1
            img = spadesuit_map(J, v, x)
            if not (img.identity_holds and img.right_part_minimal):
                failures.append({"v": list(v.word), "x": list(x.word),
                                 "identity": img.identity_holds, "minimal": img.right_part_minimal})
    return {"checks": checks, "failures": failures, "ok": not failures}
