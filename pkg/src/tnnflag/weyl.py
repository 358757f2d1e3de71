"""Weyl group elements of a generalized Cartan matrix.

An element is stored through its integer action on the root lattice in the
simple-root basis, together with the action of its inverse.  Column j of
the action matrix holds the image of the simple root alpha_j.  The simple
reflection is s_i(alpha_j) = alpha_j - a_ij alpha_i.

>>> from tnnflag.cartan import builtin
>>> a2 = builtin("a2")
>>> w = from_word(a2, ["1", "2", "1"])
>>> w.length, w.word
(3, ('1', '2', '1'))
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from operator import mul

from tnnflag.cartan import CartanData

Matrix = tuple[tuple[int, ...], ...]


def _mul(a: Matrix, b: Matrix) -> Matrix:
    cols = tuple(zip(*b))
    return tuple(tuple([sum(map(mul, row, col)) for col in cols]) for row in a)


@lru_cache(maxsize=None)
def _eye(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


# canonical words are shared between equal elements built independently
_WORDS: dict = {}


def _is_negative(vec) -> bool:
    return any(x < 0 for x in vec)


class WeylElement:
    __slots__ = ("ctx", "action", "inverse_action", "_word", "__weakref__")

    def __init__(self, ctx: CartanData, action: Matrix, inverse_action: Matrix):
        self.ctx = ctx
        self.action = action
        self.inverse_action = inverse_action
        self._word = None

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        if other.ctx != self.ctx:
            raise ValueError("elements belong to different Cartan data")
        return WeylElement(self.ctx, _mul(self.action, other.action),
                           _mul(other.inverse_action, self.inverse_action))

    def inverse(self) -> "WeylElement":
        return WeylElement(self.ctx, self.inverse_action, self.action)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElement) and self.action == other.action and self.ctx == other.ctx

    def __hash__(self) -> int:
        return hash(self.action)

    def __repr__(self) -> str:
        return "WeylElement(" + (".".join(self.word) or "e") + ")"

    def is_identity(self) -> bool:
        return self.action == _eye(self.ctx.rank)

    def image(self, j: int) -> tuple[int, ...]:
        """w(alpha_j) as a coordinate vector (j is a node index)."""
        return tuple(row[j] for row in self.action)

    def inverse_image(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.inverse_action)

    def has_left_descent(self, node: str) -> bool:
        return _is_negative(self.inverse_image(self.ctx.index(node)))

    def has_right_descent(self, node: str) -> bool:
        return _is_negative(self.image(self.ctx.index(node)))

    def _reduce(self):
        key = (self.ctx, self.action)
        if key in _WORDS:
            self._word = _WORDS[key]
            return
        # greedy left descents, smallest node index first
        letters = []
        cur = self
        nodes = self.ctx.nodes
        while not cur.is_identity():
            for k, node in enumerate(nodes):
                if _is_negative(cur.inverse_image(k)):
                    letters.append(node)
                    cur = simple_reflection(self.ctx, node) * cur
                    break
            else:
                raise RuntimeError("no descent found for a non-identity element")
        self._word = tuple(letters)
        _WORDS[key] = self._word

    @property
    def word(self) -> tuple[str, ...]:
        if self._word is None:
            self._reduce()
        return self._word

    @property
    def length(self) -> int:
        return len(self.word)

    def words_key(self) -> tuple[int, ...]:
        return tuple(self.ctx.index(x) for x in self.word)


@lru_cache(maxsize=None)
def identity(ctx: CartanData) -> WeylElement:
    e = _eye(ctx.rank)
    w = WeylElement(ctx, e, e)
    w._word = ()
    return w


@lru_cache(maxsize=None)
def simple_reflection(ctx: CartanData, node: str) -> WeylElement:
    i = ctx.index(node)
    n = ctx.rank
    rows = [list(r) for r in _eye(n)]
    for j in range(n):
        rows[i][j] -= ctx.matrix[i][j]
    m = tuple(tuple(r) for r in rows)
    w = WeylElement(ctx, m, m)
    w._word = (str(node),)
    return w


def from_word(ctx: CartanData, word) -> WeylElement:
    out = identity(ctx)
    for letter in word:
        out = out * simple_reflection(ctx, str(letter))
    return out


def parse_word(text: str) -> list[str]:
    """'1,2,1' or '1 2 1' to a list of labels; '', 'e' and '-' give the empty word."""
    text = text.strip()
    if text in ("", "e", "-"):
        return []
    return [t for t in text.replace(",", " ").split() if t]


def length_and_word(w: WeylElement) -> tuple[int, tuple[str, ...]]:
    return w.length, w.word


def bruhat_leq(v: WeylElement, w: WeylElement) -> bool:
    """Right-greedy subword test along the canonical word of w."""
    if v.ctx != w.ctx:
        raise ValueError("elements belong to different Cartan data")
    if v.length > w.length:
        return False
    u = v
    for letter in reversed(w.word):
        if u.has_right_descent(letter):
            u = u * simple_reflection(w.ctx, letter)
    return u.is_identity()


def coset_decompose(w: WeylElement, J) -> tuple[WeylElement, WeylElement]:
    """(w_J, ^Jw) with w = w_J * ^Jw and ^Jw without left descents in J."""
    J = [n for n in w.ctx.nodes if n in {str(j) for j in J}]
    left = identity(w.ctx)
    rest = w
    changed = True
    while changed:
        changed = False
        for j in J:
            if rest.has_left_descent(j):
                s = simple_reflection(w.ctx, j)
                left = left * s
                rest = s * rest
                changed = True
                break
    return left, rest


def coset_decompose_right(w: WeylElement, K) -> tuple[WeylElement, WeylElement]:
    """(w^K, w_K) with w = w^K * w_K and w^K without right descents in K."""
    a, b = coset_decompose(w.inverse(), K)
    return b.inverse(), a.inverse()


def in_parabolic(w: WeylElement, J) -> bool:
    J = {str(j) for j in J}
    return all(x in J for x in w.word)


def is_min_left(w: WeylElement, J) -> bool:
    """w lies in ^JW."""
    return not any(w.has_left_descent(str(j)) for j in J)


def is_min_right(w: WeylElement, K) -> bool:
    """w lies in W^K."""
    return not any(w.has_right_descent(str(k)) for k in K)


def demazure_star(node: str, w: WeylElement) -> WeylElement:
    s = simple_reflection(w.ctx, node)
    return w if w.has_left_descent(node) else s * w


def demazure_circ_left(node: str, w: WeylElement) -> WeylElement:
    s = simple_reflection(w.ctx, node)
    return s * w if w.has_left_descent(node) else w


def demazure_circ_right(w: WeylElement, node: str) -> WeylElement:
    s = simple_reflection(w.ctx, node)
    return w * s if w.has_right_descent(node) else w


def demazure_star_word(word, w: WeylElement) -> WeylElement:
    """s_{i1} * (s_{i2} * (... * w)); the last letter acts first."""
    for node in reversed(list(word)):
        w = demazure_star(str(node), w)
    return w


def demazure_product(ctx: CartanData, word) -> WeylElement:
    """The 0-Hecke product of a word, built left to right."""
    out = identity(ctx)
    for node in word:
        node = str(node)
        if not out.has_right_descent(node):
            out = out * simple_reflection(ctx, node)
    return out


def enumerate_upto(ctx: CartanData, L: int, gens=None) -> list[WeylElement]:
    """All elements of length <= L (in the parabolic subgroup of gens if given)."""
    return list(_enumerate(ctx, int(L), None if gens is None else frozenset(str(g) for g in gens)))


@lru_cache(maxsize=None)
def _enumerate(ctx: CartanData, L: int, gens) -> tuple[WeylElement, ...]:
    letters = [n for n in ctx.nodes if gens is None or n in gens]
    start = identity(ctx)
    seen = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        d = seen[x]
        if d == L:
            continue
        for node in letters:
            if x.has_right_descent(node):
                continue
            y = x * simple_reflection(ctx, node)
            if y not in seen:
                seen[y] = d + 1
                queue.append(y)
    return tuple(sorted(seen, key=lambda x: (x.length, x.words_key())))


def subword_products(w: WeylElement) -> set[WeylElement]:
    out = {identity(w.ctx)}
    for letter in w.word:
        s = simple_reflection(w.ctx, letter)
        out |= {x * s for x in out}
    return out


def interval(v: WeylElement, w: WeylElement) -> list[WeylElement]:
    if not bruhat_leq(v, w):
        raise ValueError(f"{v} is not below {w}")
    xs = [x for x in subword_products(w) if bruhat_leq(v, x)]
    return sorted(xs, key=lambda x: (x.length, x.words_key()))


def longest_element(ctx: CartanData, J=None, max_length: int = 1000) -> WeylElement:
    """Longest element of the parabolic subgroup W_J (default: all nodes); W_J must be finite."""
    J = list(ctx.nodes) if J is None else [str(j) for j in J]
    w = identity(ctx)
    for _ in range(max_length + 1):
        for j in J:
            if not w.has_right_descent(j):
                w = w * simple_reflection(ctx, j)
                break
        else:
            return w
    raise ValueError("parabolic subgroup looks infinite")
