"""SL(n+1) with its pinning: generators, cells, Levi blocks, charts and chart factorizations.

Indices follow the usual matrix convention: x_i(a) = 1 + a E_{i,i+1} and
y_i(a) = 1 + a E_{i+1,i} for 1 <= i <= n, and a permutation w is realized
by a signed permutation matrix with nonzero entries at (w(j), j).

The Weyl group representative of s_i is x_i(-1) y_i(1) x_i(-1), the 2x2
block [[0,-1],[1,0]].  It is the one for which the products of the
positive parametrization below land in the totally nonnegative part (see
the tests for the Plucker sign check).

>>> sdot(1, 1).rows == ((0, -1), (1, 0))
True
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from tnnflag.cartan import CartanData, type_a
from tnnflag.ratmat import FactorizationError, RationalMatrix, ldu, leading_minors_nonzero, rank, udl
from tnnflag.weyl import WeylElement, from_word, longest_element

# ---------------------------------------------------------------- generators


def _check_index(n: int, i: int):
    if not 1 <= int(i) <= n:
        raise ValueError(f"index {i} outside 1..{n}")


def _embed(n: int, i: int, block) -> RationalMatrix:
    _check_index(n, i)
    rows = [[Fraction(int(r == c)) for c in range(n + 1)] for r in range(n + 1)]
    k = int(i) - 1
    for a in range(2):
        for b in range(2):
            rows[k + a][k + b] = Fraction(block[a][b])
    return RationalMatrix(rows)


def gen_x(n: int, i: int, a) -> RationalMatrix:
    return _embed(n, i, ((1, a), (0, 1)))


def gen_y(n: int, i: int, a) -> RationalMatrix:
    return _embed(n, i, ((1, 0), (a, 1)))


def gen_torus(n: int, i: int, b) -> RationalMatrix:
    b = Fraction(b)
    if b == 0:
        raise ValueError("torus parameter must be nonzero")
    return _embed(n, i, ((b, 0), (0, 1 / b)))


@lru_cache(maxsize=None)
def sdot(n: int, i: int) -> RationalMatrix:
    return gen_x(n, i, -1) * gen_y(n, i, 1) * gen_x(n, i, -1)


@lru_cache(maxsize=None)
def sdot_inv(n: int, i: int) -> RationalMatrix:
    return sdot(n, i).inverse()


def wdot(n: int, word) -> RationalMatrix:
    """Product of the representatives over a word (reduced words give the same matrix)."""
    g = RationalMatrix.identity(n + 1)
    for i in word:
        g = g * sdot(n, int(i))
    return g


def wdot_of(w: WeylElement) -> RationalMatrix:
    return _wdot_cached(w.ctx.rank, w.word)


@lru_cache(maxsize=None)
def _wdot_cached(n, word):
    return wdot(n, word)


def wdot_inv_of(w: WeylElement) -> RationalMatrix:
    return _wdot_inv_cached(w.ctx.rank, w.word)


@lru_cache(maxsize=None)
def _wdot_inv_cached(n, word):
    return wdot(n, word).inverse()


def iota(g: RationalMatrix) -> RationalMatrix:
    return g.map_entries(lambda j, k, x: -x if (j - k) % 2 else x)


# ---------------------------------------------------------------- Weyl group bridge


@lru_cache(maxsize=None)
def weyl_ctx(n: int) -> CartanData:
    return type_a(n)


def perm_of(w: WeylElement) -> tuple[int, ...]:
    """One-line notation (0-based) with w(j) = perm[j]; s_i swaps i-1 and i."""
    size = w.ctx.rank + 1
    p = list(range(size))
    for letter in reversed(w.word):
        k = int(letter) - 1
        p = [k + 1 if x == k else k if x == k + 1 else x for x in p]
    return tuple(p)


def weyl_of_perm(n: int, perm) -> WeylElement:
    p = list(perm)
    word = []
    while True:
        k = next((k for k in range(len(p) - 1) if p[k] > p[k + 1]), None)
        if k is None:
            break
        p[k], p[k + 1] = p[k + 1], p[k]
        word.append(str(k + 1))
    return from_word(weyl_ctx(n), reversed(word))


def all_perms_weyl(n: int) -> list[WeylElement]:
    from tnnflag.weyl import enumerate_upto
    return enumerate_upto(weyl_ctx(n), n * (n + 1) // 2)


# ---------------------------------------------------------------- flags and cells


@dataclass(frozen=True, eq=False)
class FlagPoint:
    """The flag gB^+ of a representative g."""

    rep: RationalMatrix

    def __eq__(self, other) -> bool:
        return isinstance(other, FlagPoint) and same_flag(self.rep, other.rep)

    def __hash__(self):
        return hash(self.rep.size)


def _rep(p) -> RationalMatrix:
    return p.rep if isinstance(p, FlagPoint) else p


def is_upper(g: RationalMatrix) -> bool:
    return all(g.rows[i][j] == 0 for i in range(g.size) for j in range(i))


def is_lower(g: RationalMatrix) -> bool:
    return all(g.rows[i][j] == 0 for i in range(g.size) for j in range(i + 1, g.size))


def _unit_diag(g: RationalMatrix) -> bool:
    return all(g.rows[i][i] == 1 for i in range(g.size))


def is_upper_unipotent(g: RationalMatrix) -> bool:
    return is_upper(g) and _unit_diag(g)


def is_lower_unipotent(g: RationalMatrix) -> bool:
    return is_lower(g) and _unit_diag(g)


def is_diagonal(g: RationalMatrix) -> bool:
    return is_upper(g) and is_lower(g)


def same_flag(g: RationalMatrix, h: RationalMatrix) -> bool:
    return is_upper(g.inverse() * h)


def corner_ranks(g: RationalMatrix, corner: str) -> list[list[int]]:
    """r[i][j] = rank of rows i..N-1 (southwest) or 0..i (northwest), columns 0..j."""
    g = _rep(g)
    N = g.size
    out = []
    for i in range(N):
        rows = g.rows[i:] if corner == "sw" else g.rows[: i + 1]
        out.append([rank([r[: j + 1] for r in rows]) for j in range(N)])
    return out


def _perm_from_ranks(r, corner: str) -> tuple[int, ...]:
    N = len(r)
    perm = []
    for j in range(N):
        jumps = [i for i in range(N) if r[i][j] - (r[i][j - 1] if j else 0) == 1]
        perm.append(max(jumps) if corner == "sw" else min(jumps))
    if sorted(perm) != list(range(N)):
        raise ValueError("rank data does not come from an invertible matrix")
    return tuple(perm)


def _check_invertible(g: RationalMatrix):
    if g.det() == 0:
        raise ValueError("singular matrix")


def bruhat_cell(g) -> WeylElement:
    """w with g in B^+ w B^+, from the southwest rank matrix."""
    g = _rep(g)
    _check_invertible(g)
    return weyl_of_perm(g.size - 1, _perm_from_ranks(corner_ranks(g, "sw"), "sw"))


def birkhoff_cell(g) -> WeylElement:
    """v with g in B^- v B^+, from the northwest rank matrix."""
    g = _rep(g)
    _check_invertible(g)
    return weyl_of_perm(g.size - 1, _perm_from_ranks(corner_ranks(g, "nw"), "nw"))


def richardson_cell(g) -> tuple[WeylElement, WeylElement]:
    return birkhoff_cell(g), bruhat_cell(g)


def chart_membership(u: WeylElement, p) -> bool:
    """gB^+ lies in u U^- B^+ iff all leading principal minors of u^-1 g are nonzero."""
    return leading_minors_nonzero(wdot_inv_of(u) * _rep(p))


# ---------------------------------------------------------------- Levi blocks


@dataclass(frozen=True)
class LeviContext:
    n: int
    J: frozenset

    def __post_init__(self):
        J = frozenset(int(j) for j in self.J)
        if not all(1 <= j <= self.n for j in J):
            raise ValueError(f"J = {sorted(J)} is not inside 1..{self.n}")
        object.__setattr__(self, "J", J)

    @property
    def block(self) -> tuple[int, ...]:
        out, b = [0], 0
        for k in range(1, self.n + 1):
            if k not in self.J:
                b += 1
            out.append(b)
        return tuple(out)

    def longest(self) -> WeylElement:
        return longest_element(weyl_ctx(self.n), [str(j) for j in self.J])

    def wdot_J(self) -> RationalMatrix:
        return wdot_of(self.longest())

    def wdot_J_inv(self) -> RationalMatrix:
        return wdot_inv_of(self.longest())


def _pattern(g: RationalMatrix, allowed) -> bool:
    N = g.size
    return all(g.rows[i][j] == 0 or allowed(i, j) for i in range(N) for j in range(N))


def in_parabolic_plus(lc: LeviContext, g) -> bool:
    b = lc.block
    return _pattern(g, lambda i, j: b[i] <= b[j])


def in_parabolic_minus(lc: LeviContext, g) -> bool:
    b = lc.block
    return _pattern(g, lambda i, j: b[i] >= b[j])


def in_levi(lc: LeviContext, g) -> bool:
    b = lc.block
    return _pattern(g, lambda i, j: b[i] == b[j])


def _identity_blocks(lc, g) -> bool:
    b = lc.block
    N = g.size
    return all(g.rows[i][j] == int(i == j) for i in range(N) for j in range(N) if b[i] == b[j])


def in_unipotent_radical_plus(lc: LeviContext, g) -> bool:
    return in_parabolic_plus(lc, g) and _identity_blocks(lc, g)


def in_unipotent_radical_minus(lc: LeviContext, g) -> bool:
    return in_parabolic_minus(lc, g) and _identity_blocks(lc, g)


def in_twisted_borel_plus(lc: LeviContext, g) -> bool:
    """^JB^+: lower triangular inside the blocks, anything above them, zero below."""
    b = lc.block
    return _pattern(g, lambda i, j: b[i] < b[j] or (b[i] == b[j] and i >= j))


def in_twisted_borel_minus(lc: LeviContext, g) -> bool:
    """^JB^-: upper triangular inside the blocks, anything below them, zero above."""
    b = lc.block
    return _pattern(g, lambda i, j: b[i] > b[j] or (b[i] == b[j] and i <= j))


def in_twisted_unipotent_plus(lc: LeviContext, g) -> bool:
    return in_twisted_borel_plus(lc, g) and _unit_diag(g)


def in_twisted_unipotent_minus(lc: LeviContext, g) -> bool:
    return in_twisted_borel_minus(lc, g) and _unit_diag(g)


def conj_twisted_borel_plus(lc: LeviContext, g) -> bool:
    """^JB^+ membership through w_J B^+ w_J^-1."""
    return is_upper(lc.wdot_J_inv() * g * lc.wdot_J())


def conj_twisted_borel_minus(lc: LeviContext, g) -> bool:
    return is_lower(lc.wdot_J_inv() * g * lc.wdot_J())


def pi_J(lc: LeviContext, p: RationalMatrix) -> RationalMatrix:
    """Levi component of an element of P_J^-: keep the diagonal blocks."""
    if not in_parabolic_minus(lc, p):
        raise ValueError("matrix is not in the block-lower parabolic P_J^-")
    b = lc.block
    return p.map_entries(lambda i, j, x: x if b[i] == b[j] else Fraction(0))


def twisted_cells(lc: LeviContext, g) -> tuple[WeylElement, WeylElement]:
    """(v, w) with g in ^JB^- v B^+ and in ^JB^+ w B^+.

    Both twisted Borels are conjugates by w_J of the standard ones, so the
    indices are w_J times the ordinary cells of w_J^-1 g.
    """
    g = _rep(g)
    wj = lc.longest()
    h = lc.wdot_J_inv() * g
    return wj * birkhoff_cell(h), wj * bruhat_cell(h)


# ---------------------------------------------------------------- chart factorizations


def in_conjugate_lower(r: WeylElement, g: RationalMatrix) -> bool:
    """g lies in r U^- r^-1."""
    return is_lower_unipotent(wdot_inv_of(r) * g * wdot_of(r))


@dataclass(frozen=True)
class SigmaFactors:
    """g = h1 h2 = g1 g2 with h1, g2 in ^JU^- and h2, g1 in ^JU^+ (all inside r U^- r^-1)."""

    h1: RationalMatrix
    h2: RationalMatrix
    g1: RationalMatrix
    g2: RationalMatrix

    @property
    def plus(self) -> RationalMatrix:
        return self.h2

    @property
    def minus(self) -> RationalMatrix:
        return self.g2


def _split_minus_plus(lc: LeviContext, m: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix]:
    """m = a b with a in ^JU^- and b in ^JU^+."""
    wj, wji = lc.wdot_J(), lc.wdot_J_inv()
    low, diag, up = ldu(wji * m * wj)
    if diag != RationalMatrix.identity(m.size):
        raise FactorizationError("unipotent factorization produced a nontrivial torus part")
    return wj * low * wji, wj * up * wji


def _split_plus_minus(lc: LeviContext, m: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix]:
    """m = a b with a in ^JU^+ and b in ^JU^-."""
    wj, wji = lc.wdot_J(), lc.wdot_J_inv()
    up, diag, low = udl(wji * m * wj)
    if diag != RationalMatrix.identity(m.size):
        raise FactorizationError("unipotent factorization produced a nontrivial torus part")
    return wj * up * wji, wj * low * wji


def sigma_factor(r: WeylElement, J, g: RationalMatrix) -> SigmaFactors:
    n = r.ctx.rank
    lc = J if isinstance(J, LeviContext) else LeviContext(n, J)
    if not in_conjugate_lower(r, g):
        raise ValueError("g is not in r U^- r^-1")
    h1, h2 = _split_minus_plus(lc, g)
    g1, g2 = _split_plus_minus(lc, g)
    for part in (h1, h2, g1, g2):
        if not in_conjugate_lower(r, part):
            raise FactorizationError("factor left the subgroup r U^- r^-1")
    return SigmaFactors(h1, h2, g1, g2)


def chart_unipotent(r: WeylElement, p) -> RationalMatrix:
    """The unique g' in r U^- r^-1 with p = g' r B^+."""
    g = _rep(p)
    rd, rdi = wdot_of(r), wdot_inv_of(r)
    try:
        low, _, _ = ldu(rdi * g)
    except FactorizationError:
        raise ValueError("point is outside the chart r U^- B^+") from None
    return rd * low * rdi


def jc_chart(r: WeylElement, J, p) -> tuple[RationalMatrix, RationalMatrix]:
    """Representatives of (sigma_+(g) r B^+, sigma_-(g) r B^+) for p = g r B^+."""
    n = r.ctx.rank
    lc = J if isinstance(J, LeviContext) else LeviContext(n, J)
    gp = chart_unipotent(r, p)
    f = sigma_factor(r, lc, gp)
    rd = wdot_of(r)
    return f.plus * rd, f.minus * rd


def jc_chart_inv(r: WeylElement, J, plus, minus) -> RationalMatrix:
    """Inverse of jc_chart: rebuild a representative g' r of the original flag."""
    n = r.ctx.rank
    lc = J if isinstance(J, LeviContext) else LeviContext(n, J)
    h2 = chart_unipotent(r, plus)
    g2 = chart_unipotent(r, minus)
    if not in_twisted_unipotent_plus(lc, h2):
        raise ValueError("first component is not in the twisted Schubert cell of r")
    if not in_twisted_unipotent_minus(lc, g2):
        raise ValueError("second component is not in the opposite twisted Schubert cell of r")
    a, _ = _split_minus_plus(lc, h2 * g2.inverse())
    return a.inverse() * h2 * wdot_of(r)


# ---------------------------------------------------------------- identities


def _rand_pos(rng) -> Fraction:
    return Fraction(rng.randint(1, 20), rng.randint(1, 20))


def verify_xy_identities(n: int, triples, ident_x=None, ident_y=None) -> dict:
    """Check the rank-one product identities and the commuting relations exactly.

    ident_x / ident_y override the generators (used for mutation tests).
    """
    X = ident_x or (lambda i, a: gen_x(n, i, a))
    Y = ident_y or (lambda i, a: gen_y(n, i, a))

    def T(i, b):
        return gen_torus(n, i, b)

    failures, count = [], 0
    for k, (a, b, c) in enumerate(triples):
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        d = a * (b + c) + 1
        e = a * b + 1
        for i in range(1, n + 1):
            checks = {
                "xy_swap": (X(i, a) * Y(i, b + c), Y(i, (b + c) / d) * T(i, d) * X(i, a / d)),
                "xy_negative": (X(i, a / d) * Y(i, -c), Y(i, -c * d / e) * T(i, e / d) * X(i, a / e)),
            }
            for j in range(1, n + 1):
                if j != i:
                    for sgn in (1, -1):
                        checks[f"commute_{j}_{sgn:+d}"] = (X(i, a) * Y(j, sgn * b), Y(j, sgn * b) * X(i, a))
            for name, (lhs, rhs) in checks.items():
                count += 1
                if lhs != rhs:
                    failures.append({"sample": k, "index": i, "identity": name,
                                     "params": [str(a), str(b), str(c)],
                                     "lhs": lhs.to_json(), "rhs": rhs.to_json()})
    return {"checks": count, "failures": failures, "ok": not failures}


def verify_gkl_memberships(w: WeylElement, w1: WeylElement, params_list) -> dict:
    """Factor w^-1 h, w1^-1 h, w b and w2 b into the displayed patterns.

    h is the product of y's over the reduced word w1.w2 of w (so h = h1 h2 is
    in U^-_{w,>0}) and b the product of x's over the reversed word (b = b2 b1
    in U^+_{w^-1,>0}).  The first and third factorizations are unique.  For
    the second and fourth the outer factor is not determined by the product
    alone; it is read off from w1^-1 h1 (resp. w2 b2), and the remainder is
    then factored uniquely and checked.
    """
    from tnnflag.tpcells import in_u_minus_positive, in_u_plus_positive

    n = w.ctx.rank
    w2 = w1.inverse() * w
    if w1.length + w2.length != w.length:
        raise ValueError("w1 must be a left prefix of w with lengths adding up")
    if w.length == 0:
        raise ValueError("h = identity is not in U^-_{w,>0} for w = e; use w != e")
    wd, wdi = wdot_of(w), wdot_inv_of(w)
    w1d, w1di = wdot_of(w1), wdot_inv_of(w1)
    w2d, w2di = wdot_of(w2), wdot_inv_of(w2)
    word1 = [int(x) for x in w1.word]
    word2 = [int(x) for x in w2.word]
    k1 = len(word1)
    eye = RationalMatrix.identity(n + 1)
    failures, count = [], 0

    def pos_diag(t):
        return is_diagonal(t) and all(t.rows[i][i] > 0 for i in range(t.size))

    def conj_pattern(x, low_or_up, z, zi):
        m = zi * x * z
        return is_upper_unipotent(m) if low_or_up == "upper" else is_lower_unipotent(m)

    def prod(gen, word, params):
        g = eye
        for i, a in zip(word, params):
            g = g * gen(n, i, a)
        return g

    for k, params in enumerate(params_list):
        if len(params) != w.length or any(Fraction(a) <= 0 for a in params):
            raise ValueError("need one positive parameter per letter of w")
        params = [Fraction(a) for a in params]
        h1 = prod(gen_y, word1, params[:k1])
        h2 = prod(gen_y, word2, params[k1:])
        h = h1 * h2
        b1 = prod(gen_x, word1[::-1], params[:k1][::-1])
        b2 = prod(gen_x, word2[::-1], params[k1:][::-1])
        b = b2 * b1
        results = {}
        try:
            # w^-1 h = A B t: A in U^- with w A w^-1 upper, B in U^+_{w^-1,>0}
            L, D, U = ldu(wdi * h)
            B = D * U * D.inverse()
            results["first"] = (conj_pattern(L, "upper", wdi, wd) and pos_diag(D)
                                and in_u_plus_positive(w.inverse(), B))
            # w1^-1 h = A C B t with C in U^-_{w2,>0}, B in U^+_{w1^-1,>0}
            A, _, _ = ldu(w1di * h1)
            L, D, U = ldu(A.inverse() * w1di * h)
            B = D * U * D.inverse()
            results["second"] = (conj_pattern(A, "upper", w1di, w1d) and in_u_minus_positive(w2, L)
                                 and in_u_plus_positive(w1.inverse(), B) and pos_diag(D))
            # w b = A C t with A in U^+, w^-1 A w lower, C in U^-_{w,>0}
            U, D, L = udl(wd * b)
            C = D * L * D.inverse()
            results["third"] = (conj_pattern(U, "lower", wd, wdi) and in_u_minus_positive(w, C) and pos_diag(D))
            # w2 b = A B C t with A in U^+, w2^-1 A w2 lower, B in U^+_{w1^-1,>0}, C in U^-_{w2,>0}
            A, _, _ = udl(w2d * b2)
            U, D, L = udl(A.inverse() * w2d * b)
            C = D * L * D.inverse()
            results["fourth"] = (conj_pattern(A, "lower", w2d, w2di) and in_u_plus_positive(w1.inverse(), U)
                                 and in_u_minus_positive(w2, C) and pos_diag(D))
        except (FactorizationError, ValueError) as exc:
            results["factorization"] = False
            failures.append({"sample": k, "membership": "factorization", "error": str(exc),
                             "params": [str(a) for a in params]})
        for name, ok in results.items():
            count += 1
            if not ok and name != "factorization":
                failures.append({"sample": k, "membership": name, "params": [str(a) for a in params]})
    return {"checks": count, "failures": failures, "ok": not failures}
