"""Sweeps over whole families of intervals and cells, shared by the CLI profiles and the tests.

Each function returns a report dict with "checks", "failures" (witnesses)
and "ok".  Reports contain no timings so identical inputs give identical
output.
"""

from __future__ import annotations

import random
from itertools import combinations

from tnnflag.cartan import CartanData
from tnnflag.orders import (
    GluedGroup,
    TwistedContext,
    build_jq_poset,
    build_qk_poset,
    check_nu_order,
    check_spade,
    pair_id,
    qk_elements,
    twisted_leq,
    twisted_length,
)
from tnnflag.topo import face_poset_checks
from tnnflag.weyl import bruhat_leq, enumerate_upto


def _report(name: str, checks: int, failures: list, **extra) -> dict:
    out = {"name": name, "checks": checks, "failures": failures, "ok": not failures}
    out.update(extra)
    return out


def subsets(nodes) -> list[frozenset]:
    return [frozenset(c) for r in range(len(nodes) + 1) for c in combinations(nodes, r)]


def twisted_reductions(ctx: CartanData, maxlen: int) -> dict:
    """J = empty gives Bruhat order and J = all nodes gives the reverse, on all pairs up to maxlen."""
    elements = enumerate_upto(ctx, maxlen)
    empty = TwistedContext(ctx, frozenset())
    full = TwistedContext(ctx, frozenset(ctx.nodes))
    failures, checks = [], 0
    for v in elements:
        for w in elements:
            checks += 1
            b = bruhat_leq(v, w)
            if twisted_leq(empty, v, w) != b:
                failures.append({"J": "empty", "v": list(v.word), "w": list(w.word)})
            if twisted_leq(full, v, w) != bruhat_leq(w, v):
                failures.append({"J": "all", "v": list(v.word), "w": list(w.word)})
    return _report(f"twisted_reductions[{ctx_name(ctx)}]", checks, failures, elements=len(elements))


def ctx_name(ctx: CartanData) -> str:
    return "[" + ";".join(",".join(str(x) for x in row) for row in ctx.matrix) + "]"


def twisted_pairs(ctx: CartanData, J, maxlen: int, max_rank: int):
    tctx = TwistedContext(ctx, frozenset(str(j) for j in J))
    elements = enumerate_upto(ctx, maxlen)
    out = []
    for v in elements:
        for w in elements:
            d = twisted_length(tctx, w) - twisted_length(tctx, v)
            if 0 <= d <= max_rank and twisted_leq(tctx, v, w):
                out.append((v, w))
    return tctx, out


def jq_topology(ctx: CartanData, J, maxlen: int, max_rank: int) -> dict:
    """Face-poset checks on every twisted interval of rank <= max_rank among elements up to maxlen."""
    tctx, pairs = twisted_pairs(ctx, J, maxlen, max_rank)
    failures = []
    for v, w in pairs:
        res = face_poset_checks(build_jq_poset(tctx, v, w))
        if not res["ok"]:
            failures.append({"interval": pair_id(v, w),
                             "failed": [k for k, ok in res["checks"].items() if not ok]})
    return _report(f"jq_topology[J={','.join(sorted(tctx.J))}]", len(pairs), failures)


def qk_topology(ctx: CartanData, K, max_rank: int) -> dict:
    """Face-poset checks on every Q_K interval of rank <= max_rank (finite type)."""
    K = frozenset(str(k) for k in K)
    elements = enumerate_upto(ctx, 10 ** 6)
    pairs = qk_elements(K, elements, max_rank)
    failures = []
    for v, w in pairs:
        res = face_poset_checks(build_qk_poset(K, v, w))
        if not res["ok"]:
            failures.append({"interval": pair_id(v, w),
                             "failed": [k for k, ok in res["checks"].items() if not ok]})
    return _report(f"qk_topology[K={','.join(sorted(K))}]", len(pairs), failures)


def glue_check(ctx: CartanData, K, expected: CartanData, glued: CartanData | None = None) -> dict:
    """The glued matrix is a valid Cartan matrix equal to expected; witnesses are differing entries."""
    from tnnflag.cartan import glue, validate
    data = glued if glued is not None else glue(ctx, K)[0]
    failures = [{"problem": msg} for msg in validate(data)]
    if len(data.matrix) != len(expected.matrix):
        failures.append({"problem": "size", "got": data.rank, "expected": expected.rank})
    else:
        for i, (row, ref) in enumerate(zip(data.matrix, expected.matrix)):
            for j, (a, b) in enumerate(zip(row, ref)):
                if a != b:
                    failures.append({"entry": [i, j], "got": a, "expected": b})
    name = f"glue[{ctx_name(ctx)},K={','.join(sorted(str(k) for k in K))}]"
    return _report(name, 1, failures)


def nu_order(ctx: CartanData, K, max_rank: int, glued: GluedGroup | None = None) -> dict:
    K = frozenset(str(k) for k in K)
    pairs = qk_elements(K, enumerate_upto(ctx, 10 ** 6), max_rank)
    rep = check_nu_order(K, pairs, glued)
    return _report(f"nu_order[K={','.join(sorted(K))}]", rep["checks"], rep["failures"])


def spade(ctx: CartanData, J, max_v: int = 4, max_x: int = 2) -> dict:
    rep = check_spade(ctx, J, max_v, max_x)
    return _report(f"spade[J={','.join(sorted(str(j) for j in J))}]", rep["checks"], rep["failures"])


def sampler_soundness(n: int, pairs, samples: int, seed: int) -> dict:
    """Positive and negative samples land in exactly the requested cell."""
    from tnnflag.tpcells import CellSpec, mr_product, positive_subexpression, random_params
    rng = random.Random(seed)
    failures, checks = [], 0
    for v, w in pairs:
        sub = positive_subexpression(w.word, v)
        for sign in ("pos", "neg"):
            spec = CellSpec(v, w, family=sign)
            for k in range(samples):
                checks += 1
                params = random_params(rng, spec.dim())
                g = mr_product(n, sub, params, sign)
                if spec.cells_of(g) != (v, w):
                    failures.append({"v": list(v.word), "w": list(w.word), "sign": sign, "sample": k,
                                     "point": g.to_json()})
    return _report(f"sampler_soundness[n={n}]", checks, failures)
