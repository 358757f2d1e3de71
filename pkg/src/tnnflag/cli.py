"""Command-line front end.

Every command prints a short human summary and, with --out, writes a JSON
report.  Exit codes: 0 when every requested check passes, 1 when a check
fails, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from tnnflag import cartan as cartan_mod
from tnnflag.orders import TwistedContext, build_jq_poset, build_qk_poset, twisted_leq, twisted_length
from tnnflag.ratmat import RationalMatrix
from tnnflag.weyl import bruhat_leq, enumerate_upto, from_word, parse_word

SCHEMA = 1


class UsageError(Exception):
    pass


def content_hash(obj) -> str:
    """Git blob hash of the canonical JSON encoding of obj."""
    data = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def finish(command: str, inputs: dict, result: dict, ok: bool, out: str | None, show: bool = False) -> int:
    report = {"schema": SCHEMA, "command": command, "inputs": inputs, "inputs_hash": content_hash(inputs),
              "ok": ok, "result": result}
    if out:
        with open(out, "w") as fh:
            fh.write(dump(report))
    if show:
        sys.stdout.write(dump(result))
    print(f"{'PASS' if ok else 'FAIL'} {command}")
    return 0 if ok else 1


def _nodes(text: str | None) -> list[str]:
    if not text:
        return []
    return [x.strip() for x in text.split(",") if x.strip()]


def _element(ctx, text: str):
    try:
        return from_word(ctx, parse_word(text or ""))
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def _subset(ctx, text: str | None) -> frozenset:
    nodes = frozenset(_nodes(text))
    if not nodes <= set(ctx.nodes):
        raise UsageError(f"unknown nodes {sorted(nodes - set(ctx.nodes))}")
    return nodes


def _load_cartan(src: str):
    try:
        return cartan_mod.load(src)
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot load Cartan data {src!r}: {exc}") from None


def _load_matrix(path: str) -> RationalMatrix:
    try:
        with open(path) as fh:
            return RationalMatrix.from_json(json.load(fh))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot load matrix {path!r}: {exc}") from None


# ---------------------------------------------------------------- cartan


def cmd_cartan(args) -> int:
    data = _load_cartan(args.source)
    if args.action == "validate":
        problems = cartan_mod.validate(data)
        d = cartan_mod.symmetrizer(data) if not problems else None
        result = dict(data.to_json(), problems=problems,
                      symmetrizer=None if d is None else [f"{x.numerator}/{x.denominator}" for x in d])
        return finish("cartan validate", {"cartan": data.to_json()}, result, not problems, args.out, True)
    if args.action == "glue":
        K = _subset(data, args.k)
        glued, flat, sharp = cartan_mod.glue(data, K)
        result = dict(glued.to_json(), flat=flat, sharp=sharp)
        return finish("cartan glue", {"cartan": data.to_json(), "K": sorted(K)}, result, True, args.out, True)
    ext = cartan_mod.extend_shriek(data)
    return finish("cartan shriek", {"cartan": data.to_json()}, ext.to_json(), True, args.out, True)


# ---------------------------------------------------------------- weyl


def cmd_weyl(args) -> int:
    ctx = _load_cartan(args.cartan)
    if args.action == "enum":
        elements = enumerate_upto(ctx, args.maxlen)
        result = {"count": len(elements), "elements": [list(w.word) for w in elements]}
        for w in elements:
            print(".".join(w.word) or "e")
        print(f"{len(elements)} elements")
        return finish("weyl enum", {"cartan": ctx.to_json(), "maxlen": args.maxlen}, result, True, args.out)
    v, w = _element(ctx, args.v), _element(ctx, args.w)
    leq = bruhat_leq(v, w)
    print("true" if leq else "false")
    inputs = {"cartan": ctx.to_json(), "v": list(v.word), "w": list(w.word)}
    return finish("weyl leq", inputs, {"leq": leq}, True, args.out)


# ---------------------------------------------------------------- orders


def cmd_orders(args) -> int:
    ctx = _load_cartan(args.cartan)
    v, w = _element(ctx, args.v), _element(ctx, args.w)
    if args.action == "tleq":
        tctx = TwistedContext(ctx, _subset(ctx, args.j))
        leq = twisted_leq(tctx, v, w)
        print("true" if leq else "false")
        result = {"leq": leq, "length_v": twisted_length(tctx, v), "length_w": twisted_length(tctx, w)}
        inputs = {"cartan": ctx.to_json(), "J": sorted(tctx.J), "v": list(v.word), "w": list(w.word)}
        return finish("orders tleq", inputs, result, True, args.out)
    from tnnflag.topo import export_json
    try:
        if args.kind == "jq":
            sub = _subset(ctx, args.j)
            poset = build_jq_poset(TwistedContext(ctx, sub), v, w, bottom=args.bottom)
        else:
            sub = _subset(ctx, args.k)
            poset = build_qk_poset(sub, v, w, bottom=args.bottom)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = export_json(poset)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(f"{len(poset)} elements, {len(poset.covers)} covers", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- topo


def cmd_topo(args) -> int:
    from tnnflag import topo
    try:
        with open(args.poset) as fh:
            p = topo.load_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load poset {args.poset!r}: {exc}") from None
    wanted = [k for k in ("graded", "thin", "eulerian", "ball") if getattr(args, k)]
    if not wanted:
        wanted = ["graded", "thin", "eulerian"]
    hat = p if p.bottom() is not None else p.with_bottom()
    checks = {}
    if "graded" in wanted:
        checks["graded"] = topo.is_graded(hat)
    if "thin" in wanted:
        checks["thin"] = topo.is_thin(hat)
    if "eulerian" in wanted:
        checks["eulerian"] = topo.is_eulerian(hat, require_bounds=False)
    if "ball" in wanted:
        # a closed ball needs the face-poset conditions as well as the Euler sums
        res = topo.face_poset_checks(p)
        checks.update({f"ball.{k}": v for k, v in res["checks"].items()})
    if args.shelling:
        found = topo.brute_shelling(hat)
        if found == "skipped":
            print("  shellable: skipped (too many maximal chains)")
        else:
            checks["shellable"] = found is not None
    for name, ok in checks.items():
        print(f"  {name}: {'yes' if ok else 'no'}")
    ok = all(checks.values())
    return finish("topo check", {"poset": json.loads(topo.export_json(p)), "checks": wanted}, checks, ok, args.out)


# ---------------------------------------------------------------- sl


def cmd_sl(args) -> int:
    from tnnflag import slgroup
    g = _load_matrix(args.matrix)
    if g.det() == 0:
        raise UsageError("matrix is singular")
    n = g.size - 1
    if args.action == "cell":
        if args.n is not None and args.n != g.size:
            raise UsageError(f"--n {args.n} does not match a {g.size}x{g.size} matrix")
        v, w = slgroup.birkhoff_cell(g), slgroup.bruhat_cell(g)
        result = {"v": list(v.word), "w": list(w.word)}
        if args.j:
            lc = slgroup.LeviContext(n, [int(j) for j in _nodes(args.j)])
            tv, tw = slgroup.twisted_cells(lc, g)
            result["twisted"] = {"J": sorted(_nodes(args.j), key=int), "v": list(tv.word), "w": list(tw.word)}
        print(f"v = {'.'.join(v.word) or 'e'}, w = {'.'.join(w.word) or 'e'}")
        return finish("sl cell", {"matrix": g.to_json(), "J": _nodes(args.j)}, result, True, args.out)
    u = _element(slgroup.weyl_ctx(n), args.u)
    inside = slgroup.chart_membership(u, g)
    result = {"u": list(u.word), "in_chart": inside}
    if inside and args.j is not None:
        plus, minus = slgroup.jc_chart(u, [int(j) for j in _nodes(args.j)], g)
        result.update(plus=plus.to_json(), minus=minus.to_json())
    print("in chart" if inside else "not in chart")
    return finish("sl chart", {"matrix": g.to_json(), "u": list(u.word), "J": _nodes(args.j)}, result, True,
                  args.out)


# ---------------------------------------------------------------- tp


def cmd_tp(args) -> int:
    from tnnflag import tpcells
    from tnnflag.slgroup import weyl_ctx
    inputs = {"which": args.which, "n": args.n, "J": _nodes(args.j), "v": args.v, "w": args.w, "u": args.u,
              "samples": args.samples, "seed": args.seed, "family": args.family}
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    n = args.n - 1
    if args.which == "identities":
        report = tpcells.suite_identities(n, args.samples, args.seed, gkl_samples=max(1, args.samples // 2))
    else:
        ctx = weyl_ctx(n)
        J = _subset(ctx, args.j)
        v, w = _element(ctx, args.v), _element(ctx, args.w)
        try:
            spec = tpcells.CellSpec(v, w, J, args.family)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.which == "chart":
            report = tpcells.suite_chart_containment(spec, args.samples, args.seed)
        elif args.which == "product":
            u = _element(ctx, args.u if args.u is not None else args.v)
            try:
                report = tpcells.suite_product_structure(spec, u, args.samples, args.seed)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        else:
            report = tpcells.suite_closure_poset(spec)
    print(f"  {report['checks']} checks, {len(report['failures'])} failures")
    return finish(f"tp suite {args.which}", inputs, report, report["ok"], args.out)


# ---------------------------------------------------------------- verify


def _profile_tasks(profile: str) -> list[str]:
    quick = ["reductions:a2", "jq_topology:a2", "qk_topology:a2", "glue:a2", "nu_order:a2", "spade:a2",
             "sampler:sl3", "chart:sl3", "product:sl3", "closure:sl3", "identities:sl3"]
    full = ["reductions:a3", "reductions:affine_a1", "reductions:hyperbolic_2_3", "jq_topology:a3",
            "jq_topology:affine_a1", "jq_topology:hyperbolic_2_3", "qk_topology:a3", "nu_order:a3",
            "sampler:sl4", "chart:sl4", "identities:sl4"]
    return quick if profile == "quick" else quick + full


def _full_interval(n: int, J):
    from tnnflag.slgroup import LeviContext, weyl_ctx
    from tnnflag.weyl import longest_element
    wj = LeviContext(n, [int(j) for j in J]).longest()
    return wj, wj * longest_element(weyl_ctx(n))


def run_task(task: str, samples: int, seed: int) -> dict:
    """One named verification task; the name fixes the scope completely."""
    from tnnflag import tpcells, verify
    from tnnflag.slgroup import weyl_ctx
    kind, target = task.split(":")
    subs = []
    if target.startswith("sl"):
        n = int(target[2:]) - 1
        ctx = weyl_ctx(n)
    else:
        ctx = cartan_mod.builtin(target)
    finite = target in ("a2", "a3")
    if kind == "reductions":
        subs.append(verify.twisted_reductions(ctx, 3 if target == "a2" else 4 if target == "a3" else 6))
    elif kind == "jq_topology":
        if finite:
            for J in verify.subsets(ctx.nodes):
                subs.append(verify.jq_topology(ctx, J, 10, 4))
        else:
            for J in (frozenset(), frozenset({"1"}), frozenset({"2"})):
                subs.append(verify.jq_topology(ctx, J, 5, 4 if target == "affine_a1" else 3))
    elif kind == "qk_topology":
        for K in verify.subsets(ctx.nodes):
            subs.append(verify.qk_topology(ctx, K, 4))
    elif kind == "glue":
        subs.append(verify.glue_check(ctx, {"2"}, cartan_mod.type_a(3)))
    elif kind == "nu_order":
        for K in verify.subsets(ctx.nodes):
            subs.append(verify.nu_order(ctx, K, 4))
    elif kind == "spade":
        for J in verify.subsets(ctx.nodes):
            subs.append(verify.spade(ctx, J))
    elif kind == "sampler":
        elements = enumerate_upto(ctx, 10 ** 6)
        pairs = [(v, w) for v in elements for w in elements if bruhat_leq(v, w)]
        if n >= 3:
            pairs = random.Random(seed).sample(pairs, 50)
        subs.append(verify.sampler_soundness(n, pairs, samples, seed))
    elif kind == "chart":
        for J in verify.subsets(ctx.nodes):
            v, w = _full_interval(n, J)
            spec = tpcells.CellSpec(v, w, J)
            subs.append(tpcells.suite_chart_containment(spec, samples if n < 3 else max(1, samples // 4), seed))
        subs.append(tpcells.suite_chart_containment(tpcells.CellSpec(*_full_interval(n, ()), family="pos"),
                                                    samples if n < 3 else max(1, samples // 4), seed))
    elif kind == "product":
        for J in verify.subsets(ctx.nodes):
            v, w = _full_interval(n, J)
            spec = tpcells.CellSpec(v, w, J)
            for u in spec.between():
                subs.append(tpcells.suite_product_structure(spec, u, max(1, samples // 4), seed))
    elif kind == "closure":
        for J in verify.subsets(ctx.nodes):
            subs.append(tpcells.suite_closure_poset(tpcells.CellSpec(*_full_interval(n, J), J)))
    elif kind == "identities":
        subs.append(tpcells.suite_identities(n, samples, seed, gkl_samples=max(1, samples // 2)))
    else:
        raise UsageError(f"unknown task {task!r}")
    return {"task": task, "ok": all(s["ok"] for s in subs),
            "checks": sum(s["checks"] for s in subs), "parts": subs}


def _timed(task: str, samples: int, seed: int):
    start = time.perf_counter()
    out = run_task(task, samples, seed)
    return out, time.perf_counter() - start


def thread_cap() -> int:
    env = os.environ.get("TNNFLAG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError("TNNFLAG_THREADS must be a positive integer") from None
    return os.cpu_count() or 1


def verify_all(profile: str, samples: int = 20, seed: int = 7, workers: int | None = None):
    """Run a profile; returns (report, timings) with results in task order."""
    tasks = _profile_tasks(profile)
    workers = min(workers or thread_cap(), len(tasks))
    if workers <= 1:
        results = [_timed(t, samples, seed) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_timed, tasks, [samples] * len(tasks), [seed] * len(tasks)))
    report = {"profile": profile, "tasks": [r for r, _ in results]}
    timings = {t: round(dt, 3) for t, (_, dt) in zip(tasks, results)}
    return report, timings


def cmd_verify(args) -> int:
    report, timings = verify_all(args.profile, args.samples, args.seed)
    for task in report["tasks"]:
        extra = f"  ({timings[task['task']]:.1f}s)" if args.profile == "full" else ""
        print(f"  {'ok  ' if task['ok'] else 'FAIL'} {task['task']}: {task['checks']} checks{extra}")
    ok = all(t["ok"] for t in report["tasks"])
    inputs = {"profile": args.profile, "samples": args.samples, "seed": args.seed}
    code = finish(f"verify {args.profile}", inputs, report, ok, args.out)
    if args.profile == "full" and args.out:
        # timings vary run to run, so they live next to the report rather than in it
        with open(args.out + ".timings.json", "w") as fh:
            fh.write(dump({"schema": SCHEMA, "timings": timings}))
    return code


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tnnflag", description="Twisted Bruhat orders and totally positive cells.")
    top = parser.add_subparsers(dest="group", required=True)

    def out_opt(p):
        p.add_argument("--out", help="write a JSON report here")

    c = top.add_parser("cartan", help="generalized Cartan matrices")
    ca = c.add_subparsers(dest="action", required=True)
    for name in ("validate", "glue", "shriek"):
        p = ca.add_parser(name)
        p.add_argument("source", help="JSON file or builtin name")
        if name == "glue":
            p.add_argument("--k", required=True, help="comma-separated nodes to glue along")
        out_opt(p)
    c.set_defaults(func=cmd_cartan)

    w = top.add_parser("weyl", help="Weyl group elements")
    wa = w.add_subparsers(dest="action", required=True)
    p = wa.add_parser("enum")
    p.add_argument("--cartan", default="a2")
    p.add_argument("--maxlen", type=int, required=True)
    out_opt(p)
    p = wa.add_parser("leq")
    p.add_argument("--cartan", default="a2")
    p.add_argument("--v", required=True)
    p.add_argument("--w", required=True)
    out_opt(p)
    w.set_defaults(func=cmd_weyl)

    o = top.add_parser("orders", help="twisted Bruhat order and pair posets")
    oa = o.add_subparsers(dest="action", required=True)
    p = oa.add_parser("tleq")
    p.add_argument("--cartan", default="a2")
    p.add_argument("--j", default="")
    p.add_argument("--v", required=True)
    p.add_argument("--w", required=True)
    out_opt(p)
    p = oa.add_parser("poset")
    p.add_argument("--cartan", default="a2")
    p.add_argument("--kind", choices=["jq", "qk"], required=True)
    p.add_argument("--j", default="")
    p.add_argument("--k", default="")
    p.add_argument("--v", required=True)
    p.add_argument("--w", required=True)
    p.add_argument("--bottom", action="store_true", help="adjoin a bottom element 0hat")
    p.add_argument("--out", help="write the poset JSON here")
    o.set_defaults(func=cmd_orders)

    t = top.add_parser("topo", help="poset checks")
    ta = t.add_subparsers(dest="action", required=True)
    p = ta.add_parser("check")
    p.add_argument("poset", help="poset JSON file")
    for flag in ("graded", "thin", "eulerian", "ball", "shelling"):
        p.add_argument(f"--{flag}", action="store_true")
    out_opt(p)
    t.set_defaults(func=cmd_topo)

    s = top.add_parser("sl", help="matrices in SL_n")
    sa = s.add_subparsers(dest="action", required=True)
    p = sa.add_parser("cell")
    p.add_argument("--n", type=int, help="matrix size, checked against the file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--j", help="also report the J-twisted cell")
    out_opt(p)
    p = sa.add_parser("chart")
    p.add_argument("--u", required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--j", help="also split by the J-chart map")
    out_opt(p)
    s.set_defaults(func=cmd_sl)

    tp = top.add_parser("tp", help="positivity suites")
    tpa = tp.add_subparsers(dest="action", required=True)
    p = tpa.add_parser("suite")
    p.add_argument("--which", choices=["chart", "product", "closure", "identities"], required=True)
    p.add_argument("--n", type=int, default=3, help="the group is SL_n")
    p.add_argument("--j", default="")
    p.add_argument("--v", default="")
    p.add_argument("--w", default="")
    p.add_argument("--u")
    p.add_argument("--family", choices=["twisted", "pos", "neg"], default="twisted")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    out_opt(p)
    tp.set_defaults(func=cmd_tp)

    v = top.add_parser("verify", help="run a verification profile")
    v.add_argument("profile", choices=["quick", "full"])
    v.add_argument("--samples", type=int, default=20)
    v.add_argument("--seed", type=int, default=7)
    out_opt(v)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tnnflag: error: {exc}", file=sys.stderr)
        return 2
