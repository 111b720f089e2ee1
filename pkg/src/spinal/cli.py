"""Command-line interface: ``spinal [--preset NAME | --spec FILE] SUBCOMMAND ...``.

Exit codes: 0 ok, 2 validation failure, 3 budget or limit overrun,
4 internal invariant breach.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time

from . import bounds
from .core import SpinalGroup
from .errors import NotLevelStabilizing, SpinalError, ValidationError
from .finite_algebra import validate_spinal_data
from .growth import (
    BallCache,
    check_shortening,
    enumerate_ball,
    enumerate_weight_ball,
    naive_ball_counts,
    portrait,
    portrait_matches,
)
from .omega import is_admissible, minimal_homogeneity
from .period import (
    chi_trace_violations,
    element_order,
    lysionok_build,
    lysionok_length_bound,
    order_from_sequence,
    period_sequence,
    period_table,
    shadow_certificate,
)
from .specfile import load_spec_file, preset_dict, spec_from_dict, spec_hash
from .words import Word

log = logging.getLogger("spinal")


class Context:
    """Lazily built group for the global --spec/--preset options."""

    def __init__(self, args):
        self.args = args
        self._group = None
        if args.spec:
            self.spec = load_spec_file(args.spec)
            if args.omega:
                self.spec["omega"] = args.omega
        else:
            self.spec = preset_dict(args.preset, args.omega, args.p)
        self.hash = spec_hash(self.spec)

    @property
    def group(self) -> SpinalGroup:
        if self._group is None:
            data, omega = spec_from_dict(self.spec)
            self._group = SpinalGroup(data, omega)
        return self._group

    def word(self, text: str, offset: int | None = None) -> Word:
        return self.group.word(text, self.args.offset if offset is None else offset)


def _emit(args, obj, text: str | None = None) -> None:
    if args.json:
        print(json.dumps(obj, default=str))
    else:
        print(text if text is not None else obj)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _scheme(G: SpinalGroup, r: int | None):
    if r is None:
        r = G.homogeneity
        if r is None:
            raise ValidationError("omega is not r-homogeneous for any small r; pass --r")
        r = max(r, 3)
    return bounds.tau_values(r)


# -- subcommands ------------------------------------------------------------

def cmd_validate(ctx, args) -> int:
    data, omega = spec_from_dict(ctx.spec, check_admissible=False)
    rep = validate_spinal_data(data, raise_on_error=False)
    adm = is_admissible(omega, data)
    hom = minimal_homogeneity(omega, data, 4 * (len(omega.prefix) + len(omega.period)) + 4)
    ok = rep.passed and adm
    for line in rep.lines():
        print(line)
    print(f"{'PASS' if adm else 'FAIL'} admissible omega={omega}")
    print(f"homogeneity r={hom if hom is not None else 'none'}")
    print(f"spec_hash {ctx.hash}")
    return 0 if ok else 2


def cmd_reduce(ctx, args) -> int:
    G = ctx.group
    w = ctx.word(args.word)
    print(G.format(Word(G.reduce(w.letters), w.offset)))
    return 0


def _parse_vertex(text: str, q: int) -> tuple:
    parts = text.split(".") if "." in text else list(text)
    v = tuple(int(p) - 1 for p in parts if p)
    if any(not 0 <= y < q for y in v):
        raise ValidationError(f"vertex {text!r} has letters outside 1..{q}")
    return v


def cmd_act(ctx, args) -> int:
    G = ctx.group
    w = ctx.word(args.word)
    img = G.act_letters(w.letters, w.offset, _parse_vertex(args.vertex, G.q))
    sep = "." if G.q > 9 else ""
    print(sep.join(str(y + 1) for y in img))
    return 0


def cmd_decompose(ctx, args) -> int:
    G = ctx.group
    w = ctx.word(args.word)
    tree = G.depth_decomposition(Word(G.reduce(w.letters), w.offset), args.depth)
    r = args.depth
    header = ["level", "length", "a_letters", "b_letters"] + [f"K_{j}" for j in range(1, r + 1)]
    rows = []
    for ell in range(r + 1):
        rows.append([ell, tree.length[ell], tree.a_count[ell], tree.b_count[ell]]
                    + list(tree.k_count[ell][1:r + 1]))
    sys.stdout.write(_csv(rows, header))
    print(f"# L_{r} = {tree.length[r]}, bound_L = {tree.bound_L(G.q)}")
    return 0


def cmd_equals(ctx, args) -> int:
    G = ctx.group
    eq = G.equals(ctx.word(args.w1), ctx.word(args.w2))
    print("true" if eq else "false")
    return 0


def cmd_order(ctx, args) -> int:
    G = ctx.group
    res = element_order(G, ctx.word(args.word), args.max_depth, args.max_length, with_trace=args.trace)
    if args.json:
        _emit(args, {"order": res.order, "q_power": res.q_power,
                     "trace": [list(t) for t in res.trace]})
        return 0
    print(res.order)
    if args.trace:
        for o, w, s in res.trace:
            print(f"# offset={o} s={s} {w}")
    return 0


def _load_or_enumerate(ctx, args, n: int) -> BallCache:
    G = ctx.group
    if args.cache and os.path.exists(args.cache):
        cache = BallCache.load(args.cache, ctx.hash)
        if cache.mode == "length" and cache.radius >= n:
            return cache
    cache = enumerate_ball(G, n, args.offset, args.budget, args.threads, ctx.hash)
    if args.cache:
        cache.save(args.cache)
    return cache


def cmd_ball(ctx, args) -> int:
    G = ctx.group
    if args.weights == "tau":
        cache = enumerate_weight_ball(G, args.n, _scheme(G, args.r), args.offset, args.budget, ctx.hash)
    else:
        cache = _load_or_enumerate(ctx, args, args.n)
    rows = [[m, cache.gamma[m]] for m in range(min(args.n, len(cache.gamma) - 1) + 1)]
    sys.stdout.write(_csv(rows, ["radius", "gamma"]))
    return 0


def cmd_growth(ctx, args) -> int:
    cache = _load_or_enumerate(ctx, args, args.n)
    g = cache.gamma[: args.n + 1]
    rows = [[m, g[m], g[m] - (g[m - 1] if m else 0)] for m in range(len(g))]
    text = _csv(rows, ["radius", "gamma", "sphere"])
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_period(ctx, args) -> int:
    """pi(m): largest order among elements of length <= m."""
    G = ctx.group
    cache = _load_or_enumerate(ctx, args, args.n)
    pis = period_table(G, cache)
    rows = [[m, len(sph), pis[m]] for m, sph in enumerate(cache.spheres[: args.n + 1])]
    text = _csv(rows, ["radius", "sphere", "pi"])
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_bounds(ctx, args) -> int:
    if args.table2:
        sys.stdout.write(bounds.table2_csv(rounded=not args.raw, eta_digits=None if args.exact_eta else 3))
        return 0
    if args.q is None or args.r is None:
        raise ValidationError("bounds needs --q and --r, or --table2")
    rep = bounds.growth_exponents(args.q, args.r, args.p)
    if args.json:
        _emit(args, rep.as_dict())
    else:
        for k, v in rep.as_dict().items():
            print(f"{k},{v}")
    return 0


def cmd_portrait(ctx, args) -> int:
    G = ctx.group
    p = portrait(G, ctx.word(args.word), _scheme(G, args.r), args.K, args.zeta)
    ok = portrait_matches(G, p, min(p.depth + 2, 8))
    _emit(args, {"leaves": p.leaves, "depth": p.depth, "K": p.K, "zeta": p.zeta, "reconstructs": ok},
          f"leaves={p.leaves} depth={p.depth} K={p.K:.6f} zeta={p.zeta:.6f} reconstructs={ok}")
    return 0 if ok else 4


def cmd_shadow(ctx, args) -> int:
    G = ctx.group
    cert = shadow_certificate(G, ctx.word(args.word), _scheme(G, args.r))
    _emit(args, cert, " ".join(f"{k}={v}" for k, v in cert.items()))
    return 0 if cert["divides"] else 4


def cmd_shorten(ctx, args) -> int:
    G = ctx.group
    w = ctx.word(args.word)
    r = args.r or _scheme(G, None).r
    rep = check_shortening(G, Word(G.reduce(w.letters), w.offset), r, args.variant)
    d = dict(rep.__dict__)
    _emit(args, d, " ".join(f"{k}={v}" for k, v in d.items()))
    return 0 if rep.passed and rep.passed_L else 4


def cmd_lowerbound(ctx, args) -> int:
    G = ctx.group
    steps = lysionok_build(G, args.steps)
    r = max(3, G.homogeneity or 3)
    rows = []
    for i, st in enumerate(steps):
        rows.append([i, st.seed_offset, len(st.word), st.order, G.format(st.word)])
    sys.stdout.write(_csv(rows, ["step", "offset", "length", "order", "word"]))
    print(f"# length bound for x={args.steps}, r={r}: {lysionok_length_bound(r, args.steps):.0f}")
    return 0


def cmd_selftest(ctx, args) -> int:
    """Quick oracle checks on the configured group."""
    G = ctx.group
    failures = 0

    def check(name, ok):
        nonlocal failures
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}")

    n = args.n
    t = time.perf_counter()
    ball = enumerate_ball(G, n, args.offset, args.budget, args.threads, ctx.hash)
    check(f"ball(<= {n}) matches naive enumeration", ball.gamma == naive_ball_counts(G, n, args.offset))
    words = [w for sph in ball.sphere_words(G) for w in sph]
    bad = 0
    for w in words:
        inv = Word(tuple(G.alpha.inverse[x] for x in reversed(w.letters)), w.offset)
        bad += not G.is_identity(Word(G.reduce(w.letters + inv.letters), w.offset))
    check("w * w^-1 is trivial on the ball", bad == 0)
    if G.data.regular_root:
        orders = [element_order(G, w).order for w in words]
        ok = True
        for w, o in zip(words, orders):
            p = Word(G.reduce(w.letters * o), w.offset)
            ok &= G.is_identity(p)
        check("g^order(g) = 1 on the ball", ok)
        try:
            seq_ok = all(order_from_sequence(G, period_sequence(G, w)) == o for w, o in zip(words, orders))
            check("period sequence agrees with order", seq_ok)
        except SpinalError as exc:
            print(f"SKIP period sequence ({exc})")
    if G.q == 2 and G.data.level_group.order == 4:
        check("chi-trace transitions", all(not chi_trace_violations(G, w) for w in words))
    print(f"# {time.perf_counter() - t:.2f}s")
    return 0 if failures == 0 else 4


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spinal", description="Computations in spinal groups.")
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--spec", help="group specification file (JSON or YAML)")
    src.add_argument("--preset", default="grigorchuk2", choices=["grigorchuk2", "grigorchukP", "holt"])
    ap.add_argument("--omega", help="omega override, e.g. 012 or 0(12)")
    ap.add_argument("--p", type=int, default=None, help="prime for grigorchukP (and p_prime in bounds)")
    ap.add_argument("--offset", type=int, default=0, help="shift at which words are read")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--budget", type=int, default=2_000_000, help="ball element budget")
    ap.add_argument("--cache", help="ball cache file (read if compatible, written after enumeration)")
    ap.add_argument("--json", action="store_true", help="machine-readable output where supported")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sub.add_parser("validate").set_defaults(fn=cmd_validate)
    p = sub.add_parser("reduce")
    p.add_argument("word")
    p.set_defaults(fn=cmd_reduce)
    p = sub.add_parser("act")
    p.add_argument("word")
    p.add_argument("vertex", help="1-indexed letters, e.g. 121 or 1.2.1")
    p.set_defaults(fn=cmd_act)
    p = sub.add_parser("decompose")
    p.add_argument("word")
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(fn=cmd_decompose)
    p = sub.add_parser("equals")
    p.add_argument("w1")
    p.add_argument("w2")
    p.set_defaults(fn=cmd_equals)
    p = sub.add_parser("order")
    p.add_argument("word")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--max-depth", type=int, default=64)
    p.add_argument("--max-length", type=int, default=10_000)
    p.set_defaults(fn=cmd_order)
    p = sub.add_parser("ball")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--weights", choices=["length", "tau"], default="length")
    p.add_argument("--r", type=int)
    p.set_defaults(fn=cmd_ball)
    p = sub.add_parser("growth")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(fn=cmd_growth)
    p = sub.add_parser("period")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(fn=cmd_period)
    p = sub.add_parser("bounds")
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--table2", action="store_true")
    p.add_argument("--raw", action="store_true", help="unrounded table values")
    p.add_argument("--exact-eta", action="store_true",
                   help="use eta_r at full precision instead of rounding it up to 3 decimals")
    p.set_defaults(fn=cmd_bounds)
    p = sub.add_parser("portrait")
    p.add_argument("word")
    p.add_argument("--K", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--r", type=int)
    p.set_defaults(fn=cmd_portrait)
    p = sub.add_parser("shadow")
    p.add_argument("word")
    p.add_argument("--r", type=int)
    p.set_defaults(fn=cmd_shadow)
    p = sub.add_parser("shorten")
    p.add_argument("word")
    p.add_argument("--variant", choices=["34", "23"], default="34")
    p.add_argument("--r", type=int)
    p.set_defaults(fn=cmd_shorten)
    p = sub.add_parser("lowerbound")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(fn=cmd_lowerbound)
    p = sub.add_parser("selftest")
    p.add_argument("--n", type=int, default=6)
    p.set_defaults(fn=cmd_selftest)
    return ap


# bounds needs no group; avoid building one
_NO_GROUP = {"bounds"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        ctx = None if args.cmd in _NO_GROUP else Context(args)
        return args.fn(ctx, args)
    except NotLevelStabilizing as exc:
        print(f"error[{exc.code}]: {exc} path={list(exc.path)}", file=sys.stderr)
        return exc.exit_code
    except SpinalError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
