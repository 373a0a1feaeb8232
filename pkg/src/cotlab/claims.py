"""Registered verification procedures, one per acceptance criterion.

Each procedure takes an options mapping (sizes, seed offset) and returns
``ResultRecord``s whose pass flags follow from value and window alone.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import rng
from .classes import alternating as alt
from .classes import glue as glue_mod
from .classes import hard
from .classes import linear as lin
from .classes import taxonomy as tax
from .classes.rules import exact_probability
from .core import Generator, e2e, generation_closure
from .dims import (
    CotGameValue,
    FiniteClassTable,
    LittlestoneSolver,
    LittlestoneTree,
    base_table,
    inflate_tree,
    littlestone_dim,
    littlestone_dim_multiclass,
    realized_branches,
    ssp_bound,
    tree_is_shattered,
)
from .experiments import ResultRecord, at_least, at_most, exact, taxonomy_pool
from .game import (
    FeedbackMode,
    LatchAdversary,
    MinimaxLearner,
    RandomAdversary,
    TreeAdversary,
    exhaustive_worst_case,
    minimax_value,
    run_game,
)
from .learners import (
    CotReduction,
    Halving,
    SoaCot,
    SuffixProjection,
    TaxonomyLearner,
    ltf_halving_base,
    replay_base_mistakes,
)
from .random_classes import RandomClassConfig, random_class
from .stochastic import (
    DETERMINISTIC_E2E_LEARNERS,
    direct_expected_regret_exact,
    direct_regret_estimates,
    e2e_one_prob,
    e2e_one_prob_recursive,
    horizon_for,
    kl_pair,
    kl_pair_direct,
    sample_final_bits,
    theory_floor,
    worst_target_regret,
)
from .tokens import Bits, all_strings, strings_up_to

E2E, COT = FeedbackMode.E2E, FeedbackMode.COT


@dataclass(frozen=True)
class Claim:
    id: str
    criterion: int
    title: str
    run: Callable[[dict], list[ResultRecord]]


def _random_suite(n: int, seed0: int):
    """The seeded random classes shared by the CoT-bound and characterisation claims."""
    for s in range(seed0, seed0 + n):
        M = (1, 2, 3)[s % 3]
        gens, pool = random_class(s, RandomClassConfig(M=M))
        yield s, M, gens, pool


# --------------------------------------------------------------------------
# 1. latch


def claim_latch(opts: dict) -> list[ResultRecord]:
    Ms = range(2, int(opts.get("max_M", 8)) + 1)
    checks = fails = 0
    first_fail = ""
    for m in (1, 2, 3):
        zs = all_strings(m)
        for v in itertools.product(range(-2, 3), repeat=m):
            for c in range(-3, 4):
                inner = lin.LinearGen(v, c)
                g = lin.latch_embed(v, c).generator()
                for z in zs:
                    want = inner(z)
                    x = lin.latch_instance(z)
                    for M in Ms:
                        checks += 1
                        if e2e(g, x, M) != want:
                            fails += 1
                            first_fail = first_fail or f"v={v} c={c} z={z} M={M}"
    cid = "latch"
    return [
        exact(cid, "failures", fails, 0, cid, first_fail),
        at_least(cid, "checks", checks, 1, cid),
    ]


# --------------------------------------------------------------------------
# 2-3. CoT bound and the online characterisation


def claim_cot_bound(opts: dict) -> list[ResultRecord]:
    n = int(opts.get("classes", 200))
    worst_dim = worst_soa = -math.inf
    for s, M, gens, pool in _random_suite(n, int(opts.get("seed", 0))):
        L = littlestone_dim(base_table(gens, pool, M))
        cot_table = FiniteClassTable.from_generators(gens, pool, "cot", M)
        Lc = littlestone_dim_multiclass(cot_table)
        soa = exhaustive_worst_case(lambda: SoaCot(gens, M, pool), gens, pool, M, COT, horizon=len(pool))
        worst_dim = max(worst_dim, Lc - L)
        worst_soa = max(worst_soa, soa - L)
    cid = "cot-bound"
    return [
        at_most(cid, "max(L_cot - L_base)", worst_dim, 0, cid, f"{n} classes"),
        at_most(cid, "max(soa_cot_worst_case - L_base)", worst_soa, 0, cid, f"{n} classes"),
    ]


def claim_online_char(opts: dict) -> list[ResultRecord]:
    n = int(opts.get("classes", 200))
    bad_e2e = bad_base = bad_cot = 0
    for s, M, gens, pool in _random_suite(n, int(opts.get("seed", 0))):
        e2e_table = FiniteClassTable.from_generators(gens, pool, "e2e", M)
        bad_e2e += littlestone_dim(e2e_table) != minimax_value(e2e_table)
        bt = base_table(gens, pool, M)
        bad_base += littlestone_dim(bt) != minimax_value(bt)
        ct = FiniteClassTable.from_generators(gens, pool, "cot", M)
        bad_cot += CotGameValue(ct).value() != minimax_value(ct)
    cid = "online-char"
    return [
        exact(cid, "e2e_L_vs_minimax_mismatches", bad_e2e, 0, cid, f"{n} classes"),
        exact(cid, "base_L_vs_minimax_mismatches", bad_base, 0, cid, f"{n} classes"),
        exact(cid, "cot_value_vs_minimax_mismatches", bad_cot, 0, cid, f"{n} classes"),
    ]


# --------------------------------------------------------------------------
# 4-5. SSP for trees and tree inflation


_TREE_TAG = rng.stream_tag("ssp-tree")


def random_tree(seed: int, instances: list, max_depth: int = 12, keep: float = 0.8) -> LittlestoneTree:
    """A random full binary tree of depth <= max_depth with random instance labels."""
    g = rng.generator(seed, _TREE_TAG)
    depth = int(g.integers(1, max_depth + 1))
    nodes = {(): instances[int(g.integers(len(instances)))]}
    frontier = [()]
    while frontier:
        p = frontier.pop()
        if len(p) + 1 >= depth:
            continue
        if p and g.random() > keep:
            continue
        for c in (0, 1):
            q = p + (c,)
            nodes[q] = instances[int(g.integers(len(instances)))]
            frontier.append(q)
    return LittlestoneTree(nodes)


def claim_ssp_trees(opts: dict) -> list[ResultRecord]:
    n = int(opts.get("pairs", 500))
    seed0 = int(opts.get("seed", 0))
    worst = -math.inf
    max_depth = 0
    for s in range(seed0, seed0 + n):
        if s % 2:
            gens, pool = random_class(s, RandomClassConfig(max_members=16, M=(1, 2, 3)[s % 3]))
            insts = generation_closure(pool, (1, 2, 3)[s % 3])
        else:
            k = 2 + s % 3
            insts = strings_up_to(2)[: k + 1]
            g = rng.generator(s, _TREE_TAG, 1)
            masks = sorted(set(int(v) for v in g.integers(0, 2 ** len(insts), size=int(g.integers(1, 17)))))
            gens = [
                Generator.from_table({x: (mk >> j) & 1 for j, x in enumerate(insts)}, f"c{mk}") for mk in masks
            ]
        tree = random_tree(s, insts)
        L = littlestone_dim(FiniteClassTable.from_generators(gens, tree.instances(), "base"))
        B = len(realized_branches(gens, tree))
        worst = max(worst, B - ssp_bound(tree.depth, L))
        max_depth = max(max_depth, tree.depth)
    cid = "ssp-trees"
    return [at_most(cid, "max(|B_F(T)| - ssp_bound(depth, L))", worst, 0, cid, f"{n} pairs, depth <= {max_depth}")]


def truncate_tree(tree: LittlestoneTree, depth: int) -> LittlestoneTree:
    nodes = {p: x for p, x in tree.nodes.items() if len(p) < depth}
    labels = None if tree.edge_labels is None else {p: l for p, l in tree.edge_labels.items() if p in nodes}
    return LittlestoneTree(nodes, labels)


def claim_inflation(opts: dict) -> list[ResultRecord]:
    want = int(opts.get("trees", 60))
    seed0 = int(opts.get("seed", 0))
    lower_viol = upper_viol = 0
    done = 0
    s = seed0
    while done < want and s < seed0 + 50 * want:
        M = (1, 2, 3)[s % 3]
        gens, pool = random_class(s, RandomClassConfig(max_members=16, max_pool=4, M=M))
        s += 1
        table = FiniteClassTable.from_generators(gens, pool, "e2e", M).dedup()
        L_e2e = littlestone_dim(table)
        if L_e2e == 0:
            continue
        m = min(L_e2e, 3)
        base = truncate_tree(LittlestoneSolver(table).witness_tree(), m)
        big = inflate_tree(base, M, gens)
        B = len(realized_branches(gens, big))
        L = littlestone_dim(FiniteClassTable.from_generators(gens, big.instances(), "base"))
        lower_viol += B < 2**m
        upper_viol += B > ssp_bound(m * M, L)
        done += 1
    cid = "inflation"
    return [
        at_least(cid, "shattered_base_trees", done, want, cid),
        exact(cid, "lower_violations(|B| < 2^m)", lower_viol, 0, cid),
        exact(cid, "upper_violations(|B| > ssp(mM, L))", upper_viol, 0, cid),
    ]


# --------------------------------------------------------------------------
# 6-7. taxonomy


def _taxonomy_game(p: tax.TaxonomyParams, M: int, s_values: list, budget: int) -> tuple[int, int]:
    gens = tax.taxonomy_window(p, s_values)
    pool = taxonomy_pool(p, s_values)
    table = FiniteClassTable.from_generators(gens, pool, "e2e", M)
    rows = len(set(table.rows))
    worst = exhaustive_worst_case(lambda: TaxonomyLearner(p, M), gens, pool, M, E2E, horizon=rows + 2, budget=budget)
    return worst, 1 + 10 * p.rate(M) + 1


def claim_taxonomy(opts: dict) -> list[ResultRecord]:
    cid = "taxonomy"
    out: list[ResultRecord] = []
    p = tax.TaxonomyParams(s_max=4096)
    M = int(opts.get("M", 256))
    s_values = list(opts.get("s_values", [M, 300, 2600]))
    gens = tax.taxonomy_window(p, s_values)
    L = littlestone_dim(FiniteClassTable.from_generators(gens, taxonomy_pool(p, s_values), "base"))
    out.append(exact(cid, "windowed_base_L", L, 1, cid, f"s in {s_values}"))

    r = p.rate(M)
    realized = 0
    for y in itertools.product((0, 1), repeat=r):
        try:
            _, rep = tax.taxonomy_shatter_witness(p, M, y)
            realized += rep.ok
        except tax.WitnessError:
            pass
    out.append(exact(cid, f"A_M_labelings_realized(M={M}, r={r})", realized, 2**r, cid))
    # the same labelings through the e2e table of the window itself
    table = FiniteClassTable.from_generators(gens, tax.shatter_set(p, M), "e2e", M)
    out.append(exact(cid, "A_M_labelings_in_window_table", len(set(table.rows)), 2**r, cid))

    budget = int(opts.get("budget", 2_000_000))
    for M_game, window in ((M, s_values), (3, [256, 257])):
        worst, bound = _taxonomy_game(p, M_game, window, budget)
        out.append(at_most(cid, f"learner_worst_case(M={M_game})", worst, bound, cid, f"s in {window}"))
    return out


def claim_second_mistake(opts: dict) -> list[ResultRecord]:
    p = tax.TaxonomyParams(s_max=4096)
    pairs = [(s, M) for M in range(1, 10) for s in (256, 2600)] + [(2600, 256)]
    checks = fails = 0
    first = ""
    for s, M in pairs:
        assert s >= 10 * M
        for k in p.K(s):
            g = tax.taxonomy_member(p, s, k)
            for i in range(0, k + 1):
                checks += 1
                got = e2e(g, tax.bucket_instance(s, i), M)
                if got != int(M == k - i + 1):
                    fails += 1
                    first = first or f"s={s} k={k} i={i} M={M}"
    cid = "second-mistake"
    return [exact(cid, "failures", fails, 0, cid, first), at_least(cid, "checks", checks, 1, cid)]


# --------------------------------------------------------------------------
# 8. alternating horizons


_ALT_TAG = rng.stream_tag("alternating-strings")


def random_strings(seed: int, count: int, max_len: int = 30) -> list[Bits]:
    g = rng.generator(seed, _ALT_TAG)
    out = []
    for _ in range(count):
        n = int(g.integers(0, max_len + 1))
        out.append(Bits.of([int(b) for b in g.integers(0, 2, size=n)]))
    return out


def claim_alternating(opts: dict) -> list[ResultRecord]:
    cid = "alternating"
    seed = int(opts.get("seed", 0))
    base = alt.AlternatingParams(m_max=3, n_max=3)
    members = [alt.alternating_member(a) for a in alt.all_alphas(base)]
    out = []
    for m in range(base.m_min, base.m_max + 1):
        M = 2 * m
        depth = base.n_max + 1
        tree = LittlestoneTree.perfect(depth, lambda path: alt.u(m, len(path)))
        table = FiniteClassTable.from_generators(members, tree.instances(), "e2e", M)
        out.append(exact(cid, f"depth{depth}_tree_shattered(M={M})", int(tree_is_shattered(table, tree)), 1, cid))
    n_sample = int(opts.get("members", 64))
    g = rng.generator(seed, rng.stream_tag("alternating-sample"))
    pick = sorted(g.choice(len(members), size=min(n_sample, len(members)), replace=False))
    sample = [members[i] for i in pick]
    instances = alt.special_instances(base) + random_strings(seed, int(opts.get("strings", 1000)))
    for M in (5, 7):
        table = FiniteClassTable.from_generators(sample, instances, "e2e", M)
        out.append(
            exact(cid, f"distinct_e2e_rows(M={M})", len(set(table.rows)), 1, cid, f"{len(sample)} members")
        )
        out.append(exact(cid, f"e2e_L(M={M})", littlestone_dim(table.dedup()), 0, cid))
    return out


# --------------------------------------------------------------------------
# 9. hard class


def claim_hard_class(opts: dict) -> list[ResultRecord]:
    cid = "hard-class"
    params = hard.HardClassParams(
        d=1, M=int(opts.get("M", 8)), N=int(opts.get("N", 100_000)), seed=int(opts.get("seed", 0)) + 7
    )
    sample = hard.hard_class_sample(params)
    rules = hard.preregistered_rules(params.M)
    worst_z = 0.0
    outside = 0
    for name, rule in rules:
        prob = float(exact_probability(rule, params.p_one))
        count = sample.count(rule)
        sd = math.sqrt(params.N * prob * (1 - prob))
        z = abs(count - params.N * prob) / sd if sd > 0 else (0.0 if count == params.N * prob else math.inf)
        worst_z = max(worst_z, z)
        outside += z > 4
    labelings = {(int(a), int(b)) for a, b in zip(sample.e2e_column(1), sample.e2e_column(2))}
    return [
        at_most(cid, "rule_count", len(rules), 50, cid),
        exact(cid, "rules_outside_4SE", outside, 0, cid, f"max |z| = {worst_z:.3f}"),
        exact(cid, "e2e_labelings_on_x1_x2", len(labelings), 4, cid),
    ]


# --------------------------------------------------------------------------
# 10. gluing


def _cube_class(n: int, length: int, tag: str) -> tuple[list[Generator], list[Bits]]:
    pool = [x for x in strings_up_to(length) if len(x) >= 1][:n]
    gens = [Generator.from_table({x: (mk >> j) & 1 for j, x in enumerate(pool)}, f"{tag}{mk}") for mk in range(2**n)]
    return gens, pool


def claim_glue(opts: dict) -> list[ResultRecord]:
    cid = "glue"
    seed = int(opts.get("seed", 0))
    cases = [
        (_cube_class(2, 2, "a"), _cube_class(3, 2, "b")),
        (random_class(seed + 11, RandomClassConfig(M=1)), random_class(seed + 12, RandomClassConfig(M=1))),
        (_cube_class(1, 1, "c"), random_class(seed + 13, RandomClassConfig(M=1))),
    ]
    overlap = 0
    excess = -math.inf
    for (ga, pa), (gb, pb) in cases:
        sa = glue_mod.support_length(ga)
        parts = [glue_mod.GluePart(tuple(ga), 0), glue_mod.GluePart(tuple(gb), sa + 1)]
        glued = glue_mod.glue_classes(parts)
        shifted_a, shifted_b = glued[: len(ga)], glued[len(ga) :]
        top = sa + 1 + glue_mod.support_length(gb)
        candidates = strings_up_to(top)
        overlap += len(glue_mod.support(shifted_a, candidates) & glue_mod.support(shifted_b, candidates))
        da = littlestone_dim(base_table(ga, pa, 1))
        db = littlestone_dim(base_table(gb, pb, 1))
        L = littlestone_dim(FiniteClassTable.from_generators(glued, candidates, "base"))
        excess = max(excess, L - (max(da, db) + 1))
    return [
        exact(cid, "support_overlap", overlap, 0, cid, f"{len(cases)} glued pairs"),
        at_most(cid, "max(L_glued - max_part_L - 1)", excess, 0, cid),
    ]


# --------------------------------------------------------------------------
# 11. CoT reduction


def claim_cot_reduction(opts: dict) -> list[ResultRecord]:
    cid = "cot-reduction"
    n = int(opts.get("games", 100))
    seed0 = int(opts.get("seed", 0))
    inject_fail = bound_excess = mode_mismatch = 0
    excess_max = -math.inf
    total_mistakes = 0
    for s in range(seed0, seed0 + n):
        M = (1, 2, 3)[s % 3]
        gens, pool = random_class(s, RandomClassConfig(M=M))
        bt = base_table(gens, pool, M)
        factory = lambda: Halving.from_table(bt)
        transcripts = []
        for incremental in (True, False):
            learner = CotReduction(factory, M, incremental=incremental)
            adv = RandomAdversary(gens, pool, seed=s)
            tr = run_game(learner, adv, M, COT, horizon=int(opts.get("horizon", 20)), seed=s)
            transcripts.append([(r.prediction, r.mistake) for r in tr.rounds])
            if incremental:
                base_mistakes = set(replay_base_mistakes(factory, learner.transcript))
                positions = [c.position for c in learner.charges]
                ok = (
                    len(positions) == tr.mistakes
                    and len(set(positions)) == len(positions)
                    and set(positions) <= base_mistakes
                )
                inject_fail += not ok
                bound = factory().bound
                excess_max = max(excess_max, tr.mistakes - bound)
                total_mistakes += tr.mistakes
        mode_mismatch += transcripts[0] != transcripts[1]
    return [
        exact(cid, "charging_injection_failures", inject_fail, 0, cid, f"{n} games, {total_mistakes} mistakes"),
        at_most(cid, "max(mistakes - halving_bound)", excess_max, 0, cid),
        exact(cid, "incremental_vs_from_scratch_mismatches", mode_mismatch, 0, cid),
    ]


# --------------------------------------------------------------------------
# 12. linear class


def latch_pool(d_inner: int) -> list[Bits]:
    return [lin.latch_instance(z) for z in all_strings(d_inner)]


def claim_linear(opts: dict) -> list[ResultRecord]:
    cid = "linear"
    d = 3
    out = []
    reps = lin.ltf_representatives(d)
    budget = int(opts.get("budget", 2_000_000))
    # the z∘10 pool only exposes the last bit of z to a 3-bit window; {0,1}^3 exposes the full truth table
    pools = {"z10": [z + "10" for z in all_strings(d)], "cube": all_strings(d)}
    for (pool_name, pool), M in itertools.product(pools.items(), (2, 3)):
        gens = [g.generator() for g in reps]
        table = FiniteClassTable.from_generators(gens, pool, "e2e", M)
        keep: dict[tuple, Generator] = {}
        for g, row in zip(gens, table.rows):
            keep.setdefault(row, g)
        dedup = list(keep.values())
        dt = FiniteClassTable.from_generators(dedup, pool, "e2e", M)
        worst = exhaustive_worst_case(lambda: Halving.from_table(dt), dedup, pool, M, E2E, len(pool), budget)
        bound = int(math.floor(math.log2(len(dedup))))
        out.append(at_most(cid, f"halving_worst_case(d=3, M={M}, pool={pool_name})", worst, bound, cid, f"{len(dedup)} e2e tables"))

    inner_class = lin.ltf_representatives(1)
    inner_gens = [g.generator() for g in inner_class]
    inner_pool = all_strings(1)
    for depth in (1, 2):
        tree = truncate_tree(LittlestoneTree({(): "0", (0,): "1", (1,): "1"}), depth)
        inner_table = FiniteClassTable.from_generators(inner_gens, inner_pool, "e2e", 1)
        forced = depth if tree_is_shattered(inner_table, tree) else 0
        for M in (2, 3):
            for mode in (E2E, COT):
                declared = [lin.latch_embed(g.w, g.b).generator() for g in inner_class]
                lpool = latch_pool(1)
                learners = {
                    "halving": lambda: Halving.from_generators(declared, M),
                    "minimax": lambda: MinimaxLearner(declared, lpool, M, mode),
                }
                if mode is COT:
                    learners["soa-cot"] = lambda: SoaCot(declared, M, lpool)
                    learners["reduction"] = lambda: CotReduction(
                        lambda: SuffixProjection(ltf_halving_base(3), 3), M
                    )
                fewest = math.inf
                for name, make in learners.items():
                    inner = TreeAdversary(tree, inner_gens, 1)
                    adv = LatchAdversary(inner, inner_class, M)
                    tr = run_game(make(), adv, M, mode, horizon=depth)
                    fewest = min(fewest, tr.mistakes)
                out.append(
                    at_least(
                        cid,
                        f"latch_forced_mistakes(depth={depth}, M={M}, {mode.value})",
                        fewest,
                        forced,
                        cid,
                        f"min over {sorted(learners)}",
                    )
                )
    return out


# --------------------------------------------------------------------------
# 13-14. stochastic separation and the KL bound


def claim_stoch_sep(opts: dict) -> list[ResultRecord]:
    cid = "stoch-sep"
    seed = int(opts.get("seed", 0))
    out = []
    bad = sum(e2e_one_prob(s, M) != e2e_one_prob_recursive(s, M) for s in (-1, 1) for M in range(41))
    out.append(exact(cid, "closed_form_vs_recursion_mismatches(M<=40)", bad, 0, cid))

    trials = int(opts.get("mc_trials", 100_000))
    worst_z = 0.0
    for s in (-1, 1):
        for M in range(1, 8):
            bits = sample_final_bits(s, M, (trials,), seed, counter=M, trajectory=True)
            q = float(e2e_one_prob(s, M))
            se = math.sqrt(q * (1 - q) / trials)
            worst_z = max(worst_z, abs(bits.mean() - q) / se)
    out.append(at_most(cid, "max_trajectory_mc_z(M<=7)", worst_z, 4.0, cid, f"{trials} trials"))

    T = int(opts.get("direct_T", 10_000))
    n_seeds = int(opts.get("direct_seeds", 200))
    per_seed_trials = int(opts.get("direct_trials", 25))
    for s in (1, -1):
        est = direct_regret_estimates(s, T, range(seed, seed + n_seeds), per_seed_trials)
        frac = float(np.mean(est <= 5))
        out.append(
            at_least(
                cid,
                f"direct_fraction_seeds_regret<=5(sigma={s:+d})",
                frac,
                0.99,
                cid,
                f"{n_seeds} seeds x {per_seed_trials} runs, max {est.max():.3f}",
            )
        )
        out.append(at_most(cid, f"direct_exact_expected_regret(sigma={s:+d})", direct_expected_regret_exact(s, T), 5, cid))

    mc = int(opts.get("floor_trials", 10_000))
    for M in (1, 3):
        T_M = horizon_for(M)
        floor = theory_floor(M, T_M)
        margin = math.inf
        weakest = ""
        for name, factory in DETERMINISTIC_E2E_LEARNERS.items():
            _, worst = worst_target_regret(factory, M, seed=seed, trials=mc, T=T_M)
            gap = worst.regret + 3 * worst.se - floor
            if gap < margin:
                margin, weakest = gap, f"{name}: {worst.regret:.4f} vs floor {floor:.4f}"
        out.append(at_least(cid, f"min_learner(worst_regret + 3SE - floor)(M={M}, T={T_M})", margin, 0, cid, weakest))
    return out


def claim_kl_bound(opts: dict) -> list[ResultRecord]:
    cid = "kl-bound"
    n = int(opts.get("grid", 1000))
    viol = 0
    worst_rel = 0.0
    for i in range(1, n + 1):
        d = 0.25 * i / n
        k = kl_pair(d)
        viol += k > 16 * d * d
        worst_rel = max(worst_rel, abs(k - kl_pair_direct(d)) / k)
    return [
        exact(cid, "violations(kl > 16 delta^2)", viol, 0, cid, f"{n}-point grid on (0, 1/4]"),
        at_most(cid, "closed_form_vs_definition_rel_err", worst_rel, 1e-9, cid),
    ]


CLAIMS: dict[str, Claim] = {
    c.id: c
    for c in [
        Claim("latch", 1, "latch embedding, exhaustive grid", claim_latch),
        Claim("cot-bound", 2, "CoT dimension and SOA-CoT below base dimension", claim_cot_bound),
        Claim("online-char", 3, "Littlestone dimension equals the minimax game value", claim_online_char),
        Claim("ssp-trees", 4, "SSP inequality for trees", claim_ssp_trees),
        Claim("inflation", 5, "tree inflation chain", claim_inflation),
        Claim("taxonomy", 6, "taxonomy class dimension, shattering and learner", claim_taxonomy),
        Claim("second-mistake", 7, "second-mistake characterisation", claim_second_mistake),
        Claim("alternating", 8, "alternating horizons", claim_alternating),
        Claim("hard-class", 9, "hard class rule probabilities", claim_hard_class),
        Claim("glue", 10, "gluing", claim_glue),
        Claim("cot-reduction", 11, "CoT reduction charging", claim_cot_reduction),
        Claim("linear", 12, "linear class halving and latch adversary", claim_linear),
        Claim("stoch-sep", 13, "stochastic separation", claim_stoch_sep),
        Claim("kl-bound", 14, "KL bound", claim_kl_bound),
    ]
}


def run_claim(claim_id: str, opts: Optional[dict] = None) -> tuple[list[ResultRecord], float]:
    if claim_id not in CLAIMS:
        raise KeyError(f"unknown claim {claim_id!r}; known: {', '.join(CLAIMS)}")
    t0 = time.perf_counter()
    recs = CLAIMS[claim_id].run(dict(opts or {}))
    return recs, time.perf_counter() - t0
