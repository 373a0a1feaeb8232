"""Command-line experiment runner: ``python -m cotlab {dims,game,verify,stochastic}``.

Exit codes: 0 when every record passes, 1 when any record fails or a budget
runs out, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from typing import Optional, Sequence

from . import claims as claims_mod
from .dims import (
    CotGameValue,
    FiniteClassTable,
    LittlestoneSolver,
    base_table,
    littlestone_dim,
    littlestone_dim_multiclass,
    vc_dim,
)
from .experiments import (
    Budgets,
    ConfigError,
    ExperimentManifest,
    ResultRecord,
    at_least,
    at_most,
    build_class,
    exact,
    records_csv,
    write_atomic,
)
from .game import (
    BudgetExceeded,
    FeedbackMode,
    FixedTargetAdversary,
    LatchAdversary,
    MinimaxLearner,
    RandomAdversary,
    RealizabilityError,
    TreeAdversary,
    exhaustive_worst_case,
    minimax_value,
    run_game,
)
from .learners import CotReduction, Halving, SoaCot, TaxonomyLearner

log = logging.getLogger("cotlab")


class BudgetError(RuntimeError):
    def __init__(self, message: str, partial: list):
        super().__init__(message)
        self.partial = partial


def _deadline(budgets: Budgets) -> float:
    return time.monotonic() + budgets.time_s


def _check_time(deadline: float, records: list, what: str) -> None:
    if time.monotonic() > deadline:
        raise BudgetError(f"time budget exhausted before {what}", records)


# --------------------------------------------------------------------------
# dims


def cmd_dims(man: ExperimentManifest) -> list[ResultRecord]:
    if man.cls is None:
        raise ConfigError("dims needs a class section")
    b = build_class(man.cls, man.M, man.budgets)
    M = b.M or man.M
    gens, pool = b.generators, b.pool
    deadline = _deadline(man.budgets)
    recs: list[ResultRecord] = []
    exp = man.id
    want = set(man.dims)
    unknown = want - {"base", "cot", "e2e", "vc", "cot-game"}
    if unknown:
        raise ConfigError(f"unknown dims {sorted(unknown)}")
    e2e_table = FiniteClassTable.from_generators(gens, pool, "e2e", M).dedup()
    expect = man.options.get("expect", {})

    def rec(metric, value):
        lo = hi = None
        if metric in expect:
            lo = hi = expect[metric]
        recs.append(ResultRecord(exp, metric, value, lo, hi, man.options.get("claim", "")))

    if "base" in want:
        bt = base_table(gens, pool, M)
        if len(bt.pool) > man.budgets.max_pool * 64:
            raise BudgetError(f"base table pool {len(bt.pool)} exceeds budget", recs)
        rec("base_L", littlestone_dim(bt.dedup()))
        _check_time(deadline, recs, "cot")
    if "cot" in want:
        ct = FiniteClassTable.from_generators(gens, pool, "cot", M).dedup()
        rec("cot_L", littlestone_dim_multiclass(ct))
        _check_time(deadline, recs, "cot-game")
    if "cot-game" in want:
        ct = FiniteClassTable.from_generators(gens, pool, "cot", M).dedup()
        rec("cot_game_value", CotGameValue(ct).value())
        _check_time(deadline, recs, "e2e")
    if "e2e" in want:
        L = littlestone_dim(e2e_table)
        rec("e2e_L", L)
        if len(e2e_table) <= int(man.options.get("oracle_max_rows", 16)):
            recs.append(exact(exp, "e2e_L_minus_minimax", L - minimax_value(e2e_table), 0, "online-char"))
        _check_time(deadline, recs, "vc")
    if "vc" in want:
        rec("e2e_VC", vc_dim(e2e_table))
    return recs


# --------------------------------------------------------------------------
# game


def _learner(name: str, man: ExperimentManifest, bundle, M: int, mode: FeedbackMode):
    """(factory, mistake bound or None)."""
    gens, pool = bundle.generators, bundle.pool
    if name == "minimax":
        if mode is FeedbackMode.E2E:
            bound = littlestone_dim(FiniteClassTable.from_generators(gens, pool, "e2e", M).dedup())
        else:
            bound = CotGameValue(FiniteClassTable.from_generators(gens, pool, "cot", M).dedup()).value()
        return (lambda: MinimaxLearner(gens, pool, M, mode)), bound
    if name == "soa-cot":
        if mode is not FeedbackMode.COT:
            raise ConfigError("soa-cot needs mode: cot")
        return (lambda: SoaCot(gens, M, pool)), littlestone_dim(base_table(gens, pool, M))
    if name == "halving":
        h = Halving.from_generators(gens, M)
        return (lambda: Halving.from_generators(gens, M)), h.bound
    if name == "taxonomy":
        p = bundle.meta.get("params")
        if p is None or man.cls.name != "taxonomy":
            raise ConfigError("the taxonomy learner needs the taxonomy class")
        return (lambda: TaxonomyLearner(p, M)), 1 + 10 * p.rate(M) + 1
    if name == "reduction":
        if mode is not FeedbackMode.COT:
            raise ConfigError("reduction needs mode: cot")
        bt = base_table(gens, pool, M)
        inc = bool(man.options.get("incremental", True))
        return (lambda: CotReduction(lambda: Halving.from_table(bt), M, inc)), Halving.from_table(bt).bound
    raise ConfigError(f"unknown learner {name!r}")


def cmd_game(man: ExperimentManifest, out_dir: Optional[str] = None) -> list[ResultRecord]:
    if man.cls is None:
        raise ConfigError("game needs a class section")
    try:
        mode = FeedbackMode(man.mode)
    except ValueError:
        raise ConfigError(f"mode must be e2e or cot, got {man.mode!r}") from None
    b = build_class(man.cls, man.M, man.budgets)
    M = b.M or man.M
    gens, pool = b.generators, b.pool
    exp = man.id
    factory, bound = _learner(man.learner, man, b, M, mode)
    claim = man.options.get("claim", "")
    recs: list[ResultRecord] = []
    horizon = man.horizon or len(pool) + 2

    if man.adversary == "exhaustive":
        try:
            worst = exhaustive_worst_case(factory, gens, pool, M, mode, horizon, man.budgets.max_nodes)
        except BudgetExceeded as e:
            partial = [ResultRecord(exp, "worst_case_partial", e.partial, None, None, claim, "budget exceeded")]
            raise BudgetError(str(e), partial) from None
        lo = bound if man.learner == "minimax" else None
        recs.append(ResultRecord(exp, "worst_case_mistakes", worst, lo, bound, claim, f"horizon {horizon}"))
        return recs

    transcripts = []
    seeds = man.seeds or [0]
    for seed in seeds:
        lower = None
        if man.adversary == "tree":
            table = FiniteClassTable.from_generators(gens, pool, "e2e", M).dedup()
            tree = LittlestoneSolver(table).witness_tree()
            adv = TreeAdversary(tree, gens, M)
            lower = tree.depth
            h = tree.depth
        elif man.adversary == "random":
            adv = RandomAdversary(gens, pool, seed)
            h = horizon
        elif man.adversary == "fixed":
            target = gens[int(man.options.get("target", 0)) % len(gens)]
            adv = FixedTargetAdversary(target, pool, gens)
            h = len(pool)
        elif man.adversary == "latch":
            adv, lower = _latch_adversary(man, M)
            h = lower
        else:
            raise ConfigError(f"unknown adversary {man.adversary!r}")
        # the output location is not part of the experiment
        config = {"manifest": {k: v for k, v in man.to_dict().items() if k != "out"}}
        try:
            tr = run_game(factory(), adv, M, mode, h, seed=seed, config=config)
        except RealizabilityError as e:
            recs.append(ResultRecord(exp, "realizable", 0, 1, 1, claim, str(e)))
            continue
        transcripts.append(tr)
        recs.append(exact(exp, f"flags_consistent[seed={seed}]", int(tr.check_flags()), 1, claim))
        recs.append(ResultRecord(exp, f"mistakes[seed={seed}]", tr.mistakes, lower, bound, claim))
    if out_dir is not None:
        text = "".join(t.to_jsonl() for t in transcripts)
        write_atomic(os.path.join(out_dir, f"{exp}_transcript.jsonl"), text)
    return recs


def _latch_adversary(man: ExperimentManifest, M: int):
    from .classes import linear as lin
    from .dims import LittlestoneTree
    from .tokens import all_strings

    d = int(man.cls.params.get("d", 3))
    m = d - 2
    if m < 1:
        raise ConfigError("latch adversary needs d >= 3")
    inner_class = lin.ltf_representatives(m)
    inner_gens = [g.generator() for g in inner_class]
    table = FiniteClassTable.from_generators(inner_gens, all_strings(m), "e2e", 1).dedup()
    tree = LittlestoneSolver(table).witness_tree()
    depth = int(man.options.get("inner_depth", tree.depth))
    tree = LittlestoneTree({p: x for p, x in tree.nodes.items() if len(p) < depth})
    return LatchAdversary(TreeAdversary(tree, inner_gens, 1), inner_class, M), depth


# --------------------------------------------------------------------------
# stochastic


def cmd_stochastic(man: ExperimentManifest, out_dir: Optional[str] = None) -> list[ResultRecord]:
    from . import stochastic as st

    o = man.options
    Ms = [int(v) for v in o.get("Ms", [man.M])]
    for M in Ms:
        if M % 2 == 0:
            raise ConfigError(f"stochastic runs need odd M, got {M}")
    seed = int(man.seeds[0]) if man.seeds else 0
    trials = int(o.get("trials", 10_000))
    names = o.get("learners", sorted(st.DETERMINISTIC_E2E_LEARNERS))
    for n in names:
        if n not in st.DETERMINISTIC_E2E_LEARNERS:
            raise ConfigError(f"unknown learner {n!r}; known: {sorted(st.DETERMINISTIC_E2E_LEARNERS)}")
    exp = man.id
    recs: list[ResultRecord] = []
    reports = []
    for M in Ms:
        for s in (-1, 1):
            recs.append(exact(exp, f"q_closed_minus_recursion(M={M},sigma={s:+d})",
                              float(st.e2e_one_prob(s, M) - st.e2e_one_prob_recursive(s, M)), 0, "stoch-sep"))
        T = int(o.get("T", st.horizon_for(M)))
        floor = st.theory_floor(M, T)
        for n in names:
            per_sigma, worst = st.worst_target_regret(st.DETERMINISTIC_E2E_LEARNERS[n], M, seed, trials, T)
            reports += [per_sigma[-1], per_sigma[1]]
            recs.append(at_least(exp, f"worst_regret+3se-floor[{n},M={M},T={T}]",
                                 worst.regret + 3 * worst.se - floor, 0, "stoch-sep"))
    if o.get("direct", True):
        T = int(o.get("direct_T", 10_000))
        for s in (-1, 1):
            r = st.simulate_direct_game(st.EmpiricalMeanLearner, s, T, seed=seed, trials=int(o.get("direct_trials", 5)))
            reports.append(r)
            recs.append(at_most(exp, f"direct_regret(sigma={s:+d},T={T})", r.regret, 5, "stoch-sep"))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{exp}_regret.csv")
        tmp = path + ".part"
        st.write_reports(reports, tmp)
        os.replace(tmp, path)
    return recs


# --------------------------------------------------------------------------
# verify


def cmd_verify(claim_id: str, man: Optional[ExperimentManifest] = None, seed: Optional[int] = None) -> list[ResultRecord]:
    opts = dict(man.options) if man is not None else {}
    if seed is not None:
        opts["seed"] = seed
    ids = list(claims_mod.CLAIMS) if claim_id == "all" else [claim_id]
    for cid in ids:
        if cid not in claims_mod.CLAIMS:
            raise ConfigError(f"unknown claim {cid!r}; known: {', '.join(claims_mod.CLAIMS)}")
    out: list[ResultRecord] = []
    for cid in ids:
        recs, dt = claims_mod.run_claim(cid, opts)
        log.info("claim %s finished in %.1fs", cid, dt)
        out += recs
    return out


# --------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cotlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("dims", "game", "verify", "stochastic"):
        p = sub.add_parser(name)
        if name == "verify":
            p.add_argument("claim", nargs="?", default=None, help="claim id or 'all'")
        p.add_argument("--manifest", help="YAML manifest path")
        p.add_argument("--seed", type=int, help="override the manifest seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--quiet", action="store_true")
        for f in Budgets.__dataclass_fields__:
            p.add_argument(f"--budget-{f.replace('_', '-')}", dest=f"budget_{f}", type=float)
    return ap


def _apply_overrides(man: ExperimentManifest, args) -> ExperimentManifest:
    if args.seed is not None:
        man = man.with_seed(args.seed)
    over = {}
    for f, fd in Budgets.__dataclass_fields__.items():
        v = getattr(args, f"budget_{f}")
        if v is not None:
            over[f] = v if f == "time_s" else int(v)
    if over:
        man = replace(man, budgets=replace(man.budgets, **over))
    if args.out:
        man = replace(man, out=args.out)
    return man


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        if args.manifest:
            man = ExperimentManifest.load(args.manifest)
            if man.kind != args.command:
                raise ConfigError(f"manifest kind {man.kind!r} does not match command {args.command!r}")
        elif args.command == "verify":
            man = ExperimentManifest(kind="verify", id="verify")
        else:
            raise ConfigError(f"{args.command} needs --manifest")
        man = _apply_overrides(man, args)
        out_dir = man.out
        status = 0
        try:
            if args.command == "dims":
                recs = cmd_dims(man)
            elif args.command == "game":
                recs = cmd_game(man, out_dir)
            elif args.command == "stochastic":
                recs = cmd_stochastic(man, out_dir)
            else:
                claim = args.claim or man.claim or "all"
                recs = cmd_verify(claim, man, args.seed)
        except BudgetError as e:
            log.error("budget exceeded: %s", e)
            recs = list(e.partial) + [ResultRecord(man.id, "budget_exceeded", 1, 0, 0, "", str(e))]
            status = 1
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    for r in recs:
        print(r.line())
    write_atomic(os.path.join(out_dir, f"{man.id}_{args.command}.csv"), records_csv(recs))
    if any(not r.passed for r in recs):
        status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
