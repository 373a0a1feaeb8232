"""The online protocol under e2e or CoT feedback, adversaries, and exhaustive game oracles."""

from __future__ import annotations

import copy
import enum
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional, Protocol, Sequence, Union

from .core import Generator, cot, e2e
from .dims import FiniteClassTable, LittlestoneTree, tree_is_shattered
from .tokens import Bits


class FeedbackMode(str, enum.Enum):
    E2E = "e2e"
    COT = "cot"


Feedback = Union[int, Bits]


def final_bit(feedback: Feedback) -> int:
    return feedback.last() if isinstance(feedback, Bits) else int(feedback)


class RealizabilityError(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, partial: int):
        super().__init__(f"{message} (partial bound {partial})")
        self.partial = partial


class Learner(Protocol):
    def predict(self, x: Bits) -> int: ...

    def update(self, x: Bits, feedback: Feedback) -> None: ...


# --------------------------------------------------------------------------
# realizability bookkeeping


class VersionSpace:
    """Members of a declared class consistent with all feedback so far.

    Outputs are cached per (member, instance); one instance costs M generator
    calls per member, once.
    """

    def __init__(self, generators: Sequence[Generator], M: int):
        self.generators = list(generators)
        self.M = M
        self.alive = list(range(len(self.generators)))
        self._cot: dict[tuple[int, Bits], Bits] = {}

    def trajectory(self, i: int, x: Bits) -> Bits:
        key = (i, x)
        if key not in self._cot:
            self._cot[key] = cot(self.generators[i], x, self.M)
        return self._cot[key]

    def matches(self, i: int, x: Bits, feedback: Feedback, mode: FeedbackMode) -> bool:
        traj = self.trajectory(i, x)
        if mode is FeedbackMode.COT:
            return traj == feedback
        return traj.last() == int(feedback)

    def restrict(self, x: Bits, feedback: Feedback, mode: FeedbackMode) -> list[int]:
        return [i for i in self.alive if self.matches(i, x, feedback, mode)]

    def options(self, x: Bits, mode: FeedbackMode) -> list[Feedback]:
        """Distinct consistent feedback payloads, in sorted order."""
        trajs = {self.trajectory(i, x) for i in self.alive}
        if mode is FeedbackMode.COT:
            return sorted(trajs, key=str)
        return sorted({t.last() for t in trajs})


# --------------------------------------------------------------------------
# transcripts


@dataclass
class Round:
    t: int
    instance: Bits
    prediction: int
    feedback: Feedback
    mistake: int

    def to_json(self) -> dict:
        fb = str(self.feedback) if isinstance(self.feedback, Bits) else int(self.feedback)
        return {"t": self.t, "instance": str(self.instance), "prediction": self.prediction, "feedback": fb, "mistake": self.mistake}

    @classmethod
    def from_json(cls, d: dict, mode: FeedbackMode) -> "Round":
        fb = Bits.of(d["feedback"]) if mode is FeedbackMode.COT else int(d["feedback"])
        return cls(d["t"], Bits.of(d["instance"]), int(d["prediction"]), fb, int(d["mistake"]))


@dataclass
class GameTranscript:
    M: int
    mode: FeedbackMode
    rounds: list[Round] = field(default_factory=list)
    target_id: Optional[str] = None
    seed: Optional[int] = None
    config: dict = field(default_factory=dict)

    @property
    def mistakes(self) -> int:
        return sum(r.mistake for r in self.rounds)

    def check_flags(self, target: Optional[Callable] = None) -> bool:
        """Stored flags equal recomputation; with a target, also the feedback itself."""
        for r in self.rounds:
            if self.mode is FeedbackMode.COT and len(r.feedback) != self.M:
                return False
            if r.mistake != int(r.prediction != final_bit(r.feedback)):
                return False
            if target is not None:
                want = cot(target, r.instance, self.M)
                if self.mode is FeedbackMode.E2E:
                    want = want.last()
                if r.feedback != want:
                    return False
        return True

    def to_jsonl(self) -> str:
        header = {
            "header": True,
            "M": self.M,
            "mode": self.mode.value,
            "target_id": self.target_id,
            "seed": self.seed,
            "config": self.config,
        }
        lines = [json.dumps(header, sort_keys=True, ensure_ascii=False)]
        lines += [json.dumps(r.to_json(), sort_keys=True) for r in self.rounds]
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, text: str) -> "GameTranscript":
        lines = [json.loads(l) for l in text.splitlines() if l.strip()]
        h = lines[0]
        mode = FeedbackMode(h["mode"])
        tr = cls(h["M"], mode, target_id=h.get("target_id"), seed=h.get("seed"), config=h.get("config", {}))
        tr.rounds = [Round.from_json(d, mode) for d in lines[1:]]
        return tr


# --------------------------------------------------------------------------
# adversaries


class Adversary:
    """Emits instances and feedback; ``declared`` is the class it stays realizable for."""

    declared: Sequence[Generator]

    def next_instance(self, t: int) -> Optional[Bits]:
        raise NotImplementedError

    def feedback(self, x: Bits, prediction: int, mode: FeedbackMode, vs: VersionSpace) -> Feedback:
        raise NotImplementedError


def choose_feedback(
    vs: VersionSpace,
    x: Bits,
    prediction: int,
    mode: FeedbackMode,
    allowed: Optional[Callable[[Feedback], bool]] = None,
    rng: Optional[random.Random] = None,
) -> Feedback:
    """Opposite the prediction when possible; smallest payload (or a seeded random one) otherwise."""
    opts = [o for o in vs.options(x, mode) if allowed is None or allowed(o)]
    if not opts:
        raise RealizabilityError(f"no consistent feedback on {x!r}")
    against = [o for o in opts if final_bit(o) != prediction]
    pick_from = against or opts
    if rng is not None:
        return rng.choice(pick_from)
    return pick_from[0]


class FixedTargetAdversary(Adversary):
    def __init__(self, target: Generator, instances: Iterable, declared: Optional[Sequence[Generator]] = None):
        self.target = target
        self.instances = [Bits.of(x) for x in instances]
        self.declared = list(declared) if declared is not None else [target]

    def next_instance(self, t: int) -> Optional[Bits]:
        return self.instances[t] if t < len(self.instances) else None

    def feedback(self, x, prediction, mode, vs):
        traj = cot(self.target, x, vs.M)
        return traj if mode is FeedbackMode.COT else traj.last()


class RandomAdversary(Adversary):
    """Random pool instances with random consistent feedback (seeded)."""

    def __init__(self, declared: Sequence[Generator], pool: Sequence, seed: int, adaptive: bool = True):
        self.declared = list(declared)
        self.pool = [Bits.of(x) for x in pool]
        self.rng = random.Random(seed)
        self.adaptive = adaptive

    def next_instance(self, t):
        return self.rng.choice(self.pool)

    def feedback(self, x, prediction, mode, vs):
        if self.adaptive:
            return choose_feedback(vs, x, prediction, mode, rng=self.rng)
        return self.rng.choice(vs.options(x, mode))


class TreeAdversary(Adversary):
    """Walks a Littlestone tree, answering against the learner while the class allows it."""

    def __init__(
        self,
        tree: LittlestoneTree,
        declared: Sequence[Generator],
        M: int,
        rng: Optional[random.Random] = None,
        check: bool = True,
    ):
        if check:
            table = FiniteClassTable.from_generators(declared, tree.instances(), "e2e", M)
            if not tree_is_shattered(table, tree):
                raise ValueError("tree is not shattered by the class's e2e table")
        self.tree = tree
        self.declared = list(declared)
        self.M = M
        self.rng = rng
        self.path: tuple = ()

    def next_instance(self, t):
        return self.tree.nodes.get(self.path)

    def feedback(self, x, prediction, mode, vs):
        labels = self.tree.labels_at(self.path)
        fb = choose_feedback(vs, x, prediction, mode, allowed=lambda o: final_bit(o) in labels, rng=self.rng)
        self.path = self.path + (labels.index(final_bit(fb)),)
        return fb


class LatchAdversary(Adversary):
    """Lifts an adversary for an m-dimensional threshold class to d = m + 2 via z -> z 1 0.

    The inner adversary plays the plain (one-step) game; its label is repeated
    M times as CoT feedback.
    """

    def __init__(self, inner: Adversary, inner_class: Sequence, M: int):
        from .classes.linear import latch_embed, latch_instance

        self.inner = inner
        self.M = M
        self.inner_class = list(inner_class)
        self.declared = [latch_embed(g.w, g.b).generator() for g in self.inner_class]
        self._wrap = latch_instance
        self._inner_vs = VersionSpace([g.generator() for g in self.inner_class], 1)
        self._z: dict[Bits, Bits] = {}

    def next_instance(self, t):
        z = self.inner.next_instance(t)
        if z is None:
            return None
        x = self._wrap(z)
        self._z[x] = z
        return x

    def feedback(self, x, prediction, mode, vs):
        z = self._z[x]
        y = int(self.inner.feedback(z, prediction, FeedbackMode.E2E, self._inner_vs))
        self._inner_vs.alive = self._inner_vs.restrict(z, y, FeedbackMode.E2E)
        if mode is FeedbackMode.COT:
            return Bits.ones(self.M) if y else Bits.zeros(self.M)
        return y


def tree_adversary(tree, declared, M, rng=None) -> TreeAdversary:
    return TreeAdversary(tree, declared, M, rng=rng)


def latch_adversary(inner: Adversary, inner_class, M: int) -> LatchAdversary:
    return LatchAdversary(inner, inner_class, M)


# --------------------------------------------------------------------------
# the game loop


def run_game(
    learner: Learner,
    adversary: Adversary,
    M: int,
    mode: FeedbackMode,
    horizon: int,
    seed: Optional[int] = None,
    config: Optional[dict] = None,
) -> GameTranscript:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    mode = FeedbackMode(mode)
    vs = VersionSpace(adversary.declared, M)
    tr = GameTranscript(M, mode, seed=seed, config=dict(config or {}))
    target = getattr(adversary, "target", None)
    tr.target_id = getattr(target, "name", None)
    for t in range(horizon):
        x = adversary.next_instance(t)
        if x is None:
            break
        x = Bits.of(x)
        y_hat = int(learner.predict(x))
        fb = adversary.feedback(x, y_hat, mode, vs)
        if mode is FeedbackMode.COT and (not isinstance(fb, Bits) or len(fb) != M):
            raise RealizabilityError(f"CoT feedback at round {t + 1} must have length {M}")
        alive = vs.restrict(x, fb, mode)
        if not alive:
            raise RealizabilityError(f"realizability violated at round {t + 1}")
        vs.alive = alive
        tr.rounds.append(Round(t + 1, x, y_hat, fb, int(y_hat != final_bit(fb))))
        learner.update(x, fb)
    return tr


# --------------------------------------------------------------------------
# exhaustive worst case and an independent minimax oracle


def _fork(learner):
    """Independent copy of a learner; ``clone()`` lets learners share immutable parts."""
    clone = getattr(learner, "clone", None)
    return clone() if clone is not None else copy.deepcopy(learner)


def exhaustive_worst_case(
    learner_factory: Callable[[], Learner],
    generators: Sequence[Generator],
    pool: Sequence,
    M: int,
    mode: FeedbackMode,
    horizon: int,
    budget: int = 2_000_000,
) -> int:
    """Most mistakes any adaptive adversary forces within ``horizon`` rounds on ``pool``.

    The learner is deep-copied at every feedback branch. Learners exposing
    ``state_key()`` share results across equal (state, version space, rounds
    left) triples.
    """
    mode = FeedbackMode(mode)
    pool = list(dict.fromkeys(Bits.of(x) for x in pool))
    table = FiniteClassTable.from_generators(generators, pool, "cot", M)
    cols = table.columns()
    if mode is FeedbackMode.E2E:
        e2e_cols = []
        for col in cols:
            merged: dict[int, int] = {}
            for traj, m in col.items():
                merged[traj.last()] = merged.get(traj.last(), 0) | m
            e2e_cols.append(merged)
        cols = e2e_cols
    memo: dict[Hashable, int] = {}
    nodes = [0]
    fork = _fork
    best_seen = [0]

    def value(learner, mask: int, h: int, acc: int) -> int:
        if h == 0:
            return 0
        key = None
        if hasattr(learner, "state_key"):
            key = (learner.state_key(), mask, h)
            if key in memo:
                return memo[key]
        nodes[0] += 1
        if nodes[0] > budget:
            raise BudgetExceeded("exhaustive search budget exceeded", best_seen[0])
        best = 0
        for j, x in enumerate(pool):
            opts = [(y, mask & m) for y, m in cols[j].items() if mask & m]
            probe = fork(learner)
            y_hat = int(probe.predict(x))
            for y, sub in opts:
                child = fork(probe)
                child.update(x, y)
                miss = int(y_hat != final_bit(y))
                v = miss + value(child, sub, h - 1, acc + miss)
                if v > best:
                    best = v
                    best_seen[0] = max(best_seen[0], acc + v)
        if key is not None:
            memo[key] = best
        return best

    return value(learner_factory(), table.full_mask, horizon, 0)


def minimax_value(table: FiniteClassTable, horizon: Optional[int] = None) -> int:
    """Game value by plain game-tree search over frozensets of surviving rows.

    Written independently of the dimension recursions: every pool instance is
    a legal move (including uninformative ones), the learner's bit is chosen by
    explicit min, and play stops after ``horizon`` rounds (default: one fewer
    than the number of distinct rows, enough for every informative line).
    For trajectory tables the loss is on the final bit.
    """
    rows = list(dict.fromkeys(table.rows))
    if not rows:
        raise ValueError("empty class")
    h0 = len(rows) - 1 if horizon is None else horizon
    n = len(table.pool)
    last = (lambda y: y.last()) if table.label_arity != "binary" else (lambda y: y)
    memo: dict[tuple[frozenset, int], int] = {}

    def V(S: frozenset, h: int) -> int:
        if h == 0 or len(S) == 1:
            return 0
        key = (S, h)
        if key in memo:
            return memo[key]
        best = 0
        for j in range(n):
            by_label: dict = {}
            for i in S:
                by_label.setdefault(rows[i][j], set()).add(i)
            outcomes = [(last(y), V(frozenset(part), h - 1)) for y, part in by_label.items()]
            learner_best = min(max((int(b != guess) + v) for b, v in outcomes) for guess in (0, 1))
            best = max(best, learner_best)
        memo[key] = best
        return best

    return V(frozenset(range(len(rows))), h0)


class MinimaxLearner:
    """Optimal learner over a fixed pool: SOA under e2e feedback, CoT game value under CoT feedback."""

    def __init__(self, generators: Sequence[Generator], pool: Sequence, M: int, mode: FeedbackMode):
        from .dims import CotGameValue, LittlestoneSolver

        self.mode = FeedbackMode(mode)
        self.M = M
        self.table = FiniteClassTable.from_generators(generators, pool, "cot", M)
        self.mask = self.table.full_mask
        if self.mode is FeedbackMode.E2E:
            self._e2e = FiniteClassTable(
                self.table.pool,
                self.table.member_ids,
                [tuple(y.last() for y in r) for r in self.table.rows],
            )
            self._solver = LittlestoneSolver(self._e2e, multiclass=False)
        else:
            self._game = CotGameValue(self.table)

    def state_key(self):
        return self.mask

    def clone(self) -> "MinimaxLearner":
        other = copy.copy(self)
        return other

    def predict(self, x) -> int:
        x = Bits.of(x)
        if self.mode is FeedbackMode.COT:
            return self._game.best_guess(self.mask, x)
        parts = {y: self._e2e.consistent(self.mask, x, y) for y in (0, 1)}
        live = {y: m for y, m in parts.items() if m}
        if len(live) == 1:
            return next(iter(live))
        d0, d1 = self._solver.dim(live[0]), self._solver.dim(live[1])
        return 1 if d1 >= d0 else 0

    def update(self, x, feedback) -> None:
        x = Bits.of(x)
        if self.mode is FeedbackMode.COT:
            self.mask = self.table.consistent(self.mask, x, Bits.of(feedback))
        else:
            self.mask = self._e2e.consistent(self.mask, x, final_bit(feedback))
        if not self.mask:
            raise RealizabilityError("feedback inconsistent with every member")
