"""Online learners: SOA under CoT feedback, halving, the taxonomy learner, and the CoT reduction."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

from .classes import linear as lin
from .classes import taxonomy as tax
from .core import Generator, e2e
from .dims import FiniteClassTable, LittlestoneSolver
from .game import Feedback, FeedbackMode, RealizabilityError, final_bit
from .tokens import Bits, all_strings


class EmptyVersionSpace(RealizabilityError):
    pass


# --------------------------------------------------------------------------
# SOA for CoT feedback


class _CotTables:
    """CoT table of a generator list over a growing pool plus a shared dimension memo."""

    def __init__(self, generators: Sequence[Generator], pool: Sequence, M: int):
        self.generators = list(generators)
        self.M = M
        self.rebuild([Bits.of(x) for x in pool])

    def rebuild(self, pool: list[Bits]) -> None:
        self.table = FiniteClassTable.from_generators(self.generators, list(dict.fromkeys(pool)), "cot", self.M)
        self.solver = LittlestoneSolver(self.table, multiclass=True)

    def ensure(self, x: Bits) -> None:
        if x not in self.table._index:
            self.rebuild(self.table.pool + [x])


class SoaCot:
    """Predicts the final bit of the consistent trajectory whose version space keeps the
    largest multiclass Littlestone dimension (ties: lexicographically smallest trajectory).

    The dimension is taken over the CoT table on ``pool``; unseen instances are
    appended to the pool when they arrive.
    """

    modes = (FeedbackMode.COT,)

    def __init__(self, generators: Sequence[Generator], M: int, pool: Sequence = (), _shared: Optional[_CotTables] = None):
        self.M = M
        self._t = _shared or _CotTables(generators, pool, M)
        self.alive: frozenset[int] = frozenset(range(len(self._t.generators)))
        self.last_scores: dict[Bits, int] = {}

    def clone(self) -> "SoaCot":
        return copy.copy(self)

    def state_key(self):
        return self.alive

    def _mask(self) -> int:
        m = 0
        for i in self.alive:
            m |= 1 << i
        return m

    def potential(self) -> int:
        return self._t.solver.dim(self._mask())

    def branch_scores(self, x: Bits) -> dict[Bits, int]:
        self._t.ensure(x)
        mask = self._mask()
        col = self._t.table.columns()[self._t.table.index_of(x)]
        return {traj: self._t.solver.dim(mask & m) for traj, m in col.items() if mask & m}

    def predict(self, x) -> int:
        x = Bits.of(x)
        scores = self.branch_scores(x)
        if not scores:
            raise EmptyVersionSpace("empty version space")
        self.last_scores = scores
        best = max(scores.values())
        return min((t for t, v in scores.items() if v == best), key=str).last()

    def update(self, x, feedback) -> None:
        x = Bits.of(x)
        if not isinstance(feedback, Bits):
            raise TypeError("SOA-CoT needs the full trajectory as feedback")
        self._t.ensure(x)
        j = self._t.table.index_of(x)
        keep = frozenset(i for i in self.alive if self._t.table.rows[i][j] == feedback)
        if not keep:
            raise EmptyVersionSpace("feedback inconsistent with every survivor")
        self.alive = keep


def soa_cot(generators: Sequence[Generator], M: int, pool: Sequence = ()) -> SoaCot:
    return SoaCot(generators, M, pool)


# --------------------------------------------------------------------------
# halving


class Halving:
    """Majority vote of the surviving labellers; ties predict 1.

    ``labels(i, x)`` is member i's label for x. Under CoT feedback only the
    final bit is used.
    """

    modes = (FeedbackMode.E2E, FeedbackMode.COT)

    def __init__(self, labels: Callable[[int, Bits], int], n: int, names: Optional[Sequence[str]] = None):
        if n < 1:
            raise ValueError("empty class")
        self.labels = labels
        self.alive: frozenset[int] = frozenset(range(n))
        self.names = list(names) if names is not None else [str(i) for i in range(n)]
        self.mistakes = 0
        self._last: Optional[tuple[Bits, int]] = None

    @classmethod
    def from_table(cls, table: FiniteClassTable) -> "Halving":
        if table.label_arity != "binary":
            raise ValueError("halving runs on a binary table")
        return cls(lambda i, x: table.label(i, x), len(table), table.member_ids)

    @classmethod
    def from_generators(cls, generators: Sequence[Generator], M: int) -> "Halving":
        cache: dict[tuple[int, Bits], int] = {}

        def labels(i: int, x: Bits) -> int:
            key = (i, x)
            if key not in cache:
                cache[key] = e2e(generators[i], x, M)
            return cache[key]

        return cls(labels, len(generators), [g.name for g in generators])

    def clone(self) -> "Halving":
        return copy.copy(self)

    def state_key(self):
        return self.alive

    @property
    def bound(self) -> int:
        return (len(self.names)).bit_length() - 1

    def predict(self, x) -> int:
        x = Bits.of(x)
        if not self.alive:
            raise EmptyVersionSpace("empty version space")
        ones = sum(self.labels(i, x) for i in self.alive)
        y = 1 if 2 * ones >= len(self.alive) else 0
        self._last = (x, y)
        return y

    def update(self, x, feedback) -> None:
        x = Bits.of(x)
        y = final_bit(feedback)
        if self._last is not None and self._last[0] == x and self._last[1] != y:
            self.mistakes += 1
        keep = frozenset(i for i in self.alive if self.labels(i, x) == y)
        if not keep:
            raise EmptyVersionSpace("feedback inconsistent with every survivor")
        self.alive = keep
        self._last = None


def halving(table_or_generators, M: Optional[int] = None) -> Halving:
    if isinstance(table_or_generators, FiniteClassTable):
        return Halving.from_table(table_or_generators)
    if M is None:
        raise ValueError("M is required for a generator list")
    return Halving.from_generators(list(table_or_generators), M)


# --------------------------------------------------------------------------
# taxonomy learner


def _bucket_coords(x: Bits) -> Optional[tuple[int, int]]:
    """(s, i) when x = 0^s 1 0^i."""
    runs = x.runs
    if len(runs) == 2 and runs[0][0] == 0 and runs[1] == (1, 1):
        return runs[0][1], 0
    if len(runs) == 3 and runs[0][0] == 0 and runs[1] == (1, 1) and runs[2][0] == 0:
        return runs[0][1], runs[2][1]
    return None


class TaxonomyLearner:
    """Baseline e2e predictions until the first mistake, which pins the bucket s*.

    For s* <= 10M the learner halves over F_{s*} (the mistaken example included).
    For s* > 10M the mistaken bucket point 0^{s*} 1 0^i carried label 1, so
    k* = M + i - 1 and the target is known.
    """

    modes = (FeedbackMode.E2E, FeedbackMode.COT)

    def __init__(self, p: tax.TaxonomyParams, M: int):
        self.p = p
        self.M = M
        self.baseline = tax.taxonomy_baseline(p)
        self.phase = "baseline"
        self.s_star: Optional[int] = None
        self.k_star: Optional[int] = None
        self.halving: Optional[Halving] = None
        self._cache: dict[tuple, int] = {}
        self._last: Optional[tuple[Bits, int]] = None
        self.mistake_log: list[tuple[str, Bits]] = []

    def clone(self) -> "TaxonomyLearner":
        other = copy.copy(self)
        if self.halving is not None:
            other.halving = self.halving.clone()
        other.mistake_log = list(self.mistake_log)
        return other

    def state_key(self):
        alive = self.halving.alive if self.halving is not None else None
        return (self.phase, self.s_star, self.k_star, alive)

    def _e2e(self, key, g: Generator, x: Bits) -> int:
        k = (key, x)
        if k not in self._cache:
            self._cache[k] = e2e(g, x, self.M)
        return self._cache[k]

    def predict(self, x) -> int:
        x = Bits.of(x)
        if self.phase == "baseline":
            y = self._e2e("f", self.baseline, x)
        elif self.phase == "halving":
            y = self.halving.predict(x)
        else:
            y = self._e2e(("f", self.s_star, self.k_star), self._target, x)
        self._last = (x, y)
        return y

    def update(self, x, feedback) -> None:
        x = Bits.of(x)
        y = final_bit(feedback)
        pred = self._last[1] if self._last is not None and self._last[0] == x else self.predict(x)
        self._last = None
        if self.phase == "halving":
            self.halving.update(x, y)
            return
        if pred == y:
            return
        self.mistake_log.append((self.phase, x))
        if self.phase == "known":
            raise RealizabilityError("observation contradicts the identified taxonomy member")
        coords = _bucket_coords(x)
        if coords is None or coords[0] < self.p.rate.M0:
            raise RealizabilityError(f"no taxonomy member explains a mistake on {x.compact()}")
        s, i = coords
        self.s_star = s
        if s <= 10 * self.M:
            members = [tax.taxonomy_member(self.p, s, k, self.baseline) for k in self.p.K(s)]
            self.halving = Halving.from_generators(members, self.M)
            self.halving.update(x, y)
            self.phase = "halving"
            return
        k = self.M + i - 1
        if y != 1 or k not in self.p.K(s):
            raise RealizabilityError(f"bucket mistake on 0^{s} 1 0^{i} fits no k in K_{s}")
        self.k_star = k
        self._target = tax.taxonomy_member(self.p, s, k, self.baseline)
        self.phase = "known"


def taxonomy_learner(p: tax.TaxonomyParams, M: int) -> TaxonomyLearner:
    return TaxonomyLearner(p, M)


# --------------------------------------------------------------------------
# CoT reduction


@dataclass
class Charge:
    round: int  # 1-based game round of the final-answer mistake
    j: int  # first divergence inside the trajectory, 1-based
    position: int  # 0-based index in the expanded sequence


class CotReduction:
    """Runs a base next-token learner on the expanded CoT transcript.

    Each round the base learner is simulated on its own predicted prefix; the
    final simulated bit is the answer. ``incremental=False`` replays the base
    learner from scratch on the transcript every step, ``incremental=True``
    keeps a learner synced to the transcript and forks it per round.
    """

    modes = (FeedbackMode.COT,)

    def __init__(self, base_factory: Callable[[], object], M: int, incremental: bool = True):
        self.base_factory = base_factory
        self.M = M
        self.incremental = incremental
        self.transcript: list[tuple[Bits, int]] = []
        self.charges: list[Charge] = []
        self.rounds = 0
        self._synced = base_factory() if incremental else None
        self._pending: Optional[tuple[Bits, list[int]]] = None

    def clone(self) -> "CotReduction":
        other = copy.copy(self)
        other.transcript = list(self.transcript)
        other.charges = list(self.charges)
        if self._synced is not None:
            other._synced = _clone(self._synced)
        return other

    def state_key(self):
        if self._synced is not None and hasattr(self._synced, "state_key"):
            return self._synced.state_key()
        return tuple(self.transcript)

    def _replayed(self, extra: Sequence[tuple[Bits, int]]):
        if self.incremental:
            a = _clone(self._synced)
        else:
            a = self.base_factory()
            for u, z in self.transcript:
                a.predict(u)
                a.update(u, z)
        for u, z in extra:
            a.predict(u)
            a.update(u, z)
        return a

    def simulate(self, x: Bits) -> list[int]:
        x = Bits.of(x)
        predicted: list[int] = []
        prefix: list[tuple[Bits, int]] = []
        u = x
        if self.incremental:
            a = _clone(self._synced)
            for _ in range(self.M):
                z = int(a.predict(u))
                a.update(u, z)
                predicted.append(z)
                u = u.append(z)
            return predicted
        for _ in range(self.M):
            a = self._replayed(prefix)
            z = int(a.predict(u))
            predicted.append(z)
            prefix.append((u, z))
            u = u.append(z)
        return predicted

    def predict(self, x) -> int:
        x = Bits.of(x)
        zs = self.simulate(x)
        self._pending = (x, zs)
        return zs[-1]

    def update(self, x, feedback) -> None:
        x = Bits.of(x)
        if not isinstance(feedback, Bits) or len(feedback) != self.M:
            raise TypeError("the reduction needs the full length-M trajectory")
        zs = self._pending[1] if self._pending and self._pending[0] == x else self.simulate(x)
        self._pending = None
        self.rounds += 1
        truth = list(feedback)
        if zs[-1] != truth[-1]:
            j = next(i for i, (a, b) in enumerate(zip(zs, truth)) if a != b)
            self.charges.append(Charge(self.rounds, j + 1, len(self.transcript) + j))
        u = x
        for z in truth:
            if self._synced is not None:
                self._synced.predict(u)
                self._synced.update(u, z)
            self.transcript.append((u, z))
            u = u.append(z)


def _clone(learner):
    c = getattr(learner, "clone", None)
    return c() if c is not None else copy.deepcopy(learner)


def cot_reduction(base_factory: Callable[[], object], M: int, incremental: bool = True) -> CotReduction:
    return CotReduction(base_factory, M, incremental)


def replay_base_mistakes(base_factory: Callable[[], object], transcript: Sequence[tuple[Bits, int]]) -> list[int]:
    """Positions of the expanded sequence where a fresh base learner errs."""
    a = base_factory()
    out = []
    for pos, (u, z) in enumerate(transcript):
        if int(a.predict(u)) != z:
            out.append(pos)
        a.update(u, z)
    return out


# --------------------------------------------------------------------------
# suffix projection and the threshold-function base learner


def suffix_map(x, d: int) -> Bits:
    """Last d bits of x, left-padded with zeros."""
    if d < 1:
        raise ValueError("d must be >= 1")
    x = Bits.of(x)
    tail = x.suffix(d)
    return Bits.zeros(d - len(tail)) + tail


class SuffixProjection:
    """Feeds a base learner over {0,1}^d the zero-padded last d bits of each instance."""

    def __init__(self, base, d: int):
        if d < 1:
            raise ValueError("d must be >= 1")
        self.base = base
        self.d = d

    def clone(self) -> "SuffixProjection":
        return SuffixProjection(_clone(self.base), self.d)

    def state_key(self):
        return self.base.state_key()

    def predict(self, x) -> int:
        return self.base.predict(suffix_map(x, self.d))

    def update(self, x, feedback) -> None:
        self.base.update(suffix_map(x, self.d), feedback)

    @property
    def bound(self) -> int:
        return self.base.bound


def suffix_projection(base, d: int) -> SuffixProjection:
    return SuffixProjection(base, d)


MAX_LTF_DIM = 4


@lru_cache(maxsize=None)
def _ltf_tables(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(lin.threshold_truth_tables(d)))


def ltf_halving_base(d: int) -> Halving:
    """Halving over every threshold function on {0,1}^d."""
    if not 1 <= d <= MAX_LTF_DIM:
        raise ValueError(f"d = {d} outside the supported range 1..{MAX_LTF_DIM}")
    tables = _ltf_tables(d)
    index = {z: i for i, z in enumerate(all_strings(d))}

    def labels(i: int, z: Bits) -> int:
        return tables[i][index[z]]

    return Halving(labels, len(tables), [f"ltf{i}" for i in range(len(tables))])
