"""The two-generator stochastic model: exact e2e marginals, regret simulation and lower-bound numerics.

g_σ(x) is b(x) XOR Z with Z ~ Ber(1/2 + σ/4), where b(x) is the last bit of x
and b(∅) = 0.

Regret is estimated from the per-round conditional expected loss: given the
learner's prediction, the expected excess loss over the Bayes bit is
|1 - 2p|·[prediction differs from the Bayes bit]. This has the same mean as the
sampled-loss estimator with far lower variance.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import rng
from .tokens import EMPTY, Bits

_TAG_DIRECT = rng.stream_tag("stochastic-direct")
_TAG_E2E = rng.stream_tag("stochastic-e2e")
_TAG_TRAJ = rng.stream_tag("stochastic-trajectory")


def flip_prob(sigma: int) -> Fraction:
    if sigma not in (-1, 1):
        raise ValueError("sigma must be -1 or +1")
    return Fraction(1, 2) + Fraction(sigma, 4)


@dataclass(frozen=True)
class StochasticGen:
    sigma: int

    def next_prob(self, x=EMPTY) -> Fraction:
        """Pr[next bit = 1]."""
        b = Bits.of(x).last(0)
        q = flip_prob(self.sigma)
        return q if b == 0 else 1 - q


def e2e_one_prob(sigma: int, M: int) -> Fraction:
    """q_M = (1 - (-σ/2)^M) / 2: probability the M-th generated bit from ∅ is 1."""
    if M < 0:
        raise ValueError("M must be >= 0")
    flip_prob(sigma)
    return (1 - Fraction(-sigma, 2) ** M) / 2


def e2e_one_prob_recursive(sigma: int, M: int) -> Fraction:
    """The same quantity from the two-state chain recursion."""
    a = flip_prob(sigma)
    q = Fraction(0)
    for _ in range(M):
        q = a + (1 - 2 * a) * q
    return q


def delta(M: int) -> Fraction:
    return Fraction(1, 2 ** (M + 1))


def kl_pair(d: float) -> float:
    """KL(Ber(1/2 - d) || Ber(1/2 + d)) = 2d log((1 + 2d) / (1 - 2d))."""
    return 2 * d * math.log((1 + 2 * d) / (1 - 2 * d))


def kl_pair_direct(d: float) -> float:
    """Definition-level KL of the two Bernoullis, for cross-checking ``kl_pair``."""
    p, q = 0.5 - d, 0.5 + d
    return p * math.log(p / q) + (1 - p) * math.log((1 - p) / (1 - q))


def bh_lower_bound(M: int, t: int) -> float:
    """Prior-averaged probability of the wrong Bayes bit at round t: (1/4) exp(-(t-1) KL)."""
    if M % 2 == 0:
        raise ValueError("M must be odd")
    if t < 1:
        raise ValueError("t must be >= 1")
    return 0.25 * math.exp(-(t - 1) * kl_pair(float(delta(M))))


def horizon_for(M: int) -> int:
    """T = floor(1 / (32 δ_M^2)), at least 1."""
    return max(1, int(Fraction(1) / (32 * delta(M) ** 2)))


def theory_floor(M: int, T: Optional[int] = None) -> float:
    """Sum over t <= T of 2δ_M times the Bretagnolle-Huber wrong-bit probability."""
    T = horizon_for(M) if T is None else T
    d = float(delta(M))
    return math.fsum(2 * d * bh_lower_bound(M, t) for t in range(1, T + 1))


# --------------------------------------------------------------------------
# learners


class EmpiricalMeanLearner:
    """Direct game: estimate σ from Z_s = Y_s XOR b(x_s); predict b(x) or its flip."""

    def __init__(self):
        self.n = 0
        self.ones = 0

    def sigma_hat(self) -> Optional[int]:
        if self.n == 0:
            return None
        return 1 if 2 * self.ones >= self.n else -1

    def predict(self, x=EMPTY) -> int:
        s = self.sigma_hat()
        if s is None:
            return 0
        b = Bits.of(x).last(0)
        return b if s == -1 else 1 - b

    def update(self, x, y: int) -> None:
        self.n += 1
        self.ones += int(y) ^ Bits.of(x).last(0)


class BayesLearner:
    """Knows σ; predicts the Bayes bit. Works in both games."""

    def __init__(self, sigma: int, M: Optional[int] = None):
        self.sigma = sigma
        self.M = M

    def predict(self, x=EMPTY) -> int:
        if self.M is None:
            return int(StochasticGen(self.sigma).next_prob(x) > Fraction(1, 2))
        return int(e2e_one_prob(self.sigma, self.M) > Fraction(1, 2))

    def update(self, x, y: int) -> None:
        pass


class MajorityLearner:
    """e2e game: predicts the majority of past labels (ties and round 1: 0)."""

    def __init__(self):
        self.n = 0
        self.ones = 0

    def predict(self, x=EMPTY) -> int:
        return int(2 * self.ones > self.n)

    def update(self, x, y: int) -> None:
        self.n += 1
        self.ones += int(y)


class ConstantLearner:
    def __init__(self, bit: int):
        self.bit = bit

    def predict(self, x=EMPTY) -> int:
        return self.bit

    def update(self, x, y: int) -> None:
        pass


class FollowLastLearner:
    """Repeats the previous label; 0 on round 1."""

    def __init__(self):
        self.prev = 0

    def predict(self, x=EMPTY) -> int:
        return self.prev

    def update(self, x, y: int) -> None:
        self.prev = int(y)


class WindowMajorityLearner:
    """Majority of the last k labels (ties: 1)."""

    def __init__(self, k: int = 3):
        self.k = k
        self.recent: list[int] = []

    def predict(self, x=EMPTY) -> int:
        if not self.recent:
            return 1
        return int(2 * sum(self.recent) >= len(self.recent))

    def update(self, x, y: int) -> None:
        self.recent = (self.recent + [int(y)])[-self.k :]


DETERMINISTIC_E2E_LEARNERS: dict[str, Callable[[], object]] = {
    "majority": MajorityLearner,
    "empirical-mean": EmpiricalMeanLearner,
    "const0": lambda: ConstantLearner(0),
    "const1": lambda: ConstantLearner(1),
    "follow-last": FollowLastLearner,
    "window3": lambda: WindowMajorityLearner(3),
}


def empirical_mean_learner() -> EmpiricalMeanLearner:
    return EmpiricalMeanLearner()


# --------------------------------------------------------------------------
# simulation


@dataclass
class RegretReport:
    game: str
    sigma: int
    M: int
    T: int
    trials: int
    regret: float
    se: float
    expected_loss: float
    bayes_loss: float
    theory_floor: float
    seed: int

    CSV_FIELDS = ("sigma", "M", "T", "trials", "regret", "se", "theory_floor", "seed")

    def row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in self.CSV_FIELDS}


def write_reports(reports: Iterable[RegretReport], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=RegretReport.CSV_FIELDS)
        w.writeheader()
        for r in reports:
            w.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v) for k, v in r.row().items()})


def _summary(per_trial: np.ndarray) -> tuple[float, float]:
    n = len(per_trial)
    mean = math.fsum(per_trial) / n
    se = float(np.std(per_trial, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return mean, se


def simulate_direct_game(
    learner_factory: Callable[[], object],
    sigma: int,
    T: int,
    instances: Optional[Callable[[int, int], Bits]] = None,
    seed: int = 0,
    trials: int = 1,
) -> RegretReport:
    """Direct next-token game; ``instances(trial, t)`` gives x_t (default ∅)."""
    if T < 1:
        raise ValueError("T must be >= 1")
    g = StochasticGen(sigma)
    per_trial = np.empty(trials)
    exp_loss = np.empty(trials)
    bayes = np.empty(trials)
    for k in range(trials):
        u = rng.uniforms(seed, _TAG_DIRECT, k, np.arange(T))
        learner = learner_factory()
        reg = loss = opt = 0.0
        for t in range(T):
            x = EMPTY if instances is None else Bits.of(instances(k, t))
            p = float(g.next_prob(x))
            y_hat = int(learner.predict(x))
            bayes_bit = int(p > 0.5)
            loss += (1 - p) if y_hat == 1 else p
            opt += min(p, 1 - p)
            if y_hat != bayes_bit:
                reg += abs(1 - 2 * p)
            y = int(u[t] < p)
            learner.update(x, y)
        per_trial[k], exp_loss[k], bayes[k] = reg, loss, opt
    mean, se = _summary(per_trial)
    return RegretReport("direct", sigma, 0, T, trials, mean, se, float(exp_loss.mean()), float(bayes.mean()), 0.0, seed)


def sample_final_bits(sigma: int, M: int, shape, seed: int, counter: int = 0, trajectory: bool = False) -> np.ndarray:
    """Final bits from ∅: exact marginal draws, or full M-step chains when ``trajectory``."""
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    if not trajectory:
        q = float(e2e_one_prob(sigma, M))
        return (rng.uniforms(seed, _TAG_E2E, counter, idx) < q).astype(np.uint8)
    a = float(flip_prob(sigma))
    cur = np.zeros(shape, dtype=np.uint8)
    for step in range(M):
        z = rng.uniforms(seed, _TAG_TRAJ, counter, idx, step) < a
        cur = cur ^ z.astype(np.uint8)
    return cur


def simulate_e2e_game(
    learner_factory: Callable[[], object],
    sigma: int,
    M: int,
    T: int,
    seed: int = 0,
    trials: int = 1000,
    trajectory: bool = False,
) -> RegretReport:
    """e2e game on the constant prompt ∅ against g_σ."""
    if M % 2 == 0:
        raise ValueError("M must be odd")
    if T < 1:
        raise ValueError("T must be >= 1")
    q = float(e2e_one_prob(sigma, M))
    bayes_bit = int(q > 0.5)
    gap = abs(1 - 2 * q)
    labels = sample_final_bits(sigma, M, (trials, T), seed, counter=(sigma + 1) // 2, trajectory=trajectory)
    per_trial = np.empty(trials)
    for k in range(trials):
        learner = learner_factory()
        wrong = 0
        for t in range(T):
            if int(learner.predict(EMPTY)) != bayes_bit:
                wrong += 1
            learner.update(EMPTY, int(labels[k, t]))
        per_trial[k] = gap * wrong
    mean, se = _summary(per_trial)
    opt = T * min(q, 1 - q)
    return RegretReport("e2e", sigma, M, T, trials, mean, se, opt + mean, opt, theory_floor(M, T), seed)


def worst_target_regret(
    learner_factory: Callable[[], object],
    M: int,
    seed: int = 0,
    trials: int = 10_000,
    T: Optional[int] = None,
) -> tuple[dict[int, RegretReport], RegretReport]:
    """Both targets at T = floor(1/(32 δ_M^2)); returns the reports and the worse one."""
    if M % 2 == 0:
        raise ValueError("M must be odd")
    T = horizon_for(M) if T is None else T
    reports = {s: simulate_e2e_game(learner_factory, s, M, T, seed, trials) for s in (-1, 1)}
    worst = max(reports.values(), key=lambda r: r.regret)
    return reports, worst


def direct_regret_estimates(sigma: int, T: int, seeds: Sequence[int], trials: int = 25) -> np.ndarray:
    """Per-seed expected-regret estimates of the empirical-mean learner on x_t = ∅.

    Vectorised over trials; draws use the same counters as ``simulate_direct_game``.
    """
    a = float(flip_prob(sigma))
    bayes_bit = int(a > 0.5)
    seen = np.arange(T)
    out = np.empty(len(seeds))
    for n, s in enumerate(seeds):
        z = (rng.uniforms(s, _TAG_DIRECT, np.arange(trials)[:, None], seen[None, :]) < a).astype(np.int64)
        ones_before = np.cumsum(z, axis=1) - z
        pred = np.where(seen == 0, 0, (2 * ones_before >= seen).astype(np.int64))
        out[n] = 0.5 * float(np.mean(np.sum(pred != bayes_bit, axis=1)))
    return out


def direct_expected_regret_exact(sigma: int, T: int) -> float:
    """Exact expected regret of the empirical-mean learner on x_t = ∅ from binomial tails."""
    from scipy.stats import binom

    a = float(flip_prob(sigma))
    n = np.arange(1, T)  # observations before rounds 2..T
    # σ̂ = +1 iff ones >= n/2
    p_plus = binom.sf(np.ceil(n / 2) - 1, n, a)
    wrong = (1 - p_plus) if sigma == 1 else p_plus
    first = 0.5 if sigma == 1 else 0.0
    return first + 0.5 * math.fsum(wrong)
