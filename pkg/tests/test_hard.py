import itertools
import math
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from cotlab.classes.hard import (
    HardClassParams,
    branch_probability,
    green_red_branches,
    hard_class_sample,
    preregistered_rules,
    version_rule,
    x_j,
)
from cotlab.classes.rules import (
    FALSE,
    TRUE,
    atom,
    condition,
    conj,
    disj,
    exact_probability,
    prefix_path_rule,
    rule_filter,
)
from cotlab.core import Generator, cot, e2e
from cotlab.tokens import Bits


def _brute_probability(rule, p_one) -> Fraction:
    xs = sorted(rule.variables(), key=str)
    total = Fraction(0)
    for bits in itertools.product((0, 1), repeat=len(xs)):
        lab = dict(zip(xs, bits))
        w = Fraction(1)
        for x, b in lab.items():
            w *= p_one(x) if b else 1 - p_one(x)
        if rule.holds(lambda x: lab.get(x, 0)):
            total += w
    return total


def test_green_red_m4() -> None:
    green, reds = green_red_branches(1, 4)
    assert green == "0001"
    assert sorted(str(r) for r in reds) == ["0010", "0100", "1000"]
    try:
        green_red_branches(1, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("M = 1 accepted")


def test_prefix_path_rule_examples() -> None:
    assert prefix_path_rule("0", "11", 0) == TRUE
    g = Generator.from_table({"0": 0, "00": 1}, "g")
    assert cot(g, "0", 2) == "01"
    assert not prefix_path_rule("0", "00", 2).holds(g)
    assert prefix_path_rule("0", "01", 2).holds(g)


@given(st.text(alphabet="01", max_size=6), st.integers(1, 5), st.integers(0, 7))
def test_every_generator_satisfies_its_own_path(x: str, M: int, seed: int) -> None:
    g = Generator(lambda s: hash((seed, str(s))) & 1, "h")
    assert prefix_path_rule(x, cot(g, x, M), M).holds(g)


def test_rule_filter_examples() -> None:
    gens = [Generator.constant(0), Generator.constant(1)]
    assert rule_filter(gens, atom("0", 0)) == [gens[0]]
    assert rule_filter(gens, atom("0", 0) & atom("0", 1)) == []
    assert rule_filter(gens, TRUE) == gens
    assert conj([]) == TRUE and disj([]) == FALSE


def test_condition_substitutes() -> None:
    r = atom("0", 1) & (atom("1", 0) | atom("00", 1))
    assert condition(r, Bits.of("0"), 0) == FALSE
    assert condition(condition(r, Bits.of("0"), 1), Bits.of("1"), 0) == TRUE


@given(st.integers(0, 10_000))
def test_exact_probability_matches_enumeration(seed: int) -> None:
    import random

    rnd = random.Random(seed)
    xs = [Bits.zeros(i) for i in range(1, 6)]
    probs = {x: Fraction(rnd.randint(1, 9), 10) for x in xs}

    def rand_rule(depth):
        if depth == 0 or rnd.random() < 0.3:
            return atom(rnd.choice(xs), rnd.randint(0, 1))
        parts = [rand_rule(depth - 1) for _ in range(rnd.randint(2, 3))]
        return conj(parts) if rnd.random() < 0.5 else disj(parts)

    rule = rand_rule(3)
    assert exact_probability(rule, probs.get) == _brute_probability(rule, probs.get)


def test_outside_z_is_zero() -> None:
    hp = HardClassParams(M=4, N=50, seed=3)
    sample = hard_class_sample(hp)
    for g in sample.generators(10):
        for x in ["", "1", "01", "0" * 17, "00100"]:
            assert g(Bits.of(x)) == 0


def test_majority_fraction_at_0_m() -> None:
    M, N = 8, 20_000
    sample = hard_class_sample(HardClassParams(M=M, N=N, seed=11))
    p = 1 - 1 / M
    frac = sample.column(Bits.zeros(M)).mean()
    assert abs(frac - p) <= 4 * math.sqrt(p * (1 - p) / N)
    q = 1 / M
    frac0 = sample.column(Bits.zeros(3)).mean()
    assert abs(frac0 - q) <= 4 * math.sqrt(q * (1 - q) / N)


def test_branch_frequencies_near_product() -> None:
    M, N = 4, 40_000
    hp = HardClassParams(M=M, N=N, seed=5)
    sample = hard_class_sample(hp)
    green, reds = green_red_branches(1, M)
    for b in [green] + reds:
        p = float(branch_probability(hp, b, 1))
        frac = sample.count(prefix_path_rule(x_j(1, M), b, M)) / N
        assert abs(frac - p) <= 4 * math.sqrt(p * (1 - p) / N) + 1e-12


def test_green_means_one_and_red_means_zero() -> None:
    M = 4
    sample = hard_class_sample(HardClassParams(M=M, N=400, seed=2))
    green, reds = green_red_branches(1, M)
    for a in range(sample.N):
        g = sample.member(a)
        traj = cot(g, x_j(1, M), M)
        if traj == green:
            assert e2e(g, x_j(1, M), M) == 1
        if traj in reds:
            assert e2e(g, x_j(1, M), M) == 0
        assert sample.e2e_column(1)[a] == e2e(g, x_j(1, M), M)
        assert sample.e2e_column(2)[a] == e2e(g, x_j(2, M), M)


def test_satisfies_agrees_with_holds() -> None:
    sample = hard_class_sample(HardClassParams(M=4, N=300, seed=9))
    gens = sample.generators()
    for name, rule in preregistered_rules(4):
        want = [rule.holds(g) for g in gens]
        assert list(sample.satisfies(rule)) == want, name


def test_preregistered_rules_are_bounded_and_exact() -> None:
    rules = preregistered_rules(8)
    assert 0 < len(rules) <= 50
    hp = HardClassParams(M=8, N=1)
    r = version_rule((1,), 8)
    assert exact_probability(r, hp.p_one) == branch_probability(hp, green_red_branches(1, 8)[0], 1)


def test_concentration_of_minority_split() -> None:
    M, N = 8, 100_000
    hp = HardClassParams(M=M, N=N, seed=1)
    sample = hard_class_sample(hp)
    R = version_rule((0,), M)
    x = Bits.zeros(M * M)  # in Z_1; minority label 0; not a variable of R
    assert R.independent_of(x)
    n_r = sample.count(R)
    n_min = sample.count(R & atom(x, 0))
    assert n_r / (2 * M) <= n_min <= 3 * n_r / (2 * M)


def test_budget_is_enforced() -> None:
    from cotlab.classes.hard import BudgetError

    try:
        hard_class_sample(HardClassParams(M=8, N=10, budget=100))
    except BudgetError:
        pass
    else:
        raise AssertionError("budget ignored")
