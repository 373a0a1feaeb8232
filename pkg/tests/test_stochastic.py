import csv
import math
from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from cotlab import rng
from cotlab.stochastic import (
    DETERMINISTIC_E2E_LEARNERS,
    BayesLearner,
    ConstantLearner,
    EmpiricalMeanLearner,
    RegretReport,
    StochasticGen,
    bh_lower_bound,
    delta,
    direct_expected_regret_exact,
    direct_regret_estimates,
    e2e_one_prob,
    e2e_one_prob_recursive,
    horizon_for,
    kl_pair,
    kl_pair_direct,
    sample_final_bits,
    simulate_direct_game,
    simulate_e2e_game,
    theory_floor,
    worst_target_regret,
    write_reports,
)
from cotlab.tokens import EMPTY


def test_q_examples() -> None:
    assert e2e_one_prob(1, 0) == 0
    assert e2e_one_prob(1, 1) == Fraction(3, 4)
    assert e2e_one_prob(-1, 3) == Fraction(7, 16)
    assert e2e_one_prob(1, 3) == Fraction(1, 2) + Fraction(1, 2**4)


@given(st.sampled_from([-1, 1]), st.integers(0, 40))
def test_q_closed_form_matches_recursion(sigma: int, M: int) -> None:
    assert e2e_one_prob(sigma, M) == e2e_one_prob_recursive(sigma, M)


def test_next_prob_flips_the_last_bit() -> None:
    g = StochasticGen(1)
    assert g.next_prob(EMPTY) == Fraction(3, 4)
    assert g.next_prob("1") == Fraction(1, 4)
    assert StochasticGen(-1).next_prob("0") == Fraction(1, 4)


def test_trajectory_frequencies_match_marginal() -> None:
    n = 100_000
    for sigma in (-1, 1):
        for M in (1, 2, 5):
            bits = sample_final_bits(sigma, M, (n,), seed=4, trajectory=True)
            q = float(e2e_one_prob(sigma, M))
            assert abs(bits.mean() - q) <= 4 * math.sqrt(q * (1 - q) / n)


def test_empirical_mean_learner_rules() -> None:
    a = EmpiricalMeanLearner()
    assert a.predict(EMPTY) == 0
    for _ in range(3):
        a.update(EMPTY, 1)
    assert a.sigma_hat() == 1
    assert a.predict(EMPTY) == 1 and a.predict("1") == 0
    b = EmpiricalMeanLearner()
    b.update(EMPTY, 1)
    b.update(EMPTY, 0)
    assert b.sigma_hat() == 1


def test_estimator_error_at_round_33() -> None:
    # Pr[σ̂_33 ≠ +1] against e^{-32/8}, by Monte Carlo over 32 observations
    n, t = 200_000, 33
    z = rng.uniforms(8, rng.stream_tag("t33"), np.arange(n)[:, None], np.arange(t - 1)[None, :]) < 0.75
    wrong = (2 * z.sum(axis=1) < t - 1).mean()
    se = math.sqrt(max(wrong * (1 - wrong), 1e-12) / n)
    assert wrong <= math.exp(-(t - 1) / 8) + 3 * se


def test_bayes_learner_has_zero_regret() -> None:
    for sigma in (-1, 1):
        r = simulate_direct_game(lambda: BayesLearner(sigma), sigma, 50, seed=1, trials=3)
        assert r.regret == 0
        for M in (1, 3):
            e = simulate_e2e_game(lambda: BayesLearner(sigma, M), sigma, M, 40, seed=1, trials=5)
            assert e.regret == 0


def test_direct_game_regret_is_bounded() -> None:
    for sigma in (-1, 1):
        ests = direct_regret_estimates(sigma, 10_000, list(range(20)), trials=10)
        assert (ests <= 5).all()
        assert direct_expected_regret_exact(sigma, 10_000) <= 5


def test_direct_estimates_agree_with_loop_simulation() -> None:
    # same counters, two implementations
    for sigma in (-1, 1):
        fast = direct_regret_estimates(sigma, 60, [3], trials=8)[0]
        slow = simulate_direct_game(EmpiricalMeanLearner, sigma, 60, seed=3, trials=8).regret
        assert math.isclose(fast, slow)


def test_exact_direct_regret_matches_monte_carlo() -> None:
    T = 40
    for sigma in (-1, 1):
        mc = direct_regret_estimates(sigma, T, [0], trials=20_000)[0]
        exact = direct_expected_regret_exact(sigma, T)
        assert abs(mc - exact) < 0.05


def test_symmetry_under_complement() -> None:
    # complementing every prediction and swapping σ leaves regret unchanged
    a = simulate_direct_game(lambda: ConstantLearner(1), 1, 30, seed=0, trials=2)
    b = simulate_direct_game(lambda: ConstantLearner(0), -1, 30, seed=0, trials=2)
    assert a.regret == b.regret == 0
    c = simulate_direct_game(lambda: ConstantLearner(0), 1, 30, seed=0, trials=2)
    d = simulate_direct_game(lambda: ConstantLearner(1), -1, 30, seed=0, trials=2)
    assert c.regret == d.regret == 15


def test_horizons_and_floors() -> None:
    assert delta(1) == Fraction(1, 4)
    assert [horizon_for(M) for M in (1, 3, 5)] == [1, 8, 128]
    assert bh_lower_bound(1, 1) == 0.25
    for M in (1, 3, 5):
        T = horizon_for(M)
        assert bh_lower_bound(M, T) >= 0.25 * math.exp(-0.5)
        d = float(delta(M))
        want = math.fsum(2 * d * 0.25 * math.exp(-(t - 1) * kl_pair(d)) for t in range(1, T + 1))
        assert math.isclose(theory_floor(M), want)


def test_kl_closed_form() -> None:
    for d in np.linspace(1e-4, 0.25, 200):
        assert math.isclose(kl_pair(d), kl_pair_direct(d), rel_tol=1e-9, abs_tol=1e-15)
        assert kl_pair(d) <= 16 * d * d


def test_argument_checks() -> None:
    for call in (lambda: bh_lower_bound(2, 1), lambda: bh_lower_bound(1, 0), lambda: e2e_one_prob(0, 1)):
        try:
            call()
        except ValueError:
            pass
        else:
            raise AssertionError("accepted")


def test_t1_worst_case_regret_at_least_quarter() -> None:
    for name, make in DETERMINISTIC_E2E_LEARNERS.items():
        _, worst = worst_target_regret(make, 1, seed=0, trials=200, T=1)
        assert worst.regret >= 0.25, name


def test_learners_clear_the_floor() -> None:
    for M in (1, 3):
        for name, make in DETERMINISTIC_E2E_LEARNERS.items():
            _, worst = worst_target_regret(make, M, seed=2, trials=2000)
            assert worst.regret >= worst.theory_floor - 3 * worst.se, (M, name)


def test_hardwired_learner_beats_the_floor() -> None:
    for sigma in (-1, 1):
        r = simulate_e2e_game(lambda: BayesLearner(sigma, 3), sigma, 3, horizon_for(3), seed=0, trials=10)
        assert r.regret == 0 < r.theory_floor


def test_e2e_game_rejects_even_m() -> None:
    try:
        simulate_e2e_game(EmpiricalMeanLearner, 1, 2, 5)
    except ValueError:
        pass
    else:
        raise AssertionError("even M accepted")


def test_report_csv(tmp_path) -> None:
    reports = [simulate_e2e_game(EmpiricalMeanLearner, s, 1, 4, seed=0, trials=10) for s in (-1, 1)]
    path = tmp_path / "r.csv"
    write_reports(reports, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert tuple(rows[0]) == RegretReport.CSV_FIELDS
    assert [int(r["sigma"]) for r in rows] == [-1, 1]
    again = tmp_path / "s.csv"
    write_reports([simulate_e2e_game(EmpiricalMeanLearner, s, 1, 4, seed=0, trials=10) for s in (-1, 1)], again)
    assert path.read_bytes() == again.read_bytes()
