"""Worst-of-two-targets e2e regret for each deterministic learner against the proof-chain floor.

    python scripts/stochastic_sweep.py --Ms 1 3 5 --trials 4000
"""

import argparse
import os

from cotlab.stochastic import (
    DETERMINISTIC_E2E_LEARNERS,
    delta,
    horizon_for,
    theory_floor,
    worst_target_regret,
    write_reports,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--Ms", type=int, nargs="+", default=[1, 3, 5])
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out/stochastic")
    args = ap.parse_args()

    reports = []
    print(f"{'M':>2} {'T':>5} {'delta':>9} {'floor':>8}  {'learner':15s} {'worst regret':>12} {'se':>7}")
    for M in args.Ms:
        T = horizon_for(M)
        floor = theory_floor(M, T)
        for name, make in sorted(DETERMINISTIC_E2E_LEARNERS.items()):
            per, worst = worst_target_regret(make, M, args.seed, args.trials, T)
            reports += [per[-1], per[1]]
            print(f"{M:>2} {T:>5} {float(delta(M)):>9.6f} {floor:>8.4f}  {name:15s} {worst.regret:>12.4f} {worst.se:>7.4f}")
    os.makedirs(args.out, exist_ok=True)
    write_reports(reports, os.path.join(args.out, "sweep.csv"))


if __name__ == "__main__":
    main()
