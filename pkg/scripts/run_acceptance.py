"""Run every registered claim and write one CSV of result records.

    python scripts/run_acceptance.py [--out out/acceptance] [--only latch kl-bound]
"""

import argparse
import os
import sys

from cotlab.claims import CLAIMS, run_claim
from cotlab.experiments import records_csv, write_atomic


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/acceptance")
    ap.add_argument("--only", nargs="*", default=None, help="claim ids")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    ids = args.only or sorted(CLAIMS, key=lambda c: CLAIMS[c].criterion)
    opts = {} if args.seed is None else {"seed": args.seed}
    all_records, bad = [], 0
    for cid in ids:
        recs, dt = run_claim(cid, opts)
        ok = all(r.passed for r in recs)
        bad += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {CLAIMS[cid].criterion:2d} {cid:15s} {dt:6.1f}s  {len(recs)} records")
        for r in recs:
            if not r.passed:
                print("      " + r.line())
        all_records += recs
    write_atomic(os.path.join(args.out, "acceptance.csv"), records_csv(all_records))
    print(f"{len(ids) - bad}/{len(ids)} criteria pass; records in {args.out}/acceptance.csv")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
