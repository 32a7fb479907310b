"""Pass rates of the pooled KS test at several times for the stationary models.

    python3 scripts/stationarity_study.py --runs 100 --seed 0
"""

import argparse
import time

from harris_ar import suites as U


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--replicates", type=int, default=200)
    args = ap.parse_args()

    print("case,time,passing_runs,runs,seconds")
    for i, case in enumerate(U.stationarity_cases(n_replicates=args.replicates)):
        t0 = time.perf_counter()
        passes = U.stationarity_runs(case, args.seed, args.runs, i)
        dt = time.perf_counter() - t0
        for t, n in passes.items():
            print(f"{case.name},{t},{n},{args.runs},{dt:.1f}")


if __name__ == "__main__":
    main()
