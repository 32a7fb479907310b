"""Distance between theta*N (N Harris, theta = p/(1-p)) and k*Gamma(1/k).

Prints the exact sup distance between the two d.f.s next to the sampled KS
distance.  For k >= 2 the lattice law keeps an atom of size about p**(1/k)
at its smallest point, so the exact distance decays like p**(1/k) and not p.

    python3 scripts/lemma42_study.py --n 100000
"""

import argparse

from scipy import stats

from harris_ar import verify as V


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10**5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()

    ps = [0.1, 0.01, 0.001, 1e-4, 1e-5]
    print("k,p,exact,sampled,p^(1/k)")
    for k in args.k:
        for i, p in enumerate(ps):
            a, b = V.lemma42_samples(k, p, args.n, args.seed, i)
            d = stats.ks_2samp(a, b).statistic
            print(f"{k},{p:g},{V.lemma42_exact_distance(k, p):.5f},{d:.5f},{p ** (1 / k):.5f}")


if __name__ == "__main__":
    main()
