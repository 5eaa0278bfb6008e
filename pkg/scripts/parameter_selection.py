#!/usr/bin/env python3
"""Replicate study of the data-driven parameter selection on the benchmark
process: distribution of the cross-validated sparsity level and of the
selected retained-frequency fraction.

Example:
    python scripts/parameter_selection.py --replicates 20 --c 3 --axis sparsity
    python scripts/parameter_selection.py --replicates 20 --c 1 --axis eta
"""

import argparse
import collections
import sys

import numpy as np

from lspca.driver import LspcaParams, lspca_fit
from lspca.simulate import SimScenario, lspca_process
from lspca.spectral import default_lag_order, dft_frame, truncated_periodogram
from lspca.tuning import TuneConfig, cv_select, select_eta


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--axis", choices=["sparsity", "eta"], default="sparsity")
    ap.add_argument("--replicates", type=int, default=20)
    ap.add_argument("--p", type=int, default=64)
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--c", type=float, default=3.0)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--s-max", type=int, default=16)
    ap.add_argument("--criterion", choices=["aic", "aicc", "bic"], default="bic")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    m = default_lag_order(args.n)
    half = args.n // 2
    picks = []
    for rep in range(args.replicates):
        x = lspca_process(SimScenario(p=args.p, n=args.n, c=args.c,
                                      seed=args.seed + rep))
        if args.axis == "sparsity":
            cfg = TuneConfig(d=args.d, s_grid=tuple(range(1, args.s_max + 1)),
                             theta_grid=(0.0, 0.3, 0.6), k=args.k, m_lags=m,
                             criterion=args.criterion)
            fixed = LspcaParams(d=args.d, sparsity=args.s_max, theta=0.0,
                                eta=round(0.23 * half), m_lags=m)
            picks.append(cv_select(x, cfg, "sparsity", fixed).value)
        else:
            spec = truncated_periodogram(x, m)
            fit = lspca_fit(spec, LspcaParams(d=args.d, sparsity=args.s_max,
                                              theta=0.0, m_lags=m))
            sel = select_eta(spec, fit, dft_frame(x), criterion=args.criterion)
            picks.append(sel.eta / half)
        print(f"replicate {rep}: {picks[-1]}")

    if args.axis == "sparsity":
        counts = collections.Counter(picks)
        print("selected sparsity counts:",
              dict(sorted(counts.items())))
    else:
        q = np.quantile(picks, [0, 0.25, 0.5, 0.75, 1.0])
        print(f"retained fraction: mean {np.mean(picks):.3f}  "
              f"quartiles {np.round(q, 3).tolist()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
