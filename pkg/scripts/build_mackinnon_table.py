"""Regenerate the embedded ADF p-value table (constant-only regression, one series).

Evaluates MacKinnon's (1994) asymptotic response surface for the tau
statistic on a fixed grid and prints it as a Python literal. The output is
pasted into ``src/tsflab/ts_metrics/_mackinnon.py``.
"""

import numpy as np
from scipy.stats import norm

TAU_MIN, TAU_STAR, TAU_MAX = -18.83, -1.61, 2.74
SMALL_P = (2.1659, 1.4412, 3.8269e-2)
LARGE_P = (1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2)


def surface(tau: float) -> float:
    coef = SMALL_P if tau <= TAU_STAR else LARGE_P
    return float(norm.cdf(sum(c * tau**i for i, c in enumerate(coef))))


def main() -> None:
    grid = np.round(np.concatenate([[TAU_MIN], np.arange(-18.8, 2.7 + 1e-9, 0.1), [TAU_STAR, TAU_MAX]]), 4)
    grid = np.unique(grid)
    rows = [f"    ({t:.2f}, {surface(t):.10e})," for t in grid]
    print("TAU_PVALUE_TABLE = (")
    print("\n".join(rows))
    print(")")


if __name__ == "__main__":
    main()
