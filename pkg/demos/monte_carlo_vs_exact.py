"""
The Monte-Carlo procedure and its exact counterpart
===================================================

Simulating the test directly: draw N fields, count the passes, invert the
CDF, repeat M times and keep the admissible runs. Because the pass count is
binomial, the same statistics can be summed exactly; the two should agree
to within sampling error.
"""

import math

from rcthresh import RngStream, oracle_point, quantile, simulate_point, unit_mean_spec

spec = unit_mean_spec("rice", 3)
stream = RngStream(seed=2024)
print(f"{'N':>4} {'p':>5} {'MC mean':>9} {'exact':>9} {'z':>6} {'MC rel.std':>10} {'exact':>8}")
for i, n in enumerate((5, 10, 50)):
    for j, p in enumerate((0.1, 0.5, 0.9)):
        e_thr = quantile(spec, p)
        mc = simulate_point(n, e_thr, spec, trials=100_000, stream=stream.child(i, j))
        ex = oracle_point(n, e_thr, spec)
        se = ex.e_est_std / math.sqrt(mc.trials_used * ex.admissible_fraction)
        z = (mc.e_est_mean - ex.e_est_mean) / se
        print(
            f"{n:>4} {p:>5.2f} {mc.e_est_mean:>9.5f} {ex.e_est_mean:>9.5f} {z:>6.2f} "
            f"{mc.rel_std:>10.5f} {ex.rel_std:>8.5f}"
        )
