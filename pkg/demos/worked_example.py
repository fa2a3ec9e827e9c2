"""
Estimating a DUT threshold from pass/fail counts
================================================

A chamber calibrated to a mean rectangular field of 50 V/m is stirred
through 10 independent positions. The device passes at 9 of them and fails
at one. What is its susceptibility threshold?
"""

from rcthresh import MeasurementRecord, cdf, estimate_threshold, quantile, rayleigh

# The naive answer inverts the field CDF at the pass fraction N_low / N.
# Fields are normalized to a mean of 1, so this is in units of the mean field.
spec = rayleigh()
naive = quantile(spec, 9 / 10)
print(f"naive estimate F^-1(0.9) = {naive:.4f} (x 50 V/m = {50 * naive:.1f} V/m)")

# With only 10 positions that inversion is biased low. estimate_threshold
# looks up the multiplicative correction for N = 10, computing the exact
# correction table on the fly when none is supplied.
record = MeasurementRecord(n=10, n_low=9, mean_field=50.0)
est = estimate_threshold(record)
print(f"correction factor      = {est.e_factor:.4f}")
print(f"unbiased threshold     = {est.e_thr_norm:.4f} x mean = {est.e_thr_abs:.1f} V/m")
print(f"relative uncertainty   = {100 * est.rel_std:.2f} %")

# One fail out of ten sits right at the top of the resolvable range, so the
# correction was clamped to the last tabulated point and the result should
# be read as a lower bound.
print(f"clamped: {est.clamped}  ({est.notes})")

# More positions tighten the estimate. Here the same device is re-tested
# with 50 positions and fails at 4 of them.
est50 = estimate_threshold(MeasurementRecord(n=50, n_low=46, mean_field=50.0))
print(f"N = 50, 46 passes: {est50.e_thr_abs:.1f} V/m +- {100 * est50.rel_std:.1f} %")

# Sanity check: the probability that a single position exceeds that level.
print(f"P(field > threshold) = {1 - cdf(spec, est50.e_thr_norm):.3f}")
