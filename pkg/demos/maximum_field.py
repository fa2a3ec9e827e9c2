"""
Maximum field over N stirrer positions
======================================

The classic quantities for an ideal chamber: the expected maximum of N
unit-mean Rayleigh samples and the distribution of that maximum.
"""

import numpy as np

from rcthresh import RngStream, expected_max_field, max_field_cdf, max_field_quantile, rayleigh, sample_batch

for n in (1, 10, 100):
    print(f"N = {n:>3}: expected max ~ {expected_max_field(n):.4f}, 95% of maxima below {max_field_quantile(n, 0.95):.4f}")

# Check the distribution of the maximum against simulation.
x = sample_batch(rayleigh(), 10 * 100_000, RngStream(1)).reshape(100_000, 10)
maxima = x.max(axis=1)
for level in (1.5, 2.0, 2.5):
    print(f"P(max of 10 <= {level}): formula {max_field_cdf(10, level):.4f}, simulated {np.mean(maxima <= level):.4f}")
print(f"mean of simulated maxima: {maxima.mean():.4f} (approximation {expected_max_field(10):.4f})")
