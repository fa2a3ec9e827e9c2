"""
How often does a run give no usable count?
==========================================

If every position passes (or every position fails) the count carries no
information about the threshold. The chance of an all-pass run is worth
knowing, because nothing in the data flags it.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from rcthresh import exclusion_probabilities, rayleigh

spec = rayleigh()
e_thr = np.linspace(0.05, 3.0, 200)
fig, (ax_low, ax_high) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
for n in (5, 10, 20, 50):
    pairs = np.array([exclusion_probabilities(n, e, spec) for e in e_thr])
    ax_low.semilogy(e_thr, pairs[:, 0], label=f"N = {n}")
    ax_high.semilogy(e_thr, pairs[:, 1], label=f"N = {n}")
ax_low.set_title("all samples below threshold")
ax_high.set_title("all samples above threshold")
for ax in (ax_low, ax_high):
    ax.set_xlabel("normalized threshold")
    ax.set_ylim(1e-6, 1.5)
ax_low.legend()
fig.tight_layout()
fig.savefig("exclusion_probabilities.png", dpi=120)

below, above = exclusion_probabilities(10, 2.4, spec)
print(f"N = 10, threshold 2.4 x mean: P(all pass) = {below:.4f}, P(all fail) = {above:.2e}")
