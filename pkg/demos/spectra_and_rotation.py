"""Eigenvalue thresholding and the rotate-first recommendation.

High-dimensional sample spectra are badly biased: with n = 40 and d = 300
the leading sample eigenvalues overshoot and the trailing ones collapse to
zero.  The test engines therefore simulate their Gaussian nulls from a
thresholded spectrum -- hard flooring at a robust noise level, or the
energy-preserving soft variant.  Correlated (non-diagonal) covariances
additionally call for rotating the data onto the sample eigenbasis first.

Run:  python demos/spectra_and_rotation.py
"""

import numpy as np
from numpy.random import default_rng

import sigpal as sp

rng = default_rng(0)
n, d = 40, 300
truth = np.concatenate([[100.0], np.ones(d - 1)])  # one spike, unit background
X = rng.standard_normal((n, d)) * np.sqrt(truth)
X = X - X.mean(axis=0)

sample = sp.sample_eigenvalues(X)
noise = sp.background_noise(X)
hard = sp.hard_threshold(sample, noise)
soft = sp.soft_threshold(sample, noise)

print(f"n = {n}, d = {d}, true spectrum = (100, 1, ..., 1)")
print(f"robust noise level estimate: {noise:.3f} (truth ~ 1)")
print(f"{'':>10} {'lam_1':>9} {'lam_10':>9} {'lam_40':>9} {'total':>9}")
for name, spec in [("sample", sample), ("hard", hard), ("soft", soft)]:
    v = spec.values
    print(f"{name:>10} {v[0]:9.2f} {v[9]:9.3f} {v[39]:9.3f} {v.sum():9.1f}")
print(f"true      {truth[0]:9.2f} {truth[9]:9.3f} {truth[39]:9.3f} {truth.sum():9.1f}")
print(f"soft threshold shift tau = {soft.tau:.3f}, energy preserved: {soft.energy_preserved}")

bias = sp.eigen_bias(soft, truth)
print(
    f"leading-ratio bias of the soft spectrum: {bias.e:+.4f} "
    f"({'anti-conservative' if bias.anti_conservative else 'conservative'} direction)"
)

# rotation: a correlated 2-d sample becomes axis-aligned
rng2 = default_rng(1)
base = rng2.standard_normal((40, 2))
corr = base @ np.array([[1.0, 0.9], [0.0, 0.44]])
ds = sp.PartiallyLabeledDataset(corr, np.zeros(40, dtype=np.int8))
result = sp.rotate_to_diagonal(ds)
cov_before = np.cov(corr.T)
cov_after = np.cov(result.rotated.X.T)
print("\ncovariance before rotation:\n", np.round(cov_before, 3))
print("covariance after rotation:\n", np.round(cov_after, 3))
print("(the CLI flag --rotate applies this before testing)")
