"""Closed-form predictions against Monte-Carlo estimates.

Evaluates the first-round and loop-back correlation coefficients, the
prediction scalar, and the prediction error power on model-driven samples
and compares each against its closed form.
"""

import numpy as np

from lockeysim.analysis import (
    ModelStats,
    correlation,
    empirical_mse,
    gamma_analytic,
    mse_prediction,
    rho1_analytic,
    rho2_analytic,
    sample_first_round_pairs,
    sample_loopback_pairs,
)
from lockeysim.protocol import estimate_gamma

N = 100_000

print("== first-round correlation ==")
for stats in (
    ModelStats(1.0, 1.0, 0.0, 0.0, 2.0, 1.0),
    ModelStats(0.8, 0.9, 0.6, 0.4, 1.5, 1.0),
):
    x, y = sample_first_round_pairs(stats, N, (1, int(10 * stats.g_a)))
    print(f"  g=({stats.g_a},{stats.g_b}) a,b=({stats.a},{stats.b}): "
          f"closed form {rho1_analytic(stats):.4f}, sampled {correlation(x, y).real:.4f}")

print("\n== loop-back correlation ==")
stats = ModelStats(0.9, 0.9, 0.5, 0.5, 1.2, 0.9)
x, y = sample_loopback_pairs(stats, N, (2,))
print(f"  closed form {rho2_analytic(stats):.4f}, sampled {correlation(x, y).real:.4f}")

print("\n== prediction scalar ==")
stats = ModelStats(2.0, 3.0, 0.5, 0.5, 1.0, 1.0)
x, y = sample_loopback_pairs(stats, N, (3,), match_second_moment=False)
gamma_hat = estimate_gamma(x[:, None], y[:, None], min_rounds=1)[0]
print(f"  closed form {gamma_analytic(stats):.4f}, windowed estimate {abs(gamma_hat):.4f}")

print("\n== prediction error power at the optimal scalar ==")
stats = ModelStats(0.9, 0.9, 0.5, 0.5, 1.2, 0.9)
gamma_star = gamma_analytic(stats)
x, y = sample_loopback_pairs(stats, N, (4,))
print(f"  closed form {mse_prediction(gamma_star, stats):.4f}, "
      f"sampled {empirical_mse(gamma_star * x, y).mse:.4f}")

print("\n== the error power is a strictly convex parabola in the scalar ==")
for g in np.linspace(0.5, 1.5, 5) * gamma_star:
    marker = " <- minimum" if abs(g - gamma_star) < 1e-9 else ""
    print(f"  gamma = {g:.3f}: predicted error power {mse_prediction(g, stats):,.3f}{marker}")
