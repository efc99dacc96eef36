"""Singular-value clipping as the projection onto a spectral-norm ball.

Walks through the decomposition itself, the clipping projection used to keep
recurrent weights stable, and the nearest-point property that makes the clip
the right projection.
"""

import numpy as np

from wogd import clip_singular_values, spectral_norm, svd

rng = np.random.default_rng(0)

print("== thin SVD of a random 4x6 matrix ==")
m = rng.normal(0.0, 1.0, (4, 6))
res = svd(m)
print("singular values:", np.round(res.sigma, 4))
recon = (res.u * res.sigma) @ res.v.T
print("reconstruction error:", np.linalg.norm(recon - m))

print()
print("== clipping to a spectral radius of 0.95 ==")
w = rng.normal(0.0, 0.6, (5, 5))
print("before:  spectral norm =", round(spectral_norm(w), 4))
clipped = clip_singular_values(w, 0.95)
print("after:   spectral norm =", round(spectral_norm(clipped), 4))
print("distance moved (Frobenius):", round(float(np.linalg.norm(w - clipped)), 4))

print()
print("no feasible point is closer than the clip:")
d_clip = np.linalg.norm(w - clipped)
closer = 0
for _ in range(2000):
    x = rng.normal(0.0, 1.0, (5, 5))
    x *= 0.95 * rng.uniform(0.0, 1.0) / spectral_norm(x)
    if np.linalg.norm(w - x) < d_clip:
        closer += 1
print(f"random feasible points closer than the clip: {closer} / 2000")

print()
print("== the clip is idempotent ==")
twice = clip_singular_values(clipped, 0.95)
print("||clip(clip(w)) - clip(w)||_F =", float(np.linalg.norm(twice - clipped)))
