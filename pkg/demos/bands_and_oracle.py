"""Bands from the discriminant, checked against brute-force Bloch eigenvalues.

The spectrum of a q-periodic Jacobi operator is the set where |D(lambda)| <= 2.
The same bands appear as the ranges of the eigenvalues of the q x q Bloch
matrices L(theta), theta in [0, pi].  The two routes share no code.
"""
import numpy as np

from periodic_jacobi import band_edges, bloch_oracle, hausdorff_band_distance, harper, random_jacobi

J = random_jacobi(np.random.default_rng(1), 5)
print("a =", np.round(J.a, 4))
print("b =", np.round(J.b, 4))

B = band_edges(J)
print("\nband        from D(lambda) = +-2")
for m, (lo, hi) in enumerate(B.bands, 1):
    print(f"  {m}   [{lo: .12f}, {hi: .12f}]")
print("gap widths:", np.array2string(B.gap_widths, precision=6))

O = bloch_oracle(J, 721)
dist = hausdorff_band_distance(O.bands, B.bands)
print(f"\nBloch sweep over 721 values of theta; worst band mismatch {dist.max():.2e}")

H = band_edges(harper(1, 4))
print("\nHarper p=1, q=4 has a closed centre gap:", H.closed.tolist())
