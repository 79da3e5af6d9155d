"""The quasimomentum k(z) and the trace formulas it satisfies.

Substituting lambda = -c cos z maps the half-strip 0 < Re z < pi onto the upper
half-plane, and k solves 2 cos(q k) = D(-c cos z).  On the real segment Re k
is the (rescaled) density of states and Im k the Lyapunov exponent, which
lives on the gaps only.  Its moments against cos^n x are fixed by Tr L^j.
"""
import numpy as np

from periodic_jacobi import (
    boundary_samples, build_model, dirichlet_integral_1, harper, herglotz_k, k_complex,
    trace_moment_check, vertical_identity_check,
)

M = build_model(harper(1, 3))
print(f"c = {M.c:.10f}, A = {M.A:.1f}, normalising shift = {M.bands.shift:.6f}")
print("gaps in x:", np.array2string(M.zgaps.gaps, precision=6))
print("slit heights h_n:", np.array2string(M.h, precision=6))

s = boundary_samples(M, 9)
print("\n     x        u        v")
for x, u, v in zip(s.x, s.u, s.v):
    print(f"  {x:6.3f}  {u:7.4f}  {v:7.4f}")

print("\ntrace-formula moments (1/pi) int v cos^n x dx")
for n in range(5):
    t = trace_moment_check(M, n)
    print(f"  n={n}: {t.lhs: .14f} vs {t.rhs: .14f}")

z = np.array([0.4 + 0.5j, 1.5 + 1.0j, 2.8 + 0.2j])
print("\nk at a few interior points, two independent ways:")
for zz, a, b in zip(z, k_complex(M, z), herglotz_k(M, z)):
    print(f"  z={zz:.2f}:  {a:.10f}   {b:.10f}")

print(f"\nk(10i) - 10i = {k_complex(M, 10j) - 10j:.8f}  (tends to i Q_0, Q_0 = {M.Q[0]:.8f})")
vi = vertical_identity_check(M)
print(f"int u dx = {vi.lhs:.12f}, vertical-side expression = {vi.rhs:.12f}")
d = dirichlet_integral_1(M)
print(f"Dirichlet integral of k - z = {d.integral:.8f}, ln(c/2A) = {d.expected:.8f}")
