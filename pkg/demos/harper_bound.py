"""How wide is the spectrum of Harper's operator?

For b_j = 2 cos(2 pi p j / q + theta) and a_j = 1, the trace Tr L^2 equals 4q
whenever q does not divide 2p.  Plugging that into the inequality
c^2 (1/2 + ln(c / 2A)) > Tr L^2 / q gives a lower bound on the half-width c
of the spectrum that is the same for every p and q.
"""
from periodic_jacobi import harper_bound_demo, harper_lower_bound

bound = harper_lower_bound(4.0)
print(f"root of x^2 (1/2 + ln(x/2)) = 4:  {bound:.10f}\n")

print(f"{'p':>3} {'q':>3} {'theta':>6} {'Tr L^2':>8} {'c':>12}  c > bound")
for p, q in [(1, 3), (1, 5), (2, 5), (3, 7), (5, 11), (7, 13)]:
    for theta in (0.0, 0.7):
        d = harper_bound_demo(p, q, theta)
        print(f"{p:3d} {q:3d} {theta:6.2f} {d.trace_L2:8.3f} {d.c:12.8f}  {d.holds}")

print("\nThe bound stays put while c moves with p, q and theta, and c never drops below it.")
