"""Evaluate every spectral inequality on a random ensemble.

Each record keeps both sides, so a near miss shows up as a small margin
rather than a bare pass.  Constant operators (all gaps closed) are flagged
degenerate instead of being counted.
"""
import numpy as np

from periodic_jacobi import certify, make_jacobi, random_jacobi

rng = np.random.default_rng(7)
margins = {}
violations = 0
for _ in range(100):
    report = certify(random_jacobi(rng, int(rng.integers(2, 7))))
    violations += len(report.violations)
    for rec in report.records:
        scale = max(1.0, abs(rec.lhs), abs(rec.rhs))
        margins.setdefault(rec.name, []).append(rec.margin / scale)

print(f"{'record':<16}{'min relative margin':>22}")
for name, values in margins.items():
    print(f"{name:<16}{min(values):>22.3e}")
print(f"\nviolations over 100 operators: {violations}")

flat = certify(make_jacobi(2, [1, 1], [0, 0]))
print("\nconstant operator: degenerate =", flat.degenerate,
      "| c - 2A =", f"{flat['c_gt_2A'].margin:.1e}")
