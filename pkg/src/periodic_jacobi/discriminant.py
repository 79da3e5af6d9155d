"""Discriminant D(lambda) = phi_{q+1}(lambda) + theta_q(lambda) and friends.

Polynomials are carried as ascending coefficient arrays (``c[k]`` multiplies
lambda^k), the convention of :mod:`numpy.polynomial.polynomial`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .core import PeriodicJacobi, capacity, gershgorin_interval, make_jacobi
from .errors import InconsistentPolynomialsError, NumericalError, ValidationError

__all__ = [
    "FundamentalPair",
    "DiscriminantRep",
    "fundamental_pair",
    "discriminant_value",
    "discriminant_and_derivative",
    "discriminant_poly",
    "monic_phi_polys",
    "reconstruct_from_monic_pair",
]

RADICAND_SLACK = 1e-10


@dataclass(frozen=True)
class FundamentalPair:
    """Terminal values phi_q, phi_{q+1}, theta_q, theta_{q+1} at one lambda."""

    phi_q: complex
    phi_q1: complex
    theta_q: complex
    theta_q1: complex

    @property
    def wronskian(self):
        return self.phi_q1 * self.theta_q - self.phi_q * self.theta_q1

    @property
    def discriminant(self):
        return self.phi_q1 + self.theta_q


@dataclass(frozen=True, eq=False)
class DiscriminantRep:
    coeffs: np.ndarray
    deriv_coeffs: np.ndarray
    critical_points: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, lam):
        return P.polyval(lam, self.coeffs)

    def derivative(self, lam):
        return P.polyval(lam, self.deriv_coeffs)


def _recurrence(J: PeriodicJacobi, lam, psi0, psi1):
    a, b = J.a, J.b
    prev, cur = psi0, psi1
    a_prev = a[-1]
    for n in range(J.q):
        prev, cur = cur, ((lam - b[n]) * cur - a_prev * prev) / a[n]
        a_prev = a[n]
    return prev, cur


def fundamental_pair(J: PeriodicJacobi, lam) -> FundamentalPair:
    """Run the three-term recurrence for phi (0, 1) and theta (1, 0) up to n = q+1.

    ``lam`` may be real, complex or an array; the fields then have its shape.
    """
    lam = np.asarray(lam)
    zero = np.zeros_like(lam, dtype=np.result_type(lam, float))
    one = zero + 1
    phi_q, phi_q1 = _recurrence(J, lam, zero, one)
    theta_q, theta_q1 = _recurrence(J, lam, one, zero)
    return FundamentalPair(phi_q, phi_q1, theta_q, theta_q1)


def discriminant_value(J: PeriodicJacobi, lam):
    """D(lambda) evaluated by the recurrence (vectorised over ``lam``)."""
    out = fundamental_pair(J, lam).discriminant
    return out.item() if np.ndim(out) == 0 else out


def discriminant_and_derivative(J: PeriodicJacobi, lam):
    """Return (D(lambda), D'(lambda)) by differentiating the recurrence."""
    lam = np.asarray(lam)
    dtype = np.result_type(lam, float)
    a, b = J.a, J.b
    total = np.zeros(lam.shape, dtype=dtype)
    dtotal = np.zeros(lam.shape, dtype=dtype)
    for psi0, psi1, stop in ((0.0, 1.0, J.q + 1), (1.0, 0.0, J.q)):
        prev = np.full(lam.shape, psi0, dtype=dtype)
        cur = np.full(lam.shape, psi1, dtype=dtype)
        dprev = np.zeros(lam.shape, dtype=dtype)
        dcur = np.zeros(lam.shape, dtype=dtype)
        a_prev = a[-1]
        # cur holds psi_{n+1} after step n; phi needs n = q+1, theta needs n = q
        for n in range(stop - 1):
            shifted = lam - b[n]
            nxt = (shifted * cur - a_prev * prev) / a[n]
            dnxt = (cur + shifted * dcur - a_prev * dprev) / a[n]
            prev, cur, dprev, dcur = cur, nxt, dcur, dnxt
            a_prev = a[n]
        total += cur
        dtotal += dcur
    return total, dtotal


def _determinant_poly(J: PeriodicJacobi) -> np.ndarray:
    """Coefficients of det(lambda - L) = D_{1q} - a_q^2 D_{2,q-1}."""
    a, b, q = J.a, J.b, J.q
    lam = np.array([0.0, 1.0])

    def chain(start, stop):
        # determinant of rows/columns start..stop (1-based) with corners removed
        prev, cur = np.array([0.0]), np.array([1.0])
        for j in range(start, stop + 1):
            term = P.polymul(P.polysub(lam, [b[j - 1]]), cur)
            if j > start:
                term = P.polysub(term, a[j - 2] ** 2 * prev)
            prev, cur = cur, term
        return cur

    return P.polysub(chain(1, q), a[q - 1] ** 2 * chain(2, q - 1))


def _roots_all_real(coeffs: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Roots of a polynomial whose roots are all real, simple and inside (lo, hi).

    Roots of p' interlace those of p, so the roots of each derivative
    (found recursively, starting from the linear one) bracket the roots of
    the next lower derivative together with lo and hi.
    """
    coeffs = P.polytrim(np.asarray(coeffs, dtype=float), 0)
    deg = len(coeffs) - 1
    if deg < 1:
        return np.empty(0)
    if deg == 1:
        return np.array([-coeffs[0] / coeffs[1]])
    inner = _roots_all_real(P.polyder(coeffs), lo, hi)
    brackets = np.concatenate(([lo], inner, [hi]))
    vals = P.polyval(brackets, coeffs)
    roots = []
    scale = 1.0 + max(abs(lo), abs(hi))
    for left, right, fl, fr in zip(brackets[:-1], brackets[1:], vals[:-1], vals[1:]):
        if fl == 0.0:
            roots.append(left)
            continue
        if fr == 0.0:
            roots.append(right)
            continue
        if np.sign(fl) == np.sign(fr):
            # roundoff at a near-double root: the extremum is the best estimate
            roots.append(left if abs(fl) < abs(fr) else right)
            continue
        roots.append(_bisect(lambda x: P.polyval(x, coeffs), left, right, fl, 1e-13 * scale))
    return np.array(roots)


def _bisect(f, left, right, fleft, tol):
    for _ in range(200):
        mid = 0.5 * (left + right)
        if right - left <= tol or mid in (left, right):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(fleft):
            left, fleft = mid, fm
        else:
            right = mid
    return 0.5 * (left + right)


def discriminant_poly(J: PeriodicJacobi) -> DiscriminantRep:
    """Monomial coefficients of D, of D', and the q-1 critical points of D.

    Raises
    ------
    NumericalError
        If root isolation does not return q-1 distinct critical points.
    """
    A = capacity(J)
    coeffs = _determinant_poly(J) / A ** J.q
    dcoeffs = P.polyder(coeffs)
    lo, hi = gershgorin_interval(J)
    pad = 1e-6 * (1.0 + hi - lo)
    crit = np.sort(_roots_all_real(dcoeffs, lo - pad, hi + pad))
    if len(crit) != J.q - 1 or np.any(np.diff(crit) <= 0):
        raise NumericalError(
            f"expected {J.q - 1} distinct critical points of D, found {crit.tolist()}")
    return DiscriminantRep(coeffs, dcoeffs, crit)


def monic_phi_polys(J: PeriodicJacobi):
    """Monic hat_phi_{q+1} and hat_phi_q, plus the leading coefficient of phi_{q+1}.

    The tuple is ordered to feed :func:`reconstruct_from_monic_pair` directly.

    phi_n has leading coefficient 1/(a_1 ... a_{n-1}); its monic form obeys
    hat_phi_{n+1} = (lambda - b_n) hat_phi_n - a_{n-1}^2 hat_phi_{n-1}
    with hat_phi_0 = 0 and hat_phi_1 = 1.
    """
    a, b = J.a, J.b
    prev, cur = np.array([0.0]), np.array([1.0])
    for n in range(1, J.q + 1):
        nxt = P.polymul([-b[n - 1], 1.0], cur)
        if n > 1:
            nxt = P.polysub(nxt, a[n - 2] ** 2 * prev)
        prev, cur = cur, nxt
    leading = float(np.exp(-np.sum(np.log(a))))
    return cur, prev, leading


def reconstruct_from_monic_pair(phi_hat_next, phi_hat, leading: float) -> PeriodicJacobi:
    """Recover (a, b) from monic hat_phi_{q+1} (degree q) and hat_phi_q (degree q-1).

    Runs the downward recursion n = q, ..., 1 on
    hat_phi_{n+1} + (b_n - lambda) hat_phi_n + a_{n-1}^2 hat_phi_{n-1} = 0,
    reading b_n and a_{n-1}^2 off the two top coefficients.  ``leading`` is
    the leading coefficient of the non-monic phi_{q+1} and fixes
    a_q = 1 / (leading * a_1 ... a_{q-1}).

    Raises
    ------
    InconsistentPolynomialsError
        If some a_{n-1}^2 comes out negative (beyond roundoff slack): the
        pair is not realisable by a Jacobi matrix.
    """
    nxt = P.polytrim(np.asarray(phi_hat_next, dtype=float), 0)
    cur = P.polytrim(np.asarray(phi_hat, dtype=float), 0)
    q = len(nxt) - 1
    if len(cur) != q or q < 2:
        raise ValidationError("need degrees q and q-1 with q >= 2")
    if not (np.isclose(nxt[-1], 1.0, rtol=0, atol=1e-12)
            and np.isclose(cur[-1], 1.0, rtol=0, atol=1e-12)):
        raise ValidationError("both polynomials must be monic")
    if not leading > 0:
        raise ValidationError("leading coefficient of phi_{q+1} must be positive")

    def coef(poly, j):
        return poly[j] if 0 <= j < len(poly) else 0.0

    a = np.zeros(q)
    b = np.zeros(q)
    for n in range(q, 0, -1):
        b[n - 1] = coef(cur, n - 2) - coef(nxt, n - 1)
        if n == 1:
            break
        radicand = coef(cur, n - 3) - coef(nxt, n - 2) - b[n - 1] * coef(cur, n - 2)
        if radicand < 0:
            if radicand < -RADICAND_SLACK:
                raise InconsistentPolynomialsError(
                    f"inconsistent polynomial pair: a_{n - 1}^2 = {radicand:.3e} < 0")
            radicand = 0.0
        a[n - 2] = np.sqrt(radicand)
        if a[n - 2] == 0.0:
            raise InconsistentPolynomialsError(f"inconsistent polynomial pair: a_{n - 1} = 0")
        prev = -P.polyadd(nxt, P.polymul([b[n - 1], -1.0], cur)) / radicand
        prev = prev[: n - 1] if n > 1 else prev
        nxt, cur = cur, prev
    a[q - 1] = 1.0 / (leading * np.prod(a[:-1]))
    return make_jacobi(q, a, b)
