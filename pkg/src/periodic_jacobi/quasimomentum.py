"""Quasimomentum k(z) = u + i v on the half-strip 0 <= Re z <= pi, Im z >= 0.

With lambda = -c cos z, the map is fixed by e^{i q k} = m(lambda), where m is
the root of m + 1/m = D(lambda) with |m| <= 1.  Hence

* v = Im k = -log|m| / q (the Lyapunov exponent on the real axis),
* u = Re k = arg m / q, continued along horizontal lines starting from
  u(0 + iy) = 0.  u is strictly increasing in x on every such line, which
  makes phase unwrapping checkable (it must add up to exactly pi).

On the real segment the boundary values are available in closed form and
are used directly (:func:`u_of_x`, :func:`v_of_x`).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import integrate, optimize

from .core import PeriodicJacobi, build_L, trace_powers
from .discriminant import DiscriminantRep, discriminant_and_derivative, discriminant_poly
from .errors import EdgeSingularityError, NumericalError, ValidationError
from .spectrum import BandStructure, ZGapSet, band_edges, normalize, x_of_lambda, z_coordinates

__all__ = [
    "QuasimomentumModel",
    "BoundarySamples",
    "TraceMoment",
    "DirichletResult",
    "VerticalIdentity",
    "GapShapeReport",
    "build_model",
    "q_coefficients",
    "trace_moment_rhs",
    "v_of_x",
    "u_of_x",
    "boundary_samples",
    "k_complex",
    "k_prime",
    "trace_moment_check",
    "dirichlet_integral_1",
    "dirichlet_integral_2",
    "vertical_identity_check",
    "herglotz_k",
    "gap_shape_checks",
]

EDGE_EXCLUSION = 1e-12
DEFAULT_YMAX = 12.0


@dataclass(frozen=True, eq=False)
class QuasimomentumModel:
    """Everything needed to evaluate k for one normalised operator."""

    J: PeriodicJacobi
    bands: BandStructure
    disc: DiscriminantRep
    zgaps: ZGapSet
    h: np.ndarray
    Q: np.ndarray
    traces: np.ndarray

    @property
    def q(self) -> int:
        return self.J.q

    @property
    def c(self) -> float:
        return self.bands.c

    @property
    def A(self) -> float:
        return self.bands.A

    @property
    def h_plus(self) -> float:
        return float(self.h.max()) if self.h.size else 0.0

    @property
    def open_gaps(self) -> np.ndarray:
        return self.bands.open_gaps

    @property
    def edge_x(self) -> np.ndarray:
        """Preimages in [0, pi] of 0, pi and every open-gap edge, sorted."""
        pts = [0.0, np.pi]
        for n in self.open_gaps:
            pts.extend(self.zgaps.gaps[n])
        return np.unique(pts)


def q_coefficients(J: PeriodicJacobi, bands: BandStructure, traces=None) -> np.ndarray:
    """Asymptotic coefficients Q_0 ... Q_{2q-1} of k(z) as z -> i infinity.

    Q_0 = ln(c / 2A); for 1 <= j < 2q, Q_j = -Tr L^j / (j c^j q) (+ the
    binomial term C(j, j/2) / (j 2^j) when j is even), with the sign of the
    trace term positive for odd j.
    """
    if not bands.is_normalised:
        raise ValidationError("q_coefficients needs a normalised operator")
    q, c = J.q, bands.c
    if traces is None:
        traces = trace_powers(build_L(J), 2 * q - 1)
    Q = np.empty(2 * q)
    Q[0] = np.log(c / (2.0 * bands.A))
    for j in range(1, 2 * q):
        term = traces[j - 1] / (j * c ** j * q)
        if j % 2:
            Q[j] = term
        else:
            Q[j] = comb(j, j // 2) / (j * 2.0 ** j) - term
    return Q


def build_model(J: PeriodicJacobi, edge_tol: float | None = None) -> QuasimomentumModel:
    """Normalise ``J`` and assemble its quasimomentum data.

    ``edge_tol`` is the relative root tolerance used for the band edges.
    """
    rep0 = discriminant_poly(J)
    Jn, bands = normalize(J, band_edges(J, rep0, edge_tol=edge_tol))
    disc = discriminant_poly(Jn)
    zg = z_coordinates(bands)
    h = np.zeros(J.q - 1)
    for n in bands.open_gaps:
        d, _ = discriminant_and_derivative(Jn, np.array(bands.critical_points[n]))
        h[n] = _arccosh_half(np.abs(d)) / J.q
    traces = trace_powers(build_L(Jn), 2 * J.q - 1)
    Q = q_coefficients(Jn, bands, traces)
    return QuasimomentumModel(Jn, bands, disc, zg, h, Q, traces)


def _arccosh_half(abs_d):
    """arccosh(|D| / 2), accurate when |D| is close to 2; zero for |D| <= 2."""
    abs_d = np.asarray(abs_d, dtype=float)
    eps = np.maximum(0.5 * (abs_d - 2.0), 0.0)
    small = eps < 1.0
    with np.errstate(over="ignore", invalid="ignore"):
        near = np.log1p(eps + np.sqrt(eps * (2.0 + eps)))
        far = np.arccosh(np.maximum(0.5 * abs_d, 1.0))
    return np.where(small, near, far)


def _locate(M: QuasimomentumModel, lam):
    """Return (band, gap) index arrays (0-based, -1 where not applicable)."""
    edges = M.bands.edges
    pos = np.searchsorted(edges, lam, side="right")
    pos = np.clip(pos, 1, 2 * M.q - 1)
    in_band = pos % 2 == 1
    band = np.where(in_band, (pos - 1) // 2, -1)
    gap = np.where(in_band, -1, pos // 2 - 1)
    return band, gap


def v_of_x(M: QuasimomentumModel, x):
    """Lyapunov exponent on the real segment: arccosh(|D(-c cos x)| / 2) / q in open gaps."""
    x = np.asarray(x, dtype=float)
    lam = -M.c * np.cos(x)
    d, _ = discriminant_and_derivative(M.J, lam)
    _, gap = _locate(M, lam)
    open_gap = (gap >= 0) & ~M.bands.closed[np.maximum(gap, 0)]
    v = np.where(open_gap, _arccosh_half(np.abs(d)) / M.q, 0.0)
    return v.item() if v.ndim == 0 else v


def u_of_x(M: QuasimomentumModel, x):
    """Integrated density of states on [0, pi] (scaled so u(0) = 0, u(pi) = pi).

    On band n (1-based) u = ((n-1) pi + arccos(eps_n D / 2)) / q with
    eps_n = (-1)^(q-n+1); on gap n, u = n pi / q.
    """
    x = np.asarray(x, dtype=float)
    q = M.q
    lam = -M.c * np.cos(x)
    d, _ = discriminant_and_derivative(M.J, lam)
    band, gap = _locate(M, lam)
    n = band + 1
    eps = np.where((q - n + 1) % 2 == 0, 1.0, -1.0)
    in_band = ((n - 1) * np.pi + np.arccos(np.clip(eps * d / 2.0, -1.0, 1.0))) / q
    u = np.where(band >= 0, in_band, (gap + 1) * np.pi / q)
    # arccos near +-1 amplifies roundoff in D; the outer edges are known exactly
    u = np.where(x <= 0.0, 0.0, np.where(x >= np.pi, np.pi, u))
    return u.item() if u.ndim == 0 else u


@dataclass(frozen=True, eq=False)
class BoundarySamples:
    x: np.ndarray
    lam: np.ndarray
    D: np.ndarray
    u: np.ndarray
    v: np.ndarray


def boundary_samples(M: QuasimomentumModel, n_points: int) -> BoundarySamples:
    """Boundary values of k on a uniform grid of ``n_points`` in [0, pi]."""
    if n_points < 2:
        raise ValidationError("n_points must be >= 2")
    x = np.linspace(0.0, np.pi, n_points)
    lam = -M.c * np.cos(x)
    d, _ = discriminant_and_derivative(M.J, lam)
    return BoundarySamples(x, lam, d, u_of_x(M, x), v_of_x(M, x))


def _m_branch(M: QuasimomentumModel, z):
    """(R, s, w') with R = 1/m, s = R - D/2, w' = dD/dz / 2, lambda = -c cos z."""
    lam = -M.c * np.cos(z)
    d, dd = discriminant_and_derivative(M.J, lam)
    w = 0.5 * d
    s = np.sqrt(w * w - 1.0 + 0j)
    flip = np.abs(w + s) < np.abs(w - s)
    s = np.where(flip, -s, s)
    dw = 0.5 * dd * M.c * np.sin(z)
    return w + s, s, dw


def _row_grid(M: QuasimomentumModel) -> np.ndarray:
    """Dense base grid in x used to continue arg m along a horizontal line."""
    brk = np.unique(np.concatenate([M.edge_x, x_of_lambda(M.bands.edges, M.c)]))
    pieces = [brk]
    cheb = 0.5 * (1.0 - np.cos(np.linspace(0.0, np.pi, 65)))
    geo = 10.0 ** -np.arange(2, 13)
    for left, right in zip(brk[:-1], brk[1:]):
        w = right - left
        if w <= 0:
            continue
        pieces += [left + w * cheb, left + w * geo, right - w * geo]
    grid = np.unique(np.concatenate(pieces))
    return grid[(grid >= 0.0) & (grid <= np.pi)]


def _k_rows(M: QuasimomentumModel, x_nodes: np.ndarray, y: np.ndarray) -> np.ndarray:
    """k at every (y_i, x_j) with y_i > 0; returns shape (len(y), len(x_nodes))."""
    x_nodes = np.asarray(x_nodes, dtype=float)
    y = np.asarray(y, dtype=float)
    grid = np.unique(np.concatenate([_row_grid(M), x_nodes]))
    z = grid[None, :] + 1j * y[:, None]
    R, _, _ = _m_branch(M, z)
    phase = np.unwrap(-np.angle(R), axis=1)
    steps = np.diff(phase, axis=1)
    u = (phase - phase[:, :1]) / M.q
    total = u[:, -1]
    if np.any(steps < -1e-7) or np.any(np.abs(total - np.pi) > 1e-6):
        raise NumericalError("phase continuation of k failed (u not monotone or total != pi)")
    v = np.log(np.abs(R)) / M.q
    idx = np.searchsorted(grid, x_nodes)
    return u[:, idx] + 1j * v[:, idx]


def k_complex(M: QuasimomentumModel, z):
    """Evaluate the quasimomentum at ``z`` (scalar or array) with Im z >= 0.

    Points on the real segment return the boundary values u + i v.

    Raises
    ------
    EdgeSingularityError
        If z is within 1e-12 of the preimage of a band edge.
    """
    z = np.asarray(z, dtype=complex)
    flat = z.reshape(-1)
    if np.any(flat.imag < 0) or np.any(flat.real < -1e-15) or np.any(flat.real > np.pi + 1e-15):
        raise ValidationError("z must lie in the half-strip 0 <= Re z <= pi, Im z >= 0")
    edges = M.edge_x
    dist = np.min(np.abs(flat[:, None] - edges[None, :]), axis=1)
    if np.any(dist < EDGE_EXCLUSION):
        raise EdgeSingularityError("k evaluated at a band-edge branch point")
    out = np.empty(flat.shape, dtype=complex)
    on_axis = flat.imag == 0
    if np.any(on_axis):
        xr = flat.real[on_axis]
        out[on_axis] = u_of_x(M, xr) + 1j * v_of_x(M, xr)
    for yv in np.unique(flat.imag[~on_axis]):
        sel = (~on_axis) & (flat.imag == yv)
        out[sel] = _k_rows(M, flat.real[sel], np.array([yv]))[0]
    return out.reshape(z.shape) if z.ndim else out[0]


def k_prime(M: QuasimomentumModel, z):
    """k'(z) = (i/q) (dD/dz / 2) / sqrt((D/2)^2 - 1), branch matched to |m| <= 1."""
    z = np.asarray(z, dtype=complex)
    _, s, dw = _m_branch(M, z)
    return 1j * dw / (M.q * s)


# ---------------------------------------------------------------- trace formulas

@dataclass(frozen=True)
class TraceMoment:
    n: int
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def trace_moment_rhs(Q, n: int) -> float:
    """Binomial combination of Q_j equal to (1/pi) int_0^pi v(x) cos^n x dx."""
    if n % 2:
        h = (n - 1) // 2
        return sum(Q[2 * i + 1] * comb(n - 1 - 2 * i, h - i) / 2.0 ** (n - 1 - 2 * i)
                   for i in range(h + 1))
    h = n // 2
    return sum(Q[2 * i] * comb(n - 2 * i, h - i) / 2.0 ** (n - 2 * i) for i in range(h + 1))


def _gap_integral(M, n, f):
    """int over open gap n of f(x), where f carries the square-root edge behaviour.

    Substituting x = mid - half cos(phi) turns the edge singularities of v
    into smooth behaviour in phi.
    """
    left, right = M.zgaps.gaps[n]
    mid, half = 0.5 * (left + right), 0.5 * (right - left)
    val, _ = integrate.quad(lambda p: f(mid - half * np.cos(p)) * half * np.sin(p),
                            0.0, np.pi, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def trace_moment_check(M: QuasimomentumModel, n: int) -> TraceMoment:
    """Compare (1/pi) int_0^pi v(x) cos^n x dx with its trace-formula value.

    Only 0 <= n < 2q is accepted, since Q_j is defined for j < 2q.
    """
    if not 0 <= n < 2 * M.q:
        raise ValidationError(f"moment order must satisfy 0 <= n < 2q = {2 * M.q}")
    lhs = sum(_gap_integral(M, g, lambda x: v_of_x(M, x) * np.cos(x) ** n)
              for g in M.open_gaps) / np.pi
    return TraceMoment(n, float(lhs), float(trace_moment_rhs(M.Q, n)))


# ------------------------------------------------------------- Dirichlet integrals

@dataclass(frozen=True)
class DirichletResult:
    integral: float
    expected: float
    tail: float

    @property
    def residual(self) -> float:
        return abs(self.integral - self.expected)

    @property
    def relative_residual(self) -> float:
        if self.expected == 0:
            return self.residual
        return self.residual / abs(self.expected)


def _graded_cells(left, right, levels, ratio, both_ends=True):
    """Cells [lo, hi] refined geometrically toward ``left`` (and ``right``)."""
    if both_ends:
        mid = 0.5 * (left + right)
        a = _graded_cells(left, mid, levels, ratio, False)
        b = right + left - _graded_cells(left, mid, levels, ratio, False)[::-1, ::-1]
        return np.vstack([a, b])
    w = right - left
    marks = left + w * ratio ** np.arange(levels, -1, -1.0)
    return np.column_stack([np.concatenate(([left], marks[:-1])), marks])


def _tensor_rule(x_cells, y_cells, order):
    nodes, weights = np.polynomial.legendre.leggauss(order)

    def expand(cells):
        lo, hi = cells[:, :1], cells[:, 1:]
        pts = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes[None, :]
        wts = 0.5 * (hi - lo) * weights[None, :]
        return pts.ravel(), wts.ravel()

    return expand(x_cells), expand(y_cells)


def _dirichlet_mesh(M, ymax, levels, ratio, order):
    brk = M.edge_x
    x_cells = np.vstack([_graded_cells(l, r, levels, ratio) for l, r in zip(brk[:-1], brk[1:])])
    y_low = _graded_cells(0.0, 1.0, levels, ratio, both_ends=False)
    n_up = max(1, int(np.ceil(ymax - 1.0)))
    knots = np.linspace(1.0, ymax, n_up + 1)
    y_cells = np.vstack([y_low, np.column_stack([knots[:-1], knots[1:]])])
    return _tensor_rule(x_cells, y_cells, order)


def _tail_estimate(Q, q, ymax, first):
    """int_{ymax}^inf of (sum_j (j - shift) |Q_j| cosh y / sinh^{j+1-shift} y)^2 dy."""
    js = np.arange(first, 2 * q)
    weights = (js - (first - 1)) * np.abs(Q[first:2 * q])
    power = js + 1 - (first - 1)

    def bound(y):
        return np.sum(weights * np.cosh(y) / np.sinh(y) ** power) ** 2

    val, _ = integrate.quad(bound, ymax, ymax + 40.0)
    return val


def _dirichlet(M, kind, ymax, levels, ratio, order, tail_rtol):
    expected = (M.Q[0] if kind == 1 else
                M.Q[0] / 2 + M.Q[2] - 2 * M.Q[0] * M.Q[2] - M.Q[1] ** 2 / 2)
    if M.open_gaps.size == 0:
        # k(z) = z identically, so both integrals and all Q_j vanish exactly
        return DirichletResult(0.0, 0.0, 0.0)
    (xs, wx), (ys, wy) = _dirichlet_mesh(M, ymax, levels, ratio, order)
    z = xs[None, :] + 1j * ys[:, None]
    dk = k_prime(M, z)
    if kind == 1:
        integrand = np.abs(dk - 1.0) ** 2
    else:
        k = _k_rows(M, xs, ys)
        f = (dk - 1.0) * np.cos(z) - (k - z - 1j * M.Q[0]) * np.sin(z)
        integrand = np.abs(f) ** 2
    if not np.all(np.isfinite(integrand)):
        raise NumericalError("non-finite Dirichlet integrand")
    total = wy @ integrand @ wx / np.pi
    tail = _tail_estimate(M.Q, M.q, ymax, 1 if kind == 1 else 2) / np.pi
    if tail > tail_rtol * max(abs(expected), 1e-300):
        raise NumericalError(f"tail beyond ymax={ymax} is {tail:.2e}; increase ymax")
    return DirichletResult(float(total + tail), float(expected), float(tail))


def dirichlet_integral_1(M: QuasimomentumModel, ymax=DEFAULT_YMAX, levels=16, ratio=0.25,
                         order=8, tail_rtol=1e-4) -> DirichletResult:
    """(1/pi) of the double integral of |k'(z) - 1|^2 over the half-strip, against Q_0.

    Tensor Gauss-Legendre on a mesh graded geometrically toward every
    band-edge preimage, truncated at ``ymax`` plus a tail estimate from the
    large-y expansion of k.
    """
    return _dirichlet(M, 1, ymax, levels, ratio, order, tail_rtol)


def dirichlet_integral_2(M: QuasimomentumModel, ymax=DEFAULT_YMAX, levels=16, ratio=0.25,
                         order=8, tail_rtol=1e-4) -> DirichletResult:
    """Same quadrature for f = (k - z - i Q_0) cos z, against Q0/2 + Q2 - 2 Q0 Q2 - Q1^2/2."""
    return _dirichlet(M, 2, ymax, levels, ratio, order, tail_rtol)


# ------------------------------------------------------------ vertical identity

@dataclass(frozen=True)
class VerticalIdentity:
    lhs: float
    rhs: float
    ymax: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def _v_vertical(M, y, right):
    lam = M.c * np.cosh(y) * (1.0 if right else -1.0)
    d, _ = discriminant_and_derivative(M.J, np.asarray(lam, dtype=float))
    return _arccosh_half(np.abs(d)) / M.q


def vertical_identity_check(M: QuasimomentumModel, cutoff=1e-10) -> VerticalIdentity:
    """int_0^pi u dx against pi^2/2 + int_0^inf (v(pi + iy) - v(iy)) dy."""
    brk = np.unique(x_of_lambda(M.bands.edges, M.c))
    lhs = sum(integrate.quad(lambda x: u_of_x(M, x), l, r, epsabs=1e-13, epsrel=1e-13,
                             limit=200)[0]
              for l, r in zip(brk[:-1], brk[1:]) if r > l)

    def gap(y):
        return _v_vertical(M, y, True) - _v_vertical(M, y, False)

    ymax = 4.0
    while abs(gap(ymax)) > cutoff and ymax < 200.0:
        ymax += 4.0
    knots = np.linspace(0.0, ymax, int(ymax) + 1)
    tail = sum(integrate.quad(gap, l, r, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
               for l, r in zip(knots[:-1], knots[1:]))
    return VerticalIdentity(float(lhs), float(np.pi ** 2 / 2 + tail), float(ymax))


# ------------------------------------------------------------ Herglotz form

def herglotz_k(M: QuasimomentumModel, z, n_grid: int = 4096):
    """k(z) from the periodic Herglotz representation with the cotangent kernel.

    v is extended evenly to [-pi, 0], which makes the additive constant
    vanish; the integral over the open gaps and their mirror images becomes
    int_g v(t) [cot((t - z)/2) - cot((t + z)/2)] dt / (2 pi).
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValidationError("herglotz_k needs Im z > 0")
    gaps = M.open_gaps
    total = np.zeros(z.shape, dtype=complex)
    if gaps.size:
        per_gap = max(16, n_grid // gaps.size)
        nodes, weights = np.polynomial.legendre.leggauss(per_gap)
        phi = 0.5 * np.pi * (nodes + 1.0)
        wphi = 0.5 * np.pi * weights
        for n in gaps:
            left, right = M.zgaps.gaps[n]
            mid, half = 0.5 * (left + right), 0.5 * (right - left)
            t = mid - half * np.cos(phi)
            wt = wphi * half * np.sin(phi) * v_of_x(M, t)
            kern = (1.0 / np.tan((t[:, None] - z.reshape(-1)[None, :]) / 2)
                    - 1.0 / np.tan((t[:, None] + z.reshape(-1)[None, :]) / 2))
            total += (wt @ kern).reshape(z.shape)
    out = z + total / (2.0 * np.pi)
    return out.item() if out.ndim == 0 else out


# ------------------------------------------------------------ shape of v on gaps

@dataclass(frozen=True)
class GapShapeReport:
    gap: int
    n_points: int
    semicircle_violations: int
    concavity_violations: int
    min_semicircle_slack: float
    max_second_difference: float
    h_formula: float
    h_sampled: float

    @property
    def h_discrepancy(self) -> float:
        return abs(self.h_formula - self.h_sampled)

    @property
    def ok(self) -> bool:
        return self.semicircle_violations == 0 and self.concavity_violations == 0


def gap_shape_checks(M: QuasimomentumModel, gap: int, n_points: int = 1000,
                     tol: float = 1e-9) -> GapShapeReport:
    """Semicircle lower bound and concavity of v on gap ``gap`` (0-based).

    The sampled maximum is refined by bounded Brent search around the best
    grid point and compared with the critical-point value h_n.
    """
    if not 0 <= gap < M.q - 1:
        raise ValidationError("gap index out of range")
    left, right = M.zgaps.gaps[gap]
    if M.bands.closed[gap] or right <= left:
        return GapShapeReport(gap, 0, 0, 0, 0.0, 0.0, float(M.h[gap]), 0.0)
    x = np.linspace(left, right, n_points + 2)[1:-1]
    v = v_of_x(M, x)
    semi = np.sqrt((x - left) * (right - x))
    slack = v - semi
    second = v[:-2] - 2 * v[1:-1] + v[2:]
    i = int(np.argmax(v))
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, len(x) - 1)]
    res = optimize.minimize_scalar(lambda t: -v_of_x(M, t), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12 * (1 + right)})
    h_sampled = max(float(-res.fun), float(v[i]))
    return GapShapeReport(gap, n_points, int(np.sum(slack < -tol)), int(np.sum(second > tol)),
                          float(slack.min()), float(second.max()) if second.size else 0.0,
                          float(M.h[gap]), h_sampled)
