"""Bands, gaps and normalisation of a periodic Jacobi operator.

Band edges are the solutions of D(lambda) = +-2.  Edge arrays always have
length 2q and are ordered

    lambda_0^+, lambda_1^-, lambda_1^+, ..., lambda_{q-1}^+, lambda_q^-,

so band m (1-based) is ``[edges[2m-2], edges[2m-1]]`` and gap m is
``(edges[2m-1], edges[2m])``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .core import PeriodicJacobi, bloch_matrix, capacity, gershgorin_interval, shift_diagonal
from .discriminant import DiscriminantRep, discriminant_poly, discriminant_value
from .eigen import hermitian_eigvalsh
from .errors import NumericalError, ValidationError

__all__ = [
    "BandStructure",
    "ZGapSet",
    "BlochBands",
    "band_edges",
    "normalize",
    "z_coordinates",
    "x_of_lambda",
    "bloch_oracle",
    "hausdorff_band_distance",
]

CLOSED_GAP_RTOL = 1e-10
# |D| at a gap's critical point within this of 2 is treated as a double root
CLOSED_GAP_DTOL = 1e-11
EDGE_DEFICIT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class BandStructure:
    edges: np.ndarray
    A: float
    shift: float = 0.0
    closed: np.ndarray | None = None
    critical_points: np.ndarray | None = None

    @property
    def q(self) -> int:
        return len(self.edges) // 2

    @property
    def c(self) -> float:
        """Half the distance between the ends of the spectrum."""
        return 0.5 * float(self.edges[-1] - self.edges[0])

    @property
    def bands(self) -> np.ndarray:
        return self.edges.reshape(-1, 2)

    @property
    def gaps(self) -> np.ndarray:
        return self.edges[1:-1].reshape(-1, 2)

    @property
    def band_widths(self) -> np.ndarray:
        return np.diff(self.bands, axis=1)[:, 0]

    @property
    def gap_widths(self) -> np.ndarray:
        return np.diff(self.gaps, axis=1)[:, 0]

    @property
    def open_gaps(self) -> np.ndarray:
        """Indices (0-based) of the gaps that are not closed."""
        return np.flatnonzero(~self.closed)

    @property
    def is_normalised(self) -> bool:
        return abs(self.edges[0] + self.edges[-1]) <= 1e-12 * max(1.0, self.c)


@dataclass(frozen=True, eq=False)
class ZGapSet:
    """Gaps in the strip variable x = arccos(-lambda / c), x in [0, pi]."""

    gaps: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return self.gaps[:, 1] - self.gaps[:, 0]


@dataclass(frozen=True, eq=False)
class BlochBands:
    thetas: np.ndarray
    eigenvalues: np.ndarray  # (n_theta, q), sorted per row
    bands: np.ndarray  # (q, 2)


EDGE_XTOL = 1e-14


def _solve_level(J, target, left, right, scale, xtol):
    return brentq(lambda x: discriminant_value(J, x) - target, left, right,
                  xtol=xtol * scale, rtol=4 * np.finfo(float).eps, maxiter=500)


def band_edges(J: PeriodicJacobi, rep: DiscriminantRep | None = None,
               edge_tol: float | None = None) -> BandStructure:
    """Locate all 2q band edges by root bracketing on the monotone pieces of D.

    Between consecutive critical points (padded Gershgorin bounds at the two
    ends) D is monotone, so each piece holds exactly one band.  A gap whose
    critical value satisfies |D| <= 2 up to roundoff is closed and both of its
    edges are set to the critical point.

    Raises
    ------
    NumericalError
        If a piece does not reach |D| = 2 (fewer than 2q brackets).
    """
    xtol = EDGE_XTOL if edge_tol is None else float(edge_tol)
    if not xtol > 0:
        raise ValidationError("edge tolerance must be positive")
    rep = discriminant_poly(J) if rep is None else rep
    q = J.q
    g_lo, g_hi = gershgorin_interval(J)
    pad = 1e-3 * (1.0 + g_hi - g_lo)
    scale = 1.0 + max(abs(g_lo), abs(g_hi))
    crit = rep.critical_points
    breaks = np.concatenate(([g_lo - pad], crit, [g_hi + pad]))
    values = np.asarray(discriminant_value(J, breaks), dtype=float)

    closed = np.zeros(q - 1, dtype=bool)
    for m, value in enumerate(values[1:-1]):
        deficit = 2.0 - abs(value)
        if deficit > EDGE_DEFICIT_TOL:
            raise NumericalError(
                f"|D| = {abs(value):.6g} < 2 at critical point {crit[m]:.6g}: bracket missing")
        closed[m] = deficit >= -CLOSED_GAP_DTOL * max(1.0, abs(value))
    if abs(values[0]) < 2 or abs(values[-1]) < 2:
        raise NumericalError("Gershgorin bounds do not enclose the spectrum")

    edges = np.empty(2 * q)
    for m in range(q):
        left, right = breaks[m], breaks[m + 1]
        d_left, d_right = values[m], values[m + 1]
        sign = 1.0 if d_right > d_left else -1.0  # increasing piece: -2 then +2
        lo_target, hi_target = -2.0 * sign, 2.0 * sign
        if m > 0 and closed[m - 1]:
            edges[2 * m] = left
        else:
            edges[2 * m] = _solve_level(J, lo_target, left, right, scale, xtol)
        if m < q - 1 and closed[m]:
            edges[2 * m + 1] = right
        else:
            edges[2 * m + 1] = _solve_level(J, hi_target, left, right, scale, xtol)
    if np.any(np.diff(edges) < 0):
        raise NumericalError("band edges are not ordered")

    c = 0.5 * (edges[-1] - edges[0])
    widths = edges[2:-1:2] - edges[1:-1:2]
    closed |= widths < CLOSED_GAP_RTOL * c
    for m in np.flatnonzero(closed):
        edges[2 * m + 1] = edges[2 * m + 2] = crit[m]
    return BandStructure(edges, capacity(J), 0.0, closed, crit.copy())


def normalize(J: PeriodicJacobi, bands: BandStructure | None = None):
    """Shift the diagonal so the spectrum becomes [-c, c].

    Returns the shifted operator and its band structure (edges shifted
    exactly rather than recomputed, so the symmetry holds to roundoff).
    """
    bands = band_edges(J) if bands is None else bands
    s = -0.5 * (bands.edges[-1] + bands.edges[0])
    Jn = shift_diagonal(J, s)
    edges = bands.edges + s
    half = 0.5 * (edges[-1] - edges[0])
    edges[0], edges[-1] = -half, half
    return Jn, replace(bands, edges=edges, shift=bands.shift + s,
                       critical_points=bands.critical_points + s)


def x_of_lambda(lam, c):
    """Strip coordinate x = arccos(-lambda / c) in [0, pi]."""
    return np.arccos(np.clip(-np.asarray(lam, dtype=float) / c, -1.0, 1.0))


def z_coordinates(bands: BandStructure) -> ZGapSet:
    """Images g_n of the gaps on [0, pi] under x = arccos(-lambda / c)."""
    if not bands.is_normalised:
        raise ValidationError("z_coordinates needs a normalised band structure")
    zg = x_of_lambda(bands.gaps, bands.c)
    zg[bands.closed, 1] = zg[bands.closed, 0]
    return ZGapSet(zg)


def bloch_oracle(J: PeriodicJacobi, n_theta: int = 721) -> BlochBands:
    """Bands as [min, max] of the eigenvalues of L(theta) over theta in [0, pi].

    Eigenvalues come from :func:`hermitian_eigvalsh` (cyclic Jacobi on the
    real 2q embedding), so the result does not touch the discriminant code.
    """
    if n_theta < 3:
        raise ValidationError("n_theta must be at least 3")
    thetas = np.linspace(0.0, np.pi, n_theta)
    mats = np.stack([bloch_matrix(J, t) for t in thetas])
    eig = hermitian_eigvalsh(mats)
    bands = np.column_stack([eig.min(axis=0), eig.max(axis=0)])
    return BlochBands(thetas, eig, bands)


def hausdorff_band_distance(bands_a, bands_b) -> np.ndarray:
    """Per-band Hausdorff distance between two (q, 2) interval arrays."""
    return np.max(np.abs(np.asarray(bands_a) - np.asarray(bands_b)), axis=1)
