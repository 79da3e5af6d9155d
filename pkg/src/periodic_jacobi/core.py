"""Operator data for q-periodic Jacobi matrices.

The operator acts on l^2(Z) as

    (H psi)_n = a_{n-1} psi_{n-1} + b_n psi_n + a_n psi_{n+1},

with a_{n+q} = a_n > 0 and b_{n+q} = b_n real.  Coefficients are indexed
1..q in formulas; storage is 0-based, so ``a[0]`` holds a_1 and ``a[q-1]``
holds a_q.  The wrap-around a_0 = a_q is ``a[-1]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError

__all__ = [
    "PeriodicJacobi",
    "make_jacobi",
    "shift_diagonal",
    "build_L",
    "bloch_matrix",
    "trace_powers",
    "harper",
    "gershgorin_interval",
    "capacity",
    "random_jacobi",
]

_IMAG_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class PeriodicJacobi:
    """Validated periodic Jacobi operator.  Use :func:`make_jacobi` to build."""

    q: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a.setflags(write=False)
        self.b.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, PeriodicJacobi):
            return NotImplemented
        return (self.q == other.q and np.array_equal(self.a, other.a)
                and np.array_equal(self.b, other.b))

    def __hash__(self):
        return hash((self.q, self.a.tobytes(), self.b.tobytes()))

    @property
    def A(self) -> float:
        return capacity(self)

    def __repr__(self):
        return f"PeriodicJacobi(q={self.q}, a={self.a.tolist()}, b={self.b.tolist()})"


def make_jacobi(q, a, b) -> PeriodicJacobi:
    """Validate (q, a, b) and return a :class:`PeriodicJacobi`.

    Raises
    ------
    ValidationError
        If ``q < 2``, if ``a`` or ``b`` does not have exactly ``q`` finite
        entries, or if some ``a_n <= 0``.
    """
    if isinstance(q, bool) or int(q) != q:
        raise ValidationError(f"period must be an integer, got {q!r}")
    q = int(q)
    if q < 2:
        raise ValidationError("period q must be at least 2 (q = 1 is the trivial case)")
    a = np.array(a, dtype=float).reshape(-1)
    b = np.array(b, dtype=float).reshape(-1)
    if a.size != q or b.size != q:
        raise ValidationError(f"expected {q} entries in a and b, got {a.size} and {b.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("coefficients must be finite")
    if np.any(a <= 0):
        raise ValidationError("off-diagonal coefficients a_n must be positive")
    return PeriodicJacobi(q, a, b)


def shift_diagonal(J: PeriodicJacobi, s: float) -> PeriodicJacobi:
    """Return the operator H + s (every b_n replaced by b_n + s)."""
    return PeriodicJacobi(J.q, J.a.copy(), J.b + float(s))


def capacity(J: PeriodicJacobi) -> float:
    """Geometric mean A = (a_1 ... a_q)^(1/q), computed through logs."""
    return float(np.exp(np.mean(np.log(J.a))))


def bloch_matrix(J: PeriodicJacobi, theta: float) -> np.ndarray:
    """q x q Hermitian matrix L(theta) with corners a_q e^{+i theta}, a_q e^{-i theta}.

    Its characteristic polynomial is A^q (D(lambda) - 2 cos theta).  For q = 2
    the corner coincides with the off-diagonal, giving a_1 + a_2 e^{i theta}.
    """
    q = J.q
    L = np.zeros((q, q), dtype=complex)
    idx = np.arange(q)
    L[idx, idx] = J.b
    L[idx[:-1], idx[1:]] = J.a[:-1]
    L[idx[1:], idx[:-1]] = J.a[:-1]
    phase = np.exp(1j * theta)
    L[0, q - 1] += J.a[-1] * phase
    L[q - 1, 0] += J.a[-1] * np.conj(phase)
    return L


def build_L(J: PeriodicJacobi) -> np.ndarray:
    """The Floquet matrix L, i.e. :func:`bloch_matrix` at theta = pi/2.

    Corners are exactly +i a_q (top right) and -i a_q (bottom left).
    """
    q = J.q
    L = np.zeros((q, q), dtype=complex)
    idx = np.arange(q)
    L[idx, idx] = J.b
    L[idx[:-1], idx[1:]] = J.a[:-1]
    L[idx[1:], idx[:-1]] = J.a[:-1]
    L[0, q - 1] += 1j * J.a[-1]
    L[q - 1, 0] += -1j * J.a[-1]
    return L


def trace_powers(L: np.ndarray, jmax: int) -> np.ndarray:
    """Real traces Tr L^j for j = 1..jmax (entry j-1 holds Tr L^j).

    Computed by repeated dense multiplication.  The imaginary part of each
    trace is checked against the Hermitian guarantee before it is dropped.
    """
    if jmax < 1:
        raise ValidationError("jmax must be >= 1")
    L = np.asarray(L, dtype=complex)
    out = np.empty(jmax)
    P = np.eye(L.shape[0], dtype=complex)
    for j in range(jmax):
        P = P @ L
        t = np.trace(P)
        scale = max(1.0, float(np.sum(np.abs(P.diagonal()))))
        if abs(t.imag) > _IMAG_RTOL * scale:
            raise NumericalError(f"Tr L^{j + 1} has imaginary residue {t.imag:.3e}")
        out[j] = t.real
    return out


def harper(p: int, q: int, theta: float = 0.0) -> PeriodicJacobi:
    """Harper (almost Mathieu) operator: a_j = 1, b_j = 2 cos(2 pi p j / q + theta)."""
    if q < 2:
        raise ValidationError("Harper operator needs q >= 2")
    j = np.arange(1, q + 1)
    b = 2.0 * np.cos(2.0 * np.pi * p * j / q + theta)
    return make_jacobi(q, np.ones(q), b)


def gershgorin_interval(J: PeriodicJacobi) -> tuple[float, float]:
    """[min_j (b_j - a_j - a_{j-1}), max_j (b_j + a_j + a_{j-1})]."""
    radius = J.a + np.roll(J.a, 1)
    return float(np.min(J.b - radius)), float(np.max(J.b + radius))


def random_jacobi(rng: np.random.Generator, q: int, a_range=(0.5, 1.5), b_range=(-1.0, 1.0)):
    """Draw a random operator with uniform a_n and b_n (test and demo helper)."""
    a = rng.uniform(*a_range, size=q)
    b = rng.uniform(*b_range, size=q)
    return make_jacobi(q, a, b)
