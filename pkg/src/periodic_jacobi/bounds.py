"""Both sides of every spectral inequality, evaluated on a concrete operator."""
from __future__ import annotations

import operator
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core import PeriodicJacobi, build_L, harper, trace_powers
from .errors import ValidationError
from .quasimomentum import QuasimomentumModel, build_model
from .spectrum import band_edges

__all__ = ["BoundRecord", "BoundsReport", "certify", "harper_lower_bound", "harper_bound_demo"]

RELATIONS = {">": operator.gt, "<": operator.lt, ">=": operator.ge, "<=": operator.le}
REL_TOL = 1e-10


@dataclass(frozen=True)
class BoundRecord:
    name: str
    lhs: float
    rhs: float
    relation: str
    degenerate: bool = False
    note: str = ""

    @property
    def margin(self) -> float:
        """Signed slack: positive when the inequality holds."""
        if self.relation in (">", ">="):
            return self.lhs - self.rhs
        return self.rhs - self.lhs

    @property
    def satisfied(self):
        if not (np.isfinite(self.lhs) and np.isfinite(self.rhs)):
            return None
        scale = max(1.0, abs(self.lhs), abs(self.rhs))
        return bool(self.margin > -REL_TOL * scale)


@dataclass(frozen=True)
class BoundsReport:
    q: int
    c: float
    A: float
    h_plus: float
    trace_L: float
    trace_L2: float
    trace_L2_input: float
    shift: float
    records: list = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return self.h_plus == 0.0

    def __getitem__(self, name) -> BoundRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    @property
    def violations(self) -> list:
        return [r for r in self.records if not r.degenerate and r.satisfied is False]


def _gershgorin_m(J: PeriodicJacobi) -> float:
    radius = J.a + np.roll(J.a, 1)
    return float(max(np.max(J.b + radius) - np.min(J.b), np.max(J.b) - np.min(J.b - radius)))


def certify(J: PeriodicJacobi, model: QuasimomentumModel | None = None) -> BoundsReport:
    """Evaluate every inequality on the normalised version of ``J``.

    Records come in a fixed order.  When all gaps are closed (h_+ = 0) the
    operator is degenerate: records that divide by h_+ carry NaN sides and
    every record is flagged ``degenerate``.
    """
    M = build_model(J) if model is None else model
    Jn, B, q = M.J, M.bands, M.q
    c, A, Q0 = M.c, M.A, float(M.Q[0])
    tr = M.traces
    hp = M.h_plus
    degenerate = hp == 0.0
    g = M.zgaps.gaps
    gw = M.zgaps.widths
    recs = []

    def add(name, lhs, rhs, rel, note=""):
        recs.append(BoundRecord(name, float(lhs), float(rhs), rel, degenerate, note))

    add("c_gt_2A", c, 2 * A, ">")
    add("eq_c2", c ** 2 * (0.5 + np.log(c / (2 * A))), tr[1] / q, ">")
    for j in (1, 2, 3):
        if j < q:
            add(f"simple_est_{j}", c ** (2 * j), tr[2 * j - 1] / q, ">")
    nan = float("nan")
    chain_rhs = np.pi * Q0 / np.log(2 * c / A)
    if degenerate:
        add("g1", gw.sum(), nan, ">", "degenerate: h_+ = 0")
        add("g1_chain", nan, chain_rhs, ">", "degenerate: h_+ = 0")
        add("g1p", nan, nan, ">", "degenerate: h_+ = 0")
    else:
        add("g1", gw.sum(), np.pi * Q0 / hp, ">")
        add("g1_chain", np.pi * Q0 / hp, chain_rhs, ">")
        cos2 = np.sum(0.5 * gw + 0.25 * (np.sin(2 * g[:, 1]) - np.sin(2 * g[:, 0])))
        add("g1p", cos2, np.pi / hp * (Q0 / 2 + 0.25 - tr[1] / (2 * q * c ** 2)), ">")
    b_plus = max(1.0, q * hp / np.pi)
    add("g2_lower", np.sum(gw ** 2), Q0 / b_plus, ">")
    add("g2_upper", np.sum(gw ** 2), 8 * Q0, "<")

    a0, b0 = J.a, J.b
    b_tilde = float(b0.max() - b0.min())
    M_g = _gershgorin_m(J)
    add("eL_bands_M", B.band_widths.sum(), 4 * A ** q / M_g ** (q - 1), ">")
    add("eL_bands_2c", B.band_widths.sum(), 4 * A ** q / (2 * c) ** (q - 1), ">")
    add("eL_gaps", B.gap_widths.sum(), b_tilde, ">=")

    hg = float(np.sum(M.h * gw))
    if degenerate:
        add("lemma51_lower", Q0, nan, ">", "degenerate: h_+ = 0")
        add("lemma51_upper", Q0, nan, "<", "degenerate: h_+ = 0")
    else:
        add("lemma51_lower", Q0, hg / (2 * np.pi), ">")
        add("lemma51_upper", Q0, hg / np.pi, "<")
    mid = np.log(c / A + abs(Jn.b.sum()) / (A * q))
    add("lemma52_pos", hp, 0.0, ">")
    add("lemma52", hp, mid, "<")
    add("lemma52_chain", mid, np.log(2 * c / A), "<")
    add("lemma53", np.sum(M.h ** 2), np.pi ** 2 * b_plus * Q0, "<=")
    # Tr L^2 - (Tr L)^2 / q does not change under diagonal shifts
    tr_in = trace_powers(build_L(J), 2)
    centred = (tr_in[1] - tr_in[0] ** 2 / q) / q
    add("c_root_bound", c, harper_lower_bound(max(centred, 2 * A * A), A), ">")

    return BoundsReport(q, c, A, hp, float(tr[0]), float(tr[1]), float(tr_in[1]),
                        float(B.shift), recs)


def harper_lower_bound(trace_ratio: float = 4.0, A: float = 1.0) -> float:
    """Root x > 2A of x^2 (1/2 + ln(x / 2A)) = trace_ratio (Brent, bracket widened as needed)."""
    if trace_ratio < 2 * A * A:
        raise ValidationError("trace ratio below 2A^2 has no root above 2A")
    f = lambda x: x * x * (0.5 + np.log(x / (2 * A))) - trace_ratio
    hi = 4 * A
    while f(hi) <= 0:
        hi *= 2
    return float(brentq(f, 2 * A, hi, xtol=1e-15, rtol=1e-15))


@dataclass(frozen=True)
class HarperDemo:
    p: int
    q: int
    theta: float
    c: float
    lower_bound: float
    trace_L2: float

    @property
    def holds(self) -> bool:
        return self.c > self.lower_bound


def harper_bound_demo(p: int, q: int, theta: float = 0.0) -> HarperDemo:
    """Spectral half-width of Harper's operator against the p, q independent bound.

    Requires q >= 3 and q not dividing 2p, which gives Tr L^2 = 4q.
    """
    if q < 3 or (2 * p) % q == 0:
        raise ValidationError("need q >= 3 and q not dividing 2p")
    J = harper(p, q, theta)
    tr2 = trace_powers(build_L(J), 2)[1]
    c = band_edges(J).c
    return HarperDemo(p, q, theta, c, harper_lower_bound(4.0), float(tr2))
