"""Mirror-trajectory protocols z(t): construction, evaluation, time reversal.

All quantities are in units with c = 1. A protocol is an ordered, contiguous
list of time segments, each carrying an analytic law for the mirror position.
Protocols are immutable; every operation here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .ddmath import quick_two_sum, two_product, two_sum
from .errors import HorizonError, ProtocolError, SpliceError


@dataclass(frozen=True)
class Harmonic:
    """z(t) = L + A sin(omega t + phi)."""

    L: float
    A: float
    omega: float
    phi: float = 0.0

    def __post_init__(self):
        if self.A < 0:
            raise ProtocolError(f"harmonic amplitude must be >= 0, got {self.A}")
        if self.omega <= 0:
            raise ProtocolError(f"harmonic frequency must be > 0, got {self.omega}")
        if self.L - self.A <= 0:
            raise ProtocolError(
                f"minimum cavity length L - A = {self.L - self.A} must be positive"
            )
        if self.A * self.omega >= 1:
            raise ProtocolError(
                f"superluminal mirror: A*omega = {self.A * self.omega} >= 1 (= c)"
            )

    @property
    def period(self):
        return 2.0 * math.pi / self.omega

    def value_slope(self, t):
        # The phase omega*t is formed in double-double so that z keeps full
        # precision at large t; event solvers downstream rely on this.
        th, tl = two_product(self.omega, t)
        th, err = two_sum(th, self.phi)
        low = tl + err
        s = np.sin(th)
        c = np.cos(th)
        sin_tot = s + c * low
        cos_tot = c - s * low
        return self.L + self.A * sin_tot, self.A * self.omega * cos_tot

    def value_slope_dd(self, t_hi, t_lo):
        """(z_hi, z_lo, zdot) with z in double-double for event commits."""
        th, e1 = two_product(self.omega, t_hi)
        th, e2 = two_sum(th, self.phi)
        low = e1 + e2 + self.omega * t_lo
        s = np.sin(th)
        c = np.cos(th)
        # sin(th + low) to second order in the tiny residual low
        s_hi, s_lo = s, c * low - 0.5 * s * low * low
        p, pe = two_product(self.A, s_hi)
        z_hi, e3 = two_sum(self.L, p)
        z_lo = e3 + pe + self.A * s_lo
        zd = self.A * self.omega * (c - s * low)
        return z_hi, z_lo, zd


@dataclass(frozen=True)
class Constant:
    """z(t) = L."""

    L: float

    def __post_init__(self):
        if self.L <= 0:
            raise ProtocolError(f"cavity length must be positive, got {self.L}")

    @property
    def period(self):
        return None

    def value_slope(self, t):
        t = np.asarray(t, dtype=float)
        return np.full_like(t, self.L), np.zeros_like(t)

    def value_slope_dd(self, t_hi, t_lo):
        t_hi = np.asarray(t_hi, dtype=float)
        return np.full_like(t_hi, self.L), np.zeros_like(t_hi), np.zeros_like(t_hi)


@dataclass(frozen=True)
class Reflected:
    """z(t) = 2*pivot - base(t): the discrete time-reversal branch."""

    base: Union[Harmonic, Constant, "Reflected"]
    pivot: float

    @property
    def period(self):
        return self.base.period

    def value_slope(self, t):
        z, zd = self.base.value_slope(t)
        return 2.0 * self.pivot - z, -zd

    def value_slope_dd(self, t_hi, t_lo):
        z_hi, z_lo, zd = self.base.value_slope_dd(t_hi, t_lo)
        out_hi, e = two_sum(2.0 * self.pivot, -z_hi)
        return quick_two_sum(out_hi, e - z_lo) + (-zd,)


def reflect_law(law, pivot):
    """2*pivot - law, collapsing a double reflection about the same pivot."""
    if isinstance(law, Reflected) and law.pivot == pivot:
        return law.base
    return Reflected(law, pivot)


SegmentLaw = Union[Harmonic, Constant, Reflected]


@dataclass(frozen=True)
class Segment:
    start: float  # may be -inf
    end: float  # may be +inf
    law: SegmentLaw

    @property
    def duration(self):
        return self.end - self.start


@dataclass(frozen=True)
class DriveProtocol:
    """Ordered, contiguous mirror-trajectory segments."""

    segments: tuple[Segment, ...]
    _starts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.segments:
            raise ProtocolError("protocol needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if not (a.end == b.start):
                raise ProtocolError(f"segments not contiguous: {a.end} != {b.start}")
        for s in self.segments:
            if not s.end > s.start:
                raise ProtocolError("segment duration must be positive")
        object.__setattr__(self, "_starts", np.array([s.start for s in self.segments]))

    @property
    def t_begin(self):
        return self.segments[0].start

    @property
    def t_end(self):
        return self.segments[-1].end

    def segment_at(self, t):
        i = int(np.searchsorted(self._starts, t, side="right")) - 1
        return self.segments[max(i, 0)]

    def evaluate(self, t):
        """Mirror position and velocity (z, zdot) at time t (scalar or array)."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        if np.any(t_arr < self.t_begin) or np.any(t_arr > self.t_end):
            raise HorizonError(
                f"time outside protocol domain [{self.t_begin}, {self.t_end}]"
            )
        t1 = np.atleast_1d(t_arr)
        if len(self.segments) == 1:
            z, zd = self.segments[0].law.value_slope(t1)
        else:
            idx = np.searchsorted(self._starts, t1, side="right") - 1
            idx = np.maximum(idx, 0)
            z = np.empty_like(t1)
            zd = np.empty_like(t1)
            for i, seg in enumerate(self.segments):
                m = idx == i
                if np.any(m):
                    z_m, zd_m = seg.law.value_slope(t1[m])
                    z[m] = z_m
                    zd[m] = zd_m
        if scalar:
            return float(z[0]), float(zd[0])
        return z, zd

    def evaluate_dd(self, t_hi, t_lo):
        """(z_hi, z_lo, zdot) at double-double times; no domain check.

        Segment selection uses the high part; callers keep event times well
        inside segments except at exact junctions, where both laws agree in
        value by the continuity invariant.
        """
        t_hi = np.asarray(t_hi, dtype=float)
        t_lo = np.asarray(t_lo, dtype=float)
        if len(self.segments) == 1:
            return self.segments[0].law.value_slope_dd(t_hi, t_lo)
        idx = np.searchsorted(self._starts, t_hi, side="right") - 1
        idx = np.maximum(idx, 0)
        z_hi = np.empty_like(t_hi)
        z_lo = np.empty_like(t_hi)
        zd = np.empty_like(t_hi)
        for i, seg in enumerate(self.segments):
            m = idx == i
            if np.any(m):
                a, b, c = seg.law.value_slope_dd(t_hi[m], t_lo[m])
                z_hi[m] = a
                z_lo[m] = b
                zd[m] = c
        return z_hi, z_lo, zd

    def period_at(self, t):
        """Period of the active segment law, or None for a constant law."""
        return self.segment_at(t).law.period


def evaluate(protocol, t):
    return protocol.evaluate(t)


def make_harmonic(L, A, omega, phi=0.0):
    """Unbounded single-segment protocol z(t) = L + A sin(omega t + phi).

    Rejects superluminal drives (A*omega >= 1) and non-positive minimum
    length (L - A <= 0). Period is 2*pi/omega.
    """
    law = Harmonic(L, A, omega, phi)
    return DriveProtocol((Segment(-math.inf, math.inf, law),))


def constant_protocol(L):
    return DriveProtocol((Segment(-math.inf, math.inf, Constant(L)),))


def piecewise(parts, t_start=0.0):
    """Protocol from [(law, duration), ...]; the last duration may be inf."""
    segments = []
    t = t_start
    for law, duration in parts:
        end = t + duration
        segments.append(Segment(t, end, law))
        t = end
    return DriveProtocol(tuple(segments))


def with_static_history(protocol, t_cut):
    """Protocol frozen at z(t_cut) for all t < t_cut, unchanged after.

    Used when initial data (e.g. the vacuum state) is defined at t_cut for a
    cavity that was static beforehand.
    """
    z_cut, _ = protocol.evaluate(t_cut)
    segments = [Segment(-math.inf, t_cut, Constant(float(z_cut)))]
    for s in protocol.segments:
        if s.end <= t_cut:
            continue
        segments.append(Segment(max(s.start, t_cut), s.end, s.law))
    return DriveProtocol(tuple(segments))


SPLICE_RTOL = 1e-9


def time_reverse(protocol, t_star, q=1):
    """Protocol equal to the input before t_star and to 2*q*L0 - z(t) after.

    L0 = T/2 is taken from the period of the segment active at t_star; the
    result undoes the q-period stroboscopic map accumulated before the splice.
    Requires z(t_star) = q*L0 (up to SPLICE_RTOL * L0), otherwise the mirror
    world line would jump at the splice.
    """
    if not int(q) == q or q < 1:
        raise ProtocolError(f"time reversal order q must be a positive integer, got {q}")
    q = int(q)
    seg = protocol.segment_at(t_star)
    T = seg.law.period
    z_star, _ = protocol.evaluate(t_star)
    if T is None:
        # A constant law is periodic with any period; reverse about its own
        # length so the spliced trajectory stays continuous.
        L0 = z_star / q
    else:
        L0 = T / 2.0
    mismatch = abs(2.0 * q * L0 - 2.0 * z_star)
    if mismatch > SPLICE_RTOL * L0:
        raise SpliceError(
            f"splice at t={t_star} discontinuous: |2qL0 - 2z(t*)| = {mismatch:.3e}"
        )
    pivot = q * L0
    new_segments = []
    for s in protocol.segments:
        if s.end <= t_star:
            new_segments.append(s)
        elif s.start >= t_star:
            new_segments.append(Segment(s.start, s.end, reflect_law(s.law, pivot)))
        else:
            new_segments.append(Segment(s.start, t_star, s.law))
            new_segments.append(Segment(t_star, s.end, reflect_law(s.law, pivot)))
    return DriveProtocol(tuple(new_segments))


@dataclass(frozen=True)
class ValidationReport:
    min_z: float
    max_abs_zdot: float
    junction_mismatches: tuple[tuple[float, float], ...]  # (time, |gap|)
    passed: bool
    samples_per_period: int


JUNCTION_TOL = 1e-9


def validate(protocol, samples_per_period=10_000):
    """Dense-sampling diagnostics: min z, max |zdot|, junction continuity.

    Sampling covers one full period of each periodic segment (which covers
    all times by periodicity) and the stated duration of bounded segments.
    """
    min_z = math.inf
    max_zd = 0.0
    for seg in protocol.segments:
        T = seg.law.period
        t_ref = seg.start if math.isfinite(seg.start) else 0.0
        if T is None:
            ts = np.array([t_ref])
        else:
            span = T if not math.isfinite(seg.duration) else min(seg.duration, T)
            n = max(16, int(samples_per_period * span / T))
            ts = t_ref + np.linspace(0.0, span, n)
        z, zd = seg.law.value_slope(ts)
        min_z = min(min_z, float(np.min(z)))
        max_zd = max(max_zd, float(np.max(np.abs(zd))))
    mismatches = []
    for a, b in zip(protocol.segments, protocol.segments[1:]):
        t_j = a.end
        z_lo, _ = a.law.value_slope(t_j)
        z_hi, _ = b.law.value_slope(t_j)
        gap = abs(float(z_lo) - float(z_hi))
        if gap > JUNCTION_TOL * max(abs(float(z_lo)), 1.0):
            mismatches.append((t_j, gap))
    passed = min_z > 0.0 and max_zd < 1.0 and not mismatches
    return ValidationReport(
        min_z=min_z,
        max_abs_zdot=max_zd,
        junction_mismatches=tuple(mismatches),
        passed=passed,
        samples_per_period=samples_per_period,
    )
