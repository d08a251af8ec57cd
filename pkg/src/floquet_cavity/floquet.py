"""Stroboscopic circle maps of a driven ring cavity.

The one-period map sends the ring coordinate of a null line at a reference
time t0 to its coordinate one drive period later; sampling every q periods
gives the q-th resonance map. Multipliers are exact Doppler products
(1 + zdot)/(1 - zdot) accumulated over mirror encounters, never finite
differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rays
from .errors import MonotonicityError, ProtocolError

STABILITY_TOL = 1e-6  # |multiplier - 1| below this is a tangency
FIXED_POINT_XTOL = 1e-10
TOUCH_RTOL = 1e-7  # tangency gate on the diagonal-distance minimum, times C


def _map_period(protocol, t0, period, q):
    T = period if period is not None else protocol.period_at(t0)
    if T is None:
        raise ProtocolError(
            "map period undetermined for a constant protocol; pass period="
        )
    if not int(q) == q or q < 1:
        raise ProtocolError(f"resonance order q must be a positive integer, got {q}")
    return float(T) * int(q)


@dataclass
class MapStep:
    """Result of one stroboscopic map application."""

    x1: np.ndarray | float
    multiplier: np.ndarray | float
    t_m: np.ndarray | float  # last mirror-encounter time (NaN if none)


def map_once(protocol, t0, x, period=None, q=1):
    """One application of the stroboscopic map at reference time t0.

    x may be a scalar or an array of ring coordinates in [-z(t0), z(t0)).
    The map window is the half-open interval (t0, t0 + q*T]; an encounter
    exactly at the window end is included, so the map agrees with its own
    composition across consecutive windows.
    """
    T_map = _map_period(protocol, t0, period, q)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    z0, _ = protocol.evaluate(t0)
    if np.any(x_arr < -z0) or np.any(x_arr >= z0):
        raise ValueError(f"ring coordinate outside [{-z0}, {z0})")
    res = rays.advance_batch(protocol, t0, x_arr, t0 + T_map)
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return MapStep(float(res.x[0]), float(res.jacobian[0]),
                       float(res.t_last_wrap[0]))
    return MapStep(res.x, res.jacobian, res.t_last_wrap)


def iterate(protocol, t0, x, n, period=None, q=1):
    """Orbit x_0 .. x_n of the stroboscopic map (axis 0 is iteration count).

    Each step advances the window start by q*T, so spliced (time-reversal)
    protocols are iterated with their actual segment active at each step.
    """
    T_map = _map_period(protocol, t0, period, q)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    orbit = np.empty((n + 1, x_arr.size))
    orbit[0] = x_arr
    for k in range(n):
        step = rays.advance_batch(protocol, t0 + k * T_map, orbit[k],
                                  t0 + (k + 1) * T_map)
        orbit[k + 1] = step.x
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return orbit[:, 0]
    return orbit


def inverse(protocol, t0, x1, period=None, q=1):
    """Inverse map g = f^(-1) at reference time t0, by backward event solving.

    Satisfies g(f(x)) = x to the event-solver accuracy.
    """
    T_map = _map_period(protocol, t0, period, q)
    x_arr = np.atleast_1d(np.asarray(x1, dtype=float))
    res = rays.pullback_batch(protocol, t0 + T_map, x_arr, t0)
    if np.isscalar(x1) or np.asarray(x1).ndim == 0:
        return float(res.x[0])
    return res.x


@dataclass
class CircleMap:
    """Tabulated strictly-increasing degree-one lift of the stroboscopic map.

    F holds the lift samples at the uniform grid x on [-z(t0), z(t0)); the
    lift branch is anchored at the first sample. multiplier holds the exact
    map derivative at each sample.
    """

    protocol: object
    t0: float
    q: int
    T_map: float
    C: float  # ring circumference 2 z(t0)
    x: np.ndarray
    F: np.ndarray
    multiplier: np.ndarray
    wraps: np.ndarray
    _w_anchor: int

    def lift(self, x_query):
        """Exact lift and multiplier at arbitrary coordinates.

        Queries are reduced into the fundamental domain; the lift value is
        shifted back by the corresponding multiple of C (degree one).
        """
        xq = np.atleast_1d(np.asarray(x_query, dtype=float))
        z0 = 0.5 * self.C
        k = np.floor((xq + z0) / self.C)
        x_red = xq - k * self.C
        res = rays.advance_batch(self.protocol, self.t0, x_red,
                                 self.t0 + self.T_map)
        f_raw = x_red + self.T_map - res.wrap_zsum
        f_lift = f_raw + self.C * (res.wraps - self._w_anchor) + k * self.C
        return f_lift, res.jacobian


def tabulate(protocol, t0=0.0, q=1, n=2048, period=None):
    """Tabulate the lift of f^(q) on n uniform samples and verify it.

    The raw stroboscopic displacement is x + c*T_map - sum(2 z(t_m)); adding
    C per extra wrap removes the seam jumps and yields the continuous lift.
    Raises MonotonicityError if the samples are not strictly increasing or
    the degree-one closure fails (either signals a superluminal protocol or
    an engine defect).
    """
    T_map = _map_period(protocol, t0, period, q)
    z0, _ = protocol.evaluate(t0)
    z1, _ = protocol.evaluate(t0 + T_map)
    if abs(z1 - z0) > 1e-9 * z0:
        raise ProtocolError(
            f"protocol not periodic over the map window: z changes {z0} -> {z1}"
        )
    C = 2.0 * z0
    x = -z0 + C * np.arange(n) / n
    res = rays.advance_batch(protocol, t0, x, t0 + T_map)
    f_raw = x + T_map - res.wrap_zsum
    w0 = int(res.wraps[0])
    F = f_raw + C * (res.wraps - w0)
    increments = np.empty(n)
    increments[: n - 1] = np.diff(F)
    increments[n - 1] = F[0] + C - F[n - 1]
    if np.any(increments <= 0.0):
        bad = int(np.argmax(increments <= 0.0))
        raise MonotonicityError(
            f"lift not strictly increasing near x = {x[bad]:.6g}"
        )
    if np.any(increments >= C):
        raise MonotonicityError("lift increment exceeds one circumference")
    if np.any(res.jacobian <= 0.0):
        raise MonotonicityError("non-positive multiplier sample")
    return CircleMap(protocol=protocol, t0=float(t0), q=int(q), T_map=T_map,
                     C=C, x=x, F=F, multiplier=res.jacobian, wraps=res.wraps,
                     _w_anchor=w0)


@dataclass(frozen=True)
class FixedPoint:
    x: float
    multiplier: float
    stability: str  # "stable" | "unstable" | "tangent"


@dataclass(frozen=True)
class FixedPointSet:
    period: int
    points: tuple[FixedPoint, ...]

    @property
    def stable(self):
        return tuple(p for p in self.points if p.stability == "stable")

    @property
    def unstable(self):
        return tuple(p for p in self.points if p.stability == "unstable")

    @property
    def tangent(self):
        return tuple(p for p in self.points if p.stability == "tangent")

    def __len__(self):
        return len(self.points)


def _classify(mult):
    if mult < 1.0 - STABILITY_TOL:
        return "stable"
    if mult > 1.0 + STABILITY_TOL:
        return "unstable"
    return "tangent"


def find_fixed_points(cmap, period=None):
    """All fixed points of the tabulated map, bisection-refined and classified.

    Roots of F(x) - x = k*C are scanned over every reachable integer branch
    k, so drifting lifts with winding are handled. Diagonal tangencies
    (stable/unstable pairs at the moment of merging) are recovered from
    parabolic minima of the diagonal distance and refined on the multiplier,
    which crosses 1 transversally there.
    """
    if period is not None and int(period) != cmap.q:
        raise ValueError(f"map was tabulated for period {cmap.q}, not {period}")
    p = cmap.q if period is None else int(period)
    x, F, C = cmap.x, cmap.F, cmap.C
    n = x.size
    D = F - x
    # closing sample: displacement is periodic, D(x0 + C) = D(x0)
    x_ext = np.append(x, x[0] + C)
    D_ext = np.append(D, D[0])
    k_lo = math.floor(np.min(D) / C)
    k_hi = math.ceil(np.max(D) / C)
    roots = []

    def lift_at(xq):
        f, _ = cmap.lift(np.array([xq]))
        return float(f[0])

    def mult_at(xq):
        # Central secant of the exact lift. Unlike the per-point Doppler
        # product it is insensitive to a fixed point sitting exactly on the
        # window-end encounter threshold (where the analytic derivative is
        # one-sided), and matches it to ~1e-8 elsewhere.
        d = 1e-7 * C
        f, _ = cmap.lift(np.array([xq - d, xq + d]))
        return float(f[1] - f[0]) / (2.0 * d)

    for k in range(k_lo, k_hi + 1):
        off = k * C
        E = D_ext - off
        for i in range(n):
            a, b = E[i], E[i + 1]
            if a == 0.0:
                roots.append((float(x_ext[i]), k))
                continue
            if a * b < 0.0:
                lo, hi = x_ext[i], x_ext[i + 1]
                e_lo = a
                while hi - lo > FIXED_POINT_XTOL:
                    mid = 0.5 * (lo + hi)
                    e_mid = lift_at(mid) - mid - off
                    if e_mid == 0.0:
                        lo = hi = mid
                        break
                    if (e_mid > 0.0) == (e_lo > 0.0):
                        lo = mid
                        e_lo = e_mid
                    else:
                        hi = mid
                roots.append((0.5 * (lo + hi), k))
        # Tangency pass: strict local minima of |E| with no sign change.
        touch_tol = TOUCH_RTOL * C
        for i in range(n):
            im1, ip1 = (i - 1) % n, (i + 1) % n
            e0, e1, e2 = E[im1], E[i], E[ip1]
            if not (abs(e1) < abs(e0) and abs(e1) <= abs(e2)):
                continue
            if e0 * e1 <= 0.0 or e1 * e2 <= 0.0:
                continue  # a sign change; the crossing scan owns it
            # parabola through the three samples (uniform spacing)
            curv = e0 - 2.0 * e1 + e2
            if curv == 0.0:
                continue
            delta = 0.5 * (e0 - e2) / curv
            v = e1 - 0.25 * (e0 - e2) * delta
            if abs(v) > touch_tol:
                continue
            h = C / n
            x_lo, x_hi = x[i] - h, x[i] + h
            m_lo, m_hi = mult_at(x_lo) - 1.0, mult_at(x_hi) - 1.0
            if m_lo * m_hi < 0.0:
                while x_hi - x_lo > FIXED_POINT_XTOL:
                    mid = 0.5 * (x_lo + x_hi)
                    m_mid = mult_at(mid) - 1.0
                    if (m_mid > 0.0) == (m_lo > 0.0):
                        x_lo, m_lo = mid, m_mid
                    else:
                        x_hi = mid
                x_t = 0.5 * (x_lo + x_hi)
            else:
                x_t = x[i] + delta * h
            if abs(lift_at(x_t) - x_t - off) <= 10.0 * touch_tol:
                roots.append((x_t, k))

    # reduce into the fundamental domain, dedupe, classify
    z0 = 0.5 * C
    cleaned = []
    for xr, _k in roots:
        xr = xr - C * math.floor((xr + z0) / C)
        cleaned.append(xr)
    cleaned.sort()
    merged = []
    merge_tol = 1e-6 * C
    for xr in cleaned:
        if merged and xr - merged[-1] < merge_tol:
            continue
        merged.append(xr)
    if len(merged) > 1 and (merged[0] + C) - merged[-1] < merge_tol:
        merged.pop()
    points = []
    for xr in merged:
        m = mult_at(xr)
        points.append(FixedPoint(x=float(xr), multiplier=m, stability=_classify(m)))
    return FixedPointSet(period=p, points=tuple(points))


def moore_R(protocol, u, t_ref=0.0):
    """Inverse conformal coordinate R(u), bootstrapped by exact ray tracing.

    Seeded with R(u) = u / z(t_ref) on [-z(t_ref), z(t_ref)); every mirror
    wrap crossed between t_ref and u shifts R by 2. Strictly increasing.
    """
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    z0, _ = protocol.evaluate(t_ref)
    out = np.empty_like(u_arr)
    fwd = u_arr < t_ref
    if np.any(fwd):
        res = rays.advance_batch(protocol, u_arr[fwd], np.zeros(int(np.sum(fwd))),
                                 t_ref)
        out[fwd] = -res.x / z0 - 2.0 * res.wraps
    bwd = ~fwd
    if np.any(bwd):
        res = rays.pullback_batch(protocol, u_arr[bwd], np.zeros(int(np.sum(bwd))),
                                  t_ref)
        out[bwd] = -res.x / z0 + 2.0 * res.wraps
    if np.isscalar(u) or np.asarray(u).ndim == 0:
        return float(out[0])
    return out


def moore_R_prime(protocol, u, t_ref=0.0):
    """dR/du from exact Doppler multiplier products (no finite differences)."""
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    z0, _ = protocol.evaluate(t_ref)
    out = np.empty_like(u_arr)
    fwd = u_arr < t_ref
    if np.any(fwd):
        res = rays.advance_batch(protocol, u_arr[fwd], np.zeros(int(np.sum(fwd))),
                                 t_ref)
        out[fwd] = res.jacobian / z0
    bwd = ~fwd
    if np.any(bwd):
        res = rays.pullback_batch(protocol, u_arr[bwd], np.zeros(int(np.sum(bwd))),
                                  t_ref)
        out[bwd] = res.jacobian / z0
    if np.isscalar(u) or np.asarray(u).ndim == 0:
        return float(out[0])
    return out


def light_cones(cmap, grid=256):
    """Stroboscopic propagation velocity (F(x) - x)/T_map on a uniform grid.

    The displacement is reduced into [-C/2, C/2), which makes the velocity
    vanish exactly at fixed points and carry the sign of the local drift.
    Returns an array of (x, v_strobe) rows.
    """
    z0 = 0.5 * cmap.C
    x = -z0 + cmap.C * np.arange(grid) / grid
    f, _ = cmap.lift(x)
    disp = f - x
    disp = disp - cmap.C * np.round(disp / cmap.C)
    return np.column_stack([x, disp / cmap.T_map])
