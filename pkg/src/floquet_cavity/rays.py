"""Exact null-line propagation on the unfolded ring of circumference 2 z(t).

Rays move with dx/dt = +c (= +1). Crossing the moving identification point
x = z(t) wraps the coordinate to -z(t_m) and flips the carried sign; crossing
x = 0 flips the sign only. The encounter equation h(t) = x + (t - t0) - z(t)
is strictly increasing for subluminal protocols, so every event time is the
unique root of a monotone function and bisection is unconditionally safe.

Committed ray positions and event times are carried as double-double pairs:
compress/decompress protocols amplify mid-course roundoff by the inverse of
the accumulated contraction (1e7 and beyond), which plain doubles cannot
absorb. Bisection brackets in plain arithmetic; a compensated Newton polish
brings the residual far below one ulp before each commit. x = 0 crossings are
counted on the unbroken free flight and never touch the committed state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ddmath import dd_add, dd_add_double, dd_sub
from .errors import HorizonError

EVENT_TIME_TOL = 1e-9  # bisection window width before the Newton polish
_NEWTON_STEPS_DD = 3
# A backward event lands exactly on the window start for rays whose source is
# the seam; roundoff must not double-fire it there (the forward window already
# excludes its start). Events genuinely inside by less than this are skipped,
# displacing the source by an equally negligible amount.
B_START_TOL = 1e-12


@dataclass(frozen=True)
class RayState:
    """Null-line sample: time, ring coordinate, sign parity, reflection count."""

    t: float
    x: float
    parity: int = 1
    reflections: int = 0

    def __post_init__(self):
        if self.parity != (1 if self.reflections % 2 == 0 else -1):
            raise ValueError(
                f"parity {self.parity} inconsistent with reflections {self.reflections}"
            )


@dataclass
class Propagation:
    """Batch propagation result between two times."""

    x: np.ndarray  # final ring coordinates
    flips: np.ndarray  # sign-flip events crossed (int)
    wraps: np.ndarray  # mirror encounters crossed (int)
    jacobian: np.ndarray  # d x_final / d x_initial, exact Doppler product
    wrap_zsum: np.ndarray  # sum of 2 z(t_m) over mirror encounters
    t_last_wrap: np.ndarray  # NaN where no encounter occurred


def _check_domain(protocol, t_lo, t_hi):
    if t_lo < protocol.t_begin or t_hi > protocol.t_end:
        raise HorizonError(
            f"propagation window [{t_lo}, {t_hi}] exceeds protocol domain "
            f"[{protocol.t_begin}, {protocol.t_end}]"
        )


def _refine_forward(protocol, lo, hi, tr_hi, tr_lo, xr_hi, xr_lo):
    """Event time of h(t) = x + (t - t_ref) - z(t) = 0 with h(lo) <= 0 <= h(hi).

    Plain bisection to EVENT_TIME_TOL, then a compensated Newton polish.
    Returns the root as a double-double pair.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    t_ref = tr_hi + tr_lo
    x_ref = xr_hi + xr_lo
    for _ in range(64):
        if np.max(hi - lo) <= EVENT_TIME_TOL:
            break
        mid = 0.5 * (lo + hi)
        z, _ = protocol.evaluate(mid)
        neg = x_ref + (mid - t_ref) - z < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    t_hi = 0.5 * (lo + hi)
    t_lo = np.zeros_like(t_hi)
    for _ in range(_NEWTON_STEPS_DD):
        z_hi, z_lo, zd = protocol.evaluate_dd(t_hi, t_lo)
        f_hi, f_lo = dd_add(*dd_sub(t_hi, t_lo, tr_hi, tr_lo), xr_hi, xr_lo)
        h = (f_hi - z_hi) + (f_lo - z_lo)
        t_hi, t_lo = dd_add_double(t_hi, t_lo, -h / (1.0 - zd))
    return t_hi, t_lo


def _refine_backward(protocol, lo, hi, tr_hi, tr_lo, xr_hi, xr_lo):
    """Event time of b(t) = x - (t_ref - t) + z(t) = 0 with b(lo) <= 0 <= b(hi)."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    t_ref = tr_hi + tr_lo
    x_ref = xr_hi + xr_lo
    for _ in range(64):
        if np.max(hi - lo) <= EVENT_TIME_TOL:
            break
        mid = 0.5 * (lo + hi)
        z, _ = protocol.evaluate(mid)
        neg = x_ref - (t_ref - mid) + z < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    t_hi = 0.5 * (lo + hi)
    t_lo = np.zeros_like(t_hi)
    for _ in range(_NEWTON_STEPS_DD):
        z_hi, z_lo, zd = protocol.evaluate_dd(t_hi, t_lo)
        f_hi, f_lo = dd_add(*dd_sub(t_hi, t_lo, tr_hi, tr_lo), xr_hi, xr_lo)
        b = (f_hi + z_hi) + (f_lo + z_lo)
        t_hi, t_lo = dd_add_double(t_hi, t_lo, -b / (1.0 + zd))
    return t_hi, t_lo


def advance_batch(protocol, t0, x0, t1):
    """Propagate ring coordinates x0 from t0 forward to t1 >= t0.

    t0 and t1 may be scalars or per-ray arrays. Events exactly at t1 are
    included (half-open window (t0, t1]), so a ray arriving at the
    identification point at t1 lands on -z(t1).
    """
    x_hi = np.array(x0, dtype=float, copy=True)
    n = x_hi.shape[0]
    x_lo = np.zeros(n)
    tc_hi = np.broadcast_to(np.asarray(t0, dtype=float), (n,)).copy()
    tc_lo = np.zeros(n)
    t_end = np.broadcast_to(np.asarray(t1, dtype=float), (n,)).copy()
    if np.any(t_end < tc_hi):
        raise ValueError("forward propagation needs t1 >= t0")
    if n:
        _check_domain(protocol, float(np.min(tc_hi)), float(np.max(t_end)))
    flips = np.zeros(n, dtype=np.int64)
    wraps = np.zeros(n, dtype=np.int64)
    jac = np.ones(n)
    zsum = np.zeros(n)
    t_last = np.full(n, np.nan)
    active = np.ones(n, dtype=bool)
    z_end, _ = protocol.evaluate(t_end)
    z_end = np.atleast_1d(z_end)
    while np.any(active):
        idx = np.nonzero(active)[0]
        xc = x_hi[idx] + x_lo[idx]
        tc = tc_hi[idx] + tc_lo[idx]
        h_end = xc + (t_end[idx] - tc) - z_end[idx]
        wrap = h_end >= 0.0
        # Rays done before the next encounter: free flight, count a sign
        # flip if the flight crosses x = 0 (crossing at exactly t1 counts).
        done = idx[~wrap]
        if done.size:
            fh, fl = dd_add(*dd_sub(t_end[done], np.zeros(done.size),
                                    tc_hi[done], tc_lo[done]),
                            x_hi[done], x_lo[done])
            flips[done] += (x_hi[done] + x_lo[done] < 0.0) & (fh + fl >= 0.0)
            x_hi[done], x_lo[done] = fh, fl
            tc_hi[done], tc_lo[done] = t_end[done], 0.0
            active[done] = False
        hit = idx[wrap]
        if hit.size:
            tm_hi, tm_lo = _refine_forward(
                protocol, tc_hi[hit] + tc_lo[hit], t_end[hit],
                tc_hi[hit], tc_lo[hit], x_hi[hit], x_lo[hit])
            z_hi, z_lo, zd_m = protocol.evaluate_dd(tm_hi, tm_lo)
            flips[hit] += x_hi[hit] + x_lo[hit] < 0.0  # 0 crossed before mirror
            flips[hit] += 1
            wraps[hit] += 1
            jac[hit] *= (1.0 + zd_m) / (1.0 - zd_m)
            zsum[hit] += 2.0 * (z_hi + z_lo)
            t_last[hit] = tm_hi + tm_lo
            x_hi[hit], x_lo[hit] = -z_hi, -z_lo
            tc_hi[hit], tc_lo[hit] = tm_hi, tm_lo
    return Propagation(x=x_hi + x_lo, flips=flips, wraps=wraps, jacobian=jac,
                       wrap_zsum=zsum, t_last_wrap=t_last)


def pullback_batch(protocol, t1, x1, t0):
    """Trace ring coordinates x1 at t1 backward to t0 <= t1.

    Returns the source coordinates, the number of sign flips crossed, the
    backward Jacobian dx(t0)/dx(t1) (product of inverse Doppler factors),
    and the wrap count; wrap_zsum is not accumulated on this path. A
    starting coordinate exactly at -z(t1) unwraps immediately, mirroring
    the forward half-open convention.
    """
    x_hi = np.array(x1, dtype=float, copy=True)
    n = x_hi.shape[0]
    x_lo = np.zeros(n)
    tc_hi = np.broadcast_to(np.asarray(t1, dtype=float), (n,)).copy()
    tc_lo = np.zeros(n)
    t_bot = np.broadcast_to(np.asarray(t0, dtype=float), (n,)).copy()
    if np.any(t_bot > tc_hi):
        raise ValueError("backward propagation needs t0 <= t1")
    if n:
        _check_domain(protocol, float(np.min(t_bot)), float(np.max(tc_hi)))
    flips = np.zeros(n, dtype=np.int64)
    wraps = np.zeros(n, dtype=np.int64)
    jac = np.ones(n)
    active = np.ones(n, dtype=bool)
    z_start, _ = protocol.evaluate(t_bot)
    z_start = np.atleast_1d(z_start)
    while np.any(active):
        idx = np.nonzero(active)[0]
        xc = x_hi[idx] + x_lo[idx]
        tc = tc_hi[idx] + tc_lo[idx]
        # b(t) = x - (t_cur - t) + z(t) is strictly increasing; an unwrap
        # exists in the half-open window iff b(t0) < 0. A ray starting
        # exactly on -z(t1) has its root at t1 itself and unwraps there.
        b_start = xc - (tc - t_bot[idx]) + z_start[idx]
        unwrap = b_start < -B_START_TOL
        done = idx[~unwrap]
        if done.size:
            fh, fl = dd_add(*dd_sub(t_bot[done], np.zeros(done.size),
                                    tc_hi[done], tc_lo[done]),
                            x_hi[done], x_lo[done])
            flips[done] += (x_hi[done] + x_lo[done] >= 0.0) & (fh + fl < 0.0)
            x_hi[done], x_lo[done] = fh, fl
            tc_hi[done], tc_lo[done] = t_bot[done], 0.0
            active[done] = False
        hit = idx[unwrap]
        if hit.size:
            tm_hi, tm_lo = _refine_backward(
                protocol, t_bot[hit], tc_hi[hit] + tc_lo[hit],
                tc_hi[hit], tc_lo[hit], x_hi[hit], x_lo[hit])
            z_hi, z_lo, zd_m = protocol.evaluate_dd(tm_hi, tm_lo)
            flips[hit] += x_hi[hit] + x_lo[hit] >= 0.0  # 0 crossed before -z
            flips[hit] += 1
            wraps[hit] += 1
            jac[hit] *= (1.0 - zd_m) / (1.0 + zd_m)
            x_hi[hit], x_lo[hit] = z_hi, z_lo
            tc_hi[hit], tc_lo[hit] = tm_hi, tm_lo
    return Propagation(x=x_hi + x_lo, flips=flips, wraps=wraps, jacobian=jac,
                       wrap_zsum=np.zeros(n), t_last_wrap=np.full(n, np.nan))


def trace_csv(states):
    """World-line states as CSV text with columns t, x, parity, reflections."""
    lines = ["t,x,parity,reflections"]
    lines += [f"{s.t:.17g},{s.x:.17g},{s.parity},{s.reflections}" for s in states]
    return "\n".join(lines) + "\n"


def trace_json(states):
    """World-line states as a JSON array of [t, x, parity, reflections] rows."""
    return json.dumps([[s.t, s.x, s.parity, s.reflections] for s in states])


def next_mirror_encounter(protocol, ray, t_limit=None):
    """Unique time t_m > ray.t at which the free flight meets x = z(t).

    Brackets by stepping in increments of z(t)/2 (no root can be skipped
    because h is strictly increasing), then bisects and polishes.
    """
    z0, _ = protocol.evaluate(ray.t)
    if not (-z0 <= ray.x < z0):
        raise ValueError(f"ray coordinate {ray.x} outside ring [{-z0}, {z0})")
    t_hi = protocol.t_end if t_limit is None else min(t_limit, protocol.t_end)
    t_c = ray.t
    h_c = ray.x - z0
    while h_c < 0.0:
        z_c, _ = protocol.evaluate(t_c)
        t_n = t_c + 0.5 * z_c
        if t_n > t_hi:
            z_n, _ = protocol.evaluate(t_hi)
            if ray.x + (t_hi - ray.t) - z_n < 0.0:
                raise HorizonError(f"no mirror encounter before t = {t_hi}")
            t_n = t_hi
        z_n, _ = protocol.evaluate(t_n)
        h_n = ray.x + (t_n - ray.t) - z_n
        if h_n >= 0.0:
            res_hi, res_lo = _refine_forward(
                protocol, np.array([t_c]), np.array([t_n]),
                np.array([ray.t]), np.zeros(1), np.array([ray.x]), np.zeros(1))
            return float(res_hi[0] + res_lo[0])
        t_c, h_c = t_n, h_n
    raise RuntimeError("unreachable: h(ray.t) >= 0 for an in-ring ray")


def advance(protocol, ray, t_target):
    """Ray state at t_target >= ray.t, with wraps and sign flips applied."""
    if t_target < ray.t:
        raise ValueError("advance cannot move backward in time")
    res = advance_batch(protocol, ray.t, np.array([ray.x]), t_target)
    k = int(res.flips[0])
    parity = ray.parity * (1 if k % 2 == 0 else -1)
    return RayState(t=float(t_target), x=float(res.x[0]), parity=parity,
                    reflections=ray.reflections + k)


def trace(protocol, ray, t_target, n_samples=0):
    """World line of a ray: exact event states plus uniform time samples.

    With n_samples = 0 only the event states are returned. States are
    ordered in time; a sample coinciding exactly with an event is dropped
    in favour of the event state.
    """
    if t_target < ray.t:
        raise ValueError("trace cannot move backward in time")
    _check_domain(protocol, ray.t, t_target)
    events = []
    t_c, x_c = ray.t, ray.x
    parity, refl = ray.parity, ray.reflections
    legs = [(t_c, x_c, parity)]  # free-flight anchors for sampling
    z_end, _ = protocol.evaluate(t_target)
    while True:
        h_end = x_c + (t_target - t_c) - z_end
        t_m = None
        if h_end >= 0.0:
            mh, ml = _refine_forward(protocol, np.array([t_c]),
                                     np.array([t_target]),
                                     np.array([t_c]), np.zeros(1),
                                     np.array([x_c]), np.zeros(1))
            t_m = float(mh[0] + ml[0])
        t_z = t_c - x_c if x_c < 0.0 else None
        if t_z is not None and t_z > t_target:
            t_z = None
        if t_z is not None and (t_m is None or t_z <= t_m):
            parity = -parity
            refl += 1
            events.append(RayState(t_z, 0.0, parity, refl))
            t_c, x_c = t_z, 0.0
            legs.append((t_c, x_c, parity))
        elif t_m is not None:
            z_m, _ = protocol.evaluate(t_m)
            parity = -parity
            refl += 1
            events.append(RayState(t_m, -float(z_m), parity, refl))
            t_c, x_c = t_m, -float(z_m)
            legs.append((t_c, x_c, parity))
        else:
            break
    states = list(events)
    if n_samples == 1:
        sample_times = [t_target]
    elif n_samples >= 2:
        sample_times = list(np.linspace(ray.t, t_target, n_samples))
    else:
        sample_times = []
    event_times = {s.t for s in events}
    leg_starts = np.array([leg[0] for leg in legs])
    for t_s in sample_times:
        if t_s in event_times:
            continue
        i = int(np.searchsorted(leg_starts, t_s, side="right")) - 1
        t_a, x_a, par_a = legs[max(i, 0)]
        refl_a = ray.reflections + sum(1 for e in events if e.t <= t_s)
        states.append(RayState(float(t_s), x_a + (t_s - t_a), par_a, refl_a))
    states.sort(key=lambda s: s.t)
    return states
