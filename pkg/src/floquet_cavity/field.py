"""Classical vector potential on the ring, evolved by pullback along null lines.

The field value is transported unchanged along rays up to sign flips, so
evolution reads the initial data at the backward-traced source point. Energy
density needs the squared pullback Jacobian, which is taken from exact
Doppler multiplier products; only the initial-data derivative is estimated
by finite differences on the sample grid (fourth order, one-sided at marked
discontinuities).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import rays
from .errors import FieldError

MIN_GRID = 16


@dataclass(frozen=True)
class FieldState:
    """Sampled field on the ring at one instant.

    discontinuities lists interior ring coordinates where the data may jump
    or kink; the seam at -z(t) is always treated as a potential jump. Grid
    and values are never mutated; evolution returns a new state.
    """

    t: float
    grid: np.ndarray
    values: np.ndarray
    interpolation: str = "monotone-cubic"
    discontinuities: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.grid.size < MIN_GRID:
            raise FieldError(f"field grid needs >= {MIN_GRID} points, got {self.grid.size}")
        if self.values.shape != self.grid.shape:
            raise FieldError("grid and values shapes differ")
        if np.any(np.diff(self.grid) <= 0.0):
            raise FieldError("field grid must be strictly increasing")
        if self.interpolation not in ("linear", "monotone-cubic"):
            raise FieldError(f"unknown interpolation {self.interpolation!r}")


@dataclass(frozen=True)
class EnergyReport:
    """Energy density samples and their ring integral at one instant."""

    t: float
    grid: np.ndarray
    density: np.ndarray
    total: float


def init_field(protocol, initializer=None, t0=0.0, *, n=4096, grid=None,
               values=None, interpolation="monotone-cubic",
               discontinuities=(0.0,)):
    """Field state at t0 from a callable initializer or explicit samples.

    A callable is sampled on n uniform points covering [-z(t0), z(t0)).
    Explicit (grid, values) must cover the ring with a strictly increasing
    grid.
    """
    z0, _ = protocol.evaluate(t0)
    if initializer is not None:
        grid = -z0 + 2.0 * z0 * np.arange(n) / n
        values = np.asarray(initializer(grid), dtype=float)
    else:
        if grid is None or values is None:
            raise FieldError("need either an initializer or explicit grid and values")
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.size and (grid[0] < -z0 - 1e-12 * z0 or grid[-1] >= z0 + 1e-12 * z0):
            raise FieldError(f"grid must lie inside the ring [{-z0}, {z0})")
    if grid.size == 0:
        raise FieldError("empty field grid")
    marks = tuple(sorted(m for m in discontinuities if -z0 < m < z0))
    return FieldState(t=float(t0), grid=grid, values=values,
                      interpolation=interpolation, discontinuities=marks)


def _arc_bounds(state, z0):
    return np.concatenate([[-z0], np.asarray(state.discontinuities, dtype=float),
                           [z0]])


def _derivative_samples(x, y):
    """Fourth-order derivative of samples on a uniform grid, one-sided at ends."""
    m = x.size
    h = (x[-1] - x[0]) / (m - 1)
    uniform = np.max(np.abs(np.diff(x) - h)) < 1e-9 * abs(h)
    if m < 5 or not uniform:
        return np.gradient(y, x, edge_order=2 if m >= 3 else 1)
    d = np.empty(m)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
    d[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3] + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    d[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    return d


def _linear_with_edge_slopes(xs, ys):
    """np.interp that extrapolates with the boundary slopes.

    Queries can sit in the half-sample gap between an arc's last sample and
    the next mark; clamping there would cost O(h) accuracy.
    """
    s_lo = (ys[1] - ys[0]) / (xs[1] - xs[0])
    s_hi = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])

    def ev(q):
        out = np.interp(q, xs, ys)
        out = np.where(q < xs[0], ys[0] + (q - xs[0]) * s_lo, out)
        out = np.where(q > xs[-1], ys[-1] + (q - xs[-1]) * s_hi, out)
        return out

    return ev


class _ArcInterp:
    """Piecewise interpolant honouring marked discontinuities between arcs."""

    def __init__(self, state, z0, derivative=False):
        self.bounds = _arc_bounds(state, z0)
        self.evals = []
        for j in range(self.bounds.size - 1):
            lo, hi = self.bounds[j], self.bounds[j + 1]
            sel = (state.grid >= lo) & (state.grid < hi)
            xs = state.grid[sel]
            ys = state.values[sel]
            if xs.size == 0:
                self.evals.append(None)
                continue
            if derivative:
                ys = (_derivative_samples(xs, ys) if xs.size >= 2
                      else np.zeros_like(ys))
            if xs.size == 1:
                c = float(ys[0])
                self.evals.append(lambda q, c=c: np.full_like(q, c))
            elif state.interpolation == "linear":
                self.evals.append(_linear_with_edge_slopes(xs, ys))
            else:
                self.evals.append(PchipInterpolator(xs, ys, extrapolate=True))
        for j, ev in enumerate(self.evals):
            if ev is None:
                raise FieldError(
                    f"no samples inside arc [{self.bounds[j]}, {self.bounds[j+1]})"
                )

    def __call__(self, xq):
        out = np.empty_like(xq)
        idx = np.clip(np.searchsorted(self.bounds, xq, side="right") - 1,
                      0, len(self.evals) - 1)
        for j, ev in enumerate(self.evals):
            m = idx == j
            if np.any(m):
                out[m] = ev(xq[m])
        return out


def _reduce_ring(x, z0):
    c = 2.0 * z0
    return x - c * np.floor((x + z0) / c)


def _output_grid(protocol, t, n):
    z_t, _ = protocol.evaluate(t)
    return float(z_t), -z_t + 2.0 * z_t * np.arange(n) / n


def evolve(protocol, state, t, n_out=None):
    """Field at time t >= state.t by backward transport of the initial data.

    Each output point is traced back to state.t; the value there is the
    initial field at the source point times the accumulated sign parity.
    Marked discontinuities are transported forward so later operations keep
    differentiating one-sidedly across them.
    """
    if t < state.t:
        raise ValueError("evolve cannot move backward in time")
    n = state.grid.size if n_out is None else n_out
    z_t, grid_out = _output_grid(protocol, t, n)
    z0, _ = protocol.evaluate(state.t)
    pb = rays.pullback_batch(protocol, t, grid_out, state.t)
    x_src = _reduce_ring(pb.x, z0)
    interp = _ArcInterp(state, z0)
    sign = np.where(pb.flips % 2 == 0, 1.0, -1.0)
    vals = sign * interp(x_src)
    old_marks = np.array([-z0, *state.discontinuities])
    fwd = rays.advance_batch(protocol, state.t, old_marks, t)
    moved = _reduce_ring(fwd.x, z_t)
    # marks closer than two grid spacings (to each other or to the seam)
    # would leave sample-free arcs; merge them away
    gap = 4.0 * z_t / n
    marks = []
    for m in sorted({0.0, *(float(v) for v in moved)}):
        if not (-z_t + gap < m < z_t - gap):
            continue
        if marks and m - marks[-1] < gap:
            continue
        marks.append(m)
    return FieldState(t=float(t), grid=grid_out, values=vals,
                      interpolation=state.interpolation,
                      discontinuities=tuple(marks))


def energy_density(protocol, state, t, n_out=None):
    """T00 samples at time t on a uniform output ring grid.

    density(x_t) = [dx0/dx_t]^2 [A0'(x0)]^2 with the Jacobian an exact
    reciprocal Doppler product along the backward trace and A0' estimated
    on the initial grid. The total is the periodic trapezoid of the samples
    (equal weights on a uniform ring grid).
    """
    if t < state.t:
        raise ValueError("energy_density cannot move backward in time")
    n = state.grid.size if n_out is None else n_out
    z_t, grid_out = _output_grid(protocol, t, n)
    z0, _ = protocol.evaluate(state.t)
    pb = rays.pullback_batch(protocol, t, grid_out, state.t)
    x_src = _reduce_ring(pb.x, z0)
    dinterp = _ArcInterp(state, z0, derivative=True)
    dens = (pb.jacobian * dinterp(x_src)) ** 2
    total = float(2.0 * z_t / n * np.sum(dens))
    return EnergyReport(t=float(t), grid=grid_out, density=dens, total=total)


def total_energy(protocol, state, t, n_out=None):
    """Ring integral of the energy density at time t."""
    return energy_density(protocol, state, t, n_out=n_out).total
