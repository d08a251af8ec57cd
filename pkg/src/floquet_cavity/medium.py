"""Semiclassical wave transport in a cavity with modulated refractive index.

The ring of circumference 2L is split into regions whose permittivity and
permeability are piecewise constant in time. A single-chirality envelope
rides the characteristics dx/dt = c* = 1/sqrt(eps*mu); across any parameter
change the combination sqrt(eps/mu) * amplitude^2 is continuous and the fast
phase is continuous. Spatial boundaries keep the carrier frequency fixed;
temporal switches keep the wavevector fixed and rescale the frequency.
Region boundaries must not move.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ProtocolError

CARRIER_PERIOD_FRACTION = 1.0 / 20.0  # adiabaticity gate for the monitor


@dataclass(frozen=True)
class PiecewiseConstant:
    """Step function of time: values[i] on [times[i], times[i+1]).

    With a period the pattern repeats; times are then phases in [0, period)
    and times[0] must be 0. Without a period the last value holds forever.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]
    period: float | None = None

    def __post_init__(self):
        if len(self.times) != len(self.values) or not self.times:
            raise ProtocolError("times and values must be equal-length, non-empty")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ProtocolError("times must be strictly increasing")
        if self.period is not None:
            if self.times[0] != 0.0:
                raise ProtocolError("periodic schedule must start at phase 0")
            if self.times[-1] >= self.period:
                raise ProtocolError("phases must lie inside one period")
        if any(v <= 0.0 for v in self.values):
            raise ProtocolError("material parameters must stay positive")

    def _instants(self, t):
        """Switch instants bracketing t, built with the same arithmetic as
        next_switch so that value(next_switch(t)) is the post-switch value
        bit-exactly."""
        if self.period is None:
            return [(s, v) for s, v in zip(self.times, self.values)]
        k = math.floor(t / self.period)
        out = []
        for cycle in (k - 1, k, k + 1):
            base = cycle * self.period
            out.extend((base + s, v) for s, v in zip(self.times, self.values))
        return out

    def value(self, t):
        current = None
        for instant, v in self._instants(t):
            if instant <= t:
                current = v
            else:
                break
        return self.values[0] if current is None else current

    def next_switch(self, t):
        """First switch instant strictly after t, or None."""
        for instant, _v in self._instants(t):
            if instant > t:
                return instant
        return None


@dataclass(frozen=True)
class Region:
    x_lo: float
    x_hi: float
    eps: PiecewiseConstant
    mu: PiecewiseConstant


@dataclass(frozen=True)
class MediumSchedule:
    """Static regions on the ring [0, 2L) with time-modulated eps and mu."""

    L: float
    regions: tuple[Region, ...]

    def __post_init__(self):
        if self.L <= 0:
            raise ProtocolError("ring half-length must be positive")
        edge = 0.0
        for r in self.regions:
            if r.x_lo != edge:
                raise ProtocolError(f"regions must tile [0, 2L): gap at {edge}")
            if r.x_hi <= r.x_lo:
                raise ProtocolError("region width must be positive")
            edge = r.x_hi
        if edge != 2.0 * self.L:
            raise ProtocolError(f"regions must end at 2L = {2 * self.L}, got {edge}")

    def region_index(self, x):
        for i, r in enumerate(self.regions):
            if r.x_lo <= x < r.x_hi:
                return i
        raise ProtocolError(f"coordinate {x} outside the ring [0, {2 * self.L})")


@dataclass(frozen=True)
class CharacteristicState:
    """Envelope sample on a characteristic: position, slow amplitude, fast phase.

    The fast phase is constant along the characteristic; carrier_omega tracks
    the local carrier frequency for the adiabaticity monitor and is optional.
    """

    t: float
    x: float
    amplitude: float
    phase: float = 0.0
    carrier_omega: float | None = None


def conserved_flux(amplitude, eps, mu):
    """The transport invariant sqrt(eps/mu) * amplitude^2."""
    return math.sqrt(eps / mu) * amplitude * amplitude


def trace_characteristic(schedule, state, t_target, record=False):
    """Propagate a right-moving characteristic to t_target.

    Between events the speed is constant; at region boundaries and schedule
    switches the amplitude is rescaled so the transported flux is continuous
    and the carrier is updated (frequency fixed across space, wavevector
    fixed across time). With record=True returns (final, [states at events]).
    """
    if t_target < state.t:
        raise ValueError("characteristic tracing moves forward in time")
    ring = 2.0 * schedule.L
    t, x = state.t, state.x % ring
    amp, phase, omega = state.amplitude, state.phase, state.carrier_omega
    events = []
    while t < t_target:
        i = schedule.region_index(x)
        reg = schedule.regions[i]
        eps, mu = reg.eps.value(t), reg.mu.value(t)
        speed = 1.0 / math.sqrt(eps * mu)
        t_wall = t + (reg.x_hi - x) / speed
        switches = [s for s in (reg.eps.next_switch(t), reg.mu.next_switch(t))
                    if s is not None]
        t_switch = min(switches) if switches else math.inf
        t_next = min(t_wall, t_switch, t_target)
        if omega is not None and t_switch < math.inf:
            if 2.0 * math.pi / omega > CARRIER_PERIOD_FRACTION * (t_switch - t):
                warnings.warn(
                    "carrier period is not small against the switch spacing; "
                    "semiclassical transport is unreliable here",
                    stacklevel=2,
                )
        x = x + speed * (t_next - t)
        t = t_next
        if t_next == t_wall:
            # spatial boundary: frequency fixed, impedance step rescales A
            nxt = schedule.regions[(i + 1) % len(schedule.regions)]
            eps2, mu2 = nxt.eps.value(t), nxt.mu.value(t)
            amp *= ((eps / mu) / (eps2 / mu2)) ** 0.25
            x = nxt.x_lo
        elif t_next == t_switch:
            # temporal switch: wavevector fixed, frequency rescales with c*
            eps2, mu2 = reg.eps.value(t), reg.mu.value(t)
            amp *= ((eps / mu) / (eps2 / mu2)) ** 0.25
            if omega is not None:
                omega *= (1.0 / math.sqrt(eps2 * mu2)) / speed
        else:
            break  # reached t_target inside a quiet stretch
        if record:
            events.append(CharacteristicState(t, x % ring, amp, phase, omega))
    final = CharacteristicState(t_target, x % ring, amp, phase, omega)
    if record:
        return final, events
    return final


def medium_weak_map(L, L0, A, nu, x):
    """One-period map for a narrow region of width A modulated with depth nu.

    x' = x + 2(L0 - L) + A*nu*cos(pi*x/L0); structurally identical to the
    weak moving-mirror map after identifying the harmonic amplitude with
    A*nu/2 and shifting the drive phase by a quarter period.
    """
    x = np.asarray(x, dtype=float)
    out = x + 2.0 * (L0 - L) + A * nu * np.cos(np.pi * x / L0)
    return float(out) if out.ndim == 0 else out
