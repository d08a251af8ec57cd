"""Closed-form weak-drive results and vacuum (Casimir) energy formulas.

Scaled variables: x_tilde = pi*x/L0 and a_tilde = pi*A/L0. The closed forms
place the q stable points of the resonant map at cos(q*x_tilde) = -1. The
exact map tabulated at t0 = 0 with phase 0 carries a frame shift relative to
that convention: pi/q for odd q, zero for even q (see weak_frame_shift);
conversions between the two frames are always explicit, never implied.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import floquet
from .drive import with_static_history

AMPLITUDE_RATIO_MAX = 0.2
AMPLITUDE_RATIO_WARN = 0.05


@dataclass(frozen=True)
class WeakDriveParams:
    """Weak harmonic resonant drive: amplitude A, resonant length L0, order q."""

    A: float
    L0: float
    q: int = 1

    def __post_init__(self):
        if self.L0 <= 0:
            raise ValueError(f"resonant length must be positive, got {self.L0}")
        if self.q < 1 or int(self.q) != self.q:
            raise ValueError(f"resonance order must be a positive integer, got {self.q}")
        ratio = abs(self.A) / self.L0
        if ratio > AMPLITUDE_RATIO_MAX:
            raise ValueError(
                f"A/L0 = {ratio:.3g} too large for the weak-drive expansion "
                f"(limit {AMPLITUDE_RATIO_MAX})"
            )
        if ratio > AMPLITUDE_RATIO_WARN:
            warnings.warn(
                f"A/L0 = {ratio:.3g} stretches the weak-drive expansion",
                stacklevel=2,
            )

    @property
    def a_tilde(self):
        return math.pi * self.A / self.L0

    @property
    def omega(self):
        return self.q * math.pi / self.L0

    @property
    def T_map(self):
        """Sampling period: one fundamental round trip, q drive periods."""
        return 2.0 * self.L0


def scaled(x, params):
    """x_tilde = pi*x/L0."""
    return np.pi * np.asarray(x, dtype=float) / params.L0


def weak_frame_shift(q):
    """Offset x_tilde(closed form) - x_tilde(exact map at t0=0, phi=0)."""
    return math.pi / q if q % 2 == 1 else 0.0


def weak_map_step(params, t0, x):
    """One-period map to leading order: x' = 2L0 - 2 z(t0 + (L0 - x)/c) + x.

    Uses the resonant harmonic drive z(t) = L0 + A sin(omega*t) with
    omega = q*pi/L0.
    """
    x = np.asarray(x, dtype=float)
    z = params.L0 + params.A * np.sin(params.omega * (t0 + params.L0 - x))
    out = 2.0 * params.L0 - 2.0 * z + x
    return float(out) if out.ndim == 0 else out


def _branched_arctan(factor, xt, q):
    """(2/q) [arctan(factor * tan(q xt/2)) + m pi] on the branch holding xt.

    Continuing across the tan poles (m = nearest integer to q xt / (2 pi))
    turns the principal-branch formula into a global circle-map lift; the
    poles themselves are the stable points and map to themselves.
    """
    theta = 0.5 * q * np.asarray(xt, dtype=float)
    m = np.floor(theta / math.pi + 0.5)
    rest = theta - m * math.pi  # in [-pi/2, pi/2)
    at_pole = np.isclose(np.abs(rest), 0.5 * math.pi)
    with np.errstate(over="ignore"):
        core = np.arctan(factor * np.tan(rest))
    core = np.where(at_pole, np.sign(rest) * 0.5 * math.pi, core)
    return (2.0 / q) * (core + m * math.pi)


def weak_forward_x(xt0, n, params):
    """Scaled coordinate after n sampling periods (forward closed form)."""
    q = params.q
    out = _branched_arctan(math.exp(2.0 * q * params.a_tilde * n), xt0, q)
    return float(out) if np.asarray(out).ndim == 0 else out


def weak_inverse_g(xt_n, n, params):
    """Backward closed form: the scaled source coordinate n periods earlier.

    g(x_tilde) = (2/q) arctan(exp(-2 q a_tilde n) tan(q x_tilde / 2)) with
    branch continuation; inverse of weak_forward_x.
    """
    q = params.q
    out = _branched_arctan(math.exp(-2.0 * q * params.a_tilde * n), xt_n, q)
    return float(out) if np.asarray(out).ndim == 0 else out


def weak_g_prime(xt_n, n, params):
    """d(weak_inverse_g)/dx_tilde = 1/[cosh(2qa~n) + sinh(2qa~n) cos(q x~)]."""
    arg = 2.0 * params.q * params.a_tilde * n
    out = 1.0 / (np.cosh(arg) + np.sinh(arg) * np.cos(params.q * np.asarray(xt_n, dtype=float)))
    return float(out) if np.asarray(out).ndim == 0 else out


def classical_energy_weak(E0, n, params):
    """Total classical energy after n sampling periods, uniform initial density.

    E_n = E0 cosh(2 q a_tilde n); q*n counts true drive periods.
    """
    return E0 * math.cosh(2.0 * params.q * params.a_tilde * n)


def casimir_density(x, t, params, L=None):
    """Vacuum energy density on the ring for a weak drive at resonance order q.

    T00 = -pi q^2/(48 L^2) + pi (q^2-1)/(48 L^2) g'^2 with g' evaluated at
    n = c t/(2L) elapsed round trips. For q = 1 this is the constant static
    value -pi/(48 L^2) at all times. Integrating over the ring [-L, L]
    reproduces casimir_energy exactly.
    """
    L = params.L0 if L is None else L
    q = params.q
    n = t / (2.0 * L)
    xt = np.pi * np.asarray(x, dtype=float) / L
    arg = 2.0 * q * (math.pi * params.A / L) * n
    gp = 1.0 / (np.cosh(arg) + np.sinh(arg) * np.cos(q * xt))
    out = -math.pi * q * q / (48.0 * L * L) \
        + math.pi * (q * q - 1.0) / (48.0 * L * L) * gp * gp
    return float(out) if np.asarray(out).ndim == 0 else out


def casimir_energy(t, params, L=None):
    """Ring-integrated vacuum energy: -pi q^2/(24L) + pi(q^2-1)/(24L) cosh(pi q A c t / L^2).

    Starts at the static value -pi/(24L) for every q and is constant in time
    for q = 1.
    """
    L = params.L0 if L is None else L
    q = params.q
    return (-math.pi * q * q / (24.0 * L)
            + math.pi * (q * q - 1.0) / (24.0 * L)
            * math.cosh(math.pi * q * params.A * t / (L * L)))


DEFAULT_GENERIC_STEP_FRACTION = 2.0 ** -14
_DIGITS_LOST_WARN = 6.0


def casimir_density_generic(protocol, x, t, t_ref=0.0, h=None):
    """Vacuum energy density for any validated periodic protocol.

    Evaluates -(1/24pi)[R'''/R' - (3/2)(R''/R')^2 + (pi^2/2)(R')^2] at
    u = t - x, with R' from exact multiplier products and R'', R''' from
    five-point central differences of R' (step h, default C/2^14). The
    vacuum is the static-cavity state at t_ref, so the protocol is frozen
    at z(t_ref) for earlier times before bootstrapping R; a drive running
    for t < t_ref would put kinks into R' at the images of the seed
    interval and poison the differenced derivatives. Warns when the
    differenced terms are estimated to lose more than 6 digits.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    u = t - x_arr
    z0, _ = protocol.evaluate(t_ref)
    protocol = with_static_history(protocol, t_ref)
    if h is None:
        h = 2.0 * z0 * DEFAULT_GENERIC_STEP_FRACTION
    stencil = np.concatenate([u - 2 * h, u - h, u, u + h, u + 2 * h])
    rp = floquet.moore_R_prime(protocol, stencil, t_ref=t_ref)
    rm2, rm1, r0, rp1, rp2 = np.split(rp, 5)
    d1 = (rm2 - 8.0 * rm1 + 8.0 * rp1 - rp2) / (12.0 * h)  # R''
    d2 = (-rm2 + 16.0 * rm1 - 30.0 * r0 + 16.0 * rp1 - rp2) / (h * h * 12.0)  # R'''
    out = -(1.0 / (24.0 * math.pi)) * (
        d2 / r0 - 1.5 * (d1 / r0) ** 2 + 0.5 * math.pi ** 2 * r0 ** 2
    )
    # Roundoff of R' is amplified by ~64/(12 h^2) in the R''' stencil; warn
    # when that noise, pushed through to T00, costs more than 6 of its digits.
    noise = 1e-15 * float(np.max(np.abs(rp)))
    noise_t00 = (64.0 * noise / (12.0 * h * h)) / float(np.min(np.abs(r0))) / (24.0 * math.pi)
    t00_scale = float(np.max(np.abs(out)))
    if t00_scale > 0.0 and noise_t00 > 10.0 ** (-_DIGITS_LOST_WARN) * t00_scale:
        warnings.warn(
            f"differenced R derivatives dominate T00 at the "
            f"{noise_t00 / t00_scale:.1e} relative level; consider a larger step h",
            stacklevel=2,
        )
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(out[0])
    return out


def doppler_exponent(v, t, T):
    """Accumulated Doppler factor k(t)/k0 = ((1+v)/(1-v))^(t/T).

    For |v| << 1 this is exp(2 v t / T), the accelerated-frame redshift rate.
    """
    return ((1.0 + v) / (1.0 - v)) ** (t / T)


@dataclass(frozen=True)
class SweepEstimates:
    max_compression: float
    gain_feasible: bool
    noise_compression: float


def sweep_estimates(Q, v, Q_M):
    """Practical sweeping limits for finesse Q, mirror speed v, modulation quality Q_M.

    Compression saturates at exp(2 Q v); net gain needs the pumping rate 2v
    to beat the loss rate 1/Q; modulation phase noise caps compression at
    exp(2 Q_M v).
    """
    return SweepEstimates(
        max_compression=math.exp(2.0 * Q * v),
        gain_feasible=1.0 / Q < 2.0 * v,
        noise_compression=math.exp(2.0 * Q_M * v),
    )
