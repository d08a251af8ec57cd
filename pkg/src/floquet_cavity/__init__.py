"""Stroboscopic dynamics of massless waves in periodically modulated 1D cavities.

A cavity with one moving mirror (or a modulated internal medium) is unfolded
into a one-way ring; null lines are propagated exactly between events, and
the one- or multi-period stroboscopic map built from them drives everything
else: fixed points and their stability, classical field and energy
evolution, vacuum (Casimir) energy densities, and discrete time-reversal
protocols.
"""

from .analytics import (
    SweepEstimates,
    WeakDriveParams,
    casimir_density,
    casimir_density_generic,
    casimir_energy,
    classical_energy_weak,
    doppler_exponent,
    scaled,
    sweep_estimates,
    weak_forward_x,
    weak_frame_shift,
    weak_g_prime,
    weak_inverse_g,
    weak_map_step,
)
from .drive import (
    Constant,
    DriveProtocol,
    Harmonic,
    Reflected,
    Segment,
    ValidationReport,
    constant_protocol,
    make_harmonic,
    piecewise,
    time_reverse,
)
from .errors import (
    CavityError,
    ConfigError,
    FieldError,
    HorizonError,
    MonotonicityError,
    ProtocolError,
    SpliceError,
)
from .field import EnergyReport, FieldState, energy_density, evolve, init_field, total_energy
from .floquet import (
    CircleMap,
    FixedPoint,
    FixedPointSet,
    find_fixed_points,
    inverse,
    iterate,
    light_cones,
    map_once,
    moore_R,
    moore_R_prime,
    tabulate,
)
from .medium import (
    CharacteristicState,
    MediumSchedule,
    PiecewiseConstant,
    Region,
    conserved_flux,
    medium_weak_map,
    trace_characteristic,
)
from .rays import RayState, advance, next_mirror_encounter, trace, trace_csv, trace_json

__version__ = "0.1.0"
