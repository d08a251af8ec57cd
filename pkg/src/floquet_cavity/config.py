"""Run-configuration schema: strict parsing with path-qualified errors.

Configs are JSON objects; unknown keys are rejected anywhere in the tree so
that typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import drive, medium
from .errors import ConfigError

COMMANDS = (
    "map", "iterate", "fixed-points", "scan", "evolve", "energy", "casimir",
    "time-reverse", "lightcones", "medium", "sweep-estimate",
)

_NO_PROTOCOL = {"sweep-estimate", "medium"}


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _check_keys(obj, path, allowed):
    if not isinstance(obj, dict):
        raise ConfigError(f"expected an object, got {type(obj).__name__}", path)
    for k in obj:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r}", f"{path}.{k}" if path else k)


def _get_number(obj, key, path, default=None, required=False):
    if key not in obj:
        if required:
            raise ConfigError("missing required number", f"{path}.{key}")
        return default
    v = obj[key]
    if not _is_number(v):
        raise ConfigError(f"expected a number, got {v!r}", f"{path}.{key}")
    return float(v)


def _get_int(obj, key, path, default=None, required=False, minimum=None):
    if key not in obj:
        if required:
            raise ConfigError("missing required integer", f"{path}.{key}")
        return default
    v = obj[key]
    if not _is_int(v):
        raise ConfigError(f"expected an integer, got {v!r}", f"{path}.{key}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"must be >= {minimum}, got {v}", f"{path}.{key}")
    return v


def _get_str(obj, key, path, default=None, required=False, choices=None):
    if key not in obj:
        if required:
            raise ConfigError("missing required string", f"{path}.{key}")
        return default
    v = obj[key]
    if not isinstance(v, str):
        raise ConfigError(f"expected a string, got {v!r}", f"{path}.{key}")
    if choices is not None and v not in choices:
        raise ConfigError(f"must be one of {sorted(choices)}, got {v!r}", f"{path}.{key}")
    return v


def _build_protocol(spec, path):
    _check_keys(spec, path, {"segments", "time_reverse", "start"})
    segs = spec.get("segments")
    if not isinstance(segs, list) or not segs:
        raise ConfigError("need a non-empty list of segments", f"{path}.segments")
    t_start = _get_number(spec, "start", path, default=0.0)
    parts = []
    unbounded_single = False
    for i, s in enumerate(segs):
        sp = f"{path}.segments[{i}]"
        _check_keys(s, sp, {"kind", "L", "A", "omega", "phi", "duration"})
        kind = _get_str(s, "kind", sp, required=True, choices={"harmonic", "constant"})
        if kind == "harmonic":
            law = drive.Harmonic(
                L=_get_number(s, "L", sp, required=True),
                A=_get_number(s, "A", sp, required=True),
                omega=_get_number(s, "omega", sp, required=True),
                phi=_get_number(s, "phi", sp, default=0.0),
            )
        else:
            for bad in ("A", "omega", "phi"):
                if bad in s:
                    raise ConfigError("not a constant-law field", f"{sp}.{bad}")
            law = drive.Constant(L=_get_number(s, "L", sp, required=True))
        duration = s.get("duration")
        if duration is None:
            if i != len(segs) - 1:
                raise ConfigError("only the last segment may omit duration", f"{sp}.duration")
            if i == 0:
                unbounded_single = True
            duration = math.inf
        elif not _is_number(duration) or duration <= 0:
            raise ConfigError(f"duration must be a positive number, got {duration!r}",
                              f"{sp}.duration")
        parts.append((law, float(duration)))
    if unbounded_single and "start" not in spec:
        protocol = drive.DriveProtocol(
            (drive.Segment(-math.inf, math.inf, parts[0][0]),))
    else:
        protocol = drive.piecewise(parts, t_start=t_start)
    tr = spec.get("time_reverse")
    if tr is not None:
        tp = f"{path}.time_reverse"
        _check_keys(tr, tp, {"at", "q"})
        protocol = drive.time_reverse(
            protocol,
            _get_number(tr, "at", tp, required=True),
            _get_int(tr, "q", tp, default=1, minimum=1),
        )
    return protocol


def _build_schedule(spec, path):
    _check_keys(spec, path, {"L", "regions"})
    L = _get_number(spec, "L", path, required=True)
    regions = spec.get("regions")
    if not isinstance(regions, list) or not regions:
        raise ConfigError("need a non-empty list of regions", f"{path}.regions")
    built = []
    for i, r in enumerate(regions):
        rp = f"{path}.regions[{i}]"
        _check_keys(r, rp, {"x_lo", "x_hi", "eps", "mu"})
        laws = {}
        for name in ("eps", "mu"):
            lspec = r.get(name, {"times": [0.0], "values": [1.0]})
            lp = f"{rp}.{name}"
            _check_keys(lspec, lp, {"times", "values", "period"})
            times = lspec.get("times")
            values = lspec.get("values")
            if not isinstance(times, list) or not isinstance(values, list):
                raise ConfigError("times and values must be lists", lp)
            if not all(_is_number(v) for v in times + values):
                raise ConfigError("times and values must be numbers", lp)
            period = lspec.get("period")
            if period is not None and not _is_number(period):
                raise ConfigError("period must be a number or null", f"{lp}.period")
            laws[name] = medium.PiecewiseConstant(
                times=tuple(float(v) for v in times),
                values=tuple(float(v) for v in values),
                period=None if period is None else float(period),
            )
        built.append(medium.Region(
            x_lo=_get_number(r, "x_lo", rp, required=True),
            x_hi=_get_number(r, "x_hi", rp, required=True),
            eps=laws["eps"], mu=laws["mu"],
        ))
    return medium.MediumSchedule(L=L, regions=tuple(built))


_INIT_KINDS = {"sine", "sawtooth", "bump"}


def _check_init(spec, path):
    _check_keys(spec, path, {"kind", "m", "center", "width", "amplitude"})
    kind = _get_str(spec, "kind", path, required=True, choices=_INIT_KINDS)
    if kind == "sine":
        _get_int(spec, "m", path, default=1, minimum=1)
    if kind == "bump":
        _get_number(spec, "center", path, required=True)
        w = _get_number(spec, "width", path, required=True)
        if w <= 0:
            raise ConfigError("bump width must be positive", f"{path}.width")
    _get_number(spec, "amplitude", path, default=1.0)
    return dict(spec)


def _check_params(command, params, path):
    """Validate the per-command parameter block; returns a plain dict."""
    p = dict(params)
    if command == "map":
        _check_keys(p, path, {"t0", "q", "samples"})
        return {
            "t0": _get_number(p, "t0", path, default=0.0),
            "q": _get_int(p, "q", path, default=1, minimum=1),
            "samples": _get_int(p, "samples", path, default=512, minimum=16),
        }
    if command == "iterate":
        _check_keys(p, path, {"t0", "q", "n", "starts"})
        starts = p.get("starts", 24)
        sp = f"{path}.starts"
        if _is_int(starts):
            if starts < 1:
                raise ConfigError("need at least one start", sp)
        elif isinstance(starts, list):
            if not all(_is_number(v) for v in starts) or not starts:
                raise ConfigError("starts list must hold numbers", sp)
            starts = [float(v) for v in starts]
        elif isinstance(starts, dict):
            _check_keys(starts, sp, {"random"})
            _get_int(starts, "random", sp, required=True, minimum=1)
        else:
            raise ConfigError(f"bad starts spec {starts!r}", sp)
        return {
            "t0": _get_number(p, "t0", path, default=0.0),
            "q": _get_int(p, "q", path, default=1, minimum=1),
            "n": _get_int(p, "n", path, required=True, minimum=1),
            "starts": starts,
        }
    if command in ("fixed-points", "lightcones"):
        allowed = {"t0", "q", "samples"} | ({"grid"} if command == "lightcones" else set())
        _check_keys(p, path, allowed)
        out = {
            "t0": _get_number(p, "t0", path, default=0.0),
            "q": _get_int(p, "q", path, default=1, minimum=1),
            "samples": _get_int(p, "samples", path, default=2048, minimum=64),
        }
        if command == "lightcones":
            out["grid"] = _get_int(p, "grid", path, default=256, minimum=8)
        return out
    if command == "scan":
        _check_keys(p, path, {"t0", "q", "samples", "L_min", "L_max", "count"})
        lo = _get_number(p, "L_min", path, required=True)
        hi = _get_number(p, "L_max", path, required=True)
        if hi <= lo:
            raise ConfigError("L_max must exceed L_min", f"{path}.L_max")
        return {
            "t0": _get_number(p, "t0", path, default=0.0),
            "q": _get_int(p, "q", path, default=1, minimum=1),
            "samples": _get_int(p, "samples", path, default=2048, minimum=64),
            "L_min": lo, "L_max": hi,
            "count": _get_int(p, "count", path, required=True, minimum=2),
        }
    if command == "evolve":
        _check_keys(p, path, {"t", "samples", "interpolation", "init"})
        return {
            "t": _get_number(p, "t", path, required=True),
            "samples": _get_int(p, "samples", path, default=4096, minimum=16),
            "interpolation": _get_str(p, "interpolation", path,
                                      default="monotone-cubic",
                                      choices={"monotone-cubic", "linear"}),
            "init": _check_init(p.get("init", {"kind": "sine"}), f"{path}.init"),
        }
    if command == "energy":
        _check_keys(p, path, {"t0", "q", "periods", "samples", "init"})
        periods = p.get("periods")
        pp = f"{path}.periods"
        if _is_int(periods):
            if periods < 1:
                raise ConfigError("need at least one period", pp)
            periods = list(range(1, periods + 1))
        elif isinstance(periods, list) and periods and all(_is_int(v) and v >= 0 for v in periods):
            periods = list(periods)
        else:
            raise ConfigError("periods must be a count or a list of non-negative integers", pp)
        return {
            "t0": _get_number(p, "t0", path, default=0.0),
            "q": _get_int(p, "q", path, default=1, minimum=1),
            "periods": periods,
            "samples": _get_int(p, "samples", path, default=4096, minimum=16),
            "init": _check_init(p.get("init", {"kind": "sawtooth"}), f"{path}.init"),
        }
    if command == "casimir":
        _check_keys(p, path, {"method", "q", "A", "L", "n", "samples"})
        return {
            "method": _get_str(p, "method", path, default="weak",
                               choices={"weak", "generic"}),
            "q": _get_int(p, "q", path, default=1, minimum=1),
            "A": _get_number(p, "A", path, required=True),
            "L": _get_number(p, "L", path, default=1.0),
            "n": _get_number(p, "n", path, required=True),
            "samples": _get_int(p, "samples", path, default=512, minimum=16),
        }
    if command == "time-reverse":
        _check_keys(p, path, {"t0", "q", "n_compress", "rays"})
        rays_spec = p.get("rays", 16)
        rp = f"{path}.rays"
        if _is_int(rays_spec):
            if rays_spec < 1:
                raise ConfigError("need at least one ray", rp)
        elif isinstance(rays_spec, list):
            if not rays_spec or not all(_is_number(v) for v in rays_spec):
                raise ConfigError("rays list must hold numbers", rp)
            rays_spec = [float(v) for v in rays_spec]
        else:
            raise ConfigError(f"bad rays spec {rays_spec!r}", rp)
        return {
            "t0": _get_number(p, "t0", path, default=0.0),
            "q": _get_int(p, "q", path, default=1, minimum=1),
            "n_compress": _get_int(p, "n_compress", path, required=True, minimum=1),
            "rays": rays_spec,
        }
    if command == "medium":
        _check_keys(p, path, {"t_end", "rays"})
        rays_spec = p.get("rays")
        rp = f"{path}.rays"
        if not isinstance(rays_spec, list) or not rays_spec:
            raise ConfigError("need a non-empty list of ray objects", rp)
        rays = []
        for i, r in enumerate(rays_spec):
            rip = f"{rp}[{i}]"
            _check_keys(r, rip, {"t", "x", "amplitude", "phase", "carrier_omega"})
            rays.append({
                "t": _get_number(r, "t", rip, default=0.0),
                "x": _get_number(r, "x", rip, required=True),
                "amplitude": _get_number(r, "amplitude", rip, default=1.0),
                "phase": _get_number(r, "phase", rip, default=0.0),
                "carrier_omega": _get_number(r, "carrier_omega", rip, default=None),
            })
        return {"t_end": _get_number(p, "t_end", path, required=True), "rays": rays}
    if command == "sweep-estimate":
        _check_keys(p, path, {"Q", "v", "Q_M"})
        return {
            "Q": _get_number(p, "Q", path, required=True),
            "v": _get_number(p, "v", path, required=True),
            "Q_M": _get_number(p, "Q_M", path, required=True),
        }
    raise ConfigError(f"unhandled command {command!r}", "command")


@dataclass
class RunConfig:
    command: str
    params: dict
    protocol: object | None = None
    schedule: object | None = None
    seed: int = 0
    prefix: str | None = None
    echo: dict = field(default_factory=dict)


def parse_config(text):
    """Parse and validate a JSON run configuration.

    Raises ConfigError with a dotted path for any schema violation; the
    drive-protocol invariants (subluminal, positive length) are enforced by
    construction and surface as ConfigError too.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    _check_keys(raw, "", {"command", "protocol", "schedule", "params", "seed", "output"})
    command = _get_str(raw, "command", "", required=True, choices=set(COMMANDS))
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object", "params")
    checked = _check_params(command, params, "params")
    protocol = None
    if command not in _NO_PROTOCOL:
        needs_protocol = not (command == "casimir" and checked["method"] == "weak")
        if "protocol" not in raw:
            if needs_protocol:
                raise ConfigError(f"command {command!r} needs a protocol", "protocol")
        else:
            try:
                protocol = _build_protocol(raw["protocol"], "protocol")
            except ConfigError:
                raise
            except Exception as e:  # drive-level invariant violations
                raise ConfigError(str(e), "protocol") from None
    elif "protocol" in raw:
        raise ConfigError(f"command {command!r} takes no protocol", "protocol")
    schedule = None
    if command == "medium":
        if "schedule" not in raw:
            raise ConfigError("medium command needs a schedule", "schedule")
        try:
            schedule = _build_schedule(raw["schedule"], "schedule")
        except ConfigError:
            raise
        except Exception as e:
            raise ConfigError(str(e), "schedule") from None
    elif "schedule" in raw:
        raise ConfigError(f"command {command!r} takes no schedule", "schedule")
    seed = _get_int(raw, "seed", "", default=0)
    prefix = None
    if "output" in raw:
        _check_keys(raw["output"], "output", {"prefix"})
        prefix = _get_str(raw["output"], "prefix", "output")
    return RunConfig(command=command, params=checked, protocol=protocol,
                     schedule=schedule, seed=seed, prefix=prefix, echo=raw)
