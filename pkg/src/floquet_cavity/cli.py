"""Command-line surface: config-driven runs with CSV/JSON artifacts.

Every run writes its tables plus a summary JSON (input echo, key scalars,
wall time). Outputs are deterministic for a given config; files are written
atomically (temp file then rename). Exit codes: 0 success, 2 config error,
3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import analytics, drive, field, floquet, medium as medium_mod
from .config import parse_config
from .errors import CavityError, ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float) and math.isnan(v):
        return ""
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _atomic_write(path, text):
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_table(path, columns, rows, meta, fmt):
    if fmt == "json":
        doc = {"meta": meta, "columns": list(columns),
               "rows": [[(None if (isinstance(v, float) and math.isnan(v)) else
                          (float(v) if isinstance(v, (float, np.floating)) else
                           (int(v) if isinstance(v, (int, np.integer)) else v)))
                         for v in row] for row in rows]}
        _atomic_write(path, json.dumps(doc, indent=1, sort_keys=True) + "\n")
        return
    lines = [f"# {line}" for line in json.dumps(meta, sort_keys=True).splitlines()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _init_callable(spec, z0):
    kind = spec["kind"]
    amp = float(spec.get("amplitude", 1.0))
    if kind == "sine":
        m = int(spec.get("m", 1))
        return lambda x: amp * np.sin(m * np.pi * x / z0), ()
    if kind == "sawtooth":
        return lambda x: amp * x, (0.0,)
    center = float(spec["center"])
    width = float(spec["width"])
    lo, hi = center - 0.5 * width, center + 0.5 * width

    def bump(x):
        return np.where((x >= lo) & (x < hi), amp, 0.0)

    return bump, (lo, hi)


def _run_command(cfg):
    """Execute a validated config; returns (tables, scalars).

    tables: list of (name, columns, rows). scalars: JSON-ready dict.
    """
    p = cfg.params
    prot = cfg.protocol
    if cfg.command == "map":
        cm = floquet.tabulate(prot, p["t0"], q=p["q"], n=p["samples"])
        rows = list(zip(cm.x, cm.F, cm.multiplier))
        return [("map", ("x", "F", "multiplier"), rows)], {
            "C": cm.C, "T_map": cm.T_map}
    if cfg.command == "iterate":
        starts = p["starts"]
        z0, _ = prot.evaluate(p["t0"])
        if isinstance(starts, int):
            x0 = -z0 + 2.0 * z0 * np.arange(starts) / starts
        elif isinstance(starts, dict):
            rng = np.random.default_rng(cfg.seed)
            x0 = rng.uniform(-z0, z0, starts["random"])
        else:
            x0 = np.asarray(starts, dtype=float)
        orbit = floquet.iterate(prot, p["t0"], x0, p["n"], q=p["q"])
        rows = [(i, k, orbit[k, i]) for i in range(x0.size) for k in range(p["n"] + 1)]
        return [("iterate", ("start", "step", "x"), rows)], {
            "n_starts": int(x0.size)}
    if cfg.command == "fixed-points":
        cm = floquet.tabulate(prot, p["t0"], q=p["q"], n=p["samples"])
        fps = floquet.find_fixed_points(cm)
        rows = [(pt.x, pt.multiplier, pt.stability) for pt in fps.points]
        return [("fixed_points", ("x", "multiplier", "stability"), rows)], {
            "count": len(fps), "stable": len(fps.stable),
            "unstable": len(fps.unstable), "tangent": len(fps.tangent)}
    if cfg.command == "scan":
        seg = prot.segments[0]
        if len(prot.segments) != 1 or not hasattr(seg.law, "omega"):
            raise ConfigError("scan needs a single harmonic-segment protocol", "protocol")
        law = seg.law
        rows = []
        counts = []
        for L in np.linspace(p["L_min"], p["L_max"], p["count"]):
            pr = drive.make_harmonic(float(L), law.A, law.omega, law.phi)
            fps = floquet.find_fixed_points(
                floquet.tabulate(pr, p["t0"], q=p["q"], n=p["samples"]))
            counts.append(len(fps))
            if fps.points:
                rows.extend((L, len(fps), pt.x, pt.multiplier, pt.stability)
                            for pt in fps.points)
            else:
                rows.append((L, 0, math.nan, math.nan, ""))
        return [("scan", ("L", "n_fixed", "x", "multiplier", "stability"), rows)], {
            "L_min": p["L_min"], "L_max": p["L_max"], "counts": counts}
    if cfg.command == "evolve":
        z0, _ = prot.evaluate(0.0)
        init, marks = _init_callable(p["init"], float(z0))
        f0 = field.init_field(prot, init, 0.0, n=p["samples"],
                              interpolation=p["interpolation"],
                              discontinuities=marks)
        ft = field.evolve(prot, f0, p["t"])
        rows = list(zip(ft.grid, ft.values))
        return [("field", ("x", "A"), rows)], {"t": p["t"]}
    if cfg.command == "energy":
        z0, _ = prot.evaluate(p["t0"])
        init, marks = _init_callable(p["init"], float(z0))
        f0 = field.init_field(prot, init, p["t0"], n=p["samples"],
                              discontinuities=marks)
        T = prot.period_at(p["t0"]) * p["q"]
        totals = []
        last = None
        for n in p["periods"]:
            t = p["t0"] + n * T
            rep = field.energy_density(prot, f0, t)
            totals.append([int(n), t, rep.total])
            last = rep
        rows = list(zip(last.grid, last.density))
        return [("density", ("x", "T00"), rows)], {
            "totals": totals, "E0": field.total_energy(prot, f0, p["t0"])}
    if cfg.command == "casimir":
        params = analytics.WeakDriveParams(p["A"], p["L"], p["q"])
        L = p["L"]
        t = p["n"] * 2.0 * L
        m = p["samples"]
        x = -L + 2.0 * L * (np.arange(m) + 0.5) / m
        if p["method"] == "weak":
            dens = analytics.casimir_density(x, t, params)
        else:
            pr = prot
            if pr is None:
                pr = drive.make_harmonic(L, p["A"], p["q"] * math.pi / L)
            dens = analytics.casimir_density_generic(pr, x, t)
        rows = list(zip(x, dens))
        return [("casimir", ("x", "T00"), rows)], {
            "energy_closed_form": analytics.casimir_energy(t, params),
            "q": p["q"], "A": p["A"], "L": L, "n": p["n"]}
    if cfg.command == "time-reverse":
        T = prot.period_at(p["t0"]) * p["q"]
        n_c = p["n_compress"]
        spliced = drive.time_reverse(prot, p["t0"] + n_c * T, q=p["q"])
        z0, _ = spliced.evaluate(p["t0"])
        rays_spec = p["rays"]
        if isinstance(rays_spec, int):
            x0 = -z0 + 2.0 * z0 * np.arange(rays_spec) / rays_spec
        else:
            x0 = np.asarray(rays_spec, dtype=float)
        orbit = floquet.iterate(spliced, p["t0"], x0, 2 * n_c, q=p["q"])
        rows = [(i, k, p["t0"] + k * T, orbit[k, i])
                for i in range(x0.size) for k in range(2 * n_c + 1)]
        d = orbit[-1] - orbit[0]
        C = 2.0 * float(z0)
        ring_err = np.abs(d - C * np.round(d / C))
        return [("time_reverse", ("ray", "step", "t", "x"), rows)], {
            "max_return_error": float(np.max(ring_err)), "t_star": p["t0"] + n_c * T}
    if cfg.command == "lightcones":
        cm = floquet.tabulate(prot, p["t0"], q=p["q"], n=p["samples"])
        lc = floquet.light_cones(cm, p["grid"])
        return [("lightcones", ("x", "v_strobe"), lc.tolist())], {
            "zero_crossings": int(np.sum(np.abs(np.diff(np.sign(lc[:, 1]))) > 0))}
    if cfg.command == "medium":
        rows = []
        for i, r in enumerate(p["rays"]):
            state = medium_mod.CharacteristicState(
                t=r["t"], x=r["x"], amplitude=r["amplitude"], phase=r["phase"],
                carrier_omega=r["carrier_omega"])
            final, events = medium_mod.trace_characteristic(
                cfg.schedule, state, p["t_end"], record=True)
            for j, e in enumerate([*events, final]):
                rows.append((i, j, e.t, e.x, e.amplitude, e.phase))
        return [("medium", ("ray", "event", "t", "x", "amplitude", "phase"), rows)], {
            "t_end": p["t_end"], "n_rays": len(p["rays"])}
    if cfg.command == "sweep-estimate":
        est = analytics.sweep_estimates(p["Q"], p["v"], p["Q_M"])
        return [], {"max_compression": est.max_compression,
                    "gain_feasible": est.gain_feasible,
                    "noise_compression": est.noise_compression}
    raise ConfigError(f"unhandled command {cfg.command!r}", "command")


def run(cfg, out_dir, fmt="csv"):
    """Execute a RunConfig, writing artifacts into out_dir.

    Returns the summary dict (also written as <prefix>_summary.json).
    """
    started = time.perf_counter()
    tables, scalars = _run_command(cfg)
    prefix = cfg.prefix or cfg.command.replace("-", "_")
    os.makedirs(out_dir, exist_ok=True)
    meta = {"command": cfg.command, "config": cfg.echo}
    outputs = []
    ext = "json" if fmt == "json" else "csv"
    for name, columns, rows in tables:
        fname = f"{prefix}_{name}.{ext}" if name != prefix else f"{prefix}.{ext}"
        path = os.path.join(out_dir, fname)
        _write_table(path, columns, rows, meta, fmt)
        outputs.append(fname)
    summary = {
        "command": cfg.command,
        "config": cfg.echo,
        "outputs": outputs,
        "scalars": scalars,
        "wall_time_s": time.perf_counter() - started,
    }
    _atomic_write(os.path.join(out_dir, f"{prefix}_summary.json"),
                  json.dumps(summary, indent=1, sort_keys=True) + "\n")
    return summary


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="floquet-cavity",
        description="Stroboscopic-map simulations of periodically modulated 1D cavities",
    )
    ap.add_argument("--config", required=True, help="path to a JSON run configuration")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--threads", type=int, default=1,
                    help="reserved; kernels are vectorized single-thread")
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    args = ap.parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        print(f"error: cannot read config: {e}", file=sys.stderr)
        return EXIT_IO
    try:
        cfg = parse_config(text)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = run(cfg, args.out, fmt=args.format)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CavityError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO
    for key, value in sorted(summary["scalars"].items()):
        if isinstance(value, (int, float, bool, str)):
            print(f"{key}: {value}")
    print(f"wrote {len(summary['outputs']) + 1} file(s) to {args.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
