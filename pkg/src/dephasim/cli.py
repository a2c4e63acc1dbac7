"""Command-line front end: config-driven runs with CSV outputs.

Usage::

    dephasim CONFIG.json [--seed N] [--out DIR]

The config is a single JSON document::

    {
      "experiment": "transmission" | "memory" | "channel-demo" | "verify",
      "seed": 12345,            // required for the Monte Carlo experiments
      "out_dir": "results",     // optional, default "."
      "params": { ... }         // experiment-specific, see below
    }

transmission params: j_hz, total_time, noise_start, trials, and optionally
bang_bang, pulse_spacing, pulses_per_trial, random_train_phase, group_size,
remove_trivial_phase.  memory params: j_hz, mean_interval, interval_spread
(number or list; one run and one CSV per value), observation_times (list of
seconds, or {"max_time": t} for the full grid of toggle cycles), trials,
and optionally bang_bang with pulse_spacing.  Frequencies enter as cyclic
j_hz and are converted to rad/s internally.  Times are seconds.

Pulse schedules serialise as::

    {"j_hz": ..., "total_time": ...,
     "events": [{"time": ..., "target": 1|2, "axis": "x|-x|y|-y", "angle": ...}, ...]}

Exit codes: 0 success, 1 config error, 2 runtime/simulation error.
Identical config and seed produce byte-identical outputs.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import channels, experiments, pulse
from .linalg import DEFAULT_TOL

TWO_PI = 2.0 * math.pi


class ConfigError(Exception):
    """Invalid configuration document; carries the offending location."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{message} (at {location})" if location else message)


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def load_config(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", str(path))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", str(path))
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object", str(path))
    return doc


def _require(params: dict, key: str, kind, location: str):
    if key not in params:
        raise ConfigError(f"missing required key '{key}'", location)
    value = params[key]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if kind is bool and isinstance(value, bool):
        return value
    raise ConfigError(f"'{key}' must be of type {kind.__name__}", f"{location}.{key}")


def _optional(params: dict, key: str, kind, default, location: str):
    if key not in params or params[key] is None:
        return default
    return _require(params, key, kind, location)


def _coupling(params: dict, location: str) -> float:
    j_hz = _require(params, "j_hz", float, location)
    if j_hz <= 0:
        raise ConfigError("j_hz must be positive", f"{location}.j_hz")
    return TWO_PI * j_hz


def _build_transmission(params: dict, seed: int) -> experiments.TransmissionConfig:
    loc = "params"
    try:
        return experiments.TransmissionConfig(
            j=_coupling(params, loc),
            total_time=_require(params, "total_time", float, loc),
            noise_start=_require(params, "noise_start", float, loc),
            trials=_require(params, "trials", int, loc),
            seed=seed,
            bang_bang=_optional(params, "bang_bang", bool, False, loc),
            pulse_spacing=_optional(params, "pulse_spacing", float, None, loc),
            pulses_per_trial=_optional(params, "pulses_per_trial", int, None, loc),
            random_train_phase=_optional(params, "random_train_phase", bool, False, loc),
            group_size=_optional(params, "group_size", int, 16, loc),
            remove_trivial_phase=_optional(params, "remove_trivial_phase", bool, True, loc),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), loc)


def _spread_list(params: dict, location: str) -> list[float]:
    if "interval_spread" not in params:
        raise ConfigError("missing required key 'interval_spread'", location)
    raw = params["interval_spread"]
    values = raw if isinstance(raw, list) else [raw]
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError("interval_spread entries must be numbers", f"{location}.interval_spread")
        out.append(float(v))
    if not out:
        raise ConfigError("interval_spread list is empty", f"{location}.interval_spread")
    return out


def _observation_times(params: dict, mean_interval: float, location: str) -> tuple[float, ...]:
    raw = params.get("observation_times")
    if raw is None:
        raise ConfigError("missing required key 'observation_times'", location)
    cycle = 2.0 * mean_interval
    if isinstance(raw, dict):
        if "max_time" not in raw:
            raise ConfigError("observation_times object needs 'max_time'", f"{location}.observation_times")
        max_time = float(raw["max_time"])
        n = int(max_time / cycle + 1e-9)
        if n < 1:
            raise ConfigError("max_time shorter than one toggle cycle", f"{location}.observation_times")
        return tuple(cycle * k for k in range(1, n + 1))
    if isinstance(raw, list) and raw:
        return tuple(float(t) for t in raw)
    raise ConfigError("observation_times must be a non-empty list or {'max_time': t}",
                      f"{location}.observation_times")


def _build_memory(params: dict, seed: int, spread: float) -> experiments.MemoryConfig:
    loc = "params"
    mean_interval = _require(params, "mean_interval", float, loc)
    try:
        return experiments.MemoryConfig(
            j=_coupling(params, loc),
            mean_interval=mean_interval,
            interval_spread=spread,
            observation_times=_observation_times(params, mean_interval, loc),
            trials=_require(params, "trials", int, loc),
            seed=seed,
            bang_bang=_optional(params, "bang_bang", bool, False, loc),
            pulse_spacing=_optional(params, "pulse_spacing", float, None, loc),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), loc)


# ---------------------------------------------------------------------------
# schedule serialisation
# ---------------------------------------------------------------------------

def schedule_to_dict(schedule: pulse.PulseSchedule) -> dict:
    """JSON-ready form of a schedule (see the module docstring for the schema)."""
    return {
        "j_hz": schedule.system.j / TWO_PI,
        "total_time": schedule.total_time,
        "events": [
            {"time": ev.time, "target": ev.target, "axis": ev.axis, "angle": ev.angle}
            for ev in schedule.events
        ],
    }


def schedule_from_dict(doc: dict) -> pulse.PulseSchedule:
    try:
        system = pulse.CouplingSystem(TWO_PI * float(doc["j_hz"]))
        events = tuple(
            pulse.PulseEvent(float(e["time"]), int(e["target"]), str(e["axis"]), float(e["angle"]))
            for e in doc["events"]
        )
        return pulse.PulseSchedule(system, events, float(doc["total_time"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad schedule document: {exc}", "schedule")


# ---------------------------------------------------------------------------
# outputs
# ---------------------------------------------------------------------------

def write_curve_csv(curve: experiments.DecayCurve, path) -> None:
    """Write a decay curve as CSV with columns time_s, magnitude, fit_magnitude.

    Values carry 12 significant digits.  An empty curve is an error and no
    file is created.
    """
    if len(curve.times) == 0:
        raise ValueError("refusing to write an empty decay curve")
    fit_mags = curve.fit.magnitude(curve.times)
    lines = ["time_s,magnitude,fit_magnitude"]
    for t, m, f in zip(curve.times, curve.magnitudes, fit_mags):
        lines.append(f"{_fmt(t)},{_fmt(m)},{_fmt(f)}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _write_ensemble_csv(result: experiments.EnsembleResult, path) -> None:
    lines = ["trial,amplitude_re,amplitude_im"]
    for k, a in enumerate(result.amplitudes):
        lines.append(f"{k},{_fmt(a.real)},{_fmt(a.imag)}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _write_groups_csv(result: experiments.EnsembleResult, path) -> None:
    lines = ["group,amplitude_re,amplitude_im,magnitude"]
    for k, a in enumerate(result.group_averages):
        lines.append(f"{k},{_fmt(a.real)},{_fmt(a.imag)},{_fmt(abs(a))}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _spread_suffix(spread: float) -> str:
    return f"a{round(spread * 100):03d}"


def _pct(simulated: float, predicted: float) -> str:
    if predicted == 0.0:
        return "n/a"
    return f"{100.0 * (simulated - predicted) / predicted:+.2f}%"


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------

def _run_transmission(params: dict, seed: int, out: Path) -> None:
    config = _build_transmission(params, seed)
    result = experiments.run_transmission(config)
    _write_ensemble_csv(result, out / "amplitudes.csv")
    _write_groups_csv(result, out / "group_averages.csv")

    magnitude = abs(result.grand_average)
    if not config.bang_bang:
        predicted = 0.0
        label = "complete dephasing"
    elif config.random_train_phase:
        predicted = experiments.bang_bang_retention(config.j, config.pulse_spacing)
        label = "squared-sinc retention (random train phase)"
    else:
        predicted = experiments.bang_bang_retention_fixed_start(config.j, config.pulse_spacing)
        label = "sinc retention (train locked to window start)"

    lines = [
        "transmission experiment",
        f"  j_hz = {_fmt(config.j / TWO_PI)}, trials = {config.trials}, seed = {config.seed}",
        f"  noise_start = {_fmt(config.noise_start)} s, total_time = {_fmt(config.total_time)} s",
        f"  bang_bang = {config.bang_bang}"
        + (f", pulse_spacing = {_fmt(config.pulse_spacing)} s, pulses = {config.pulse_count()}"
           if config.bang_bang else ""),
        "",
        f"  |grand average| = {_fmt(magnitude)}",
        f"  prediction ({label}) = {_fmt(predicted)}",
        f"  deviation = {_fmt(magnitude - predicted)} ({_pct(magnitude, predicted)})",
        f"  group magnitudes: min {_fmt(np.abs(result.group_averages).min())}, "
        f"max {_fmt(np.abs(result.group_averages).max())}",
    ]
    (out / "summary.txt").write_text("\n".join(lines) + "\n", newline="\n")
    print("\n".join(lines))


def _run_memory(params: dict, seed: int, out: Path) -> None:
    spreads = _spread_list(params, "params")
    header = None
    rows = []
    for spread in spreads:
        config = _build_memory(params, seed, spread)
        curve = experiments.run_memory(config)
        write_curve_csv(curve, out / f"decay_{_spread_suffix(spread)}.csv")
        if header is None:
            header = [
                "memory experiment",
                f"  j_hz = {_fmt(config.j / TWO_PI)}, mean_interval = {_fmt(config.mean_interval)} s, "
                f"trials = {config.trials}, seed = {config.seed}",
                f"  bang_bang = {config.bang_bang}"
                + (f", pulse_spacing = {_fmt(config.pulse_spacing)} s" if config.bang_bang else ""),
                "",
                "  spread   t2_sim_s      t2_pred_s     t2_dev    final_mag   final_pred  contrast",
            ]
        t_final = curve.times[-1]
        n_cycles = config.cycle_counts()[-1]
        if config.bang_bang:
            t2_pred = experiments.bang_bang_dephasing_time(
                config.j, config.pulse_spacing, config.mean_interval)
            retention = experiments.bang_bang_retention(config.j, config.pulse_spacing)
        else:
            t2_pred = experiments.dephasing_time(config.j, spread, config.mean_interval)
            retention = experiments.interval_noise_retention(config.j, config.mean_interval, spread)
        final_pred = retention**n_cycles
        t2_sim = curve.fit.t2 if curve.fit.decaying else math.inf
        contrast = (
            f"{experiments.decay_contrast(float(curve.magnitudes[-1]), 1.0, spread):9.3f}"
            if spread > 0 else "      n/a"
        )
        rows.append(
            f"  {spread:6.3f}   {t2_sim:<12.6g}  {t2_pred:<12.6g}  "
            f"{_pct(t2_sim, t2_pred) if math.isfinite(t2_pred) and math.isfinite(t2_sim) else 'n/a':>7}  "
            f"{float(curve.magnitudes[-1]):10.6f}  {final_pred:10.6f}  {contrast}"
        )
    lines = (header or []) + rows
    (out / "summary.txt").write_text("\n".join(lines) + "\n", newline="\n")
    print("\n".join(lines))


def _run_channel_demo(params: dict, out: Path) -> None:
    raw = params.get("flip_probabilities", [0.0, 0.25, 0.5, 0.75, 1.0])
    if not isinstance(raw, list) or not raw:
        raise ConfigError("flip_probabilities must be a non-empty list", "params.flip_probabilities")
    probs = [float(p) for p in raw]
    lines = ["dephasing channel constructions, map deviation from the operator form", ""]
    lines.append("  p       pure-env dilation   mixed-env dilation   unitary mixture")
    for p in probs:
        direct = channels.phase_flip(p)
        pure = _pure_dilation(p)
        mixed = _mixed_dilation(p)
        mixture = _z_mixture(p)
        lines.append(
            f"  {p:5.3f}   {_map_deviation(direct, pure):.3e}           "
            f"{_map_deviation(direct, mixed):.3e}            {_map_deviation(direct, mixture):.3e}"
        )
    lines += [
        "",
        "mean phase factor examples",
        f"  uniform full circle: {channels.mean_phase_factor(channels.UniformPhase())}",
        f"  gaussian std 0.5:    {channels.mean_phase_factor(channels.GaussianPhase(0.5)):.6f}",
        f"  two-point +/-0.7:    {channels.mean_phase_factor(channels.TwoPointPhase(0.7)):.6f}",
    ]
    (out / "report.txt").write_text("\n".join(lines) + "\n", newline="\n")
    print("\n".join(lines))


def _run_verify(params: dict, out: Path) -> int:
    omega_2 = TWO_PI * float(params.get("omega_2_hz", 500.0))
    omega_1 = omega_2 / 4.0
    j = TWO_PI * float(params.get("j_hz", 215.5))
    lab = pulse.LabFrameParams(omega_1, omega_2, j)
    h_norm = float(np.linalg.norm(pulse.lab_frame_hamiltonian(lab)))
    t = float(params.get("t", 1e-3))

    lines = ["rotating-frame check: residual of R H R† + i (dR/dt) R† minus the pure coupling", ""]
    residuals = []
    for dt in (1e-6, 5e-7, 2.5e-7, 1e-7):
        res = pulse.rotating_frame_residual(lab, t, dt)
        residuals.append(res)
        lines.append(f"  dt = {dt:.2e} s   residual = {res:.6e}")
    ratio1 = residuals[0] / residuals[1]
    ratio2 = residuals[1] / residuals[2]
    frame_ok = (
        residuals[-1] < 1e-3 * h_norm
        and 3.0 < ratio1 < 5.0
        and 3.0 < ratio2 < 5.0
    )
    lines.append(f"  quadratic shrink ratios: {ratio1:.2f}, {ratio2:.2f} (expect ~4)")
    lines.append(f"  final residual vs 1e-3 * |H| = {1e-3 * h_norm:.3e}: {'ok' if frame_ok else 'FAIL'}")

    lines.append("")
    lines.append("channel equivalence: dilations vs operator form")
    channel_ok = True
    for p in (0.0, 0.25, 0.5, 1.0):
        direct = channels.phase_flip(p)
        dev = max(_map_deviation(direct, _pure_dilation(p)), _map_deviation(direct, _mixed_dilation(p)))
        ok = dev <= 1e-12
        channel_ok = channel_ok and ok
        lines.append(f"  p = {p:4.2f}: max map deviation = {dev:.3e} {'ok' if ok else 'FAIL'}")

    passed = frame_ok and channel_ok
    lines.append("")
    lines.append("verify: " + ("all checks passed" if passed else "CHECKS FAILED"))
    (out / "report.txt").write_text("\n".join(lines) + "\n", newline="\n")
    print("\n".join(lines))
    return 0 if passed else 2


# Demo constructions shared by channel-demo and verify.

def _pure_dilation(p: float) -> channels.KrausChannel:
    from .linalg import IDENTITY, KET_0, KET_1, SIGMA_Z, tensor

    psi = math.sqrt(p) * KET_0 + math.sqrt(1.0 - p) * KET_1
    u = tensor(IDENTITY, np.outer(KET_0, KET_0)) + tensor(SIGMA_Z, np.outer(KET_1, KET_1))
    return channels.channel_from_environment(u, np.outer(psi, psi.conj()))


def _mixed_dilation(p: float) -> channels.KrausChannel:
    from .linalg import IDENTITY, SIGMA_Z, tensor

    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    minus = np.array([1.0, -1.0]) / math.sqrt(2.0)
    rho_env = p * np.outer(plus, plus) + (1.0 - p) * np.outer(minus, minus)
    u = tensor(IDENTITY, np.outer(plus, plus)) + tensor(SIGMA_Z, np.outer(minus, minus))
    return channels.channel_from_environment(u, rho_env)


def _z_mixture(p: float) -> channels.KrausChannel:
    from .linalg import IDENTITY, SIGMA_Z

    return channels.channel_from_mixing(
        channels.MixingEnsemble((IDENTITY, SIGMA_Z), (p, 1.0 - p))
    )


def _map_deviation(a: channels.KrausChannel, b: channels.KrausChannel) -> float:
    from .linalg import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z

    dev = 0.0
    for basis in (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z):
        dev = max(dev, float(np.max(np.abs(a._apply_matrix(basis) - b._apply_matrix(basis)))))
    return dev


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def run(doc: dict, seed_override: int | None = None, out_override: str | None = None) -> int:
    experiment = doc.get("experiment")
    if experiment not in ("transmission", "memory", "channel-demo", "verify"):
        raise ConfigError(
            "experiment must be one of: transmission, memory, channel-demo, verify",
            "experiment",
        )
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object", "params")

    out = Path(out_override if out_override is not None else doc.get("out_dir", "."))
    out.mkdir(parents=True, exist_ok=True)

    if experiment in ("transmission", "memory"):
        seed = seed_override if seed_override is not None else doc.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigError("a non-negative integer seed is required", "seed")
        if experiment == "transmission":
            _run_transmission(params, seed, out)
        else:
            _run_memory(params, seed, out)
        return 0
    if experiment == "channel-demo":
        _run_channel_demo(params, out)
        return 0
    return _run_verify(params, out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dephasim",
        description="Config-driven two-qubit dephasing experiments.",
    )
    parser.add_argument("config", help="path to the JSON config document")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="override the output directory")
    args = parser.parse_args(argv)

    try:
        doc = load_config(args.config)
        return run(doc, seed_override=args.seed, out_override=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (experiments.SimulationError, ValueError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
