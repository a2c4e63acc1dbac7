"""Monte Carlo dephasing experiments on the coupled pair.

Two setups, mirroring how a classical bit next to the observed qubit
destroys its phase:

* transmission: the environment qubit is flipped up at a fixed time and
  back down after a random delay drawn uniformly from one full coupling
  period.  Averaged over trials the transverse amplitude vanishes unless
  a bang-bang pulse train refocuses the conditional phase.
* memory: the environment qubit is toggled at noisy regular intervals.
  The ensemble-average amplitude decays exponentially; closed forms for
  the per-cycle retention and the resulting dephasing time are provided
  for comparison.

Trials are statistically independent, each driven by its own RNG stream
derived from (seed, trial index), so results are reproducible bit for bit
and independent of execution order.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .pulse import (
    CouplingSystem,
    PulseEvent,
    PulseSchedule,
    cyclic_axes,
    simulate_amplitudes,
)

# Points at or below this magnitude are ignored by the exponential fit;
# they are dominated by Monte Carlo noise.
FIT_FLOOR = 0.02
# Consecutive rejected interval draws before the run is abandoned.
MAX_INTERVAL_REJECTIONS = 100

PI = math.pi


class SimulationError(RuntimeError):
    """A Monte Carlo run could not be completed."""


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransmissionConfig:
    """One-shot noise-window experiment.

    The environment qubit flips up at ``noise_start`` and back down a
    uniform random delay (one coupling period at most) later.  With
    ``bang_bang`` a train of pi pulses runs on the observed qubit from
    ``noise_start`` at ``pulse_spacing`` intervals; ``random_train_phase``
    shifts the whole train by a per-trial uniform offset inside one
    spacing, which is the regime where the squared retention factor
    applies.
    """

    j: float                 # coupling, rad/s
    total_time: float        # s
    noise_start: float       # s
    trials: int
    seed: int
    bang_bang: bool = False
    pulse_spacing: float | None = None
    pulses_per_trial: int | None = None
    random_train_phase: bool = False
    group_size: int = 16
    remove_trivial_phase: bool = True

    def __post_init__(self):
        if not self.j > 0:
            raise ValueError("coupling j must be positive")
        if not 0 < self.noise_start < self.total_time:
            raise ValueError("need 0 < noise_start < total_time")
        if self.noise_start + 2 * PI / self.j > self.total_time + 1e-12:
            raise ValueError("noise window (one coupling period) must fit before total_time")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.group_size < 1:
            raise ValueError("group_size must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.bang_bang:
            if self.pulse_spacing is None or not self.pulse_spacing > 0:
                raise ValueError("bang_bang requires a positive pulse_spacing")
            if self.j * self.pulse_spacing >= 1.0:
                raise ValueError("pulse train too sparse: need j * pulse_spacing < 1")
            n = self.pulse_count()
            if self.noise_start + n * self.pulse_spacing > self.total_time + 1e-12:
                raise ValueError(
                    f"train of {n} pulses does not fit between noise_start and total_time"
                )
        elif self.pulses_per_trial is not None:
            raise ValueError("pulses_per_trial only applies with bang_bang")

    def pulse_count(self) -> int:
        """Length of the pi-pulse train.

        Defaults to enough pulses to span the worst-case noise window,
        rounded up to a whole number of eight-pulse axis cycles.
        """
        if self.pulses_per_trial is not None:
            if self.pulses_per_trial < 1:
                raise ValueError("pulses_per_trial must be at least 1")
            return self.pulses_per_trial
        assert self.pulse_spacing is not None
        needed = math.ceil((2 * PI / self.j + self.pulse_spacing) / self.pulse_spacing - 1e-12)
        return ((needed + 7) // 8) * 8


@dataclass(frozen=True)
class MemoryConfig:
    """Repeated-toggling experiment with noisy intervals.

    The environment qubit flips every ``mean_interval * (1 + spread * xi)``
    seconds with standard normal ``xi``.  Observation times must be
    multiples of twice the mean interval (whole toggle cycles).  Without
    ``bang_bang`` each observation is taken after the corresponding number
    of flips; with it, a regular pi-pulse train runs on the observed qubit
    and observations happen at the wall-clock times themselves.
    """

    j: float
    mean_interval: float
    interval_spread: float   # relative std dev of the intervals
    observation_times: tuple[float, ...]
    trials: int
    seed: int
    bang_bang: bool = False
    pulse_spacing: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "observation_times", tuple(float(t) for t in self.observation_times))
        if not self.j > 0:
            raise ValueError("coupling j must be positive")
        if not self.mean_interval > 0:
            raise ValueError("mean_interval must be positive")
        if not 0.0 <= self.interval_spread <= 0.25:
            raise ValueError("interval_spread must lie in [0, 0.25]")
        if len(self.observation_times) == 0:
            raise ValueError("need at least one observation time")
        cycle = 2.0 * self.mean_interval
        prev = 0.0
        for t in self.observation_times:
            if t <= prev:
                raise ValueError("observation times must be positive and strictly increasing")
            n = t / cycle
            if abs(n - round(n)) > 1e-9 * max(n, 1.0):
                raise ValueError(
                    f"observation time {t:.12g} is not a multiple of one toggle cycle {cycle:.12g}"
                )
            prev = t
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.bang_bang:
            if self.pulse_spacing is None or not self.pulse_spacing > 0:
                raise ValueError("bang_bang requires a positive pulse_spacing")
            if self.pulse_spacing >= self.interval_spread * self.mean_interval:
                warnings.warn(
                    "pulse_spacing is not small against the interval jitter; "
                    "the closed-form retention factor becomes approximate",
                    stacklevel=2,
                )
        elif self.pulse_spacing is not None:
            raise ValueError("pulse_spacing only applies with bang_bang")

    def cycle_counts(self) -> tuple[int, ...]:
        cycle = 2.0 * self.mean_interval
        return tuple(int(round(t / cycle)) for t in self.observation_times)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Per-trial transverse amplitudes and their averages at one time."""

    amplitudes: np.ndarray        # complex, one entry per trial
    group_averages: np.ndarray    # complex, means of consecutive groups
    grand_average: complex
    observation_time: float

    def __post_init__(self):
        self.amplitudes.setflags(write=False)
        self.group_averages.setflags(write=False)


@dataclass(frozen=True)
class ExponentialFit:
    """Least-squares fit of ``ln m = -t / t2 + intercept``."""

    t2: float
    intercept: float
    residual: float    # RMS of the log residuals
    n_used: int
    decaying: bool

    def magnitude(self, t) -> np.ndarray:
        """Fitted magnitude at time(s) ``t``."""
        return np.exp(self.intercept - np.asarray(t, dtype=float) / self.t2)


@dataclass(frozen=True, eq=False)
class DecayCurve:
    """Grand-average magnitude versus observation time, with its fit."""

    times: np.ndarray
    magnitudes: np.ndarray
    fit: ExponentialFit

    def __post_init__(self):
        self.times.setflags(write=False)
        self.magnitudes.setflags(write=False)


# ---------------------------------------------------------------------------
# closed-form factors
# ---------------------------------------------------------------------------

def bang_bang_retention(j: float, spacing: float) -> float:
    """Coherence kept per noise window under a randomly phased pulse train.

    Both window edges fall uniformly inside a pulse interval, each costing
    a factor ``sin(x)/x`` with ``x = j * spacing / 2``; the product is the
    squared sinc.
    """
    x = _half_step(j, spacing)
    if x == 0.0:
        return 1.0
    return float((math.sin(x) / x) ** 2)


def bang_bang_retention_fixed_start(j: float, spacing: float) -> float:
    """Retention when the train starts exactly at the window opening.

    Only the trailing window edge is random, so a single sinc factor
    survives instead of its square.
    """
    x = _half_step(j, spacing)
    if x == 0.0:
        return 1.0
    return float(math.sin(x) / x)


def _half_step(j: float, spacing: float) -> float:
    if not j > 0:
        raise ValueError("coupling j must be positive")
    if spacing < 0:
        raise ValueError("spacing must be non-negative")
    return j * spacing / 2.0


def interval_noise_retention(j: float, mean_interval: float, spread: float) -> float:
    """Coherence kept per toggle cycle with Gaussian interval noise.

    One up/down cycle leaves the Gaussian characteristic function
    ``exp(-(j * mean_interval * spread)^2 / 4)``.
    """
    if not j > 0 or not mean_interval > 0:
        raise ValueError("coupling and mean_interval must be positive")
    if spread < 0:
        raise ValueError("spread must be non-negative")
    return float(math.exp(-((j * mean_interval * spread) ** 2) / 4.0))


def dephasing_time(j: float, spread: float, mean_interval: float) -> float:
    """Exponential time constant of the interval-noise decay.

    ``magnitude(t) = retention^(t / cycle)`` collapses to
    ``exp(-t / t2)`` with ``t2 = 8 / (j^2 spread^2 mean_interval)``.
    An infinitely long constant comes back for zero spread.
    """
    if not j > 0 or not mean_interval > 0:
        raise ValueError("coupling and mean_interval must be positive")
    if spread < 0:
        raise ValueError("spread must be non-negative")
    if spread == 0.0:
        return math.inf
    return 8.0 / (j**2 * spread**2 * mean_interval)


def bang_bang_dephasing_time(j: float, spacing: float, mean_interval: float) -> float:
    """Decay constant left over when the pulse train is running.

    From ``magnitude(t) = retention^(t / cycle)``:
    ``t2 = -2 * mean_interval / ln(retention)``.  Returns infinity when the
    train is fast enough that the retention rounds to one.
    """
    if not mean_interval > 0:
        raise ValueError("mean_interval must be positive")
    if not 0 < j * spacing < 2 * PI:
        raise ValueError("need 0 < j * spacing < 2 pi")
    if j * spacing < 1e-8:
        return math.inf
    retention = bang_bang_retention(j, spacing)
    return float(-2.0 * mean_interval / math.log(retention))


def decay_contrast(decay: float, reference: float, spread: float) -> float:
    """Spread-normalised log decay ratio ``-ln(decay / reference) / spread^2``.

    Collapses curves taken at different interval spreads onto a single
    number for comparison against ``j^2 mean_interval t / 8``.
    """
    if decay <= 0 or reference <= 0:
        raise ValueError("decay factors must be positive")
    if spread <= 0:
        raise ValueError("spread must be positive")
    return float(-math.log(decay / reference) / spread**2)


def four_case_phase(case: int, eps0: float, eps1: float, spacing: float, j: float) -> float:
    """Net phase a noise window leaves on the transverse amplitude.

    A window embedded in a regular pi-pulse train cancels everything except
    its two edge offsets: ``eps0`` from window start to the first pulse
    inside, ``eps1`` from the last pulse inside to the window end.  The
    sign pattern depends only on the parity of the pulse count before the
    window (cases 1-2 even, 3-4 odd) and inside it (odd for cases 2, 4).
    The transverse amplitude is multiplied by ``exp(-1j * phase)``.
    """
    if case not in (1, 2, 3, 4):
        raise ValueError("case must be 1, 2, 3, or 4")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    for name, e in (("eps0", eps0), ("eps1", eps1)):
        if not 0.0 <= e <= spacing:
            raise ValueError(f"{name} must lie in [0, spacing]")
    if case == 1:
        return j * (eps0 + eps1 - spacing)
    if case == 2:
        return j * (eps0 - eps1)
    if case == 3:
        return j * (spacing - eps0 - eps1)
    return j * (eps1 - eps0)


# ---------------------------------------------------------------------------
# schedule builders
# ---------------------------------------------------------------------------

def transmission_schedule(config: TransmissionConfig, delta: float, train_offset: float = 0.0) -> PulseSchedule:
    """Concrete schedule for one transmission trial.

    A pi/2 pulse prepares the observed qubit along +x at t = 0; the
    environment qubit is flipped up at ``noise_start`` and back down
    ``delta`` later.  With bang-bang enabled the pi-pulse train starts at
    ``noise_start + train_offset``.
    """
    if not 0.0 <= delta <= 2 * PI / config.j:
        raise ValueError("delta must lie within one coupling period")
    events = [
        PulseEvent(0.0, 1, "y", PI / 2),
        PulseEvent(config.noise_start, 2, "x", PI),
        PulseEvent(config.noise_start + delta, 2, "x", PI),
    ]
    if config.bang_bang:
        spacing = config.pulse_spacing
        assert spacing is not None
        if not 0.0 <= train_offset < spacing:
            raise ValueError("train_offset must lie in [0, pulse_spacing)")
        start = config.noise_start + train_offset
        for k, axis in enumerate(cyclic_axes(config.pulse_count())):
            events.append(PulseEvent(start + k * spacing, 1, axis, PI))
    elif train_offset != 0.0:
        raise ValueError("train_offset only applies with bang_bang")
    events.sort(key=lambda ev: ev.time)
    return PulseSchedule(CouplingSystem(config.j), tuple(events), config.total_time)


def memory_trial_schedule(config: MemoryConfig, intervals: np.ndarray) -> tuple[PulseSchedule, np.ndarray]:
    """Schedule and snapshot times for one memory trial.

    ``intervals`` are the per-trial toggle intervals.  Returns the schedule
    and the snapshot times: flip times ``t_{2n}`` without bang-bang, the
    configured wall-clock times with it.
    """
    flip_times = np.cumsum(intervals)
    horizon = max(config.observation_times)
    events = [PulseEvent(0.0, 1, "y", PI / 2)]
    if config.bang_bang:
        spacing = config.pulse_spacing
        assert spacing is not None
        kept = flip_times[flip_times <= horizon]
        for t, axis in zip(kept, cyclic_axes(len(kept))):
            events.append(PulseEvent(float(t), 2, axis, PI))
        n_train = int(horizon / spacing + 1e-9)
        for k, axis in enumerate(cyclic_axes(n_train)):
            events.append(PulseEvent((k + 1) * spacing, 1, axis, PI))
        snapshots = np.asarray(config.observation_times, dtype=float)
        total = horizon
    else:
        for t, axis in zip(flip_times, cyclic_axes(len(flip_times))):
            events.append(PulseEvent(float(t), 2, axis, PI))
        snapshots = flip_times[np.array(config.cycle_counts()) * 2 - 1]
        total = float(flip_times[-1])
    events.sort(key=lambda ev: ev.time)
    return PulseSchedule(CouplingSystem(config.j), tuple(events), total), snapshots


# ---------------------------------------------------------------------------
# experiment drivers
# ---------------------------------------------------------------------------

def _group_averages(amps: np.ndarray, group_size: int) -> np.ndarray:
    groups = [
        amps[i : i + group_size].mean()
        for i in range(0, len(amps), group_size)
    ]
    return np.asarray(groups, dtype=complex)


def run_transmission(config: TransmissionConfig) -> EnsembleResult:
    """Monte Carlo ensemble of single noise-window trials."""
    amps = np.empty(config.trials, dtype=complex)
    period = 2 * PI / config.j
    trivial = np.exp(-0.5j * config.j * config.total_time)
    for k in range(config.trials):
        rng = np.random.default_rng((config.seed, k))
        delta = rng.uniform(0.0, period)
        offset = 0.0
        if config.bang_bang and config.random_train_phase:
            offset = rng.uniform(0.0, config.pulse_spacing)
        schedule = transmission_schedule(config, delta, offset)
        amp = simulate_amplitudes(schedule, [config.total_time])[0]
        if config.remove_trivial_phase:
            amp *= trivial
        amps[k] = amp
    return EnsembleResult(
        amplitudes=amps,
        group_averages=_group_averages(amps, config.group_size),
        grand_average=complex(amps.mean()),
        observation_time=config.total_time,
    )


def _draw_interval(rng, mean: float, spread: float) -> float:
    rejected = 0
    while True:
        value = mean * (1.0 + spread * rng.standard_normal())
        if value > 0.0:
            return value
        rejected += 1
        if rejected >= MAX_INTERVAL_REJECTIONS:
            raise SimulationError(
                f"{MAX_INTERVAL_REJECTIONS} consecutive non-positive intervals; "
                "interval distribution is unusable"
            )


def _memory_intervals(rng, config: MemoryConfig) -> np.ndarray:
    if config.bang_bang:
        horizon = max(config.observation_times)
        out = []
        total = 0.0
        while total <= horizon:
            iv = _draw_interval(rng, config.mean_interval, config.interval_spread)
            out.append(iv)
            total += iv
        return np.asarray(out)
    n_flips = 2 * max(config.cycle_counts())
    return np.asarray([
        _draw_interval(rng, config.mean_interval, config.interval_spread)
        for _ in range(n_flips)
    ])


def run_memory(config: MemoryConfig) -> DecayCurve:
    """Ensemble decay curve of the repeated-toggling experiment."""
    n_times = len(config.observation_times)
    acc = np.zeros(n_times, dtype=complex)
    for k in range(config.trials):
        rng = np.random.default_rng((config.seed, k))
        intervals = _memory_intervals(rng, config)
        schedule, snapshots = memory_trial_schedule(config, intervals)
        acc += simulate_amplitudes(schedule, snapshots)
    magnitudes = np.abs(acc / config.trials)
    times = np.asarray(config.observation_times, dtype=float)
    fit = fit_exponential(times, magnitudes)
    return DecayCurve(times=times, magnitudes=magnitudes, fit=fit)


def fit_exponential(times, magnitudes, floor: float = FIT_FLOOR) -> ExponentialFit:
    """Fit ``ln m = -t / t2 + c`` by linear least squares.

    Points at or below ``floor`` are excluded.  A non-negative slope, or
    one whose total log-drop over the fitted window is below numerical
    noise, is reported as ``decaying=False`` with an infinite time
    constant rather than a nonsense near-zero or negative one.
    """
    times = np.asarray(times, dtype=float)
    magnitudes = np.asarray(magnitudes, dtype=float)
    if times.shape != magnitudes.shape:
        raise ValueError("times and magnitudes must have matching shapes")
    keep = magnitudes > floor
    if keep.sum() < 3:
        raise ValueError(f"need at least 3 points above floor={floor}, have {int(keep.sum())}")
    t = times[keep]
    y = np.log(magnitudes[keep])
    design = np.stack([t, np.ones_like(t)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ [slope, intercept] - y) ** 2)))
    # flat within roundoff: a log-drop under 1e-12 across the window is noise
    if slope * (t.max() - t.min()) > -1e-12:
        return ExponentialFit(math.inf, float(intercept), residual, int(keep.sum()), False)
    return ExponentialFit(float(-1.0 / slope), float(intercept), residual, int(keep.sum()), True)
