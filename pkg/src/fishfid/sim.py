"""Synthetic field protocol: a vehicle transects over a shelter, then idles.

Each transect runs from ``-transect_half_length`` to ``+transect_half_length``
at constant speed and altitude, directly over the shelter marker. After the
overhead pass the vehicle waits ``wait_seconds`` at ``standoff_during_wait``
metres horizontal offset, and one control frame is taken.

Fish are modelled at population level: at every frame each fish's distance to
shelter is an independent draw from a Gaussian around the model response,
resampled until non-negative. Fish keep no memory between frames and
re-acclimate instantly after the wait.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import UnitMismatch
from .fit import Label, ObservationSample
from .ingest import AnnotationRecord
from .model import AbscissaKind, DisturbanceModel

DEFAULT_FRAME_RATE = 5.0


@dataclass(frozen=True)
class ProtocolConfig:
    altitude: float = 1.5
    speed: float = 0.5
    transect_half_length: float = 4.0
    wait_seconds: float = 60.0
    standoff_during_wait: float = 4.0
    n_transects: int = 10
    n_fish: int = 20
    noise_stddev: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("altitude", "speed", "transect_half_length", "wait_seconds",
                     "standoff_during_wait"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.n_transects < 1 or self.n_fish < 1:
            raise ValueError("n_transects and n_fish must be >= 1")
        if not self.noise_stddev >= 0:
            raise ValueError("noise_stddev must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def pass_time(self):
        """Seconds from transect start to the overhead pass."""
        return self.transect_half_length / self.speed

    @property
    def cycle_seconds(self):
        """Transect duration plus the wait; the spacing of transect starts."""
        return 2 * self.pass_time + self.wait_seconds

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        fields = cls.__dataclass_fields__
        return cls(**{k: v for k, v in d.items() if k in fields})


@dataclass(frozen=True)
class SimFrame:
    t: float
    robot_distance: float
    fish_distances: tuple
    label: Label
    transect: int = 0
    offset: float = 0.0


def truncated_normal(rng, mean, sd, size):
    """Normal(mean, sd) draws, resampling any negative value."""
    mean = np.broadcast_to(np.asarray(mean, dtype=float), size).copy()
    out = rng.normal(mean, sd)
    if sd > 0:
        bad = out < 0
        while bad.any():
            out[bad] = rng.normal(mean[bad], sd)
            bad = out < 0
    return out


def _require_distance_model(truth):
    if truth.abscissa_kind != AbscissaKind.ROBOT_DISTANCE:
        raise UnitMismatch("simulation needs a RobotDistance model")


def simulate(truth: DisturbanceModel, config: ProtocolConfig,
             frame_rate: float = DEFAULT_FRAME_RATE) -> list[SimFrame]:
    """Run the protocol and return all frames, transect by transect.

    Frames are placed symmetrically about the overhead pass so the
    closest-approach frame (horizontal offset 0) is always sampled. ``t`` is
    seconds since that transect's start. Each transect draws from its own
    child of ``SeedSequence(config.seed)``, so output depends only on
    (truth, config, frame_rate).
    """
    _require_distance_model(truth)
    if not frame_rate > 0:
        raise ValueError("frame_rate must be > 0")
    children = np.random.SeedSequence(config.seed).spawn(config.n_transects)
    frames = []
    for i in range(config.n_transects):
        frames.extend(_one_transect(truth, config, frame_rate, i, children[i]))
    return frames


def _one_transect(truth, config, frame_rate, index, seed_seq):
    rng = np.random.default_rng(seed_seq)
    t_pass = config.pass_time
    m = int(math.floor(t_pass * frame_rate + 1e-9))
    steps = np.arange(-m, m + 1)
    dt = steps / frame_rate
    offsets = config.speed * dt
    times = t_pass + dt
    rd = np.hypot(config.altitude, offsets)
    frames = []
    for t, off, r in zip(times, offsets, rd):
        mu = truth.evaluate(float(r))
        fish = truncated_normal(rng, mu, config.noise_stddev, config.n_fish)
        frames.append(SimFrame(float(t), float(r), tuple(fish.tolist()),
                               Label.TRANSECT, index, float(off)))
    r_wait = math.hypot(config.altitude, config.standoff_during_wait)
    mu = truth.evaluate(r_wait)
    fish = truncated_normal(rng, mu, config.noise_stddev, config.n_fish)
    frames.append(SimFrame(t_pass + config.wait_seconds, r_wait, tuple(fish.tolist()),
                           Label.CONTROL, index, config.standoff_during_wait))
    return frames


def subsample(frames, config: ProtocolConfig, cadence: float):
    """Keep transect frames on a ``cadence``-second grid anchored at the pass.

    Control frames are always kept.
    """
    if not cadence > 0:
        raise ValueError("cadence must be > 0")
    kept = []
    for f in frames:
        if f.label == Label.CONTROL:
            kept.append(f)
            continue
        rel = f.t - config.pass_time
        if abs(rel - round(rel / cadence) * cadence) < 1e-6:
            kept.append(f)
    return kept


def to_observations(frames, abscissa_kind=AbscissaKind.ROBOT_DISTANCE):
    """Flatten frames to one ObservationSample per fish.

    x is the robot distance or the frame time ``t``, depending on
    ``abscissa_kind``.
    """
    kind = AbscissaKind(abscissa_kind)
    out = []
    for f in frames:
        x = f.robot_distance if kind == AbscissaKind.ROBOT_DISTANCE else f.t
        for d in f.fish_distances:
            out.append(ObservationSample(x, d, f.label, 1.0, kind, str(f.transect), f.t))
    return out


def sample_curve(truth: DisturbanceModel, xs, noise_stddev=0.0, seed=0):
    """Draw one observation per abscissa in ``xs`` with the simulator's noise model."""
    rng = np.random.default_rng(seed)
    xs = np.asarray(xs, dtype=float)
    mu = [truth.evaluate(float(x)) for x in xs]
    d = truncated_normal(rng, mu, noise_stddev, xs.size)
    return [ObservationSample(float(x), float(v), Label.TRANSECT, 1.0, truth.abscissa_kind)
            for x, v in zip(xs, d)]


def frames_to_records(frames, config: ProtocolConfig, scale_m_per_px=0.01,
                      shelter_px=(960.0, 540.0)):
    """Render frames as annotation records (one per fish) in the ingest schema.

    Transect ``i`` starts at ``i * config.cycle_seconds`` on the shared clock.
    Fish are placed at seeded random bearings around the shelter pixel; the
    bearing stream is separate from the distance stream.
    """
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x5EED]))
    sx, sy = shelter_px
    out = []
    counters = {}
    for f in frames:
        t0 = f.transect * config.cycle_seconds
        ts = t0 + f.t
        if f.label == Label.CONTROL:
            fid = f"C{f.transect:03d}"
            tid = ""
        else:
            n = counters.get(f.transect, 0)
            counters[f.transect] = n + 1
            fid = f"T{f.transect:03d}-F{n:05d}"
            tid = f"T{f.transect:03d}"
        bearings = rng.uniform(0.0, 2 * math.pi, len(f.fish_distances))
        for d, b in zip(f.fish_distances, bearings):
            r_px = d / scale_m_per_px
            out.append(AnnotationRecord(
                frame_id=fid,
                timestamp_s=ts,
                kind=f.label,
                transect_id=tid,
                altitude_m=config.altitude,
                fish_x_px=sx + r_px * math.cos(b),
                fish_y_px=sy + r_px * math.sin(b),
                shelter_x_px=sx,
                shelter_y_px=sy,
                scale_m_per_px=scale_m_per_px,
                pass_time_s=t0 + config.pass_time,
                robot_distance_m=f.robot_distance,
            ))
    return out
