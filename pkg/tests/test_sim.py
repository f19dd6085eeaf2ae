import math
import pickle

import numpy as np
import pytest

from fishfid.errors import UnitMismatch
from fishfid.fit import Label, fit_model
from fishfid.model import AbscissaKind, DisturbanceModel
from fishfid.sim import (
    ProtocolConfig,
    frames_to_records,
    sample_curve,
    simulate,
    subsample,
    to_observations,
)

from .oracles import REF


def cfg(**kw):
    base = dict(altitude=1.5, speed=0.5, transect_half_length=4.0, n_transects=3, n_fish=4,
                noise_stddev=0.1, seed=42)
    base.update(kw)
    return ProtocolConfig(**base)


def test_noise_free_frames_are_exact():
    frames = simulate(REF, cfg(noise_stddev=0.0))
    for f in frames:
        assert all(d == REF.evaluate(f.robot_distance) for d in f.fish_distances)


def test_same_seed_byte_identical():
    a = simulate(REF, cfg())
    b = simulate(REF, cfg())
    assert pickle.dumps(a) == pickle.dumps(b)
    assert pickle.dumps(a) != pickle.dumps(simulate(REF, cfg(seed=43)))


def test_transects_independent_of_count():
    # per-transect child seeds: transect i does not depend on how many follow it
    few = simulate(REF, cfg(n_transects=2))
    many = simulate(REF, cfg(n_transects=5))
    assert few == many[: len(few)]


def test_closest_approach_is_altitude():
    c = cfg(altitude=2.3, speed=0.7, transect_half_length=3.3)
    frames = simulate(REF, c, frame_rate=3.0)
    for i in range(c.n_transects):
        tr = [f for f in frames if f.transect == i and f.label == Label.TRANSECT]
        assert min(f.robot_distance for f in tr) == 2.3
        dt = 1 / 3.0
        for f in tr:
            assert f.robot_distance >= 2.3
            if f.robot_distance == 2.3:
                assert abs(f.t - c.pass_time) <= dt


def test_geometry_and_span():
    c = cfg()
    frames = simulate(REF, c)
    tr = [f for f in frames if f.label == Label.TRANSECT and f.transect == 0]
    assert tr[0].offset == -4.0 and tr[-1].offset == 4.0
    for f in tr:
        assert f.robot_distance == pytest.approx(math.hypot(c.altitude, f.offset), abs=1e-12)
    assert np.allclose(np.diff([f.t for f in tr]), 0.2)


def test_exactly_one_control_per_transect():
    c = cfg(n_transects=7)
    frames = simulate(REF, c)
    controls = [f for f in frames if f.label == Label.CONTROL]
    assert len(controls) == 7
    for f in controls:
        assert f.t == c.pass_time + c.wait_seconds
        assert f.robot_distance == math.hypot(c.altitude, c.standoff_during_wait)


def test_nonnegative_under_heavy_noise():
    truth = DisturbanceModel(0.5, 0.0, 1.0, 3.0)
    frames = simulate(truth, cfg(noise_stddev=2.0))
    assert min(min(f.fish_distances) for f in frames) >= 0.0


def test_mean_convergence():
    sigma = 0.2
    c = cfg(n_transects=50, n_fish=200, noise_stddev=sigma, transect_half_length=0.5, speed=0.5)
    frames = simulate(REF, c, frame_rate=1.0)
    mid = [d for f in frames if f.label == Label.TRANSECT and f.offset == 0 for d in f.fish_distances]
    n = len(mid)
    assert n >= 10_000
    assert abs(np.mean(mid) - REF.evaluate(c.altitude)) <= 3 * sigma / math.sqrt(n)


def test_time_domain_truth_rejected():
    with pytest.raises(UnitMismatch):
        simulate(DisturbanceModel(2, 1, 1, 5, AbscissaKind.TIME_ALONG_TRANSECT), cfg())


@pytest.mark.parametrize("bad", [dict(altitude=0), dict(speed=-1), dict(noise_stddev=-0.1),
                                 dict(n_fish=0), dict(seed=-1), dict(seed=2**64)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        cfg(**bad)


def test_to_observations_shapes_and_labels():
    frames = simulate(REF, cfg(n_transects=1, n_fish=3))
    obs = to_observations(frames[:1])
    assert len(obs) == 3 and len({o.x for o in obs}) == 1
    ctrl = [f for f in frames if f.label == Label.CONTROL]
    assert all(o.label == Label.CONTROL for o in to_observations(ctrl))
    t_obs = to_observations(frames[:1], AbscissaKind.TIME_ALONG_TRANSECT)
    assert t_obs[0].x == frames[0].t
    assert t_obs[0].abscissa_kind == AbscissaKind.TIME_ALONG_TRANSECT


def test_end_to_end_recovery_noise_free():
    c = ProtocolConfig(altitude=0.5, speed=1.0, transect_half_length=12.0, n_transects=2,
                       n_fish=2, noise_stddev=0.0, seed=1)
    res = fit_model(to_observations(simulate(REF, c)))
    for a, b in zip(res.model.params, REF.params):
        assert abs(a - b) <= 1e-6 * abs(b)


def test_subsample_cadence():
    c = cfg(n_transects=2, speed=0.1, transect_half_length=2.0)  # 20 s each side
    frames = subsample(simulate(REF, c), c, 5.0)
    rel = sorted({round(f.t - c.pass_time, 9) for f in frames if f.label == Label.TRANSECT})
    assert rel == [-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
    assert sum(f.label == Label.CONTROL for f in frames) == 2


def test_frames_to_records_preserve_distances():
    c = cfg(n_transects=2)
    frames = simulate(REF, c)
    recs = frames_to_records(frames, c)
    assert len(recs) == sum(len(f.fish_distances) for f in frames)
    flat = [d for f in frames for d in f.fish_distances]
    for r, d in zip(recs, flat):
        assert r.pixel_distance * r.scale_m_per_px == pytest.approx(d, rel=1e-12, abs=1e-12)
    assert recs[-1].timestamp_s == c.cycle_seconds + c.pass_time + c.wait_seconds


def test_sample_curve_noise_free():
    xs = np.linspace(0, 10, 11)
    assert [s.distance for s in sample_curve(REF, xs)] == [REF.evaluate(x) for x in xs]
