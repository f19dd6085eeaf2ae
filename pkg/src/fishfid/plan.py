"""Standoff planning: keep the vehicle outside the flight initiation distance.

The model is treated as altitude-independent. Field observations hint that
fish may react earlier to a vehicle that is higher (and easier to see), in
which case the FID itself would depend on altitude and a plan built from a
single fit may be optimistic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

from .errors import Infeasible, TimeDomainModel
from .model import DEFAULT_ALPHA, AbscissaKind, DisturbanceModel, FidQuery, fid
from .sim import ProtocolConfig

WAYPOINT_DT = 0.2


@dataclass(frozen=True)
class StandoffPlan:
    fid: float
    alpha: float
    min_altitude: float
    sensor_range: float
    feasible: bool
    margin: float

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Waypoint:
    t: float
    x: float
    altitude: float

    @property
    def shelter_distance(self):
        return math.hypot(self.x, self.altitude)


def plan_standoff(model: DisturbanceModel, alpha=DEFAULT_ALPHA, sensor_range=10.0,
                  extra_margin=0.0) -> StandoffPlan:
    """Lowest overhead altitude that keeps the vehicle outside the FID.

    On a straight overhead pass the closest approach equals the altitude, so
    ``min_altitude = max(fid, 0)``, plus ``extra_margin`` if the caller wants
    a safety buffer. A flat model (no response) places no constraint.
    ``feasible`` means the FID lies within the vehicle's sensing range, i.e.
    it can stay out of the fish's way and still see them.
    """
    alpha = FidQuery(alpha).alpha
    if model.abscissa_kind != AbscissaKind.ROBOT_DISTANCE:
        raise TimeDomainModel(
            "time-domain FID cannot set an altitude without a speed and origin; "
            "refit against robot distance"
        )
    if not sensor_range > 0:
        raise ValueError("sensor_range must be > 0")
    if not extra_margin >= 0:
        raise ValueError("extra_margin must be >= 0")
    if model.l_control == model.l_hide:
        x_fid = 0.0
    else:
        x_fid = fid(model, alpha)
    return StandoffPlan(
        fid=x_fid,
        alpha=alpha,
        min_altitude=max(x_fid, 0.0) + extra_margin,
        sensor_range=sensor_range,
        feasible=x_fid <= sensor_range,
        margin=sensor_range - x_fid,
    )


def plan_transect(model, alpha=DEFAULT_ALPHA, speed=0.5, half_length=4.0,
                  sensor_range=10.0, extra_margin=0.0):
    """Constant-altitude overhead transect at the planned standoff.

    Waypoints are ``speed * 0.2`` m apart, placed symmetrically about the
    overhead point (which is always included). Returns ``(plan, waypoints)``.
    """
    if not speed > 0 or not half_length > 0:
        raise ValueError("speed and half_length must be > 0")
    plan = plan_standoff(model, alpha, sensor_range, extra_margin)
    if not plan.feasible:
        raise Infeasible(
            f"FID {plan.fid} exceeds sensor range {plan.sensor_range}"
        )
    spacing = speed * WAYPOINT_DT
    m = int(math.floor(half_length / spacing + 1e-9))
    wps = [
        Waypoint(t=(j + m) * WAYPOINT_DT, x=j * spacing, altitude=plan.min_altitude)
        for j in range(-m, m + 1)
    ]
    return plan, wps


def protocol_for(plan: StandoffPlan, speed, half_length, **kwargs) -> ProtocolConfig:
    """Simulator config that flies the planned transect."""
    # the simulator needs altitude > 0; a zero-altitude plan flies just above the marker
    altitude = max(plan.min_altitude, 1e-9)
    return ProtocolConfig(altitude=altitude, speed=speed,
                          transect_half_length=half_length, **kwargs)


def waypoints_csv(waypoints) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "y", "z"])
    for p in waypoints:
        w.writerow([repr(p.t), repr(p.x), repr(0.0), repr(p.altitude)])
    return buf.getvalue()
