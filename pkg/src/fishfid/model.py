"""Logistic shelter-distance response to an approaching vehicle.

The mean fish-to-shelter distance is modelled as

    f(x) = (l_control - l_hide) / (1 + exp(-k (x - x0))) + l_hide

where ``x`` is the vehicle's distance to the shelter (or, for time-proxy fits,
the time along the transect). Far from the vehicle fish sit at ``l_control``;
close to it they pull in to ``l_hide``.

``x`` is taken as robot-to-shelter distance throughout. Whether it should be
robot-to-fish instead is ambiguous for hiding species; with fish clustered
around the shelter the two coincide to within the cluster radius.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

from .errors import (
    DegenerateModel,
    InvalidModel,
    TargetOutOfRange,
    ThresholdUnreachable,
)

EXP_CLAMP = 700.0
DEFAULT_ALPHA = 0.9


class AbscissaKind(str, enum.Enum):
    ROBOT_DISTANCE = "RobotDistance"
    TIME_ALONG_TRANSECT = "TimeAlongTransect"


@dataclass(frozen=True)
class DisturbanceModel:
    l_control: float
    l_hide: float
    k: float
    x0: float
    abscissa_kind: AbscissaKind = AbscissaKind.ROBOT_DISTANCE

    def __post_init__(self):
        object.__setattr__(self, "abscissa_kind", AbscissaKind(self.abscissa_kind))
        vals = (self.l_control, self.l_hide, self.k, self.x0)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidModel(f"non-finite parameter in {vals}")
        if not self.l_control >= self.l_hide >= 0:
            raise InvalidModel(
                f"need l_control >= l_hide >= 0, got {self.l_control}, {self.l_hide}"
            )
        if not self.k > 0:
            raise InvalidModel(f"need k > 0, got {self.k}")

    @property
    def params(self):
        return (self.l_control, self.l_hide, self.k, self.x0)

    @property
    def gap(self):
        """Response amplitude, ``l_control - l_hide``."""
        return self.l_control - self.l_hide

    def evaluate(self, x):
        return evaluate(self, x)

    def fid(self, alpha=DEFAULT_ALPHA):
        return fid(self, alpha)

    def invert(self, target_distance):
        return invert(self, target_distance)

    def to_dict(self):
        return {
            "l_control": self.l_control,
            "l_hide": self.l_hide,
            "k": self.k,
            "x0": self.x0,
            "abscissa_kind": self.abscissa_kind.value,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            l_control=float(d["l_control"]),
            l_hide=float(d["l_hide"]),
            k=float(d["k"]),
            x0=float(d["x0"]),
            abscissa_kind=AbscissaKind(d.get("abscissa_kind", "RobotDistance")),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class FidQuery:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")


def logistic(z):
    """``1 / (1 + exp(-z))`` with the exponent clamped to +-700."""
    e = math.exp(min(max(-z, -EXP_CLAMP), EXP_CLAMP))
    return 1.0 / (1.0 + e)


def evaluate(model: DisturbanceModel, x: float) -> float:
    """Predicted mean fish-to-shelter distance at abscissa ``x``."""
    s = logistic(model.k * (x - model.x0))
    return model.gap * s + model.l_hide


def invert(model: DisturbanceModel, target_distance: float) -> float:
    """Abscissa at which the response equals ``target_distance``.

    Raises TargetOutOfRange unless ``l_hide < target_distance < l_control``.
    """
    lc, lh = model.l_control, model.l_hide
    if not lh < target_distance < lc:
        raise TargetOutOfRange(
            f"target {target_distance} outside open interval ({lh}, {lc})"
        )
    return model.x0 - math.log((lc - target_distance) / (target_distance - lh)) / model.k


def fid(model: DisturbanceModel, alpha: float | FidQuery = DEFAULT_ALPHA) -> float:
    """Flight initiation distance: the x where the response reaches alpha * l_control.

    Parameters
    ----------
    model : DisturbanceModel
    alpha : float or FidQuery
        Fraction of the undisturbed distance marking the onset of flight,
        in [0, 1). Larger is more conservative.

    Returns
    -------
    float
        ``x0 - ln(l_control (1 - alpha) / (alpha l_control - l_hide)) / k``,
        in the model's abscissa unit (metres or seconds).

    Raises
    ------
    DegenerateModel
        If ``l_control == l_hide``.
    ThresholdUnreachable
        If ``alpha * l_control <= l_hide``; the curve never drops that low.
    """
    if isinstance(alpha, FidQuery):
        alpha = alpha.alpha
    else:
        alpha = FidQuery(alpha).alpha
    lc, lh = model.l_control, model.l_hide
    if lc == lh:
        raise DegenerateModel("l_control == l_hide; no response to invert")
    threshold = alpha * lc
    if threshold <= lh:
        raise ThresholdUnreachable(
            f"alpha*l_control = {threshold} <= l_hide = {lh}; no finite FID"
        )
    return model.x0 - math.log(lc * (1.0 - alpha) / (threshold - lh)) / model.k
