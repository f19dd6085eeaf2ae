"""Damped least-squares (Levenberg-Marquardt) fit of the disturbance model."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AbscissaMismatch, InsufficientData
from .model import EXP_CLAMP, AbscissaKind, DisturbanceModel

K_MIN = 1e-9


class Label(str, enum.Enum):
    CONTROL = "Control"
    TRANSECT = "Transect"


@dataclass(frozen=True)
class ObservationSample:
    """One fish-to-shelter distance measured at abscissa ``x``.

    ``transect_id`` and ``timestamp`` are bookkeeping carried through from
    annotation data; the fit ignores them.
    """

    x: float
    distance: float
    label: Label = Label.TRANSECT
    weight: float = 1.0
    abscissa_kind: AbscissaKind = AbscissaKind.ROBOT_DISTANCE
    transect_id: str = ""
    timestamp: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "label", Label(self.label))
        object.__setattr__(self, "abscissa_kind", AbscissaKind(self.abscissa_kind))
        if not self.distance >= 0:
            raise ValueError(f"distance must be >= 0, got {self.distance}")
        if not self.weight > 0:
            raise ValueError(f"weight must be > 0, got {self.weight}")

    def to_dict(self):
        return {
            "x": self.x if math.isfinite(self.x) else None,
            "distance": self.distance,
            "label": self.label.value,
            "weight": self.weight,
            "abscissa_kind": self.abscissa_kind.value,
            "transect_id": self.transect_id,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            x=math.nan if d["x"] is None else float(d["x"]),
            distance=float(d["distance"]),
            label=Label(d.get("label", "Transect")),
            weight=float(d.get("weight", 1.0)),
            abscissa_kind=AbscissaKind(d.get("abscissa_kind", "RobotDistance")),
            transect_id=d.get("transect_id", ""),
            timestamp=d.get("timestamp"),
        )


@dataclass(frozen=True)
class FitOptions:
    max_iter: int = 200
    rss_rtol: float = 1e-10
    step_tol: float = 1e-10
    lam0: float = 1e-3
    lam_up: float = 10.0
    lam_down: float = 0.1
    lam_min: float = 1e-12
    lam_max: float = 1e10


@dataclass
class FitResult:
    model: DisturbanceModel
    rss: float
    iterations: int
    converged: bool
    residual_stddev: float
    identifiable: bool = True
    n_samples: int = 0
    rss_history: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "model": self.model.to_dict(),
            "rss": self.rss,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_stddev": self.residual_stddev,
            "identifiable": self.identifiable,
            "n_samples": self.n_samples,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            model=DisturbanceModel.from_dict(d["model"]),
            rss=float(d["rss"]),
            iterations=int(d["iterations"]),
            converged=bool(d["converged"]),
            residual_stddev=float(d["residual_stddev"]),
            identifiable=bool(d.get("identifiable", True)),
            n_samples=int(d.get("n_samples", 0)),
        )


def _common_kind(samples):
    kinds = {s.abscissa_kind for s in samples}
    if len(kinds) > 1:
        raise AbscissaMismatch(f"samples mix abscissa kinds {sorted(k.value for k in kinds)}")
    return kinds.pop() if kinds else None


def _check_kind(samples, model):
    kind = _common_kind(samples)
    if kind is not None and kind != model.abscissa_kind:
        raise AbscissaMismatch(
            f"samples are {kind.value} but model is {model.abscissa_kind.value}"
        )


def _sigmoid(x, k, x0):
    z = np.clip(-k * (x - x0), -EXP_CLAMP, EXP_CLAMP)
    return 1.0 / (1.0 + np.exp(z))


def _predict(theta, x):
    lc, lh, k, x0 = theta
    return (lc - lh) * _sigmoid(x, k, x0) + lh


def _jac(theta, x):
    lc, lh, k, x0 = theta
    s = _sigmoid(x, k, x0)
    ds = (lc - lh) * s * (1.0 - s)
    return np.column_stack([s, 1.0 - s, ds * (x - x0), -ds * k])


def residuals(samples, model: DisturbanceModel) -> list[float]:
    """``distance - f(x)`` per sample, in input order."""
    _check_kind(samples, model)
    x = np.array([s.x for s in samples], dtype=float)
    d = np.array([s.distance for s in samples], dtype=float)
    return (d - _predict(model.params, x)).tolist()


def jacobian(samples, model: DisturbanceModel) -> np.ndarray:
    """n x 4 matrix of partials of f w.r.t. (l_control, l_hide, k, x0)."""
    _check_kind(samples, model)
    x = np.array([s.x for s in samples], dtype=float)
    return _jac(model.params, x)


def _clamp(theta):
    lc, lh, k, x0 = theta
    lh = max(lh, 0.0)
    lc = max(lc, lh)
    k = max(k, K_MIN)
    return np.array([lc, lh, k, x0])


def initial_guess(x, d):
    """Start point: decile means for the plateaus, median x, width set by the data span."""
    n = len(d)
    m = max(1, int(math.ceil(n / 10)))
    ds = np.sort(d)
    lh = float(ds[:m].mean())
    lc = float(ds[-m:].mean())
    span = float(x.max() - x.min())
    k = 4.0 / span if span > 0 else 1.0
    return _clamp(np.array([lc, lh, k, float(np.median(x))]))


def fit_model(samples, options: FitOptions | None = None) -> FitResult:
    """Fit the four model parameters to ``samples`` by weighted least squares.

    Minimises ``sum w (distance - f(x))**2`` with Levenberg-Marquardt steps,
    clamping into ``l_control >= l_hide >= 0, k >= 1e-9`` after every step.
    Samples are sorted internally so the result does not depend on input order.

    If every distance is identical the data carry no response: a flat model
    (``l_control == l_hide``) is returned with ``identifiable=False`` and
    ``k``/``x0`` left at their initial guesses.
    """
    opts = options or FitOptions()
    samples = list(samples)
    if len(samples) < 4:
        raise InsufficientData(f"need at least 4 samples, got {len(samples)}")
    kind = _common_kind(samples)
    ordered = sorted(samples, key=lambda s: (s.x, s.distance, s.weight))
    x = np.array([s.x for s in ordered], dtype=float)
    d = np.array([s.distance for s in ordered], dtype=float)
    w = np.array([s.weight for s in ordered], dtype=float)
    if not np.all(np.isfinite(x)):
        raise InsufficientData("abscissa contains non-finite values")
    if len(np.unique(x)) < 3:
        raise InsufficientData("need at least 3 distinct abscissa values")
    n = len(d)
    theta = initial_guess(x, d)

    if np.ptp(d) == 0:
        flat = DisturbanceModel(float(d[0]), float(d[0]), float(theta[2]), float(theta[3]), kind)
        return FitResult(flat, 0.0, 0, True, 0.0, identifiable=False, n_samples=n)

    sw = np.sqrt(w)

    def weighted_resid(th):
        return sw * (d - _predict(th, x))

    r = weighted_resid(theta)
    rss = float(r @ r)
    history = [rss]
    lam = opts.lam0
    converged = False
    it = 0
    while it < opts.max_iter:
        it += 1
        J = sw[:, None] * _jac(theta, x)
        A = J.T @ J
        g = J.T @ r
        diag = np.diag(A).copy()
        diag = np.maximum(diag, 1e-12 * max(1.0, diag.max()))
        while True:
            try:
                step = np.linalg.solve(A + lam * np.diag(diag), g)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(A + lam * np.diag(diag), g, rcond=None)[0]
            trial = _clamp(theta + step)
            actual = trial - theta
            rt = weighted_resid(trial)
            rss_t = float(rt @ rt)
            if rss_t <= rss:
                break
            if np.max(np.abs(actual)) < opts.step_tol or lam >= opts.lam_max:
                break
            lam = min(lam * opts.lam_up, opts.lam_max)

        if rss_t <= rss:
            decrease = rss - rss_t
            theta, r = trial, rt
            rel = decrease / rss if rss > 0 else 0.0
            rss = rss_t
            history.append(rss)
            lam = max(lam * opts.lam_down, opts.lam_min)
            if rel < opts.rss_rtol or np.max(np.abs(actual)) < opts.step_tol or rss == 0.0:
                converged = True
                break
        else:
            # no acceptable step left: stationary only if the proposed step vanished
            converged = bool(np.max(np.abs(actual)) < opts.step_tol)
            break

    dof = max(n - 4, 1)
    model = DisturbanceModel(*(float(v) for v in theta), abscissa_kind=kind)
    return FitResult(
        model=model,
        rss=rss,
        iterations=it,
        converged=converged,
        residual_stddev=math.sqrt(rss / dof),
        n_samples=n,
        rss_history=history,
    )
