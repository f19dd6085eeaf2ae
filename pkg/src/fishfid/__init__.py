"""Fish disturbance by underwater vehicles: logistic response model, fitting,
KS testing, protocol simulation and standoff planning."""

from .errors import DisturbanceError
from .fit import FitOptions, FitResult, Label, ObservationSample, fit_model, jacobian, residuals
from .ingest import AnnotationRecord, SiteDataset, compute_distances, group_frames, parse_annotations
from .model import AbscissaKind, DisturbanceModel, FidQuery, evaluate, fid, invert
from .plan import StandoffPlan, plan_standoff, plan_transect
from .sim import ProtocolConfig, SimFrame, simulate, to_observations
from .stats import KsResult, compare_groups, ks_two_sample

__version__ = "0.1.0"
