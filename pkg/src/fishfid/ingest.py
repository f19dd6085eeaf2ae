"""Annotation interchange format and fish-to-shelter distance extraction.

One row per annotated fish. The canonical CSV header is::

    frame_id,timestamp_s,kind,transect_id,altitude_m,fish_x_px,fish_y_px,
    shelter_x_px,shelter_y_px,scale_m_per_px

followed optionally by ``pass_time_s`` (declared time the vehicle was
overhead) and ``robot_distance_m`` (vehicle-to-shelter distance, needed for
distance-domain fits). Empty cells encode absent optionals; other unknown
columns are ignored.

Metric scale is never inferred from imagery. Without ``scale_m_per_px``
distances stay in pixels.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass, field

from .errors import EmptyInput, MixedUnits, ParseError, SchemaError
from .fit import Label, ObservationSample
from .model import AbscissaKind

COLUMNS = (
    "frame_id",
    "timestamp_s",
    "kind",
    "transect_id",
    "altitude_m",
    "fish_x_px",
    "fish_y_px",
    "shelter_x_px",
    "shelter_y_px",
    "scale_m_per_px",
)
OPTIONAL_COLUMNS = ("pass_time_s", "robot_distance_m")
BASELINE = "__baseline__"


@dataclass(frozen=True)
class AnnotationRecord:
    frame_id: str
    timestamp_s: float
    kind: Label
    transect_id: str
    altitude_m: float | None
    fish_x_px: float
    fish_y_px: float
    shelter_x_px: float
    shelter_y_px: float
    scale_m_per_px: float | None = None
    pass_time_s: float | None = None
    robot_distance_m: float | None = None

    @property
    def pixel_distance(self):
        return math.hypot(self.fish_x_px - self.shelter_x_px,
                          self.fish_y_px - self.shelter_y_px)


@dataclass
class SiteDataset:
    site: str
    samples: list
    unit: str  # "Pixels" or "Meters"
    abscissa_kind: AbscissaKind = AbscissaKind.TIME_ALONG_TRANSECT
    records: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "site": self.site,
            "unit": self.unit,
            "abscissa_kind": self.abscissa_kind.value,
            "samples": [s.to_dict() for s in self.samples],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            site=d.get("site", ""),
            samples=[ObservationSample.from_dict(s) for s in d["samples"]],
            unit=d["unit"],
            abscissa_kind=AbscissaKind(d["abscissa_kind"]),
        )


def _opt_float(raw, row, name, positive=False, nonneg=False):
    if raw is None or raw == "":
        return None
    v = _float(raw, row, name)
    if positive and not v > 0:
        raise ParseError(row, name, f"must be > 0, got {v}")
    if nonneg and not v >= 0:
        raise ParseError(row, name, f"must be >= 0, got {v}")
    return v


def _float(raw, row, name):
    try:
        v = float(raw)
    except (TypeError, ValueError):
        raise ParseError(row, name, f"not a number: {raw!r}") from None
    if not math.isfinite(v):
        raise ParseError(row, name, f"not finite: {raw!r}")
    return v


def _record(row_no, raw):
    kind_raw = str(raw["kind"]).strip()
    try:
        kind = Label(kind_raw.capitalize())
    except ValueError:
        raise ParseError(row_no, "kind", f"expected Control or Transect, got {kind_raw!r}") from None
    transect_id = "" if raw["transect_id"] is None else str(raw["transect_id"])
    if kind == Label.TRANSECT and not transect_id:
        raise ParseError(row_no, "transect_id", "Transect rows need a transect_id")
    ts = _float(raw["timestamp_s"], row_no, "timestamp_s")
    if ts < 0:
        raise ParseError(row_no, "timestamp_s", f"must be >= 0, got {ts}")
    return AnnotationRecord(
        frame_id=str(raw["frame_id"]),
        timestamp_s=ts,
        kind=kind,
        transect_id=transect_id,
        altitude_m=_opt_float(raw["altitude_m"], row_no, "altitude_m", nonneg=True),
        fish_x_px=_float(raw["fish_x_px"], row_no, "fish_x_px"),
        fish_y_px=_float(raw["fish_y_px"], row_no, "fish_y_px"),
        shelter_x_px=_float(raw["shelter_x_px"], row_no, "shelter_x_px"),
        shelter_y_px=_float(raw["shelter_y_px"], row_no, "shelter_y_px"),
        scale_m_per_px=_opt_float(raw["scale_m_per_px"], row_no, "scale_m_per_px", positive=True),
        pass_time_s=_opt_float(raw.get("pass_time_s"), row_no, "pass_time_s"),
        robot_distance_m=_opt_float(raw.get("robot_distance_m"), row_no,
                                    "robot_distance_m", nonneg=True),
    )


def parse_annotations(stream, fmt="csv"):
    """Parse annotation rows from bytes, text, or a binary/text file object.

    Raises SchemaError for a missing required column and ParseError (1-based
    data row, field name) for a bad value.
    """
    if hasattr(stream, "read"):
        stream = stream.read()
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    fmt = fmt.lower()
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(stream, newline=""))
        header = reader.fieldnames or []
        for col in COLUMNS:
            if col not in header:
                raise SchemaError(col)
        return [_record(i, row) for i, row in enumerate(reader, start=1)]
    if fmt == "json":
        data = json.loads(stream) if stream.strip() else []
        if isinstance(data, dict):
            data = data.get("records", [])
        out = []
        for i, row in enumerate(data, start=1):
            for col in COLUMNS:
                if col not in row:
                    raise SchemaError(col, f"row {i}: missing required key {col!r}")
            out.append(_record(i, row))
        return out
    raise ValueError(f"unknown format {fmt!r}")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Label):
        return v.value
    return str(v)


def serialize_annotations(records, fmt="csv") -> bytes:
    """Inverse of :func:`parse_annotations`.

    The optional columns are written only when some record carries them.
    """
    records = list(records)
    extra = [c for c in OPTIONAL_COLUMNS if any(getattr(r, c) is not None for r in records)]
    cols = list(COLUMNS) + extra
    if fmt.lower() == "json":
        rows = [{c: (getattr(r, c).value if c == "kind" else getattr(r, c)) for c in cols}
                for r in records]
        return (json.dumps(rows, indent=1) + "\n").encode("utf-8")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([_cell(getattr(r, c)) for c in cols])
    return buf.getvalue().encode("utf-8")


def _closest_approach_times(records):
    """transect_id -> timestamp of its closest-approach frame.

    With a declared pass time, the record nearest it in time; otherwise the
    low median of the transect's distinct frame timestamps.
    """
    by_transect = {}
    for r in records:
        if r.kind == Label.TRANSECT:
            by_transect.setdefault(r.transect_id, []).append(r)
    out = {}
    for tid, recs in by_transect.items():
        passes = [r.pass_time_s for r in recs if r.pass_time_s is not None]
        if passes:
            p = passes[0]
            out[tid] = min(recs, key=lambda r: (abs(r.timestamp_s - p), r.timestamp_s)).timestamp_s
        else:
            out[tid] = statistics.median_low(sorted({r.timestamp_s for r in recs}))
    return out


def _transect_starts(records):
    starts = {}
    for r in records:
        if r.kind == Label.TRANSECT:
            t = starts.get(r.transect_id)
            starts[r.transect_id] = r.timestamp_s if t is None else min(t, r.timestamp_s)
    return sorted(starts.items(), key=lambda kv: (kv[1], kv[0]))


def _preceding_transect(ts, starts):
    best = None
    for tid, t0 in starts:
        if t0 <= ts:
            best = tid
        else:
            break
    return best


def compute_distances(records, abscissa_kind=AbscissaKind.TIME_ALONG_TRANSECT, site=""):
    """Fish-to-shelter distances as a SiteDataset.

    Distance is the pixel Euclidean distance times ``scale_m_per_px`` when the
    records carry a scale (then ``unit == "Meters"``). The abscissa is either

    * time: seconds relative to the closest-approach frame of the transect
      (for controls, of the most recent preceding transect, so a control
      60 s after the pass gets x = 60). Controls before any transect get
      x = nan.
    * distance: the ``robot_distance_m`` column, required on every record.
    """
    records = list(records)
    if not records:
        raise EmptyInput("no annotation records")
    scaled = [r.scale_m_per_px is not None for r in records]
    if any(scaled) and not all(scaled):
        raise MixedUnits("scale_m_per_px present on some records but not others")
    unit = "Meters" if scaled[0] else "Pixels"
    kind = AbscissaKind(abscissa_kind)

    if kind == AbscissaKind.ROBOT_DISTANCE:
        if any(r.robot_distance_m is None for r in records):
            raise SchemaError("robot_distance_m",
                              "distance-domain abscissa needs robot_distance_m on every record")
    else:
        approach = _closest_approach_times(records)
        starts = _transect_starts(records)

    samples = []
    for r in records:
        d = r.pixel_distance * (r.scale_m_per_px if unit == "Meters" else 1.0)
        if r.kind == Label.TRANSECT:
            owner = r.transect_id
        else:
            owner = None if kind == AbscissaKind.ROBOT_DISTANCE else \
                _preceding_transect(r.timestamp_s, starts)
        if kind == AbscissaKind.ROBOT_DISTANCE:
            x = r.robot_distance_m
        else:
            x = r.timestamp_s - approach[owner] if owner is not None else math.nan
        samples.append(ObservationSample(x, d, r.kind, 1.0, kind, r.transect_id, r.timestamp_s))
    return SiteDataset(site, samples, unit, kind, records)


def group_frames(dataset: SiteDataset):
    """transect_id -> (transect samples, trailing control samples).

    A control joins the transect with the latest start time at or before the
    control's timestamp; controls before every transect go to the
    ``BASELINE`` group. Groups are ordered by transect start, baseline first.
    """
    starts = {}
    for s in dataset.samples:
        if s.label == Label.TRANSECT:
            t = starts.get(s.transect_id)
            ts = s.timestamp if s.timestamp is not None else -math.inf
            starts[s.transect_id] = ts if t is None else min(t, ts)
    ordered = sorted(starts.items(), key=lambda kv: (kv[1], kv[0]))
    groups = {tid: ([], []) for tid, _ in ordered}
    baseline = ([], [])
    for s in dataset.samples:
        if s.label == Label.TRANSECT:
            groups[s.transect_id][0].append(s)
            continue
        ts = s.timestamp if s.timestamp is not None else -math.inf
        owner = _preceding_transect(ts, ordered)
        (baseline if owner is None else groups[owner])[1].append(s)
    if baseline[1]:
        return {BASELINE: baseline, **groups}
    return groups
