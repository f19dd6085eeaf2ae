"""Command-line entry point.

Exit status: 0 on success, 1 on a domain error (one JSON line on stderr),
2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .errors import DisturbanceError
from .fit import FitResult, fit_model
from .ingest import SiteDataset, compute_distances, parse_annotations, serialize_annotations
from .model import DEFAULT_ALPHA, AbscissaKind, DisturbanceModel, fid
from .plan import plan_standoff, plan_transect, waypoints_csv
from .sim import DEFAULT_FRAME_RATE, ProtocolConfig, frames_to_records, simulate, subsample
from .stats import ecdf_points, ks_two_sample

DOMAINS = {"distance": AbscissaKind.ROBOT_DISTANCE, "time": AbscissaKind.TIME_ALONG_TRANSECT}


class UsageError(Exception):
    pass


def _alpha(text):
    v = float(text)
    if not 0.0 <= v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must be in [0, 1), got {v}")
    return v


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def dumps(obj) -> str:
    # dict insertion order is the key order; float repr round-trips exactly
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _emit(text, out=None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def _existing(path):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return p


def _writable(path):
    if path is not None and not Path(path).parent.exists():
        raise UsageError(f"output directory does not exist: {Path(path).parent}")


def load_model(path) -> DisturbanceModel:
    data = json.loads(_existing(path).read_text(encoding="utf-8"))
    if "model" in data:
        data = data["model"]
    return DisturbanceModel.from_dict(data)


def _load_samples(path, domain):
    """Observation samples from an ingest JSON dataset or a raw annotation file."""
    p = _existing(path)
    raw = p.read_bytes()
    if p.suffix.lower() == ".json":
        data = json.loads(raw)
        if isinstance(data, dict) and "samples" in data:
            ds = SiteDataset.from_dict(data)
            if ds.abscissa_kind != domain:
                raise UsageError(
                    f"dataset abscissa is {ds.abscissa_kind.value}, --domain asks for {domain.value}"
                )
            return ds.samples
        return compute_distances(parse_annotations(raw, "json"), domain).samples
    return compute_distances(parse_annotations(raw, "csv"), domain).samples


def _load_distances(path):
    """Distances from an annotation CSV, a CSV with a ``distance`` column, or a bare column."""
    p = _existing(path)
    text = p.read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    header = [h.strip() for h in rows[0]]
    if "fish_x_px" in header:
        return [s.distance for s in compute_distances(parse_annotations(text, "csv")).samples]
    if "distance" in header:
        i = header.index("distance")
        return [float(r[i]) for r in rows[1:] if r]
    try:
        float(rows[0][0])
        body = rows
    except ValueError:
        body = rows[1:]
    return [float(r[0]) for r in body if r]


def cmd_ingest(args):
    _writable(args.out)
    raw = _existing(args.input).read_bytes()
    records = parse_annotations(raw, args.format)
    ds = compute_distances(records, DOMAINS[args.domain], site=args.site)
    _emit(dumps(ds.to_dict()), args.out)


def cmd_fit(args):
    _writable(args.out)
    domain = DOMAINS[args.domain]
    samples = [s for s in _load_samples(args.input, domain) if math.isfinite(s.x)]
    res = fit_model(samples)
    _emit(dumps(res.to_dict()), args.out)
    if args.out is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "observed", "fitted"])
        for s in sorted(samples, key=lambda s: (s.x, s.distance)):
            w.writerow([repr(s.x), repr(s.distance), repr(res.model.evaluate(s.x))])
        Path(args.out).with_suffix(".csv").write_text(buf.getvalue(), encoding="utf-8")


def cmd_fid(args):
    model = load_model(args.model)
    _emit(dumps({"fid": fid(model, args.alpha), "alpha": args.alpha,
                 "abscissa_kind": model.abscissa_kind.value}))


def cmd_ks(args):
    _writable(args.out)
    _writable(args.ecdf_out)
    control = _load_distances(args.control)
    transect = _load_distances(args.transect)
    res = ks_two_sample(control, transect)
    _emit(dumps(res.to_dict()), args.out)
    if args.ecdf_out is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["group", "value", "ecdf"])
        for name, vals in (("control", control), ("transect", transect)):
            for v, f in ecdf_points(vals):
                w.writerow([name, repr(v), repr(f)])
        Path(args.ecdf_out).write_text(buf.getvalue(), encoding="utf-8")


def cmd_simulate(args):
    _writable(args.out)
    truth = load_model(args.truth)
    cfg = json.loads(_existing(args.config).read_text(encoding="utf-8"))
    frame_rate = float(cfg.get("frame_rate", DEFAULT_FRAME_RATE))
    if args.seed is not None:
        cfg["seed"] = args.seed
    config = ProtocolConfig.from_dict(cfg)
    frames = simulate(truth, config, frame_rate)
    if args.cadence is not None:
        frames = subsample(frames, config, args.cadence)
    records = frames_to_records(frames, config)
    data = serialize_annotations(records, "csv")
    if args.out is None:
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(args.out).write_bytes(data)
        _emit(dumps({"frames": len(frames), "records": len(records), "out": str(args.out)}))


def cmd_plan(args):
    _writable(args.out)
    model = load_model(args.model)
    if args.speed is None and args.half_length is None:
        plan = plan_standoff(model, args.alpha, args.sensor_range, args.margin)
        _emit(dumps({"plan": plan.to_dict()}), args.out)
        return
    if args.speed is None or args.half_length is None:
        raise UsageError("--speed and --half-length go together")
    plan, wps = plan_transect(model, args.alpha, args.speed, args.half_length,
                              args.sensor_range, args.margin)
    body = {
        "plan": plan.to_dict(),
        "waypoints": [{"t": p.t, "x": p.x, "y": 0.0, "z": p.altitude} for p in wps],
    }
    _emit(dumps(body), args.out)
    if args.out is not None:
        Path(args.out).with_suffix(".csv").write_text(waypoints_csv(wps), encoding="utf-8")


def build_parser():
    ap = argparse.ArgumentParser(prog="fishfid", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="annotations -> distance dataset (JSON)")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--domain", choices=sorted(DOMAINS), default="time")
    p.add_argument("--site", default="")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit the disturbance model")
    p.add_argument("--input", required=True)
    p.add_argument("--domain", choices=sorted(DOMAINS), default="distance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("fid", help="flight initiation distance of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    p.set_defaults(func=cmd_fid)

    p = sub.add_parser("ks", help="two-sample KS test, control vs transect")
    p.add_argument("--control", required=True)
    p.add_argument("--transect", required=True)
    p.add_argument("--out")
    p.add_argument("--ecdf-out")
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("simulate", help="synthetic protocol run -> annotation CSV")
    p.add_argument("--truth", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--cadence", type=_positive)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", help="standoff altitude / transect outside the FID")
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    p.add_argument("--sensor-range", type=_positive, required=True)
    p.add_argument("--speed", type=_positive)
    p.add_argument("--half-length", type=_positive)
    p.add_argument("--margin", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        args.func(args)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        sys.stderr.write(f"fishfid: error: {e}\n")
        return 2
    except (DisturbanceError, ValueError, KeyError, OSError) as e:
        name = type(e).__name__
        sys.stderr.write(json.dumps({"error": name, "message": str(e)}) + "\n")
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
