"""Command-line entry points: track, eval, simulate, ablate, study.

Every run is reproducible from its inputs, config, and seed alone; the only
environment influence is the BOOSTMOT_LOG variable controlling log verbosity.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .dataio import (RunConfig, config_from_mapping, read_detections,
                     read_external_similarity, read_ground_truth, read_kv_file,
                     read_results, write_detections, write_ground_truth,
                     write_results)
from .errors import ConfigError, TrackingError
from .metrics import evaluate, format_report, report_csv
from .simulate import (SceneConfig, detections_from_rows, generate,
                       gt_tracks_from_rows, iou_decay_study, read_scene_config)
from .tracker import results_to_rows, run_sequence

log = logging.getLogger("boostmot")

FLAG_NAMES = ("DLO", "S", "SB", "VT")
# The default ablation matrix mirrors the usual component grid: every
# combination of the improved-similarity/soft-boost/varying-threshold
# switches on top of the plain boost, plus the boost-free baseline.
DEFAULT_MATRIX = "none;DLO;DLO,VT;DLO,SB;DLO,SB,VT;DLO,S;DLO,S,VT;DLO,S,SB;DLO,S,SB,VT"


def parse_flags(spec: str) -> dict[str, bool]:
    """Parse a comma-separated flag combination like "DLO,S,SB,VT".

    An empty string or "none" disables the confidence boost entirely. Any of
    S/SB/VT implies boosting is on.
    """
    spec = spec.strip()
    names = set()
    if spec and spec.lower() != "none":
        for part in spec.split(","):
            name = part.strip().upper()
            if name not in FLAG_NAMES:
                raise ConfigError(f"unknown boost flag {part.strip()!r}; expected {FLAG_NAMES}")
            names.add(name)
    return {
        "use_dlo_boost": bool(names),
        "use_s": "S" in names,
        "use_sb": "SB" in names,
        "use_vt": "VT" in names,
    }


def load_run_config(path: str | None, preset: str | None = None,
                    flags: str | None = None) -> RunConfig:
    pairs = read_kv_file(path) if path else {}
    if preset:
        pairs = {**pairs, "preset": preset}
    cfg = config_from_mapping(pairs)
    if flags is not None:
        cfg = replace(cfg, **parse_flags(flags))
    return cfg


def cmd_track(args) -> int:
    cfg = load_run_config(args.config, args.preset, args.flags)
    stream = read_detections(args.det, normalize_conf=args.normalize_conf)
    external = read_external_similarity(args.appearance) if args.appearance else None
    results = run_sequence(stream, cfg, external_similarity=external)
    rows = results_to_rows(results)
    write_results(args.out, rows)
    log.info("wrote %d rows over %d frames to %s", len(rows), len(results), args.out)
    return 0


def cmd_eval(args) -> int:
    gt = read_ground_truth(args.gt)
    res = read_results(args.res)
    if gt and res:
        lo = max(min(gt), min(res))
        hi = min(max(gt), max(res))
        if (min(gt), max(gt)) != (min(res), max(res)):
            log.warning("frame ranges differ (gt %d..%d, res %d..%d); evaluating %d..%d",
                        min(gt), max(gt), min(res), max(res), lo, hi)
            gt = {f: v for f, v in gt.items() if lo <= f <= hi}
            res = {f: v for f, v in res.items() if lo <= f <= hi}
    report = evaluate(gt, res, iou_gate=args.iou_gate)
    print(format_report(report))
    if args.out:
        Path(args.out).write_text(report_csv(report) + "\n", encoding="utf-8")
    return 0


def cmd_simulate(args) -> int:
    scene = read_scene_config(args.scene)
    gt_rows, det_rows = generate(scene)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_ground_truth(out_dir / "gt.txt", gt_rows)
    write_detections(out_dir / "det.txt", det_rows)
    log.info("wrote %d gt rows and %d detection rows to %s",
             len(gt_rows), len(det_rows), out_dir)
    return 0


def cmd_ablate(args) -> int:
    scene = read_scene_config(args.scene)
    base_cfg = load_run_config(args.config)
    gt_rows, det_rows = generate(scene)
    gt = gt_tracks_from_rows(gt_rows)
    stream = detections_from_rows(det_rows)

    lines = ["setting,mota,idf1,idsw,ids,fp,fn"]
    for combo in args.matrix.split(";"):
        combo = combo.strip()
        cfg = replace(base_cfg, **parse_flags(combo))
        results = run_sequence(stream, cfg)
        res = {r.frame: [(rec.track_id, rec.box) for rec in r.records] for r in results}
        rep = evaluate(gt, res)
        label = combo if combo else "none"
        lines.append(f"{label},{rep.mota:.6f},{rep.idf1:.6f},{rep.idsw},"
                     f"{rep.num_ids},{rep.fp},{rep.fn}")
    table = "\n".join(lines)
    print(table)
    if args.out:
        Path(args.out).write_text(table + "\n", encoding="utf-8")
    return 0


def cmd_study(args) -> int:
    scene = read_scene_config(args.scene)
    cfg = load_run_config(args.config)
    stats = iou_decay_study(scene, cfg)
    lines = ["steps_since_update,count,mean_iou,q90_iou"]
    for bucket, stat in stats.items():
        lines.append(f"{bucket},{stat.count},{stat.mean_iou:.6f},{stat.q90_iou:.6f}")
    table = "\n".join(lines)
    print(table)
    if args.out:
        Path(args.out).write_text(table + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boostmot",
        description="Confidence-boosted one-stage tracking-by-detection over MOT files.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("track", help="run the tracker over a MOT detection file")
    p.add_argument("--det", required=True, help="MOT detection file")
    p.add_argument("--config", help="run config file (flat key = value)")
    p.add_argument("--out", required=True, help="output MOT result file")
    p.add_argument("--preset", choices=["mot17", "mot20"], help="dataset preset")
    p.add_argument("--flags", help='boost flags, e.g. "DLO,S,SB,VT" or "none"')
    p.add_argument("--appearance", help="optional per-frame external similarity file")
    p.add_argument("--normalize-conf", action="store_true",
                   help="rescale detection confidences into [0, 1]")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="evaluate a result file against ground truth")
    p.add_argument("--gt", required=True)
    p.add_argument("--res", required=True)
    p.add_argument("--out", help="write a delimited report here")
    p.add_argument("--iou-gate", type=float, default=0.5)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="generate a synthetic scene (gt.txt, det.txt)")
    p.add_argument("--scene", required=True, help="scene config file")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ablate", help="run a boost-flag ablation matrix on a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--config", help="tracker config applied to every row")
    p.add_argument("--matrix", default=DEFAULT_MATRIX,
                   help="semicolon-separated flag combinations")
    p.add_argument("--out", help="write the comparison table here")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("study", help="match-IoU decay vs frames since last update")
    p.add_argument("--scene", required=True)
    p.add_argument("--config", help="tracker config for the study run")
    p.add_argument("--out", help="write the bucket table here")
    p.set_defaults(func=cmd_study)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("BOOSTMOT_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TrackingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
