"""Evaluation: CLEAR-style MOTA with identity switches, and global IDF1.

Frame-level matching keeps a ground-truth object with its previous predicted
id while their IoU stays above the gate, then resolves the rest with an
optimal assignment; tie-breaking is deterministic (previous assignment,
then lowest gt id). IDF1 comes from one global bipartite matching between
gt and predicted trajectories maximizing identity-consistent frame matches.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .association import hungarian
from .geometry import BBox, iou_batch

INFEASIBLE = 1e9

FrameBoxes = dict[int, list[tuple[int, BBox]]]


@dataclass
class EvalReport:
    mota: float = 1.0
    idf1: float = 1.0
    idsw: int = 0
    num_ids: int = 0
    fp: int = 0
    fn: int = 0
    gt_count: int = 0
    idtp: int = 0
    idfp: int = 0
    idfn: int = 0
    sequences: dict[str, "EvalReport"] = field(default_factory=dict)


def _boxes_array(items: list[tuple[int, BBox]]) -> np.ndarray:
    return np.array([[b.x, b.y, b.w, b.h] for _, b in items], dtype=np.float64).reshape(len(items), 4)


def match_frame(gts: list[tuple[int, BBox]], preds: list[tuple[int, BBox]],
                prev: dict[int, int], iou_gate: float = 0.5) -> dict[int, int]:
    """One frame's gt-to-prediction correspondence.

    Returns {gt id: pred id}. ``prev`` is the surviving correspondence from
    earlier frames; a previously matched pair is kept whenever both ids are
    present and still overlap above the gate.
    """
    gts = sorted(gts, key=lambda item: item[0])
    preds = sorted(preds, key=lambda item: item[0])
    if not gts or not preds:
        return {}
    iou_m = iou_batch(_boxes_array(gts), _boxes_array(preds))
    gt_ids = [g for g, _ in gts]
    pred_ids = [p for p, _ in preds]
    pred_index = {p: j for j, p in enumerate(pred_ids)}

    corr: dict[int, int] = {}
    used_preds: set[int] = set()
    for i, g in enumerate(gt_ids):
        p = prev.get(g)
        if p is not None and p in pred_index and p not in used_preds:
            j = pred_index[p]
            if iou_m[i, j] >= iou_gate:
                corr[g] = p
                used_preds.add(p)

    free_gt = [i for i, g in enumerate(gt_ids) if g not in corr]
    free_pred = [j for j, p in enumerate(pred_ids) if p not in used_preds]
    if free_gt and free_pred:
        sub = iou_m[np.ix_(free_gt, free_pred)]
        cost = np.where(sub >= iou_gate, 1.0 - sub, INFEASIBLE)
        rows, cols = hungarian(cost)
        for r, c in zip(rows, cols):
            if cost[r, c] < INFEASIBLE:
                corr[gt_ids[free_gt[r]]] = pred_ids[free_pred[c]]
    return corr


def evaluate(gt: FrameBoxes, res: FrameBoxes, iou_gate: float = 0.5) -> EvalReport:
    """CLEAR counts plus IDF1 over the union of gt and result frames."""
    frames = sorted(set(gt) | set(res))
    last_match: dict[int, int] = {}
    fp = fn = idsw = gt_count = 0

    for frame in frames:
        gts = gt.get(frame, [])
        preds = res.get(frame, [])
        gt_count += len(gts)
        # The last known correspondence (surviving gaps) is the kept-pair preference.
        corr = match_frame(gts, preds, last_match, iou_gate)
        fn += len(gts) - len(corr)
        fp += len(preds) - len(corr)
        for g, p in corr.items():
            if g in last_match and last_match[g] != p:
                idsw += 1
            last_match[g] = p

    idtp, idfp, idfn = _identity_counts(gt, res, iou_gate)
    denom = 2 * idtp + idfp + idfn
    report = EvalReport(
        mota=1.0 - (fp + fn + idsw) / max(gt_count, 1),
        idf1=(2.0 * idtp / denom) if denom else 0.0,
        idsw=idsw,
        num_ids=count_ids(res),
        fp=fp, fn=fn, gt_count=gt_count,
        idtp=idtp, idfp=idfp, idfn=idfn)
    return report


def _identity_counts(gt: FrameBoxes, res: FrameBoxes, iou_gate: float) -> tuple[int, int, int]:
    """(IDTP, IDFP, IDFN) under the optimal global gt-track to pred-track matching."""
    gt_len: dict[int, int] = {}
    pred_len: dict[int, int] = {}
    overlap: dict[tuple[int, int], int] = {}
    for frame in sorted(set(gt) | set(res)):
        gts = gt.get(frame, [])
        preds = res.get(frame, [])
        for g, _ in gts:
            gt_len[g] = gt_len.get(g, 0) + 1
        for p, _ in preds:
            pred_len[p] = pred_len.get(p, 0) + 1
        if gts and preds:
            iou_m = iou_batch(_boxes_array(gts), _boxes_array(preds))
            covered = iou_m >= iou_gate
            for i, (g, _) in enumerate(gts):
                for j, (p, _) in enumerate(preds):
                    if covered[i, j]:
                        overlap[(g, p)] = overlap.get((g, p), 0) + 1

    gt_ids = sorted(gt_len)
    pred_ids = sorted(pred_len)
    total_gt = sum(gt_len.values())
    total_pred = sum(pred_len.values())
    idtp = 0
    if gt_ids and pred_ids and overlap:
        gt_pos = {g: i for i, g in enumerate(gt_ids)}
        pred_pos = {p: j for j, p in enumerate(pred_ids)}
        gain = np.zeros((len(gt_ids), len(pred_ids)))
        for (g, p), count in overlap.items():
            gain[gt_pos[g], pred_pos[p]] = count
        rows, cols = hungarian(-gain)
        idtp = int(sum(gain[r, c] for r, c in zip(rows, cols)))
    return idtp, total_pred - idtp, total_gt - idtp


def count_ids(res: FrameBoxes) -> int:
    """Distinct track ids appearing anywhere in the results."""
    ids = set()
    for items in res.values():
        for p, _ in items:
            ids.add(p)
    return len(ids)


def count_idsw(gt: FrameBoxes, res: FrameBoxes, iou_gate: float = 0.5) -> int:
    return evaluate(gt, res, iou_gate).idsw


def combine_reports(parts: dict[str, EvalReport]) -> EvalReport:
    """Pool per-sequence counts into one report (CLEAR counts are additive)."""
    total = EvalReport(sequences=dict(parts))
    for rep in parts.values():
        total.fp += rep.fp
        total.fn += rep.fn
        total.idsw += rep.idsw
        total.gt_count += rep.gt_count
        total.num_ids += rep.num_ids
        total.idtp += rep.idtp
        total.idfp += rep.idfp
        total.idfn += rep.idfn
    total.mota = 1.0 - (total.fp + total.fn + total.idsw) / max(total.gt_count, 1)
    denom = 2 * total.idtp + total.idfp + total.idfn
    total.idf1 = (2.0 * total.idtp / denom) if denom else 0.0
    return total


def format_report(report: EvalReport, name: str = "all") -> str:
    lines = [f"{'sequence':<12} {'MOTA':>8} {'IDF1':>8} {'IDSW':>6} {'IDs':>6} "
             f"{'FP':>6} {'FN':>6} {'GT':>7}"]
    def row(label, rep):
        return (f"{label:<12} {rep.mota:>8.4f} {rep.idf1:>8.4f} {rep.idsw:>6d} "
                f"{rep.num_ids:>6d} {rep.fp:>6d} {rep.fn:>6d} {rep.gt_count:>7d}")
    for label, rep in report.sequences.items():
        lines.append(row(label, rep))
    lines.append(row(name, report))
    return "\n".join(lines)


def report_csv(report: EvalReport, name: str = "all") -> str:
    header = "sequence,mota,idf1,idsw,ids,fp,fn,gt_count"
    def row(label, rep):
        return (f"{label},{rep.mota:.6f},{rep.idf1:.6f},{rep.idsw},{rep.num_ids},"
                f"{rep.fp},{rep.fn},{rep.gt_count}")
    lines = [header]
    for label, rep in report.sequences.items():
        lines.append(row(label, rep))
    lines.append(row(name, report))
    return "\n".join(lines)
