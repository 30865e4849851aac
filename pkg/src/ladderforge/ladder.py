"""Bitrate-ladder construction.

Three ladder families over the same rung grid: predicted (model argmax
per rung plus monotonic correction), fixed (a configured rung to
resolution table), and reference (per-rung best measured quality from an
exhaustive encode log). Every ladder is realized against an encode log
by snapping each rung to the closest logged point in log2 bitrate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import EncodeRecord
from .errors import (
    ConfigMissing,
    NoPointsForResolution,
    NonpositiveBitrate,
    RangeError,
    SchemaError,
)
from .feature_assembly import EncodeMeta, assemble
from .gsm_vif import VifFeatureTensor
from .regressor import ExtraTreesModel, predict_batch

# rung targets in bps: 0.25..10.5 Mbps
DEFAULT_RUNG_BPS = (
    250_000,
    500_000,
    1_000_000,
    2_000_000,
    3_000_000,
    4_000_000,
    5_000_000,
    6_000_000,
    7_000_000,
    8_000_000,
    9_000_000,
    10_500_000,
)

DEFAULT_RESOLUTIONS = (
    (3840, 2160),
    (2560, 1440),
    (1920, 1080),
    (1280, 720),
    (960, 540),
    (768, 432),
    (640, 360),
    (512, 288),
)

LADDER_COLUMNS = ("rung_bps", "width", "height", "crf", "realized_bps", "vmaf")


@dataclass(frozen=True)
class RdPoint:
    """One realized encode: measured bitrate and quality at (w, h, crf)."""

    bitrate_bps: float
    vmaf: float
    crf: int
    width: int
    height: int

    def __post_init__(self):
        if self.bitrate_bps <= 0:
            raise NonpositiveBitrate(f"bitrate must be > 0 bps, got {self.bitrate_bps}")
        if not 0.0 <= self.vmaf <= 100.0:
            raise RangeError(f"vmaf must be in [0, 100], got {self.vmaf}")


@dataclass(frozen=True)
class LadderRung:
    target_bps: float
    width: int
    height: int
    point: RdPoint


@dataclass(frozen=True)
class Ladder:
    rungs: tuple[LadderRung, ...]
    provenance: str  # "predicted" | "fixed" | "reference"

    def resolutions(self) -> list[tuple[int, int]]:
        return [(r.width, r.height) for r in self.rungs]

    def is_monotone(self) -> bool:
        pix = [r.width * r.height for r in self.rungs]
        return all(a <= b for a, b in zip(pix, pix[1:]))


def pixel_count(resolution: tuple[int, int]) -> int:
    return resolution[0] * resolution[1]


def validate_rungs(rungs) -> tuple[float, ...]:
    rungs = tuple(float(b) for b in rungs)
    if not rungs:
        raise ValueError("rung list is empty")
    if rungs[0] <= 0:
        raise ValueError(f"rung bitrates must be > 0, got {rungs[0]}")
    for a, b in zip(rungs, rungs[1:]):
        if b <= a:
            raise ValueError(f"rung bitrates must be strictly increasing, got {a} then {b}")
    return rungs


def predict_quality_grid(
    model: ExtraTreesModel,
    vif: VifFeatureTensor,
    resolutions,
    rungs=DEFAULT_RUNG_BPS,
) -> np.ndarray:
    """Predicted quality for every (resolution, rung) pair.

    Returns a |resolutions| x |rungs| array in the given orders; each
    entry is the model's prediction for this video encoded at that
    resolution and target bitrate.
    """
    resolutions = list(resolutions)
    if not resolutions:
        raise ValueError("resolution list is empty")
    rungs = validate_rungs(rungs)
    vectors = [
        assemble(model.approach, vif, EncodeMeta(bps, w, h)).values
        for (w, h) in resolutions
        for bps in rungs
    ]
    flat = predict_batch(model, np.stack(vectors))
    return flat.reshape(len(resolutions), len(rungs))


def select_ladder(grid, resolutions, rungs) -> list[tuple[int, int]]:
    """Per rung, the resolution with the highest predicted quality.

    Exact ties go to the smaller resolution (fewer pixels).
    """
    grid = np.asarray(grid, dtype=np.float64)
    resolutions = list(resolutions)
    rungs = validate_rungs(rungs)
    if grid.shape != (len(resolutions), len(rungs)):
        raise ValueError(
            f"grid shape {grid.shape} does not match "
            f"{len(resolutions)} resolutions x {len(rungs)} rungs"
        )
    choices = []
    for j in range(grid.shape[1]):
        column = grid[:, j]
        best = column.max()
        winners = [resolutions[i] for i in np.flatnonzero(column == best)]
        choices.append(min(winners, key=pixel_count))
    return choices


def monotonic_correct(choices) -> list[tuple[int, int]]:
    """Force resolution to be non-decreasing in rung bitrate.

    Scans from the highest rung down; each choice is capped at the
    corrected choice above it. The highest rung is never changed.
    """
    corrected = [tuple(c) for c in choices]
    for i in range(len(corrected) - 2, -1, -1):
        if pixel_count(corrected[i]) > pixel_count(corrected[i + 1]):
            corrected[i] = corrected[i + 1]
    return corrected


def _group_by_resolution(log) -> dict[tuple[int, int], list[EncodeRecord]]:
    groups: dict[tuple[int, int], list[EncodeRecord]] = {}
    for record in log:
        groups.setdefault((record.width, record.height), []).append(record)
    return groups


def closest_point(records, target_bps: float) -> EncodeRecord:
    """The record whose bitrate is nearest the target in log2 distance.

    Ties break toward the lower bitrate.
    """
    log_target = math.log2(target_bps)
    return min(
        records,
        key=lambda r: (abs(math.log2(r.bitrate_bps) - log_target), r.bitrate_bps),
    )


def _as_point(record: EncodeRecord) -> RdPoint:
    return RdPoint(
        bitrate_bps=record.bitrate_bps,
        vmaf=record.vmaf,
        crf=record.crf,
        width=record.width,
        height=record.height,
    )


def realize_ladder(choices, rungs, log, provenance: str = "predicted") -> Ladder:
    """Snap each rung's chosen resolution to its closest logged point."""
    rungs = validate_rungs(rungs)
    choices = [tuple(c) for c in choices]
    if len(choices) != len(rungs):
        raise ValueError(f"{len(choices)} choices for {len(rungs)} rungs")
    groups = _group_by_resolution(log)
    realized = []
    for target, (w, h) in zip(rungs, choices):
        records = groups.get((w, h))
        if not records:
            raise NoPointsForResolution(
                f"encode log has no points at {w}x{h} for rung {target:g} bps"
            )
        record = closest_point(records, target)
        realized.append(LadderRung(target, w, h, _as_point(record)))
    return Ladder(tuple(realized), provenance)


def reference_choices(log, rungs) -> list[tuple[int, int]]:
    """Per rung, the logged resolution whose closest point measures best.

    Ties go to the smaller resolution. No monotonic correction here.
    """
    rungs = validate_rungs(rungs)
    groups = _group_by_resolution(log)
    if not groups:
        raise NoPointsForResolution("encode log is empty")
    ordered = sorted(groups, key=pixel_count)
    choices = []
    for target in rungs:
        best_res = None
        best_vmaf = -math.inf
        for res in ordered:
            vmaf = closest_point(groups[res], target).vmaf
            if vmaf > best_vmaf:
                best_res, best_vmaf = res, vmaf
        choices.append(best_res)
    return choices


def reference_ladder(log, rungs=DEFAULT_RUNG_BPS, correct: bool = True) -> Ladder:
    """Best measured resolution per rung from an exhaustive encode log.

    Applies the same monotonic correction as predicted ladders unless
    disabled, then realizes the corrected choices.
    """
    choices = reference_choices(log, rungs)
    if correct:
        choices = monotonic_correct(choices)
    return realize_ladder(choices, rungs, log, provenance="reference")


def fixed_ladder(table, log) -> Ladder:
    """Realize a configured rung -> resolution table against the log.

    ``table`` is an ascending sequence of (target_bps, (width, height)).
    """
    if not table:
        raise ConfigMissing("fixed-ladder table is missing or empty")
    rungs = [bps for bps, _ in table]
    choices = [tuple(res) for _, res in table]
    return realize_ladder(choices, rungs, log, provenance="fixed")


def predicted_ladder(
    model: ExtraTreesModel,
    vif: VifFeatureTensor,
    log,
    rungs=DEFAULT_RUNG_BPS,
    resolutions=DEFAULT_RESOLUTIONS,
    correct: bool = True,
) -> Ladder:
    """Model-driven ladder: argmax selection, correction, realization."""
    grid = predict_quality_grid(model, vif, resolutions, rungs)
    choices = select_ladder(grid, resolutions, rungs)
    if correct:
        choices = monotonic_correct(choices)
    return realize_ladder(choices, rungs, log, provenance="predicted")


# ---------------------------------------------------------------------------
# ladder CSV and summary text
# ---------------------------------------------------------------------------

def ladder_csv_text(ladder: Ladder) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LADDER_COLUMNS)
    for rung in ladder.rungs:
        writer.writerow(
            [
                repr(float(rung.target_bps)),
                rung.width,
                rung.height,
                rung.point.crf,
                repr(float(rung.point.bitrate_bps)),
                repr(float(rung.point.vmaf)),
            ]
        )
    return buf.getvalue()


def parse_ladder_csv(path, provenance: str = "unknown") -> Ladder:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"unreadable ladder file {path}: {exc}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != LADDER_COLUMNS:
        raise SchemaError(
            f"{path}: expected header {','.join(LADDER_COLUMNS)}, got {rows[0] if rows else 'nothing'}"
        )
    rungs = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(LADDER_COLUMNS):
            raise SchemaError(f"{path} line {line}: expected {len(LADDER_COLUMNS)} fields")
        try:
            target = float(row[0])
            w, h, crf = int(row[1]), int(row[2]), int(row[3])
            point = RdPoint(float(row[4]), float(row[5]), crf, w, h)
        except ValueError as exc:
            raise SchemaError(f"{path} line {line}: {exc}") from None
        rungs.append(LadderRung(target, w, h, point))
    if not rungs:
        raise SchemaError(f"{path}: ladder has no rungs")
    return Ladder(tuple(rungs), provenance)


def ladder_summary_text(ladder: Ladder) -> str:
    lines = [
        f"provenance: {ladder.provenance}",
        f"rungs: {len(ladder.rungs)}",
        f"monotone: {'yes' if ladder.is_monotone() else 'no'}",
    ]
    for rung in ladder.rungs:
        lines.append(
            f"  {rung.target_bps / 1e6:g} Mbps -> {rung.width}x{rung.height}"
            f" crf {rung.point.crf},"
            f" realized {rung.point.bitrate_bps / 1e6:.3f} Mbps,"
            f" vmaf {rung.point.vmaf:.2f}"
        )
    return "\n".join(lines) + "\n"
