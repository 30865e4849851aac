"""Feature-vector assembly for the nine predictor input layouts.

An approach selects which pooled information blocks feed the regressor:

    1  per-scale (4)                          + metadata
    2  per-band (8)                           + metadata
    3  per-eigenchannel (72)                  + metadata
    4  per-scale + motion                     + metadata
    5  per-band + motion                      + metadata
    6  per-eigenchannel + motion              + metadata
    7  per-scale + motion + diff per-scale    + metadata
    8  per-band + motion + diff per-band      + metadata
    9  per-eigenchannel + motion + diff per-eigenchannel + metadata

Metadata is always the final three slots: log2(bitrate_bps), width/3840,
height/3840.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MissingDiffFeatures, NonpositiveBitrate, UnknownApproach
from .gsm_vif import VifFeatureTensor

_DIM_SCALE = 3840.0
META_COLUMNS = ["log2_bitrate", "width_scaled", "height_scaled"]

# which pooled block each approach uses: (frame granularity, motion, diff granularity)
_APPROACH_PLAN = {
    1: ("scale", False, None),
    2: ("band", False, None),
    3: ("eig", False, None),
    4: ("scale", True, None),
    5: ("band", True, None),
    6: ("eig", True, None),
    7: ("scale", True, "scale"),
    8: ("band", True, "band"),
    9: ("eig", True, "eig"),
}

_GRANULARITY_LEN = {"scale": 4, "band": 8, "eig": 72}

APPROACH_FEATURE_LENGTHS = {
    a: _GRANULARITY_LEN[frame]
    + (1 if motion else 0)
    + (_GRANULARITY_LEN[diff] if diff else 0)
    + len(META_COLUMNS)
    for a, (frame, motion, diff) in _APPROACH_PLAN.items()
}


@dataclass(frozen=True)
class EncodeMeta:
    """Hypothetical encode described by bitrate and output resolution."""

    bitrate_bps: float
    width: int
    height: int


@dataclass(frozen=True)
class FeatureVector:
    approach: int
    values: np.ndarray
    target: float | None = field(default=None)

    def __post_init__(self):
        if self.approach not in APPROACH_FEATURE_LENGTHS:
            raise UnknownApproach(f"approach must be 1..9, got {self.approach}")
        expected = APPROACH_FEATURE_LENGTHS[self.approach]
        if np.asarray(self.values).shape != (expected,):
            raise ValueError(
                f"approach {self.approach} expects {expected} values, "
                f"got shape {np.asarray(self.values).shape}"
            )


def _plan(approach: int):
    try:
        return _APPROACH_PLAN[approach]
    except KeyError:
        raise UnknownApproach(f"approach must be 1..9, got {approach}") from None


def normalize_meta(meta: EncodeMeta) -> np.ndarray:
    """(log2 bitrate, scaled width, scaled height)."""
    if meta.bitrate_bps <= 0:
        raise NonpositiveBitrate(f"bitrate must be > 0 bps, got {meta.bitrate_bps}")
    return np.array(
        [math.log2(meta.bitrate_bps), meta.width / _DIM_SCALE, meta.height / _DIM_SCALE]
    )


def _block(feats, granularity: str) -> np.ndarray:
    if granularity == "scale":
        return feats.per_scale
    if granularity == "band":
        return feats.per_band.ravel()
    return feats.per_eig.ravel()


def assemble(
    approach: int,
    tensor: VifFeatureTensor,
    meta: EncodeMeta,
    target: float | None = None,
) -> FeatureVector:
    """Concatenate the approach's feature blocks with encode metadata."""
    frame_gran, motion, diff_gran = _plan(approach)
    parts = [_block(tensor.frame_feats, frame_gran)]
    if motion or diff_gran:
        if not tensor.has_motion:
            raise MissingDiffFeatures(
                f"approach {approach} needs frame-difference features; "
                f"video has {tensor.frame_count} frame(s)"
            )
    if motion:
        parts.append(np.array([tensor.motion]))
    if diff_gran:
        parts.append(_block(tensor.diff_feats, diff_gran))
    parts.append(normalize_meta(meta))
    return FeatureVector(approach, np.concatenate(parts), target)


def _block_names(prefix: str, granularity: str) -> list[str]:
    if granularity == "scale":
        return [f"{prefix}_s{k}" for k in range(1, 5)]
    if granularity == "band":
        return [f"{prefix}_s{k}_b{b}" for k in range(1, 5) for b in (1, 2)]
    return [
        f"{prefix}_s{k}_b{b}_e{j}"
        for k in range(1, 5)
        for b in (1, 2)
        for j in range(1, 10)
    ]


def column_names(approach: int) -> list[str]:
    """Feature column names in assembly order, metadata last."""
    frame_gran, motion, diff_gran = _plan(approach)
    names = _block_names("frame_info", frame_gran)
    if motion:
        names.append("motion_mean_abs")
    if diff_gran:
        names += _block_names("diff_info", diff_gran)
    return names + list(META_COLUMNS)
