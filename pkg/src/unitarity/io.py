"""File formats: channel JSON, trajectory JSON, CSV emitters.

Channel JSON is either an explicit Kraus list

    {"dim": n, "kraus": [[[ [re, im], ... ] per row ] per operator ]}

or a named channel

    {"standard": "<kind>", "param": x}

with kind one of depolarizing, bit_flip, phase_flip, amplitude_damping.
Complex numbers always serialize as two-element [re, im] arrays.

Trajectory JSON is {"dim": n, "times": [...], "channels": [channel, ...]}
with one channel object per time point.
"""

from __future__ import annotations

import json
from typing import Iterable

import numpy as np

from .channels import STANDARD_KINDS, KrausChannel, standard_channel


class FormatError(ValueError):
    """Malformed input file or object."""


def matrix_to_obj(mat: np.ndarray) -> list:
    """Encode a complex matrix as nested [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def matrix_from_obj(obj, what: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: expected nested [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise FormatError(f"{what}: expected shape (rows, cols, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_obj(ch: KrausChannel) -> dict:
    return {"dim": ch.dim, "kraus": [matrix_to_obj(op) for op in ch.kraus]}


def channel_from_obj(obj) -> KrausChannel:
    if not isinstance(obj, dict):
        raise FormatError(f"channel: expected a JSON object, got {type(obj).__name__}")
    if "standard" in obj:
        kind = obj["standard"]
        if kind not in STANDARD_KINDS:
            raise FormatError(
                f"channel: unknown standard kind {kind!r}; expected one of {STANDARD_KINDS}"
            )
        try:
            param = float(obj["param"])
        except (KeyError, TypeError, ValueError):
            raise FormatError("channel: standard form needs a numeric 'param'") from None
        try:
            return standard_channel(kind, param)
        except ValueError as exc:
            raise FormatError(f"channel: {exc}") from None
    if "dim" not in obj or "kraus" not in obj:
        raise FormatError("channel: expected keys 'dim' and 'kraus' (or 'standard')")
    try:
        dim = int(obj["dim"])
    except (TypeError, ValueError):
        raise FormatError("channel: 'dim' must be an integer") from None
    kraus_objs = obj["kraus"]
    if not isinstance(kraus_objs, list) or not kraus_objs:
        raise FormatError("channel: 'kraus' must be a nonempty list")
    ops = tuple(
        matrix_from_obj(op, what=f"kraus[{k}]") for k, op in enumerate(kraus_objs)
    )
    try:
        return KrausChannel(dim, ops)
    except ValueError as exc:
        raise FormatError(f"channel: {exc}") from None


def load_json(path: str):
    """Parse a JSON file, turning syntax errors into FormatError with context."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None


def load_channel(path: str) -> KrausChannel:
    return channel_from_obj(load_json(path))


def save_channel(ch: KrausChannel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_obj(ch), fh)
        fh.write("\n")


def trajectory_from_obj(obj):
    """Parse {"dim", "times", "channels"} into (times, channels)."""
    if not isinstance(obj, dict):
        raise FormatError("trajectory: expected a JSON object")
    for key in ("dim", "times", "channels"):
        if key not in obj:
            raise FormatError(f"trajectory: missing key {key!r}")
    try:
        dim = int(obj["dim"])
        times = [float(t) for t in obj["times"]]
    except (TypeError, ValueError):
        raise FormatError("trajectory: 'dim' must be an int and 'times' numeric") from None
    channels = [channel_from_obj(c) for c in obj["channels"]]
    if len(times) != len(channels):
        raise FormatError(
            f"trajectory: {len(times)} times but {len(channels)} channels"
        )
    for ch in channels:
        if ch.dim != dim:
            raise FormatError(f"trajectory: channel dim {ch.dim} != declared dim {dim}")
    return times, channels


def load_trajectory(path: str):
    return trajectory_from_obj(load_json(path))


TIGHTNESS_HEADER = "du,lb1,lb2,lb1_err,lb2_err,ub,seed"


def write_tightness_csv(records: Iterable, path: str, order: str = "du") -> None:
    """Emit tightness records, sorted by 'du' or by 'ub'."""
    records = list(records)
    if order == "du":
        records.sort(key=lambda r: r.du_value)
    elif order == "ub":
        records.sort(key=lambda r: r.ub)
    else:
        raise ValueError(f"order must be 'du' or 'ub', got {order!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(TIGHTNESS_HEADER + "\n")
        for r in records:
            fh.write(
                f"{r.du_value:.17g},{r.lb1:.17g},{r.lb2:.17g},"
                f"{r.lb1_err:.17g},{r.lb2_err:.17g},{r.ub:.17g},{r.seed}\n"
            )


DISTRIBUTION_HEADER = "bin_lo,bin_hi,count"


def write_distribution_csv(hist, path: str) -> None:
    """Emit one DU histogram with its summary line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# mean={hist.mean:.17g} samples={hist.sample_count} "
            f"env_dim={hist.env_dim} seed={hist.seed}\n"
        )
        fh.write(DISTRIBUTION_HEADER + "\n")
        for lo, hi, count in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.counts):
            fh.write(f"{lo:.17g},{hi:.17g},{count}\n")
