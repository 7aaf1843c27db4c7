"""Finite-alphabet probability primitives.

Distributions, joint semantic sources p_{S,X}, channels p_{Y|X}, Bayes
posteriors, and base-2 information measures shared by every other module.

Conventions:
  * logarithms are base 2, so entropies and rates are in bits;
  * 0 * log 0 := 0, while 0/0 in a posterior is an error surfaced to the
    caller (expected-distortion code decides how zero-mass outputs are
    handled, not this module);
  * alphabets are index sets 0..n-1; string labels are metadata only;
  * probability vectors must sum to 1 within 1e-9 and are renormalized
    exactly once at construction, so downstream code sees exact sums.

All types are immutable after construction and all operations are pure,
so concurrent use needs no synchronization.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    IndexOutOfRange,
    ZeroMassOutput,
    ZeroMassSymbol,
)

SUM_TOL = 1e-9
_NEG_TOL = 1e-12

PROVENANCES = ("closed_form", "solver", "simulated")


def _clean_probs(values, name: str, *, ndim: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != ndim or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    if np.any(arr < -_NEG_TOL):
        raise DomainError(f"{name} contains negative entries (min {arr.min()})")
    arr = np.where(arr < 0.0, 0.0, arr)
    total = float(arr.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise DomainError(f"{name} must sum to 1 within {SUM_TOL}, got {total}")
    arr = arr / total
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        probs = _clean_probs(self.probs, "Distribution.probs", ndim=1)
        object.__setattr__(self, "probs", probs)
        if self.labels is not None:
            labels = tuple(str(v) for v in self.labels)
            if len(labels) != probs.size:
                raise DimensionMismatch("labels length must match alphabet size")
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.probs.size)

    def __getitem__(self, i: int) -> float:
        return float(self.probs[i])


@dataclass(frozen=True, eq=False)
class JointSource:
    """Joint law p_{S,X}: rows index the semantic symbol s, columns the observation x."""

    joint: np.ndarray
    s_labels: tuple[str, ...] | None = None
    x_labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        joint = _clean_probs(self.joint, "JointSource.joint", ndim=2)
        object.__setattr__(self, "joint", joint)
        for attr, size in (("s_labels", joint.shape[0]), ("x_labels", joint.shape[1])):
            val = getattr(self, attr)
            if val is not None:
                val = tuple(str(v) for v in val)
                if len(val) != size:
                    raise DimensionMismatch(f"{attr} length must be {size}")
                object.__setattr__(self, attr, val)

    @property
    def num_s(self) -> int:
        return int(self.joint.shape[0])

    @property
    def num_x(self) -> int:
        return int(self.joint.shape[1])

    @property
    def zero_mass_x(self) -> tuple[int, ...]:
        """Observation symbols that never occur (flagged, not rejected)."""
        return tuple(int(x) for x in np.flatnonzero(self.joint.sum(axis=0) == 0.0))


@dataclass(frozen=True, eq=False)
class Channel:
    """Conditional law p_{Y|X}: row x holds the output distribution given input x."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.rows, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise DimensionMismatch(f"Channel.rows must be a 2-d matrix, got shape {arr.shape}")
        cleaned = np.stack([_clean_probs(arr[x], f"Channel row {x}", ndim=1) for x in range(arr.shape[0])])
        cleaned.setflags(write=False)
        object.__setattr__(self, "rows", cleaned)

    @property
    def num_inputs(self) -> int:
        return int(self.rows.shape[0])

    @property
    def num_outputs(self) -> int:
        return int(self.rows.shape[1])

    @classmethod
    def identity(cls, n: int) -> "Channel":
        return cls(np.eye(n))

    @classmethod
    def binary(cls, w: float, z: float) -> "Channel":
        """Binary channel parameterized by w = p(y=0|x=0) and z = p(y=0|x=1)."""
        return cls(np.array([[w, 1.0 - w], [z, 1.0 - z]]))


@dataclass(frozen=True)
class RDPoint:
    """One point of a rate-distortion trade-off surface."""

    rate: float
    d_p: float
    d_o: float
    provenance: str = field(default="solver")

    def __post_init__(self) -> None:
        for name in ("rate", "d_p", "d_o"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise DomainError(f"RDPoint.{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)
        if self.provenance not in PROVENANCES:
            raise DomainError(f"provenance must be one of {PROVENANCES}")


def marginal_x(source: JointSource) -> Distribution:
    """Column marginal p_X(x) = sum_s p_{S,X}(s,x)."""
    return Distribution(source.joint.sum(axis=0))


def marginal_s(source: JointSource) -> Distribution:
    """Row marginal p_S(s) = sum_x p_{S,X}(s,x)."""
    return Distribution(source.joint.sum(axis=1))


def posterior_given_x(source: JointSource, x: int) -> Distribution:
    """Bayes posterior p_{S|x}(s) = p_{S,X}(s,x) / p_X(x)."""
    if not 0 <= x < source.num_x:
        raise IndexOutOfRange(f"x={x} outside alphabet of size {source.num_x}")
    col = source.joint[:, x]
    mass = float(col.sum())
    if mass <= 0.0:
        raise ZeroMassSymbol(f"p_X({x}) = 0; posterior undefined")
    return Distribution(col / mass)


def output_distribution(source: JointSource, channel: Channel) -> Distribution:
    """Output marginal p_Y(y) = sum_x p_{Y|X}(y|x) p_X(x)."""
    if channel.num_inputs != source.num_x:
        raise DimensionMismatch(
            f"channel has {channel.num_inputs} inputs, source has {source.num_x} observation symbols"
        )
    p_x = source.joint.sum(axis=0)
    return Distribution(p_x @ channel.rows)


def posterior_given_y(source: JointSource, channel: Channel, y: int) -> Distribution:
    """Posterior p_{S|y} through the Markov chain S - X - Y.

    p_{S|y}(s) = sum_x p_{Y|X}(y|x) p_{S,X}(s,x) / p_Y(y). Raises
    ZeroMassOutput when p_Y(y) = 0; expected-distortion code treats such
    outputs as contributing nothing rather than calling this.
    """
    if channel.num_inputs != source.num_x:
        raise DimensionMismatch(
            f"channel has {channel.num_inputs} inputs, source has {source.num_x} observation symbols"
        )
    if not 0 <= y < channel.num_outputs:
        raise IndexOutOfRange(f"y={y} outside alphabet of size {channel.num_outputs}")
    weights = channel.rows[:, y]
    p_y = float(source.joint.sum(axis=0) @ weights)
    if p_y <= 0.0:
        raise ZeroMassOutput(f"p_Y({y}) = 0; posterior undefined")
    return Distribution((source.joint @ weights) / p_y)


def entropy_bits(probs) -> float:
    """Shannon entropy of a probability vector, in bits, with 0 log 0 = 0."""
    arr = np.asarray(probs, dtype=np.float64)
    pos = arr[arr > 0.0]
    return float(max(0.0, -(pos * np.log2(pos)).sum()))


def binary_entropy(p: float) -> float:
    """h2(p) = -p log2 p - (1-p) log2(1-p), with h2(0) = h2(1) = 0."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary_entropy argument must lie in [0,1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def mutual_information(source_x: Distribution, channel: Channel) -> float:
    """I(X;Y) in bits for X ~ source_x passed through the channel."""
    p_x = source_x.probs
    if channel.num_inputs != p_x.size:
        raise DimensionMismatch(
            f"channel has {channel.num_inputs} inputs, distribution has {p_x.size} symbols"
        )
    rows = channel.rows
    p_y = p_x @ rows
    total = 0.0
    for x in range(p_x.size):
        px = p_x[x]
        if px <= 0.0:
            continue
        row = rows[x]
        mask = row > 0.0
        total += px * float((row[mask] * np.log2(row[mask] / p_y[mask])).sum())
    return max(0.0, total)


def load_source_json(path) -> JointSource:
    """Read a JSON source description: {"joint": [[...], ...], "s_labels": [...], "x_labels": [...]}.

    Row index is the semantic symbol s, column index the observation x.
    """
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if "joint" not in payload:
        raise DomainError(f"source file {path} lacks a 'joint' matrix")
    return JointSource(
        np.asarray(payload["joint"], dtype=np.float64),
        s_labels=tuple(payload["s_labels"]) if payload.get("s_labels") else None,
        x_labels=tuple(payload["x_labels"]) if payload.get("x_labels") else None,
    )
