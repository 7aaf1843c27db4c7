"""Distortion measures and their expectations under a reconstruction channel.

Two families of measures exist side by side. Semantic measures compare the
posterior beliefs p_{S|x} and p_{S|y} that the original and reconstructed
symbols induce about the latent semantic variable; symbolic measures price
the substitution of x by y directly. Expected distortions are taken under
p_X(x) p_{Y|X}(y|x), and output symbols with zero marginal mass contribute
nothing (the regular-condition convention that keeps the expectation
continuous in the channel). Sequence-level distortion is the worst
per-position value, giving worst-case guarantees over a block.

Total variation uses the half-L1 convention d_TV(p,q) = 0.5 * sum |p-q|.
KL divergence is evaluated in bits and returns +inf on support mismatch
instead of raising; the solver treats such channels as infeasible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    EmptySequence,
    IndexOutOfRange,
    LengthMismatch,
)
from .probcore import Channel, Distribution, JointSource, posterior_given_x, posterior_given_y

SEMANTIC_KINDS = ("total_variation", "kl_divergence", "chi_squared", "generic_f")
OBSERVATION_KINDS = ("hamming", "squared_error", "custom_matrix")

# integer codes shared with the numeric kernels
SEM_TV, SEM_KL, SEM_CHI2, SEM_FGEN = 0, 1, 2, 3
_SEM_CODES = {
    "total_variation": SEM_TV,
    "kl_divergence": SEM_KL,
    "chi_squared": SEM_CHI2,
    "generic_f": SEM_FGEN,
}


@dataclass(frozen=True, eq=False)
class SemanticMeasure:
    """Divergence between probability distributions over the semantic alphabet.

    generic_f is a tabulated f-divergence: the convex generator is given by
    sample points (t, f(t)) with f(1) = 0 and evaluated by linear
    interpolation, so any bounded divergence can be plugged in without code.
    """

    kind: str
    name: str = ""
    gen_t: np.ndarray | None = None
    gen_f: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in SEMANTIC_KINDS:
            raise DomainError(f"unknown semantic measure kind {self.kind!r}")
        if self.kind == "generic_f":
            t = np.asarray(self.gen_t, dtype=np.float64)
            f = np.asarray(self.gen_f, dtype=np.float64)
            if t.ndim != 1 or t.size < 2 or t.shape != f.shape:
                raise DimensionMismatch("generator samples must be two equal 1-d arrays with >= 2 points")
            if not (np.all(np.isfinite(t)) and np.all(np.isfinite(f))):
                raise DomainError("generator samples must be finite")
            if np.any(np.diff(t) <= 0) or t[0] < 0.0:
                raise DomainError("generator abscissae must be nonnegative and strictly increasing")
            if not (t[0] <= 1.0 <= t[-1]):
                raise DomainError("generator samples must bracket t = 1")
            if abs(float(np.interp(1.0, t, f))) > 1e-12:
                raise DomainError("generator must satisfy f(1) = 0 so identical distributions score 0")
            t.setflags(write=False)
            f.setflags(write=False)
            object.__setattr__(self, "gen_t", t)
            object.__setattr__(self, "gen_f", f)

    @classmethod
    def tv(cls) -> "SemanticMeasure":
        return cls("total_variation", name="tv")

    @classmethod
    def kl(cls) -> "SemanticMeasure":
        return cls("kl_divergence", name="kl")

    @classmethod
    def chi2(cls) -> "SemanticMeasure":
        return cls("chi_squared", name="chi2")

    @classmethod
    def generic_f(cls, name: str, samples) -> "SemanticMeasure":
        samples = np.asarray(samples, dtype=np.float64)
        if samples.ndim != 2 or samples.shape[1] != 2:
            raise DimensionMismatch("generator samples must be an (n, 2) array of (t, f(t)) rows")
        return cls("generic_f", name=name, gen_t=samples[:, 0].copy(), gen_f=samples[:, 1].copy())

    @property
    def code(self) -> int:
        return _SEM_CODES[self.kind]

    @property
    def diameter(self) -> float:
        """Largest possible value on a pair of distributions (inf if unbounded)."""
        if self.kind == "total_variation":
            return 1.0
        if self.kind == "generic_f":
            # bounded by the generator's sampled range endpoints
            return float(max(self.gen_f.max(), 0.0)) if self.gen_f is not None else math.inf
        return math.inf


@dataclass(frozen=True, eq=False)
class ObservationMeasure:
    """Per-symbol substitution cost d_o(x, y) >= 0."""

    kind: str
    matrix: np.ndarray | None = None
    x_values: tuple[float, ...] | None = None
    y_values: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in OBSERVATION_KINDS:
            raise DomainError(f"unknown observation measure kind {self.kind!r}")
        if self.kind == "custom_matrix":
            m = np.asarray(self.matrix, dtype=np.float64)
            if m.ndim != 2 or m.size == 0:
                raise DimensionMismatch("custom cost matrix must be 2-d")
            if not np.all(np.isfinite(m)) or np.any(m < 0.0):
                raise DomainError("custom cost matrix entries must be finite and >= 0")
            m = m.copy()
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)

    @classmethod
    def hamming(cls) -> "ObservationMeasure":
        return cls("hamming")

    @classmethod
    def squared_error(cls, x_values=None, y_values=None) -> "ObservationMeasure":
        xv = tuple(float(v) for v in x_values) if x_values is not None else None
        yv = tuple(float(v) for v in y_values) if y_values is not None else None
        return cls("squared_error", x_values=xv, y_values=yv)

    @classmethod
    def custom(cls, matrix) -> "ObservationMeasure":
        return cls("custom_matrix", matrix=np.asarray(matrix, dtype=np.float64))

    def cost_table(self, num_x: int, num_y: int) -> np.ndarray:
        """Materialize the |X| x |Y| cost table for these alphabet sizes."""
        if self.kind == "hamming":
            table = np.ones((num_x, num_y))
            for i in range(min(num_x, num_y)):
                table[i, i] = 0.0
            return table
        if self.kind == "squared_error":
            xv = np.asarray(self.x_values if self.x_values is not None else range(num_x), dtype=np.float64)
            yv = np.asarray(self.y_values if self.y_values is not None else range(num_y), dtype=np.float64)
            if xv.size != num_x or yv.size != num_y:
                raise DimensionMismatch("numeric labels must cover the alphabets")
            return (xv[:, None] - yv[None, :]) ** 2
        if self.matrix.shape != (num_x, num_y):
            raise DimensionMismatch(
                f"cost matrix has shape {self.matrix.shape}, alphabets need ({num_x}, {num_y})"
            )
        return np.asarray(self.matrix)


@dataclass(frozen=True, eq=False)
class DistortionSpec:
    """A semantic measure paired with a symbolic one."""

    semantic: SemanticMeasure
    symbolic: ObservationMeasure

    @classmethod
    def from_names(cls, semantic: str, symbolic: str) -> "DistortionSpec":
        return cls(parse_semantic_measure(semantic), parse_observation_measure(symbolic))


def parse_semantic_measure(name: str) -> SemanticMeasure:
    """Resolve a CLI/config name: tv | kl | chi2 | matrix:<csv of (t, f(t)) generator samples>."""
    name = name.strip()
    if name == "tv":
        return SemanticMeasure.tv()
    if name == "kl":
        return SemanticMeasure.kl()
    if name == "chi2":
        return SemanticMeasure.chi2()
    if name.startswith("matrix:"):
        path = name.split(":", 1)[1]
        return SemanticMeasure.generic_f(name, _read_csv_matrix(path))
    raise DomainError(f"unknown semantic measure {name!r}")


def parse_observation_measure(name: str) -> ObservationMeasure:
    """Resolve a CLI/config name: hamming | mse | matrix:<csv cost table>."""
    name = name.strip()
    if name == "hamming":
        return ObservationMeasure.hamming()
    if name == "mse":
        return ObservationMeasure.squared_error()
    if name.startswith("matrix:"):
        path = name.split(":", 1)[1]
        return ObservationMeasure.custom(_read_csv_matrix(path))
    raise DomainError(f"unknown observation measure {name!r}")


def _read_csv_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [[float(c) for c in row] for row in csv.reader(fh) if row]
    if not rows:
        raise DomainError(f"empty matrix file {path}")
    return np.asarray(rows, dtype=np.float64)


def semantic_distance(m: SemanticMeasure, p: Distribution, q: Distribution) -> float:
    """d_p(p, q) >= 0; equals 0 on identical distributions.

    KL and chi-squared return +inf (not an exception) on support mismatch.
    """
    pa, qa = p.probs, q.probs
    if pa.size != qa.size:
        raise DimensionMismatch(f"distributions have sizes {pa.size} and {qa.size}")
    return _semantic_distance_arrays(m, pa, qa)


def _semantic_distance_arrays(m: SemanticMeasure, p: np.ndarray, q: np.ndarray) -> float:
    if m.kind == "total_variation":
        return 0.5 * float(np.abs(p - q).sum())
    if m.kind == "kl_divergence":
        mask = p > 0.0
        if np.any(q[mask] <= 0.0):
            return math.inf
        pm = p[mask]
        return max(0.0, float((pm * np.log2(pm / q[mask])).sum()))
    if m.kind == "chi_squared":
        if np.any((q <= 0.0) & (p > 0.0)):
            return math.inf
        mask = q > 0.0
        diff = p[mask] - q[mask]
        return float((diff * diff / q[mask]).sum())
    if np.any((q <= 0.0) & (p > 0.0)):
        return math.inf
    mask = q > 0.0
    ratios = p[mask] / q[mask]
    return float((q[mask] * np.interp(ratios, m.gen_t, m.gen_f)).sum())


def observation_distance(m: ObservationMeasure, x: int, y: int) -> float:
    """d_o(x, y) for single symbols."""
    x, y = int(x), int(y)
    if x < 0 or y < 0:
        raise IndexOutOfRange(f"negative symbol index ({x}, {y})")
    if m.kind == "hamming":
        return 0.0 if x == y else 1.0
    if m.kind == "squared_error":
        xv = m.x_values[x] if m.x_values is not None else float(x)
        yv = m.y_values[y] if m.y_values is not None else float(y)
        return (xv - yv) ** 2
    if x >= m.matrix.shape[0] or y >= m.matrix.shape[1]:
        raise IndexOutOfRange(f"({x}, {y}) outside cost matrix of shape {m.matrix.shape}")
    return float(m.matrix[x, y])


def expected_semantic_distortion(source: JointSource, channel: Channel, m: SemanticMeasure) -> float:
    """E d_p(p_{S|X}, p_{S|Y}) under p_X(x) p_{Y|X}(y|x).

    Terms with p_Y(y) = 0 contribute 0. Returns +inf when any positively
    weighted term is infinite (possible for unbounded measures on custom
    sources, never for mixtures feeding back their own components).
    """
    if channel.num_inputs != source.num_x:
        raise DimensionMismatch(
            f"channel has {channel.num_inputs} inputs, source has {source.num_x} observation symbols"
        )
    joint = source.joint
    p_x = joint.sum(axis=0)
    rows = channel.rows
    p_y = p_x @ rows
    total = 0.0
    for y in range(rows.shape[1]):
        if p_y[y] <= 0.0:
            continue
        post_y = (joint @ rows[:, y]) / p_y[y]
        for x in range(rows.shape[0]):
            weight = p_x[x] * rows[x, y]
            if weight <= 0.0:
                continue
            d = _semantic_distance_arrays(m, joint[:, x] / p_x[x], post_y)
            if not math.isfinite(d):
                return math.inf
            total += weight * d
    return total


def expected_observation_distortion(source: JointSource, channel: Channel, m: ObservationMeasure) -> float:
    """E d_o(X, Y) under p_X(x) p_{Y|X}(y|x)."""
    if channel.num_inputs != source.num_x:
        raise DimensionMismatch(
            f"channel has {channel.num_inputs} inputs, source has {source.num_x} observation symbols"
        )
    p_x = source.joint.sum(axis=0)
    table = m.cost_table(channel.num_inputs, channel.num_outputs)
    return float(np.einsum("x,xy,xy->", p_x, channel.rows, table))


def sequence_observation_distortion(m: ObservationMeasure, xs, ys) -> float:
    """Worst per-position symbolic distortion over a block."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise LengthMismatch(f"sequence lengths differ: {len(xs)} vs {len(ys)}")
    if not xs:
        raise EmptySequence("sequences must have at least one position")
    return max(observation_distance(m, x, y) for x, y in zip(xs, ys))


def sequence_semantic_distortion(source: JointSource, m: SemanticMeasure, xs, ys, channel_or_posteriors) -> float:
    """Worst per-position semantic distortion max_i d_p(p_{S|x_i}, p_{S|y_i}).

    The last argument supplies the per-position posteriors: either a Channel
    (posteriors derived from the source and that channel) or an explicit pair
    (x_posteriors, y_posteriors) of Distribution sequences aligned with the
    block positions.
    """
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise LengthMismatch(f"sequence lengths differ: {len(xs)} vs {len(ys)}")
    if not xs:
        raise EmptySequence("sequences must have at least one position")
    if isinstance(channel_or_posteriors, Channel):
        channel = channel_or_posteriors
        post_x = {x: posterior_given_x(source, x) for x in set(xs)}
        post_y = {y: posterior_given_y(source, channel, y) for y in set(ys)}
        return max(semantic_distance(m, post_x[x], post_y[y]) for x, y in zip(xs, ys))
    px_seq, py_seq = channel_or_posteriors
    px_seq, py_seq = list(px_seq), list(py_seq)
    if len(px_seq) != len(xs) or len(py_seq) != len(ys):
        raise LengthMismatch("posterior sequences must align with the block positions")
    return max(semantic_distance(m, p, q) for p, q in zip(px_seq, py_seq))
