"""Exact rate-distortion trade-off for the doubly symmetric binary source.

The source couples a latent state bit S with a transmitted bit X through
p_S(0) = rho and the row-stochastic matrix

    p_{X|S} = [[q1, 1-q1],
               [1-q2, q2]].

For the symmetric family rho = 1/2, q1 = q2 = q the minimum rate under a
total-variation semantic constraint D_p and a Hamming symbolic constraint
D_o has a closed form driven by the contrast C = |1 - 2q|:

    R(D_p, D_o) = 1 - h2((1 - sqrt(1 - 2 D_p / C)) / 2)   if D_p <= a(D_o),
    R(D_p, D_o) = 1 - h2(min(D_o, 1/2))                   otherwise,

with the semantic-slack threshold a(D_o) = 2 C D_o (1 - D_o) for
D_o <= 1/2 and C/2 beyond. Above the threshold the semantic constraint
stops binding and the classical binary rate-distortion function takes over.

Channels over this source are parameterized by (w, z) with
w = p(y=0|x=0), z = p(y=0|x=1). The induced expected distortions are

    gamma(w, z)  = (1 + z - w) / 2                       (Hamming)
    lambda(w, z) = C (wz/(w+z) + (1-w)(1-z)/(2-w-z))     (total variation)

with removable 0/0 singularities at w = z = 0 and w = z = 1 set to their
limits (0). These maps double as the exact oracle for the generic
expected-distortion machinery and for the numerical solver.

Degenerate contrast C = 0 (q = 1/2) makes the semantic constraint vacuous:
lambda is identically 0 and the classical branch applies for every D_p.
Bounds above 1 are clamped to 1 with a warning since both distortion
measures have diameter 1 here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HypothesisViolated
from .probcore import Channel, JointSource, binary_entropy

_HYP_TOL = 1e-9


@dataclass(frozen=True)
class BinarySourceSpec:
    """Parameters (rho, q1, q2) of the binary semantic source."""

    rho: float
    q1: float
    q2: float

    def __post_init__(self) -> None:
        for name in ("rho", "q1", "q2"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0,1], got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def symmetric(cls, q: float) -> "BinarySourceSpec":
        return cls(0.5, q, q)

    @property
    def is_symmetric(self) -> bool:
        return abs(self.rho - 0.5) <= _HYP_TOL and abs(self.q1 - self.q2) <= _HYP_TOL

    @property
    def contrast(self) -> float:
        """C = |1 - 2q| for the symmetric family."""
        _require_symmetric(self)
        return abs(1.0 - 2.0 * self.q1)

    def joint_source(self) -> JointSource:
        """Materialize p_{S,X}(s,x) = p_S(s) p_{X|S}(x|s)."""
        p_s = np.array([self.rho, 1.0 - self.rho])
        p_x_given_s = np.array([[self.q1, 1.0 - self.q1], [1.0 - self.q2, self.q2]])
        return JointSource(p_s[:, None] * p_x_given_s)


def _require_symmetric(spec: BinarySourceSpec) -> None:
    if not spec.is_symmetric:
        raise HypothesisViolated(
            f"closed form requires rho = 0.5 and q1 = q2 (got rho={spec.rho}, q1={spec.q1}, q2={spec.q2})"
        )


def _clamp_bound(value: float, name: str) -> float:
    v = float(value)
    if not math.isfinite(v) or v < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {v}")
    if v > 1.0:
        warnings.warn(f"{name} = {v} exceeds the distortion diameter; clamped to 1", stacklevel=3)
        return 1.0
    return v


def threshold_a(spec: BinarySourceSpec, d_o: float) -> float:
    """Semantic-slack threshold a(D_o) separating the two closed-form branches."""
    _require_symmetric(spec)
    d_o = _clamp_bound(d_o, "d_o")
    c = spec.contrast
    if d_o <= 0.5:
        return 2.0 * c * d_o * (1.0 - d_o)
    return c / 2.0


def closed_form_rate(spec: BinarySourceSpec, d_p: float, d_o: float) -> float:
    """Minimum rate in bits at semantic bound d_p and symbolic bound d_o."""
    _require_symmetric(spec)
    d_p = _clamp_bound(d_p, "d_p")
    d_o = _clamp_bound(d_o, "d_o")
    c = spec.contrast
    if c > 0.0 and d_p <= threshold_a(spec, d_o):
        root = math.sqrt(max(0.0, 1.0 - 2.0 * d_p / c))
        return 1.0 - binary_entropy((1.0 - root) / 2.0)
    return 1.0 - binary_entropy(min(d_o, 0.5))


def lambda_semantic(spec: BinarySourceSpec, w: float, z: float) -> float:
    """Expected total-variation semantic distortion of the (w, z) channel."""
    _require_symmetric(spec)
    w, z = _require_unit(w, "w"), _require_unit(z, "z")
    c = spec.contrast
    first = w * z / (w + z) if (w + z) > 0.0 else 0.0
    second = (1.0 - w) * (1.0 - z) / (2.0 - w - z) if (2.0 - w - z) > 0.0 else 0.0
    return c * (first + second)


def gamma_symbolic(w: float, z: float) -> float:
    """Expected Hamming distortion of the (w, z) channel under a uniform input."""
    w, z = _require_unit(w, "w"), _require_unit(z, "z")
    return (1.0 + z - w) / 2.0


def _require_unit(v: float, name: str) -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"{name} must lie in [0,1], got {v}")
    return v


def optimal_channel(spec: BinarySourceSpec, d_p: float, d_o: float) -> Channel:
    """A channel achieving closed_form_rate(spec, d_p, d_o).

    Below the threshold this is the pair w = (1 + sqrt(1 - 2 D_p / C)) / 2,
    z = 1 - w, which meets the semantic bound with equality; above it, the
    classical binary test channel with crossover min(D_o, 1/2). Minimizers
    need not be unique; this returns one.
    """
    _require_symmetric(spec)
    d_p = _clamp_bound(d_p, "d_p")
    d_o = _clamp_bound(d_o, "d_o")
    c = spec.contrast
    if c > 0.0 and d_p <= threshold_a(spec, d_o):
        root = math.sqrt(max(0.0, 1.0 - 2.0 * d_p / c))
        w = (1.0 + root) / 2.0
        return Channel.binary(w, 1.0 - w)
    cross = min(d_o, 0.5)
    return Channel.binary(1.0 - cross, cross)


def spec_from_joint(source: JointSource, tol: float = 1e-9) -> BinarySourceSpec | None:
    """Recover (rho, q1, q2) from a 2x2 joint source, or None when it does not fit."""
    if source.num_s != 2 or source.num_x != 2:
        return None
    joint = source.joint
    rho = float(joint[0].sum())
    if rho <= tol or rho >= 1.0 - tol:
        return None
    q1 = float(joint[0, 0] / rho)
    q2 = float(joint[1, 1] / (1.0 - rho))
    return BinarySourceSpec(rho, min(1.0, max(0.0, q1)), min(1.0, max(0.0, q2)))
