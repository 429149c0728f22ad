"""Column-group penalties and their proximal operators.

The penalized groups are the input-weight columns of a
:class:`~ctgraph.field.StructuredMLP`: group ``(k, j)`` collects the
first-layer weights of subnetwork ``j`` attached to input ``k``.  Three
penalty kinds are supported:

* ``lasso``           - entrywise L1 over all first-layer weights,
* ``group-lasso``     - sum of group Euclidean norms,
* ``adaptive-group-lasso`` - group norms reweighted by a pilot estimate.

Biases and deeper layers are never penalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import MissingWeightsError
from .field import StructuredMLP

LASSO = "lasso"
GROUP_LASSO = "group-lasso"
ADAPTIVE_GROUP_LASSO = "adaptive-group-lasso"
_KINDS = (LASSO, GROUP_LASSO, ADAPTIVE_GROUP_LASSO)


@dataclass(frozen=True)
class PenaltyConfig:
    """One fully specified penalty (a single point of the lambda grid).

    ``adaptive_weights`` is the ``(d, d)`` matrix indexed ``[k, j]`` produced
    by :func:`adaptive_weights_from`; entries may be ``+inf`` meaning the
    group is frozen at zero.
    """

    kind: str
    lam: float
    gamma: float = 2.0
    adaptive_weights: np.ndarray | None = None
    weight_floor: float = 1e-8

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if not self.weight_floor > 0:
            raise ValueError("weight_floor must be positive")
        if self.adaptive_weights is not None:
            w = np.asarray(self.adaptive_weights, dtype=float)
            if (w < 0).any() or np.isnan(w).any():
                raise ValueError("adaptive weights must be nonnegative (inf allowed)")
            object.__setattr__(self, "adaptive_weights", w)


def penalty_value(f: StructuredMLP, cfg: PenaltyConfig) -> float:
    """Penalty term evaluated at the field's current first-layer weights.

    Groups frozen at exactly zero contribute nothing even under an infinite
    adaptive weight.
    """
    if cfg.kind == LASSO:
        return cfg.lam * float(np.abs(f.input_weights).sum())
    norms = f.input_column_norms()
    if cfg.kind == GROUP_LASSO:
        return cfg.lam * float(norms.sum())
    if cfg.adaptive_weights is None:
        raise MissingWeightsError("adaptive-group-lasso requires adaptive_weights")
    w = cfg.adaptive_weights
    terms = np.where(norms > 0, w * norms, 0.0)
    return cfg.lam * float(terms.sum())


def adaptive_weights_from(base_scores: np.ndarray, gamma: float = 2.0,
                          weight_floor: float = 1e-8) -> np.ndarray:
    """Adaptive weights ``1 / max(score, floor)^gamma`` from a pilot fit.

    Groups the pilot estimated at exactly zero get ``+inf``, the standard
    adaptive-lasso convention: they stay frozen at zero in the second stage.
    The floor keeps near-zero survivors from producing astronomically large
    finite weights.
    """
    base = np.asarray(base_scores, dtype=float)
    if (base < 0).any():
        raise ValueError("base scores must be nonnegative")
    with np.errstate(divide="ignore"):
        w = 1.0 / np.maximum(base, weight_floor) ** gamma
    return np.where(base > 0, w, np.inf)


def group_shrink_factors(norms: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Radial shrink factor per group: ``max(0, 1 - t/||c||)``, 0 for zero groups."""
    thresholds = np.asarray(thresholds, dtype=float)
    if (thresholds < 0).any() or np.isnan(thresholds).any():
        raise ValueError("thresholds must be nonnegative (inf allowed)")
    safe = np.where(norms > 0, norms, 1.0)
    with np.errstate(invalid="ignore"):
        factors = np.maximum(0.0, 1.0 - thresholds / safe)
    return np.where(norms > 0, factors, 0.0)


def prox_group_soft_threshold(f: StructuredMLP, per_column_threshold: np.ndarray) -> StructuredMLP:
    """Group soft-thresholding of the first-layer columns.

    Each group ``(k, j)`` is shrunk radially by ``per_column_threshold[k, j]``
    (``step_size * lambda * weight``), reaching exact zero when its norm is at
    or below the threshold.  Zero groups stay zero, other layers are
    untouched, and a zero threshold leaves the group bitwise unchanged.
    """
    t = np.asarray(per_column_threshold, dtype=float)
    d = f.dim
    if t.shape != (d, d):
        raise ValueError(f"threshold matrix must be ({d}, {d})")
    norms = f.input_column_norms()            # [k, j]
    factors = group_shrink_factors(norms, t)  # [k, j]
    new_w = f.input_weights * factors.T[:, :, None]
    return f.with_input_weights(new_w)


def prox_soft_threshold(f: StructuredMLP, threshold: float) -> StructuredMLP:
    """Entrywise soft-thresholding of the first-layer weights (plain lasso)."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    w = f.input_weights
    new_w = np.sign(w) * np.maximum(0.0, np.abs(w) - threshold)
    return f.with_input_weights(new_w)
