"""Frame-by-class posterior matrices and their transform to decoder scores.

A posterior matrix holds one row per frame and one column per class, each
entry a probability. The order-n transform is applied entrywise (each class
posterior is treated as an independent binary target), optionally followed
by row renormalization. Because the scalar transform is strictly
increasing, neither step can change a row's argmax or its full sort order;
renormalization only shifts that frame's log-scores by a constant, which
the Viterbi path is invariant to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .minkowski import _even_order

__all__ = [
    "LOG_FLOOR",
    "PosteriorMatrix",
    "LogScoreMatrix",
    "transform_matrix",
    "to_log_scores",
    "renormalize_rows",
]

# Stand-in for ln(0): keeps DP arithmetic finite and total-order comparable.
LOG_FLOOR = -1e30

ROW_SUM_TOLERANCE = 1e-6


def _as_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 2:
        raise ValidationError(
            f"{name} needs >= 1 frame and >= 2 classes, got shape {arr.shape}"
        )
    return arr


@dataclass(frozen=True)
class PosteriorMatrix:
    """frames x classes matrix of per-frame class posteriors.

    Entries are validated to lie in [0, 1]. Rows sum to 1 when the matrix
    comes from `dataio.load_posteriors` or `renormalize_rows`; a transform
    with renormalization off may break the row sums without invalidating
    the entries.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.values, "posterior matrix")
        if not np.isfinite(arr).all():
            raise ValidationError("posterior matrix has non-finite entries")
        if (arr < 0.0).any() or (arr > 1.0).any():
            raise ValidationError("posterior matrix entries must be in [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def classes(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LogScoreMatrix:
    """frames x classes natural-log scores for the decoder.

    Entries are ln of a probability (exact zeros floored at LOG_FLOOR);
    dividing by priors can push entries above 0.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.values, "log-score matrix")
        if not np.isfinite(arr).all():
            raise ValidationError("log-score matrix entries must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def classes(self) -> int:
        return self.values.shape[1]


def transform_values(values: np.ndarray, order) -> np.ndarray:
    """Entrywise closed-form transform of an array of probabilities."""
    n = _even_order(order)
    vals = np.asarray(values, dtype=np.float64)
    if n == 2:
        return vals.copy()
    m = n - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.divide(vals, 1.0 - vals, out=np.zeros_like(vals), where=vals < 1.0)
        r = ratio ** (1.0 / m)
        out = r / (1.0 + r)
    out = np.where(vals == 1.0, 1.0, out)
    out = np.where(vals == 0.0, 0.0, out)
    return out


def transform_matrix(p: PosteriorMatrix, order, renormalize: bool = True) -> PosteriorMatrix:
    """Apply the order-n transform to every entry of a posterior matrix.

    Order 2 returns an identical matrix. With `renormalize` each row is
    rescaled to sum to 1 afterwards; this divides the row by a positive
    constant and cannot change the decoded path, only score magnitudes.
    """
    out = transform_values(p.values, order)
    if renormalize:
        return renormalize_rows(out)
    return PosteriorMatrix(out)


def to_log_scores(p: PosteriorMatrix, priors=None) -> LogScoreMatrix:
    """Natural-log scores: ln(p), or ln(p) - ln(prior) when priors are given.

    Exact zeros map to LOG_FLOOR. Priors must be strictly positive and one
    per class.
    """
    vals = p.values
    with np.errstate(divide="ignore"):
        logs = np.log(vals)
    logs = np.where(vals == 0.0, LOG_FLOOR, logs)
    if priors is not None:
        pr = np.asarray(priors, dtype=np.float64)
        if pr.shape != (p.classes,):
            raise ValidationError(
                f"priors must have one entry per class ({p.classes}), "
                f"got shape {pr.shape}"
            )
        if not np.isfinite(pr).all() or (pr <= 0.0).any():
            raise ValidationError("priors must be finite and > 0")
        logs = logs - np.log(pr)
    return LogScoreMatrix(logs)


def renormalize_rows(raw) -> PosteriorMatrix:
    """Rescale a nonnegative matrix so every row sums to 1 (within 1e-12)."""
    arr = _as_matrix(raw, "matrix")
    if not np.isfinite(arr).all():
        raise ValidationError("matrix has non-finite entries")
    if (arr < 0.0).any():
        raise ValidationError("matrix entries must be nonnegative")
    sums = arr.sum(axis=1)
    zero_rows = np.flatnonzero(sums <= 0.0)
    if zero_rows.size:
        raise ValidationError(f"row {zero_rows[0]} sums to zero; cannot renormalize")
    return PosteriorMatrix(arr / sums[:, None])


def check_row_sums(values: np.ndarray, tolerance: float = ROW_SUM_TOLERANCE) -> int | None:
    """Index of the first row whose sum is off 1 by more than tolerance, else None."""
    sums = np.asarray(values, dtype=np.float64).sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tolerance)
    return int(bad[0]) if bad.size else None
