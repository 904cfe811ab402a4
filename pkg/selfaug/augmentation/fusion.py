"""One-shot fusion of an enrollment embedding with a selected keyframe."""

import math

import numpy as np

from selfaug.embedding import EmbeddingVector, add, check_same_dim
from selfaug.errors import InvalidConfigError


def fuse_concat(enroll: EmbeddingVector, selected: EmbeddingVector) -> EmbeddingVector:
    """Stack enrollment and keyframe into one 2D-dimensional embedding.

    The first D components are the enrollment, the last D the keyframe.
    """
    check_same_dim(enroll, selected)
    return EmbeddingVector(np.concatenate([enroll.values, selected.values]))


def fuse_add(enroll: EmbeddingVector, selected: EmbeddingVector) -> EmbeddingVector:
    """Componentwise sum of enrollment and keyframe."""
    return add(enroll, selected)


def fixed_point(enroll: EmbeddingVector, selected: EmbeddingVector, lam: float) -> EmbeddingVector:
    """Limit of the weighted long-term update when the same keyframe is selected forever.

    Solves E = lam * enroll + (1 - lam) * 0.5 * (E + selected), giving
    (2 * lam * enroll + (1 - lam) * selected) / (1 + lam).

    Args:
        enroll: Original enrollment embedding
        selected: Stationary keyframe
        lam: Residual weight in [0, 1]

    Returns:
        The unique fixed point
    """
    if not math.isfinite(lam) or not 0.0 <= lam <= 1.0:
        raise InvalidConfigError(f"lambda must be in [0, 1], got {lam}")
    check_same_dim(enroll, selected)
    point = (2.0 * lam * enroll.values + (1.0 - lam) * selected.values) / (1.0 + lam)
    return EmbeddingVector(point)


def contraction_factor(lam: float) -> float:
    """Per-iteration shrink factor of the distance to the fixed point."""
    return (1.0 - lam) / 2.0
