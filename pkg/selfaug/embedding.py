"""Speaker embedding value type and vector operations."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from selfaug.errors import DimensionMismatchError, NonFiniteError, ZeroVectorError

DEFAULT_DIM = 192


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """Immutable fixed-dimension speaker embedding.

    Values are stored as a read-only float64 array regardless of the input
    precision, so repeated updates do not accumulate float32 rounding.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 1:
            raise DimensionMismatchError(1, 0, what="embedding (dim must be >= 1)")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("embedding contains NaN or infinite components")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, dim: int) -> EmbeddingVector:
        """Create the zero vector of a given dimension."""
        return cls(np.zeros(dim))

    @property
    def dim(self) -> int:
        """Number of components."""
        return int(self.values.shape[0])

    @property
    def norm(self) -> float:
        """Euclidean norm."""
        return float(np.linalg.norm(self.values))

    def to_list(self) -> list[float]:
        """Components as plain Python floats."""
        return [float(v) for v in self.values]

    def allclose(self, other: EmbeddingVector, atol: float = 1e-12) -> bool:
        """Componentwise comparison within an absolute tolerance."""
        return self.dim == other.dim and bool(
            np.allclose(self.values, other.values, rtol=0.0, atol=atol)
        )

    def __len__(self) -> int:
        return self.dim

    def __iter__(self) -> Iterator[float]:
        return iter(self.to_list())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def __repr__(self) -> str:
        head = ", ".join(f"{v:.4g}" for v in self.values[:4])
        tail = ", ..." if self.dim > 4 else ""
        return f"EmbeddingVector(dim={self.dim}, [{head}{tail}])"


def as_embedding(value: EmbeddingVector | Sequence[float] | np.ndarray) -> EmbeddingVector:
    """Coerce a sequence or array to an EmbeddingVector."""
    if isinstance(value, EmbeddingVector):
        return value
    return EmbeddingVector(np.asarray(value, dtype=np.float64))


def check_same_dim(a: EmbeddingVector, b: EmbeddingVector) -> None:
    """Raise DimensionMismatchError unless both vectors have the same dimension."""
    if a.dim != b.dim:
        raise DimensionMismatchError(a.dim, b.dim)


def dot(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Inner product of two embeddings."""
    check_same_dim(a, b)
    return float(np.dot(a.values, b.values))


def norm(a: EmbeddingVector) -> float:
    """Euclidean norm of an embedding."""
    return a.norm


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity clamped to [-1, 1].

    Args:
        a: First embedding
        b: Second embedding of the same dimension

    Returns:
        dot(a, b) / (|a| * |b|)

    Raises:
        DimensionMismatchError: If the dimensions differ
        ZeroVectorError: If either vector has zero norm
    """
    check_same_dim(a, b)
    na, nb = a.norm, b.norm
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine similarity is undefined for a zero-norm vector")
    value = float(np.dot(a.values, b.values)) / (na * nb)
    return min(1.0, max(-1.0, value))


def add(a: EmbeddingVector, b: EmbeddingVector) -> EmbeddingVector:
    """Componentwise sum."""
    check_same_dim(a, b)
    return EmbeddingVector(a.values + b.values)


def scale(a: EmbeddingVector, c: float) -> EmbeddingVector:
    """Multiply every component by a finite scalar."""
    if not np.isfinite(c):
        raise NonFiniteError(f"scale factor must be finite, got {c}")
    return EmbeddingVector(a.values * float(c))


def l2_normalize(a: EmbeddingVector) -> EmbeddingVector:
    """Scale to unit Euclidean norm.

    Raises:
        ZeroVectorError: If the vector is zero
    """
    n = a.norm
    if n == 0.0:
        raise ZeroVectorError("cannot normalize a zero-norm vector")
    return EmbeddingVector(a.values / n)
