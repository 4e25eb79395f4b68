"""Answer vectors for the clustering stage.

Two sources are supported: a plain-text vectors file written by any
external encoder (one id per line, see ``load_vectors`` for the format)
and a built-in feature-hashing embedder that needs no model at all. The
hash embedder is purely lexical; it exists so the whole topic pipeline
runs deterministically and offline, which is exactly what the planted
test corpora need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import TokenizedAnswer
from .errors import DataError
from .hashing import fnv1a64

DEFAULT_DIM = 512


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Row-per-answer embedding matrix with stable id order."""

    ids: tuple[str, ...]
    dim: int
    vectors: np.ndarray
    normalized: bool

    def __post_init__(self) -> None:
        if self.vectors.shape != (len(self.ids), self.dim):
            raise DataError(
                f"vector matrix shape {self.vectors.shape} does not match "
                f"{len(self.ids)} ids x dim {self.dim}"
            )
        if len(set(self.ids)) != len(self.ids):
            raise DataError("duplicate ids in embedding matrix")
        if not np.all(np.isfinite(self.vectors)):
            raise DataError("non-finite value in embedding matrix")

    def row(self, id_: str) -> np.ndarray:
        return self.vectors[self.ids.index(id_)]


def load_vectors(path: str) -> EmbeddingMatrix:
    """Read a vectors file and L2-normalize rows that are not unit length.

    Format: first line ``DIM <d>``, then one line per answer,
    ``<id>\\t<v1> <v2> ... <vd>`` with plain decimal floats.
    """
    ids: list[str] = []
    rows: list[np.ndarray] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if len(parts) != 2 or parts[0] != "DIM":
            raise DataError(f"vectors file must start with 'DIM <d>', got {header!r}")
        try:
            dim = int(parts[1])
        except ValueError as exc:
            raise DataError(f"invalid dimension in header {header!r}") from exc
        if dim < 1:
            raise DataError(f"dimension must be positive, got {dim}")
        for line_no, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if "\t" not in line:
                raise DataError(f"line {line_no}: expected '<id>\\t<values>'")
            id_, _, value_part = line.rstrip("\n").partition("\t")
            values = value_part.split()
            if len(values) != dim:
                raise DataError(
                    f"line {line_no}: id {id_!r} has {len(values)} values, expected {dim}"
                )
            row = np.empty(dim, dtype=np.float64)
            for col, text in enumerate(values):
                try:
                    value = float(text)
                except ValueError as exc:
                    raise DataError(
                        f"line {line_no}: id {id_!r} column {col + 1}: bad float {text!r}"
                    ) from exc
                if not math.isfinite(value):
                    raise DataError(
                        f"line {line_no}: id {id_!r} column {col + 1}: non-finite value"
                    )
                row[col] = value
            if id_ in ids:
                raise DataError(f"line {line_no}: duplicate id {id_!r}")
            ids.append(id_)
            rows.append(row)

    vectors = np.vstack(rows) if rows else np.empty((0, dim), dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms == 0.0):
        zero_id = ids[int(np.argmin(norms))]
        raise DataError(f"zero vector for id {zero_id!r} cannot be normalized")
    if len(rows) and np.any(np.abs(norms - 1.0) > 1e-6):
        vectors = vectors / norms[:, None]
    return EmbeddingMatrix(ids=tuple(ids), dim=dim, vectors=vectors, normalized=True)


def store_vectors(matrix: EmbeddingMatrix, path: str) -> None:
    """Write the matrix in the vectors-file format with round-trip floats."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"DIM {matrix.dim}\n")
        for id_, row in zip(matrix.ids, matrix.vectors):
            fh.write(id_ + "\t" + " ".join(repr(float(v)) for v in row) + "\n")


def hash_embed(answer: TokenizedAnswer, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Deterministic lexical embedding via signed character n-gram hashing.

    The answer's tokens are joined with single spaces; every character
    3-, 4- and 5-gram of that string is hashed with FNV-1a 64. The
    bucket is ``hash mod dim`` and the sign is +1 when bit 63 of the
    hash is clear, -1 otherwise; signs accumulate and the vector is
    L2-normalized. Output is bit-identical across runs and platforms.
    """
    if dim < 8:
        raise DataError(f"embedding dimension must be at least 8, got {dim}")
    text = " ".join(answer.tokens)
    acc = np.zeros(dim, dtype=np.float64)
    for n in (3, 4, 5):
        for start in range(len(text) - n + 1):
            h = fnv1a64(text[start : start + n])
            sign = 1.0 if (h >> 63) == 0 else -1.0
            acc[h % dim] += sign
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        raise DataError(
            f"answer {answer.response_id!r} produced no n-gram features; text too short"
        )
    return acc / norm


def hash_embed_matrix(answers: list[TokenizedAnswer], dim: int = DEFAULT_DIM) -> EmbeddingMatrix:
    """Embed answers in input order into one matrix."""
    vectors = (
        np.vstack([hash_embed(ans, dim) for ans in answers])
        if answers
        else np.empty((0, dim), dtype=np.float64)
    )
    return EmbeddingMatrix(
        ids=tuple(ans.response_id for ans in answers),
        dim=dim,
        vectors=vectors,
        normalized=True,
    )
