"""Hashed n-gram featurization for segment-structured text examples."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LabeledExample:
    segments: tuple[str, ...]
    label: int

    def __post_init__(self):
        if not self.segments:
            raise ValueError("example needs at least one segment")


@dataclass(frozen=True)
class FeatureConfig:
    hash_bits: int = 20
    word_ngrams: tuple[int, ...] = (1, 2)
    char_ngrams: tuple[int, ...] = (3, 4, 5)
    seed: int = 0

    @property
    def size(self) -> int:
        return 1 << self.hash_bits

    def to_dict(self) -> dict:
        return {
            "hash_bits": self.hash_bits,
            "word_ngrams": list(self.word_ngrams),
            "char_ngrams": list(self.char_ngrams),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(
            hash_bits=d["hash_bits"],
            word_ngrams=tuple(d["word_ngrams"]),
            char_ngrams=tuple(d["char_ngrams"]),
            seed=d["seed"],
        )


def _hash(key: str, size: int) -> int:
    digest = hashlib.blake2s(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % size


def featurize(segments, config: FeatureConfig = FeatureConfig()) -> dict[int, float]:
    """Sparse feature map for a list of text segments.

    Features are hashed word n-grams and character n-grams, salted with the
    segment position so the same word in different segments gets a different
    index.  Deterministic given the text and the config.
    """
    vec: dict[int, float] = {}
    size = config.size
    seed = config.seed

    def add(key: str, weight: float = 1.0):
        idx = _hash(f"{seed}|{key}", size)
        vec[idx] = vec.get(idx, 0.0) + weight

    for pos, segment in enumerate(segments):
        text = segment.lower()
        if not text.strip():
            add(f"{pos}|empty")
            continue
        words = text.split()
        for n in config.word_ngrams:
            for i in range(len(words) - n + 1):
                add(f"{pos}|w{n}|{' '.join(words[i : i + n])}")
        padded = f" {text} "
        for n in config.char_ngrams:
            for i in range(len(padded) - n + 1):
                add(f"{pos}|c{n}|{padded[i : i + n]}", 0.5)
    return vec


def to_arrays(vec: dict[int, float]) -> tuple[np.ndarray, np.ndarray]:
    idx = np.fromiter(sorted(vec), dtype=np.int64, count=len(vec))
    val = np.array([vec[i] for i in idx], dtype=np.float64)
    return idx, val


@dataclass
class FeatureMatrix:
    """CSR-style layout of a batch of featurized examples."""

    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray
    labels: np.ndarray

    @classmethod
    def build(cls, examples, config: FeatureConfig) -> "FeatureMatrix":
        indptr = [0]
        indices: list[np.ndarray] = []
        values: list[np.ndarray] = []
        labels = []
        for ex in examples:
            idx, val = to_arrays(featurize(ex.segments, config))
            indices.append(idx)
            values.append(val)
            indptr.append(indptr[-1] + len(idx))
            labels.append(ex.label)
        return cls(
            indptr=np.array(indptr, dtype=np.int64),
            indices=np.concatenate(indices) if indices else np.zeros(0, np.int64),
            values=np.concatenate(values) if values else np.zeros(0, np.float64),
            labels=np.array(labels, dtype=np.int64),
        )

    def __len__(self) -> int:
        return len(self.labels)

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.values[lo:hi]
