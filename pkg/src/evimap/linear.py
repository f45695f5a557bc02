"""Multinomial logistic regression over hashed sparse features.

Trained by seeded SGD (default) or deterministic full-batch gradient descent.
The analytic gradient is exposed separately so it can be checked against
finite differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .features import FeatureConfig, FeatureMatrix, featurize, to_arrays


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    learning_rate: float = 0.1
    l2: float = 0.0
    seed: int = 0
    mode: str = "stochastic"  # or "full"

    def __post_init__(self):
        if self.epochs < 0 or self.learning_rate <= 0 or self.l2 < 0:
            raise ValueError("epochs must be >= 0, learning_rate > 0, l2 >= 0")
        if self.mode not in ("stochastic", "full"):
            raise ValueError(f"unknown training mode {self.mode!r}")


@dataclass
class LinearModel:
    task: str
    classes: tuple[str, ...]
    weights: np.ndarray  # (n_classes, hash_space)
    bias: np.ndarray  # (n_classes,)
    feature_config: FeatureConfig
    meta: dict = field(default_factory=dict)

    def predict_proba(self, segments) -> np.ndarray:
        idx, val = to_arrays(featurize(segments, self.feature_config))
        scores = kernels.scores_one(self.weights, self.bias, idx, val)
        return kernels.softmax(scores)

    def save(self, path):
        np.savez_compressed(
            path,
            weights=self.weights,
            bias=self.bias,
            manifest=json.dumps(
                {
                    "task": self.task,
                    "classes": list(self.classes),
                    "feature_config": self.feature_config.to_dict(),
                    "meta": self.meta,
                }
            ),
        )

    @classmethod
    def load(cls, path) -> "LinearModel":
        data = np.load(path, allow_pickle=False)
        manifest = json.loads(str(data["manifest"]))
        return cls(
            task=manifest["task"],
            classes=tuple(manifest["classes"]),
            weights=data["weights"],
            bias=data["bias"],
            feature_config=FeatureConfig.from_dict(manifest["feature_config"]),
            meta=manifest.get("meta", {}),
        )


def log_loss(model: LinearModel, mat: FeatureMatrix) -> float:
    """Mean cross-entropy (plus l2 is excluded: this is the data term only)."""
    total = 0.0
    for i in range(len(mat)):
        idx, val = mat.row(i)
        probs = kernels.softmax(kernels.scores_one(model.weights, model.bias, idx, val))
        total += -np.log(max(probs[mat.labels[i]], 1e-300))
    return total / max(len(mat), 1)


def batch_gradient(weights, bias, mat: FeatureMatrix, l2: float = 0.0):
    """Analytic gradient of mean cross-entropy + (l2/2)*||W||^2 over the batch."""
    g_w = l2 * weights
    g_b = np.zeros_like(bias)
    n = len(mat)
    for i in range(n):
        idx, val = mat.row(i)
        probs = kernels.softmax(kernels.scores_one(weights, bias, idx, val))
        err = probs.copy()
        err[mat.labels[i]] -= 1.0
        g_w[:, idx] += np.outer(err, val) / n
        g_b += err / n
    return g_w, g_b


def train(
    examples,
    classes,
    config: TrainConfig = TrainConfig(),
    feature_config: FeatureConfig = FeatureConfig(),
    task: str = "task",
) -> LinearModel:
    """Train a softmax-regression model; deterministic given the seed.

    Full-batch mode is order-independent and has non-increasing training
    loss for a small enough learning rate; stochastic mode shuffles with the
    seeded RNG each epoch.
    """
    classes = tuple(classes)
    mat = FeatureMatrix.build(examples, feature_config)
    present = set(mat.labels.tolist())
    if len(present) < 2:
        raise TrainingError(f"need examples from >= 2 classes, got {sorted(present)}")
    if max(present) >= len(classes) or min(present) < 0:
        raise TrainingError("example label outside the class set")

    weights = np.zeros((len(classes), feature_config.size), dtype=np.float64)
    bias = np.zeros(len(classes), dtype=np.float64)
    rng = np.random.default_rng(config.seed)

    for epoch in range(config.epochs):
        if config.mode == "full":
            g_w, g_b = batch_gradient(weights, bias, mat, config.l2)
            weights -= config.learning_rate * g_w
            bias -= config.learning_rate * g_b
        else:
            order = rng.permutation(len(mat)).astype(np.int64)
            kernels.sgd_epoch(
                weights,
                bias,
                mat.indptr,
                mat.indices,
                mat.values,
                mat.labels,
                order,
                config.learning_rate,
                config.l2,
            )
        if not np.isfinite(bias).all() or not np.isfinite(weights.sum()):
            raise TrainingError(
                f"non-finite parameters at epoch {epoch} "
                f"(lr={config.learning_rate}, l2={config.l2})"
            )

    model = LinearModel(
        task=task,
        classes=classes,
        weights=weights,
        bias=bias,
        feature_config=feature_config,
        meta={
            "epochs": config.epochs,
            "learning_rate": config.learning_rate,
            "l2": config.l2,
            "seed": config.seed,
            "mode": config.mode,
            "kernel_backend": kernels.BACKEND,
        },
    )
    loss = log_loss(model, mat)
    if not np.isfinite(loss):
        raise TrainingError(f"training loss is not finite ({loss})")
    return model
