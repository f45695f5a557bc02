"""Classifier handles: the uniform predict contract over different backings.

A backend exposes `classes` (ordered label names) and `predict(segments)`
returning a probability distribution over them.  Backings: a trained linear
model, a rule table, or a remote inference endpoint.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass

import httpx
import numpy as np

from .linear import LinearModel


class RemoteInferenceError(RuntimeError):
    """Transport or protocol failure talking to a remote model server."""


class LinearBackend:
    def __init__(self, model: LinearModel):
        self.model = model
        self.classes = model.classes

    def predict(self, segments) -> np.ndarray:
        return self.model.predict_proba(segments)


class RuleBackend:
    """First matching regex wins with probability 1.0 on its class.

    No match falls back to `default` (one-hot) when given, else uniform.
    Patterns are matched against the segments joined with " [sep] ".
    """

    def __init__(self, classes, rules, default: str | None = None):
        self.classes = tuple(classes)
        self.rules = [(re.compile(pat, re.IGNORECASE), cls) for pat, cls in rules]
        for _, cls in self.rules:
            if cls not in self.classes:
                raise ValueError(f"rule class {cls!r} not in {self.classes}")
        self.default = default

    def predict(self, segments) -> np.ndarray:
        text = " [sep] ".join(segments)
        probs = np.zeros(len(self.classes))
        for pattern, cls in self.rules:
            if pattern.search(text):
                probs[self.classes.index(cls)] = 1.0
                return probs
        if self.default is not None:
            probs[self.classes.index(self.default)] = 1.0
            return probs
        probs[:] = 1.0 / len(self.classes)
        return probs


class RemoteBackend:
    """HTTP client for the remote inference protocol.

    POST {base_url}/predict with {"task": ..., "segments": [...]}, expecting
    {"probs": [...]} with the task's documented class order.  A semaphore
    caps concurrent in-flight requests.
    """

    def __init__(self, base_url: str, task: str, classes, max_in_flight: int = 8,
                 timeout: float = 10.0, client: httpx.Client | None = None):
        self.base_url = base_url.rstrip("/")
        self.task = task
        self.classes = tuple(classes)
        self._sem = threading.Semaphore(max_in_flight)
        self._client = client or httpx.Client(timeout=timeout)

    def predict(self, segments) -> np.ndarray:
        payload = {"task": self.task, "segments": list(segments)}
        with self._sem:
            try:
                resp = self._client.post(f"{self.base_url}/predict", json=payload)
                resp.raise_for_status()
                body = resp.json()
            except httpx.HTTPError as exc:
                raise RemoteInferenceError(
                    f"predict({self.task}) against {self.base_url} failed: {exc}"
                ) from exc
        probs = np.asarray(body.get("probs", []), dtype=np.float64)
        if probs.shape != (len(self.classes),) or not np.isfinite(probs).all():
            raise RemoteInferenceError(
                f"bad response for task {self.task}: expected {len(self.classes)} probs"
            )
        return probs


@dataclass(frozen=True)
class PredictionOutcome:
    probs: np.ndarray
    classes: tuple[str, ...]

    @property
    def best(self) -> str:
        return self.classes[int(np.argmax(self.probs))]
