"""Iterative duple-balanced ensemble training and soft-vote prediction.

Training alternates between two balancing moves before each new member
is fitted. The first member trains on the raw imbalanced data. For every
later member t, the soft-vote average of the members fitted so far is
evaluated on the full original dataset; its normalized prediction errors
drive the intra-class instance weights, the inter-class strategy fixes a
common target size n, every class is drawn to n rows by the weighted
sampler, the drawn rows receive class-calibrated Gaussian perturbation,
and member t is fitted on the union.

Each fitted member predicts on the original data exactly once: the
running probability sum is buffered, so forming the current soft vote is
O(N*m) per iteration instead of refitting predictions from scratch. The
buffer is an optimization only; results are bit-identical to
recomputation.

Randomness is split one stream per (iteration, class) for resampling and
perturbation, so enlarging the ensemble never reshuffles the draws of
earlier iterations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .balancing import InterCBStrategy, IntraCBStrategy, SamplingPlan, resample_step
from .dataset import Dataset
from .learners import LearnerParams, TreeParams, KnnParams, fit_learner, learner_from_dict
from .pbda import ClassCovariance, class_covariance, perturb


@dataclass(frozen=True)
class DubeConfig:
    """Trainer configuration.

    ``alpha`` scales the per-class perturbation; 0 disables augmentation.
    ``intra.bins`` is only consulted by SHEM.
    """

    k: int = 10
    inter: InterCBStrategy = InterCBStrategy("RHS")
    intra: IntraCBStrategy = IntraCBStrategy("SHEM", bins=5)
    alpha: float = 0.0
    learner: LearnerParams = TreeParams()
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("ensemble size k must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


@dataclass
class IterationTrace:
    """Record of one training iteration (t >= 2)."""

    target_size: int
    plan: SamplingPlan
    sampled_rows: list
    ensemble_probs: np.ndarray
    resample_ms: float


@dataclass
class TrainingTrace:
    """Optional instrumentation collected by :func:`dube_fit`."""

    iterations: list = field(default_factory=list)

    @property
    def resample_ms_total(self) -> float:
        return sum(it.resample_ms for it in self.iterations)


class EnsembleModel:
    """Ordered fitted members with uniform soft-vote aggregation."""

    def __init__(self, members, m: int, d: int, config: DubeConfig):
        self.members = list(members)
        self.m = int(m)
        self.d = int(d)
        self.config = config

    @property
    def k(self) -> int:
        return len(self.members)

    def predict_proba_many(self, X) -> np.ndarray:
        """Arithmetic mean of member probability rows."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.d:
            raise ValueError(f"expected {self.d} features, got {X.shape[1]}")
        total = np.zeros((X.shape[0], self.m))
        for member in self.members:
            total += member.predict_proba_many(X)
        return total / len(self.members)

    def predict_proba(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.d,):
            raise ValueError(f"expected vector of length {self.d}, got shape {x.shape}")
        return self.predict_proba_many(x[None])[0]

    def predict_many(self, X) -> np.ndarray:
        """Argmax of the soft vote; ties go to the lowest class id."""
        return np.argmax(self.predict_proba_many(X), axis=1)

    def predict(self, x) -> int:
        return int(np.argmax(self.predict_proba(x)))


def ensemble_predict_proba(model: EnsembleModel, x) -> np.ndarray:
    return model.predict_proba(x)


def predict(model: EnsembleModel, x) -> int:
    return model.predict(x)


def dube_fit(ds: Dataset, cfg: DubeConfig, trace: TrainingTrace | None = None) -> EnsembleModel:
    """Train a duple-balanced ensemble on ``ds``.

    Requires m >= 2. With k = 1 the result is a single learner trained on
    the raw data and no resampling is performed. Pass a
    :class:`TrainingTrace` to capture per-iteration targets, weights,
    drawn rows, the soft-vote matrix in effect, and resampling wall time.
    """
    if ds.m < 2:
        raise ValueError("training needs at least two classes")
    covariances = [class_covariance(ds, c) for c in range(ds.m)]

    members = []
    first = fit_learner(ds, cfg.learner, rng.child_seed(cfg.seed, rng.LEARNER, 1))
    members.append(first)
    probs_sum = first.predict_proba_many(ds.features)

    for t in range(2, cfg.k + 1):
        current = probs_sum / (t - 1)
        n, per_class, plan, ms = resample_step(
            ds.labels, ds.class_index, current, cfg.inter, cfg.intra,
            rng.child_seed(cfg.seed, rng.RESAMPLE, t))
        if trace is not None:
            trace.iterations.append(IterationTrace(
                target_size=n, plan=plan, sampled_rows=per_class,
                ensemble_probs=current, resample_ms=ms))
        parts, labels = [], []
        for c, rows in enumerate(per_class):
            block = perturb(ds.features[rows], cfg.alpha, covariances[c],
                            rng.child_seed(cfg.seed, rng.PERTURB, t, c))
            parts.append(block)
            labels.append(np.full(rows.size, c, dtype=np.int64))
        resampled = Dataset(np.concatenate(parts), np.concatenate(labels),
                            m=ds.m, label_names=ds.label_names)
        member = fit_learner(resampled, cfg.learner, rng.child_seed(cfg.seed, rng.LEARNER, t))
        members.append(member)
        probs_sum += member.predict_proba_many(ds.features)

    return EnsembleModel(members, ds.m, ds.n_features, cfg)


MODEL_FORMAT = "dube-model"
MODEL_VERSION = 1


def _config_to_dict(cfg: DubeConfig) -> dict:
    learner: dict
    if isinstance(cfg.learner, TreeParams):
        learner = {"kind": "tree", "max_depth": cfg.learner.max_depth,
                   "min_samples_leaf": cfg.learner.min_samples_leaf,
                   "criterion": cfg.learner.criterion}
    else:
        learner = {"kind": "knn", "k_neighbors": cfg.learner.k_neighbors}
    return {"k": cfg.k, "inter": cfg.inter.tag,
            "intra": cfg.intra.tag, "bins": cfg.intra.bins,
            "alpha": cfg.alpha, "seed": cfg.seed, "learner": learner}


def _config_from_dict(blob: dict) -> DubeConfig:
    lb = blob["learner"]
    if lb["kind"] == "tree":
        learner: LearnerParams = TreeParams(max_depth=lb["max_depth"],
                                            min_samples_leaf=lb["min_samples_leaf"],
                                            criterion=lb["criterion"])
    else:
        learner = KnnParams(k_neighbors=lb["k_neighbors"])
    return DubeConfig(k=blob["k"], inter=InterCBStrategy(blob["inter"]),
                      intra=IntraCBStrategy(blob["intra"], bins=blob["bins"]),
                      alpha=blob["alpha"], learner=learner, seed=blob["seed"])


def save_model(model: EnsembleModel, path) -> None:
    """Write a versioned JSON dump; floats round-trip exactly."""
    blob = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "rng": rng.RNG_ALGORITHM,
        "m": model.m,
        "d": model.d,
        "config": _config_to_dict(model.config),
        "members": [member.to_dict() for member in model.members],
    }
    with open(path, "w") as fh:
        json.dump(blob, fh)


def load_model(path) -> EnsembleModel:
    with open(path) as fh:
        blob = json.load(fh)
    if blob.get("format") != MODEL_FORMAT or blob.get("version") != MODEL_VERSION:
        raise ValueError(f"not a {MODEL_FORMAT} v{MODEL_VERSION} file: {path}")
    members = [learner_from_dict(b) for b in blob["members"]]
    return EnsembleModel(members, blob["m"], blob["d"], _config_from_dict(blob["config"]))
