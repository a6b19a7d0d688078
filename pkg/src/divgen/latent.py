"""Convex-combination sampling over real-image embeddings.

Two schemes produce new conditioning vectors from a set of exemplar
embeddings: FULL_HULL draws flat-Dirichlet weights over all N exemplars
(uniform over the weight simplex, biased toward the centroid), K_SUBSET
restricts each draw to k randomly chosen exemplars, which spreads samples
far more evenly. ``circle_demo`` quantifies that contrast on evenly spaced
circle points.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DivgenError
from .hashing import SEED_MASK_63, stable_hash64
from .planning import BASE_CLASS_TEMPLATE, GenerationRequest, PlanDefaults
from .core import TrickKind

ZERO_NORM_THRESHOLD = 1e-12


class EncoderFailure(DivgenError):
    """The injected encoder raised; carries the offending image id."""


class ZeroVector(DivgenError):
    """A sampled conditioning vector has near-zero norm even after resampling."""


class SamplingScheme(str, Enum):
    FULL_HULL = "full_hull"
    K_SUBSET = "k_subset"


@dataclass(frozen=True)
class EmbeddingSet:
    """N exemplar embeddings (rows) with provenance."""

    vectors: np.ndarray
    source_ids: tuple[str, ...]
    encoder_fingerprint: str = "unknown-encoder"

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] < 1:
            raise DivgenError(f"vectors must be a non-empty N x D matrix, got shape {vectors.shape}")
        if not np.all(np.isfinite(vectors)):
            raise DivgenError("vectors contains non-finite entries")
        if len(self.source_ids) != vectors.shape[0]:
            raise DivgenError(
                f"{len(self.source_ids)} source_ids for {vectors.shape[0]} vectors"
            )
        object.__setattr__(self, "vectors", vectors)

    @property
    def count(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])


@dataclass(frozen=True)
class SamplePlan:
    """How many convex combinations to draw, and by which scheme."""

    scheme: SamplingScheme
    count: int
    k: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise DivgenError(f"count must be >= 1, got {self.count}")
        if self.scheme is SamplingScheme.K_SUBSET and self.k < 1:
            raise DivgenError(f"k must be >= 1, got {self.k}")


def encode_exemplars(
    images: Sequence,
    encoder: Callable,
    source_ids: Optional[Sequence[str]] = None,
    encoder_fingerprint: str = "injected-encoder",
) -> EmbeddingSet:
    """Run the injected encoder over each image and stack the results."""
    if len(images) == 0:
        raise DivgenError("images list is empty")
    ids = tuple(source_ids) if source_ids is not None else tuple(str(i) for i in range(len(images)))
    rows = []
    for image_id, image in zip(ids, images):
        try:
            rows.append(np.asarray(encoder(image), dtype=np.float64).reshape(-1))
        except Exception as exc:
            raise EncoderFailure(f"encoder failed on image {image_id!r}: {exc}") from exc
    dims = {row.shape[0] for row in rows}
    if len(dims) != 1:
        raise EncoderFailure(f"encoder returned mixed dimensions {sorted(dims)}")
    return EmbeddingSet(np.stack(rows), ids, encoder_fingerprint)


def _draw_weights(rng: np.random.Generator, n: int, plan: SamplePlan) -> np.ndarray:
    """One flat-Dirichlet weight vector over the plan's support, length n."""
    weights = np.zeros(n)
    if plan.scheme is SamplingScheme.FULL_HULL:
        weights[:] = rng.dirichlet(np.ones(n))
    else:
        support = rng.choice(n, size=plan.k, replace=False)
        weights[support] = rng.dirichlet(np.ones(plan.k))
    return weights


def sample_embeddings(eset: EmbeddingSet, plan: SamplePlan) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``plan.count`` convex combinations of the exemplar vectors.

    Returns (samples, weights) with shapes (count, D) and (count, N); every
    sample equals ``weights[i] @ eset.vectors`` with non-negative weights
    summing to one, so draws are reconstructable from the logged weights.
    """
    if plan.scheme is SamplingScheme.K_SUBSET and plan.k > eset.count:
        raise DivgenError(f"k={plan.k} exceeds the {eset.count} available vectors")
    rng = np.random.default_rng(plan.rng_seed)
    weights = np.stack([_draw_weights(rng, eset.count, plan) for _ in range(plan.count)])
    return weights @ eset.vectors, weights


def circle_points(n_points: int, radius: float) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(n_points) / n_points
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])


@dataclass(frozen=True)
class SchemeStats:
    mean_distance_to_center: float
    histogram_edges: tuple[float, ...]
    histogram_counts: tuple[int, ...]
    mean_pairwise_distance: float


@dataclass(frozen=True)
class DiversityReport:
    """Per-scheme diversity statistics plus plot-ready sample coordinates."""

    n_points: int
    radius: float
    draws: int
    rng_seed: int
    stats: dict[str, SchemeStats] = field(default_factory=dict)
    samples: tuple[tuple[str, float, float], ...] = ()

    def to_json(self) -> str:
        doc = {
            "n_points": self.n_points,
            "radius": self.radius,
            "draws": self.draws,
            "rng_seed": self.rng_seed,
            "schemes": {
                name: {
                    "mean_distance_to_center": s.mean_distance_to_center,
                    "histogram_edges": list(s.histogram_edges),
                    "histogram_counts": list(s.histogram_counts),
                    "mean_pairwise_distance": s.mean_pairwise_distance,
                }
                for name, s in self.stats.items()
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def samples_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["scheme", "x", "y"])
        for scheme, x, y in self.samples:
            writer.writerow([scheme, repr(float(x)), repr(float(y))])
        return buf.getvalue()


_PAIRWISE_CAP = 2000  # pairwise stat is O(m^2); cap the sample it sees


def _scheme_stats(samples: np.ndarray, center: np.ndarray, radius: float) -> SchemeStats:
    dists = np.linalg.norm(samples - center, axis=1)
    counts, edges = np.histogram(dists, bins=20, range=(0.0, radius))
    subset = samples[: min(len(samples), _PAIRWISE_CAP)]
    diffs = subset[:, None, :] - subset[None, :, :]
    pair = np.linalg.norm(diffs, axis=-1)
    m = len(subset)
    mean_pair = float(pair.sum() / (m * (m - 1))) if m > 1 else 0.0
    return SchemeStats(
        mean_distance_to_center=float(dists.mean()),
        histogram_edges=tuple(float(e) for e in edges),
        histogram_counts=tuple(int(c) for c in counts),
        mean_pairwise_distance=mean_pair,
    )


def circle_demo(n_points: int, radius: float, draws: int, rng_seed: int = 0) -> DiversityReport:
    """Contrast the two schemes on evenly spaced circle points.

    Full-hull draws cluster near the center; 3-subset draws roam the disk.
    Returns per-scheme statistics and the raw sample coordinates.
    """
    if n_points < 3:
        raise DivgenError(f"n_points must be >= 3, got {n_points}")
    if draws < 1:
        raise DivgenError(f"draws must be >= 1, got {draws}")
    points = circle_points(n_points, radius)
    eset = EmbeddingSet(points, tuple(f"p{i}" for i in range(n_points)), "circle-demo")
    center = points.mean(axis=0)

    seeds = np.random.SeedSequence(rng_seed).generate_state(2)
    plans = {
        SamplingScheme.FULL_HULL.value: SamplePlan(
            SamplingScheme.FULL_HULL, count=draws, rng_seed=int(seeds[0])
        ),
        SamplingScheme.K_SUBSET.value: SamplePlan(
            SamplingScheme.K_SUBSET, count=draws, k=min(3, n_points), rng_seed=int(seeds[1])
        ),
    }
    stats: dict[str, SchemeStats] = {}
    samples_out: list[tuple[str, float, float]] = []
    for name, plan in plans.items():
        samples, _ = sample_embeddings(eset, plan)
        stats[name] = _scheme_stats(samples, center, radius)
        samples_out.extend((name, float(x), float(y)) for x, y in samples)
    return DiversityReport(
        n_points=n_points,
        radius=radius,
        draws=draws,
        rng_seed=rng_seed,
        stats=stats,
        samples=tuple(samples_out),
    )


def plan_interpolated_requests(
    eset: EmbeddingSet,
    plan: SamplePlan,
    class_label: str,
    defaults: PlanDefaults = PlanDefaults(),
    class_index: int = 0,
    master_seed: int = 0,
    task_name: str = "interp",
) -> list[GenerationRequest]:
    """Build generation requests conditioned on sampled embeddings.

    Every request uses the base-class prompt and a unit-normalized convex
    combination as ``conditioning_embedding``. A draw with near-zero norm is
    resampled once, then rejected with :class:`ZeroVector`.
    """
    if plan.scheme is SamplingScheme.K_SUBSET and plan.k > eset.count:
        raise DivgenError(f"k={plan.k} exceeds the {eset.count} available vectors")
    rng = np.random.default_rng(plan.rng_seed)
    base = stable_hash64(master_seed, task_name, "interp-seed", class_label) & SEED_MASK_63
    if base + plan.count > SEED_MASK_63 + 1:
        base -= plan.count

    requests: list[GenerationRequest] = []
    for i in range(plan.count):
        vector = _draw_weights(rng, eset.count, plan) @ eset.vectors
        norm = float(np.linalg.norm(vector))
        if norm < ZERO_NORM_THRESHOLD:
            vector = _draw_weights(rng, eset.count, plan) @ eset.vectors
            norm = float(np.linalg.norm(vector))
            if norm < ZERO_NORM_THRESHOLD:
                raise ZeroVector(f"draw {i} for class {class_label!r} has norm {norm:.3e}")
        requests.append(
            GenerationRequest(
                request_id=i,
                class_label=class_label,
                class_index=class_index,
                trick=TrickKind.BASE_CLASS,
                prompt=BASE_CLASS_TEMPLATE.format(label=class_label),
                seed=base + i,
                guidance_scale=defaults.guidance_scale,
                ddim_steps=defaults.ddim_steps,
                width=defaults.width,
                height=defaults.height,
                conditioning_embedding=tuple(float(v) for v in vector / norm),
            )
        )
    return requests
