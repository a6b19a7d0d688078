"""Prompt templates and deterministic request-plan expansion.

Expanding a (task, trick) pair yields an ordered list of fully-determined
:class:`GenerationRequest` values. Identical inputs produce byte-identical
plans on any platform: all randomness flows through :class:`PlanRng`, a
PCG64 stream keyed by (master_seed, task name, trick), and per-request
seeds come from stable 64-bit hashes, not from generation order.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from .core import (
    ELEMENTARY_TRICKS,
    ClassificationTask,
    DomainCatalog,
    TrickKind,
    catalog_for,
)
from .errors import DivgenError
from .hashing import SEED_MASK_63, stable_hash64

BASE_CLASS_TEMPLATE = "an image of a {label}"
MULTI_DOMAIN_TEMPLATE = "a {domain} of a {label}"
SATELLITE_TEMPLATE = "a satellite photo of a {label} in the style of a {domain}"

DEFAULT_DDIM_STEPS = 40
DEFAULT_GUIDANCE_SCALE = 7.5
RANDOM_GUIDANCE_LOW = 1.0
RANDOM_GUIDANCE_HIGH = 5.0


class MissingDomain(DivgenError):
    """Multi-domain prompt requested without a domain."""


class UnknownDomain(DivgenError):
    """Domain not present in the active catalog."""


class UnresolvedTrick(DivgenError):
    """A composite trick reached a code path that needs an elementary one."""


@dataclass(frozen=True)
class GenerationRequest:
    """One fully-determined text-to-image call."""

    request_id: int
    class_label: str
    class_index: int
    trick: TrickKind
    prompt: str
    seed: int
    guidance_scale: float
    ddim_steps: int = DEFAULT_DDIM_STEPS
    width: int = 512
    height: int = 512
    conditioning_embedding: Optional[tuple[float, ...]] = None
    domain: Optional[str] = None

    def __post_init__(self):
        if self.ddim_steps < 1:
            raise DivgenError(f"ddim_steps must be positive, got {self.ddim_steps}")
        if self.guidance_scale < 0:
            raise DivgenError(f"guidance_scale must be >= 0, got {self.guidance_scale}")
        if not (0 <= self.seed < 2**64):
            raise DivgenError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.width < 1 or self.height < 1:
            raise DivgenError(f"request size must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True)
class PlanDefaults:
    """Generation hyperparameters shared by every request in a plan."""

    ddim_steps: int = DEFAULT_DDIM_STEPS
    guidance_scale: float = DEFAULT_GUIDANCE_SCALE
    width: int = 512
    height: int = 512


class PlanRng:
    """Deterministic randomness source for one (master_seed, task, trick) plan.

    ``algorithm`` names the underlying bit generator; only "pcg64" is
    shipped. The guidance stream and per-class seed bases are derived from
    keyed blake2b hashes, so plans are independent of call order elsewhere.
    """

    def __init__(self, master_seed: int, task_name: str, trick: TrickKind, algorithm: str = "pcg64"):
        if algorithm != "pcg64":
            raise DivgenError(f"unsupported plan rng algorithm {algorithm!r}")
        self.master_seed = int(master_seed)
        self.task_name = task_name
        self.trick = trick
        self.algorithm = algorithm
        self._guidance = np.random.Generator(
            np.random.PCG64(stable_hash64(self.master_seed, task_name, trick.value, "guidance"))
        )

    def for_trick(self, trick: TrickKind) -> "PlanRng":
        return PlanRng(self.master_seed, self.task_name, trick, self.algorithm)

    def next_guidance(self) -> float:
        return float(self._guidance.uniform(RANDOM_GUIDANCE_LOW, RANDOM_GUIDANCE_HIGH))

    def class_seed_base(self, class_label: str, salt: int = 0) -> int:
        # Masked to 63 bits so a contiguous block of seeds never wraps u64.
        return (
            stable_hash64(self.master_seed, self.task_name, self.trick.value, "class-seed", class_label, salt)
            & SEED_MASK_63
        )


def sample_guidance(rng: PlanRng) -> float:
    """Draw one guidance scale uniformly from [1, 5]."""
    return rng.next_guidance()


def render_prompt(
    trick: TrickKind,
    class_label: str,
    domain: Optional[str] = None,
    satellite: bool = False,
) -> str:
    """Render the exact prompt template for a trick; no other normalization.

    ``domain`` must be supplied iff ``trick`` is MULTI_DOMAIN and must come
    from the catalog selected by ``satellite``.
    """
    if trick in (TrickKind.ALL_COMBINED, TrickKind.BEST_TRICKS):
        raise UnresolvedTrick(f"{trick.value} must be resolved to elementary tricks before prompting")
    if trick is TrickKind.MULTI_DOMAIN:
        if domain is None:
            raise MissingDomain("multi_domain prompts need a domain")
        catalog = catalog_for(satellite)
        if domain not in catalog:
            raise UnknownDomain(f"domain {domain!r} not in the {catalog.style.value} catalog")
        template = SATELLITE_TEMPLATE if satellite else MULTI_DOMAIN_TEMPLATE
        return template.format(label=class_label, domain=domain)
    if domain is not None:
        raise DivgenError(f"domain given for trick {trick.value}, which takes none")
    if trick is TrickKind.CLASS_PROMPT:
        return class_label
    # BASE_CLASS, and RANDOM_GUIDANCE which reuses the base-class prompt.
    return BASE_CLASS_TEMPLATE.format(label=class_label)


def _reserve_seed_bases(rng: PlanRng, labels: Iterable[str], count: int) -> dict[str, int]:
    """Pick a disjoint contiguous seed range [base, base+count) per class.

    Hash collisions between ranges are broken deterministically by bumping a
    per-class salt, so a plan can never contain two identical seeds by
    accident.
    """
    taken: list[tuple[int, int]] = []
    bases: dict[str, int] = {}
    for label in labels:
        salt = 0
        while True:
            base = rng.class_seed_base(label, salt)
            end = base + count
            if end <= SEED_MASK_63 + 1 and all(base >= e or end <= s for s, e in taken):
                break
            salt += 1
        taken.append((base, end))
        bases[label] = base
    return bases


def expand(
    task: ClassificationTask,
    trick: TrickKind,
    rng: PlanRng,
    seed_share_mode: bool = False,
    defaults: PlanDefaults = PlanDefaults(),
    multiplier: int = 1,
) -> list[GenerationRequest]:
    """Expand a (task, trick) pair into an ordered request plan.

    Elementary tricks emit exactly ``per_class_count * multiplier`` requests
    per class, classes in canonical order. Multi-domain assigns domains
    round-robin per class so domain counts differ by at most one; with
    ``seed_share_mode`` every full domain cycle reuses one seed, mirroring
    shared-initial-noise grids. ALL_COMBINED concatenates the four
    elementary plans in fixed order and renumbers request ids globally.
    """
    if trick is TrickKind.BEST_TRICKS:
        raise UnresolvedTrick("best_tricks must be resolved per task before expansion")
    if trick is TrickKind.ALL_COMBINED:
        parts = [(t, multiplier) for t in ELEMENTARY_TRICKS]
        return expand_composition(task, parts, rng.master_seed, seed_share_mode, defaults)

    count = task.per_class_count * multiplier
    catalog: DomainCatalog | None = catalog_for(task.satellite) if trick is TrickKind.MULTI_DOMAIN else None
    bases = _reserve_seed_bases(rng, task.class_labels, count)

    plan: list[GenerationRequest] = []
    request_id = 0
    for class_index, label in enumerate(task.class_labels):
        base = bases[label]
        for j in range(count):
            domain = None
            if catalog is not None:
                domain = catalog.domains[j % len(catalog)]
            if seed_share_mode and catalog is not None:
                seed = base + j // len(catalog)
            else:
                seed = base + j
            guidance = (
                sample_guidance(rng)
                if trick is TrickKind.RANDOM_GUIDANCE
                else defaults.guidance_scale
            )
            plan.append(
                GenerationRequest(
                    request_id=request_id,
                    class_label=label,
                    class_index=class_index,
                    trick=trick,
                    prompt=render_prompt(trick, label, domain, task.satellite),
                    seed=seed,
                    guidance_scale=guidance,
                    ddim_steps=defaults.ddim_steps,
                    width=defaults.width,
                    height=defaults.height,
                    domain=domain,
                )
            )
            request_id += 1
    return plan


def expand_composition(
    task: ClassificationTask,
    parts: list[tuple[TrickKind, int]],
    master_seed: int,
    seed_share_mode: bool = False,
    defaults: PlanDefaults = PlanDefaults(),
) -> list[GenerationRequest]:
    """Concatenate elementary plans for (trick, multiplier) parts.

    Each part expands exactly as its standalone elementary plan would (same
    seeds, same guidance stream); request ids are renumbered globally.
    """
    plan: list[GenerationRequest] = []
    for trick, mult in parts:
        if trick not in ELEMENTARY_TRICKS:
            raise UnresolvedTrick(f"composition parts must be elementary, got {trick.value}")
        sub = expand(
            task,
            trick,
            PlanRng(master_seed, task.name, trick),
            seed_share_mode=seed_share_mode,
            defaults=defaults,
            multiplier=mult,
        )
        plan.extend(sub)
    return [replace(req, request_id=i) for i, req in enumerate(plan)]


def request_to_dict(req: GenerationRequest) -> dict:
    """Plan-line form of a request: manifest entry keys plus generation keys."""
    return {
        "request_id": req.request_id,
        "class_index": req.class_index,
        "class_label": req.class_label,
        "trick": req.trick.value,
        "prompt": req.prompt,
        "seed": req.seed,
        "guidance_scale": req.guidance_scale,
        "domain": req.domain,
        "ddim_steps": req.ddim_steps,
        "width": req.width,
        "height": req.height,
        "conditioning_embedding": (
            list(req.conditioning_embedding) if req.conditioning_embedding is not None else None
        ),
        "file_path": None,
        "digest": None,
    }


def request_from_dict(entry: dict) -> GenerationRequest:
    embedding = entry.get("conditioning_embedding")
    return GenerationRequest(
        request_id=int(entry["request_id"]),
        class_label=entry["class_label"],
        class_index=int(entry["class_index"]),
        trick=TrickKind(entry["trick"]),
        prompt=entry["prompt"],
        seed=int(entry["seed"]),
        guidance_scale=float(entry["guidance_scale"]),
        ddim_steps=int(entry.get("ddim_steps", DEFAULT_DDIM_STEPS)),
        width=int(entry.get("width", 512)),
        height=int(entry.get("height", 512)),
        conditioning_embedding=tuple(embedding) if embedding is not None else None,
        domain=entry.get("domain"),
    )


def plan_to_jsonl(plan: list[GenerationRequest], header: dict) -> str:
    """Serialize a plan in the manifest line format (header line first)."""
    lines = [json.dumps({"header": header}, sort_keys=True, separators=(",", ":"), ensure_ascii=False)]
    lines.extend(
        json.dumps(request_to_dict(req), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        for req in plan
    )
    return "\n".join(lines) + "\n"


def plan_from_jsonl(text: str) -> tuple[dict, list[GenerationRequest]]:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise DivgenError("empty plan document")
    header = json.loads(lines[0]).get("header", {})
    plan = [request_from_dict(json.loads(line)) for line in lines[1:]]
    return header, plan
