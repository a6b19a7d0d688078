"""Task model and shared vocabulary for the synthetic-data pipeline.

A :class:`ClassificationTask` pins down the unseen-class label set, native
image geometry and per-class budget for one zero-shot problem. The shipped
presets (cifar10, cifar100, eurosat) mirror the benchmark settings this
pipeline was built around; custom tasks register through config.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum

from .errors import DivgenError

logger = logging.getLogger(__name__)


class DuplicateClass(DivgenError):
    """Two class labels collide after whitespace trimming."""


class EmptyClass(DivgenError):
    """A class label is empty after whitespace trimming."""


class InvalidGeometry(DivgenError):
    """Image geometry or per-class count is out of range."""


class TrickKind(str, Enum):
    """Prompt/parameter strategies used to diversify generated datasets.

    ``ALL_COMBINED`` is the concatenation of the four elementary tricks'
    request plans; ``BEST_TRICKS`` is a per-task alias resolved by
    :func:`resolve_best_tricks`.
    """

    BASE_CLASS = "base_class"
    CLASS_PROMPT = "class_prompt"
    MULTI_DOMAIN = "multi_domain"
    RANDOM_GUIDANCE = "random_guidance"
    ALL_COMBINED = "all_combined"
    BEST_TRICKS = "best_tricks"


ELEMENTARY_TRICKS: tuple[TrickKind, ...] = (
    TrickKind.BASE_CLASS,
    TrickKind.CLASS_PROMPT,
    TrickKind.MULTI_DOMAIN,
    TrickKind.RANDOM_GUIDANCE,
)


class DomainStyle(str, Enum):
    GENERIC_OBJECTS = "generic_objects"
    SATELLITE = "satellite"


@dataclass(frozen=True)
class DomainCatalog:
    """Ordered list of style domains used by the multi-domain trick."""

    style: DomainStyle
    domains: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.domains)

    def __contains__(self, domain: str) -> bool:
        return domain in self.domains


GENERIC_OBJECTS_CATALOG = DomainCatalog(
    style=DomainStyle.GENERIC_OBJECTS,
    domains=(
        "photo",
        "drawing",
        "painting",
        "sketch",
        "collage",
        "poster",
        "digital art image",
        "rock drawing",
        "stick figure",
        "3D rendering",
    ),
)

SATELLITE_CATALOG = DomainCatalog(
    style=DomainStyle.SATELLITE,
    domains=("realistic photo", "drawing", "painting", "sketch", "3D rendering"),
)


def catalog_for(satellite: bool) -> DomainCatalog:
    return SATELLITE_CATALOG if satellite else GENERIC_OBJECTS_CATALOG


@dataclass(frozen=True)
class ClassificationTask:
    """One zero-shot classification problem.

    ``class_labels`` order is the canonical class-index order everywhere
    downstream. Labels are substituted into prompts verbatim: no casing or
    article normalization is applied, so ambiguous names stay ambiguous.

    ``satellite`` selects the satellite prompt variant and domain catalog;
    ``family`` tags the preset group ("cifar", "eurosat", "generic") used by
    the training harness to resolve weight decay.
    """

    name: str
    class_labels: tuple[str, ...]
    native_image_size: tuple[int, int]
    per_class_count: int
    test_set_ref: str = ""
    satellite: bool = False
    family: str = "generic"

    @property
    def num_classes(self) -> int:
        return len(self.class_labels)

    def class_index(self, label: str) -> int:
        return self.class_labels.index(label)


def validate_task(task: ClassificationTask) -> ClassificationTask:
    """Check task invariants and return the task unchanged.

    Idempotent by construction. Raises :class:`DuplicateClass`,
    :class:`EmptyClass` or :class:`InvalidGeometry`, naming the offending
    field.
    """
    trimmed = [label.strip() for label in task.class_labels]
    for i, label in enumerate(trimmed):
        if not label:
            raise EmptyClass(f"class_labels[{i}] is empty after whitespace trimming")
    seen: dict[str, int] = {}
    for i, label in enumerate(trimmed):
        if label in seen:
            raise DuplicateClass(
                f"class_labels[{seen[label]}] and class_labels[{i}] both trim to {label!r}"
            )
        seen[label] = i
    if not task.class_labels:
        raise EmptyClass("class_labels is empty")
    if task.per_class_count < 1:
        raise InvalidGeometry(f"per_class_count must be >= 1, got {task.per_class_count}")
    width, height = task.native_image_size
    if width < 8 or height < 8:
        raise InvalidGeometry(f"native_image_size dimensions must be >= 8 px, got {width}x{height}")
    return task


CIFAR10_LABELS: tuple[str, ...] = (
    "airplane", "automobile", "bird", "cat", "deer",
    "dog", "frog", "horse", "ship", "truck",
)

CIFAR100_LABELS: tuple[str, ...] = (
    "apple", "aquarium fish", "baby", "bear", "beaver", "bed", "bee", "beetle",
    "bicycle", "bottle", "bowl", "boy", "bridge", "bus", "butterfly", "camel",
    "can", "castle", "caterpillar", "cattle", "chair", "chimpanzee", "clock",
    "cloud", "cockroach", "couch", "crab", "crocodile", "cup", "dinosaur",
    "dolphin", "elephant", "flatfish", "forest", "fox", "girl", "hamster",
    "house", "kangaroo", "keyboard", "lamp", "lawn mower", "leopard", "lion",
    "lizard", "lobster", "man", "maple tree", "motorcycle", "mountain",
    "mouse", "mushroom", "oak tree", "orange", "orchid", "otter", "palm tree",
    "pear", "pickup truck", "pine tree", "plain", "plate", "poppy",
    "porcupine", "possum", "rabbit", "raccoon", "ray", "road", "rocket",
    "rose", "sea", "seal", "shark", "shrew", "skunk", "skyscraper", "snail",
    "snake", "spider", "squirrel", "streetcar", "sunflower", "sweet pepper",
    "table", "tank", "telephone", "television", "tiger", "tractor", "train",
    "trout", "tulip", "turtle", "wardrobe", "whale", "willow tree", "wolf",
    "woman", "worm",
)

EUROSAT_LABELS: tuple[str, ...] = (
    "Annual Crop", "Forest", "Herbaceous Vegetation", "Highway", "Industrial",
    "Pasture", "Permanent Crop", "Residential", "River", "Sea/Lake",
)

# Per-class counts follow the real datasets' training splits; EuroSAT's is
# configurable because the source material only pins the 2700/class figure.
TASK_PRESETS: dict[str, ClassificationTask] = {
    "cifar10": ClassificationTask(
        name="cifar10",
        class_labels=CIFAR10_LABELS,
        native_image_size=(32, 32),
        per_class_count=5000,
        test_set_ref="cifar10-test",
        satellite=False,
        family="cifar",
    ),
    "cifar100": ClassificationTask(
        name="cifar100",
        class_labels=CIFAR100_LABELS,
        native_image_size=(32, 32),
        per_class_count=500,
        test_set_ref="cifar100-test",
        satellite=False,
        family="cifar",
    ),
    "eurosat": ClassificationTask(
        name="eurosat",
        class_labels=EUROSAT_LABELS,
        native_image_size=(64, 64),
        per_class_count=2700,
        test_set_ref="eurosat-test",
        satellite=True,
        family="eurosat",
    ),
}


def task_preset(name: str, **overrides) -> ClassificationTask:
    """Return a shipped preset, optionally overriding fields."""
    try:
        task = TASK_PRESETS[name.lower()]
    except KeyError:
        raise InvalidGeometry(f"unknown task preset {name!r}; known: {sorted(TASK_PRESETS)}")
    return replace(task, **overrides) if overrides else task


# Per-task best-trick compositions as (trick, multiplier) pairs. The eurosat
# entry doubles the random-guidance budget rather than repeating images.
_BEST_TRICKS: dict[str, list[tuple[TrickKind, int]]] = {
    "cifar10": [(trick, 1) for trick in ELEMENTARY_TRICKS],
    "cifar100": [
        (TrickKind.BASE_CLASS, 1),
        (TrickKind.MULTI_DOMAIN, 1),
        (TrickKind.RANDOM_GUIDANCE, 1),
    ],
    "eurosat": [(TrickKind.RANDOM_GUIDANCE, 2)],
}


def resolve_best_tricks(task_name: str) -> list[tuple[TrickKind, int]]:
    """Map a task name to its best-trick composition.

    Case-insensitive; unknown names fall back to the all-combined
    composition with a logged warning.
    """
    composition = _BEST_TRICKS.get(task_name.strip().lower())
    if composition is None:
        logger.warning(
            "no best-tricks entry for task %r; falling back to all four tricks x1",
            task_name,
        )
        composition = [(trick, 1) for trick in ELEMENTARY_TRICKS]
    return list(composition)
