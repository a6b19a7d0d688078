"""Stable hashing helpers.

Everything here must be platform- and process-independent: plan seeds,
manifest digests and mock pixels are all derived from these functions, so
they use keyed byte-level hashes, never Python's salted ``hash()``.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

SEED_MASK_63 = (1 << 63) - 1


def canonical_json(obj) -> str:
    """Serialize ``obj`` with sorted keys and no whitespace; byte-stable."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def stable_hash64(*parts) -> int:
    """64-bit hash of the string forms of ``parts``, order-sensitive."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def stable_hash64_json(obj) -> int:
    return stable_hash64(canonical_json(obj))


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
