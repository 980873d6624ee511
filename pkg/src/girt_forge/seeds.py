"""Stable seed derivation so per-item randomness is independent of
iteration order."""

from __future__ import annotations

import hashlib


def derive_seed(*parts) -> int:
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
