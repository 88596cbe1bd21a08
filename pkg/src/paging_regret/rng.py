"""Seeded random streams.

Every stream is a Philox (counter-based, 64-bit) generator keyed by
``(seed, component)``, so trace generation, error injection, learner sampling
and the multiplexer never share state and results do not depend on the order
in which components are evaluated.
"""
from __future__ import annotations

import zlib

import numpy as np


def component_key(component: str) -> int:
    return zlib.crc32(component.encode("utf-8"))


def stream(seed: int, component: str) -> np.random.Generator:
    """Independent generator for ``component`` under ``seed``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, component_key(component)])
    return np.random.Generator(np.random.Philox(ss))
