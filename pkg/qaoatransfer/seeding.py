# qaoatransfer/seeding.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Seeded random streams
# Every stochastic operation takes an explicit integer seed; sub-streams
# (restarts, graph slots, heuristic restarts) are spawned in a fixed order

from typing import List

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Generator for a single seeded stream."""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """`count` independent generators; stream k depends only on (seed, k)."""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.default_rng(child) for child in children]


def derive_seed(seed: int, *labels: int) -> int:
    """Stable 63-bit child seed for a labelled sub-task (graph slot, donor index...)."""
    sequence = np.random.SeedSequence([int(seed)] + [int(label) for label in labels])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
