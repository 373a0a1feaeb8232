"""Seeded random finite classes for property checks and oracle comparisons."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .core import Generator, generation_closure
from .tokens import Bits, strings_up_to

_TAG = rng.stream_tag("random-class")


@dataclass(frozen=True)
class RandomClassConfig:
    max_members: int = 10
    max_pool: int = 5
    max_len: int = 3
    M: int = 2
    flip_prob: float = 0.25  # perturbation rate around a shared random baseline


def random_class(seed: int, cfg: RandomClassConfig = RandomClassConfig()) -> tuple[list[Generator], list[Bits]]:
    """Table generators over the generation closure of a random pool.

    Members are sparse perturbations of one random baseline so dimensions stay
    varied instead of saturating at log2 of the class size.
    """
    g = rng.generator(seed, _TAG)
    universe = strings_up_to(cfg.max_len)
    n_pool = int(g.integers(1, cfg.max_pool + 1))
    pool = [universe[i] for i in sorted(g.choice(len(universe), size=n_pool, replace=False))]
    closure = generation_closure(pool, cfg.M)
    n_members = int(g.integers(1, cfg.max_members + 1))
    base = g.integers(0, 2, size=len(closure))
    flip_prob = cfg.flip_prob if g.random() < 0.7 else 0.5
    members = []
    for a in range(n_members):
        flips = (g.random(len(closure)) < flip_prob).astype(np.int64)
        bits = base ^ flips
        members.append(Generator.from_table(dict(zip(closure, (int(v) for v in bits))), f"r{seed}.{a}"))
    return members, pool


def random_tree_depth(seed: int, max_depth: int) -> int:
    return int(rng.generator(seed, _TAG, 1).integers(1, max_depth + 1))
