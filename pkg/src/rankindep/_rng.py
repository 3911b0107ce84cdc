"""Deterministic seeding: 64-bit mixing and counter-based substreams.

Every random draw in the library comes from a Philox stream keyed by a
splitmix64-style hash of a user seed plus integer context tags, so any
unit of work (a permutation draw, a simulation cell, a subsample) can be
replayed in isolation and in any order.

Stream tag registry (keep values unique across the library):

======  =========================================
 tag     consumer
======  =========================================
 1       dgp generators (one stream per dataset)
 2       permutation draws (plus the draw index)
 3       study plan seeds (per simulation cell)
 4       subsample row draws (plus repeat index)
 5       CLI oracle-check rank pairs (plus n)
======  =========================================
"""

import numpy as np

_MASK64 = (1 << 64) - 1

TAG_DGP = 1
TAG_PERMUTE = 2
TAG_PLAN = 3
TAG_SUBSAMPLE = 4
TAG_ORACLE = 5


def mix64(*parts):
    """Hash a tuple of integers into one 64-bit value.

    Chains the splitmix64 finalizer over the parts, so the result depends
    on both the values and their order. Negative parts are folded into
    the 64-bit ring first.
    """
    acc = 0x9E3779B97F4A7C15
    for part in parts:
        acc = (acc + (int(part) & _MASK64) + 0x9E3779B97F4A7C15) & _MASK64
        z = acc
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        acc = (z ^ (z >> 31)) & _MASK64
    return acc


def substream(seed, *tags):
    """Return a fresh ``numpy.random.Generator`` keyed by (seed, *tags).

    Uses the counter-based Philox generator, so substreams derived from
    distinct (seed, tags) tuples are independent and scheduling-free:
    draw b of a permutation plan is the same whether it runs first, last,
    or in another process.
    """
    return np.random.Generator(np.random.Philox(key=mix64(seed, *tags)))
