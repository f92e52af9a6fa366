"""Deterministic seeded sampling of rational matrices and friends.

A master seed fans out to per-check seeds through a stable hash of the check
name, so adding checks never perturbs the samples drawn by existing ones.
"""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction

from .ratlin import Matrix, rank


def subseed(master_seed, name):
    digest = hashlib.sha256(("%d|%s" % (master_seed, name)).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(master_seed, name):
    return random.Random(subseed(master_seed, name))


def random_matrix(rng, rows, cols, lo=-5, hi=5):
    return Matrix(rows, cols,
                  [[Fraction(rng.randint(lo, hi)) for _ in range(cols)]
                   for _ in range(rows)])


def random_invertible(rng, n, lo=-3, hi=3, tries=200):
    """Small-integer invertible matrix, by determinant retry."""
    if n == 0:
        return Matrix.zeros(0, 0)
    for _ in range(tries):
        a = random_matrix(rng, n, n, lo, hi)
        if rank(a) == n:
            return a
    raise RuntimeError("failed to sample an invertible %dx%d matrix" % (n, n))
