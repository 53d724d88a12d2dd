"""
Sampling Library

Seeded random exact-rational spectra for bulk certification sweeps.

Each (seed, n, trial) triple gets its own random.Random, seeded from an
md5 digest of the triple, so a trial draws the same spectrum no matter
which worker runs it or in what order.
"""

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List

from lib.errors import InvalidRange
from lib.spectral_core import Spectrum

# Rejection sampling gives up after this many draws per value
MAX_ATTEMPTS_PER_VALUE = 1000


@dataclass(frozen=True)
class TrialKey:
    seed: int
    n: int
    trial: int

    def rng(self) -> random.Random:
        seed_str = f"{self.seed}:{self.n}:{self.trial}"
        return random.Random(int(hashlib.md5(seed_str.encode()).hexdigest()[:16], 16))


def random_rational(rng: random.Random, bound: int) -> Fraction:
    """p/q with p uniform in [-bound, bound] minus 0 and q uniform in [1, bound]."""
    p = rng.randint(1, bound) * rng.choice((-1, 1))
    q = rng.randint(1, bound)
    return Fraction(p, q)


def random_spectrum(rng: random.Random, n: int, bound: int) -> Spectrum:
    """n distinct reduced rationals; a draw that collides is thrown away."""
    if bound < 1:
        raise InvalidRange(f"rational bound must be positive, got {bound}")
    if 2 * bound < n:
        raise InvalidRange(f"rational bound {bound} is too small for {n} distinct values")
    values: List[Fraction] = []
    seen = set()
    attempts = 0
    while len(values) < n:
        attempts += 1
        if attempts > MAX_ATTEMPTS_PER_VALUE * n:
            raise InvalidRange(f"could not draw {n} distinct rationals with bound {bound}")
        v = random_rational(rng, bound)
        if v in seen:
            continue
        seen.add(v)
        values.append(v)
    return Spectrum.exact(values)


def spectrum_for_trial(key: TrialKey, bound: int) -> Spectrum:
    return random_spectrum(key.rng(), key.n, bound)


def trial_keys(seed: int, n_values: List[int], trials: int) -> Iterator[TrialKey]:
    for n in n_values:
        for trial in range(trials):
            yield TrialKey(seed, n, trial)
