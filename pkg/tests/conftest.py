import math

import numpy as np

from trapshuttle import Schedule


def random_schedules(count: int, max_segments: int = 9, seed: int = 1234,
                     signed: bool = True) -> list[Schedule]:
    """Seeded random alternating plans with durations in (0, 2*pi)."""
    rng = np.random.default_rng(seed)
    schedules = []
    for _ in range(count):
        n = int(rng.integers(1, max_segments + 1))
        durations = tuple(float(d) for d in rng.uniform(1e-3, 2.0 * math.pi - 1e-3, n))
        sign = -1 if (signed and rng.random() < 0.5) else 1
        schedules.append(Schedule(sign, durations))
    return schedules


def random_gammas(count: int, lo: float, hi: float, seed: int = 99) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, count)
