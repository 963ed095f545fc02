"""Statistics and formatting helpers shared by the simulators and reports."""

import math
from collections import Counter
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

# Width of every statistical acceptance band, in binomial standard errors.
SIGMAS = 4.0


def format_number(value: Optional[float]) -> str:
    """Stable text form of a number; empty for missing values.

    Args:
        value: Number to format, or None

    Returns:
        Up to 12 significant digits, with negative zero folded to zero
    """
    if value is None:
        return ""
    return f"{float(value) + 0.0:.12g}"


def frequencies(values: Iterable[Hashable]) -> Dict[Hashable, float]:
    """Relative frequency of each distinct value.

    Args:
        values: Observed values

    Returns:
        Mapping value -> fraction of observations; empty for no observations
    """
    counts = Counter(values)
    total = sum(counts.values())
    if not total:
        return {}
    return {value: count / total for value, count in counts.items()}


def binomial_stderr(p: float, n: int) -> float:
    """Standard error of an empirical frequency of an event of probability p."""
    if n <= 0:
        return math.inf
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def binomial_tolerance(p: float, n: int, sigmas: float = SIGMAS) -> float:
    """Acceptance band for |empirical - p| at ``sigmas`` standard errors.

    Zero when p is 0 or 1: such cells must match exactly.
    """
    return sigmas * binomial_stderr(p, n)


def two_sample_tolerance(p: float, n1: int, n2: int, sigmas: float = SIGMAS) -> float:
    """Band for the difference of two independent frequency estimates of p."""
    if n1 <= 0 or n2 <= 0:
        return math.inf
    return sigmas * math.sqrt(max(p * (1.0 - p), 0.0) * (1.0 / n1 + 1.0 / n2))


def tv_distance(p: Mapping[Hashable, float], q: Mapping[Hashable, float]) -> float:
    """Total-variation distance: half the L1 distance."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def tv_tolerance(exact: Mapping[Hashable, float], n1: int, n2: int) -> float:
    """TV band implied by per-cell two-sample tolerances on the exact distribution."""
    return 0.5 * sum(two_sample_tolerance(p, n1, n2) for p in exact.values())


def partition_trials(n: int, workers: int) -> List[Tuple[int, int]]:
    """Split trial ids 0..n-1 into contiguous [start, stop) ranges.

    Args:
        n: Number of trials
        workers: Number of ranges wanted (at least 1)

    Returns:
        Non-empty ranges in trial-id order
    """
    workers = max(1, min(int(workers), n))
    size, extra = divmod(n, workers)
    ranges = []
    start = 0
    for index in range(workers):
        stop = start + size + (1 if index < extra else 0)
        ranges.append((start, stop))
        start = stop
    return ranges


def pairs_to_complex(pairs: Sequence[Sequence[float]]) -> List[complex]:
    """Convert [re, im] pairs to complex numbers."""
    return [complex(float(re), float(im)) for re, im in pairs]


def complex_to_pairs(values: Iterable[complex]) -> List[List[float]]:
    return [[float(v.real), float(v.imag)] for v in values]
