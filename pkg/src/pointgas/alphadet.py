"""Exact combinatorial linear algebra: alpha-determinants and friends.

The alpha-determinant of an n x n matrix A is

    det_a A = sum over permutations s of alpha**(n - nu(s)) * prod_i A[i, s(i)]

with nu(s) the number of cycles of s.  alpha = -1 gives the ordinary
determinant, alpha = +1 the permanent.  Everything here is brute-force or
cycle-type based and serves as the ground-truth oracle layer for the
analytic modules.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from math import factorial

import numpy as np

from .errors import DimensionTooLargeError

# Size caps keeping desk-scale runtimes under seconds.
MAX_PERMUTATION_N = 10
MAX_RYSER_N = 24
MAX_PARTITION_N = 40


def cycle_count(perm) -> int:
    """Number of cycles nu(s) of a permutation given as a 0-based image list."""
    perm = np.asarray(perm, dtype=int)
    n = perm.size
    if sorted(perm.tolist()) != list(range(n)):
        raise ValueError("not a permutation of 0..n-1")
    seen = np.zeros(n, dtype=bool)
    count = 0
    for start in range(n):
        if seen[start]:
            continue
        count += 1
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
    return count


def cycle_type(perm) -> tuple[int, ...]:
    """Cycle lengths of a permutation, sorted decreasingly (a partition of n)."""
    perm = np.asarray(perm, dtype=int)
    n = perm.size
    seen = np.zeros(n, dtype=bool)
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = perm[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple[tuple[int, ...], ...]:
    """All integer partitions of n as nonincreasing tuples."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > MAX_PARTITION_N:
        raise DimensionTooLargeError(f"partition enumeration capped at n={MAX_PARTITION_N}")
    if n == 0:
        return ((),)
    result = []

    def extend(remaining, largest, prefix):
        if remaining == 0:
            result.append(tuple(prefix))
            return
        for part in range(min(largest, remaining), 0, -1):
            prefix.append(part)
            extend(remaining - part, part, prefix)
            prefix.pop()

    extend(n, n, [])
    return tuple(result)


def partition_multiplicities(parts: tuple[int, ...]) -> dict[int, int]:
    """Multiplicity m_l of each cycle length l in a partition."""
    mult: dict[int, int] = {}
    for p in parts:
        mult[p] = mult.get(p, 0) + 1
    return mult


def conjugacy_class_size(parts: tuple[int, ...]) -> int:
    """Number of permutations of S_n with the given cycle type: n!/prod(l^m_l m_l!)."""
    n = sum(parts)
    denom = 1
    for length, mult in partition_multiplicities(parts).items():
        denom *= length**mult * factorial(mult)
    return factorial(n) // denom


def _as_square(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a.astype(complex)


def alpha_det(a, alpha: complex, max_n: int = MAX_PERMUTATION_N) -> complex:
    """alpha-determinant by explicit permutation enumeration (n <= max_n)."""
    a = _as_square(a)
    n = a.shape[0]
    if n > max_n:
        raise DimensionTooLargeError(f"alpha_det enumerates permutations; capped at n={max_n}")
    rows = np.arange(n)
    total = 0.0 + 0.0j
    for sigma in permutations(range(n)):
        nu = cycle_count(sigma)
        total += alpha ** (n - nu) * np.prod(a[rows, sigma])
    return total


def permanent_ryser(a) -> complex:
    """Permanent via Ryser's inclusion-exclusion with Gray-code subset updates."""
    a = _as_square(a)
    n = a.shape[0]
    if n > MAX_RYSER_N:
        raise DimensionTooLargeError(f"permanent_ryser capped at n={MAX_RYSER_N}")
    if n == 0:
        return 1.0 + 0.0j
    # Gray-code walk over nonempty column subsets; row_sums tracks
    # sum over the current subset for every row.
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    gray = 0
    sign_size = 0
    for i in range(1, 2**n):
        new_gray = i ^ (i >> 1)
        changed = new_gray ^ gray
        col = changed.bit_length() - 1
        if new_gray & changed:
            row_sums += a[:, col]
            sign_size += 1
        else:
            row_sums -= a[:, col]
            sign_size -= 1
        gray = new_gray
        total += (-1) ** (n - sign_size) * np.prod(row_sums)
    return total


def _power_traces(j, n_max: int) -> np.ndarray:
    """Tr J^l for l = 1..n_max, from a matrix or an eigenvalue list."""
    j = np.asarray(j)
    if j.ndim == 2:
        eig = np.linalg.eigvals(j.astype(complex))
    else:
        eig = j.astype(complex)
    ls = np.arange(1, n_max + 1)
    return np.sum(eig[None, :] ** ls[:, None], axis=1)


def power_sum_alpha_sum(j, alpha: complex, n: int) -> complex:
    """Cycle-type-grouped permutation sum

        (1/n!) sum_s alpha**(n-nu(s)) prod_cycles Tr J^len

    i.e. the n-th Taylor coefficient of Det(1 - z*alpha*J)**(-1/alpha).
    Accepts a matrix or a spectrum (1-D eigenvalue array).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0 + 0.0j
    if n > MAX_PARTITION_N:
        raise DimensionTooLargeError(f"power_sum_alpha_sum capped at n={MAX_PARTITION_N}")
    traces = _power_traces(j, n)
    total = 0.0 + 0.0j
    for parts in partitions(n):
        nu = len(parts)
        weight = alpha ** (n - nu)
        denom = 1.0
        term = 1.0 + 0.0j
        for length, mult in partition_multiplicities(parts).items():
            term *= traces[length - 1] ** mult
            denom *= length**mult * factorial(mult)
        total += weight * term / denom
    return total


def power_sum_alpha_sum_enumerated(j, alpha: complex, n: int) -> complex:
    """Same sum by raw enumeration of S_n; oracle for the cycle-type path."""
    if n == 0:
        return 1.0 + 0.0j
    if n > 6:
        raise DimensionTooLargeError("raw enumeration oracle capped at n=6")
    traces = _power_traces(j, n)
    total = 0.0 + 0.0j
    for sigma in permutations(range(n)):
        parts = cycle_type(sigma)
        total += alpha ** (n - len(parts)) * np.prod([traces[l - 1] for l in parts])
    return total / factorial(n)
