"""Young frames with at most two rows (or two columns), their characters,
immanants, and the order-2 para-statistics trace identities.

A row frame with second-row length j carries the induced character
psi_j = Ind_{S_{n-j} x S_j}[1], whose value on a permutation counts the
sigma-invariant j-subsets; the irreducible character is the difference
chi_j = psi_j - psi_{j-1}.  Column frames are handled through the
transpose relation chi_{T'} = sgn * chi_T.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import comb, factorial

import numpy as np

from .alphadet import (
    conjugacy_class_size,
    cycle_type,
    partition_multiplicities,
    partitions,
)
from .errors import DimensionTooLargeError

MAX_CHARACTER_N = 8


@dataclass(frozen=True)
class YoungFrame2:
    """Young frame (n-j, j), or its transpose (2^j, 1^(n-2j)) if ``transposed``."""

    n: int
    j: int
    transposed: bool = False

    def __post_init__(self):
        if not 0 <= self.j <= self.n // 2:
            raise ValueError("second-row length must satisfy 0 <= j <= n//2")

    @property
    def rows(self) -> tuple[int, ...]:
        if self.transposed:
            return tuple([2] * self.j + [1] * (self.n - 2 * self.j))
        return (self.n - self.j, self.j) if self.j else (self.n,)

    def transpose(self) -> "YoungFrame2":
        return YoungFrame2(self.n, self.j, not self.transposed)

    @property
    def dimension(self) -> int:
        """Dimension of the irreducible representation, comb(n,j) - comb(n,j-1)."""
        d = comb(self.n, self.j)
        if self.j > 0:
            d -= comb(self.n, self.j - 1)
        return d


@dataclass(frozen=True)
class Tableau2:
    """Filling of a two-row frame; ``row_sets`` lists the entries of each row."""

    frame: YoungFrame2
    row_sets: tuple[tuple[int, ...], ...]

    @classmethod
    def canonical(cls, frame: YoungFrame2) -> "Tableau2":
        """Row-major filling 0..n-1."""
        lengths = frame.rows
        rows, start = [], 0
        for length in lengths:
            rows.append(tuple(range(start, start + length)))
            start += length
        return cls(frame, tuple(rows))

    @classmethod
    def shuffled(cls, frame: YoungFrame2, rng: np.random.Generator) -> "Tableau2":
        labels = rng.permutation(frame.n)
        lengths = frame.rows
        rows, start = [], 0
        for length in lengths:
            rows.append(tuple(int(x) for x in labels[start : start + length]))
            start += length
        return cls(frame, tuple(rows))

    def column_pairs(self) -> list[tuple[int, int]]:
        """Entries sharing a column of height two; valid for row frames only."""
        if self.frame.transposed:
            raise ValueError("column pairs are defined here for row frames only")
        pairs = []
        if len(self.row_sets) >= 2:
            for x, y in zip(self.row_sets[0], self.row_sets[1]):
                pairs.append((x, y))
        return pairs


def _sign_of_cycle_type(parts: tuple[int, ...]) -> int:
    n = sum(parts)
    return -1 if (n - len(parts)) % 2 else 1


@lru_cache(maxsize=None)
def _psi_row_value(n: int, j: int, parts: tuple[int, ...]) -> int:
    """psi_j on a cycle type: number of sub-multisets of cycle lengths summing
    to j, i.e. [x^j] prod_cycles (1 + x^len)."""
    coeffs = np.zeros(j + 1, dtype=object)
    coeffs[0] = 1
    for length in parts:
        if length <= j:
            coeffs[length:] = coeffs[length:] + coeffs[: j + 1 - length]
    return int(coeffs[j])


def _coerce_cycle_type(n: int, sigma) -> tuple[int, ...]:
    if isinstance(sigma, tuple) and sigma and all(isinstance(p, int) and p >= 1 for p in sigma):
        if sum(sigma) == n and all(a >= b for a, b in zip(sigma, sigma[1:])):
            return sigma
    arr = np.asarray(sigma, dtype=int)
    if arr.size != n:
        raise ValueError(f"permutation size {arr.size} does not match frame size {n}")
    return cycle_type(arr)


def psi_character(frame: YoungFrame2, sigma) -> int:
    """Character of the representation induced from the row stabilizer:
    the trivial one for row frames, the sign one for column frames.

    ``sigma`` may be a permutation (0-based images) or a cycle type.
    """
    parts = _coerce_cycle_type(frame.n, sigma)
    value = _psi_row_value(frame.n, frame.j, parts)
    if frame.transposed:
        value *= _sign_of_cycle_type(parts)
    return value


def chi_character(frame: YoungFrame2, sigma) -> int:
    """Irreducible character of the frame, via chi_j = psi_j - psi_{j-1}."""
    parts = _coerce_cycle_type(frame.n, sigma)
    value = _psi_row_value(frame.n, frame.j, parts)
    if frame.j > 0:
        value -= _psi_row_value(frame.n, frame.j - 1, parts)
    if frame.transposed:
        value *= _sign_of_cycle_type(parts)
    return value


def psi_character_bruteforce(tableau: Tableau2, sigma) -> int:
    """Induced-character oracle: (1/#R) * #{tau : tau^-1 sigma tau in R(T)},
    with a sign twist for column frames.  Exponential in n; n <= 8."""
    frame = tableau.frame
    n = frame.n
    if n > MAX_CHARACTER_N:
        raise DimensionTooLargeError(f"brute-force characters capped at n={MAX_CHARACTER_N}")
    sigma = np.asarray(sigma, dtype=int)
    row_of = np.empty(n, dtype=int)
    for r, row in enumerate(tableau.row_sets):
        for x in row:
            row_of[x] = r
    stab_size = 1
    for row in tableau.row_sets:
        stab_size *= factorial(len(row))
    count = 0
    for tau in permutations(range(n)):
        tau = np.asarray(tau)
        inv = np.empty(n, dtype=int)
        inv[tau] = np.arange(n)
        conj = inv[sigma[tau]]
        if np.all(row_of[conj] == row_of[np.arange(n)]):
            count += 1
    value = count // stab_size
    if frame.transposed:
        value *= _sign_of_cycle_type(cycle_type(sigma))
    return value


def character_table(frame: YoungFrame2) -> dict[tuple[int, ...], int]:
    """chi on every conjugacy class of S_n, keyed by cycle type."""
    return {parts: chi_character(frame, parts) for parts in partitions(frame.n)}


def immanant(a, frame: YoungFrame2) -> complex:
    """Character-weighted permutation sum sum_s chi(s) prod_i A[i, s(i)]."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or n != frame.n:
        raise ValueError("matrix size must match the frame")
    if n > MAX_CHARACTER_N:
        raise DimensionTooLargeError(f"immanant capped at n={MAX_CHARACTER_N}")
    table = character_table(frame)
    rows = np.arange(n)
    total = 0.0 + 0.0j
    for sigma in permutations(range(n)):
        total += table[cycle_type(sigma)] * np.prod(a[rows, sigma])
    return total


def complete_homogeneous(values, n: int) -> float:
    """h_n of the values = trace of the n-fold symmetric power; Newton recursion."""
    values = np.asarray(values, dtype=float)
    p = [np.sum(values**k) for k in range(1, n + 1)]
    h = np.zeros(n + 1)
    h[0] = 1.0
    for m in range(1, n + 1):
        h[m] = sum(p[k - 1] * h[m - k] for k in range(1, m + 1)) / m
    return float(h[n])


def elementary_symmetric(values, n: int) -> float:
    """e_n of the values = trace of the n-fold antisymmetric power."""
    values = np.asarray(values, dtype=float)
    p = [np.sum(values**k) for k in range(1, n + 1)]
    e = np.zeros(n + 1)
    e[0] = 1.0
    for m in range(1, n + 1):
        e[m] = sum((-1) ** (k - 1) * p[k - 1] * e[m - k] for k in range(1, m + 1)) / m
    return float(e[n])


def para_trace(spectrum, n: int, kind: str, method: str = "factorized") -> float:
    """Trace of the n-fold tensor power of a PSD operator against the
    row-symmetrizer projection of the middle two-row frame (``boson2``) or
    its column counterpart (``fermion2``).

    The factorized path multiplies the symmetric (resp. antisymmetric)
    traces of sizes ceil(n/2) and floor(n/2); the character path evaluates
    the induced-character sum over cycle types and is capped at n <= 8.
    """
    values = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    if kind not in ("boson2", "fermion2"):
        raise ValueError("kind must be 'boson2' or 'fermion2'")
    if method == "factorized":
        n1, n2 = (n + 1) // 2, n // 2
        if kind == "boson2":
            return complete_homogeneous(values, n1) * complete_homogeneous(values, n2)
        return elementary_symmetric(values, n1) * elementary_symmetric(values, n2)
    if method != "character":
        raise ValueError("method must be 'factorized' or 'character'")
    if n > MAX_CHARACTER_N:
        raise DimensionTooLargeError(f"character path capped at n={MAX_CHARACTER_N}")
    frame = YoungFrame2(n, n // 2, transposed=(kind == "fermion2"))
    total = 0.0
    for parts in partitions(n):
        psi = psi_character(frame, parts)
        if psi == 0:
            continue
        prod = 1.0
        denom = 1.0
        for length, mult in partition_multiplicities(parts).items():
            prod *= np.sum(values**length) ** mult
            denom *= length**mult * factorial(mult)
        total += psi * prod / denom
    return float(total)


# ---------------------------------------------------------------------------
# Group-algebra idempotents and the regular representation
# ---------------------------------------------------------------------------


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """(p o q)(i) = p[q[i]]."""
    return tuple(p[qi] for qi in q)


def _subgroup_of_blocks(n: int, blocks) -> list[tuple[int, ...]]:
    """All permutations preserving each block pointwise as a set."""
    members = [tuple(range(n))]
    for block in blocks:
        block = list(block)
        new_members = []
        for perm_block in permutations(block):
            g = list(range(n))
            for src, dst in zip(block, perm_block):
                g[src] = dst
            for base in members:
                new_members.append(_compose(tuple(g), base))
        members = new_members
    return members


def row_stabilizer(tableau: Tableau2) -> list[tuple[int, ...]]:
    return _subgroup_of_blocks(tableau.frame.n, tableau.row_sets)


def column_stabilizer(tableau: Tableau2) -> list[tuple[int, ...]]:
    return _subgroup_of_blocks(tableau.frame.n, tableau.column_pairs())


def group_algebra_idempotents(frame: YoungFrame2) -> dict[str, dict]:
    """The elements a, b, e, d of C[S_n] for the canonical tableau:
    row symmetrizer, signed column symmetrizer, Young idempotent e = c*a*b,
    and d = e*a.  Returned as {name: {perm: coeff}}."""
    tableau = Tableau2.canonical(frame)
    n = frame.n
    rs = row_stabilizer(tableau)
    cs = column_stabilizer(tableau)
    a = {g: 1.0 / len(rs) for g in rs}
    b = {}
    for g in cs:
        b[g] = b.get(g, 0.0) + _sign_of_cycle_type(cycle_type(g)) / len(cs)
    c = frame.dimension * len(rs) * len(cs) / factorial(n)
    e = algebra_product(algebra_scale(a, c), b)
    d = algebra_product(e, a)
    return {"a": a, "b": b, "e": e, "d": d}


def algebra_product(f: dict, g: dict) -> dict:
    out: dict = {}
    for sig, fs in f.items():
        for tau, gt in g.items():
            key = _compose(sig, tau)
            out[key] = out.get(key, 0.0) + fs * gt
    return {k: v for k, v in out.items() if v != 0.0}


def algebra_scale(f: dict, c: float) -> dict:
    return {k: c * v for k, v in f.items()}


def regular_representation(element: dict, n: int) -> np.ndarray:
    """Left-multiplication matrix of a group-algebra element on C[S_n]."""
    basis = list(permutations(range(n)))
    index = {g: i for i, g in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)))
    for sig, coeff in element.items():
        for tau in basis:
            mat[index[_compose(sig, tau)], index[tau]] += coeff
    return mat
