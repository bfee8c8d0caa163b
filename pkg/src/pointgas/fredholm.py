"""Fredholm determinant powers, their Taylor (Vere-Jones) coefficients,
contour-integral coefficient extraction, and the saddle-point limits that
normalize those coefficients.

For a trace-class spectrum g_0 >= g_1 >= ... the central object is

    Det(1 - z*alpha*G)^(-1/alpha) = prod_j (1 - z*alpha*g_j)^(-1/alpha),

whose N-th Taylor coefficient is recovered either by a power-sum recursion
or by trapezoidal quadrature of a circle integral; both are cross-checked
against the brute-force permutation sums in :mod:`pointgas.alphadet`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContourRadiusError,
    ConvergenceDomainError,
    DegenerateVarianceError,
    DomainError,
    SingularityError,
)

MAX_CONTOUR_NODES = 1 << 16
_CHUNK = 1 << 13


def _spectrum_values(spectrum) -> np.ndarray:
    return np.asarray(getattr(spectrum, "values", spectrum), dtype=float)


def _is_reciprocal_negative_integer(alpha: float, tol: float = 1e-12) -> bool:
    if alpha >= 0:
        return False
    m = -1.0 / alpha
    return abs(m - round(m)) < tol


@dataclass(frozen=True)
class ContourSpec:
    """Circle |z| = r sampled at Q equispaced nodes (Q a power of two)."""

    r: float
    Q: int = 512

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("contour radius must be positive")
        if self.Q < 64 or (self.Q & (self.Q - 1)) != 0:
            raise ValueError("Q must be a power of two, at least 64")


def fredholm_det_power(spectrum, alpha: float, z) -> complex:
    """prod_j (1 - z*alpha*g_j)^(-1/alpha), principal branch factor-wise."""
    g = _spectrum_values(spectrum)
    z = complex(z)
    factors = 1.0 - z * alpha * g
    if g.size and np.min(np.abs(factors)) < 1e-14:
        raise SingularityError("z hits a zero of a determinant factor")
    value = np.exp(-np.sum(np.log(factors)) / alpha)
    if abs(value.imag) < 1e-12 * abs(value):
        value = complex(value.real, 0.0)
    return complex(value)


def log_fredholm_det_power(values: np.ndarray, alpha: float, z) -> np.ndarray:
    """log of the determinant power, vectorized over complex z (chunked)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=complex)
    for start in range(0, z.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = -np.sum(np.log(1.0 - np.outer(z[sl], alpha * values)), axis=1) / alpha
    return out


def _scaled_coefficients(g: np.ndarray, alpha: float, n_max: int) -> np.ndarray:
    """Coefficients of Det(1 - z*alpha*G)^(-1/alpha) in the variable z*g_0,
    i.e. the coefficients of the top-normalized spectrum (overflow-safe)."""
    coeffs = np.zeros(n_max + 1)
    coeffs[0] = 1.0
    if g.size == 0 or g[0] == 0.0:
        return coeffs
    gn = g / g[0]
    ls = np.arange(1, n_max + 1)
    p = np.sum(gn[None, :] ** ls[:, None], axis=1)
    weights = alpha ** (ls - 1) * p
    for n in range(1, n_max + 1):
        coeffs[n] = np.dot(weights[:n], coeffs[n - 1 :: -1][:n]) / n
    return coeffs


def vere_jones_coefficients(spectrum, alpha: float, n_max: int) -> np.ndarray:
    """Taylor coefficients C_0..C_n of Det(1 - z*alpha*G)^(-1/alpha).

    Uses the exponential-formula recursion n*C_n = sum_l alpha^(l-1) p_l
    C_{n-l} with power sums p_l; identical values to the cycle-type sum
    ``alphadet.power_sum_alpha_sum`` but O(n^2) instead of partitions.
    The recursion runs on the top-normalized spectrum for stability.
    """
    g = np.sort(_spectrum_values(spectrum))[::-1]
    scaled = _scaled_coefficients(g, alpha, n_max)
    if g.size == 0 or g[0] == 0.0:
        return scaled
    return scaled * g[0] ** np.arange(n_max + 1)


@dataclass
class SeriesSum:
    """Partial sum of the Vere-Jones expansion with a last-term tail estimate."""

    value: float
    n_max: int
    tail_estimate: float


def vere_jones_partial_sum(spectrum, alpha: float, z: float, n_max: int) -> SeriesSum:
    """sum_{n<=n_max} z^n C_n; requires |z*alpha|*g_0 < 1 unless -1/alpha
    is a positive integer (where the series terminates)."""
    g = np.sort(_spectrum_values(spectrum))[::-1]
    g0 = float(g[0]) if g.size else 0.0
    if abs(z * alpha) * g0 >= 1.0 and not _is_reciprocal_negative_integer(alpha):
        raise ConvergenceDomainError("series requires ||z*alpha*G|| < 1 for this alpha")
    scaled = _scaled_coefficients(g, alpha, n_max)
    terms = scaled * (float(z) * g0) ** np.arange(n_max + 1) if g0 else scaled[:1]
    return SeriesSum(value=float(np.sum(terms)), n_max=n_max, tail_estimate=float(abs(terms[-1])))


# ---------------------------------------------------------------------------
# Contour extraction
# ---------------------------------------------------------------------------


def _contour_mean(values: np.ndarray, alpha: float, N: int, r: float, Q: int):
    """mean over the Q circle nodes of exp(w - s), with w the log-integrand
    log Det(1-z*alpha*G)^(-1/alpha) - N log z and s = max Re w; returns
    (s, complex mean)."""
    theta = 2 * np.pi * np.arange(Q) / Q
    z = r * np.exp(1j * theta)
    w = log_fredholm_det_power(values, alpha, z) - N * np.log(z)
    s = float(np.max(w.real))
    return s, complex(np.mean(np.exp(w - s)))


def coefficient_contour(spectrum, alpha: float, N: int, contour: ContourSpec) -> float:
    """N-th Taylor coefficient via the circle integral
    (1/2*pi*i) * integral dz Det(1-z*alpha*G)^(-1/alpha) / z^(N+1).

    Doubles the node count until stable (capped at 2^16) and returns the
    real part; a residual imaginary part above 1e-10 triggers a warning.
    """
    g = _spectrum_values(spectrum)
    if N == 0:
        return 1.0
    g0 = float(g[0]) if g.size else 0.0
    if alpha > 0 and contour.r * alpha * g0 >= 1.0:
        raise ContourRadiusError("need r*alpha*g_0 < 1 for alpha > 0")
    Q = contour.Q
    s, mean = _contour_mean(g, alpha, N, contour.r, Q)
    value = math.exp(s) * mean
    change = math.inf
    while Q < MAX_CONTOUR_NODES:
        Q *= 2
        s, mean = _contour_mean(g, alpha, N, contour.r, Q)
        value2 = math.exp(s) * mean
        change = abs(value2 - value)
        value = value2
        if change <= 1e-13 * max(1.0, abs(value2)):
            break
    if change > 1e-9 * max(1.0, abs(value)):
        warnings.warn("contour quadrature changed by more than 1e-9 under node doubling")
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        warnings.warn(f"imaginary residue {value.imag:.3e} in contour coefficient")
    return float(value.real)


def log_coefficient_contour(spectrum, alpha: float, N: int, r: float,
                            Q: int = 512) -> float:
    """log of the (positive) N-th coefficient integral at radius r, computed
    with max-subtraction so that huge determinant powers never overflow."""
    g = _spectrum_values(spectrum)
    if N == 0:
        return 0.0
    Q = max(Q, 64)
    s, mean = _contour_mean(g, alpha, N, r, Q)
    prev = s + math.log(abs(mean)) if mean != 0 else -math.inf
    while Q < MAX_CONTOUR_NODES:
        Q *= 2
        s, mean = _contour_mean(g, alpha, N, r, Q)
        cur = s + math.log(abs(mean))
        if abs(cur - prev) < 1e-12 * max(1.0, abs(cur)):
            break
        prev = cur
    if mean.real <= 0:
        raise SingularityError("contour coefficient is not positive; wrong radius?")
    return s + math.log(mean.real)


# ---------------------------------------------------------------------------
# Appendix-A machinery: inequality slacks and normalized saddle integrals
# ---------------------------------------------------------------------------


@dataclass
class InequalityCheck:
    name: str
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def slack(self) -> np.ndarray:
        return self.rhs - self.lhs


def lemma_a1_check(p, theta, branch: str) -> list[InequalityCheck]:
    """Evaluate both inequalities of the modulus/log expansion lemma on the
    given (p, theta) values.  Slack is oriented so that >= 0 means the
    inequality holds.  The second boson bound only exists on |theta| <=
    pi/3 and is evaluated there alone."""
    p, theta = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(theta, dtype=float))
    if np.any(np.abs(theta) > np.pi + 1e-15):
        raise DomainError("theta must lie in [-pi, pi]")
    checks: list[InequalityCheck] = []
    if branch == "boson":
        if np.any((p < 0) | (p > 1)):
            raise DomainError("boson branch needs p in [0, 1]")
        ew = np.exp(1j * theta)
        lhs1 = np.abs(1.0 + p * (ew - 1.0))
        rhs1 = np.exp(-2.0 * p * (1.0 - p) * theta**2 / np.pi**2)
        checks.append(InequalityCheck("modulus", lhs1, rhs1))
        mask = np.abs(theta) <= np.pi / 3 + 1e-15
        if np.any(mask):
            pm = p[mask]
            tm = theta[mask]
            logs = np.log(1.0 + pm * (np.exp(1j * tm) - 1.0))
            lhs2 = np.abs(logs - 1j * pm * tm + pm * (1.0 - pm) * tm**2 / 2.0)
            rhs2 = 4.0 * pm * (1.0 - pm) * np.abs(tm) ** 3 / (9.0 * math.sqrt(3.0))
            checks.append(InequalityCheck("log-expansion", lhs2, rhs2))
        return checks
    if branch == "fermion":
        if np.any(p < 0):
            raise DomainError("fermion branch needs p >= 0")
        ew = np.exp(1j * theta)
        lhs1 = np.abs(1.0 - p * (ew - 1.0))
        rhs1 = np.exp(2.0 * p * (1.0 + p) / (1.0 + 4.0 * p * (1.0 + p)) * theta**2 / np.pi**2)
        # orientation flipped: the modulus dominates the exponential here
        checks.append(InequalityCheck("modulus", rhs1, lhs1))
        logs = np.log(1.0 - p * (ew - 1.0))
        lhs2 = np.abs(logs + 1j * p * theta - p * (1.0 + p) * theta**2 / 2.0)
        rhs2 = p * (1.0 + p) * (1.0 + 2.0 * p) * np.abs(theta) ** 3 / 6.0
        checks.append(InequalityCheck("log-expansion", lhs2, rhs2))
        return checks
    raise ValueError("branch must be 'boson' or 'fermion'")


@dataclass
class PFamily:
    """Nonincreasing weights p_0 >= p_1 >= ... >= 0 with sum_j s*p_j = N."""

    p: np.ndarray
    s: float

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if np.any(p < 0) or np.any(np.diff(p) > 1e-12):
            raise ValueError("weights must be nonnegative and nonincreasing")
        if self.s <= 0:
            raise ValueError("s must be positive")
        self.p = p

    @property
    def n_particles(self) -> float:
        return float(self.s * np.sum(self.p))

    @classmethod
    def geometric(cls, n: float, s: float, q: float) -> "PFamily":
        """p_j proportional to q^j, rescaled so that sum s*p_j = n."""
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        n_terms = max(8, int(math.log(1e-18) / math.log(q)) + 1)
        p = q ** np.arange(n_terms)
        p *= n / (s * p.sum())
        return cls(p, s)

    @classmethod
    def capped_geometric(cls, n: float, s: float, q: float | None = None) -> "PFamily":
        """p_j = min(1, c*q^j) with c solved so that sum s*p_j = n.

        The default q = 1 - 1/sqrt(n) widens the fractional transition as n
        grows, which is what drives the variance sum s*p*(1-p) to infinity.
        """
        if q is None:
            q = 1.0 - 1.0 / math.sqrt(n)
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        # need room for ~n/s saturated entries plus the geometric tail
        n_terms = int(math.ceil(n / s)) + int(math.log(1e-18) / math.log(q)) + 8
        js = np.arange(n_terms)

        def total(c):
            return s * np.sum(np.minimum(1.0, c * q**js))

        if s * n_terms <= n:
            raise ValueError("capped family cannot reach the target sum")
        lo, hi = n * (1 - q) / s, 4.0 * n / s
        while total(hi) < n:
            hi *= 2
            if hi > 1e300:
                raise ValueError("failed to bracket the cap constant")
        for _ in range(400):
            mid = (lo + hi) / 2
            if total(mid) < n:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-14 * hi and abs(total(mid) - n) < 1e-10:
                break
        c = (lo + hi) / 2
        return cls(np.minimum(1.0, c * q**js), s)


def saddle_circle_integral(p: np.ndarray, s: float, branch: str, N: int,
                           Q: int | None = None) -> float:
    """The unit-circle integral
        (1/2*pi*i) * contour d_eta / eta^(N+1) * prod_j (1 + p_j*(eta-1))^s
    for the boson branch, or prod_j (1 - p_j*(eta-1))^(-s) for the fermion
    branch.  The integrand has unit maximum modulus at eta=1, so no scaling
    is needed; nodes double until the value is stable."""
    p = np.asarray(p, dtype=float)
    sign = 1.0 if branch == "boson" else -1.0
    if branch not in ("boson", "fermion"):
        raise ValueError("branch must be 'boson' or 'fermion'")
    # saddle width is 1/sqrt(variance); sample it densely and verify by doubling
    variance = float(np.sum(s * p * (1.0 - sign * p)))
    if Q is None:
        Q = 1 << max(9, math.ceil(math.log2(32.0 * math.sqrt(max(variance, 1.0)) + 64.0)))
    Q = min(Q, MAX_CONTOUR_NODES)
    # A boson factor with p_j = 1 is exactly eta^s: it only shifts the
    # extracted index.  Split those off (the capped families are mostly 1s).
    shift = 0.0
    if branch == "boson":
        ones = p > 1.0 - 1e-14
        shift = s * float(np.count_nonzero(ones))
        p = p[~ones]
    p = p[p > 1e-16]
    chunk = max(256, int(4e6 // max(p.size, 1)))

    def evaluate(q_nodes: int) -> complex:
        theta = 2 * np.pi * np.arange(q_nodes) / q_nodes
        total = np.zeros(q_nodes, dtype=complex)
        for start in range(0, q_nodes, chunk):
            sl = slice(start, start + chunk)
            eta = np.exp(1j * theta[sl])
            logs = np.sum(np.log(1.0 + sign * np.outer(eta - 1.0, p)), axis=1)
            total[sl] = np.exp(sign * s * logs - 1j * (N - shift) * theta[sl])
        return complex(np.mean(total))

    value = evaluate(Q)
    while Q < MAX_CONTOUR_NODES:
        Q *= 2
        value2 = evaluate(Q)
        if abs(value2 - value) <= 1e-13 + 1e-10 * abs(value2):
            value = value2
            break
        value = value2
    return float(value.real)


def saddle_limit_check(pfam: PFamily, branch: str) -> float:
    """sqrt(2*pi*v) (boson) or sqrt(2*pi*w) (fermion) times the circle
    integral at N = round(sum s*p_j); tends to 1 as the family grows."""
    p, s = pfam.p, pfam.s
    if branch == "boson":
        if p.size and p[0] > 1.0 + 1e-12:
            raise DomainError("boson branch requires p_0 <= 1")
        variance = float(np.sum(s * p * (1.0 - p)))
    elif branch == "fermion":
        variance = float(np.sum(s * p * (1.0 + p)))
    else:
        raise ValueError("branch must be 'boson' or 'fermion'")
    if variance < 1e-8:
        raise DegenerateVarianceError("saddle variance too small")
    n = round(pfam.n_particles)
    integral = saddle_circle_integral(p, s, branch, n)
    return math.sqrt(2 * math.pi * variance) * integral
