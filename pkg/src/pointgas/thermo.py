"""Fugacity equations and normalized density functions.

The normalized density of the infinite system is

    h_alpha(z) = sum_{n>=1} alpha^(n-1) z^n n^(-d/2)
               = pi^(-d/2) * integral z e^{-|u|^2} / (1 - z*alpha*e^{-|u|^2}) du,

a strictly increasing function of z on its fugacity domain I_alpha.  The
finite-volume counterpart works on an explicit eigenvalue list.  All public
solvers accept a physical density rho together with beta and convert to the
normalized rho_hat = (4*pi*beta)^(d/2) * rho internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import (
    FugacityDomainError,
    SupercriticalDensityError,
    UnreachableParticleNumberError,
)

PHYSICAL_ALPHAS = (-1.0, -0.5, 0.5, 1.0)


def _is_reciprocal_negative_integer(alpha: float, tol: float = 1e-12) -> bool:
    if alpha >= 0:
        return False
    m = -1.0 / alpha
    return abs(m - round(m)) < tol


@dataclass(frozen=True)
class AlphaParam:
    """Statistics parameter with its fugacity domain I_alpha."""

    alpha: float

    def __post_init__(self):
        if not -1.0 <= self.alpha <= 1.0 or self.alpha == 0.0:
            raise ValueError("alpha must lie in [-1, 1] minus 0")

    @property
    def z_sup(self) -> float:
        """Right endpoint of I_alpha (excluded); inf when -1/alpha is integer."""
        if _is_reciprocal_negative_integer(self.alpha):
            return math.inf
        return 1.0 / abs(self.alpha)

    def contains(self, z: float) -> bool:
        return 0.0 <= z < self.z_sup

    @property
    def is_physical(self) -> bool:
        return any(abs(self.alpha - a) < 1e-15 for a in PHYSICAL_ALPHAS)


def _require_in_domain(z: float, alpha: float) -> None:
    if not AlphaParam(alpha).contains(z):
        raise FugacityDomainError(f"z={z} outside I_alpha for alpha={alpha}")


def h_alpha_series(z: float, alpha: float, d: int, rtol: float = 1e-16) -> float:
    """Power-series path; requires |alpha*z| < 1."""
    q = alpha * z
    if abs(q) >= 1.0:
        raise FugacityDomainError("series path needs |alpha*z| < 1")
    if z == 0.0:
        return 0.0
    total = 0.0
    term_n = z
    n = 1
    while True:
        term = term_n / n ** (d / 2)
        total += term
        if abs(term) < rtol * max(abs(total), 1e-300) and n > 16:
            break
        n += 1
        term_n *= q
        if n > 2_000_000:
            raise FugacityDomainError("series did not converge; z too close to sup I_alpha")
    return total


def h_alpha_quadrature(z: float, alpha: float, d: int) -> float:
    """Adaptive radial quadrature of the momentum integral; valid on all of
    I_alpha (used for fermion-type z >= 1 where the series diverges)."""
    if z == 0.0:
        return 0.0

    def integrand(u):
        e = np.exp(-(u**2))
        return u ** (d - 1) * z * e / (1.0 - z * alpha * e)

    val, _ = quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return 2.0 / math.gamma(d / 2) * val


def h_alpha(z: float, alpha: float, d: int) -> float:
    """Normalized density h^(alpha)(z); series when |alpha*z| <= 0.99,
    quadrature otherwise."""
    _require_in_domain(z, alpha)
    if abs(alpha * z) <= 0.99:
        return h_alpha_series(z, alpha, d)
    return h_alpha_quadrature(z, alpha, d)


def h_alpha_finite(spectrum, z: float, alpha: float) -> float:
    """Finite-volume normalized density Tr[zG(1-z*alpha*G)^-1] / Tr G."""
    g = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    _require_in_domain(z, alpha)
    return float(np.sum(z * g / (1.0 - z * alpha * g)) / np.sum(g))


def zeta_partial_sum(s: float, n_terms: int = 10**6) -> float:
    """zeta(s) for s > 1 by direct partial sum plus an Euler-Maclaurin tail."""
    if s <= 1:
        raise ValueError("zeta partial sum requires s > 1")
    n = np.arange(1, n_terms, dtype=float)
    head = float(np.sum(n ** (-s)))
    N = float(n_terms)
    tail = N ** (1 - s) / (s - 1) + N ** (-s) / 2 + s * N ** (-s - 1) / 12 \
        - s * (s + 1) * (s + 2) * N ** (-s - 3) / 720
    return head + tail


def rho_c(beta: float, d: int) -> float:
    """Critical boson density (4*pi*beta)^(-d/2) * zeta(d/2); inf for d <= 2."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if d <= 2:
        return math.inf
    return (4 * math.pi * beta) ** (-d / 2) * zeta_partial_sum(d / 2)


def rho_c_quadrature(beta: float, d: int) -> float:
    """Critical density by direct quadrature of the momentum integral;
    independent of the zeta partial-sum path."""
    if d <= 2:
        return math.inf

    def integrand(u):
        e = np.exp(-(u**2))
        return u ** (d - 1) * e / (1.0 - e)

    val, _ = quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return (4 * math.pi * beta) ** (-d / 2) * 2.0 / math.gamma(d / 2) * val


@dataclass
class FugacitySolution:
    z: float
    rho_hat: float
    residual: float
    iterations: int


def normalized_density_sup(alpha: float, d: int) -> float:
    """sup of h_alpha over I_alpha: (1/alpha)*zeta(d/2) for alpha > 0 and
    d > 2, infinite otherwise."""
    if alpha > 0 and d > 2:
        return zeta_partial_sum(d / 2) / alpha
    return math.inf


def solve_fugacity(rho: float | None = None, alpha: float = -1.0, d: int = 1,
                   beta: float = 1.0, rho_hat: float | None = None,
                   tol: float = 1e-12) -> FugacitySolution:
    """Unique z in I_alpha with h_alpha(z) = rho_hat, by bracketed bisection.

    Provide either the physical density rho (converted with beta) or
    rho_hat directly.
    """
    if rho_hat is None:
        if rho is None:
            raise ValueError("provide rho or rho_hat")
        rho_hat = (4 * math.pi * beta) ** (d / 2) * rho
    if rho_hat < 0:
        raise FugacityDomainError("density must be nonnegative")
    if rho_hat == 0.0:
        return FugacitySolution(z=0.0, rho_hat=0.0, residual=0.0, iterations=0)
    sup = normalized_density_sup(alpha, d)
    if rho_hat >= sup:
        raise SupercriticalDensityError(
            f"rho_hat={rho_hat} at or above the critical normalized density {sup}"
        )
    param = AlphaParam(alpha)

    def fun(z):
        return h_alpha(z, alpha, d) - rho_hat

    if math.isinf(param.z_sup):
        hi = 1.0
        while fun(hi) < 0:
            hi *= 8.0
            if hi > 1e290:
                raise FugacityDomainError(
                    "fugacity exceeds the floating-point range at this density")
    else:
        hi = param.z_sup * 0.5
        while fun(hi) < 0:
            hi = param.z_sup - (param.z_sup - hi) / 2
            if param.z_sup - hi < 1e-14 * param.z_sup:
                raise SupercriticalDensityError("density not reachable inside I_alpha")
    z, info = brentq(fun, 0.0, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200,
                     full_output=True)
    residual = abs(h_alpha(z, alpha, d) - rho_hat)
    if residual > tol:
        raise FugacityDomainError(f"fugacity residual {residual} above tol {tol}")
    return FugacitySolution(z=float(z), rho_hat=float(rho_hat), residual=float(residual),
                            iterations=int(info.iterations))


def occupation_trace(spectrum, z: float, alpha: float) -> float:
    """Tr[zG(1 - z*alpha*G)^-1] over an explicit eigenvalue list."""
    g = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    return float(np.sum(z * g / (1.0 - z * alpha * g)))


def finite_fugacity(N: float, spectrum, alpha: float, tol: float = 1e-8) -> float:
    """z_N in I_alpha with Tr[z G (1 - z*alpha*G)^-1] = N.

    For alpha > 0 the trace blows up at the pole 1/(alpha*g_0) <= sup
    I_alpha closure, so any N is reachable; for alpha < 0 the trace
    saturates at (#positive eigenvalues)/|alpha|.
    """
    g = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N == 0:
        return 0.0
    if g.size == 0 or g[0] <= 0:
        raise UnreachableParticleNumberError("empty spectrum cannot hold particles")
    if alpha < 0:
        saturation = np.sum(g > 0) / abs(alpha)
        if N >= saturation:
            raise UnreachableParticleNumberError(
                f"N={N} at or above the saturation {saturation} of this spectrum"
            )

    def fun(z):
        return occupation_trace(g, z, alpha) - N

    if alpha > 0:
        pole = 1.0 / (alpha * g[0])
        hi = pole * 0.5
        while fun(hi) < 0:
            hi = pole - (pole - hi) / 2
            if pole - hi < 1e-13 * pole:
                raise UnreachableParticleNumberError("N too large for this spectrum")
    else:
        hi = 1.0
        while fun(hi) < 0:
            hi *= 2.0
            if hi > 1e15:
                raise UnreachableParticleNumberError("N too close to the Pauli saturation")
    z = brentq(fun, 0.0, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200)
    residual = abs(fun(z))
    if residual > tol:
        raise UnreachableParticleNumberError(f"fugacity residual {residual} above tol")
    return float(z)


@dataclass
class VarianceTraces:
    """v = Tr[zG(1-z*alpha*G)^-2] plus the saddle-family parameters
    p_j = |alpha| z g_j / (1 - alpha z g_j), s = 1/|alpha|."""

    v: float
    p: np.ndarray
    s: float

    @property
    def boson_variance(self) -> float:
        return float(np.sum(self.s * self.p * (1.0 - self.p)))

    @property
    def fermion_variance(self) -> float:
        return float(np.sum(self.s * self.p * (1.0 + self.p)))


def variance_traces(spectrum, z: float, alpha: float) -> VarianceTraces:
    g = np.asarray(getattr(spectrum, "values", spectrum), dtype=float)
    if z < 0:
        raise FugacityDomainError("z must be nonnegative")
    denom = 1.0 - z * alpha * g
    if np.any(denom <= 0):
        raise FugacityDomainError("z at or beyond the resolvent pole of this spectrum")
    v = float(np.sum(z * g / denom**2))
    p = np.sort(abs(alpha) * z * g / denom)[::-1]
    return VarianceTraces(v=v, p=p, s=1.0 / abs(alpha))
