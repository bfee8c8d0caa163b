"""Laplace functionals of the finite-N canonical point processes and their
thermodynamic limits.

The finite-N functional is a ratio of two contour coefficients,

    E[e^{-<f,xi>}] = [circle integral of Det(1-z*alpha*Gt)^(-1/alpha)/z^(N+1)]
                   / [same with G],

evaluated at the natural saddle radii z_N (for G) and zt_N (for the
sandwiched Gt).  The ratio is assembled from log-determinant differences
and two unit-circle saddle integrals so that nothing overflows; the four
factors are exactly the diagnostics (a)-(d) reported by the convergence
study.  The limit functionals are Fredholm determinant powers of Nystrom
matrices built on the support of the test function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import kernels, symgroup, thermo
from .alphadet import conjugacy_class_size, partition_multiplicities, partitions
from .errors import (
    DimensionTooLargeError,
    FugacityDomainError,
    SupercriticalDensityError,
)
from .fredholm import saddle_circle_integral
from .kernels import Spectrum, TorusGrid
from .thermo import finite_fugacity, solve_fugacity, variance_traces

KINDS = (
    "fermion",
    "boson",
    "para-boson2",
    "para-fermion2",
    "composite-fermion",
    "composite-boson",
)

_THERMAL = ("fermion", "boson")
_PARA = ("para-boson2", "para-fermion2")
_COMPOSITE = ("composite-fermion", "composite-boson")


def kind_alpha(kind: str) -> float:
    """Sign of the statistics entering the finite-N alpha-determinant."""
    if kind not in KINDS:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    return -1.0 if "fermion" in kind else 1.0


@dataclass(frozen=True)
class EnsembleSpec:
    """Which gas, in which dimension, at which density."""

    kind: str
    d: int = 1
    beta: float = 1.0
    a: float = 1.0
    rho: float = 0.2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.rho < 0:
            raise ValueError("density must be nonnegative")
        if self.kind == "boson":
            if self.rho >= thermo.rho_c(self.beta, self.d):
                raise SupercriticalDensityError("boson density at or above rho_c")
        elif self.kind == "para-boson2":
            if self.rho / 2 >= thermo.rho_c(self.beta, self.d):
                raise SupercriticalDensityError("para-boson density: rho/2 must stay below rho_c")
        elif self.kind == "composite-boson":
            if self.rho >= rho_c_composite(self.a):
                raise SupercriticalDensityError("composite-boson density at or above rho_c^c")


@dataclass
class LaplaceResult:
    value: float
    method: str
    error_estimate: float


def rho_c_composite(a: float, d: int = 1) -> float:
    """Critical density of the composite-boson gas.

    The momentum density at the endpoint fugacity behaves like 1/p^2 near
    p = 0 (the mode function is quadratically flat at its maximum), so the
    defining integral diverges for d <= 2; the d = 1 well therefore has no
    finite critical density and the function returns inf.
    """
    if a <= 0:
        raise ValueError("well half-width must be positive")
    if d <= 2:
        return math.inf
    raise NotImplementedError("composite gas is implemented for the d = 1 well")


# ---------------------------------------------------------------------------
# Spectra of the finite boxes
# ---------------------------------------------------------------------------

_COMPOSITE_TRACE_TAIL = 3e-6


def _clip_spectrum(spec: Spectrum) -> Spectrum:
    vals = spec.values
    if vals.size and vals[-1] < -1e-10:
        raise FugacityDomainError("sandwiched operator has a significantly negative eigenvalue")
    spec.values = np.maximum(vals, 0.0)
    return spec


def finite_spectra(f, L: float, kind: str, beta: float = 1.0, a: float = 1.0):
    """(G spectrum, sandwiched spectrum) of the finite box for the kind's family."""
    if kind in _COMPOSITE:
        modes = kernels.composite_spectrum(L, a)
        k_cut = _composite_mode_cutoff(L, a)
        keep = np.abs(modes.k) <= k_cut
        grid = TorusGrid(1, L, k_cut)
        v = modes.v[keep]
        g = Spectrum(v**2, L=L, label="composite")
        gt = _clip_spectrum(kernels.sandwich_operator(grid, v, f, label="composite-gtilde").eigenvalues())
        return g, gt
    grid = TorusGrid.for_beta(1, L, beta)
    g = kernels.heat_spectrum(grid, beta)
    gt = _clip_spectrum(kernels.build_gtilde(grid, beta, f).eigenvalues())
    return g, gt


def _composite_mode_cutoff(L: float, a: float, tol: float = _COMPOSITE_TRACE_TAIL) -> int:
    """Smallest cutoff K with the squared-mode trace tail below tol
    (the modes fall off like (b*L/(2*pi*k))^2 with b = pi/(2a))."""
    scale = math.pi / (2 * a) * L / (2 * math.pi)
    k = max(16, int(2 * scale))
    while scale**4 / (3 * k**3) > tol:
        k = int(k * 1.5) + 1
    return k


# ---------------------------------------------------------------------------
# Canonical contour ratio
# ---------------------------------------------------------------------------


@dataclass
class CanonicalRatioParts:
    """Factors of the canonical Laplace ratio at one (L, N)."""

    N: int
    alpha: float
    z: float
    zt: float
    log_det_shift: float     # log Det(1-zt*a*G)^(-1/a) - log Det(1-z*a*G)^(-1/a)
    log_det_sandwich: float  # log Det(1-zt*a*Gt)^(-1/a) - log Det(1-zt*a*G)^(-1/a)
    log_radius: float        # N*(log z - log zt)
    saddle_num: float
    saddle_den: float

    @property
    def log_value(self) -> float:
        return (self.log_det_shift + self.log_det_sandwich + self.log_radius
                + math.log(self.saddle_num) - math.log(self.saddle_den))

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def _log_det_power(values: np.ndarray, alpha: float, z: float) -> float:
    factors = 1.0 - z * alpha * values
    if np.any(factors <= 0):
        raise FugacityDomainError("determinant factor crossed zero; z outside the valid disc")
    return float(-np.sum(np.log(factors)) / alpha)


def canonical_ratio_parts(g: Spectrum, gt: Spectrum, N: int, alpha: float) -> CanonicalRatioParts:
    """Assemble the contour-ratio factors for spectra g (bare) and gt
    (sandwiched) at particle number N."""
    z = finite_fugacity(N, g, alpha)
    zt = finite_fugacity(N, gt, alpha)
    gv, gtv = g.values, gt.values
    log_shift = _log_det_power(gv, alpha, zt) - _log_det_power(gv, alpha, z)
    log_sand = _log_det_power(gtv, alpha, zt) - _log_det_power(gv, alpha, zt)
    log_radius = N * (math.log(z) - math.log(zt))
    branch = "boson" if alpha < 0 else "fermion"
    pt = variance_traces(gtv, zt, alpha)
    pd = variance_traces(gv, z, alpha)
    saddle_num = saddle_circle_integral(pt.p, pt.s, branch, N)
    saddle_den = saddle_circle_integral(pd.p, pd.s, branch, N)
    return CanonicalRatioParts(
        N=N, alpha=alpha, z=z, zt=zt,
        log_det_shift=log_shift, log_det_sandwich=log_sand, log_radius=log_radius,
        saddle_num=saddle_num, saddle_den=saddle_den,
    )


def finite_laplace(f, L: float, N: int, kind: str, beta: float = 1.0,
                   a: float = 1.0) -> LaplaceResult:
    """Laplace functional of the N-point canonical ensemble in the box of
    side L, by the contour-coefficient ratio."""
    if kind in _PARA:
        return para_finite_laplace(f, L, N, kind, beta=beta)
    if N == 0:
        return LaplaceResult(1.0, "contour-ratio", 0.0)
    g, gt = finite_spectra(f, L, kind, beta=beta, a=a)
    parts = canonical_ratio_parts(g, gt, N, kind_alpha(kind))
    value = parts.value
    return LaplaceResult(value=value, method="contour-ratio", error_estimate=1e-9 * value)


def symmetric_trace_ratio(g: Spectrum, gt: Spectrum, n: int, alpha: float) -> float:
    """Tr[(x)^n Gt P]/Tr[(x)^n G P] with P the (anti)symmetrizer: the ratio
    of complete homogeneous (alpha=+1) or elementary (alpha=-1) symmetric
    polynomials of the spectra.  Independent of the contour machinery."""
    if alpha > 0:
        return symgroup.complete_homogeneous(gt.values, n) / symgroup.complete_homogeneous(g.values, n)
    return symgroup.elementary_symmetric(gt.values, n) / symgroup.elementary_symmetric(g.values, n)


def finite_laplace_direct(f, L: float, N: int, kind: str, beta: float = 1.0,
                          n_grid: int = 40) -> LaplaceResult:
    """Direct N-fold quadrature of the configuration-space density ratio
    (uniform periodic grid); oracle for N <= 3, d = 1, thermal kinds."""
    if kind not in _THERMAL:
        raise ValueError("direct integration supports the fermion and boson kinds")
    if N > 3:
        raise DimensionTooLargeError("direct-integral oracle capped at N = 3")
    alpha = kind_alpha(kind)
    xs = -L / 2 + L * np.arange(n_grid) / n_grid
    gram = kernels.heat_gram_matrix(L, beta, xs)
    ef = np.exp(-np.asarray(f(xs), dtype=float))
    diag = np.diag(gram).copy()
    if N == 1:
        num = float(np.sum(ef * diag))
        den = float(np.sum(diag))
    elif N == 2:
        det2 = np.outer(diag, diag) + alpha * gram**2
        num = float(ef @ det2 @ ef)
        den = float(np.sum(det2))
    else:
        g2 = gram**2
        det3 = np.einsum("i,j,k->ijk", diag, diag, diag)
        det3 += alpha * (
            np.einsum("ij,k->ijk", g2, diag)
            + np.einsum("ik,j->ijk", g2, diag)
            + np.einsum("jk,i->ijk", g2, diag)
        )
        det3 += 2 * alpha**2 * np.einsum("ij,jk,ik->ijk", gram, gram, gram)
        num = float(np.einsum("i,j,k,ijk->", ef, ef, ef, det3))
        den = float(np.sum(det3))
    value = num / den
    return LaplaceResult(value=value, method="direct-integral",
                         error_estimate=abs(value) * (1.0 / n_grid) ** 2)


def para_finite_laplace(f, L: float, N: int, kind: str, beta: float = 1.0,
                        method: str = "factorized") -> LaplaceResult:
    """Laplace functional of the order-2 para ensembles.

    The row (column) symmetrizer of the middle two-row frame factorizes
    into two plain symmetrizations of sizes ceil(N/2) and floor(N/2), so
    the functional is a product of two symmetric-trace ratios; the
    character-sum path over all two-row (two-column) frames is kept as an
    oracle for N <= 8.
    """
    if kind not in _PARA:
        raise ValueError("kind must be para-boson2 or para-fermion2")
    if N == 0:
        return LaplaceResult(1.0, "factorized", 0.0)
    alpha = kind_alpha(kind)
    g, gt = finite_spectra(f, L, "boson", beta=beta)
    if method == "factorized":
        n1, n2 = (N + 1) // 2, N // 2
        value = symmetric_trace_ratio(g, gt, n1, alpha)
        if n2:
            value *= symmetric_trace_ratio(g, gt, n2, alpha)
        return LaplaceResult(value=value, method="factorized", error_estimate=1e-12 * value)
    if method != "character":
        raise ValueError("method must be 'factorized' or 'character'")
    if N > symgroup.MAX_CHARACTER_N:
        raise DimensionTooLargeError("character-sum path capped at N = 8")
    num = den = 0.0
    transposed = kind == "para-fermion2"
    for j in range(N // 2 + 1):
        frame = symgroup.YoungFrame2(N, j, transposed=transposed)
        for parts in partitions(N):
            chi = symgroup.chi_character(frame, parts)
            if chi == 0:
                continue
            weight = conjugacy_class_size(parts) * chi
            prod_num = prod_den = 1.0
            for length, mult in partition_multiplicities(parts).items():
                prod_num *= gt.power_trace(length) ** mult
                prod_den *= g.power_trace(length) ** mult
            num += weight * prod_num
            den += weight * prod_den
    value = num / den
    return LaplaceResult(value=value, method="character-sum", error_estimate=1e-12 * value)


# ---------------------------------------------------------------------------
# Thermodynamic limits
# ---------------------------------------------------------------------------


def _det_power_from_eigs(mu: np.ndarray, alpha: float) -> float:
    factors = 1.0 + alpha * mu
    if np.any(factors <= 0):
        raise FugacityDomainError("limit operator eigenvalue crossed the determinant pole")
    return float(math.exp(-np.sum(np.log(factors)) / alpha))


def limit_laplace(f, spec: EnsembleSpec, n_nodes: int = 96) -> LaplaceResult:
    """Laplace functional of the infinite-volume process for the given
    ensemble, as a Fredholm determinant power of a Nystrom matrix.

    The reported error estimate is the change under doubling the node
    count (the returned value uses the doubled rule).
    """
    kind = spec.kind
    if kind in _PARA:
        half = replace(spec, kind="fermion" if kind == "para-fermion2" else "boson",
                       rho=spec.rho / 2)
        base = limit_laplace(f, half, n_nodes=n_nodes)
        return LaplaceResult(value=base.value**2, method="limit-formula",
                             error_estimate=2 * base.value * base.error_estimate)
    if kind in _COMPOSITE:
        return composite_limit_laplace(f, spec.rho, spec.a, kind, n_nodes=n_nodes)
    alpha = kind_alpha(kind)
    z_star = solve_fugacity(rho=spec.rho, alpha=alpha, d=spec.d, beta=spec.beta).z
    if z_star == 0.0:
        return LaplaceResult(1.0, "limit-formula", 0.0)

    def value_at(nodes: int) -> float:
        op = kernels.limit_k_operator(f, z_star, alpha, spec.beta, n_nodes=nodes)
        mu = np.maximum(op.eigenvalues(), 0.0)
        return _det_power_from_eigs(mu, alpha)

    coarse = value_at(n_nodes)
    fine = value_at(2 * n_nodes)
    return LaplaceResult(value=fine, method="limit-formula", error_estimate=abs(fine - coarse))


def composite_density(z: float, alpha: float, a: float) -> float:
    """Density of A-atoms at fugacity z: the diagonal value of the
    composite resolvent kernel."""
    return float(kernels.composite_resolvent_kernel(np.asarray(0.0), z, alpha, a))


def composite_fugacity(rho: float, alpha: float, a: float, tol: float = 1e-10) -> float:
    """Solve the composite density equation for z (monotone bisection)."""
    if rho < 0:
        raise FugacityDomainError("density must be nonnegative")
    if rho == 0:
        return 0.0
    if alpha > 0 and rho >= rho_c_composite(a):
        raise SupercriticalDensityError("composite-boson density at or above rho_c^c")
    z_sup = 1.0 if alpha > 0 else math.inf

    def fun(z):
        return composite_density(z, alpha, a) - rho

    if math.isinf(z_sup):
        hi = 1.0
        while fun(hi) < 0:
            hi *= 2.0
    else:
        hi = 0.5
        while fun(hi) < 0:
            hi = 1.0 - (1.0 - hi) / 2
            if 1.0 - hi < 1e-14:
                raise SupercriticalDensityError("composite density not reachable")
    z = brentq(fun, 0.0, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    if abs(fun(z)) > tol * max(1.0, rho):
        raise FugacityDomainError("composite fugacity residual above tolerance")
    return float(z)


def composite_limit_laplace(f, rho: float, a: float, kind: str,
                            n_nodes: int = 96) -> LaplaceResult:
    """Limit Laplace functional of the zero-temperature composite gas."""
    if kind not in _COMPOSITE:
        raise ValueError("kind must be composite-fermion or composite-boson")
    alpha = kind_alpha(kind)
    z_star = composite_fugacity(rho, alpha, a)
    if z_star == 0.0:
        return LaplaceResult(1.0, "limit-formula", 0.0)

    def value_at(nodes: int) -> float:
        op = kernels.composite_limit_operator(f, z_star, alpha, a, n_nodes=nodes)
        mu = np.maximum(op.eigenvalues(), 0.0)
        return _det_power_from_eigs(mu, alpha)

    coarse = value_at(n_nodes)
    fine = value_at(2 * n_nodes)
    return LaplaceResult(value=fine, method="limit-formula", error_estimate=abs(fine - coarse))


# ---------------------------------------------------------------------------
# Convergence studies
# ---------------------------------------------------------------------------


@dataclass
class StudyRow:
    L: float
    N: int
    finite: float
    limit: float
    gap: float
    diag_a: float
    diag_b: float
    diag_c: float
    diag_d: float


@dataclass
class StudyTable:
    kind: str
    rows: list[StudyRow]

    COLUMNS = ("L", "N", "finite", "limit", "gap", "diag_a", "diag_b", "diag_c", "diag_d")

    def to_csv(self) -> str:
        lines = [",".join(self.COLUMNS)]
        for row in self.rows:
            lines.append(",".join(_fmt17(getattr(row, c)) for c in self.COLUMNS))
        return "\n".join(lines) + "\n"


def _fmt17(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def convergence_study(f, spec: EnsembleSpec, L_list) -> StudyTable:
    """Finite-vs-limit table over an increasing ladder of box sizes, with
    the four proof-step diagnostics (each tends to 1):

    a: fugacity-gap exponential (z/zt)^N * exp(N*(zt-z)/z);
    b: bare determinant shift deflated by the same exponential;
    c: sandwich determinant ratio over the limit determinant;
    d: ratio of the two unit-circle saddle integrals.
    """
    if spec.d != 1:
        raise NotImplementedError("convergence studies run in d = 1")
    limit = limit_laplace(f, spec).value
    para = spec.kind in _PARA
    if para:
        half_kind = "fermion" if spec.kind == "para-fermion2" else "boson"
        alpha = kind_alpha(half_kind)
        sub_limit = limit_laplace(f, replace(spec, kind=half_kind, rho=spec.rho / 2)).value
    else:
        alpha = kind_alpha(spec.kind)
        sub_limit = limit
    rows = []
    for L in L_list:
        N = max(1, round(spec.rho * L ** spec.d))
        if para:
            finite = para_finite_laplace(f, L, N, spec.kind, beta=spec.beta).value
            g, gt = finite_spectra(f, L, "boson", beta=spec.beta)
            parts = canonical_ratio_parts(g, gt, (N + 1) // 2, alpha)
        else:
            g, gt = finite_spectra(f, L, spec.kind, beta=spec.beta, a=spec.a)
            parts = canonical_ratio_parts(g, gt, N, alpha)
            finite = parts.value
        shift = parts.N * (parts.zt - parts.z) / parts.z
        diag_a = math.exp(parts.log_radius + shift)
        diag_b = math.exp(parts.log_det_shift - shift)
        diag_c = math.exp(parts.log_det_sandwich) / sub_limit
        diag_d = parts.saddle_num / parts.saddle_den
        rows.append(StudyRow(L=L, N=N, finite=finite, limit=limit,
                             gap=abs(finite - limit), diag_a=diag_a, diag_b=diag_b,
                             diag_c=diag_c, diag_d=diag_d))
    return StudyTable(kind=spec.kind, rows=rows)
