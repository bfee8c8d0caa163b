"""Torus heat-kernel spectra and kernels, multiplication-sandwiched
operators, Nystrom discretizations of the limiting integral operators, and
the zero-temperature composite-particle convolution operator.

Conventions: the box is [-L/2, L/2]^d with periodic boundary conditions,
Fourier modes k in Z^d with |k_i| <= M, eigenvalues exp(-beta*|2*pi*k/L|^2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceDomainError, SupportError

TAIL_TOL = 1e-14


@dataclass(frozen=True)
class TorusGrid:
    """Truncated Fourier grid of the periodic box."""

    d: int
    L: float
    M: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError("d must be 1, 2 or 3")
        if self.L <= 0 or self.M < 1:
            raise ValueError("need L > 0 and M >= 1")

    @classmethod
    def for_beta(cls, d: int, L: float, beta: float, tol: float = TAIL_TOL) -> "TorusGrid":
        """Smallest cutoff M with exp(-beta*(2*pi*M/L)**2) < tol."""
        M = math.ceil(L / (2 * math.pi) * math.sqrt(math.log(1.0 / tol) / beta)) + 1
        return cls(d, L, max(M, 1))

    def modes_1d(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def modes(self) -> np.ndarray:
        """All mode vectors, shape ((2M+1)^d, d)."""
        axes = [self.modes_1d()] * self.d
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


@dataclass
class Spectrum:
    """Nonincreasing eigenvalue list of a trace-class operator plus metadata."""

    values: np.ndarray
    beta: float | None = None
    L: float | None = None
    M: int | None = None
    label: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        self.values = np.sort(values)[::-1]

    def trace(self) -> float:
        return float(np.sum(self.values))

    def power_trace(self, ell: int) -> float:
        return float(np.sum(self.values**ell))

    def __len__(self) -> int:
        return self.values.size


def heat_spectrum(grid: TorusGrid, beta: float) -> Spectrum:
    """Eigenvalues exp(-beta*|2*pi*k/L|^2) over the truncated mode set."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    k = grid.modes()
    vals = np.exp(-beta * np.sum((2 * np.pi * k / grid.L) ** 2, axis=1))
    return Spectrum(vals, beta=beta, L=grid.L, M=grid.M, label="heat")


def _heat_1d_fourier(L: float, beta: float, dx: np.ndarray, M: int) -> np.ndarray:
    k = np.arange(1, M + 1)
    g = np.exp(-beta * (2 * np.pi * k / L) ** 2)
    phases = np.cos(2 * np.pi * np.multiply.outer(np.asarray(dx), k) / L)
    return (1.0 + 2.0 * phases @ g) / L


def _heat_1d_image(L: float, beta: float, dx: np.ndarray, tol: float = 1e-18) -> np.ndarray:
    dx = np.asarray(dx, dtype=float)
    reach = math.sqrt(4 * beta * math.log(1.0 / tol))
    K = int(math.ceil((reach + np.max(np.abs(dx), initial=0.0)) / L)) + 1
    n = np.arange(-K, K + 1)
    shifts = dx[..., None] + n * L
    return np.sum(np.exp(-(shifts**2) / (4 * beta)), axis=-1) / math.sqrt(4 * math.pi * beta)


def heat_kernel_torus(grid: TorusGrid, beta: float, x, y, method: str = "fourier"):
    """Periodic heat kernel G_L(x, y), evaluated either by the truncated
    Fourier sum or by the Gaussian image sum.  The two agree to ~1e-10
    under the default tail rule.  x, y: scalars (d=1) or length-d points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape[-1] != grid.d or y.shape[-1] != grid.d:
        raise ValueError("points must have length d")
    dx = x - y
    if method == "fourier":
        per_dim = [_heat_1d_fourier(grid.L, beta, dx[..., i], grid.M) for i in range(grid.d)]
    elif method == "image":
        per_dim = [_heat_1d_image(grid.L, beta, dx[..., i]) for i in range(grid.d)]
    else:
        raise ValueError("method must be 'fourier' or 'image'")
    out = np.prod(per_dim, axis=0)
    return float(out) if out.size == 1 else out


def heat_gram_matrix(L: float, beta: float, xs: np.ndarray) -> np.ndarray:
    """G_L(x_i, x_j) for a 1-d point list, by the image sum."""
    xs = np.asarray(xs, dtype=float)
    return _heat_1d_image(L, beta, xs[:, None] - xs[None, :])


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BumpFunction:
    """Nonnegative bump c * prod_i cos^2(pi*x_i/w) on |x_i| < w/2."""

    height: float = 1.0
    width: float = 2.0
    d: int = 1

    def __post_init__(self):
        if self.height < 0 or self.width <= 0:
            raise ValueError("bump needs height >= 0 and width > 0")

    @property
    def support(self) -> tuple[tuple[float, float], ...]:
        half = self.width / 2
        return tuple((-half, half) for _ in range(self.d))

    @property
    def is_nonnegative(self) -> bool:
        return True

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        inside = np.all(np.abs(x) < self.width / 2, axis=-1)
        vals = self.height * np.prod(np.cos(np.pi * x / self.width) ** 2, axis=-1)
        return np.where(inside, vals, 0.0)

    def scaled(self, factor: float) -> "BumpFunction":
        return BumpFunction(self.height * factor, self.width, self.d)


@dataclass(frozen=True)
class TabulatedFunction:
    """Grid-sampled nonnegative function on a 1-d interval, linearly interpolated."""

    x: np.ndarray
    f: np.ndarray
    d: int = 1

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if x.ndim != 1 or x.shape != f.shape or x.size < 2:
            raise ValueError("need matching 1-d arrays with at least two samples")
        if np.any(np.diff(x) <= 0):
            raise ValueError("sample points must be strictly increasing")
        if np.any(f < 0):
            raise ValueError("test functions must be nonnegative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)

    @property
    def support(self) -> tuple[tuple[float, float], ...]:
        return ((float(self.x[0]), float(self.x[-1])),)

    @property
    def is_nonnegative(self) -> bool:
        return True

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.x, self.f, left=0.0, right=0.0)


def load_test_function_csv(path) -> TabulatedFunction:
    """Two-column CSV (x, f(x)) -> TabulatedFunction."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    return TabulatedFunction(data[:, 0], data[:, 1])


def _check_support_in_box(f, L: float) -> tuple[float, float]:
    (lo, hi) = f.support[0]
    if lo < -L / 2 or hi > L / 2:
        raise SupportError(f"support [{lo}, {hi}] escapes the box [-{L / 2}, {L / 2}]")
    return lo, hi


# ---------------------------------------------------------------------------
# Sandwiched operators in the Fourier basis (d = 1)
# ---------------------------------------------------------------------------


def _gauss_legendre_panels(lo: float, hi: float, n_panels: int, order: int = 16):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, n_panels + 1)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    xs = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    ws = (half[:, None] * weights[None, :]).ravel()
    return xs, ws


def multiplier_coefficients(f, L: float, m_max: int) -> np.ndarray:
    """Fourier coefficients on the box of u = exp(-f) - 1 for m = -m_max..m_max.

    u is supported inside supp f, so a composite Gauss-Legendre rule over the
    support suffices; the panel count scales with the highest mode so that
    every oscillation is resolved.  Above 256 modes an oversampled FFT is
    used instead (aliasing falls off like the cube of the oversampling).
    """
    lo, hi = _check_support_in_box(f, L)
    if m_max > 256:
        n = 1 << math.ceil(math.log2(16 * m_max))
        xs = -L / 2 + L * np.arange(n) / n
        u = np.exp(-np.asarray(f(xs), dtype=float)) - 1.0
        c = np.fft.fft(u) / n
        c *= np.exp(2j * np.pi * np.arange(n) * (L / 2) / L)  # grid starts at -L/2
        m = np.arange(-m_max, m_max + 1)
        return c[np.mod(m, n)]
    width = hi - lo
    n_panels = 8 * max(1, math.ceil(m_max * width / L))
    xs, ws = _gauss_legendre_panels(lo, hi, n_panels)
    u = np.exp(-np.asarray(f(xs), dtype=float)) - 1.0
    m = np.arange(-m_max, m_max + 1)
    phases = np.exp(-2j * np.pi * np.outer(m, xs) / L)
    return phases @ (u * ws) / L


@dataclass
class FourierOperator:
    """Hermitian matrix in the truncated torus Fourier basis (d = 1)."""

    grid: TorusGrid
    matrix: np.ndarray
    label: str = ""

    def eigenvalues(self) -> Spectrum:
        vals = np.linalg.eigvalsh(self.matrix)
        return Spectrum(vals, L=self.grid.L, M=self.grid.M, label=self.label)

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def to_json(self) -> dict:
        return {
            "d": self.grid.d,
            "L": self.grid.L,
            "M": self.grid.M,
            "label": self.label,
            "re": np.real(self.matrix).tolist(),
            "im": np.imag(self.matrix).tolist(),
        }

    def dump_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


def sandwich_operator(grid: TorusGrid, mode_values: np.ndarray, f, label: str = "") -> FourierOperator:
    """Matrix of V* exp(-f) V where V is diagonal in the Fourier basis with
    the given (possibly signed) mode values: entries v_k (d_kl + c_{k-l}) v_l."""
    if grid.d != 1:
        raise NotImplementedError("sandwiched operators are built for d = 1")
    v = np.asarray(mode_values, dtype=float)
    modes = grid.modes_1d()
    if v.shape != modes.shape:
        raise ValueError("mode_values must match the grid mode count")
    coeffs = multiplier_coefficients(f, grid.L, 2 * grid.M)
    diff = modes[:, None] - modes[None, :]
    c = coeffs[diff + 2 * grid.M]
    h = v[:, None] * (np.eye(v.size) + c) * v[None, :]
    h = (h + h.conj().T) / 2
    return FourierOperator(grid, h, label=label)


def build_gtilde(grid: TorusGrid, beta: float, f) -> FourierOperator:
    """G_L^{1/2} exp(-f) G_L^{1/2} in the truncated Fourier basis."""
    g = np.exp(-beta * (2 * np.pi * grid.modes_1d() / grid.L) ** 2)
    return sandwich_operator(grid, np.sqrt(g), f, label="gtilde")


# ---------------------------------------------------------------------------
# Limiting integral operators (Nystrom)
# ---------------------------------------------------------------------------


def resolvent_heat_kernel(r, z: float, alpha: float, beta: float, d: int = 1) -> np.ndarray:
    """Translation-invariant kernel of z*G*(1 - z*alpha*G)^{-1} on R^d,
    evaluated at separations r.

    Expanding the resolvent gives sum_n alpha^(n-1) z^n G_{n*beta}(r); the
    Gaussian series is used whenever |alpha*z| < 1 and a momentum-space
    quadrature otherwise (alpha < 0, where the integrand stays smooth).
    """
    r = np.abs(np.asarray(r, dtype=float))
    if z < 0:
        raise ValueError("z must be nonnegative")
    if z == 0:
        return np.zeros_like(r)
    q = alpha * z
    if abs(q) < 0.99:
        n_terms = max(8, int(math.log(1e-18) / math.log(max(abs(q), 1e-6))) + 1)
        out = np.zeros_like(r)
        for n in range(1, n_terms + 1):
            out += alpha ** (n - 1) * z**n * np.exp(-(r**2) / (4 * n * beta)) / (
                4 * math.pi * n * beta
            ) ** (d / 2)
        return out
    if alpha > 0:
        raise ConvergenceDomainError("z too close to 1/alpha for the series path")
    p_max = math.sqrt(math.log(max(z, 2.0) * 1e18) / beta)
    p, w = _gauss_legendre_panels(0.0, p_max, 32, order=24)
    b = z * np.exp(-beta * p**2) / (1.0 - q * np.exp(-beta * p**2))
    if d == 1:
        osc = np.cos(np.outer(r.ravel(), p))
        out = (osc @ (b * w)) / math.pi
    elif d == 2:
        from scipy.special import j0

        osc = j0(np.outer(r.ravel(), p))
        out = (osc @ (b * p * w)) / (2 * math.pi)
    else:
        rr = np.outer(r.ravel(), p)
        osc = np.sinc(rr / math.pi)
        out = (osc @ (b * p**2 * w)) / (2 * math.pi**2)
    return out.reshape(r.shape)


@dataclass
class NystromOperator:
    """Quadrature discretization W^{1/2} s K s W^{1/2} of a sandwiched kernel."""

    matrix: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.linalg.eigvalsh(self.matrix))[::-1]

    def trace(self) -> float:
        return float(np.trace(self.matrix))


def limit_k_operator(f, z: float, alpha: float, beta: float, n_nodes: int = 96) -> NystromOperator:
    """Nystrom matrix of sqrt(1-e^{-f}) zG(1-z*alpha*G)^{-1} sqrt(1-e^{-f})
    on Gauss-Legendre nodes covering supp f (d = 1)."""
    if getattr(f, "d", 1) != 1:
        raise NotImplementedError("Nystrom build supports d = 1")
    (lo, hi) = f.support[0]
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    xs = (hi + lo) / 2 + (hi - lo) / 2 * nodes
    ws = (hi - lo) / 2 * weights
    s = np.sqrt(np.maximum(1.0 - np.exp(-np.asarray(f(xs), dtype=float)), 0.0))
    kern = resolvent_heat_kernel(xs[:, None] - xs[None, :], z, alpha, beta, d=1)
    sw = s * np.sqrt(ws)
    return NystromOperator(sw[:, None] * kern * sw[None, :], xs, ws)


# ---------------------------------------------------------------------------
# Composite-particle (zero temperature) machinery
# ---------------------------------------------------------------------------


def well_ground_state_ft(p, a: float) -> np.ndarray:
    """Fourier transform of the infinite-well ground state
    cos(pi*r/(2a))/sqrt(a) on [-a, a]; entire in p (sinc form)."""
    p = np.asarray(p, dtype=float)
    b = math.pi / (2 * a)
    return math.sqrt(a / (2 * math.pi)) * (
        np.sinc((b - p) * a / math.pi) + np.sinc((b + p) * a / math.pi)
    )


@dataclass
class CompositeModes:
    """Signed normalized mode values of V_L = phi_L/||phi||_1 and the
    spectrum of V_L* V_L (all in [0, 1], value 1 at k = 0)."""

    L: float
    a: float
    k: np.ndarray
    v: np.ndarray
    phi_l1: float
    plancherel_sum: float
    spectrum: Spectrum = field(init=False)

    def __post_init__(self):
        self.spectrum = Spectrum(self.v**2, L=self.L, label="composite")


def composite_spectrum(L: float, a: float, tail_tol: float = 1e-10) -> CompositeModes:
    """Mode values of the composite-pair convolution operator on the box.

    The cutoff grows until the squared-mode tail estimate drops below
    tail_tol (the tail decays like k^-4).  Also reports ||phi||_L1 and the
    Plancherel mode sum, which tends to ||phi||_L2^2 = 1.
    """
    if 2 * a >= L:
        raise SupportError("potential well exceeds the box: need 2a < L")
    phi0 = well_ground_state_ft(0.0, a)
    K = max(32, int(8 * L / a))
    while True:
        k = np.arange(0, K + 1)
        v_half = well_ground_state_ft(2 * np.pi * k / L, a) / phi0
        tail = v_half[-1] ** 2 * K / 3
        if tail < tail_tol or K > 2_000_000:
            break
        K *= 2
    k_full = np.concatenate([-k[:0:-1], k])
    v_full = np.concatenate([v_half[:0:-1], v_half])
    phi_l1 = math.sqrt(2 * math.pi) * float(phi0)
    plancherel = float(np.sum((2 * np.pi / L) * (v_full * phi0) ** 2))
    return CompositeModes(L=L, a=a, k=k_full, v=v_full, phi_l1=phi_l1, plancherel_sum=plancherel)


def composite_mode_density(a: float, z: float, alpha: float):
    """The momentum density d(p) = z*|phi^(p)|^2 / (|phi^(0)|^2 - z*alpha*|phi^(p)|^2),
    normalized with phi-hat ratios; returns a vectorized callable."""
    phi0 = well_ground_state_ft(0.0, a)

    def d_func(p):
        u = (well_ground_state_ft(p, a) / phi0) ** 2
        return z * u / (1.0 - z * alpha * u)

    return d_func


def composite_resolvent_kernel(r, z: float, alpha: float, a: float,
                               p_max: float | None = None) -> np.ndarray:
    """Kernel at separation r of z*phi*(||phi||_1^2 - z*alpha*phi*phi)^{-1}*phi*,
    i.e. the inverse Fourier transform of the mode density d(p) (d = 1).

    The mode density falls off like p^-4, so the momentum cutoff is a few
    hundred well widths; the oscillatory cosine transform is resolved with
    one quadrature panel per period and accumulated in memory-bounded
    chunks.
    """
    r = np.asarray(r, dtype=float)
    d_func = composite_mode_density(a, z, alpha)
    b = math.pi / (2 * a)
    if p_max is None:
        p_max = 600.0 * b
    freq = max(2 * a, float(np.max(np.abs(r), initial=0.0)), 1.0)
    n_panels = max(64, math.ceil(p_max * freq / (2 * math.pi)))
    p, w = _gauss_legendre_panels(0.0, p_max, n_panels, order=16)
    vals = d_func(p) * w
    flat = np.abs(r).ravel()
    out = np.zeros(flat.size)
    chunk = max(1, int(4e6 // max(flat.size, 1)))
    for start in range(0, p.size, chunk):
        sl = slice(start, start + chunk)
        out += np.cos(np.outer(flat, p[sl])) @ vals[sl]
    return (out / math.pi).reshape(r.shape)


def composite_limit_operator(f, z: float, alpha: float, a: float, n_nodes: int = 96) -> NystromOperator:
    """Nystrom matrix of sqrt(1-e^{-f}) K_z sqrt(1-e^{-f}) for the composite kernel."""
    (lo, hi) = f.support[0]
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    xs = (hi + lo) / 2 + (hi - lo) / 2 * nodes
    ws = (hi - lo) / 2 * weights
    s = np.sqrt(np.maximum(1.0 - np.exp(-np.asarray(f(xs), dtype=float)), 0.0))
    kern = composite_resolvent_kernel(xs[:, None] - xs[None, :], z, alpha, a)
    sw = s * np.sqrt(ws)
    return NystromOperator(sw[:, None] * kern * sw[None, :], xs, ws)


# ---------------------------------------------------------------------------
# Step-function L1 convergence (mode discretization quality)
# ---------------------------------------------------------------------------


def stepwise_l1_gap(func, L: float, p_max: float, cell_order: int = 32) -> float:
    """||b_L - b||_L1 on R (d = 1) where b_L is the piecewise-constant
    discretization b(|2*pi*k/L|) on cells of width 2*pi/L around each mode."""
    dk = 2 * np.pi / L
    K = int(math.ceil(p_max / dk)) + 1
    nodes, weights = np.polynomial.legendre.leggauss(cell_order)
    total = 0.0
    for k in range(0, K + 1):
        lo, hi = (k - 0.5) * dk, (k + 0.5) * dk
        xs = (hi + lo) / 2 + (hi - lo) / 2 * nodes
        ws = (hi - lo) / 2 * weights
        diff = np.abs(func(abs(k) * dk) - func(np.abs(xs)))
        cell = float(diff @ ws)
        total += cell if k == 0 else 2 * cell
    return total
