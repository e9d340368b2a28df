"""Periodic-box spectral infrastructure.

Fields live on the uniform grid of the box [0, L)^3 and are stored as
Fourier coefficients.  The forward transform divides by n1*n2*n3, so a
coefficient is directly the complex amplitude of exp(i xi . x) and the
discrete Parseval identity reads

    integral |v|^2 dx  =  L^3 * sum_k |c_k|^2 .

Axes are numbered 1, 2, 3; "horizontal" means axes 1 and 2.  The
horizontal fractional multiplier acts as (xi_1^2 + xi_2^2)^(s/2); for
s < 0 the xi_h = 0 plane is annihilated and its L^2 mass is recorded on
the returned field (see ``lambda_h``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

# Worker count handed to scipy.fft; 1 keeps runs bit-reproducible.
_workers = 1


def set_num_threads(n: int) -> None:
    """Set the number of FFT worker threads (default 1)."""
    global _workers
    _workers = max(1, int(n))


def get_num_threads() -> int:
    return _workers


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform periodic grid with precomputed wavevector tables.

    n1, n2, n3 must be even and >= 8.  The box side length L is the same
    for all axes.  ``k(i)`` returns the 1-D wavevector table of axis i in
    FFT ordering (integer frequencies times 2*pi/L).
    """

    n1: int
    n2: int
    n3: int
    L: float = 2.0 * np.pi

    def __post_init__(self):
        for n in (self.n1, self.n2, self.n3):
            if n % 2 != 0 or n < 8:
                raise ValueError(f"grid sizes must be even and >= 8, got {n}")
        if not self.L > 0:
            raise ValueError(f"box length must be positive, got {self.L}")
        scale = 2.0 * np.pi / self.L
        k1 = np.fft.fftfreq(self.n1, d=1.0 / self.n1) * scale
        k2 = np.fft.fftfreq(self.n2, d=1.0 / self.n2) * scale
        k3 = np.fft.fftfreq(self.n3, d=1.0 / self.n3) * scale
        object.__setattr__(self, "_k", (k1, k2, k3))
        object.__setattr__(self, "_K", (
            k1[:, None, None] + np.zeros(self.shape),
            k2[None, :, None] + np.zeros(self.shape),
            k3[None, None, :] + np.zeros(self.shape),
        ))
        # 2/3 rule: keep integer frequencies with |k_i| <= floor(n_i/3)
        cut = [np.abs(np.fft.fftfreq(n, d=1.0 / n)) <= n // 3
               for n in (self.n1, self.n2, self.n3)]
        mask = (cut[0][:, None, None] & cut[1][None, :, None]
                & cut[2][None, None, :])
        object.__setattr__(self, "_dealias_mask", mask)
        object.__setattr__(self, "_cache", {})

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    @property
    def npoints(self) -> int:
        return self.n1 * self.n2 * self.n3

    @property
    def volume(self) -> float:
        return self.L ** 3

    @property
    def cell_volume(self) -> float:
        return self.L ** 3 / self.npoints

    def k(self, axis: int) -> np.ndarray:
        """1-D wavevector table of axis ``axis`` (1, 2 or 3)."""
        return self._k[axis - 1]

    def K(self, axis: int) -> np.ndarray:
        """Broadcast 3-D wavevector array of axis ``axis``."""
        return self._K[axis - 1]

    @property
    def kh2(self) -> np.ndarray:
        """xi_1^2 + xi_2^2 on the full grid."""
        try:
            return self._cache["kh2"]
        except KeyError:
            v = self._K[0] ** 2 + self._K[1] ** 2
            self._cache["kh2"] = v
            return v

    @property
    def ksq(self) -> np.ndarray:
        try:
            return self._cache["ksq"]
        except KeyError:
            v = self._K[0] ** 2 + self._K[1] ** 2 + self._K[2] ** 2
            self._cache["ksq"] = v
            return v

    @property
    def dealias_mask(self) -> np.ndarray:
        return self._dealias_mask

    @property
    def kmax_retained(self) -> float:
        """Largest per-axis |xi| surviving the 2/3 rule."""
        scale = 2.0 * np.pi / self.L
        return scale * max(self.n1 // 3, self.n2 // 3, self.n3 // 3)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """One real scalar field stored as complex Fourier coefficients.

    ``coeffs`` has shape (n1, n2, n3).  ``dropped_mean_mass`` is set by
    ``lambda_h`` with s < 0: the L^2 mass of the annihilated xi_h = 0
    plane.
    """

    grid: Grid
    coeffs: np.ndarray
    is_dealiased: bool = False
    dropped_mean_mass: float = 0.0

    def __post_init__(self):
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coefficient shape {self.coeffs.shape} does not match grid "
                f"{self.grid.shape}")


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def fft_forward(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Physical values -> amplitude-normalized coefficients.

    Acts on the trailing three axes, so stacked component arrays
    transform in one call.
    """
    return _fft.fftn(values, axes=(-3, -2, -1), workers=_workers) / grid.npoints


def fft_inverse(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Coefficients -> real physical values (trailing three axes)."""
    return _fft.ifftn(coeffs, axes=(-3, -2, -1),
                      workers=_workers).real * grid.npoints


def to_spectral(values: np.ndarray, grid: Grid) -> SpectralField:
    """Transform a real physical-space array to a SpectralField."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ValueError(
            f"array shape {values.shape} does not match grid {grid.shape}")
    return SpectralField(grid, fft_forward(values, grid))


def to_physical(f: SpectralField) -> np.ndarray:
    """Inverse transform; the imaginary part is discarded."""
    return fft_inverse(f.coeffs, f.grid)


# ---------------------------------------------------------------------------
# multipliers
# ---------------------------------------------------------------------------

def derivative_arr(coeffs: np.ndarray, grid: Grid,
                   alpha: tuple[int, int, int]) -> np.ndarray:
    """Apply (i xi_1)^a1 (i xi_2)^a2 (i xi_3)^a3 to raw coefficients."""
    if len(alpha) != 3 or any(a < 0 for a in alpha):
        raise ValueError(f"multi-index must be 3 nonnegative orders, got {alpha}")
    if sum(alpha) > 16:
        raise ValueError(f"derivative order {sum(alpha)} is unreasonably high")
    out = coeffs
    for axis, a in enumerate(alpha):
        if a:
            out = out * (1j * grid.K(axis + 1)) ** a
    return np.array(out) if out is coeffs else out


def derivative(f: SpectralField, alpha: tuple[int, int, int]) -> SpectralField:
    """Exact spectral derivative d^alpha with alpha = (a1, a2, a3)."""
    return SpectralField(f.grid, derivative_arr(f.coeffs, f.grid, alpha),
                         f.is_dealiased)


def lambda_h_arr(coeffs: np.ndarray, grid: Grid, s: float) -> tuple[np.ndarray, float]:
    """Horizontal fractional multiplier; returns (coeffs, dropped mass)."""
    if not -2.0 <= s <= 2.0:
        raise ValueError(f"fractional order s must lie in [-2, 2], got {s}")
    if s == 0.0:
        return coeffs.copy(), 0.0
    kh2 = grid.kh2
    kernel = kh2 == 0.0
    dropped = 0.0
    if s < 0:
        dropped = grid.volume * float(np.sum(np.abs(coeffs[kernel]) ** 2))
    mult = np.zeros_like(kh2)
    np.power(kh2, s / 2.0, out=mult, where=~kernel)
    return coeffs * mult, dropped


def lambda_h(f: SpectralField, s: float) -> SpectralField:
    """Fourier multiplier |xi_h|^s acting in the horizontal frequencies.

    For s < 0 the xi_h = 0 plane is annihilated; the L^2 mass it carried
    is reported on the result as ``dropped_mean_mass``.
    """
    out, dropped = lambda_h_arr(f.coeffs, f.grid, s)
    return SpectralField(f.grid, out, f.is_dealiased, dropped)


def dealias_arr(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    return coeffs * grid.dealias_mask


def dealias(f: SpectralField) -> SpectralField:
    """Zero every mode with any |xi_i| above the 2/3-rule cutoff."""
    return SpectralField(f.grid, dealias_arr(f.coeffs, f.grid), True,
                         f.dropped_mean_mass)


# ---------------------------------------------------------------------------
# inner products and norms
# ---------------------------------------------------------------------------

def inner_product_arr(fc: np.ndarray, gc: np.ndarray, grid: Grid) -> float:
    """L^2 pairing of two coefficient arrays (real fields assumed)."""
    return grid.volume * float(np.sum(fc * np.conj(gc)).real)


def inner_product(f: SpectralField, g: SpectralField,
                  weight: np.ndarray | None = None) -> float:
    """integral w f g dx over the box (w = 1 when omitted).

    The weight is a physical-space array; weighted products are evaluated
    pointwise and integrated with the (spectrally accurate) trapezoid rule.
    """
    if f.grid is not g.grid and f.grid.shape != g.grid.shape:
        raise ValueError("fields live on different grids")
    if weight is None:
        return inner_product_arr(f.coeffs, g.coeffs, f.grid)
    fp = to_physical(f)
    gp = to_physical(g)
    return float(np.sum(weight * fp * gp)) * f.grid.cell_volume


def multi_indices(order: int, tangential: bool = False):
    """All multi-indices with |alpha| <= order (alpha_3 = 0 if tangential)."""
    out = []
    for a1, a2, a3 in itertools.product(range(order + 1), repeat=3):
        if a1 + a2 + a3 > order:
            continue
        if tangential and a3 != 0:
            continue
        out.append((a1, a2, a3))
    return out


def sobolev_weight(grid: Grid, order: int, tangential: bool = False) -> np.ndarray:
    """Plancherel weight sum_{alpha} xi^(2 alpha) for the H^order family."""
    key = ("sobw", order, tangential)
    try:
        return grid._cache[key]
    except KeyError:
        pass
    K1sq, K2sq, K3sq = grid.K(1) ** 2, grid.K(2) ** 2, grid.K(3) ** 2
    w = np.zeros(grid.shape)
    for a1, a2, a3 in multi_indices(order, tangential):
        w += K1sq ** a1 * K2sq ** a2 * K3sq ** a3
    grid._cache[key] = w
    return w


def norm_l2_arr(coeffs: np.ndarray, grid: Grid,
                weight: np.ndarray | None = None) -> float:
    """Squared L^2 norm from coefficients, optionally Plancherel-weighted."""
    p = np.abs(coeffs) ** 2
    if weight is not None:
        p = p * weight
    return grid.volume * float(np.sum(p))


def norm_Hm(f: SpectralField, k: int) -> float:
    """Full Sobolev norm: sqrt of sum over |alpha| <= k of ||d^alpha f||^2."""
    return np.sqrt(norm_l2_arr(f.coeffs, f.grid, sobolev_weight(f.grid, k)))


def norm_Hm_tan(f: SpectralField, k: int) -> float:
    """Tangential Sobolev norm: only horizontal multi-indices (alpha_3 = 0)."""
    return np.sqrt(norm_l2_arr(f.coeffs, f.grid,
                               sobolev_weight(f.grid, k, tangential=True)))
