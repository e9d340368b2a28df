"""Numerical checks of the anisotropic Sobolev inequalities, the
Hardy-Littlewood-Sobolev bound, the horizontal interpolation inequality,
and the exact cancellation identities the energy estimates rest on.

The inequalities are stated on the whole space; on the periodic box a
constant field breaks several right-hand sides (a derivative factor
vanishes while the left side does not), so every trial field here is
zero-mean with full-dimensional spectral support.  Ratios LHS/RHS are
reported, never asserted against hidden constants; the testable content
is finiteness, scale invariance, stability across seeds, and the exact
equality cases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .models import B1, RHO, U1, PerturbState
from .spectral import Grid, fft_forward, fft_inverse

OVERSAMPLE = 4  # sup norms and L^p quadratures use a 4x refined grid


@dataclass(frozen=True)
class IneqReport:
    """Ratio statistics of one inequality variant over seeded trials."""

    variant: str
    trials: int
    max_ratio: float
    median_ratio: float
    violations: int            # ratios above 2x the median (reported only)
    structural_failures: int   # nonzero LHS with zero RHS (must never occur)


def _report(variant: str, ratios: list[float], failures: int) -> IneqReport:
    arr = np.asarray(ratios, dtype=float)
    med = float(np.median(arr)) if arr.size else 0.0
    mx = float(arr.max()) if arr.size else 0.0
    viol = int(np.sum(arr > 2.0 * med)) if med > 0 else 0
    return IneqReport(variant, len(ratios), mx, med, viol, failures)


# ---------------------------------------------------------------------------
# field generation and elementary norms
# ---------------------------------------------------------------------------

def random_field(grid: Grid, rng: np.random.Generator,
                 modes: int = 4) -> np.ndarray:
    """Zero-mean coefficients with |xi|^-4 spectrum, full 3-D support."""
    kk = [np.fft.fftfreq(n, d=1.0 / n) for n in grid.shape]
    k2 = (kk[0][:, None, None] ** 2 + kk[1][None, :, None] ** 2
          + kk[2][None, None, :] ** 2)
    ball = (k2 <= modes ** 2) & (k2 > 0)
    prof = np.zeros(grid.shape)
    np.power(k2, -2.0, out=prof, where=ball)
    c = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    c = c * prof * ball
    conj = np.conj(c)
    for ax in (0, 1, 2):
        conj = np.roll(np.flip(conj, axis=ax), 1, axis=ax)
    return 0.5 * (c + conj)


def _oversampled(coeffs: np.ndarray, grid: Grid, factor: int = OVERSAMPLE):
    """Physical values on a factor-refined grid by zero padding."""
    n1, n2, n3 = grid.shape
    big = np.zeros((factor * n1, factor * n2, factor * n3), dtype=complex)
    idx = np.ix_(np.fft.fftfreq(n1, 1 / n1).astype(int),
                 np.fft.fftfreq(n2, 1 / n2).astype(int),
                 np.fft.fftfreq(n3, 1 / n3).astype(int))
    big[idx] = coeffs
    return _fft.ifftn(big).real * big.size


def linf(coeffs: np.ndarray, grid: Grid) -> float:
    return float(np.abs(_oversampled(coeffs, grid)).max())


def l2(coeffs: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(grid.volume * np.sum(np.abs(coeffs) ** 2)))


def dl2(coeffs: np.ndarray, grid: Grid, alpha: tuple[int, int, int]) -> float:
    """L^2 norm of d^alpha f from coefficients."""
    mult = np.ones(grid.shape)
    for ax, a in enumerate(alpha):
        if a:
            mult = mult * grid.K(ax + 1) ** (2 * a)
    return float(np.sqrt(grid.volume * np.sum(mult * np.abs(coeffs) ** 2)))


# ---------------------------------------------------------------------------
# anisotropic Sobolev inequalities (four variants)
# ---------------------------------------------------------------------------

def sobolev_ratio(variant: int, fghs, grid: Grid,
                  s: float = 0.75) -> float:
    """LHS/RHS of one anisotropic inequality for given coefficient fields.

    variant 1: ||f||_inf vs the eight-factor product of mixed-derivative
               L^2 norms (exponents 1/8 each)
    variant 2: integral |f g h| vs ||f|| ||g||^1/2 ||d1 g||^1/2
               ||h||^1/4 ||d2 h||^1/4 ||d3 h||^1/4 ||d23 h||^1/4
    variant 3: integral |f g h| vs the (1;2;3) pattern with exponents 1/2
    variant 4: || sup_{x3} |f| ||_{L^{2/s}(x_h)} vs
               (||f|| ||d2 f|| + ||d1 f|| ||d12 f||)^{(1-s)/2}
               ||f||^{(2s-1)/2} ||d3 f||^{1/2},  s in (1/2, 1)

    Returns 0 for identically zero input and inf on structural failure.
    """
    if variant in (2, 3):
        f, gg, h = fghs
        fp = _oversampled(f, grid)
        gp = _oversampled(gg, grid)
        hp = _oversampled(h, grid)
        lhs = float(np.sum(np.abs(fp * gp * hp))) * grid.volume / fp.size
        if variant == 2:
            rhs = (l2(f, grid)
                   * l2(gg, grid) ** 0.5 * dl2(gg, grid, (1, 0, 0)) ** 0.5
                   * l2(h, grid) ** 0.25 * dl2(h, grid, (0, 1, 0)) ** 0.25
                   * dl2(h, grid, (0, 0, 1)) ** 0.25
                   * dl2(h, grid, (0, 1, 1)) ** 0.25)
        else:
            rhs = (l2(f, grid) ** 0.5 * dl2(f, grid, (1, 0, 0)) ** 0.5
                   * l2(gg, grid) ** 0.5 * dl2(gg, grid, (0, 1, 0)) ** 0.5
                   * l2(h, grid) ** 0.5 * dl2(h, grid, (0, 0, 1)) ** 0.5)
    elif variant == 1:
        f = fghs[0]
        lhs = linf(f, grid)
        rhs = 1.0
        for alpha in ((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0),
                      (0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)):
            rhs *= dl2(f, grid, alpha) ** 0.125
    elif variant == 4:
        if not 0.5 < s < 1.0:
            raise ValueError(f"variant 4 needs s in (1/2, 1), got {s}")
        f = fghs[0]
        fp = _oversampled(f, grid)
        sup3 = np.abs(fp).max(axis=2)
        p = 2.0 / s
        area = grid.L ** 2 / sup3.size
        lhs = float(np.sum(sup3 ** p) * area) ** (1.0 / p)
        rhs = ((l2(f, grid) * dl2(f, grid, (0, 1, 0))
                + dl2(f, grid, (1, 0, 0)) * dl2(f, grid, (1, 1, 0)))
               ** ((1.0 - s) / 2.0)
               * l2(f, grid) ** ((2.0 * s - 1.0) / 2.0)
               * dl2(f, grid, (0, 0, 1)) ** 0.5)
    else:
        raise ValueError(f"unknown variant {variant}")
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return np.inf
    return lhs / rhs


def check_sobolev(variant: int, trials: int = 100, seed: int = 0,
                  n: int = 16, L: float = 2.0 * np.pi,
                  s: float = 0.75) -> IneqReport:
    """Ratio statistics of one Sobolev variant over seeded random trials."""
    grid = Grid(n, n, n, L)
    rng = np.random.default_rng(seed)
    ratios, failures = [], 0
    for _ in range(trials):
        fghs = [random_field(grid, rng) for _ in range(3)]
        r = sobolev_ratio(variant, fghs, grid, s=s)
        if not np.isfinite(r):
            failures += 1
        else:
            ratios.append(r)
    return _report(f"sobolev{variant}", ratios, failures)


# ---------------------------------------------------------------------------
# Hardy-Littlewood-Sobolev on a horizontal slice
# ---------------------------------------------------------------------------

def random_field_2d(n: int, rng: np.random.Generator,
                    modes: int = 4) -> np.ndarray:
    kk = np.fft.fftfreq(n, d=1.0 / n)
    k2 = kk[:, None] ** 2 + kk[None, :] ** 2
    ball = (k2 <= modes ** 2) & (k2 > 0)
    prof = np.zeros((n, n))
    np.power(k2, -2.0, out=prof, where=ball)
    c = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    c = c * prof * ball
    conj = np.conj(c)
    for ax in (0, 1):
        conj = np.roll(np.flip(conj, axis=ax), 1, axis=ax)
    return 0.5 * (c + conj)


def hls_ratio(coeffs2d: np.ndarray, alpha: float, L: float = 2.0 * np.pi) -> float:
    """||L_h^{-alpha} f||_{L^2} / ||f||_{L^p}, p = 2/(1+alpha), 2-D."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    n = coeffs2d.shape[0]
    kk = np.fft.fftfreq(n, d=1.0 / n) * (2.0 * np.pi / L)
    k2 = kk[:, None] ** 2 + kk[None, :] ** 2
    c = coeffs2d.copy()
    c[k2 == 0] = 0.0
    mult = np.zeros_like(k2)
    np.power(k2, -alpha / 2.0, out=mult, where=k2 > 0)
    lhs = float(np.sqrt(L ** 2 * np.sum(np.abs(mult * c) ** 2)))
    big = np.zeros((OVERSAMPLE * n, OVERSAMPLE * n), dtype=complex)
    idx = np.fft.fftfreq(n, 1 / n).astype(int)
    big[np.ix_(idx, idx)] = c
    phys = _fft.ifftn(big).real * big.size
    p = 2.0 / (1.0 + alpha)
    rhs = float(np.sum(np.abs(phys) ** p) * (L ** 2 / phys.size)) ** (1.0 / p)
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return np.inf
    return lhs / rhs


def check_hls(alpha: float, trials: int = 100, seed: int = 0,
              n: int = 32, L: float = 2.0 * np.pi) -> IneqReport:
    rng = np.random.default_rng(seed)
    ratios, failures = [], 0
    for _ in range(trials):
        r = hls_ratio(random_field_2d(n, rng), alpha, L)
        if not np.isfinite(r):
            failures += 1
        else:
            ratios.append(r)
    return _report("hls", ratios, failures)


# ---------------------------------------------------------------------------
# horizontal interpolation inequality
# ---------------------------------------------------------------------------

def interpolation_ratio(coeffs: np.ndarray, grid: Grid, s: float) -> float:
    """||f|| vs ||L_h^{-s} f||^{1/(1+s)} ||grad_h f||^{s/(1+s)}.

    Exactly Hoelder on the Fourier side, so the ratio is <= 1 and the
    equality case is a single |xi_h| shell.  Requires no xi_h = 0 content.
    """
    kh2 = grid.kh2
    c = coeffs * (kh2 > 0)
    l2sq = float(np.sum(np.abs(c) ** 2))
    if l2sq == 0.0:
        return 0.0
    negw = np.zeros_like(kh2)
    np.power(kh2, -s, out=negw, where=kh2 > 0)
    neg = float(np.sum(negw * np.abs(c) ** 2))
    gh = float(np.sum(kh2 * np.abs(c) ** 2))
    rhs = neg ** (0.5 / (1.0 + s)) * gh ** (0.5 * s / (1.0 + s))
    lhs = np.sqrt(l2sq)
    if rhs == 0.0:
        return np.inf
    return lhs / rhs


def check_interpolation(s: float, trials: int = 100, seed: int = 0,
                        n: int = 16, L: float = 2.0 * np.pi) -> IneqReport:
    grid = Grid(n, n, n, L)
    rng = np.random.default_rng(seed)
    ratios, failures = [], 0
    for _ in range(trials):
        r = interpolation_ratio(random_field(grid, rng), grid, s)
        if not np.isfinite(r):
            failures += 1
        else:
            ratios.append(r)
    return _report("interpolation", ratios, failures)


# ---------------------------------------------------------------------------
# exact cancellation identities
# ---------------------------------------------------------------------------

def check_cancellations(state: PerturbState, alpha_h: tuple[int, int] = (1, 1),
                        m_vertical: int = 2) -> dict[str, float]:
    """Residuals of the three cancellation identities on one state.

    (i)   int d^a grad vrho . d^a u + int d^a div u . d^a vrho = 0
    (ii)  int d^a (grad b2 - d2 b) . d^a u
          + int d^a (e2 div u - d2 u) . d^a b = 0
    (iii) int w b.grad X . Y + int w b.grad Y . X
          = - int div(w b) X . Y,  w = 1/(1+vrho),
          X = d3^m u, Y = d3^m b

    (i) and (ii) are exact spectral integration-by-parts facts; (iii) is
    limited by the dealiasing error of the rational weight.  Residuals
    are |sum of sides| / (sum of magnitudes + 1e-30).
    """
    g = state.grid
    c = state.coeffs
    vol = g.volume
    mult = (1j * g.K(1)) ** alpha_h[0] * (1j * g.K(2)) ** alpha_h[1]
    K = [1j * g.K(a) for a in (1, 2, 3)]

    def pair(fc, gc):
        return vol * float(np.sum(mult * fc * np.conj(mult * gc)).real)

    # (i)
    t1 = sum(pair(K[a] * c[RHO], c[U1 + a]) for a in range(3))
    div_u = sum(K[a] * c[U1 + a] for a in range(3))
    t2 = pair(div_u, c[RHO])
    res_i = abs(t1 + t2) / (abs(t1) + abs(t2) + 1e-30)

    # (ii)
    t3 = sum(pair(K[a] * c[B1 + 1] - K[1] * c[B1 + a], c[U1 + a])
             for a in range(3))
    t4 = sum(pair((div_u if a == 1 else 0.0 * div_u) - K[1] * c[U1 + a],
                  c[B1 + a]) for a in range(3))
    res_ii = abs(t3 + t4) / (abs(t3) + abs(t4) + 1e-30)

    # (iii)
    dV = g.cell_volume
    vr = fft_inverse(c[RHO], g)
    w = 1.0 / (1.0 + vr)
    b = fft_inverse(c[B1:B1 + 3], g)
    d3m = K[2] ** m_vertical
    X = fft_inverse(d3m * c[U1:U1 + 3], g)
    Y = fft_inverse(d3m * c[B1:B1 + 3], g)
    gradX = np.stack([fft_inverse(Kd * d3m * c[U1:U1 + 3], g)
                      for Kd in K])                      # (3, comp, ...)
    gradY = np.stack([fft_inverse(Kd * d3m * c[B1:B1 + 3], g) for Kd in K])
    t5 = dV * float(np.sum(w * np.einsum("axyz,ajxyz,jxyz->xyz", b, gradX, Y)))
    t6 = dV * float(np.sum(w * np.einsum("axyz,ajxyz,jxyz->xyz", b, gradY, X)))
    wb_spec = fft_forward(w * b, g)
    div_wb = fft_inverse(sum(K[a] * wb_spec[a] for a in range(3)), g)
    t7 = -dV * float(np.sum(div_wb * np.einsum("jxyz,jxyz->xyz", X, Y)))
    res_iii = abs(t5 + t6 - t7) / (abs(t5) + abs(t6) + abs(t7) + 1e-30)

    return {"i": res_i, "ii": res_ii, "iii": res_iii}
