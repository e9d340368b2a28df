"""Right-hand sides of the anisotropic compressible MHD systems.

Three systems are assembled here:

* the full system in primitive variables (rho, u, B) with pressure
  P(rho) = rho^3 / 3, dissipation of strength 1 along x1 and eps along
  x2/x3 in the momentum equation, and magnetic diffusion of strength 1
  along x1/x2 and eps along x3;
* the perturbation system for (vrho, u, b) = (rho - 1, u, B - e2);
* the eps -> 0 limit of the perturbation system.

States carry their seven components stacked as one complex coefficient
array of shape (7, n1, n2, n3), ordered (vrho, u1, u2, u3, b1, b2, b3)
everywhere, including the per-mode linear symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, VacuumProximityError
from .spectral import Grid, dealias_arr, fft_forward, fft_inverse

VACUUM_FLOOR = 0.1

RHO, U1, U2, U3, B1, B2, B3 = range(7)
U = slice(U1, U3 + 1)
B = slice(B1, B3 + 1)


@dataclass(frozen=True)
class Params:
    """Everything the uniform-regularity and convergence runs depend on.

    s = 1 - zeta and sigma = 1 - 2 zeta are derived, never stored.  kappa
    weighs the cross terms of the Lyapunov functional, kappa1 the cross
    terms of the difference-energy functional.
    """

    grid: Grid
    eps: float = 0.01
    zeta: float = 0.01
    m: int = 4
    kappa: float = 0.05
    kappa1: float = 0.05

    def __post_init__(self):
        if self.eps < 0:
            raise ConfigError(f"eps must be >= 0, got {self.eps}")
        if not 0.0 < self.zeta < 0.05:
            raise ConfigError("zeta must lie in (0, 0.05), got "
                              f"{self.zeta}")
        if int(self.m) != self.m or self.m < 4:
            raise ConfigError(f"m must be >= 4, got {self.m}")
        if not self.kappa > 0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if not self.kappa1 > 0:
            raise ConfigError(f"kappa1 must be positive, got {self.kappa1}")

    @property
    def s(self) -> float:
        return 1.0 - self.zeta

    @property
    def sigma(self) -> float:
        return 1.0 - 2.0 * self.zeta


class _StackedState:
    """Shared container: seven spectral components in one array."""

    __slots__ = ("grid", "coeffs")

    def __init__(self, grid: Grid, coeffs: np.ndarray):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (7, *grid.shape):
            raise ValueError(
                f"state needs shape (7, {grid.n1}, {grid.n2}, {grid.n3}), "
                f"got {coeffs.shape}")
        self.grid = grid
        self.coeffs = coeffs

    def copy(self):
        return type(self)(self.grid, self.coeffs.copy())


class PerturbState(_StackedState):
    """(vrho, u, b) with vrho = rho - 1 and b = B - e2."""

    @property
    def vrho(self) -> np.ndarray:
        return self.coeffs[RHO]

    @property
    def u(self) -> np.ndarray:
        return self.coeffs[U]

    @property
    def b(self) -> np.ndarray:
        return self.coeffs[B]

    @classmethod
    def zero(cls, grid: Grid) -> "PerturbState":
        return cls(grid, np.zeros((7, *grid.shape), dtype=complex))


class PrimitiveState(_StackedState):
    """(rho, u, B) of the full system."""

    @property
    def rho(self) -> np.ndarray:
        return self.coeffs[RHO]

    @property
    def u(self) -> np.ndarray:
        return self.coeffs[U]

    @property
    def Bfield(self) -> np.ndarray:
        return self.coeffs[B]

    @classmethod
    def steady(cls, grid: Grid) -> "PrimitiveState":
        """rho = 1, u = 0, B = e2."""
        c = np.zeros((7, *grid.shape), dtype=complex)
        c[RHO, 0, 0, 0] = 1.0
        c[B2, 0, 0, 0] = 1.0
        return cls(grid, c)


def to_perturbation(state: PrimitiveState) -> PerturbState:
    """(rho, u, B) -> (rho - 1, u, B - e2), exact in coefficients."""
    c = state.coeffs.copy()
    c[RHO, 0, 0, 0] -= 1.0
    c[B2, 0, 0, 0] -= 1.0
    return PerturbState(state.grid, c)


def from_perturbation(state: PerturbState) -> PrimitiveState:
    c = state.coeffs.copy()
    c[RHO, 0, 0, 0] += 1.0
    c[B2, 0, 0, 0] += 1.0
    return PrimitiveState(state.grid, c)


def _phys(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse-transform a (stack of) coefficient array(s)."""
    return fft_inverse(coeffs, grid)


def _spec_dealiased(values: np.ndarray, grid: Grid) -> np.ndarray:
    return dealias_arr(fft_forward(values, grid), grid)


def _check_vacuum(rho_phys: np.ndarray) -> None:
    lo = float(rho_phys.min())
    if not np.isfinite(lo) or lo <= VACUUM_FLOOR:
        raise VacuumProximityError(
            f"min density {lo:.4g} <= {VACUUM_FLOOR}; aborting")


def _grad(c: np.ndarray, grid: Grid) -> np.ndarray:
    """(3, ...) spectral gradient of one component."""
    return np.stack([1j * grid.K(a) * c for a in (1, 2, 3)])


def _div_spec(vec: np.ndarray, grid: Grid) -> np.ndarray:
    return (1j * grid.K(1) * vec[0] + 1j * grid.K(2) * vec[1]
            + 1j * grid.K(3) * vec[2])


# ---------------------------------------------------------------------------
# linear symbol
# ---------------------------------------------------------------------------

def linear_symbol(xi, eps: float) -> np.ndarray:
    """7x7 matrix M(xi) with d/dt (vrho^, u^, b^) = M (vrho^, u^, b^).

    Encodes the constant-coefficient left side of the perturbation system
    moved to the right: sound coupling grad vrho / div u, the background
    field coupling grad b2 - d2 b / e2 div u - d2 u, and the anisotropic
    diffusion (1, eps, eps) on u plus grad div u, (1, 1, eps) on b.
    """
    x1, x2, x3 = (float(v) for v in xi)
    M = np.zeros((7, 7), dtype=complex)
    k = np.array([x1, x2, x3])
    du = -(x1 * x1 + eps * (x2 * x2 + x3 * x3))
    db = -(x1 * x1 + x2 * x2 + eps * x3 * x3)
    for a in range(3):
        M[RHO, U1 + a] = -1j * k[a]
        M[U1 + a, RHO] = -1j * k[a]
        for c in range(3):
            M[U1 + a, U1 + c] = du * (a == c) - k[a] * k[c]
            # -grad b2 + d2 b  and  -e2 div u + d2 u, sign-flipped to RHS
            M[U1 + a, B1 + c] = 1j * x2 * (a == c) - 1j * k[a] * (c == 1)
            M[B1 + a, U1 + c] = 1j * x2 * (a == c) - 1j * k[c] * (a == 1)
        M[B1 + a, B1 + a] = db
    return M


def symbol_array(grid: Grid, eps: float) -> np.ndarray:
    """M(xi) for every mode, shape (n1, n2, n3, 7, 7)."""
    key = ("symbol", eps)
    try:
        return grid._cache[key]
    except KeyError:
        pass
    K = np.stack([grid.K(a) for a in (1, 2, 3)], axis=-1)  # (...,3)
    M = np.zeros((*grid.shape, 7, 7), dtype=complex)
    x2 = K[..., 1]
    du = -(K[..., 0] ** 2 + eps * (K[..., 1] ** 2 + K[..., 2] ** 2))
    db = -(K[..., 0] ** 2 + K[..., 1] ** 2 + eps * K[..., 2] ** 2)
    for a in range(3):
        M[..., RHO, U1 + a] = -1j * K[..., a]
        M[..., U1 + a, RHO] = -1j * K[..., a]
        for c in range(3):
            if a == c:
                M[..., U1 + a, U1 + c] = du - K[..., a] * K[..., c]
                M[..., U1 + a, B1 + c] = 1j * x2 - 1j * K[..., a] * (c == 1)
                M[..., B1 + a, U1 + c] = 1j * x2 - 1j * K[..., c] * (a == 1)
            else:
                M[..., U1 + a, U1 + c] = -K[..., a] * K[..., c]
                M[..., U1 + a, B1 + c] = -1j * K[..., a] * (c == 1)
                M[..., B1 + a, U1 + c] = -1j * K[..., c] * (a == 1)
        M[..., B1 + a, B1 + a] = db
    grid._cache[key] = M
    return M


def apply_symbol(M: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Per-mode matrix action on a stacked state."""
    return np.einsum("xyzij,jxyz->ixyz", M, coeffs, optimize=True)


# ---------------------------------------------------------------------------
# nonlinear terms of the perturbation / limit systems
# ---------------------------------------------------------------------------

def nonlinear_perturb(state: PerturbState, eps: float) -> np.ndarray:
    """Dealiased spectral (F1, F2, F3) of the perturbation system.

    F1 = -u.grad vrho - vrho div u
    F2 = -u.grad u - vrho grad vrho
         - vrho/(1+vrho) (d1^2 u + eps d2^2 u + eps d3^2 u
                          + grad div u - grad b2 + d2 b)
         + 1/(1+vrho) b.grad b - 1/(2(1+vrho)) grad |b|^2
    F3 = -u.grad b - b div u + b.grad u

    Rational weights are evaluated pointwise in physical space; every
    product is transformed back and dealiased.
    """
    g = state.grid
    c = state.coeffs
    vr = fft_inverse(c[RHO], g)
    _check_vacuum(1.0 + vr)
    u = _phys(c[U], g)
    b = _phys(c[B], g)

    grad_vr = _phys(_grad(c[RHO], g), g)                      # (3,...)
    grad_u = np.stack([_phys(_grad(c[U1 + j], g), g) for j in range(3)])
    grad_b = np.stack([_phys(_grad(c[B1 + j], g), g) for j in range(3)])
    div_u = fft_inverse(_div_spec(c[U], g), g)

    # grad_x[j, a] = d_a x_j ; advection (v.grad)x_j = sum_a v_a d_a x_j
    adv = np.einsum("axyz,jaxyz->jxyz", u, grad_u)
    adv_b = np.einsum("axyz,jaxyz->jxyz", u, grad_b)
    b_grad_b = np.einsum("axyz,jaxyz->jxyz", b, grad_b)
    b_grad_u = np.einsum("axyz,jaxyz->jxyz", b, grad_u)

    ksq_u = -(g.K(1) ** 2) * c[U]
    if eps:
        ksq_u = ksq_u - eps * (g.K(2) ** 2 + g.K(3) ** 2) * c[U]
    # G = d1^2 u (+ eps terms) + grad div u - grad b2 + d2 b, spectrally
    div_u_spec = _div_spec(c[U], g)
    G = ksq_u + _grad(div_u_spec, g) - _grad(c[B2], g) \
        + 1j * g.K(2) * c[B]
    G_phys = _phys(G, g)

    w = vr / (1.0 + vr)
    q = 1.0 / (1.0 + vr)

    b2_spec = _spec_dealiased(np.einsum("axyz,axyz->xyz", b, b), g)
    grad_b2 = _phys(_grad(b2_spec, g), g)

    F1 = -np.einsum("axyz,axyz->xyz", u, grad_vr) - vr * div_u
    F2 = (-adv - vr * grad_vr - w * G_phys
          + q * b_grad_b - 0.5 * q * grad_b2)
    F3 = -adv_b - b * div_u + b_grad_u

    out = np.empty_like(c)
    out[RHO] = _spec_dealiased(F1, g)
    out[U] = _spec_dealiased(F2, g)
    out[B] = _spec_dealiased(F3, g)
    return out


def nonlinear_limit(state: PerturbState) -> np.ndarray:
    """(F1^0, F2^0, F3^0): the eps-terms drop out of F2."""
    return nonlinear_perturb(state, 0.0)


def rhs_perturb(state: PerturbState, eps: float) -> PerturbState:
    """Full right-hand side of the perturbation system (linear + F)."""
    M = symbol_array(state.grid, eps)
    rhs = apply_symbol(M, state.coeffs) + nonlinear_perturb(state, eps)
    return PerturbState(state.grid, rhs)


def rhs_limit(state: PerturbState) -> PerturbState:
    """Full right-hand side of the limit system."""
    M = symbol_array(state.grid, 0.0)
    rhs = apply_symbol(M, state.coeffs) + nonlinear_limit(state)
    return PerturbState(state.grid, rhs)


# ---------------------------------------------------------------------------
# full system in primitive variables
# ---------------------------------------------------------------------------

def rhs_full(state: PrimitiveState, eps: float) -> PrimitiveState:
    """Right-hand side of the full system, momentum solved for du/dt.

    d/dt rho = -div(rho u)
    d/dt u   = -u.grad u + (1/rho) [ d1^2 u + eps d2^2 u + eps d3^2 u
               + grad div u - grad P(rho) + B.grad B - grad |B|^2 / 2 ]
    d/dt B   = -u.grad B + d1^2 B + d2^2 B + eps d3^2 B
               + B.grad u - B div u
    """
    g = state.grid
    c = state.coeffs
    rho = fft_inverse(c[RHO], g)
    _check_vacuum(rho)
    u = _phys(c[U], g)
    Bf = _phys(c[B], g)

    grad_rho = _phys(_grad(c[RHO], g), g)
    grad_u = np.stack([_phys(_grad(c[U1 + j], g), g) for j in range(3)])
    grad_B = np.stack([_phys(_grad(c[B1 + j], g), g) for j in range(3)])
    div_u = fft_inverse(_div_spec(c[U], g), g)

    drho = -_div_spec(_spec_dealiased(rho * u, g), g)

    visc = -(g.K(1) ** 2) * c[U]
    if eps:
        visc = visc - eps * (g.K(2) ** 2 + g.K(3) ** 2) * c[U]
    visc = visc + _grad(_div_spec(c[U], g), g)
    visc_phys = _phys(visc, g)

    Bsq_spec = _spec_dealiased(np.einsum("axyz,axyz->xyz", Bf, Bf), g)
    grad_Bsq = _phys(_grad(Bsq_spec, g), g)
    lorentz = np.einsum("axyz,jaxyz->jxyz", Bf, grad_B) - 0.5 * grad_Bsq
    grad_P = rho ** 2 * grad_rho      # P(rho) = rho^3/3

    du = (-np.einsum("axyz,jaxyz->jxyz", u, grad_u)
          + (visc_phys - grad_P + lorentz) / rho)

    diff_B = -(g.K(1) ** 2 + g.K(2) ** 2) * c[B]
    if eps:
        diff_B = diff_B - eps * (g.K(3) ** 2) * c[B]
    dB = (diff_B
          + _spec_dealiased(
              -np.einsum("axyz,jaxyz->jxyz", u, grad_B)
              + np.einsum("axyz,jaxyz->jxyz", Bf, grad_u)
              - Bf * div_u, g))

    out = np.empty_like(c)
    out[RHO] = drho
    out[U] = _spec_dealiased(du, g)
    out[B] = dB
    return PrimitiveState(g, out)


def div_b_max(state: PerturbState) -> float:
    """max |div b| on the physical grid."""
    return float(np.abs(fft_inverse(_div_spec(state.b, state.grid),
                                    state.grid)).max())


def min_density(state: PerturbState) -> float:
    return float((1.0 + fft_inverse(state.vrho, state.grid)).min())
