"""Energy and dissipation functionals evaluated on states.

Conventions (s := 1 - zeta, sigma := 1 - 2 zeta, m the regularity index):

  E^m      = ||(vrho,u,b)||_{H^m}^2 + ||L_h^{-s}(vrho,u,b)||^2
             + ||L_h^{-s} d3 (vrho,u,b)||^2
  D^k      = ||(d1 u, div u, grad_h b)||_{H^k}^2
             + eps ||(d2 u, d3 u, d3 b)||_{H^k}^2
             + ||(d2 u, grad_h vrho)||_{H^{k-1}}^2
  E^k_tan  = ||(vrho,u,b)||_{H^k_tan}^2 + ||d3 (vrho,u,b)||_{H^{k-1}_tan}^2
  D^k_tan  = the six-block tangential dissipation (see dissipation_D_tan)

The Lyapunov functional Etilde^{m-1}_tan carries the 1/sqrt(1+vrho)
weight on b and 2*kappa cross terms; it is the quantity whose decay the
differential inequality  d/dt Etilde + kappa D_tan <= 0  controls.

The negative-norm blocks exclude the xi_h = 0 plane (periodic-box
substitute for the whole-space low-frequency analysis).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .models import (B, B1, B2, B3, RHO, U, U1, U2, U3, Params, PerturbState,
                     div_b_max, min_density)
from .spectral import (Grid, fft_inverse, dealias_arr, fft_forward,
                       norm_l2_arr, sobolev_weight)


def _sq(c: np.ndarray, grid: Grid, w: np.ndarray | None = None) -> float:
    return norm_l2_arr(c, grid, w)


def _pair(fc: np.ndarray, gc: np.ndarray, grid: Grid,
          w: np.ndarray | None = None) -> float:
    p = fc * np.conj(gc)
    if w is not None:
        p = p * w
    return grid.volume * float(np.sum(p).real)


def neg_weight(grid: Grid, s: float) -> np.ndarray:
    """|xi_h|^{-2s} with the xi_h = 0 plane removed."""
    key = ("negw", s)
    try:
        return grid._cache[key]
    except KeyError:
        pass
    kh2 = grid.kh2
    w = np.zeros_like(kh2)
    np.power(kh2, -s, out=w, where=kh2 > 0)
    grid._cache[key] = w
    return w


def tan_level_weight(grid: Grid, level: int) -> np.ndarray:
    """sum over |alpha_h| = level (exactly) of xi_1^{2a1} xi_2^{2a2}."""
    key = ("tanlvl", level)
    try:
        return grid._cache[key]
    except KeyError:
        pass
    K1sq, K2sq = grid.K(1) ** 2, grid.K(2) ** 2
    w = np.zeros(grid.shape)
    for a1 in range(level + 1):
        w += K1sq ** a1 * K2sq ** (level - a1)
    grid._cache[key] = w
    return w


def _stack_sq(coeffs: np.ndarray, grid: Grid, w: np.ndarray | None) -> float:
    """Sum of weighted squared L^2 norms over stacked components."""
    p = np.abs(coeffs) ** 2
    total = p.sum(axis=0)
    if w is not None:
        total = total * w
    return grid.volume * float(np.sum(total))


# ---------------------------------------------------------------------------
# the four norm families
# ---------------------------------------------------------------------------

def energy_E(state: PerturbState, params: Params) -> float:
    """E^m: full Sobolev block plus the two negative-norm blocks."""
    g = state.grid
    wm = sobolev_weight(g, params.m)
    wneg = neg_weight(g, params.s) * (1.0 + g.K(3) ** 2)
    return _stack_sq(state.coeffs, g, wm) + _stack_sq(state.coeffs, g, wneg)


def energy_E_neg(state: PerturbState, params: Params) -> float:
    """The negative-norm part of E^m alone."""
    g = state.grid
    wneg = neg_weight(g, params.s) * (1.0 + g.K(3) ** 2)
    return _stack_sq(state.coeffs, g, wneg)


def dissipation_D(state: PerturbState, params: Params,
                  eps: float | None = None, k: int | None = None) -> float:
    """D^k (k defaults to m); eps enters linearly."""
    g = state.grid
    if eps is None:
        eps = params.eps
    if k is None:
        k = params.m
    wk = sobolev_weight(g, k)
    wk1 = sobolev_weight(g, k - 1)
    K1sq, K2sq, K3sq = g.K(1) ** 2, g.K(2) ** 2, g.K(3) ** 2
    u, b, vr = state.u, state.b, state.vrho
    div_u = (1j * g.K(1) * u[0] + 1j * g.K(2) * u[1] + 1j * g.K(3) * u[2])
    out = (_stack_sq(u, g, K1sq * wk) + _sq(div_u, g, wk)
           + _stack_sq(b, g, (K1sq + K2sq) * wk))
    if eps:
        out += eps * (_stack_sq(u, g, (K2sq + K3sq) * wk)
                      + _stack_sq(b, g, K3sq * wk))
    out += _stack_sq(u, g, K2sq * wk1) + _sq(vr, g, (K1sq + K2sq) * wk1)
    return out


def energy_E_tan(state: PerturbState, k: int) -> float:
    """E^k_tan: tangential block plus one vertical derivative layer."""
    g = state.grid
    wt = sobolev_weight(g, k, tangential=True)
    wt1 = sobolev_weight(g, k - 1, tangential=True)
    K3sq = g.K(3) ** 2
    return (_stack_sq(state.coeffs, g, wt)
            + _stack_sq(state.coeffs, g, K3sq * wt1))


def dissipation_D_tan(state: PerturbState, eps: float, k: int) -> float:
    """D^k_tan: the six tangential dissipation blocks."""
    if k < 2:
        raise ValueError(f"D^k_tan needs k >= 2, got {k}")
    g = state.grid
    wt = [sobolev_weight(g, j, tangential=True) for j in (k, k - 1, k - 2)]
    K1sq, K2sq, K3sq = g.K(1) ** 2, g.K(2) ** 2, g.K(3) ** 2
    u, b, vr = state.u, state.b, state.vrho
    div_u = (1j * g.K(1) * u[0] + 1j * g.K(2) * u[1] + 1j * g.K(3) * u[2])

    def main_block(w):
        return (_stack_sq(u, g, K1sq * w) + _sq(div_u, g, w)
                + _stack_sq(b, g, (K1sq + K2sq) * w))

    def eps_block(w):
        return (_stack_sq(u, g, (K2sq + K3sq) * w)
                + _stack_sq(b, g, K3sq * w))

    def weak_block(w):
        return _stack_sq(u, g, K2sq * w) + _sq(vr, g, (K1sq + K2sq) * w)

    out = main_block(wt[0]) + main_block(K3sq * wt[1])
    if eps:
        out += eps * (eps_block(wt[0]) + eps_block(K3sq * wt[1]))
    out += weak_block(wt[1]) + weak_block(K3sq * wt[2])
    return out


# ---------------------------------------------------------------------------
# Lyapunov functional
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LyapunovValue:
    value: float
    ratio_to_E_tan: float
    positive: bool


def _exact_level_indices(level: int):
    return [(a1, level - a1, 0) for a1 in range(level + 1)]


def lyapunov_Etilde_tan(state: PerturbState, params: Params,
                        kappa: float | None = None) -> LyapunovValue:
    """Etilde^{m-1}_tan: weighted endpoint norms plus 2*kappa cross terms.

    The b-blocks carry the physical weight 1/(1+vrho); the cross terms
    pair u_h with grad_h vrho and d2 b with u at the two derivative
    levels the closure uses.  Returns the value, its ratio to
    E^{m-1}_tan (equivalence monitor), and a positivity flag (a negative
    value means kappa is too large for this state).  ``kappa`` overrides
    params.kappa when given (0 reduces to the pure weighted-norm sum).
    """
    g = state.grid
    m = params.m
    kappa = params.kappa if kappa is None else kappa
    c = state.coeffs
    q = 1.0 / (1.0 + fft_inverse(c[RHO], g))
    dV = g.cell_volume
    K1, K2, K3 = (1j * g.K(a) for a in (1, 2, 3))

    def wb_sq(mult: np.ndarray | None) -> float:
        """sum_a integral q |mult . b_a|^2 dx."""
        tot = 0.0
        for a in range(3):
            ca = c[B1 + a] if mult is None else mult * c[B1 + a]
            tot += float(np.sum(q * fft_inverse(ca, g) ** 2)) * dV
        return tot

    def plain_sq(idx, mult: np.ndarray | None) -> float:
        cc = c[idx] if mult is None else mult * c[idx]
        return _stack_sq(cc if cc.ndim == 4 else cc[None], g, None)

    total = 0.0
    # |alpha_h| = 0 and its d3 layer
    total += plain_sq(RHO, None) + plain_sq(U, None) + wb_sq(None)
    total += plain_sq(RHO, K3) + plain_sq(U, K3) + wb_sq(K3)
    # |alpha_h| = m-1 and the d3 |alpha_h| = m-2 layer
    for a1, a2, _ in _exact_level_indices(m - 1):
        mult = K1 ** a1 * K2 ** a2
        total += plain_sq(RHO, mult) + plain_sq(U, mult) + wb_sq(mult)
    for a1, a2, _ in _exact_level_indices(m - 2):
        mult = K1 ** a1 * K2 ** a2 * K3
        total += plain_sq(RHO, mult) + plain_sq(U, mult) + wb_sq(mult)

    def cross_at(mult: np.ndarray | float):
        """integral d^a u_h . grad_h d^a vrho + d2 d^a b . d^a u dx."""
        out = 0.0
        for a, Kh in ((0, K1), (1, K2)):
            out += _pair(mult * c[U1 + a], mult * Kh * c[RHO], g)
        for a in range(3):
            out += _pair(mult * K2 * c[B1 + a], mult * c[U1 + a], g)
        return out

    def cross_vert_at(mult: np.ndarray | float):
        """integral d^a grad_h u3 . grad_h d^a d3 vrho
           + d^a d23 b . d^a d3 u dx."""
        out = 0.0
        for Kh in (K1, K2):
            out += _pair(mult * Kh * c[U3], mult * Kh * K3 * c[RHO], g)
        for a in range(3):
            out += _pair(mult * K2 * K3 * c[B1 + a], mult * K3 * c[U1 + a], g)
        return out

    cross = cross_at(1.0) + cross_vert_at(1.0)
    for a1, a2, _ in _exact_level_indices(m - 2):
        cross += cross_at(K1 ** a1 * K2 ** a2)
    for a1, a2, _ in _exact_level_indices(m - 3):
        cross += cross_vert_at(K1 ** a1 * K2 ** a2)
    total += 2.0 * kappa * cross

    etan = energy_E_tan(state, m - 1)
    ratio = total / etan if etan > 0 else (1.0 if total == 0 else np.inf)
    return LyapunovValue(total, ratio, total >= 0.0)


# ---------------------------------------------------------------------------
# initial-data constant
# ---------------------------------------------------------------------------

# Generic constant of the bootstrap closure; the source hides it inside
# "<=", so the artifact pins it to 1.
DELTA_C = 1.0


def C0_of_initial(state0: PerturbState, params: Params) -> float:
    """Decay-rate constant assembled from the initial data.

    base = ||(vrho,u,b)(0)||_{H^m}^2 + negative-norm blocks
           + ||L_h^{-s} u(0)|| * ||(vrho,u)(0)||_{H^m}^2
    delta = 8 * C * base, C = DELTA_C;  returns base + delta^{3/2}.
    """
    g = state0.grid
    wm = sobolev_weight(g, params.m)
    wneg = neg_weight(g, params.s) * (1.0 + g.K(3) ** 2)
    hm_all = _stack_sq(state0.coeffs, g, wm)
    neg_all = _stack_sq(state0.coeffs, g, wneg)
    neg_u = np.sqrt(_stack_sq(state0.u, g, neg_weight(g, params.s)))
    hm_ru = _stack_sq(state0.coeffs[RHO:U3 + 1], g, wm)
    base = hm_all + neg_all + neg_u * hm_ru
    delta = 8.0 * DELTA_C * base
    return base + delta ** 1.5


def bootstrap_delta(state0: PerturbState, params: Params) -> float:
    """The smallness constant delta = 8 C (initial-data norms)."""
    g = state0.grid
    wm = sobolev_weight(g, params.m)
    wneg = neg_weight(g, params.s) * (1.0 + g.K(3) ** 2)
    neg_u = np.sqrt(_stack_sq(state0.u, g, neg_weight(g, params.s)))
    hm_ru = _stack_sq(state0.coeffs[RHO:U3 + 1], g, wm)
    return 8.0 * DELTA_C * (_stack_sq(state0.coeffs, g, wm)
                            + _stack_sq(state0.coeffs, g, wneg)
                            + neg_u * hm_ru)


# ---------------------------------------------------------------------------
# difference-system functionals
# ---------------------------------------------------------------------------

def diff_energy_Ebar(state_eps: PerturbState, state_0: PerturbState,
                     params: Params) -> tuple[float, float]:
    """(Ebar, Ebar_q) for the difference of two trajectories.

    Ebar is the plain H^1 energy of the difference.  Ebar_q adds the
    1/(1+vrho^eps) weight on bbar, the (vrho^0 + vrho^eps)|d3 rhobar|^2
    and ubar_3 d3 rhobar div_h u_h^eps correction terms, and the kappa1
    cross terms.
    """
    g = state_eps.grid
    if state_0.grid is not g and state_0.grid.shape != g.shape:
        raise ValueError("states live on different grids")
    d = state_eps.coeffs - state_0.coeffs
    w1 = sobolev_weight(g, 1)
    ebar = _stack_sq(d, g, w1)

    dV = g.cell_volume
    K1, K2, K3 = (1j * g.K(a) for a in (1, 2, 3))
    vr_eps = fft_inverse(state_eps.coeffs[RHO], g)
    vr_0 = fft_inverse(state_0.coeffs[RHO], g)
    q = 1.0 / (1.0 + vr_eps)

    def weighted_b_sq(mult) -> float:
        tot = 0.0
        for a in range(3):
            ca = d[B1 + a] if mult is None else mult * d[B1 + a]
            tot += float(np.sum((q * fft_inverse(ca, g)) ** 2)) * dV
        return tot

    t = _stack_sq(d[RHO:U3 + 1], g, None) + weighted_b_sq(None)
    for Kd in (K1, K2, K3):
        t += _stack_sq(Kd * d[RHO:U3 + 1], g, None) + weighted_b_sq(Kd)

    d3_rho = fft_inverse(K3 * d[RHO], g)
    t += float(np.sum(d3_rho ** 2 * (vr_0 + vr_eps))) * dV
    div_h_ueps = fft_inverse(K1 * state_eps.coeffs[U1]
                             + K2 * state_eps.coeffs[U2], g)
    t += float(np.sum(fft_inverse(d[U3], g) * d3_rho * div_h_ueps)) * dV

    cross = 0.0
    for a, Kh in ((0, K1), (1, K2)):
        cross += _pair(d[U1 + a], Kh * d[RHO], g)
    for a in range(3):
        cross += _pair(K2 * d[B1 + a], d[U1 + a], g)
    t += params.kappa1 * cross
    return ebar, t


def growth_factors_AB(state_eps: PerturbState,
                      state_0: PerturbState) -> tuple[float, float]:
    """The two Gronwall growth factors of the convergence estimate.

    f stacks both trajectories' (vrho, u, b); g stacks their div u.
    Every factor is a product of (possibly fractional) powers of
    Plancherel-weighted norms; all are evaluated spectrally.
    """
    g = state_eps.grid
    f = np.concatenate([state_0.coeffs, state_eps.coeffs])
    gk = lambda a: 1j * g.K(a)
    div0 = sum(gk(a + 1) * state_0.coeffs[U1 + a] for a in range(3))
    dive = sum(gk(a + 1) * state_eps.coeffs[U1 + a] for a in range(3))
    gdiv = np.stack([div0, dive])

    K1sq, K2sq, K3sq = g.K(1) ** 2, g.K(2) ** 2, g.K(3) ** 2
    kh2 = K1sq + K2sq
    H = {k: sobolev_weight(g, k) for k in (1, 2, 3)}
    T = {k: sobolev_weight(g, k, tangential=True) for k in (1, 2, 3)}

    def nf(c, w=None):
        return np.sqrt(_stack_sq(c, g, w))

    A = (nf(f, H[1]) * nf(f, kh2 * H[1])
         + nf(f, kh2 * H[2]) * nf(f, kh2 * H[3])
         + nf(f) * nf(gdiv)
         + nf(f, K3sq) ** 0.25 * nf(f, K3sq ** 2) ** 0.25
         * nf(f, K3sq * kh2 * T[1]) ** 0.75
         * nf(f, K3sq ** 2 * kh2 * T[1]) ** 0.75
         + nf(gdiv, H[3]) ** 2)

    Bv = (nf(f, K3sq ** 2) ** 0.8 * nf(f, kh2 * K3sq ** 2) ** 0.8
          + nf(f, kh2 * (1.0 + K3sq) * T[3]) ** (4.0 / 3.0)
          + nf(gdiv, kh2 * (1.0 + K3sq) * T[2]) ** (4.0 / 3.0)
          + (nf(gdiv, K3sq) * nf(gdiv, K3sq ** 2)
             * nf(gdiv, kh2 * K3sq) * nf(gdiv, kh2 * K3sq ** 2)) ** (1.0 / 3.0))
    return float(A), float(Bv)


# ---------------------------------------------------------------------------
# weighted energy balance (the ledger)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LedgerSample:
    """One evaluation of the alpha_h = 0 weighted energy balance."""

    energy: float           # (1/2)(||vrho||^2 + ||u||^2 + <b,b;1/(1+vrho)>)
    dissipation: float      # quadratic dissipation terms
    flux_terms: tuple       # the ten nonlinear/commutator integrals
    rhs: float              # -dissipation + sum(flux_terms)


def weighted_energy_balance(state: PerturbState, eps: float) -> LedgerSample:
    """Evaluate both sides of the level-zero energy identity.

    d/dt energy = -dissipation + sum of the ten flux integrals; each
    flux term is evaluated independently by pointwise quadrature so the
    sample can be checked against a finite-difference derivative of the
    energy along a trajectory.
    """
    g = state.grid
    c = state.coeffs
    dV = g.cell_volume
    vr = fft_inverse(c[RHO], g)
    q = 1.0 / (1.0 + vr)
    w = vr * q
    u = np.stack([fft_inverse(c[U1 + a], g) for a in range(3)])
    b = np.stack([fft_inverse(c[B1 + a], g) for a in range(3)])
    K1, K2, K3 = (1j * g.K(a) for a in (1, 2, 3))

    grad_vr = np.stack([fft_inverse(Kd * c[RHO], g) for Kd in (K1, K2, K3)])
    grad_u = np.stack([np.stack([fft_inverse(Kd * c[U1 + j], g)
                                 for Kd in (K1, K2, K3)]) for j in range(3)])
    grad_b = np.stack([np.stack([fft_inverse(Kd * c[B1 + j], g)
                                 for Kd in (K1, K2, K3)]) for j in range(3)])
    div_u_spec = K1 * c[U1] + K2 * c[U2] + K3 * c[U3]
    div_u = fft_inverse(div_u_spec, g)

    energy = 0.5 * dV * float(np.sum(vr ** 2 + (u ** 2).sum(0)
                                     + q * (b ** 2).sum(0)))

    wsq = lambda comp, mult: _sq(mult * comp, g)
    diss = (sum(wsq(c[U1 + a], K1) for a in range(3))
            + _sq(div_u_spec, g)
            + sum(wsq(c[B1 + a], Kd) for a in range(3) for Kd in (K1, K2))
            + eps * (sum(wsq(c[U1 + a], Kd)
                         for a in range(3) for Kd in (K2, K3))
                     + sum(wsq(c[B1 + a], K3) for a in range(3))))

    u_grad_vr = np.einsum("axyz,axyz->xyz", u, grad_vr)
    adv_u = np.einsum("axyz,jaxyz->jxyz", u, grad_u)
    u_grad_b = np.einsum("axyz,jaxyz->jxyz", u, grad_b)
    b_grad_b = np.einsum("axyz,jaxyz->jxyz", b, grad_b)
    b_grad_u = np.einsum("axyz,jaxyz->jxyz", b, grad_u)

    # the weighted linear group of the momentum nonlinearity:
    # d1^2 u + grad div u - grad b2 + d2 b (no eps terms here)
    Gp = np.stack([fft_inverse(
        K1 * K1 * c[U1 + a] + [K1, K2, K3][a] * div_u_spec
        - [K1, K2, K3][a] * c[B2] + K2 * c[B1 + a], g) for a in range(3)])
    bsq_spec = dealias_arr(fft_forward((b ** 2).sum(0), g), g)
    grad_bsq = np.stack([fft_inverse(Kd * bsq_spec, g) for Kd in (K1, K2, K3)])

    lap_h_b = np.stack([fft_inverse((K1 * K1 + K2 * K2) * c[B1 + a], g)
                        for a in range(3)])
    d33_b = np.stack([fft_inverse(K3 * K3 * c[B1 + a], g) for a in range(3)])
    d2_u = np.stack([fft_inverse(K2 * c[U1 + a], g) for a in range(3)])
    d2_b = np.stack([fft_inverse(K2 * c[B1 + a], g) for a in range(3)])
    dd_u = np.stack([fft_inverse((K2 * K2 + K3 * K3) * c[U1 + a], g)
                     for a in range(3)])

    def integ(x):
        return dV * float(np.sum(x))

    I1 = -integ((u_grad_vr + vr * div_u) * vr)
    I2 = -integ(np.einsum("jxyz,jxyz->xyz", adv_u + vr * grad_vr, u))
    I3 = -integ(w * np.einsum("jxyz,jxyz->xyz", Gp, u))
    I4 = integ(q * np.einsum("jxyz,jxyz->xyz", b_grad_b, u))
    I5 = -0.5 * integ(q * np.einsum("jxyz,jxyz->xyz", grad_bsq, u))
    I6 = integ((b ** 2).sum(0) / (2.0 * (1.0 + vr) ** 2)
               * (div_u + u_grad_vr + vr * div_u))
    I7 = -integ(q * np.einsum("jxyz,jxyz->xyz",
                              b * div_u + u_grad_b, b))
    I8 = integ(q * np.einsum("jxyz,jxyz->xyz", b_grad_u, b))
    e2_div = np.zeros_like(b)
    e2_div[1] = div_u
    I9 = integ(w * np.einsum("jxyz,jxyz->xyz",
                             e2_div - lap_h_b - eps * d33_b - d2_u, b))
    I10 = -eps * integ(w * np.einsum("jxyz,jxyz->xyz", dd_u, u))

    terms = (I1, I2, I3, I4, I5, I6, I7, I8, I9, I10)
    return LedgerSample(energy, diss, terms, -diss + sum(terms))


# ---------------------------------------------------------------------------
# diagnostics rows
# ---------------------------------------------------------------------------

DIAGNOSTICS_COLUMNS = ("t", "E_m", "D_m", "E_tan", "D_tan", "E_tilde",
                       "E_neg", "div_b_max", "mass_mean", "min_density")


@dataclass
class DiagnosticsRow:
    """One time sample of every functional a run tracks."""

    t: float
    E_m: float
    D_m: float
    E_tan: float
    D_tan: float
    E_tilde: float
    E_neg: float
    div_b_max: float
    mass_mean: float
    min_density: float
    Ebar: float | None = None
    Ebar_q: float | None = None
    A_t: float | None = None
    B_t: float | None = None
    unresolved: bool = False

    def csv_values(self):
        return (self.t, self.E_m, self.D_m, self.E_tan, self.D_tan,
                self.E_tilde, self.E_neg, self.div_b_max, self.mass_mean,
                self.min_density)


def resolution_tail_fraction(state: PerturbState, params: Params) -> float:
    """H^m-weighted mass of the outermost retained shell over the total."""
    g = state.grid
    wm = sobolev_weight(g, params.m)
    total = _stack_sq(state.coeffs, g, wm)
    if total == 0.0:
        return 0.0
    cuts = [n // 3 for n in g.shape]
    kk = [np.abs(np.fft.fftfreq(n, d=1.0 / n)) for n in g.shape]
    shell = ((kk[0][:, None, None] >= cuts[0] - 1)
             | (kk[1][None, :, None] >= cuts[1] - 1)
             | (kk[2][None, None, :] >= cuts[2] - 1))
    tail = _stack_sq(state.coeffs * shell, g, wm)
    return tail / total


def diagnostics_row(state: PerturbState, params: Params, t: float,
                    eps: float | None = None) -> DiagnosticsRow:
    if eps is None:
        eps = params.eps
    m = params.m
    lyap = lyapunov_Etilde_tan(state, params)
    return DiagnosticsRow(
        t=t,
        E_m=energy_E(state, params),
        D_m=dissipation_D(state, params, eps=eps),
        E_tan=energy_E_tan(state, m - 1),
        D_tan=dissipation_D_tan(state, eps, m - 1),
        E_tilde=lyap.value,
        E_neg=energy_E_neg(state, params),
        div_b_max=div_b_max(state),
        mass_mean=float(state.coeffs[RHO][0, 0, 0].real),
        min_density=min_density(state),
        unresolved=resolution_tail_fraction(state, params) > 1e-10,
    )
