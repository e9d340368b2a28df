"""Spectral infrastructure: transforms, multipliers, dealiasing, norms."""

import itertools

import numpy as np
import pytest

from anisomhd.spectral import (Grid, SpectralField, dealias, derivative,
                               inner_product, lambda_h, norm_Hm, norm_Hm_tan,
                               to_physical, to_spectral)
from _oracles import grid_points, random_coeffs, refined_quadrature

L = 2.0 * np.pi


@pytest.fixture(scope="module")
def g16():
    return Grid(16, 16, 16, L)


def coords(grid):
    x = grid_points(grid.n1, grid.L)
    return np.meshgrid(x, x, x, indexing="ij")


class TestTransforms:
    def test_grid_validation(self):
        with pytest.raises(ValueError, match="even"):
            Grid(15, 16, 16)
        with pytest.raises(ValueError, match="even"):
            Grid(16, 16, 6)
        with pytest.raises(ValueError, match="positive"):
            Grid(16, 16, 16, L=-1.0)

    def test_wavevector_tables(self, g16):
        for axis in (1, 2, 3):
            k = g16.k(axis)
            assert k.shape == (16,)
            assert np.sum(k == 0.0) == 1

    def test_constant_field(self, g16):
        f = to_spectral(np.ones(g16.shape), g16)
        c = f.coeffs.copy()
        assert abs(c[0, 0, 0] - 1.0) < 1e-14
        c[0, 0, 0] = 0.0
        assert np.abs(c).max() < 1e-14

    def test_single_mode(self, g16):
        X, _, _ = coords(g16)
        f = to_spectral(np.sin(2 * np.pi * X / L), g16)
        nz = np.argwhere(np.abs(f.coeffs) > 1e-13)
        assert len(nz) == 2
        assert abs(f.coeffs[1, 0, 0] - (-0.5j)) < 1e-14
        assert abs(f.coeffs[-1, 0, 0] - 0.5j) < 1e-14

    def test_roundtrip_random(self, g16):
        rng = np.random.default_rng(42)
        v = rng.standard_normal(g16.shape)
        err = np.abs(to_physical(to_spectral(v, g16)) - v).max()
        assert err < 1e-12 * np.abs(v).max()

    def test_shape_mismatch_rejected(self, g16):
        with pytest.raises(ValueError, match="does not match"):
            to_spectral(np.zeros((8, 8, 8)), g16)

    def test_parseval(self, g16):
        rng = np.random.default_rng(3)
        v = rng.standard_normal(g16.shape)
        f = to_spectral(v, g16)
        phys = np.sum(v ** 2) * g16.cell_volume
        spec = g16.volume * np.sum(np.abs(f.coeffs) ** 2)
        assert abs(phys - spec) < 1e-12 * phys

    def test_conjugate_symmetry(self, g16):
        rng = np.random.default_rng(4)
        c = to_spectral(rng.standard_normal(g16.shape), g16).coeffs
        mirrored = np.conj(c)
        for ax in (0, 1, 2):
            mirrored = np.roll(np.flip(mirrored, axis=ax), 1, axis=ax)
        assert np.abs(c - mirrored).max() < 1e-15


class TestDerivative:
    def test_sin_derivative(self, g16):
        X, _, _ = coords(g16)
        k = 2 * np.pi / L
        f = to_spectral(np.sin(k * X), g16)
        df = to_physical(derivative(f, (1, 0, 0)))
        assert np.abs(df - k * np.cos(k * X)).max() < 1e-12

    def test_constant_direction(self, g16):
        X, Y, _ = coords(g16)
        f = to_spectral(np.sin(X) * np.cos(Y), g16)
        assert np.abs(derivative(f, (0, 0, 1)).coeffs).max() < 1e-14

    def test_per_mode_multiplier(self, g16):
        # d1 d2 acting on a two-mode real field: each coefficient must be
        # multiplied by (i xi1)(i xi2); checked mode by mode.
        c = random_coeffs(16, L, seed=7)
        f = SpectralField(g16, c)
        out = derivative(f, (1, 1, 0)).coeffs
        k = g16.k(1)
        expect = (1j * k[:, None, None]) * (1j * k[None, :, None]) * c
        assert np.abs(out - expect).max() < 1e-14

    def test_commutes(self, g16):
        c = random_coeffs(16, L, seed=8)
        f = SpectralField(g16, c)
        a = derivative(derivative(f, (1, 0, 0)), (0, 1, 0)).coeffs
        b = derivative(derivative(f, (0, 1, 0)), (1, 0, 0)).coeffs
        assert np.array_equal(a, b)

    def test_integration_by_parts(self, g16):
        f = SpectralField(g16, random_coeffs(16, L, seed=9))
        g = SpectralField(g16, random_coeffs(16, L, seed=10))
        for axis in range(3):
            alpha = tuple(1 if i == axis else 0 for i in range(3))
            lhs = inner_product(derivative(f, alpha), g)
            rhs = -inner_product(f, derivative(g, alpha))
            assert abs(lhs - rhs) < 1e-12 * (abs(lhs) + 1e-30)

    def test_order_cap(self, g16):
        f = SpectralField(g16, random_coeffs(16, L, seed=1))
        with pytest.raises(ValueError):
            derivative(f, (10, 10, 10))


class TestLambdaH:
    def test_zero_field(self, g16):
        f = SpectralField(g16, np.zeros(g16.shape, dtype=complex))
        assert np.abs(lambda_h(f, -0.9).coeffs).max() == 0.0

    def test_single_mode_amplitude(self, g16):
        # mode xi_h = (2 pi / L)(1, 2): |xi_h| = sqrt(5) * 2 pi / L
        X, Y, _ = coords(g16)
        v = np.cos(2 * np.pi * (X + 2 * Y) / L)
        f = to_spectral(v, g16)
        for s in (-0.99, -0.5, 0.7, 2.0):
            out = to_physical(lambda_h(f, s))
            expect = (np.sqrt(5.0) * 2 * np.pi / L) ** s * v
            assert np.abs(out - expect).max() < 1e-12 * np.abs(expect).max()

    def test_inverse_pair(self, g16):
        c = random_coeffs(16, L, seed=11)
        c[0, 0, :] = 0.0  # no xi_h = 0 content
        f = SpectralField(g16, c)
        back = lambda_h(lambda_h(f, 0.8), -0.8).coeffs
        assert np.abs(back - c).max() < 1e-12 * np.abs(c).max()

    def test_semigroup(self, g16):
        c = random_coeffs(16, L, seed=12)
        c[0, 0, :] = 0.0
        f = SpectralField(g16, c)
        a = lambda_h(lambda_h(f, 0.6), 0.9).coeffs
        b = lambda_h(f, 1.5).coeffs
        assert np.abs(a - b).max() < 1e-13 * np.abs(b).max()

    def test_range_validation(self, g16):
        f = SpectralField(g16, np.zeros(g16.shape, dtype=complex))
        with pytest.raises(ValueError, match="s must lie"):
            lambda_h(f, 2.5)

    def test_kernel_mass_recorded(self, g16):
        c = np.zeros(g16.shape, dtype=complex)
        c[0, 0, 2] = 1.0   # pure vertical mode, lives on the xi_h = 0 plane
        c[0, 0, -2] = 1.0
        f = SpectralField(g16, c)
        out = lambda_h(f, -0.9)
        assert np.abs(out.coeffs).max() == 0.0
        assert abs(out.dropped_mean_mass - g16.volume * 2.0) < 1e-12


class TestDealias:
    def test_band_limited_unchanged(self, g16):
        f = SpectralField(g16, random_coeffs(16, L, seed=13, modes=4))
        out = dealias(f)
        assert np.array_equal(out.coeffs, f.coeffs)
        again = dealias(out)
        assert np.array_equal(again.coeffs, out.coeffs)

    def test_retained_count(self, g16):
        rng = np.random.default_rng(14)
        noise = rng.standard_normal(g16.shape) \
            + 1j * rng.standard_normal(g16.shape)
        out = dealias(SpectralField(g16, noise))
        cut = 16 // 3
        assert np.count_nonzero(out.coeffs) == (2 * cut + 1) ** 3

    @staticmethod
    def _padded_product_spectrum(ca, cb, n):
        """Exact product spectrum via zero padding to 2n (oracle)."""
        big = np.zeros((2 * n,) * 3, dtype=complex)
        idx = np.fft.fftfreq(n, 1 / n).astype(int)
        sel = np.ix_(idx, idx, idx)
        pa = np.zeros_like(big)
        pb = np.zeros_like(big)
        pa[sel] = ca
        pb[sel] = cb
        fa = np.fft.ifftn(pa).real * pa.size
        fb = np.fft.ifftn(pb).real * pb.size
        return np.fft.fftn(fa * fb) / big.size

    @staticmethod
    def _fold_to_coarse(c2, n):
        """Alias the exact 2n-spectrum onto the n-grid index set."""
        out = np.zeros((n,) * 3, dtype=complex)
        f2 = np.fft.fftfreq(2 * n, 1 / (2 * n)).astype(int)
        fold = np.mod(f2 + n // 2, n) - n // 2   # coarse frequency
        pos = np.mod(fold, n)
        for i, j, k in itertools.product(range(2 * n), repeat=3):
            out[pos[i], pos[j], pos[k]] += c2[i, j, k]
        return out

    def test_safe_band_product_matches_padded_oracle(self):
        n = 8
        g = Grid(n, n, n, L)
        ca = random_coeffs(n, L, seed=15, modes=2)
        cb = random_coeffs(n, L, seed=16, modes=2)
        grid_prod = to_spectral(to_physical(SpectralField(g, ca))
                                * to_physical(SpectralField(g, cb)), g)
        oracle = self._padded_product_spectrum(ca, cb, n)
        idx = np.fft.fftfreq(n, 1 / n).astype(int)
        truncated = oracle[np.ix_(idx, idx, idx)]
        a = dealias(grid_prod).coeffs
        b = dealias(SpectralField(g, truncated)).coeffs
        assert np.abs(a - b).max() < 1e-14

    def test_nyquist_band_aliases_removed(self):
        # inputs occupy the full band; the grid product aliases, and the
        # aliased spectrum must equal the folded exact spectrum
        n = 8
        g = Grid(n, n, n, L)
        rng = np.random.default_rng(17)
        va = rng.standard_normal(g.shape)
        vb = rng.standard_normal(g.shape)
        ca = to_spectral(va, g).coeffs
        cb = to_spectral(vb, g).coeffs
        grid_prod = to_spectral(va * vb, g)
        folded = self._fold_to_coarse(
            self._padded_product_spectrum(ca, cb, n), n)
        a = dealias(grid_prod).coeffs
        b = dealias(SpectralField(g, folded)).coeffs
        scale = np.abs(folded).max()
        assert np.abs(a - b).max() < 1e-13 * scale
        cut = n // 3
        kk = np.abs(np.fft.fftfreq(n, 1 / n) * n / 1).astype(int)
        kk = np.abs(np.fft.fftfreq(n, 1 / n).astype(int))
        above = (kk[:, None, None] > cut) | (kk[None, :, None] > cut) \
            | (kk[None, None, :] > cut)
        assert np.abs(a[above]).max() == 0.0


class TestInnerProduct:
    def test_closed_form(self, g16):
        X, _, _ = coords(g16)
        k = 2 * np.pi / L
        f = to_spectral(np.sin(k * X), g16)
        assert abs(inner_product(f, f) - L ** 3 / 2) < 1e-12

    def test_orthogonality(self, g16):
        X, Y, _ = coords(g16)
        f = to_spectral(np.sin(X), g16)
        g = to_spectral(np.sin(2 * Y), g16)
        assert abs(inner_product(f, g)) < 1e-13

    def test_weighted_against_refined_quadrature(self, g16):
        _, Y, _ = coords(g16)
        vrho = 0.1 * np.sin(2 * np.pi * Y / L)
        w = 1.0 / (1.0 + vrho)
        cf = random_coeffs(16, L, seed=18, modes=3)
        cg = random_coeffs(16, L, seed=19, modes=3)
        f = SpectralField(g16, cf)
        g = SpectralField(g16, cg)
        got = inner_product(f, g, weight=w)

        yr = grid_points(4 * 16, L)[None, :, None]

        def integrand(fp, gp):
            return fp * gp / (1.0 + 0.1 * np.sin(2 * np.pi * yr / L))

        oracle = refined_quadrature([cf, cg], L, factor=4,
                                    pointwise=integrand)
        assert abs(got - oracle) < 1e-10 * (abs(oracle) + 1.0)


class TestNorms:
    def test_zero(self, g16):
        f = SpectralField(g16, np.zeros(g16.shape, dtype=complex))
        assert norm_Hm(f, 4) == 0.0
        assert norm_Hm_tan(f, 4) == 0.0

    def test_vertical_mode_invisible_to_tangential(self, g16):
        _, _, Z = coords(g16)
        f = to_spectral(np.sin(2 * np.pi * Z / L), g16)
        # every horizontal derivative kills it: H^k_tan norm^2 = ||f||^2
        assert abs(norm_Hm_tan(f, 1) ** 2 - L ** 3 / 2) < 1e-12
        assert abs(norm_Hm_tan(f, 4) ** 2 - L ** 3 / 2) < 1e-12

    @pytest.mark.parametrize("k,tangential", [(2, False), (2, True),
                                              (4, False), (3, True)])
    def test_plancherel_oracle(self, g16, k, tangential):
        # oracle: enumerate multi-indices, build each derivative with plain
        # numpy multipliers, integrate |d^a f|^2 on the physical grid
        c = random_coeffs(16, L, seed=20, modes=4)
        f = SpectralField(g16, c)
        kf = np.fft.fftfreq(16, 1 / 16) * (2 * np.pi / L)
        total = 0.0
        for a1 in range(k + 1):
            for a2 in range(k + 1 - a1):
                for a3 in range(k + 1 - a1 - a2):
                    if tangential and a3 != 0:
                        continue
                    mult = ((1j * kf[:, None, None]) ** a1
                            * (1j * kf[None, :, None]) ** a2
                            * (1j * kf[None, None, :]) ** a3)
                    dphys = np.fft.ifftn(mult * c).real * c.size
                    total += np.sum(dphys ** 2) * (L ** 3 / c.size)
        got = (norm_Hm_tan(f, k) if tangential else norm_Hm(f, k)) ** 2
        assert abs(got - total) < 1e-10 * total

    def test_hm_splits_into_tan_plus_rest(self, g16):
        # H^k = (alpha_3 = 0 family) + (alpha_3 >= 1 family), checked by
        # explicit index enumeration of the complement
        c = random_coeffs(16, L, seed=21, modes=4)
        f = SpectralField(g16, c)
        k = 3
        kf = np.fft.fftfreq(16, 1 / 16) * (2 * np.pi / L)
        rest = 0.0
        for a1 in range(k + 1):
            for a2 in range(k + 1 - a1):
                for a3 in range(1, k + 1 - a1 - a2):
                    w = (kf[:, None, None] ** (2 * a1)
                         * kf[None, :, None] ** (2 * a2)
                         * kf[None, None, :] ** (2 * a3))
                    rest += L ** 3 * np.sum(w * np.abs(c) ** 2)
        lhs = norm_Hm(f, k) ** 2
        rhs = norm_Hm_tan(f, k) ** 2 + rest
        assert abs(lhs - rhs) < 1e-10 * lhs
