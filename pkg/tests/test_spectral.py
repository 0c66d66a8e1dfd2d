from fractions import Fraction

import numpy as np
import pytest

from gammariesz.exceptions import GroupStructureError, UnsupportedOperationError
from gammariesz.group import AbelianGroupSpec, ActionSpec, FiniteGroupTable, GammaElement, SemidirectGroup
from gammariesz.oracles import brute_synthesis_matrix, frame_probe, operator_bounds, random_signal
from gammariesz.signal import GammaSignal, analyze_inner, convolve_gamma, delta, left_translate
from gammariesz.spectral import (
    FrequencyGrid,
    Tolerance,
    TransferMatrix,
    apply_spectral,
    cstar_norm,
    dinf_closed_bounds,
    dinf_transfer_matrix,
    fourier,
    lattice_coefficients,
    onb_check,
    riesz_analyze,
    t_gamma,
    transfer_matrix,
)


def z5_by_z4():
    """Z_5 x Z_4 with the generator acting by multiplication by 2 (order 4 mod 5)."""
    return SemidirectGroup(
        AbelianGroupSpec.finite(5), FiniteGroupTable.cyclic(4), ActionSpec(tuple([[pow(2, k, 5)]] for k in range(4)))
    )


class TestGrid:
    def test_finite_grid_is_complete(self, z6):
        g = FrequencyGrid.for_group(z6)
        assert g.exact and g.n_points == 6

    def test_lattice_grid(self, dinf):
        g = FrequencyGrid.for_group(dinf, 8)
        w = g.points()[:, 0]
        assert w[0] == -np.pi and np.all(w < np.pi) and len(w) == 8
        assert g.refine().size == 16 and g.refine().level == 1

    @pytest.mark.parametrize("size", [0, 3, 12])
    def test_rejects_non_power_of_two(self, dinf, size):
        with pytest.raises(ValueError):
            FrequencyGrid.for_group(dinf, size)

    def test_fourier_convention_and_fold(self, dinf):
        g = FrequencyGrid.for_group(dinf, 16)
        w = g.points()[:, 0]
        seq = {(3,): 2.0, (-21,): 1j}
        direct = 2.0 * np.exp(-3j * w) + 1j * np.exp(21j * w)
        assert np.allclose(fourier(seq, g), direct, atol=1e-12)

    def test_lattice_coefficients_invert(self, dinf):
        g = FrequencyGrid.for_group(dinf, 32)
        seq = {(-5,): 1.5, (0,): -2.0, (7,): 0.25}
        back = lattice_coefficients(fourier(seq, g), g)
        back = {n: v for n, v in back.items() if abs(v) > 1e-12}
        assert set(back) == set(seq)
        assert all(abs(back[n] - seq[n]) < 1e-12 for n in seq)


class TestTGamma:
    def test_delta(self, z4, dinf):
        for G in (z4, dinf):
            T = t_gamma(delta(G))
            assert np.allclose(T[:, 0], 1) and np.allclose(T[:, 1], 0)

    def test_worked_example(self, f38, dinf):
        g = FrequencyGrid.for_group(dinf, 64)
        z = np.exp(1j * g.points()[:, 0])
        T = t_gamma(f38, g)
        assert np.allclose(T[:, 0], 3 / 8) and np.allclose(T[:, 1], z / 8)

    @pytest.mark.parametrize("m", [4, 6])
    def test_unitary_on_finite(self, m, rng):
        from gammariesz.group import finite_dihedral

        G = finite_dihedral(m)
        a = random_signal(G, rng)
        T = t_gamma(a)
        assert np.sum(np.abs(T) ** 2) / m == pytest.approx(a.norm() ** 2, abs=1e-12)

    def test_parseval_on_lattice(self, dinf, rng):
        a = random_signal(dinf, rng, radius=20)
        T = t_gamma(a, FrequencyGrid.for_group(dinf, 1024))
        assert np.mean(np.sum(np.abs(T) ** 2, axis=1)) == pytest.approx(a.norm() ** 2, rel=1e-9)


class TestTransferMatrix:
    def test_delta_gives_identity(self, z6, dinf):
        for G in (z6, dinf):
            F = transfer_matrix(delta(G))
            assert np.allclose(F.values, np.eye(2))

    def test_worked_example_shape(self, f38, dinf):
        F = transfer_matrix(f38, FrequencyGrid.for_group(dinf, 64))
        z = np.exp(1j * F.grid.points()[:, 0])
        expected = np.stack([np.full_like(z, 3 / 8), 1 / (8 * z), z / 8, np.full_like(z, 3 / 8)], axis=1)
        assert np.allclose(F.values.reshape(-1, 4), expected)

    def test_dinf_generic_shape(self, dinf, rng):
        f = random_signal(dinf, rng, radius=3)
        F = transfer_matrix(f, FrequencyGrid.for_group(dinf, 64))
        g = F.grid
        f1 = lambda w: np.array([sum(complex(v) * np.exp(-1j * wi * n[0]) for n, v in f.phase(0).items()) for wi in w])
        fm1 = lambda w: np.array([sum(complex(v) * np.exp(-1j * wi * n[0]) for n, v in f.phase(1).items()) for wi in w])
        G = dinf_transfer_matrix(dinf, f1, fm1, g)
        assert np.allclose(F.values, G.values, atol=1e-12)

    @pytest.mark.parametrize("group_name", ["z4", "dinf", "z5z4"])
    def test_columns_are_translates(self, group_name, rng, request):
        G = z5_by_z4() if group_name == "z5z4" else request.getfixturevalue(group_name)
        f = random_signal(G, rng)
        grid = FrequencyGrid.for_group(G, 32 if not G.is_finite else None)
        F = transfer_matrix(f, grid)
        for l in range(G.kappa):
            shifted = left_translate(GammaElement(G.N.zero(), l), f)
            assert np.allclose(F.column(l), t_gamma(shifted, grid), atol=1e-12)

    @pytest.mark.parametrize("group_name", ["z4", "z6", "z5z4", "dinf"])
    def test_convolution_theorem(self, group_name, rng, request):
        G = z5_by_z4() if group_name == "z5z4" else request.getfixturevalue(group_name)
        grid = FrequencyGrid.for_group(G, 64 if not G.is_finite else None)
        a, f = random_signal(G, rng), random_signal(G, rng)
        B = transfer_matrix(convolve_gamma(a, f), grid).values
        FA = transfer_matrix(f, grid).values @ transfer_matrix(a, grid).values
        assert np.max(np.abs(B - FA)) <= 1e-12 * max(1.0, np.abs(B).max())

    def test_values_read_only(self, f38):
        F = transfer_matrix(f38, FrequencyGrid.for_group(f38.group, 16))
        with pytest.raises(ValueError):
            F.values[0, 0, 0] = 1


class TestApplySpectral:
    @pytest.mark.parametrize("group_name", ["z4", "z6"])
    def test_matches_direct(self, group_name, rng, request):
        G = request.getfixturevalue(group_name)
        a, f = random_signal(G, rng), random_signal(G, rng)
        F = transfer_matrix(f)
        assert apply_spectral(F, a).max_abs_diff(convolve_gamma(a, f)) <= 1e-12
        assert apply_spectral(F, a, adjoint=True).max_abs_diff(analyze_inner(a, f)) <= 1e-12

    def test_identity(self, z4, rng):
        a = random_signal(z4, rng)
        assert apply_spectral(transfer_matrix(delta(z4)), a).max_abs_diff(a) <= 1e-12

    def test_lattice_unsupported(self, f38):
        with pytest.raises(UnsupportedOperationError):
            apply_spectral(transfer_matrix(f38), f38)

    def test_group_mismatch(self, z4, z6):
        with pytest.raises(GroupStructureError):
            apply_spectral(transfer_matrix(delta(z4)), delta(z6))


class TestRieszAnalyze:
    def test_worked_example_bounds(self, f38):
        r = riesz_analyze(transfer_matrix(f38))
        assert r.A_sing == pytest.approx(0.25, abs=1e-12)
        assert r.B_sing == pytest.approx(0.5, abs=1e-12)
        assert r.A_eig == pytest.approx(1 / 16, abs=1e-12)
        assert r.B_eig == pytest.approx(1 / 4, abs=1e-12)
        assert r.det_inf == pytest.approx(1 / 8, abs=1e-12)
        assert r.riesz and r.bessel and not r.onb
        assert r.converged and not r.unresolved and r.estimate

    def test_delta(self, dinf, z4):
        for G in (dinf, z4):
            r = riesz_analyze(transfer_matrix(delta(G)))
            assert r.A_eig == pytest.approx(1) and r.B_eig == pytest.approx(1) and r.onb
            assert r.cstar_norm == pytest.approx(1)

    def test_ideal_filter_pair(self, dinf):
        a = 1.0
        ind = lambda w: (np.abs(w) <= a).astype(float)
        F = dinf_transfer_matrix(dinf, ind, lambda w: 1.0 - ind(w))
        r = riesz_analyze(F)
        assert r.A_eig == pytest.approx(1, abs=1e-12) and r.B_eig == pytest.approx(1, abs=1e-12)
        assert r.onb and onb_check(F)

    def test_singular_system(self, dinf):
        f = GammaSignal(dinf, [{0: 0.5}, {0: 0.5}])
        r = riesz_analyze(transfer_matrix(f))
        assert not r.riesz and r.bessel and r.det_inf == pytest.approx(0, abs=1e-15)

    def test_det_floor_controls_verdict(self, f38):
        F = transfer_matrix(f38)
        assert not riesz_analyze(F, Tolerance(det_floor=0.2)).riesz

    def test_unresolved_is_flagged(self, dinf):
        # a spike narrower than the grid spacing, a third of a cell off the coarse grid:
        # every refinement lands closer to its peak
        h = 2 * np.pi / 1024
        c = -np.pi + 520 * h + h / 3
        spike = lambda w: 1.0 + 100.0 * np.exp(-((w - c) / (h / 4)) ** 2)
        F = dinf_transfer_matrix(dinf, spike, lambda w: 0 * w)
        r = riesz_analyze(F, Tolerance(max_refine=2))
        assert r.unresolved and not r.converged and len(r.history) == 3

    def test_finite_is_exact(self, z4, rng):
        r = riesz_analyze(transfer_matrix(random_signal(z4, rng)))
        assert not r.estimate and r.converged and len(r.history) == 1

    @pytest.mark.parametrize("group_name", ["z4", "z6", "z5z4"])
    def test_bounds_match_dense_svd(self, group_name, rng, request):
        G = z5_by_z4() if group_name == "z5z4" else request.getfixturevalue(group_name)
        for _ in range(10):
            f = random_signal(G, rng)
            r = riesz_analyze(transfer_matrix(f))
            ob = operator_bounds(f)
            assert r.A_eig == pytest.approx(ob["A_eig"], abs=1e-10)
            assert r.B_eig == pytest.approx(ob["B_eig"], abs=1e-10)
            assert cstar_norm(transfer_matrix(f)) == pytest.approx(ob["norm"], abs=1e-10)

    @pytest.mark.parametrize("group_name", ["z4", "z5z4", "dinf"])
    def test_determinant_bracket(self, group_name, rng, request):
        G = z5_by_z4() if group_name == "z5z4" else request.getfixturevalue(group_name)
        for _ in range(10):
            r = riesz_analyze(transfer_matrix(random_signal(G, rng)))
            k = r.kappa
            slack = 1e-9 * max(1.0, r.B_eig) ** k
            assert r.A_eig**k - slack <= r.det_inf**2 <= r.A_eig * r.B_eig ** (k - 1) + slack

    def test_frame_sandwich(self, f38, dinf, rng):
        r = riesz_analyze(transfer_matrix(f38))
        lo, hi = frame_probe(f38, trials=100, seed=3)
        assert r.A_eig - 1e-9 <= lo <= hi <= r.B_eig + 1e-9

    def test_reordering_invariance(self, rng):
        G = z5_by_z4()
        order = [0, 3, 1, 2]
        G2 = G.reordered(order)
        f = random_signal(G, rng)
        f2 = GammaSignal(G2, [f.phase(i) for i in order])
        r, r2 = riesz_analyze(transfer_matrix(f)), riesz_analyze(transfer_matrix(f2))
        for key in ("A_eig", "B_eig", "det_inf"):
            assert getattr(r, key) == pytest.approx(getattr(r2, key), rel=1e-10)
        assert (r.riesz, r.onb) == (r2.riesz, r2.onb)


class TestOnb:
    @pytest.mark.parametrize("k", [-3, 0, 2])
    def test_allpass(self, dinf, k):
        f = GammaSignal(dinf, [{-k: 1}, {}])  # f1_hat(z) = z^k
        F = transfer_matrix(f)
        assert onb_check(F, f) and riesz_analyze(F).onb

    def test_worked_example_not_onb(self, f38):
        assert not onb_check(transfer_matrix(f38), f38)

    def test_allpass_family_agrees_with_unitarity(self, dinf, rng):
        for _ in range(20):
            theta, phi = rng.uniform(0, 2 * np.pi, 2)
            alpha, beta = np.cos(theta), np.sin(theta) * np.exp(1j * phi)
            k, m = (int(x) for x in rng.integers(-3, 4, 2))
            f = GammaSignal(dinf, [{-k: alpha}, {-m: beta}])
            F = transfer_matrix(f)
            unitary = np.allclose(F.gram(), np.eye(2), atol=1e-9)
            assert onb_check(F, f) == unitary == riesz_analyze(F).onb
        # purely imaginary cross term is orthonormal
        f = GammaSignal(dinf, [{0: 0.6}, {1: 0.8j}])
        assert onb_check(transfer_matrix(f), f)


class TestClosedForm:
    def test_worked_example(self, f38):
        A, B = dinf_closed_bounds(f38)
        assert (A, B) == (pytest.approx(1 / 16), pytest.approx(1 / 4))

    def test_allpass(self, dinf):
        assert dinf_closed_bounds(GammaSignal(dinf, [{2: 1}, {}])) == (pytest.approx(1), pytest.approx(1))

    def test_agrees_with_eigenvalues(self, dinf, rng):
        for _ in range(5):
            f = random_signal(dinf, rng, complex_values=False)
            grid = FrequencyGrid.for_group(dinf, 4096)
            r = riesz_analyze(transfer_matrix(f, grid), Tolerance(max_refine=0))
            A, B = dinf_closed_bounds(f, grid)
            assert A == pytest.approx(r.A_eig, abs=1e-9 * B) and B == pytest.approx(r.B_eig, rel=1e-12)

    def test_requires_real(self, dinf):
        with pytest.raises(UnsupportedOperationError):
            dinf_closed_bounds(GammaSignal(dinf, [{0: 1j}, {}]))

    def test_requires_dinf(self, z4):
        with pytest.raises(UnsupportedOperationError):
            dinf_closed_bounds(delta(z4))


def test_cstar_norm_worked_example(f38):
    assert cstar_norm(transfer_matrix(f38)) == pytest.approx(0.5, abs=1e-12)
