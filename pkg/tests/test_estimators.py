from fractions import Fraction

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gammariesz.estimators import AverageSampler, PointwiseSampler, RieszAnalyzer
from gammariesz.exceptions import NotRieszBasisError
from gammariesz.oracles import random_signal
from gammariesz.sampling import OrbitExpansion, PiecewisePolynomial, dinf_crystal, spline_generator
from gammariesz.signal import GammaSignal, analyze_inner, convolve_gamma


class TestRieszAnalyzer:
    def test_params_and_clone(self):
        est = RieszAnalyzer(grid_size=256, max_refine=2)
        assert est.get_params()["grid_size"] == 256
        assert clone(est).get_params() == est.get_params()
        est.set_params(det_floor=1e-6)
        assert est.det_floor == 1e-6

    def test_not_fitted(self, f38):
        with pytest.raises(NotFittedError):
            RieszAnalyzer().transform(f38)

    def test_worked_example(self, f38, dinf):
        est = RieszAnalyzer().fit(f38)
        assert est.dual_.exact and est.dual_.signal == GammaSignal(dinf, [{0: 3}, {-1: -1}])
        assert est.report_.A_sing == pytest.approx(0.25) and est.report_.B_sing == pytest.approx(0.5)

    def test_round_trips(self, z6, rng):
        f = random_signal(z6, rng)
        est = RieszAnalyzer().fit(f)
        a = random_signal(z6, rng)
        # x = sum <x, L_gamma f> L_gamma g, and <a * g, L_gamma f> = a (biorthogonality)
        assert est.inverse_transform(est.transform(a)).max_abs_diff(a) <= 1e-10
        assert est.transform(est.inverse_transform(a)).max_abs_diff(a) <= 1e-10
        # coefficients of a synthesized signal come back by analysis against the dual
        assert analyze_inner(est.synthesize(a), est.dual_.signal).max_abs_diff(a) <= 1e-10
        assert est.transform(a).max_abs_diff(analyze_inner(a, f)) == 0

    def test_not_riesz(self, dinf):
        est = RieszAnalyzer().fit(GammaSignal(dinf, [{0: 0.5}, {0: 0.5}]))
        assert est.dual_ is None
        with pytest.raises(NotRieszBasisError):
            est.inverse_transform(GammaSignal(dinf, [{0: 1}, {}]))
        with pytest.raises(NotRieszBasisError):
            RieszAnalyzer(exact=True).fit(GammaSignal(dinf, [{0: 0.5}, {0: 0.5}]))

    def test_group_mismatch(self, f38, z4):
        from gammariesz.exceptions import GroupStructureError

        with pytest.raises(GroupStructureError):
            RieszAnalyzer().fit(f38).transform(random_signal(z4))


class TestPointwiseSampler:
    def test_round_trip(self, rng):
        crystal = dinf_crystal()
        phi = spline_generator()
        est = PointwiseSampler().fit(phi)
        assert est.dual_.is_exact
        a = GammaSignal(crystal.group, [{n: rng.standard_normal() for n in range(-3, 4)} for _ in range(2)])
        f = OrbitExpansion(crystal, phi, a)
        samples = est.transform(f)
        t = np.linspace(-3, 3, 301)
        assert np.max(np.abs(est.inverse_transform(samples)(t) - f(t))) <= 1e-10
        assert est.coefficients(samples).max_abs_diff(a) <= 1e-10
        assert np.allclose(est.expand(a)(t), f(t))

    def test_infeasible(self):
        sym = PiecewisePolynomial([(0, 2, [0, 2, -1])], continuous=True)
        with pytest.raises(NotRieszBasisError):
            PointwiseSampler().fit(sym)

    def test_rejects_non_generator(self):
        with pytest.raises(TypeError):
            PointwiseSampler().fit(lambda t: t)


class TestAverageSampler:
    def test_needs_psi(self):
        with pytest.raises(ValueError):
            AverageSampler().fit(spline_generator())

    def test_round_trip(self, rng):
        crystal = dinf_crystal()
        phi = spline_generator()
        psi = PiecewisePolynomial([(0, Fraction(1, 2), [1])])
        est = AverageSampler(psi=psi, grid_size=1024).fit(phi)
        a = GammaSignal(crystal.group, [{n: rng.standard_normal() for n in range(-2, 3)} for _ in range(2)])
        f = OrbitExpansion(crystal, phi, a)
        samples = est.transform(f)
        # direct check of one sample: <f, U(gamma) psi> at gamma = (1, -1) is the integral of f over [1/2, 1]
        x, w = np.polynomial.legendre.leggauss(20)
        knots = [0.5, 0.75, 1.0]
        ref = sum(((b - a) / 2 * w * f((b - a) / 2 * x + (a + b) / 2)).sum() for a, b in zip(knots, knots[1:]))
        gam = crystal.group.element((1,), -1)
        assert complex(samples[gam]) == pytest.approx(ref, abs=1e-12)
        t = np.linspace(-3, 3, 301)
        assert np.max(np.abs(est.inverse_transform(samples)(t) - f(t))) <= 1e-8
        assert est.coefficients(samples).max_abs_diff(a) <= 1e-8
