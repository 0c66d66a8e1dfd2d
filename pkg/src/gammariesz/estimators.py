"""Estimator-style front ends (``fit`` / ``transform`` / ``get_params``).

``RieszAnalyzer`` is fitted on a generator f and then maps coefficients to
analysis samples ``<a, L_gamma f>`` and back through the dual generator.
The two samplers are fitted on a function-space generator phi and map
functions in its span to samples and samples back to functions.
"""

from __future__ import annotations

from fractions import Fraction

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .dual import DualResult, dual_exact_laurent, dual_generator
from .exceptions import NonMonomialDeterminantError, NotRieszBasisError
from .sampling import (
    CrystalGroupSpec,
    GeneratorFn,
    OrbitExpansion,
    average_sample_signal,
    dinf_crystal,
    pointwise_sample_signal,
    sample_function,
)
from .signal import GammaSignal, analyze_inner, convolve_gamma, involution
from .spectral import AnalysisReport, FrequencyGrid, TransferMatrix, riesz_analyze, transfer_matrix
from .validation import check_grid_size, check_signal, check_tolerance

__all__ = ["RieszAnalyzer", "PointwiseSampler", "AverageSampler"]


class RieszAnalyzer(BaseEstimator):
    """Riesz-basis analysis of the system ``{L_gamma f}``.

    Parameters
    ----------
    grid_size : int, optional
        Starting frequency-grid size per dimension (lattice N); power of two.
    max_refine : int
        Maximum number of grid doublings.
    det_floor : float
        ``ess inf |det F|`` must exceed this for a Riesz verdict.
    atol, rtol : float
        Unitarity tolerance and refinement stopping tolerance.
    exact : {'auto', True, False}
        Use the exact Laurent dual when available (``True`` makes it mandatory).

    Attributes
    ----------
    F_ : TransferMatrix
    report_ : AnalysisReport
    dual_ : DualResult or None
        ``None`` when the system is not a Riesz basis.
    """

    def __init__(self, grid_size=None, max_refine=6, det_floor=1e-10, atol=1e-9, rtol=1e-9, exact="auto"):
        self.grid_size = grid_size
        self.max_refine = max_refine
        self.det_floor = det_floor
        self.atol = atol
        self.rtol = rtol
        self.exact = exact

    def _tol(self):
        return check_tolerance(self.det_floor, self.atol, self.rtol, self.max_refine)

    def fit(self, f, y=None):
        check_signal(f, name="f")
        tol = self._tol()
        grid = FrequencyGrid.for_group(f.group, check_grid_size(self.grid_size))
        self.generator_ = f
        self.F_: TransferMatrix = transfer_matrix(f, grid)
        self.report_: AnalysisReport = riesz_analyze(self.F_, tol)
        self.dual_: DualResult | None = None
        if not self.report_.riesz:
            if self.exact is True:
                raise NotRieszBasisError("exact dual requested but the system is not a Riesz basis")
            return self
        if not f.group.is_finite and self.exact in ("auto", True):
            try:
                self.dual_ = dual_exact_laurent(f)
            except NonMonomialDeterminantError:
                if self.exact is True:
                    raise
        if self.dual_ is None:
            self.dual_ = dual_generator(f, grid, tol)
        return self

    def transform(self, a: GammaSignal) -> GammaSignal:
        """Analysis samples ``gamma -> <a, L_gamma f>``."""
        check_is_fitted(self, "report_")
        check_signal(a, self.generator_.group, name="a")
        return analyze_inner(a, self.generator_)

    def inverse_transform(self, c: GammaSignal) -> GammaSignal:
        """``sum_gamma c(gamma) L_gamma g`` with the dual generator g.

        Inverts :meth:`transform`: ``x = sum_gamma <x, L_gamma f> L_gamma g``.
        """
        check_is_fitted(self, "report_")
        if self.dual_ is None:
            raise NotRieszBasisError("no dual generator: the fitted system is not a Riesz basis")
        check_signal(c, self.generator_.group, name="c")
        return convolve_gamma(c, self.dual_.signal)

    def synthesize(self, a: GammaSignal) -> GammaSignal:
        """``a * f = sum_gamma a(gamma) L_gamma f``."""
        check_is_fitted(self, "report_")
        return convolve_gamma(check_signal(a, self.generator_.group, name="a"), self.generator_)


class _SamplerBase(BaseEstimator):
    def _crystal(self) -> CrystalGroupSpec:
        return dinf_crystal() if self.crystal is None else self.crystal

    @staticmethod
    def _check_phi(phi) -> GeneratorFn:
        if not isinstance(phi, GeneratorFn):
            raise TypeError(f"phi must be a GeneratorFn, got {type(phi).__name__}")
        return phi

    def _finish_fit(self, phi: GeneratorFn, signal: GammaSignal):
        self.crystal_ = self._crystal()
        self.phi_ = phi
        self.sample_signal_ = signal
        self.analyzer_ = RieszAnalyzer(
            grid_size=self.grid_size, max_refine=self.max_refine, det_floor=self.det_floor, exact=self.exact
        ).fit(signal)
        self.report_ = self.analyzer_.report_
        if self.analyzer_.dual_ is None:
            raise NotRieszBasisError(
                f"the sampling system is not stable (ess inf |det F| ~ {self.report_.det_inf:.3g})"
            )
        self.dual_ = self.analyzer_.dual_.signal
        self.interpolator_ = OrbitExpansion(self.crystal_, phi, self.dual_)
        return self

    def inverse_transform(self, samples: GammaSignal) -> OrbitExpansion:
        """The reconstructed function ``sum_gamma samples(gamma) U(gamma) Phi`` (evaluated lazily)."""
        check_is_fitted(self, "interpolator_")
        check_signal(samples, self.crystal_.group, name="samples")
        return OrbitExpansion(self.crystal_, self.interpolator_, samples)

    def coefficients(self, samples: GammaSignal) -> GammaSignal:
        """Expansion coefficients of the sampled function in the orbit ``{U(gamma) phi}``."""
        check_is_fitted(self, "dual_")
        return convolve_gamma(check_signal(samples, self.crystal_.group, name="samples"), self.dual_)

    def expand(self, a: GammaSignal) -> OrbitExpansion:
        """``sum_gamma a(gamma) U(gamma) phi``."""
        check_is_fitted(self, "phi_")
        return OrbitExpansion(self.crystal_, self.phi_, a)


class PointwiseSampler(_SamplerBase):
    """Sampling at the orbit of a point ``p``: ``f -> {f(A p + n)}``."""

    def __init__(self, crystal=None, p=Fraction(1, 4), grid_size=None, max_refine=6, det_floor=1e-10, exact="auto"):
        self.crystal = crystal
        self.p = p
        self.grid_size = grid_size
        self.max_refine = max_refine
        self.det_floor = det_floor
        self.exact = exact

    def fit(self, phi: GeneratorFn, y=None):
        self._check_phi(phi)
        crystal = self._crystal()
        return self._finish_fit(phi, pointwise_sample_signal(crystal, phi, self.p))

    def transform(self, f: GeneratorFn) -> GammaSignal:
        check_is_fitted(self, "interpolator_")
        return sample_function(self.crystal_, f, self.p)


class AverageSampler(_SamplerBase):
    """Average samples ``f -> {<f, U(gamma) psi>}`` against a compactly supported ``psi``."""

    def __init__(self, crystal=None, psi=None, method="auto", order=16, grid_size=None, max_refine=6,
                 det_floor=1e-10, exact="auto"):
        self.crystal = crystal
        self.psi = psi
        self.method = method
        self.order = order
        self.grid_size = grid_size
        self.max_refine = max_refine
        self.det_floor = det_floor
        self.exact = exact

    def fit(self, phi: GeneratorFn, y=None):
        if self.psi is None:
            raise ValueError("AverageSampler needs an averaging function psi")
        self._check_phi(phi)
        crystal = self._crystal()
        sig = average_sample_signal(crystal, phi, self.psi, self.method, self.order)
        return self._finish_fit(phi, sig)

    def transform(self, f: GeneratorFn) -> GammaSignal:
        check_is_fitted(self, "interpolator_")
        # <f, U(gamma) psi> = conj <f, U(eta^-1) psi> at eta = gamma^-1
        return involution(average_sample_signal(self.crystal_, f, self.psi, self.method, self.order))
