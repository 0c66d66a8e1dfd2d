"""Dual Riesz generators, inverse filters and biorthogonality checks.

The dual generator ``g`` solves ``F^*(xi) T_Gamma g(xi) = e_1`` pointwise, so
its transfer matrix is ``(F^*)^-1``.  Over a lattice two routes exist: an exact
one through Laurent-polynomial adjugates (only when ``det F`` is a monomial, so
that the dual is finitely supported) and a grid route through the inverse FFT.
"""

from __future__ import annotations

import itertools
import logging
import numbers
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NonMonomialDeterminantError, NotRieszBasisError, UnsupportedOperationError
from .group import GammaElement
from .linalg import lu_solve_det
from .signal import GammaSignal, analyze_inner, block, convolve_gamma, convolve_n, delta, involution
from .spectral import (
    FrequencyGrid,
    Tolerance,
    _is_real_signal,
    inverse_fourier,
    lattice_coefficients,
    transfer_matrix,
)

logger = logging.getLogger(__name__)

__all__ = [
    "DualResult",
    "BiorthogonalityResult",
    "dual_generator",
    "dual_exact_laurent",
    "laurent_det",
    "inverse_filter",
    "biorthogonality_check",
]


@dataclass
class DualResult:
    """Dual generator plus diagnostics of how it was obtained."""

    signal: GammaSignal
    exact: bool
    spectral: np.ndarray | None = None
    grid: FrequencyGrid | None = None
    min_abs_det: float | None = None
    worst_point: list | None = None
    tail_energy: float = 0.0
    edge_energy: float = 0.0
    dropped_terms: int = 0
    determinant: dict | None = None

    def summary(self) -> dict:
        return {
            "exact": self.exact,
            "min_abs_det": self.min_abs_det,
            "worst_point": self.worst_point,
            "tail_energy": self.tail_energy,
            "edge_energy": self.edge_energy,
            "dropped_terms": self.dropped_terms,
            "grid": self.grid.describe() if self.grid is not None else None,
        }


def _solve_dual_system(F_values, tol: Tolerance, points):
    P, k, _ = F_values.shape
    Fh = np.conj(np.swapaxes(F_values, -1, -2))
    e1 = np.zeros((P, k), dtype=complex)
    e1[:, 0] = 1.0
    x, dets = lu_solve_det(Fh, e1)
    absdet = np.abs(dets)
    i = int(np.argmin(absdet))
    if not absdet[i] > tol.det_floor or not np.all(np.isfinite(x)):
        raise NotRieszBasisError(
            f"F^*(xi) is singular or ill-conditioned at xi={points[i].tolist()} (|det|={absdet[i]:.3g})",
            worst_point=points[i].tolist(),
            worst_det=float(absdet[i]),
        )
    return x, float(absdet[i]), points[i].tolist()


def dual_generator(f: GammaSignal, grid: FrequencyGrid | None = None, tol: Tolerance | None = None,
                   prune: float = 1e-12) -> DualResult:
    """Spectral dual generator of ``{L_gamma f}``.

    Over a finite N the inverse transform is exact.  Over a lattice the
    coefficients come from the inverse FFT on ``grid``; values below
    ``prune * max|g|`` are dropped and their energy is reported as
    ``tail_energy``.  ``edge_energy`` is the retained energy with some
    coordinate beyond a quarter of the grid, a warning sign for aliasing.
    """
    tol = tol or Tolerance()
    G = f.group
    grid = grid or FrequencyGrid.for_group(G)
    F = transfer_matrix(f, grid)
    points = grid.points()
    x, min_det, worst = _solve_dual_system(F.values, tol, points)
    if G.is_finite:
        g = GammaSignal(G, [inverse_fourier(x[:, h], grid) for h in range(G.kappa)])
        return DualResult(g, exact=False, spectral=x, grid=grid, min_abs_det=min_det, worst_point=worst)

    real = _is_real_signal(f)
    phases = [lattice_coefficients(x[:, h], grid) for h in range(G.kappa)]
    peak = max((abs(v) for ph in phases for v in ph.values()), default=0.0)
    cut = prune * peak
    quarter = grid.size // 4
    tail = edge = 0.0
    dropped = 0
    kept = []
    for ph in phases:
        d = {}
        for n, v in ph.items():
            if abs(v) < cut:
                tail += abs(v) ** 2
                dropped += 1
                continue
            if max(abs(i) for i in n) > quarter:
                edge += abs(v) ** 2
            d[n] = float(v.real) if real else complex(v)
        kept.append(d)
    if edge > 0:
        logger.warning("dual coefficients reach past a quarter of the grid (energy %.3g); refine the grid", edge)
    return DualResult(
        GammaSignal(G, kept), exact=False, spectral=x, grid=grid, min_abs_det=min_det, worst_point=worst,
        tail_energy=float(tail), edge_energy=float(edge), dropped_terms=dropped,
    )


# -- exact Laurent route ---------------------------------------------------
# Laurent polynomials are handled in sequence form: {n: c} stands for
# sum_n c z^{-n}; products are N-convolutions.


def _lp_add(a, b, sign=1):
    out = dict(a)
    for n, v in b.items():
        out[n] = out.get(n, 0) + sign * v
    return {n: v for n, v in out.items() if v != 0}


def _tilde(a):
    return {tuple(-i for i in n): v.conjugate() for n, v in a.items()}


def _adjoint_entries(f: GammaSignal):
    """Sequence form of ``F^*``: entry (h, l) is ``tilde(f_{l,h})``."""
    k = f.group.kappa
    return [[_tilde(block(f, l, h)) for l in range(k)] for h in range(k)]


def _minor_det(M, rows: tuple, cols: tuple, cache):
    key = (rows, cols)
    if key in cache:
        return cache[key]
    if len(rows) == 1:
        out = dict(M[rows[0]][cols[0]])
    else:
        r0, rest = rows[0], rows[1:]
        out = {}
        for j, c in enumerate(cols):
            entry = M[r0][c]
            if not entry:
                continue
            sub = _minor_det(M, rest, cols[:j] + cols[j + 1 :], cache)
            if sub:
                out = _lp_add(out, convolve_n(entry, sub), -1 if j % 2 else 1)
    cache[key] = out
    return out


def laurent_det(f: GammaSignal) -> dict:
    """``det F`` as a Laurent polynomial in sequence form (lattice, finitely supported f)."""
    if f.group.is_finite:
        raise UnsupportedOperationError("Laurent determinant needs a lattice N")
    k = f.group.kappa
    M = [[block(f, h, l) for l in range(k)] for h in range(k)]
    return _minor_det(M, tuple(range(k)), tuple(range(k)), {})


def _div(v, c):
    if isinstance(v, numbers.Rational) and isinstance(c, numbers.Rational):
        return Fraction(v) / c
    return v / c


def dual_exact_laurent(f: GammaSignal) -> DualResult:
    """Finitely supported dual via the adjugate of ``F^*`` divided by its monomial determinant.

    Coefficients stay exact (Fractions in, Fractions out).  Raises
    :class:`NonMonomialDeterminantError` when ``det F^*`` has more than one
    nonzero term, in which case the dual is not finitely supported.
    """
    G = f.group
    if G.is_finite:
        raise UnsupportedOperationError("the Laurent route applies to lattice groups")
    k = G.kappa
    M = _adjoint_entries(f)
    cache = {}
    rows, cols = tuple(range(k)), tuple(range(k))
    det = _minor_det(M, rows, cols, cache)
    if len(det) != 1:
        raise NonMonomialDeterminantError(f"det F^* has {len(det)} nonzero terms; the dual is not finitely supported")
    (shift, coef), = det.items()
    phases = []
    for h in range(k):
        # x_h = C_{0,h} / det, cofactor of row 0 / column h
        if k == 1:
            cof = {(0,) * G.N.rank: 1}
        else:
            cof = _minor_det(M, rows[1:], cols[:h] + cols[h + 1 :], cache)
        sign = -1 if h % 2 else 1
        phases.append({tuple(a - b for a, b in zip(n, shift)): _div(sign * v, coef) for n, v in cof.items()})
    g = GammaSignal(G, phases)
    return DualResult(g, exact=True, determinant=dict(det))


def inverse_filter(f: GammaSignal, dual: GammaSignal | None = None, atol: float = 1e-9,
                   **kwargs) -> GammaSignal:
    """The unique ``h`` with ``f * h = delta``, namely ``h = g*`` for the dual generator g."""
    if dual is None:
        dual = _best_dual(f, **kwargs).signal
    h = involution(dual)
    check = convolve_gamma(f, h) - delta(f.group)
    err = check.max_abs_diff(GammaSignal.zeros(f.group))
    exact = f.is_exact and h.is_exact
    if (exact and err != 0) or err > atol:
        raise NotRieszBasisError(f"f * h deviates from delta by {err:.3g}")
    return h


def _best_dual(f: GammaSignal, grid=None, tol=None) -> DualResult:
    if not f.group.is_finite:
        try:
            return dual_exact_laurent(f)
        except NonMonomialDeterminantError:
            pass
    return dual_generator(f, grid, tol)


@dataclass
class BiorthogonalityResult:
    passed: bool
    max_error: float
    worst: GammaElement | None
    checked: int
    errors: dict = field(default_factory=dict, repr=False)

    def __bool__(self):
        return self.passed


def biorthogonality_check(f: GammaSignal, g: GammaSignal, window: int = 8, atol: float = 1e-9) -> BiorthogonalityResult:
    """Check ``<g, L_gamma f> = delta(gamma)`` on every gamma (finite N) or on ``|n|_inf <= window``."""
    G = f.group
    c = analyze_inner(g, f)
    if G.is_finite:
        sample = G.elements()
    else:
        rng = range(-window, window + 1)
        sample = [GammaElement(n, h) for h in range(G.kappa) for n in itertools.product(rng, repeat=G.N.rank)]
    ident = G.identity
    worst, max_err = None, -1.0
    for gam in sample:
        target = 1 if gam == ident else 0
        err = abs(complex(c[gam] - target))
        if err > max_err:
            worst, max_err = gam, err
    exact = f.is_exact and g.is_exact
    passed = max_err == 0 if exact else max_err <= atol
    return BiorthogonalityResult(bool(passed), float(max_err), worst if max_err > 0 else None, len(sample))
