"""Sampling and reconstruction in spaces spanned by a crystallographic orbit ``{U(gamma) phi}``.

The crystallographic group ``M Z^d x H`` (H a finite subgroup of O(d) preserving
the lattice) acts on functions of R^d by the quasi-regular representation
``U(n, A) f(t) = f(A^T (t - n))``.  Internally the lattice is always ``Z^d``:
a lattice point ``k`` stands for the translation ``M k``.
"""

from __future__ import annotations

import itertools
import math
import numbers
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .exceptions import (
    FormatError,
    GroupStructureError,
    InfeasibleSamplingError,
    NonMonomialDeterminantError,
    QuadratureOrderError,
    UnsupportedOperationError,
)
from .group import AbelianGroupSpec, ActionSpec, FiniteGroupTable, GammaElement, SemidirectGroup
from .signal import GammaSignal, analyze_inner, convolve_gamma
from .spectral import FrequencyGrid, Tolerance, dinf_closed_bounds, riesz_analyze, transfer_matrix
from .dual import DualResult, dual_exact_laurent, dual_generator, laurent_det

__all__ = [
    "CrystalGroupSpec",
    "GeneratorFn",
    "PiecewisePolynomial",
    "TabulatedFunction",
    "FunctionGenerator",
    "OrbitExpansion",
    "SplineSamplingCase",
    "dinf_crystal",
    "spline_generator",
    "quasi_regular_apply",
    "pointwise_sample_signal",
    "average_sample_signal",
    "sample_function",
    "rkhs_bound",
    "orbit_term_count",
    "build_interpolator",
    "reconstruct",
    "coefficients_from_samples",
    "dinf_spline_case",
]


def _num(x):
    """Keep integral values as ints so exact arithmetic survives."""
    if isinstance(x, numbers.Rational):
        return x
    xf = float(x)
    return int(round(xf)) if xf == round(xf) else xf


def _matvec(A, x):
    return tuple(sum(a * xi for a, xi in zip(row, x)) for row in A)


def _tmatvec(A, x):
    d = len(A)
    return tuple(sum(A[i][j] * x[i] for i in range(d)) for j in range(d))


class CrystalGroupSpec:
    """Crystallographic group ``M Z^d x H`` with its internal ``Z^d x H`` handle.

    Parameters
    ----------
    lattice : (d, d) array_like
        Nonsingular matrix M whose columns generate the lattice.
    point_group : sequence of (d, d) array_like
        The orthogonal matrices of H; must be closed under products and
        contain the identity.  The identity is moved to the front.
    labels : sequence, optional
        Labels for the elements of H in the order given.
    """

    def __init__(self, lattice, point_group, labels=None, atol: float = 1e-12):
        M = np.atleast_2d(np.asarray(lattice, dtype=float))
        d = M.shape[0]
        if M.shape != (d, d) or abs(np.linalg.det(M)) < atol:
            raise GroupStructureError("lattice matrix must be square and nonsingular")
        mats = [np.atleast_2d(np.asarray(A, dtype=float)) for A in point_group]
        if not mats:
            raise GroupStructureError("point group must contain at least the identity")
        for i, A in enumerate(mats):
            if A.shape != (d, d) or not np.allclose(A.T @ A, np.eye(d), atol=atol):
                raise GroupStructureError(f"point-group element {i} is not an orthogonal {d}x{d} matrix")
        labels = list(range(len(mats))) if labels is None else list(labels)
        ident = [i for i, A in enumerate(mats) if np.allclose(A, np.eye(d), atol=atol)]
        if len(ident) != 1:
            raise GroupStructureError("point group must contain the identity exactly once")
        order = ident + [i for i in range(len(mats)) if i != ident[0]]
        mats = [mats[i] for i in order]
        labels = [labels[i] for i in order]

        def find(B):
            for j, A in enumerate(mats):
                if np.allclose(A, B, atol=1e-9):
                    return j
            raise GroupStructureError("point group is not closed under multiplication")

        table = [[find(A @ B) for B in mats] for A in mats]
        Minv = np.linalg.inv(M)
        sigma = []
        for i, A in enumerate(mats):
            S = Minv @ A @ M
            Si = np.round(S)
            if not np.allclose(S, Si, atol=1e-9):
                raise GroupStructureError(f"point-group element {labels[i]} does not preserve the lattice")
            if abs(round(np.linalg.det(Si))) != 1:
                raise GroupStructureError(f"M^-1 A M is not unimodular for element {labels[i]}")
            sigma.append(Si.astype(np.int64))
        self.dim = d
        self.lattice = tuple(tuple(_num(x) for x in row) for row in M)
        self.matrices = tuple(tuple(tuple(_num(x) for x in row) for row in A) for A in mats)
        self.group = SemidirectGroup(
            AbelianGroupSpec.lattice(d), FiniteGroupTable(table, labels), ActionSpec(tuple(sigma)), "crystal"
        )
        self._Minv = Minv

    @property
    def kappa(self) -> int:
        return self.group.kappa

    def translation(self, k) -> tuple:
        return _matvec(self.lattice, k)

    def act_point(self, gamma, x) -> tuple:
        """``gamma . x = A x + M k``."""
        k, h = gamma
        return tuple(a + b for a, b in zip(_matvec(self.matrices[h], x), self.translation(k)))

    def inverse_act_point(self, gamma, t) -> tuple:
        """``gamma^-1 . t = A^T (t - M k)``."""
        k, h = gamma
        shift = self.translation(k)
        return _tmatvec(self.matrices[h], tuple(a - b for a, b in zip(t, shift)))

    def inverse_act_array(self, gamma, T: np.ndarray) -> np.ndarray:
        """Vectorised ``gamma^-1 . t`` for points ``T`` of shape ``(P, d)``."""
        k, h = gamma
        A = np.array(self.matrices[h], dtype=float)
        shift = np.array(self.translation(k), dtype=float)
        return (T - shift) @ A

    def lattice_points_in_box(self, lo, hi) -> list:
        """All ``k`` in Z^d with ``M k`` in the closed box ``[lo, hi]`` (candidates, superset)."""
        corners = np.array(list(itertools.product(*zip(lo, hi))), dtype=float)
        ks = corners @ self._Minv.T
        kmin = np.floor(ks.min(axis=0) - 1e-9).astype(int)
        kmax = np.ceil(ks.max(axis=0) + 1e-9).astype(int)
        return list(itertools.product(*(range(a, b + 1) for a, b in zip(kmin, kmax))))

    def _image_box(self, h, lo, hi):
        """Bounding box of ``A_h [lo, hi]``."""
        corners = [_matvec(self.matrices[h], c) for c in itertools.product(*zip(lo, hi))]
        return tuple(min(c[i] for c in corners) for i in range(self.dim)), tuple(
            max(c[i] for c in corners) for i in range(self.dim)
        )

    def elements_moving_into(self, t_lo, t_hi, box_lo, box_hi) -> list:
        """Elements gamma such that ``gamma^-1 . t`` can land in ``[box_lo, box_hi]`` for t in ``[t_lo, t_hi]``."""
        out = []
        for h in range(self.kappa):
            alo, ahi = self._image_box(h, box_lo, box_hi)
            lo = tuple(a - b for a, b in zip(t_lo, ahi))
            hi = tuple(a - b for a, b in zip(t_hi, alo))
            out.extend(GammaElement(tuple(int(i) for i in k), h) for k in self.lattice_points_in_box(lo, hi))
        return out

    def __repr__(self):
        return f"CrystalGroupSpec(d={self.dim}, kappa={self.kappa})"


def dinf_crystal() -> CrystalGroupSpec:
    """D_inf as the crystallographic group ``Z x {1, -1}``."""
    return CrystalGroupSpec([[1]], [[[1]], [[-1]]], labels=[1, -1])


# -- polynomial helpers (ascending coefficient tuples) ----------------------


def _poly_eval(c, t):
    acc = 0 * t if isinstance(t, np.ndarray) else 0
    for a in reversed(c):
        acc = acc * t + a
    return acc


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_compose_affine(c, alpha, beta):
    """Coefficients of ``t -> p(alpha t + beta)``."""
    out = [0]
    for a in reversed(c):
        out = _poly_mul(out, [beta, alpha])
        out[0] += a
    return out


def _poly_integral(c, lo, hi):
    total = 0
    for i, a in enumerate(c):
        if isinstance(a, numbers.Rational) and isinstance(lo, numbers.Rational) and isinstance(hi, numbers.Rational):
            total += Fraction(a) * (Fraction(hi) ** (i + 1) - Fraction(lo) ** (i + 1)) / (i + 1)
        else:
            total += a * (hi ** (i + 1) - lo ** (i + 1)) / (i + 1)
    return total


def _degree(c) -> int:
    nz = [i for i, a in enumerate(c) if a != 0]
    return max(nz) if nz else 0


# -- generator functions ----------------------------------------------------


class GeneratorFn:
    """A function on R^d with a compact support box; zero outside it."""

    dim: int = 1
    lower: tuple = ()
    upper: tuple = ()
    degree: int | None = None

    def __call__(self, t):
        raise NotImplementedError

    def support_box(self):
        return self.lower, self.upper

    def _outside(self, T):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        return np.any((T < lo) | (T > hi), axis=-1)


class PiecewisePolynomial(GeneratorFn):
    """A 1-D piecewise polynomial.

    ``pieces`` is a list of ``(a, b, coefficients)`` with ascending powers of t;
    intervals are closed, sorted and may only touch at endpoints.  Scalar
    Fraction input with Fraction coefficients evaluates exactly.
    """

    def __init__(self, pieces, continuous: bool = False):
        norm = []
        for a, b, coeffs in sorted(pieces, key=lambda p: p[0]):
            if not a < b:
                raise FormatError(f"empty interval [{a}, {b}]")
            norm.append((_num(a) if not isinstance(a, numbers.Rational) else a,
                         _num(b) if not isinstance(b, numbers.Rational) else b,
                         tuple(coeffs)))
        for (a0, b0, _), (a1, b1, _) in zip(norm, norm[1:]):
            if a1 < b0:
                raise FormatError(f"intervals [{a0}, {b0}] and [{a1}, {b1}] overlap")
        if not norm:
            raise FormatError("piecewise polynomial needs at least one piece")
        self.pieces = tuple(norm)
        self.continuous = continuous
        self.dim = 1
        self.lower = (norm[0][0],)
        self.upper = (norm[-1][1],)
        self.degree = max(_degree(c) for _, _, c in norm)
        if continuous:
            self._check_continuity()

    def _check_continuity(self, atol=1e-12):
        knots = sorted({p[0] for p in self.pieces} | {p[1] for p in self.pieces})
        for x in knots:
            left = [_poly_eval(c, x) for a, b, c in self.pieces if a < x <= b]
            right = [_poly_eval(c, x) for a, b, c in self.pieces if a <= x < b]
            lv = left[0] if left else 0
            rv = right[0] if right else 0
            if abs(lv - rv) > atol:
                raise FormatError(f"piecewise polynomial declared continuous jumps at t={x}")

    def __call__(self, t):
        if isinstance(t, (tuple, list)) and len(t) == 1:
            t = t[0]
        if not isinstance(t, np.ndarray):
            for a, b, c in self.pieces:
                if a <= t <= b:
                    return _poly_eval(c, t)
            return 0
        t = np.asarray(t, dtype=float)
        squeeze = t.ndim >= 1 and t.shape[-1:] == (1,) and t.ndim == 2
        if squeeze:
            t = t[:, 0]
        out = np.zeros_like(t, dtype=float if all(isinstance(x, numbers.Real) for p in self.pieces for x in p[2]) else complex)
        done = np.zeros(t.shape, dtype=bool)
        for a, b, c in self.pieces:
            m = (t >= float(a)) & (t <= float(b)) & ~done
            if np.any(m):
                out[m] = _poly_eval(tuple(complex(x) if isinstance(x, complex) else float(x) for x in c), t[m])
                done |= m
        return out

    def to_dict(self) -> dict:
        return {
            "pieces": [{"interval": [a, b], "coefficients": list(c)} for a, b, c in self.pieces],
            "continuous": self.continuous,
        }

    @classmethod
    def from_factors(cls, a, b, *factors, continuous=False):
        """Single piece on ``[a, b]`` given as a product of polynomials."""
        poly = [1]
        for f in factors:
            poly = _poly_mul(poly, list(f))
        return cls([(a, b, poly)], continuous=continuous)


class TabulatedFunction(GeneratorFn):
    """A 1-D function given by samples: ``linear`` interpolation or ``step`` (constant on ``[x_i, x_{i+1})``)."""

    def __init__(self, x, y, kind: str = "linear"):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y)
        if x.ndim != 1 or len(x) < 2 or np.any(np.diff(x) <= 0):
            raise FormatError("tabulation nodes must be strictly increasing with at least two points")
        if kind == "linear" and len(y) != len(x):
            raise FormatError("linear tabulation needs one value per node")
        if kind == "step" and len(y) not in (len(x) - 1, len(x)):
            raise FormatError("step tabulation needs one value per cell")
        if kind not in ("linear", "step"):
            raise FormatError(f"unknown tabulation kind {kind!r}")
        self.x, self.y, self.kind = x, y, kind
        self.dim = 1
        self.lower, self.upper = (float(x[0]),), (float(x[-1]),)
        self.degree = 1 if kind == "linear" else 0

    def __call__(self, t):
        scalar = not isinstance(t, np.ndarray)
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if tt.ndim == 2:
            tt = tt[:, 0]
        if self.kind == "linear":
            out = np.interp(tt, self.x, self.y, left=0.0, right=0.0)
        else:
            idx = np.searchsorted(self.x, tt, side="right") - 1
            ok = (idx >= 0) & (idx < len(self.x) - 1)
            out = np.where(ok, np.asarray(self.y)[np.clip(idx, 0, len(self.x) - 2)], 0.0)
        return float(out[0]) if scalar else out


class FunctionGenerator(GeneratorFn):
    """Wrap a vectorised callable on ``(P, d)`` points with a declared support box."""

    def __init__(self, fn, lower, upper, degree: int | None = None):
        self.fn = fn
        self.lower, self.upper = tuple(lower), tuple(upper)
        self.dim = len(self.lower)
        self.degree = degree

    def __call__(self, t):
        T = np.asarray(t, dtype=float)
        scalar = T.ndim == 0 or (T.ndim == 1 and self.dim > 1 and T.shape[0] == self.dim)
        T2 = T.reshape(-1, self.dim)
        out = np.where(self._outside(T2), 0.0, self.fn(T2))
        if scalar:
            return out.reshape(-1)[0]
        return out.reshape(T.shape[:-1] if self.dim > 1 else T.shape)


class OrbitExpansion(GeneratorFn):
    """``t -> sum_gamma c(gamma) [U(gamma) phi](t)`` for finitely supported c."""

    def __init__(self, crystal: CrystalGroupSpec, phi: GeneratorFn, coeffs: GammaSignal):
        if coeffs.group != crystal.group:
            raise GroupStructureError("coefficients must live on the crystal's group")
        self.crystal = crystal
        self.phi = phi
        self.coeffs = coeffs
        self.terms = list(coeffs.items())
        self.dim = crystal.dim
        self.degree = phi.degree
        lo, hi = phi.support_box()
        if self.terms:
            imgs = [
                crystal.act_point(g, c) for g, _ in self.terms for c in itertools.product(*zip(lo, hi))
            ]
            self.lower = tuple(min(p[i] for p in imgs) for i in range(self.dim))
            self.upper = tuple(max(p[i] for p in imgs) for i in range(self.dim))
        else:
            self.lower = self.upper = tuple(0 for _ in range(self.dim))

    def __call__(self, t):
        if not isinstance(t, np.ndarray):
            pt = tuple(t) if isinstance(t, (tuple, list)) else (t,)
            return sum((c * self.phi(self.crystal.inverse_act_point(g, pt)) for g, c in self.terms), 0)
        T = np.asarray(t, dtype=float)
        T2 = T.reshape(-1, self.dim)
        out = np.zeros(len(T2), dtype=complex)
        for g, c in self.terms:
            Y = self.crystal.inverse_act_array(g, T2)
            out += complex(c) * self.phi(Y[:, 0] if self.dim == 1 else Y)
        if np.all(out.imag == 0):
            out = out.real
        return out.reshape(_value_shape(T, self.dim))


def spline_generator() -> PiecewisePolynomial:
    """``(16 t^2 - 13) t^2 (2 - t)^2`` on ``[0, 2]``, exact rational coefficients."""
    return PiecewisePolynomial.from_factors(
        0, 2, (-13, 0, 16), (0, 0, 1), (2, -1), (2, -1), continuous=True
    )


# -- operations ----------------------------------------------------------------


def quasi_regular_apply(crystal: CrystalGroupSpec, gamma, fn: GeneratorFn, t):
    """``[U(gamma) fn](t) = fn(A^T (t - n))``."""
    gamma = crystal.group.check(tuple(gamma))
    if isinstance(t, np.ndarray):
        Y = crystal.inverse_act_array(gamma, t.reshape(-1, crystal.dim))
        return np.asarray(fn(Y[:, 0] if crystal.dim == 1 else Y)).reshape(_value_shape(t, crystal.dim))
    pt = tuple(t) if isinstance(t, (tuple, list)) else (t,)
    return fn(crystal.inverse_act_point(gamma, pt))


def _value_shape(T: np.ndarray, d: int) -> tuple:
    """Shape of the values at points ``T``: drop the trailing coordinate axis, if any."""
    if d == 1 and not (T.ndim >= 2 and T.shape[-1] == 1):
        return T.shape
    return T.shape[:-1]


def _in_box(x, lo, hi) -> bool:
    return all(a <= xi <= b for xi, a, b in zip(x, lo, hi))


def _point(p) -> tuple:
    return tuple(p) if isinstance(p, (tuple, list, np.ndarray)) else (p,)


def pointwise_sample_signal(crystal: CrystalGroupSpec, phi: GeneratorFn, p) -> GammaSignal:
    """``f_p(eta) = conj([U(eta) phi](p))`` over the finitely many eta with ``eta^-1 . p`` in supp phi."""
    p = _point(p)
    lo, hi = phi.support_box()
    items = []
    for eta in crystal.elements_moving_into(p, p, lo, hi):
        y = crystal.inverse_act_point(eta, p)
        if _in_box(y, lo, hi):
            v = phi(y)
            if v != 0:
                items.append((eta, v.conjugate()))
    return GammaSignal.from_items(crystal.group, items)


def sample_function(crystal: CrystalGroupSpec, f: GeneratorFn, p) -> GammaSignal:
    """Pointwise samples ``L_p f(gamma) = f(gamma . p) = f(A p + n)`` wherever they can be nonzero."""
    p = _point(p)
    lo, hi = f.support_box()
    items = []
    for h in range(crystal.kappa):
        Ap = _matvec(crystal.matrices[h], p)
        box_lo = tuple(a - b for a, b in zip(lo, Ap))
        box_hi = tuple(a - b for a, b in zip(hi, Ap))
        for k in crystal.lattice_points_in_box(box_lo, box_hi):
            gam = GammaElement(tuple(int(i) for i in k), h)
            x = crystal.act_point(gam, p)
            if _in_box(x, lo, hi):
                v = f(x if crystal.dim > 1 else x[0])
                if v != 0:
                    items.append((gam, v))
    return GammaSignal.from_items(crystal.group, items)


def _piece_list(fn: GeneratorFn):
    if isinstance(fn, PiecewisePolynomial):
        return fn.pieces
    return None


def _gauss_legendre_integral(fun, lo, hi, order):
    x, w = np.polynomial.legendre.leggauss(order)
    panels = max(1, math.ceil(float(hi - lo) - 1e-12))
    edges = np.linspace(float(lo), float(hi), panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        total = total + 0.5 * (b - a) * np.sum(w * fun(t))
    return total


def average_sample_signal(crystal: CrystalGroupSpec, phi: GeneratorFn, psi: GeneratorFn,
                          method: str = "auto", order: int = 16) -> GammaSignal:
    """``f_psi(eta) = conj <phi, U(eta^-1) psi>`` (one-dimensional crystals).

    ``method='exact'`` integrates piecewise polynomials in closed form (exact
    with Fraction coefficients); ``'quadrature'`` uses Gauss-Legendre with
    ``order`` nodes per unit length, split at the knots.  ``'auto'`` picks the
    exact route for piecewise polynomials of degree <= 12.
    """
    if crystal.dim != 1:
        raise UnsupportedOperationError("average sampling is implemented for one-dimensional crystals")
    pp, qq = _piece_list(phi), _piece_list(psi)
    if method == "auto":
        method = "exact" if pp and qq and phi.degree <= 12 and psi.degree <= 12 else "quadrature"
    if method == "exact" and not (pp and qq):
        raise UnsupportedOperationError("exact integration needs piecewise-polynomial phi and psi")
    if method == "quadrature" and phi.degree is not None and psi.degree is not None:
        need = phi.degree + psi.degree
        if need > 2 * order - 1:
            required = math.ceil((need + 1) / 2)
            raise QuadratureOrderError(
                f"Gauss-Legendre order {order} integrates degree <= {2 * order - 1}; need order {required}",
                required,
            )
    plo, phi_hi = phi.support_box()
    slo, shi = psi.support_box()
    items = []
    G = crystal.group
    for zeta in crystal.elements_moving_into(plo, phi_hi, slo, shi):
        a = crystal.matrices[zeta.h][0][0]
        m = crystal.translation(zeta.n)[0]
        # U(zeta) psi (t) = psi(a (t - m)), supported on a*[slo, shi] + m
        ends = sorted((a * slo[0] + m, a * shi[0] + m))
        lo, hi = max(plo[0], ends[0]), min(phi_hi[0], ends[1])
        if not lo < hi:
            continue
        if method == "exact":
            val = 0
            for pa, pb, pc in pp:
                for qa, qb, qc in qq:
                    ja, jb = sorted((a * qa + m, a * qb + m))
                    ilo, ihi = max(pa, ja, lo), min(pb, jb, hi)
                    if not ilo < ihi:
                        continue
                    q = _poly_compose_affine(qc, a, -a * m)
                    prod = _poly_mul(list(pc), [x.conjugate() for x in q])
                    val += _poly_integral(prod, ilo, ihi)
        else:
            knots = sorted({float(x) for x in (lo, hi)} | _knots(phi, lo, hi) | {
                float(a * x + m) for x in _knot_values(psi) if lo < a * x + m < hi
            })
            val = 0.0
            for k0, k1 in zip(knots[:-1], knots[1:]):
                val += _gauss_legendre_integral(
                    lambda t: phi(t) * np.conj(psi(a * (t - m))), k0, k1, order
                )
        if method != "exact":
            val = complex(val) if np.iscomplexobj(val) else float(val)
        if val != 0:
            items.append((G.inv(zeta), val.conjugate()))
    return GammaSignal.from_items(G, items)


def _knot_values(fn):
    if isinstance(fn, PiecewisePolynomial):
        return [x for p in fn.pieces for x in p[:2]]
    if isinstance(fn, TabulatedFunction):
        return list(fn.x)
    if isinstance(fn, OrbitExpansion) and fn.dim == 1:
        base = _knot_values(fn.phi)
        return [fn.crystal.act_point(g, (x,))[0] for g, _ in fn.terms for x in base]
    return []


def _knots(fn, lo, hi) -> set:
    return {float(x) for x in _knot_values(fn) if lo < x < hi}


def _as_points(t_grid, d):
    T = np.asarray(t_grid, dtype=float)
    return T.reshape(-1, d)


def _orbit_abs2_sum(crystal, phi, t_grid):
    T = _as_points(t_grid, crystal.dim)
    lo, hi = phi.support_box()
    total = np.zeros(len(T))
    count = np.zeros(len(T), dtype=int)
    for gam in crystal.elements_moving_into(tuple(T.min(axis=0)), tuple(T.max(axis=0)), lo, hi):
        Y = crystal.inverse_act_array(gam, T)
        v = np.abs(phi(Y[:, 0] if crystal.dim == 1 else Y))
        total += v**2
        count += v > 0
    return total, count


def rkhs_bound(crystal: CrystalGroupSpec, phi: GeneratorFn, t_grid) -> float:
    """``max_t sum_gamma |[U(gamma) phi](t)|^2`` over the given points."""
    total, _ = _orbit_abs2_sum(crystal, phi, t_grid)
    return float(total.max(initial=0.0))


def orbit_term_count(crystal: CrystalGroupSpec, phi: GeneratorFn, t_grid) -> int:
    """Largest number of nonzero orbit terms at any of the given points."""
    _, count = _orbit_abs2_sum(crystal, phi, t_grid)
    return int(count.max(initial=0))


def build_interpolator(crystal: CrystalGroupSpec, phi: GeneratorFn, g: GammaSignal) -> OrbitExpansion:
    """``Phi(t) = sum_gamma g(gamma) [U(gamma) phi](t)``."""
    return OrbitExpansion(crystal, phi, g)


def reconstruct(crystal: CrystalGroupSpec, samples: GammaSignal, Phi: GeneratorFn, t):
    """``f(t) = sum_gamma samples(gamma) [U(gamma) Phi](t)``, evaluated lazily at t."""
    return OrbitExpansion(crystal, Phi, samples)(t)


def coefficients_from_samples(samples: GammaSignal, g: GammaSignal) -> GammaSignal:
    """Expansion coefficients ``a = sum_eta samples(eta) L_eta g``."""
    return convolve_gamma(samples, g)


def samples_from_coefficients(a: GammaSignal, f_p: GammaSignal) -> GammaSignal:
    """``gamma -> <a, L_gamma f_p>``, the samples of ``sum a(gamma) U(gamma) phi``."""
    return analyze_inner(a, f_p)


# -- the D_inf spline case -----------------------------------------------------


@dataclass
class SplineSamplingCase:
    """Pointwise sampling at ``{n + p} U {n - p}`` for a generator supported in ``[0, 2]``."""

    p: object
    phi: GeneratorFn
    values: dict
    f1: dict
    fm1: dict
    C: object
    D: object
    feasible: bool
    compact_support: bool
    signal: GammaSignal
    crystal: CrystalGroupSpec = field(repr=False)
    _dual: DualResult | None = field(default=None, repr=False)

    def det_laurent(self) -> dict:
        """``det F`` in sequence form: ``C + D (z + z^-1)``."""
        out = {(0,): self.C, (1,): self.D, (-1,): self.D}
        return {n: v for n, v in out.items() if v != 0}

    def det_on_grid(self, grid: FrequencyGrid) -> np.ndarray:
        w = grid.points()[:, 0]
        return float(self.C) + 2 * float(self.D) * np.cos(w)

    def dual(self, grid: FrequencyGrid | None = None, tol: Tolerance | None = None) -> DualResult:
        if not self.feasible:
            raise InfeasibleSamplingError(f"|C| <= 2|D| (C={self.C}, D={self.D}); no stable reconstruction")
        if self._dual is None:
            try:
                self._dual = dual_exact_laurent(self.signal)
            except NonMonomialDeterminantError:
                self._dual = dual_generator(self.signal, grid or FrequencyGrid.for_group(self.crystal.group, 1 << 12), tol)
        return self._dual

    def interpolator(self) -> OrbitExpansion:
        return build_interpolator(self.crystal, self.phi, self.dual().signal)

    def analysis(self, grid_size: int = 1 << 16, tol: Tolerance | None = None):
        """Riesz analysis ending on a ``grid_size`` grid, refined once from half that size."""
        tol = replace(tol or Tolerance(), max_refine=1)
        grid = FrequencyGrid.for_group(self.crystal.group, grid_size // 2)
        return riesz_analyze(transfer_matrix(self.signal, grid), tol)

    def closed_bounds(self, grid_size: int = 1 << 16) -> tuple:
        return dinf_closed_bounds(self.signal, FrequencyGrid.for_group(self.crystal.group, grid_size))


def dinf_spline_case(p=Fraction(1, 4), phi: GeneratorFn | None = None) -> SplineSamplingCase:
    """Build the D_inf pointwise-sampling case for ``p`` in ``(0, 1/2)`` and ``supp phi`` in ``[0, 2]``.

    Filters: ``f1_hat(z) = phi(p) + phi(p+1) z`` and
    ``fm1_hat(z) = phi(1-p) z^-1 + phi(2-p) z^-2``; ``det F(z) = C + D (z + 1/z)``.
    """
    phi = spline_generator() if phi is None else phi
    if isinstance(p, str):
        p = Fraction(p)
    if not 0 < p < Fraction(1, 2):
        raise InfeasibleSamplingError(f"p must lie in (0, 1/2), got {p}")
    lo, hi = phi.support_box()
    if lo[0] < 0 or hi[0] > 2:
        raise InfeasibleSamplingError("the generator must be supported in [0, 2]")
    if isinstance(phi, PiecewisePolynomial) and not phi.continuous:
        phi._check_continuity()
    one = 1
    vals = {
        "p": phi(p),
        "p+1": phi(p + one),
        "1-p": phi(one - p),
        "2-p": phi(2 - p),
    }
    a, b, c, d = vals["p"], vals["p+1"], vals["1-p"], vals["2-p"]
    C = a * a + b * b - c * c - d * d
    D = a * b - c * d
    crystal = dinf_crystal()
    signal = pointwise_sample_signal(crystal, phi, p)
    f1 = {(0,): a, (-1,): b}
    fm1 = {(1,): c, (2,): d}
    expected = GammaSignal(crystal.group, [f1, fm1])
    if not signal.allclose(expected, 0.0 if signal.is_exact else 1e-14):
        raise GroupStructureError("pointwise sample signal disagrees with the closed-form filters")
    return SplineSamplingCase(
        p=p, phi=phi, values=vals, f1={k[0]: v for k, v in f1.items() if v != 0},
        fm1={k[0]: v for k, v in fm1.items() if v != 0}, C=C, D=D,
        feasible=bool(abs(C) > 2 * abs(D)), compact_support=(D == 0), signal=signal, crystal=crystal,
    )
