"""Brute-force reference computations.

Everything here works straight from the group law -- literal double sums and
dense operator matrices -- and shares no code with the phase/transfer-matrix
fast paths it is meant to check.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NotRieszBasisError, UnsupportedOperationError
from .group import GammaElement, SemidirectGroup, finite_dihedral, infinite_dihedral
from .signal import GammaSignal

__all__ = [
    "brute_convolve",
    "brute_synthesis_matrix",
    "truncated_synthesis_matrix",
    "brute_dual",
    "operator_bounds",
    "frame_probe",
    "random_signal",
    "VerificationReport",
    "run_verification",
]


def brute_convolve(a: GammaSignal, f: GammaSignal) -> GammaSignal:
    """``(a * f)(gamma) = sum_eta a(eta) f(eta^-1 gamma)``, as ``sum a(eta) f(zeta)`` at ``gamma = eta zeta``."""
    G = a.group
    if f.group != G:
        raise ValueError("signals live on different groups")
    acc = {}
    fitems = list(f.items())
    for eta, av in a.items():
        for zeta, fv in fitems:
            gam = G.mul(eta, zeta)
            acc[gam] = acc.get(gam, 0) + av * fv
    return GammaSignal.from_items(G, acc.items())


def _translate_value(G: SemidirectGroup, f: GammaSignal, gamma, eta):
    """``(L_gamma f)(eta) = f(gamma^-1 eta)``."""
    return f[G.mul(G.inv(gamma), eta)]


def brute_synthesis_matrix(f: GammaSignal) -> np.ndarray:
    """Dense matrix whose column gamma is ``L_gamma f``, rows and columns in enumeration order."""
    G = f.group
    if not G.is_finite:
        raise UnsupportedOperationError("dense synthesis matrices need a finite group; see truncated_synthesis_matrix")
    els = G.elements()
    S = np.empty((len(els), len(els)), dtype=complex)
    for j, gam in enumerate(els):
        ginv = G.inv(gam)
        for i, eta in enumerate(els):
            S[i, j] = complex(f[G.mul(ginv, eta)])
    return S


def truncated_synthesis_matrix(f: GammaSignal, window: int = 16):
    """Columns ``L_gamma f`` for ``|n|_inf <= window`` on a lattice group, with every row they reach.

    Returns ``(S, columns, rows)``.  The singular values of this restriction lie
    inside ``[sqrt(A), sqrt(B)]`` for the optimal Riesz bounds A, B.
    """
    G = f.group
    if G.is_finite:
        raise UnsupportedOperationError("use brute_synthesis_matrix for finite groups")
    rng = range(-window, window + 1)
    cols = [GammaElement(n, h) for h in range(G.kappa) for n in itertools.product(rng, repeat=G.N.rank)]
    support = list(f.items())
    entries = {}
    rows = {}
    for j, gam in enumerate(cols):
        for zeta, v in support:
            eta = G.mul(gam, zeta)  # f(gamma^-1 eta) = f(zeta)
            i = rows.setdefault(eta, len(rows))
            entries[(i, j)] = entries.get((i, j), 0) + complex(v)
    S = np.zeros((len(rows), len(cols)), dtype=complex)
    for (i, j), v in entries.items():
        S[i, j] = v
    return S, cols, list(rows)


def operator_bounds(f: GammaSignal, window: int = 16) -> dict:
    """Extreme squared singular values and the 2-norm of the (truncated) synthesis operator."""
    S = brute_synthesis_matrix(f) if f.group.is_finite else truncated_synthesis_matrix(f, window)[0]
    s = np.linalg.svd(S, compute_uv=False)
    return {"A_eig": float(s[-1] ** 2), "B_eig": float(s[0] ** 2), "norm": float(s[0]), "smin": float(s[-1])}


def brute_dual(f: GammaSignal, rcond: float = 1e-10) -> GammaSignal:
    """Dual generator ``g = S (S^* S)^-1 e_identity`` from the dense Gram matrix."""
    G = f.group
    S = brute_synthesis_matrix(f)
    gram = S.conj().T @ S
    s = np.linalg.svd(S, compute_uv=False)
    if s[-1] <= rcond * max(s[0], 1.0):
        raise NotRieszBasisError(f"Gram matrix is singular (smallest singular value {s[-1]:.3g})")
    e = np.zeros(len(gram), dtype=complex)
    e[G.index(G.identity)] = 1.0
    g = S @ np.linalg.solve(gram, e)
    els = G.elements()
    return GammaSignal.from_items(G, [(els[i], g[i]) for i in range(len(els))])


def _lattice_random_coeffs(rng, G, radius, complex_values):
    box = range(-radius, radius + 1)
    items = []
    for h in range(G.kappa):
        for n in itertools.product(box, repeat=G.N.rank):
            v = rng.standard_normal()
            if complex_values:
                v = v + 1j * rng.standard_normal()
            items.append((GammaElement(n, h), v))
    return GammaSignal.from_items(G, items)


def random_signal(G: SemidirectGroup, rng=None, radius: int = 2, complex_values: bool = True) -> GammaSignal:
    """Gaussian signal: dense on a finite group, supported in ``|n|_inf <= radius`` on a lattice."""
    rng = np.random.default_rng(rng)
    if G.is_finite:
        shape = (G.kappa,) + G.N.shape
        v = rng.standard_normal(shape)
        if complex_values:
            v = v + 1j * rng.standard_normal(shape)
        return GammaSignal(G, v)
    return _lattice_random_coeffs(rng, G, radius, complex_values)


def _sq_norm(a: GammaSignal) -> float:
    return float(sum(abs(complex(v)) ** 2 for _, v in a.items()))


def frame_probe(f: GammaSignal, trials: int = 1000, seed: int = 0, radius: int = 3, probes=None):
    """Extremes of ``||a * f||^2 / ||a||^2`` over random (or supplied) finitely supported ``a``.

    Returns ``(min_ratio, max_ratio)``; both must lie in ``[A_eig, B_eig]``.
    """
    rng = np.random.default_rng(seed)
    G = f.group
    lo, hi = np.inf, -np.inf
    candidates = list(probes) if probes is not None else []
    for _ in range(trials):
        candidates.append(random_signal(G, rng, radius=int(rng.integers(0, radius + 1))))
    for a in candidates:
        na = _sq_norm(a)
        if na == 0:
            continue
        r = _sq_norm(brute_convolve(a, f)) / na
        lo, hi = min(lo, r), max(hi, r)
    return float(lo), float(hi)


def modulated_probe(G: SemidirectGroup, w, vector, length: int = 256) -> GammaSignal:
    """``a(n, h) = v_h e^{i w n}`` windowed to ``0 <= n < length`` (rank-1 lattice).

    Its transform concentrates at ``w``, so ``||a * f||^2 / ||a||^2`` approaches
    the Rayleigh quotient of ``F^* F`` at ``w`` in the direction ``v``.
    """
    if G.is_finite or G.N.rank != 1:
        raise UnsupportedOperationError("modulated probes are built on Z")
    items = []
    for h, vh in enumerate(vector):
        for n in range(length):
            items.append((GammaElement((n,), h), complex(vh) * np.exp(1j * w * n)))
    return GammaSignal.from_items(G, items)


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def add(self, name, passed, error, tol, seconds):
        self.checks.append(
            {"name": name, "passed": bool(passed), "error": float(error), "tol": tol, "seconds": round(seconds, 4)}
        )

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": self.checks}


def run_verification(seed: int = 0, generators: int = 10) -> VerificationReport:
    """Cross-check the fast paths against the oracles on small finite dihedral groups and on D_inf."""
    from fractions import Fraction

    from .dual import dual_exact_laurent, dual_generator
    from .signal import convolve_gamma
    from .spectral import FrequencyGrid, cstar_norm, riesz_analyze, transfer_matrix

    rng = np.random.default_rng(seed)
    rep = VerificationReport()
    for m in (4, 6):
        G = finite_dihedral(m)
        grid = FrequencyGrid.for_group(G)
        t0 = time.perf_counter()
        conv = bounds = dual = norm = 0.0
        for _ in range(generators):
            f = random_signal(G, rng)
            a = random_signal(G, rng)
            conv = max(conv, convolve_gamma(a, f).max_abs_diff(brute_convolve(a, f)))
            F = transfer_matrix(f, grid)
            r = riesz_analyze(F)
            ob = operator_bounds(f)
            bounds = max(bounds, abs(r.A_eig - ob["A_eig"]), abs(r.B_eig - ob["B_eig"]))
            norm = max(norm, abs(cstar_norm(F) - ob["norm"]))
            dual = max(dual, dual_generator(f, grid).signal.max_abs_diff(brute_dual(f)))
        dt = time.perf_counter() - t0
        rep.add(f"Z{m}xZ2 convolution vs double sum", conv <= 1e-12, conv, 1e-12, dt)
        rep.add(f"Z{m}xZ2 bounds vs dense SVD", bounds <= 1e-10, bounds, 1e-10, dt)
        rep.add(f"Z{m}xZ2 dual vs Gram inverse", dual <= 1e-10, dual, 1e-10, dt)
        rep.add(f"Z{m}xZ2 operator norm", norm <= 1e-10, norm, 1e-10, dt)

    t0 = time.perf_counter()
    D = infinite_dihedral()
    f = GammaSignal(D, [{0: Fraction(3, 8)}, {-1: Fraction(1, 8)}])
    g = dual_exact_laurent(f).signal
    want = GammaSignal(D, [{0: 3}, {-1: -1}])
    rep.add("D_inf exact dual", g == want, 0.0 if g == want else 1.0, 0.0, time.perf_counter() - t0)
    ob = operator_bounds(f, window=8)
    r = riesz_analyze(transfer_matrix(f))
    err = max(abs(r.A_eig - ob["A_eig"]), abs(r.B_eig - ob["B_eig"]))
    rep.add("D_inf bounds vs truncated operator", err <= 1e-8, err, 1e-8, time.perf_counter() - t0)
    return rep
