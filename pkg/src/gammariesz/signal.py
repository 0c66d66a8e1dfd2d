"""Elements of l2(Gamma) stored phase by phase, and the group-algebra operations on them.

A signal ``a`` is kept as its kappa phases ``a_h(n) = a(n, h)``.  Over a finite N
each phase is a dense complex array of shape ``N.factors``; over a lattice each
phase is a sparse ``{n: value}`` dict holding no explicit zeros.  Sparse values
may be :class:`fractions.Fraction`, in which case every operation below stays
exact.
"""

from __future__ import annotations

import functools
import numbers
from typing import Iterator, Mapping

import numpy as np

from .exceptions import GroupStructureError
from .group import GammaElement, SemidirectGroup

__all__ = [
    "GammaSignal",
    "delta",
    "left_translate",
    "involution",
    "block",
    "convolve_n",
    "convolve_gamma",
    "analyze_inner",
    "inner",
]


def _is_zero(v) -> bool:
    return v == 0


def _conj(v):
    return v.conjugate()


class GammaSignal:
    """A finitely described element of l2(Gamma).

    Parameters
    ----------
    group : SemidirectGroup
    phases : sequence
        One entry per element of H.  Dense arrays (finite N) or ``{n: value}``
        mappings (lattice N); lattice keys may be ints in rank 1.
    """

    __slots__ = ("group", "_phases")

    def __init__(self, group: SemidirectGroup, phases):
        self.group = group
        phases = list(phases)
        if len(phases) != group.kappa:
            raise GroupStructureError(f"expected {group.kappa} phases, got {len(phases)}")
        if group.is_finite:
            shape = group.N.shape
            arr = np.empty((group.kappa,) + shape, dtype=complex)
            for h, ph in enumerate(phases):
                if isinstance(ph, Mapping):
                    dense = np.zeros(shape, dtype=complex)
                    for n, v in ph.items():
                        dense[group.N.reduce(_key(n))] += complex(v)
                    ph = dense
                ph = np.asarray(ph, dtype=complex)
                if ph.shape != shape:
                    raise GroupStructureError(f"phase {h} has shape {ph.shape}, expected {shape}")
                arr[h] = ph
            arr.setflags(write=False)
            self._phases = arr
        else:
            out = []
            for ph in phases:
                d = {}
                for n, v in dict(ph).items():
                    n = _key(n)
                    if len(n) != group.N.rank:
                        raise GroupStructureError(f"lattice point {n} has wrong dimension")
                    if not isinstance(v, numbers.Number):
                        raise GroupStructureError(f"signal value {v!r} is not a number")
                    if not _is_zero(v):
                        d[n] = v
                out.append(d)
            self._phases = tuple(out)

    # -- constructors ----------------------------------------------------
    @classmethod
    def zeros(cls, group: SemidirectGroup) -> "GammaSignal":
        if group.is_finite:
            return cls(group, np.zeros((group.kappa,) + group.N.shape, dtype=complex))
        return cls(group, [{} for _ in range(group.kappa)])

    @classmethod
    def from_items(cls, group: SemidirectGroup, items) -> "GammaSignal":
        """Build from ``{(n, h): value}`` pairs; repeated keys accumulate."""
        phases = [{} for _ in range(group.kappa)]
        if isinstance(items, Mapping):
            items = items.items()
        for (n, h), v in items:
            n = group.N.reduce(_key(n))
            phases[int(h)][n] = phases[int(h)].get(n, 0) + v
        return cls(group, phases)

    @classmethod
    def from_vector(cls, group: SemidirectGroup, vec) -> "GammaSignal":
        """Inverse of :meth:`to_vector` (finite N only)."""
        vec = np.asarray(vec, dtype=complex)
        return cls(group, vec.reshape((group.kappa,) + group.N.shape))

    # -- access ------------------------------------------------------------
    @property
    def is_dense(self) -> bool:
        return self.group.is_finite

    def phase(self, h: int):
        """The N-sequence ``a_h``; a read-only array or a fresh dict."""
        if self.is_dense:
            return self._phases[h]
        return dict(self._phases[h])

    @property
    def phases(self):
        if self.is_dense:
            return self._phases
        return tuple(dict(p) for p in self._phases)

    def __getitem__(self, x):
        n, h = x
        n = self.group.N.reduce(_key(n))
        if self.is_dense:
            return complex(self._phases[int(h)][n])
        return self._phases[int(h)].get(n, 0)

    def items(self) -> Iterator[tuple]:
        """Nonzero ``(GammaElement, value)`` pairs."""
        if self.is_dense:
            for h in range(self.group.kappa):
                ph = self._phases[h]
                for idx in zip(*np.nonzero(ph)):
                    yield GammaElement(tuple(int(i) for i in idx), h), complex(ph[idx])
        else:
            for h, ph in enumerate(self._phases):
                for n, v in ph.items():
                    yield GammaElement(n, h), v

    def support(self) -> list:
        return [g for g, _ in self.items()]

    def support_box(self):
        """Per-coordinate (min, max) of the support over all phases (lattice)."""
        pts = [g.n for g in self.support()]
        if not pts:
            return None
        arr = np.array(pts)
        return arr.min(axis=0), arr.max(axis=0)

    @property
    def is_exact(self) -> bool:
        """True when every stored value is an int or Fraction."""
        if self.is_dense:
            return False
        return all(isinstance(v, numbers.Rational) for ph in self._phases for v in ph.values())

    def to_vector(self) -> np.ndarray:
        """Flat vector in :func:`enumerate_gamma` order (finite N only)."""
        if not self.is_dense:
            raise GroupStructureError("to_vector needs a finite N")
        return self._phases.reshape(-1).copy()

    def to_complex(self) -> "GammaSignal":
        if self.is_dense:
            return self
        return GammaSignal(self.group, [{n: complex(v) for n, v in ph.items()} for ph in self._phases])

    # -- Hilbert space structure -------------------------------------------
    def inner(self, other: "GammaSignal"):
        """``<self, other> = sum self(g) conj(other(g))``."""
        _same_group(self, other)
        if self.is_dense:
            return complex(np.vdot(other._phases, self._phases))
        total = 0
        for h in range(self.group.kappa):
            a, b = self._phases[h], other._phases[h]
            if len(b) < len(a):
                total += sum(a[n] * _conj(v) for n, v in b.items() if n in a)
            else:
                total += sum(v * _conj(b[n]) for n, v in a.items() if n in b)
        return total

    def norm(self) -> float:
        return float(abs(self.inner(self)) ** 0.5)

    def _combine(self, other, op):
        _same_group(self, other)
        if self.is_dense:
            return GammaSignal(self.group, op(self._phases, other._phases))
        out = []
        for a, b in zip(self._phases, other._phases):
            d = dict(a)
            for n, v in b.items():
                d[n] = op(d.get(n, 0), v)
            for n in a:
                if n not in b:
                    d[n] = op(a[n], 0)
            out.append(d)
        return GammaSignal(self.group, out)

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __neg__(self):
        return self * -1

    def __mul__(self, c):
        if self.is_dense:
            return GammaSignal(self.group, self._phases * c)
        return GammaSignal(self.group, [{n: v * c for n, v in ph.items()} for ph in self._phases])

    __rmul__ = __mul__

    def conj(self) -> "GammaSignal":
        if self.is_dense:
            return GammaSignal(self.group, self._phases.conj())
        return GammaSignal(self.group, [{n: _conj(v) for n, v in ph.items()} for ph in self._phases])

    def max_abs_diff(self, other: "GammaSignal") -> float:
        diff = self - other
        if diff.is_dense:
            return float(np.max(np.abs(diff._phases), initial=0.0))
        return max((abs(complex(v)) for _, v in diff.items()), default=0.0)

    def allclose(self, other: "GammaSignal", atol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= atol

    def __eq__(self, other):
        if not isinstance(other, GammaSignal) or self.group != other.group:
            return NotImplemented
        if self.is_dense:
            return bool(np.array_equal(self._phases, other._phases))
        return self._phases == other._phases

    __hash__ = None

    def __repr__(self):
        if self.is_dense:
            return f"GammaSignal({self.group!r}, nnz={int(np.count_nonzero(self._phases))})"
        body = ", ".join(
            f"{h}: {dict(sorted(ph.items()))}" for h, ph in enumerate(self._phases)
        )
        return f"GammaSignal({self.group!r}, {{{body}}})"


def _key(n) -> tuple:
    if isinstance(n, (int, np.integer)):
        return (int(n),)
    return tuple(int(x) for x in n)


def _same_group(a: GammaSignal, b: GammaSignal):
    if a.group != b.group:
        raise GroupStructureError("signals live on different groups")


@functools.lru_cache(maxsize=256)
def _action_perm(group: SemidirectGroup, h: int) -> np.ndarray:
    """Flat-index permutation ``i -> index(sigma(h) n_i)`` over a finite N."""
    shape = group.N.shape
    return np.array(
        [np.ravel_multi_index(group.act(h, n), shape) for n in group.N.elements()], dtype=np.intp
    )


def delta(group: SemidirectGroup, at=None) -> GammaSignal:
    """Unit mass at ``at`` (default: the identity)."""
    at = group.identity if at is None else at
    one = 1 if not group.is_finite else 1.0
    return GammaSignal.from_items(group, [(at, one)])


def left_translate(gamma, f: GammaSignal) -> GammaSignal:
    """``(L_gamma f)(eta) = f(gamma^-1 eta)``; moves the mass at eta to gamma eta."""
    G = f.group
    gamma = G.check(tuple(gamma))
    return GammaSignal.from_items(G, [(G.mul(gamma, eta), v) for eta, v in f.items()])


def involution(f: GammaSignal) -> GammaSignal:
    """``f*(gamma) = conj f(gamma^-1)``."""
    G = f.group
    return GammaSignal.from_items(G, [(G.inv(eta), _conj(v)) for eta, v in f.items()])


def block(f: GammaSignal, h: int, l: int):
    """N-sequence ``n -> f[(0, l)^-1 (n, h)] = f_{l^-1 h}(sigma(l^-1) n)``."""
    G = f.group
    li = G.H.inv(l)
    src = G.H.mul(li, h)
    if f.is_dense:
        flat = f.phase(src).reshape(-1)
        return flat[_action_perm(G, li)].reshape(G.N.shape)
    # n = sigma(l) m for every stored m
    return {G.act(l, m): v for m, v in f.phase(src).items()}


def convolve_n(a, b, N=None):
    """Convolution on N: ``(a * b)(n) = sum_m a(m) b(n - m)``.

    Dense arrays are convolved cyclically; sparse dicts by direct summation.
    """
    if isinstance(a, Mapping):
        out = {}
        for m, x in a.items():
            for k, y in b.items():
                n = tuple(i + j for i, j in zip(m, k))
                out[n] = out.get(n, 0) + x * y
        return {n: v for n, v in out.items() if not _is_zero(v)}
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    axes = tuple(range(a.ndim))
    for m in zip(*np.nonzero(a)):
        out += a[m] * np.roll(b, shift=tuple(int(i) for i in m), axis=axes)
    return out


def convolve_gamma(a: GammaSignal, f: GammaSignal) -> GammaSignal:
    """``(a * f)(n, h) = sum_l (a_l *_N f_{h,l})(n)``, i.e. the synthesis ``sum a(eta) L_eta f``."""
    _same_group(a, f)
    G = a.group
    phases = []
    for h in range(G.kappa):
        if G.is_finite:
            acc = np.zeros(G.N.shape, dtype=complex)
            for l in range(G.kappa):
                al = a.phase(l)
                if np.any(al):
                    acc += convolve_n(al, block(f, h, l))
        else:
            acc = {}
            for l in range(G.kappa):
                al = a.phase(l)
                if not al:
                    continue
                for n, v in convolve_n(al, block(f, h, l)).items():
                    acc[n] = acc.get(n, 0) + v
        phases.append(acc)
    return GammaSignal(G, phases)


def analyze_inner(a: GammaSignal, f: GammaSignal) -> GammaSignal:
    """``gamma -> <a, L_gamma f> = (a * f*)(gamma)``, the analysis operator of ``{L_gamma f}``."""
    return convolve_gamma(a, involution(f))


def inner(a: GammaSignal, b: GammaSignal):
    return a.inner(b)
