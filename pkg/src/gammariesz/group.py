"""Semidirect products ``Gamma = N x_sigma H`` of a discrete abelian group and a finite group.

``N`` is either a finite abelian group ``Z_m1 x ... x Z_md`` or a lattice ``Z^d``;
``H`` is given by an explicit multiplication table whose index 0 is the identity;
the action ``sigma`` is a family of integer matrices, one per element of ``H``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .exceptions import GroupStructureError, InvalidActionError, UnsupportedOperationError

__all__ = [
    "AbelianGroupSpec",
    "FiniteGroupTable",
    "ActionSpec",
    "ActionVerdict",
    "GammaElement",
    "SemidirectGroup",
    "validate_action",
    "gamma_mul",
    "gamma_inv",
    "enumerate_gamma",
    "characters",
    "character_value",
    "infinite_dihedral",
    "finite_dihedral",
]

#: refuse to materialise finite groups bigger than this
MAX_FINITE_ORDER = 1 << 22


class GammaElement(NamedTuple):
    """A pair ``(n, h)`` with ``n`` an element of N (tuple of ints) and ``h`` an index into H."""

    n: tuple
    h: int


@dataclass(frozen=True)
class AbelianGroupSpec:
    """A discrete abelian group: ``prod Z_mi`` (kind ``finite``) or ``Z^d`` (kind ``lattice``)."""

    kind: str
    factors: tuple = ()
    rank: int = 0

    def __post_init__(self):
        if self.kind == "finite":
            factors = tuple(int(m) for m in self.factors)
            if not factors:
                raise GroupStructureError("finite abelian group needs at least one invariant factor")
            if any(m < 1 for m in factors):
                raise GroupStructureError(f"invariant factors must be >= 1, got {factors}")
            if math.prod(factors) > MAX_FINITE_ORDER:
                raise GroupStructureError(f"group of order {math.prod(factors)} is too large")
            object.__setattr__(self, "factors", factors)
            object.__setattr__(self, "rank", len(factors))
        elif self.kind == "lattice":
            if int(self.rank) < 1:
                raise GroupStructureError(f"lattice rank must be >= 1, got {self.rank}")
            object.__setattr__(self, "rank", int(self.rank))
            object.__setattr__(self, "factors", ())
        else:
            raise GroupStructureError(f"unknown abelian group kind {self.kind!r}")

    @classmethod
    def finite(cls, *factors: int) -> "AbelianGroupSpec":
        return cls("finite", tuple(factors))

    @classmethod
    def lattice(cls, rank: int) -> "AbelianGroupSpec":
        return cls("lattice", rank=rank)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def dim(self) -> int:
        return self.rank

    @property
    def order(self):
        """Number of elements, or ``None`` for a lattice."""
        return math.prod(self.factors) if self.is_finite else None

    @property
    def shape(self) -> tuple:
        if not self.is_finite:
            raise UnsupportedOperationError("a lattice has no finite shape")
        return self.factors

    def zero(self) -> tuple:
        return (0,) * self.rank

    def reduce(self, n) -> tuple:
        n = tuple(int(x) for x in n)
        if len(n) != self.rank:
            raise GroupStructureError(f"expected an element with {self.rank} coordinates, got {n}")
        if self.is_finite:
            return tuple(x % m for x, m in zip(n, self.factors))
        return n

    def contains(self, n) -> bool:
        if len(n) != self.rank:
            return False
        if self.is_finite:
            return all(0 <= x < m for x, m in zip(n, self.factors))
        return True

    def add(self, a, b) -> tuple:
        return self.reduce(x + y for x, y in zip(a, b))

    def neg(self, a) -> tuple:
        return self.reduce(-x for x in a)

    def elements(self) -> list:
        """All elements in lexicographic order (finite kind only)."""
        if not self.is_finite:
            raise UnsupportedOperationError("cannot enumerate a lattice")
        return list(itertools.product(*(range(m) for m in self.factors)))

    def to_dict(self) -> dict:
        if self.is_finite:
            return {"kind": "finite", "factors": list(self.factors)}
        return {"kind": "lattice", "rank": self.rank}

    @classmethod
    def from_dict(cls, data: dict) -> "AbelianGroupSpec":
        kind = data.get("kind")
        if kind == "finite":
            return cls.finite(*data["factors"])
        if kind == "lattice":
            return cls.lattice(data["rank"])
        raise GroupStructureError(f"N.kind must be 'finite' or 'lattice', got {kind!r}")


class FiniteGroupTable:
    """A finite group given by its Cayley table, identity at index 0.

    The table is checked for closure, identity, inverses and associativity
    when constructed; instances are immutable afterwards.
    """

    __slots__ = ("_table", "_inverse", "_labels")

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence | None = None):
        tab = np.asarray(table)
        if tab.ndim != 2 or tab.shape[0] != tab.shape[1] or tab.shape[0] < 1:
            raise GroupStructureError("multiplication table must be a non-empty square array")
        if not np.issubdtype(tab.dtype, np.integer):
            raise GroupStructureError("multiplication table entries must be integer indices")
        k = tab.shape[0]
        if tab.min() < 0 or tab.max() >= k:
            raise GroupStructureError("multiplication table entries out of range")
        ident = np.arange(k)
        if not (np.array_equal(tab[0], ident) and np.array_equal(tab[:, 0], ident)):
            raise GroupStructureError("index 0 must be the identity element of H")
        inverse = np.empty(k, dtype=int)
        for h in range(k):
            hits = np.flatnonzero(tab[h] == 0)
            if len(hits) != 1 or tab[hits[0], h] != 0:
                raise GroupStructureError(f"element {h} has no two-sided inverse")
            inverse[h] = hits[0]
        # associativity, O(k^3) but k is small
        left = tab[tab[:, :, None], np.arange(k)[None, None, :]]
        right = tab[np.arange(k)[:, None, None], tab[None, :, :]]
        bad = np.argwhere(left != right)
        if len(bad):
            h, l, m = bad[0]
            raise GroupStructureError(f"table is not associative at ({h}, {l}, {m})")
        if labels is None:
            labels = list(range(k))
        labels = list(labels)
        if len(labels) != k or len(set(map(repr, labels))) != k:
            raise GroupStructureError("labels must be distinct and one per element")
        tab = tab.astype(int)
        tab.setflags(write=False)
        inverse.setflags(write=False)
        self._table = tab
        self._inverse = inverse
        self._labels = tuple(labels)

    @classmethod
    def cyclic(cls, m: int, labels=None) -> "FiniteGroupTable":
        idx = np.arange(m)
        return cls((idx[:, None] + idx[None, :]) % m, labels)

    @classmethod
    def trivial(cls) -> "FiniteGroupTable":
        return cls([[0]], labels=[1])

    @property
    def order(self) -> int:
        return self._table.shape[0]

    @property
    def table(self) -> np.ndarray:
        return self._table

    @property
    def labels(self) -> tuple:
        return self._labels

    def mul(self, h: int, l: int) -> int:
        return int(self._table[h, l])

    def inv(self, h: int) -> int:
        return int(self._inverse[h])

    def index(self, label) -> int:
        for i, lab in enumerate(self._labels):
            if lab == label:
                return i
        raise GroupStructureError(f"no element of H labelled {label!r}")

    def reordered(self, order: Sequence[int]) -> "FiniteGroupTable":
        """Same group with elements listed as ``order`` (must start with 0)."""
        order = list(order)
        if sorted(order) != list(range(self.order)) or order[0] != 0:
            raise GroupStructureError("reordering must be a permutation fixing the identity first")
        pos = np.empty(self.order, dtype=int)
        pos[order] = np.arange(self.order)
        new = pos[self._table[np.ix_(order, order)]]
        return FiniteGroupTable(new, [self._labels[i] for i in order])

    def __eq__(self, other):
        return (
            isinstance(other, FiniteGroupTable)
            and np.array_equal(self._table, other._table)
            and self._labels == other._labels
        )

    def __hash__(self):
        return hash((self._table.tobytes(), self._labels))

    def __repr__(self):
        return f"FiniteGroupTable(order={self.order}, labels={list(self._labels)})"


@dataclass(frozen=True)
class ActionSpec:
    """One integer matrix per element of H describing ``sigma(h)`` on N.

    For a finite N the matrices act modulo the invariant factors.
    """

    matrices: tuple

    def __post_init__(self):
        mats = []
        for m in self.matrices:
            arr = np.asarray(m)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise GroupStructureError("each sigma(h) must be a square matrix")
            if not np.all(np.asarray(arr, dtype=float) == np.round(np.asarray(arr, dtype=float))):
                raise GroupStructureError("sigma(h) matrices must have integer entries")
            mats.append(tuple(tuple(int(x) for x in row) for row in arr.astype(np.int64)))
        object.__setattr__(self, "matrices", tuple(mats))

    def matrix(self, h: int) -> np.ndarray:
        return np.array(self.matrices[h], dtype=np.int64)

    def apply(self, h: int, n: tuple) -> tuple:
        mat = self.matrices[h]
        return tuple(sum(a * x for a, x in zip(row, n)) for row in mat)


@dataclass(frozen=True)
class ActionVerdict:
    ok: bool
    message: str = ""
    pair: tuple | None = None
    element: int | None = None

    def __bool__(self):
        return self.ok


def _same_on_generators(a: np.ndarray, b: np.ndarray, N: AbelianGroupSpec) -> bool:
    if N.is_finite:
        mods = np.array(N.factors)[:, None]
        return bool(np.all((a - b) % mods == 0))
    return bool(np.array_equal(a, b))


def validate_action(spec: ActionSpec, H: FiniteGroupTable, N: AbelianGroupSpec) -> ActionVerdict:
    """Check that ``spec`` defines a homomorphism ``H -> Aut(N)``.

    The maps are Z-linear, so checking the composition law on the standard
    generators of N is enough; invertibility then follows from
    ``sigma(h) sigma(h^-1) = sigma(1) = id``.
    """
    if len(spec.matrices) != H.order:
        return ActionVerdict(False, f"need {H.order} matrices, got {len(spec.matrices)}")
    d = N.rank
    mats = [spec.matrix(h) for h in range(H.order)]
    for h, m in enumerate(mats):
        if m.shape != (d, d):
            return ActionVerdict(False, f"sigma({h}) has shape {m.shape}, expected {(d, d)}", element=h)
    if N.is_finite:
        mods = np.array(N.factors)
        for h, m in enumerate(mats):
            # column j maps Z_mj into N; well defined iff mj * column == 0 in N
            if np.any((m * mods[None, :]) % mods[:, None]):
                return ActionVerdict(False, f"sigma({h}) is not well defined modulo {N.factors}", element=h)
    else:
        for h, m in enumerate(mats):
            det = round(np.linalg.det(m.astype(float)))
            if abs(det) != 1:
                return ActionVerdict(
                    False, f"sigma({h}) has determinant {det}; not an automorphism of Z^{d}", element=h
                )
    if not _same_on_generators(mats[0], np.eye(d, dtype=np.int64), N):
        return ActionVerdict(False, "sigma(identity) is not the identity map", element=0)
    for h in range(H.order):
        for l in range(H.order):
            if not _same_on_generators(mats[h] @ mats[l], mats[H.mul(h, l)], N):
                return ActionVerdict(
                    False, f"sigma({h}) sigma({l}) != sigma({H.mul(h, l)})", pair=(h, l)
                )
    return ActionVerdict(True)


class SemidirectGroup:
    """The group ``N x_sigma H`` with product ``(n, h)(m, l) = (n + sigma(h) m, hl)``."""

    def __init__(self, N: AbelianGroupSpec, H: FiniteGroupTable, sigma: ActionSpec, name: str | None = None):
        verdict = validate_action(sigma, H, N)
        if not verdict:
            raise InvalidActionError(verdict.message)
        self.N = N
        self.H = H
        self.sigma = sigma
        self.name = name
        self._elements = None
        self._index = None

    # -- basic structure -------------------------------------------------
    @property
    def kappa(self) -> int:
        return self.H.order

    @property
    def is_finite(self) -> bool:
        return self.N.is_finite

    @property
    def order(self):
        return self.N.order * self.kappa if self.is_finite else None

    @property
    def identity(self) -> GammaElement:
        return GammaElement(self.N.zero(), 0)

    def element(self, n, h_label=None, *, h: int | None = None) -> GammaElement:
        """Build an element from N-coordinates and either an H label or an H index."""
        if isinstance(n, (int, np.integer)):
            n = (int(n),)
        if h is None:
            h = 0 if h_label is None else self.H.index(h_label)
        if not 0 <= h < self.kappa:
            raise GroupStructureError(f"H index {h} out of range")
        return GammaElement(self.N.reduce(n), int(h))

    def check(self, x) -> GammaElement:
        if not isinstance(x, tuple) or len(x) != 2:
            raise GroupStructureError(f"{x!r} is not a (n, h) pair")
        n, h = x
        if not (0 <= int(h) < self.kappa) or not self.N.contains(tuple(n)):
            raise GroupStructureError(f"{x!r} is not an element of this group")
        return GammaElement(tuple(n), int(h))

    def act(self, h: int, n: tuple) -> tuple:
        return self.N.reduce(self.sigma.apply(h, n))

    def mul(self, x: GammaElement, y: GammaElement) -> GammaElement:
        n, h = x
        m, l = y
        return GammaElement(self.N.add(n, self.act(h, m)), self.H.mul(h, l))

    def inv(self, x: GammaElement) -> GammaElement:
        n, h = x
        hi = self.H.inv(h)
        return GammaElement(self.N.neg(self.act(hi, n)), hi)

    # -- finite enumeration ----------------------------------------------
    def elements(self) -> list:
        if not self.is_finite:
            raise UnsupportedOperationError("enumeration requires a finite N")
        if self._elements is None:
            ns = self.N.elements()
            self._elements = [GammaElement(n, h) for h in range(self.kappa) for n in ns]
            self._index = {g: i for i, g in enumerate(self._elements)}
        return list(self._elements)

    def index(self, x) -> int:
        if self._index is None:
            self.elements()
        return self._index[GammaElement(tuple(x[0]), int(x[1]))]

    # -- derived groups --------------------------------------------------
    def reordered(self, order: Sequence[int]) -> "SemidirectGroup":
        """Same group with the non-identity elements of H permuted."""
        H2 = self.H.reordered(order)
        sigma2 = ActionSpec(tuple(self.sigma.matrices[i] for i in order))
        return SemidirectGroup(self.N, H2, sigma2, self.name)

    @property
    def is_infinite_dihedral(self) -> bool:
        return (
            not self.is_finite
            and self.N.rank == 1
            and self.kappa == 2
            and self.sigma.matrices[1] == ((-1,),)
        )

    def __eq__(self, other):
        return (
            isinstance(other, SemidirectGroup)
            and self.N == other.N
            and self.H == other.H
            and self.sigma == other.sigma
        )

    def __hash__(self):
        return hash((self.N, self.H, self.sigma))

    def __repr__(self):
        label = f"{self.name}: " if self.name else ""
        return f"SemidirectGroup({label}N={self.N.to_dict()}, kappa={self.kappa})"

    # -- serialisation ---------------------------------------------------
    def to_dict(self) -> dict:
        out = {
            "N": self.N.to_dict(),
            "H": {"table": self.H.table.tolist(), "labels": list(self.H.labels)},
            "sigma": {"matrices": [[list(r) for r in m] for m in self.sigma.matrices]},
        }
        if self.name:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SemidirectGroup":
        try:
            N = AbelianGroupSpec.from_dict(data["N"])
            H = FiniteGroupTable(data["H"]["table"], data["H"].get("labels"))
            sigma = ActionSpec(tuple(data["sigma"]["matrices"]))
        except KeyError as exc:
            raise GroupStructureError(f"group descriptor is missing field {exc}") from None
        return cls(N, H, sigma, data.get("name"))


def gamma_mul(G: SemidirectGroup, x, y) -> GammaElement:
    return G.mul(G.check(x), G.check(y))


def gamma_inv(G: SemidirectGroup, x) -> GammaElement:
    return G.inv(G.check(x))


def enumerate_gamma(G: SemidirectGroup) -> list:
    """H-major, identity first, then lexicographic n."""
    return G.elements()


def characters(N: AbelianGroupSpec) -> list:
    """Index tuples ``k`` of all characters of a finite N, lexicographic."""
    return N.elements()


def character_value(N: AbelianGroupSpec, k, n) -> complex:
    """``xi_k(n) = exp(2 pi i sum k_i n_i / m_i)``."""
    phase = sum(ki * ni / mi for ki, ni, mi in zip(k, n, N.factors))
    return complex(np.exp(2j * np.pi * phase))


def _negation_group(N: AbelianGroupSpec, name: str) -> SemidirectGroup:
    d = N.rank
    eye = np.eye(d, dtype=int)
    H = FiniteGroupTable.cyclic(2, labels=[1, -1])
    return SemidirectGroup(N, H, ActionSpec((eye, -eye)), name)


def infinite_dihedral() -> SemidirectGroup:
    """``D_inf = Z x Z_2`` with ``-1`` acting by negation; H labels are ``1`` and ``-1``."""
    return _negation_group(AbelianGroupSpec.lattice(1), "D_inf")


def finite_dihedral(m: int) -> SemidirectGroup:
    """``Z_m x Z_2`` with negation action (dihedral group of order 2m)."""
    return _negation_group(AbelianGroupSpec.finite(m), f"Z{m}xZ2")


def trivial_extension(N: AbelianGroupSpec) -> SemidirectGroup:
    """``N`` itself viewed as ``N x {1}``."""
    return SemidirectGroup(N, FiniteGroupTable.trivial(), ActionSpec((np.eye(N.rank, dtype=int),)))
