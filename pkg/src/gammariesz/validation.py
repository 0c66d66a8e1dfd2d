"""Input validation helpers shared by the estimators, the CLI and the file readers."""

from __future__ import annotations

import numbers
from fractions import Fraction

from .exceptions import FormatError, GroupStructureError, InfeasibleSamplingError
from .group import SemidirectGroup
from .signal import GammaSignal
from .spectral import Tolerance

__all__ = [
    "check_signal",
    "check_group_match",
    "check_tolerance",
    "check_sampling_offset",
    "check_grid_size",
    "as_fraction",
    "as_number",
]


def check_signal(f, group: SemidirectGroup | None = None, name: str = "signal") -> GammaSignal:
    """Return ``f`` if it is a GammaSignal (on ``group`` when given), else raise TypeError."""
    if not isinstance(f, GammaSignal):
        raise TypeError(f"{name} must be a GammaSignal, got {type(f).__name__}")
    if group is not None:
        check_group_match(f.group, group, name)
    return f


def check_group_match(a: SemidirectGroup, b: SemidirectGroup, name: str = "signal") -> None:
    if a != b:
        raise GroupStructureError(f"{name} lives on {a!r}, expected {b!r}")


def check_tolerance(det_floor=1e-10, atol=1e-9, rtol=1e-9, max_refine=6) -> Tolerance:
    """Build a :class:`Tolerance`, rejecting negative or non-finite entries."""
    for label, v in (("det_floor", det_floor), ("atol", atol), ("rtol", rtol)):
        if not isinstance(v, numbers.Real) or not v >= 0 or v == float("inf"):
            raise ValueError(f"{label} must be a finite non-negative number, got {v!r}")
    if not isinstance(max_refine, numbers.Integral) or max_refine < 0:
        raise ValueError(f"max_refine must be a non-negative integer, got {max_refine!r}")
    return Tolerance(det_floor=float(det_floor), atol=float(atol), rtol=float(rtol), max_refine=int(max_refine))


def check_grid_size(size) -> int | None:
    if size is None:
        return None
    if not isinstance(size, numbers.Integral) or size < 2 or size & (size - 1):
        raise ValueError(f"grid size must be a power of two >= 2, got {size!r}")
    return int(size)


def as_fraction(x) -> Fraction:
    """Parse ``x`` as an exact rational: ints, Fractions, ``"a/b"`` or decimal strings, ``{"num", "den"}``.

    Floats are converted through their shortest decimal repr, so ``0.25`` gives ``1/4``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise FormatError(f"expected a number, got {x!r}")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise FormatError(f"cannot parse {x!r} as a rational number") from None
    if isinstance(x, dict):
        try:
            return Fraction(int(x["num"]), int(x["den"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError):
            raise FormatError(f"bad rational {x!r}: need integer 'num' and nonzero 'den'") from None
    raise FormatError(f"cannot interpret {x!r} as a rational number")


def as_number(x):
    """JSON scalar to a Python number, keeping ints and rationals exact."""
    if isinstance(x, bool):
        raise FormatError(f"expected a number, got {x!r}")
    if isinstance(x, (int, float, Fraction)):
        return x
    if isinstance(x, dict) and "num" in x:
        return as_fraction(x)
    if isinstance(x, str):
        if "/" in x:
            return as_fraction(x)
        try:
            return int(x)
        except ValueError:
            pass
        try:
            return float(x)
        except ValueError:
            pass
        try:
            return complex(x)
        except ValueError:
            raise FormatError(f"cannot parse {x!r} as a number") from None
    raise FormatError(f"cannot interpret {x!r} as a number")


def check_sampling_offset(p) -> Fraction:
    """Sampling offset for the D_inf spline case: a rational in ``(0, 1/2)``."""
    p = as_fraction(p)
    if not 0 < p < Fraction(1, 2):
        raise InfeasibleSamplingError(f"p must lie in (0, 1/2), got {p}")
    return p
