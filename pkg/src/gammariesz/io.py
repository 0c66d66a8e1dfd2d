"""JSON / CSV interchange for groups, signals, generators, samples and reports.

Signals::

    {"group": "dinf" | "dihedral-4" | {<descriptor>},
     "phases": {"<h label>": [{"n": [..], "re": .., "im": ..}, ...]}}

Exact rationals are written as ``{"num": p, "den": q}``; floats use Python's
shortest round-trip repr, so every emitted file re-parses to the same values.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import numbers
import re
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exceptions import FormatError, GammaRieszError
from .group import GammaElement, SemidirectGroup, finite_dihedral, infinite_dihedral
from .sampling import PiecewisePolynomial
from .signal import GammaSignal
from .validation import as_number

__all__ = [
    "group_from_json",
    "group_to_json",
    "signal_from_json",
    "signal_to_json",
    "generator_from_json",
    "generator_to_json",
    "samples_to_csv",
    "samples_from_csv",
    "series_to_csv",
    "to_jsonable",
    "read_json",
    "write_json",
]

_DIHEDRAL = re.compile(r"^(?:dihedral-(\d+)|Z(\d+)xZ2)$")


def group_from_json(ref) -> SemidirectGroup:
    """Builtin name (``dinf``, ``D_inf``, ``dihedral-<m>``, ``Z<m>xZ2``) or an inline descriptor."""
    if isinstance(ref, str):
        if ref.lower() in ("dinf", "d_inf", "d-inf"):
            return infinite_dihedral()
        m = _DIHEDRAL.match(ref)
        if m:
            return finite_dihedral(int(m.group(1) or m.group(2)))
        raise FormatError(f"field 'group': unknown builtin group {ref!r}")
    if isinstance(ref, dict):
        try:
            return SemidirectGroup.from_dict(ref)
        except GammaRieszError as exc:
            raise FormatError(f"field 'group': {exc}") from None
        except (TypeError, ValueError) as exc:
            raise FormatError(f"field 'group': malformed descriptor ({exc})") from None
    raise FormatError("field 'group' must be a builtin name or a descriptor object")


def group_to_json(G: SemidirectGroup):
    if G == infinite_dihedral():
        return "dinf"
    if G.is_finite and G.N.rank == 1:
        m = G.N.factors[0]
        if G == finite_dihedral(m):
            return f"dihedral-{m}"
    return G.to_dict()


def _scalar_to_json(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else {"num": v.numerator, "den": v.denominator}
    if isinstance(v, numbers.Integral):
        return int(v)
    return float(v)


def _entry_to_json(n, v) -> dict:
    out = {"n": [int(i) for i in n]}
    if isinstance(v, complex) or (isinstance(v, np.complexfloating)):
        out["re"] = float(v.real)
        if v.imag != 0:
            out["im"] = float(v.imag)
    else:
        out["re"] = _scalar_to_json(v)
    return out


def signal_to_json(f: GammaSignal) -> dict:
    G = f.group
    phases = {str(lbl): [] for lbl in G.H.labels}
    for gam, v in f.items():
        if G.is_finite:
            v = complex(v)
            if v.imag == 0:
                v = v.real
        phases[str(G.H.labels[gam.h])].append(_entry_to_json(gam.n, v))
    return {"group": group_to_json(G), "phases": phases}


def signal_from_json(data) -> GammaSignal:
    if not isinstance(data, dict):
        raise FormatError("signal file must hold a JSON object")
    if "group" not in data:
        raise FormatError("signal is missing field 'group'")
    if "phases" not in data or not isinstance(data["phases"], dict):
        raise FormatError("signal is missing object field 'phases'")
    G = group_from_json(data["group"])
    lookup = {str(lbl): i for i, lbl in enumerate(G.H.labels)}
    items = []
    for key, entries in data["phases"].items():
        if key not in lookup:
            raise FormatError(f"field 'phases': unknown H label {key!r} (expected one of {sorted(lookup)})")
        h = lookup[key]
        if not isinstance(entries, list):
            raise FormatError(f"field 'phases.{key}' must be a list")
        for i, e in enumerate(entries):
            where = f"phases.{key}[{i}]"
            if not isinstance(e, dict) or "n" not in e:
                raise FormatError(f"field '{where}' needs an 'n' entry")
            n = e["n"]
            n = [n] if isinstance(n, int) else n
            if not isinstance(n, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in n):
                raise FormatError(f"field '{where}.n' must be a list of integers")
            if len(n) != G.N.rank:
                raise FormatError(f"field '{where}.n' has length {len(n)}, expected {G.N.rank}")
            try:
                re_ = as_number(e.get("re", 0))
                im_ = as_number(e.get("im", 0))
            except FormatError as exc:
                raise FormatError(f"field '{where}': {exc}") from None
            v = re_ if im_ == 0 else complex(re_) + 1j * float(im_)
            items.append((GammaElement(tuple(n), h), v))
    return GammaSignal.from_items(G, items)


def generator_to_json(phi: PiecewisePolynomial) -> dict:
    d = phi.to_dict()
    for piece in d["pieces"]:
        piece["interval"] = [_scalar_to_json(x) for x in piece["interval"]]
        piece["coefficients"] = [_scalar_to_json(x) for x in piece["coefficients"]]
    return d


def generator_from_json(data) -> PiecewisePolynomial:
    """``{"pieces": [{"interval": [a, b], "coefficients": [c0, c1, ...]}], "continuous": bool}``."""
    if isinstance(data, list):
        data = {"pieces": data}
    if not isinstance(data, dict) or not isinstance(data.get("pieces"), list):
        raise FormatError("generator needs a 'pieces' list")
    pieces = []
    for i, p in enumerate(data["pieces"]):
        try:
            a, b = (as_number(x) for x in p["interval"])
            coeffs = [as_number(c) for c in p["coefficients"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"field 'pieces[{i}]': needs 'interval' [a, b] and 'coefficients' ({exc})") from None
        pieces.append((a, b, coeffs))
    return PiecewisePolynomial(pieces, continuous=bool(data.get("continuous", False)))


def _value_to_text(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return repr(v.real) if v.imag == 0 else repr(v)
    return repr(float(v))


def _text_to_value(s: str):
    s = s.strip()
    try:
        if "j" in s:
            return complex(s.strip("()"))
        return as_number(s)
    except (ValueError, FormatError):
        raise FormatError(f"cannot parse sample value {s!r}") from None


def samples_to_csv(samples: GammaSignal) -> str:
    """Rows ``n,h,value``; ``n`` is ``i;j;...`` for rank > 1, ``h`` is the H label."""
    G = samples.group
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "h", "value"])
    for gam, v in sorted(samples.items(), key=lambda it: (it[0].h, it[0].n)):
        w.writerow([";".join(str(i) for i in gam.n), G.H.labels[gam.h], _value_to_text(v)])
    return buf.getvalue()


def samples_from_csv(text: str, group: SemidirectGroup) -> GammaSignal:
    lookup = {str(lbl): i for i, lbl in enumerate(group.H.labels)}
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["n", "h", "value"]:
        raise FormatError("samples CSV must start with the header 'n,h,value'")
    items = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise FormatError(f"samples CSV line {lineno}: expected 3 fields, got {len(row)}")
        try:
            n = tuple(int(x) for x in row[0].split(";"))
        except ValueError:
            raise FormatError(f"samples CSV line {lineno}: field 'n' must be integers") from None
        if len(n) != group.N.rank:
            raise FormatError(f"samples CSV line {lineno}: field 'n' has {len(n)} components")
        if row[1].strip() not in lookup:
            raise FormatError(f"samples CSV line {lineno}: unknown H label {row[1]!r}")
        items.append((GammaElement(n, lookup[row[1].strip()]), _text_to_value(row[2])))
    return GammaSignal.from_items(group, items)


def series_to_csv(t, values, header=("t", "value")) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for ti, vi in zip(t, values):
        w.writerow([repr(float(ti)), _value_to_text(vi)])
    return buf.getvalue()


def to_jsonable(obj):
    """Recursively convert reports to JSON-safe values (Fractions as num/den, NaN as null)."""
    if is_dataclass(obj) and not isinstance(obj, type):
        obj = asdict(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return _scalar_to_json(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        x = float(obj)
        return None if math.isnan(x) else x if math.isfinite(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, numbers.Complex):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, GammaSignal):
        return signal_to_json(obj)
    return obj


def read_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def write_json(obj, path=None) -> str:
    text = json.dumps(to_jsonable(obj), indent=2, allow_nan=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
