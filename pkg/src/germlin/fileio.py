"""Germ file format (JSON).

::

    {
      "n": 2, "s": 1, "N": 10,
      "backend": "exact",                # optional: "exact" | "floating"
      "precision": 53,                   # optional, floating bits
      "germs": [
        {"name": "f1", "components": [
            [{"k": [1, 0], "c": ["2", "0"]}, {"k": [2, 0], "c": ["1", "0"]}],
            [{"k": [0, 1], "c": ["1", "0"]}, {"k": [1, 1], "c": ["1", "0"]}]]}
      ],
      "psi": {...},                      # optional germ
      "conjugated": [...],               # optional list of germs
      "spectrum": [["2", "0"], ["1", "0"]],   # optional
      "tolerances": {"tol": 1e-9, "eps_res": 1e-10, "eps_zero": 1e-12}
    }

Coefficient literals are strings (or JSON numbers): integers, ``"p/q"``
rationals, or decimals. Rationals force the exact backend; a file that mixes
rationals with decimals is rejected.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import SchemaError
from .germ import GermMap
from .resonance import Spectrum
from .scalars import EXACT, Backend
from .series import PowerSeries

__all__ = [
    "GermFile",
    "load_germ_file",
    "parse_germ_file",
    "dump_germ_file",
    "germ_file_dict",
    "series_to_terms",
    "series_from_terms",
    "literal_kind",
    "resolve_backend",
    "digest",
]

_INT = re.compile(r"^[+-]?\d+$")
_RAT = re.compile(r"^[+-]?\d+\s*/\s*\d+$")
_DEC = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


@dataclass
class GermFile:
    n: int
    s: int
    N: int
    backend: Backend
    germs: list = field(default_factory=list)
    psi: GermMap | None = None
    conjugated: list = field(default_factory=list)
    spectrum: Spectrum | None = None
    tolerances: dict = field(default_factory=dict)

    def germ_maps(self) -> list[GermMap]:
        return [g for _, g in self.germs]


def literal_kind(value) -> str:
    """Classify a literal as ``"integer"``, ``"rational"`` or ``"decimal"``."""
    if isinstance(value, bool):
        raise SchemaError("booleans are not coefficient literals")
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "decimal"
    if not isinstance(value, str):
        raise SchemaError(f"coefficient literal must be a string or number, got {value!r}")
    text = value.strip()
    if _INT.match(text):
        return "integer"
    if _RAT.match(text):
        if int(text.split("/")[1]) == 0:
            raise SchemaError(f"zero denominator in {value!r}")
        return "rational"
    if _DEC.match(text):
        return "decimal"
    raise SchemaError(f"unparseable coefficient literal {value!r}")


def resolve_backend(kinds: set, requested: str | None, precision: int = 53) -> Backend:
    """Pick the backend for a set of literal kinds, rejecting mixtures."""
    if "rational" in kinds and "decimal" in kinds:
        raise SchemaError("file mixes rational 'p/q' and decimal literals")
    if requested is None:
        requested = "floating" if "decimal" in kinds else "exact"
    if requested == "exact":
        if "decimal" in kinds:
            raise SchemaError("decimal literals are not allowed with the exact backend; use 'p/q'")
        return EXACT
    if requested == "floating":
        if "rational" in kinds:
            raise SchemaError("rational 'p/q' literals force the exact backend")
        try:
            return Backend("floating", int(precision))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc
    raise SchemaError(f"unknown backend {requested!r}")


def _scalar(pair, backend: Backend):
    if isinstance(pair, (list, tuple)) and len(pair) == 2:
        re_, im_ = pair
    else:
        raise SchemaError(f"coefficient must be a [re, im] pair, got {pair!r}")
    return backend.scalar(_text(re_), _text(im_))


def _text(x):
    return x if isinstance(x, str) else repr(x) if isinstance(x, float) else str(x)


def _expect_int(d: dict, key: str, lo: int = 0) -> int:
    v = d.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise SchemaError(f"field {key!r} must be an integer >= {lo}")
    return v


def _collect_kinds(obj, kinds: set):
    """Walk every coefficient / spectrum literal to classify the file."""
    if isinstance(obj, dict):
        for key, value in obj.items():
            if key == "c":
                if isinstance(value, (list, tuple)):
                    for x in value:
                        kinds.add(literal_kind(x))
            else:
                _collect_kinds(value, kinds)
    elif isinstance(obj, list):
        for item in obj:
            _collect_kinds(item, kinds)


def series_from_terms(terms, n: int, N: int, backend: Backend) -> PowerSeries:
    if not isinstance(terms, list):
        raise SchemaError("a component must be a list of terms")
    coeffs = {}
    for term in terms:
        if not isinstance(term, dict) or set(term) != {"k", "c"}:
            raise SchemaError(f"term must be {{'k': [...], 'c': [re, im]}}, got {term!r}")
        k = term["k"]
        if (
            not isinstance(k, list)
            or len(k) != n
            or any(isinstance(e, bool) or not isinstance(e, int) or e < 0 for e in k)
        ):
            raise SchemaError(f"multi-index {k!r} must be {n} nonnegative integers")
        k = tuple(k)
        if sum(k) > N:
            raise SchemaError(f"multi-index {list(k)} exceeds truncation degree {N}")
        if k in coeffs:
            raise SchemaError(f"duplicate multi-index {list(k)}")
        coeffs[k] = _scalar(term["c"], backend)
    return PowerSeries(n, N, coeffs, backend)


def series_to_terms(p: PowerSeries) -> list[dict]:
    return [{"k": list(k), "c": list(p.backend.format(c))} for k, c in p.items()]


def _germ_from(obj, n: int, N: int, backend: Backend, where: str) -> tuple[str, GermMap]:
    if not isinstance(obj, dict) or "components" not in obj:
        raise SchemaError(f"{where}: germ must be an object with 'components'")
    name = obj.get("name", where)
    if not isinstance(name, str):
        raise SchemaError(f"{where}: name must be a string")
    comps = obj["components"]
    if not isinstance(comps, list) or len(comps) != n:
        raise SchemaError(f"{where}: expected {n} components, got {len(comps) if isinstance(comps, list) else comps!r}")
    series = [series_from_terms(t, n, N, backend) for t in comps]
    try:
        germ = GermMap(series)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from exc
    return name, germ


def parse_germ_file(data: dict, backend: str | None = None) -> GermFile:
    """Validate a decoded germ file; ``backend`` overrides the file's field."""
    if not isinstance(data, dict):
        raise SchemaError("germ file must be a JSON object")
    n = _expect_int(data, "n", 1)
    N = _expect_int(data, "N", 1)
    s = data.get("s", n)
    if isinstance(s, bool) or not isinstance(s, int) or not 1 <= s <= n:
        raise SchemaError(f"field 's' must be an integer in 1..{n}")
    kinds: set = set()
    _collect_kinds(data.get("germs"), kinds)
    _collect_kinds(data.get("psi"), kinds)
    _collect_kinds(data.get("conjugated"), kinds)
    for pair in data.get("spectrum") or []:
        if isinstance(pair, list):
            kinds.update(literal_kind(x) for x in pair)
    requested = backend or data.get("backend")
    be = resolve_backend(kinds, requested, data.get("precision", 53))
    germs_raw = data.get("germs")
    if not isinstance(germs_raw, list) or not germs_raw:
        raise SchemaError("field 'germs' must be a nonempty list")
    germs = [_germ_from(g, n, N, be, f"germs[{i}]") for i, g in enumerate(germs_raw)]
    psi = None
    if data.get("psi") is not None:
        psi = _germ_from(data["psi"], n, N, be, "psi")[1]
    conj = [_germ_from(g, n, N, be, f"conjugated[{i}]") for i, g in enumerate(data.get("conjugated") or [])]
    spectrum = None
    if data.get("spectrum") is not None:
        raw = data["spectrum"]
        if not isinstance(raw, list) or len(raw) != n:
            raise SchemaError(f"spectrum must list {n} [re, im] pairs")
        try:
            spectrum = Spectrum(tuple(_scalar(p, be) for p in raw), s)
        except ValueError as exc:
            raise SchemaError(f"spectrum: {exc}") from exc
    tolerances = data.get("tolerances") or {}
    if not isinstance(tolerances, dict) or any(
        k not in ("tol", "eps_res", "eps_zero") or isinstance(v, bool) or not isinstance(v, (int, float)) or v < 0
        for k, v in tolerances.items()
    ):
        raise SchemaError("tolerances must map tol / eps_res / eps_zero to nonnegative numbers")
    return GermFile(n, s, N, be, germs, psi, conj, spectrum, dict(tolerances))


def load_germ_file(path, backend: str | None = None) -> GermFile:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
    return parse_germ_file(data, backend)


def _germ_dict(name: str, g: GermMap) -> dict:
    return {"name": name, "components": [series_to_terms(c) for c in g.components]}


def germ_file_dict(gf: GermFile) -> dict:
    out = {"n": gf.n, "s": gf.s, "N": gf.N, "backend": gf.backend.kind}
    if not gf.backend.exact and gf.backend.precision != 53:
        out["precision"] = gf.backend.precision
    out["germs"] = [_germ_dict(name, g) for name, g in gf.germs]
    if gf.psi is not None:
        out["psi"] = _germ_dict("psi", gf.psi)
    if gf.conjugated:
        out["conjugated"] = [_germ_dict(name, g) for name, g in gf.conjugated]
    if gf.spectrum is not None:
        out["spectrum"] = [list(gf.backend.format(v)) for v in gf.spectrum.values]
    if gf.tolerances:
        out["tolerances"] = dict(gf.tolerances)
    return out


def dump_germ_file(gf: GermFile, path) -> None:
    Path(path).write_text(json.dumps(germ_file_dict(gf), indent=1) + "\n")


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def make_germ_file(germs: Sequence, s: int, N: int | None = None, **extra) -> GermFile:
    """Wrap in-memory germs (``GermMap`` or ``(name, GermMap)``) as a file."""
    named = [(f"f{i}", g) if isinstance(g, GermMap) else tuple(g) for i, g in enumerate(germs, 1)]
    first = named[0][1]
    return GermFile(first.n, s, N or first.order, first.backend, named, **extra)
