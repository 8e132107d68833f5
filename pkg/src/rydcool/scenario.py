"""Scenario documents: YAML parsing, schema validation and unit resolution.

A scenario is a YAML mapping with the keys ``kind``, ``name``, optional
``description`` and ``output``, and a ``parameters`` mapping whose schema
depends on the kind (see ``SCHEMAS``). Unknown keys are rejected and every
diagnostic carries the offending field and, where known, its line/column.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import yaml

from . import units
from .angular import HalfInt
from .errors import SchemaError

KINDS = ("expand", "swap-chain", "range", "hyperfine", "fidelity", "interactions")


# ---------------------------------------------------------------------------
# schema description


@dataclass(frozen=True)
class Field:
    parse: Callable[[Any], Any]
    required: bool = False
    default: Any = None
    many: bool = False  # accept a scalar or a list, always return a list


@dataclass(frozen=True)
class Rows:
    fields: dict
    required: bool = False


@dataclass(frozen=True)
class Section:
    fields: dict
    required: bool = False


def _int(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise units.UnitError(f"expected an integer, got {v!r}")
    return int(v)


def _str(v):
    if not isinstance(v, str):
        raise units.UnitError(f"expected a string, got {v!r}")
    return v


def _bool(v):
    if not isinstance(v, bool):
        raise units.UnitError(f"expected true/false, got {v!r}")
    return v


def _halfint(v):
    try:
        return HalfInt.of(v)
    except (TypeError, ValueError) as exc:
        raise units.UnitError(str(exc)) from None


def _sign(v):
    if v in (1, -1, "+", "-"):
        return 1 if v in (1, "+") else -1
    raise units.UnitError(f"expected +1 or -1, got {v!r}")


F = Field
DIMLESS = units.dimensionless

SCHEMAS = {
    "expand": {
        "potentials": Rows({
            "label": F(_str, required=True),
            "alpha": F(DIMLESS, required=True),
            "a": F(DIMLESS, default=1.0),
            "b": F(DIMLESS, default=0.0),
            "c": F(DIMLESS, default=0.0),
            "amplitude": F(DIMLESS, default=1.0),
            "r": F(units.length, default=1.0),
            "expected": F(DIMLESS, many=True),
        }),
        "fd_step": F(DIMLESS, default=1e-4),
        "anharmonicity": Section({
            "trap": F(units.frequency, required=True),
            "r": F(units.length, default=1.0),
            "pairs": Rows({
                "first": F(_str, required=True),
                "second": F(_str, required=True),
                "expected": F(DIMLESS),
            }, required=True),
        }),
        "couplings": Rows({
            "label": F(_str, required=True),
            "molecule": F(_str, required=True),
            "atom": F(_str, required=True),
            "trap": F(units.frequency, required=True),
            "c6": F(units.dispersion(6), required=True),
            "a": F(DIMLESS, default=1.0),
            "b": F(DIMLESS, default=0.0),
            "c": F(DIMLESS, default=0.0),
            "r": F(units.length, default=1.0),
            "expected_G_z": F(units.frequency),
        }),
    },
    "swap-chain": {
        "N": F(_int, required=True, many=True),
        "eta": F(DIMLESS, default=[1.0], many=True),
        "alpha": F(DIMLESS, default=[6.0], many=True),
        "omega_over_G": F(DIMLESS, required=True, many=True),
        "G_am": F(units.frequency, default=1.0),
        "G_aa_over_G_am": F(DIMLESS, default=1.0),
        "G_mm_over_G_am": F(DIMLESS, default=1.0),
        "occupation": F(DIMLESS, default=20.0),
        "initial": F(_str, default="thermal"),
        "rwa": F(_bool, default=False),
    },
    "range": {
        "threshold_target": F(DIMLESS, default=0.05),
        "rows": Rows({
            "label": F(_str, required=True),
            "power": F(DIMLESS, required=True),
            "r_ref": F(units.length, default=1.0),
            "ratio": F(DIMLESS),
            "G_ref": F(units.frequency),
            "gamma_r": F(units.frequency),
            "leroy_half": F(units.length, default=0.0),
            "G_leroy": F(units.frequency),
            "ratio_leroy": F(DIMLESS),
            "expected_r095": F(units.length),
        }, required=True),
    },
    "hyperfine": {
        "molecule": F(_str, required=True),
        "N": F(_int, default=[0, 1, 2, 3], many=True),
        "B": F(units.magnetic_field, default=0.0),
        "m_N": F(_int),
        "dressing": Section({
            "N_low": F(_int, required=True),
            "N_high": F(_int, required=True),
            "rabi": F(units.frequency, required=True),
            "m_N": F(_int),
        }),
    },
    "fidelity": {
        "a2": F(DIMLESS, required=True, many=True),
        "n": F(DIMLESS, required=True, many=True),
        "epsilon": F(DIMLESS, required=True, many=True),
    },
    "interactions": {
        "channels": Rows({
            "label": F(_str, required=True),
            "N": F(_int, required=True),
            "Ntilde": F(_int, required=True),
            "J": F(_halfint, required=True),
            "Jtilde": F(_halfint, required=True),
            "Ltilde": F(_int, default=1),
            "d_mol": F(units.dipole, default=0.0),
            "d_atom": F(units.dipole, default=0.0),
            "energy_defect": F(units.frequency),
            "c6": F(units.dispersion(6)),
            "intermediate_m": F(_halfint),
        }, required=True),
        "theta": F(units.angle, default=math.pi / 2),
        "phi": F(units.angle, default=0.0),
        "molecular_sign": F(_sign, default=1),
        "mixing_r": F(units.length),
        "expected_total": F(units.dispersion(6)),
    },
}

TOP_LEVEL = {"kind", "name", "description", "output", "parameters"}


# ---------------------------------------------------------------------------
# YAML with marks


def _compose(text: str):
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        data = loader.construct_document(node) if node is not None else None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None) or getattr(exc, "context_mark", None)
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise SchemaError(f"malformed YAML: {getattr(exc, 'problem', exc)}", line, col) from None
    finally:
        loader.dispose()
    marks: dict = {}  # path -> value mark; ("key",) + path -> key mark

    def walk(n, path):
        marks[path] = n.start_mark
        if isinstance(n, yaml.MappingNode):
            for k, v in n.value:
                marks[("key",) + path + (k.value,)] = k.start_mark
                walk(v, path + (k.value,))
        elif isinstance(n, yaml.SequenceNode):
            for i, v in enumerate(n.value):
                walk(v, path + (i,))

    if node is not None:
        walk(node, ())
    return data, marks


class _Ctx:
    def __init__(self, marks):
        self.marks = marks

    def fail(self, msg, path, at_key=False):
        mark = self.marks.get(("key",) + tuple(path) if at_key else tuple(path))
        name = ".".join(str(p) for p in path) or "<document>"
        if mark is None:
            raise SchemaError(msg, field=name)
        raise SchemaError(msg, mark.line + 1, mark.column + 1, name)


def _check_mapping(ctx, value, path):
    if not isinstance(value, dict):
        ctx.fail("expected a mapping", path)


def _validate_fields(ctx, schema: dict, data: dict, path: tuple) -> dict:
    _check_mapping(ctx, data, path)
    for key in data:
        if key not in schema:
            ctx.fail(f"unknown key {key!r} (allowed: {', '.join(sorted(schema))})", path + (key,), at_key=True)
    out = {}
    for key, spec in schema.items():
        p = path + (key,)
        present = key in data and data[key] is not None
        if isinstance(spec, Rows):
            if not present:
                if spec.required:
                    ctx.fail(f"missing required key '{key}'", path)
                out[key] = []
                continue
            rows = data[key]
            if not isinstance(rows, list) or not rows:
                ctx.fail("expected a non-empty list of mappings", p)
            out[key] = [_validate_fields(ctx, spec.fields, row, p + (i,)) for i, row in enumerate(rows)]
        elif isinstance(spec, Section):
            if not present:
                if spec.required:
                    ctx.fail(f"missing required key '{key}'", path)
                out[key] = None
                continue
            out[key] = _validate_fields(ctx, spec.fields, data[key], p)
        else:
            if not present:
                if spec.required:
                    ctx.fail(f"missing required key '{key}'", path)
                out[key] = spec.default
                continue
            raw = data[key]
            try:
                if spec.many:
                    items = raw if isinstance(raw, list) else [raw]
                    if not items:
                        raise units.UnitError("expected at least one value")
                    out[key] = [spec.parse(v) for v in items]
                else:
                    out[key] = spec.parse(raw)
            except (units.UnitError, ValueError, TypeError) as exc:
                ctx.fail(str(exc), p)
    return out


@dataclass(frozen=True)
class Scenario:
    kind: str
    name: str
    parameters: dict
    output_path: str
    description: str = ""
    source_hash: str = ""
    source: Optional[str] = None
    marks: dict = field(default_factory=dict, repr=False, compare=False)


def parse_scenario(text: str, source: Optional[str] = None) -> Scenario:
    data, marks = _compose(text)
    ctx = _Ctx(marks)
    if not isinstance(data, dict):
        ctx.fail("scenario must be a mapping", ())
    for key in data:
        if key not in TOP_LEVEL:
            ctx.fail(f"unknown key {key!r} (allowed: {', '.join(sorted(TOP_LEVEL))})", (key,), at_key=True)
    kind = data.get("kind")
    if kind is None:
        ctx.fail("missing required key 'kind'", ())
    if kind not in SCHEMAS:
        ctx.fail(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", ("kind",))
    name = data.get("name") or (Path(source).stem if source else kind)
    if not isinstance(name, str):
        ctx.fail("name must be a string", ("name",))
    params = data.get("parameters")
    if params is None:
        ctx.fail("missing required key 'parameters'", ())
    resolved = _validate_fields(ctx, SCHEMAS[kind], params, ("parameters",))
    _cross_checks(ctx, kind, resolved)
    output = data.get("output") or f"{name}.csv"
    if not isinstance(output, str) or "/" in output or "\\" in output:
        ctx.fail("output must be a plain file name", ("output",))
    return Scenario(
        kind=kind,
        name=name,
        parameters=resolved,
        output_path=output,
        description=str(data.get("description") or ""),
        source_hash=hashlib.sha256(text.encode()).hexdigest(),
        source=source,
        marks=marks,
    )


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read scenario {p}: {exc.strerror}") from None
    return parse_scenario(text, str(p))


def _cross_checks(ctx: _Ctx, kind: str, params: dict) -> None:
    base = ("parameters",)
    if kind == "range":
        for i, row in enumerate(params["rows"]):
            p = base + ("rows", i)
            if row["ratio"] is None:
                if row["G_ref"] is None:
                    ctx.fail("row needs either 'ratio' or 'G_ref' with 'gamma_r'", p)
                if row["gamma_r"] is None:
                    ctx.fail("missing required key 'gamma_r' (needed when 'ratio' is absent)", p)
    elif kind == "expand":
        if not (params["potentials"] or params["anharmonicity"] or params["couplings"]):
            ctx.fail("expand scenario needs 'potentials', 'anharmonicity' or 'couplings'", base)
        for i, row in enumerate(params["potentials"]):
            if row["expected"] is not None and len(row["expected"]) != 4:
                ctx.fail("expected must list four coefficients (x, y linear, y, z)", base + ("potentials", i, "expected"))
    elif kind == "interactions":
        for i, row in enumerate(params["channels"]):
            if row["c6"] is None and row["energy_defect"] is None:
                ctx.fail("channel needs 'energy_defect' (with dipoles) or an explicit 'c6'", base + ("channels", i))
    elif kind == "swap-chain":
        if params["initial"] not in ("thermal", "coherent"):
            ctx.fail("initial must be 'thermal' or 'coherent'", base + ("initial",))
