"""Input validation: model, nesting and character documents.

Every violation is reported as a SchemaError carrying a JSON pointer to the
offending field.  Rationals travel as strings ("p/q" or "p") so no float ever
enters the pipeline.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import TextIO

from .amplitudes import InteractionModel, SymTensor
from .errors import SchemaError
from .hopf import NestingSpec
from .renorm import Character
from .wick import BilinearForm, Covector


def load_json(path: str, stdin: TextIO | None = None):
    """Read a JSON document from a file, or from stdin when path is '-'."""
    if path == "-":
        stream = stdin if stdin is not None else sys.stdin
        text = stream.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read {path}: {exc}", pointer="")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON in {path}: {exc}", pointer="")


def _rational(value, pointer: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SchemaError("rationals must be strings like \"p/q\" (or ints)",
                          pointer=pointer)
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {value!r}: {exc}", pointer=pointer)


def _parse_index(key: str, pointer: str) -> tuple:
    text = key.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    parts = [p for p in text.split(",") if p.strip() != ""]
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise SchemaError(f"bad multi-index key {key!r}", pointer=pointer)


def parse_model(obj) -> tuple:
    """(InteractionModel, warnings).  Asymmetric vertex coefficient maps are
    accepted after symmetrization, with a warning record."""
    if not isinstance(obj, dict):
        raise SchemaError("model document must be an object", pointer="")
    try:
        dim = int(obj["dimension"])
    except (KeyError, TypeError, ValueError):
        raise SchemaError("model needs an integer 'dimension'",
                          pointer="/dimension")
    rows = obj.get("bilinear")
    if not isinstance(rows, list) or len(rows) != dim:
        raise SchemaError(f"'bilinear' must be a {dim}x{dim} matrix",
                          pointer="/bilinear")
    matrix = tuple(
        tuple(_rational(x, f"/bilinear/{i}/{j}") for j, x in enumerate(row))
        for i, row in enumerate(rows))
    try:
        bilinear = BilinearForm(matrix)
    except Exception as exc:
        raise SchemaError(f"bad bilinear form: {exc}", pointer="/bilinear")

    forms = []
    for i, comp in enumerate(obj.get("external", [])):
        if not isinstance(comp, list) or len(comp) != dim:
            raise SchemaError(f"external form {i} must have {dim} components",
                              pointer=f"/external/{i}")
        forms.append(Covector(tuple(
            _rational(x, f"/external/{i}/{j}") for j, x in enumerate(comp))))

    warnings = []
    tensors = {}
    for m_key, cmap in obj.get("vertices", {}).items():
        ptr = f"/vertices/{m_key}"
        try:
            m = int(m_key)
        except ValueError:
            raise SchemaError(f"vertex valence {m_key!r} is not an integer",
                              pointer=ptr)
        if m < 1:
            raise SchemaError("vertex valence must be >= 1", pointer=ptr)
        if not isinstance(cmap, dict) or not cmap:
            raise SchemaError("vertex tensor must be a non-empty object",
                              pointer=ptr)
        coeffs = {}
        for key, value in cmap.items():
            idx = _parse_index(key, f"{ptr}/{key}")
            if len(idx) != m:
                raise SchemaError(
                    f"index {key!r} has {len(idx)} slots, valence is {m}",
                    pointer=f"{ptr}/{key}")
            if any(not 0 <= i < dim for i in idx):
                raise SchemaError(f"index {key!r} outside dimension {dim}",
                                  pointer=f"{ptr}/{key}")
            if idx in coeffs:
                raise SchemaError(f"duplicate index {key!r}",
                                  pointer=f"{ptr}/{key}")
            coeffs[idx] = _rational(value, f"{ptr}/{key}")
        tensor = SymTensor(m, dim, coeffs)
        if not tensor.is_symmetric_input(coeffs):
            warnings.append({
                "pointer": ptr,
                "message": f"vertex tensor of valence {m} was not symmetric; "
                           "symmetrized values are used",
            })
        tensors[m] = tensor

    model = InteractionModel(bilinear, tuple(forms), tensors)
    return model, warnings


def parse_nesting(obj) -> NestingSpec:
    return NestingSpec.from_json(obj)


def parse_character(obj, corpus: NestingSpec | None = None) -> Character:
    char = Character.from_json(obj)
    if corpus is not None:
        for gen in corpus:
            if gen.gid not in char.values:
                raise SchemaError(
                    f"character misses a value for generator {gen.gid!r}",
                    pointer=f"/values/{gen.gid}")
        for gid in char.values:
            if gid not in corpus.by_id:
                raise SchemaError(
                    f"character value for unknown generator {gid!r}",
                    pointer=f"/values/{gid}")
    return char


def model_to_json(model: InteractionModel) -> dict:
    from .scalars import rational_to_string
    return {
        "dimension": model.dimension,
        "bilinear": [[rational_to_string(x) for x in row]
                     for row in model.bilinear.matrix],
        "external": [[rational_to_string(x) for x in f.components]
                     for f in model.external_forms],
        "vertices": {
            str(m): {"(" + ",".join(map(str, idx)) + ")":
                     rational_to_string(v)
                     for idx, v in tensor.sorted_items()}
            for m, tensor in model.vertex_tensors.items()
        },
    }
