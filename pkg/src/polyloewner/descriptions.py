"""JSON descriptions of generators and piecewise fields.

A description is a plain dict with a ``kind`` tag naming one of the
supported constructions; nested constructions (rotations of catalog
entries, combinations of product forms, ...) nest their descriptions.
The same shapes appear in generator provenance, so the dicts a report
emits can be fed back in.

Field schedules are lists of ``{"until": t, "generator": ...}`` entries;
an entry without ``until`` is the tail generator, and when every entry
has a breakpoint the pure dilation tail is appended automatically.
"""

from __future__ import annotations

import json
from typing import Union

from .catalog import catalog_generator, catalog_get
from .evolution import HerglotzField
from .generators import (
    MEMBERSHIP_TOL,
    REFERENCE_GRID,
    AtomicMeasure,
    Generator,
    GridSpec,
    convex_combination,
    dilation_generator,
    from_starlike,
    product_form,
    rotate_generator,
    shear_linear,
    shear_quadratic,
)
from .jets import DomainError, JetMap, Normalization, jet_from_json

__all__ = [
    "generator_from_json",
    "field_from_json",
    "load_generator",
    "load_field",
]

GENERATOR_KINDS = (
    "catalog",
    "dilation",
    "rotation",
    "product-form",
    "convex-combination",
    "polynomial",
    "from-starlike",
    "shear-linear",
    "shear-quadratic",
)


def _require(obj: dict, key: str, kind: str):
    if key not in obj:
        raise DomainError(f"{kind!r} description is missing the {key!r} field")
    return obj[key]


def _polynomial_map(obj: dict, normalization: Normalization) -> JetMap:
    comps = tuple(jet_from_json(c) for c in _require(obj, "components", "polynomial"))
    return JetMap(comps, normalization)


def _starlike_source(obj: dict):
    kind = _require(obj, "kind", "from-starlike map")
    if kind == "catalog":
        return catalog_get(
            _require(obj, "name", kind), dim=obj.get("dim"), degree=int(obj.get("degree", 4))
        )
    if kind == "polynomial":
        return _polynomial_map(obj, Normalization.UNIVALENT)
    raise DomainError(f"a starlike source must be 'catalog' or 'polynomial', got {kind!r}")


def generator_from_json(obj: Union[dict, str], *, default_degree: int = 4) -> Generator:
    """Build a generator from its JSON description (dict or JSON text)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise DomainError("generator description must be a JSON object")
    if "provenance" in obj and "kind" not in obj:
        obj = obj["provenance"]
    kind = _require(obj, "kind", "generator")
    degree = int(obj.get("degree", default_degree))

    if kind == "catalog":
        return catalog_generator(
            _require(obj, "name", kind), dim=obj.get("dim"), degree=degree
        )
    if kind == "dilation":
        return dilation_generator(int(_require(obj, "dim", kind)), degree=degree)
    if kind == "rotation":
        base = generator_from_json(_require(obj, "base", kind), default_degree=default_degree)
        return rotate_generator(base, [float(a) for a in _require(obj, "angles", kind)])
    if kind == "product-form":
        selectors = [int(s) for s in _require(obj, "selectors", kind)]
        raw = _require(obj, "measures", kind)
        measures = [None if m is None else AtomicMeasure.from_json(m) for m in raw]
        return product_form(selectors, measures, degree=degree)
    if kind in ("convex-combination", "convex-combo"):
        parts = [
            generator_from_json(p, default_degree=default_degree)
            for p in _require(obj, "parts", kind)
        ]
        return convex_combination(parts, [float(w) for w in _require(obj, "weights", kind)])
    if kind == "polynomial":
        jet = _polynomial_map(obj, Normalization.GENERATOR)
        return Generator(jet, jet, {"kind": "polynomial", "components": obj["components"]})
    if kind == "from-starlike":
        return from_starlike(_starlike_source(_require(obj, "map", kind)), degree=degree)
    if kind in ("shear-linear", "shear-quadratic"):
        base = generator_from_json(_require(obj, "base", kind), default_degree=default_degree)
        fn = shear_linear if kind == "shear-linear" else shear_quadratic
        return fn(base)
    raise DomainError(f"unknown generator kind {kind!r}; known: {', '.join(GENERATOR_KINDS)}")


def field_from_json(
    obj: Union[dict, list, str],
    *,
    default_degree: int = 4,
    verify_membership: bool = True,
    grid: GridSpec = REFERENCE_GRID,
    tol: float = MEMBERSHIP_TOL,
) -> HerglotzField:
    """Build a piecewise field from a schedule description."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    schedule = obj.get("schedule") if isinstance(obj, dict) else obj
    if not isinstance(schedule, list) or not schedule:
        raise DomainError("field description needs a nonempty 'schedule' list")
    gens = []
    breaks = []
    for i, entry in enumerate(schedule):
        if not isinstance(entry, dict) or "generator" not in entry:
            raise DomainError(f"schedule entry {i} must be an object with a 'generator'")
        gens.append(generator_from_json(entry["generator"], default_degree=default_degree))
        if "until" in entry:
            breaks.append(float(entry["until"]))
        elif i != len(schedule) - 1:
            raise DomainError("only the final schedule entry may omit 'until'")
    if len(breaks) == len(gens):
        gens.append(dilation_generator(gens[0].dim, degree=max(default_degree, gens[0].degree)))
    return HerglotzField.build(
        gens, breaks, verify_membership=verify_membership, grid=grid, tol=tol
    )


def load_generator(path: str, **kwargs) -> Generator:
    with open(path, "r", encoding="utf-8") as fh:
        return generator_from_json(json.load(fh), **kwargs)


def load_field(path: str, **kwargs) -> HerglotzField:
    with open(path, "r", encoding="utf-8") as fh:
        return field_from_json(json.load(fh), **kwargs)
