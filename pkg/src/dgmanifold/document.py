"""Versioned JSON documents describing bundles, morphisms, connections, loci and
command parameters.

Rationals are strings ``"p/q"``. A base scalar is a rational, or on an affine base a
map from comma-joined exponent vectors to rationals. A function on a bundle is a
map from comma-joined generator names (``""`` for 1) to base scalars. Fibres are
lists of ``[label, degree]`` pairs, written out by degree and then label.

.. code-block:: json

    {
        "version": 1,
        "command": "validate",
        "bundle": {
            "base": {"dimension": 0},
            "amplitude": 1,
            "fibre": [["e", 1]],
            "lambda": {"0": {"": {"e": "1"}}}
        }
    }
"""

from __future__ import annotations

import dataclasses
import json
import re
import typing as t

from .algebra import Element
from .atiyah import AffineConnection
from .bundle import CurvedBundle
from .config import Settings
from .config import default_settings
from .errors import DgManifoldError
from .errors import DocumentError
from .graded import GradedVectorSpace
from .morphism import LinftyMorphism
from .scalars import ScalarRing
from .scalars import format_rational
from .scalars import parse_point
from .scalars import parse_rational
from .tensors import FibreConnection
from .tensors import VectorFieldModule

VERSION = 1

COMMANDS = (
    "validate",
    "tangent-complex",
    "classify",
    "cohomology",
    "kernel-acyclicity",
    "ladder",
    "atiyah",
    "compare-classes",
    "todd",
    "invariance",
    "hkr-check",
    "hochschild-window",
)

_TOP = {
    "version",
    "command",
    "bundle",
    "target",
    "morphism",
    "connection",
    "other_connection",
    "target_connection",
    "points",
    "target_points",
    "correspondence",
    "params",
}
_BUNDLE = {"base", "amplitude", "fibre", "lambda"}
_MORPHISM = {"base_map", "taylor"}
_CONNECTION = {"fibre", "affine"}
_PARAMS = {
    "window",
    "truncate_arity",
    "truncate_order",
    "todd_order",
    "complex",
    "arity",
    "tensor",
}
_COMPLEXES = ("functions", "vector-fields", "forms", "tensors")
_RESERVED = re.compile(r"^x\d+$")


def dumps(data: t.Any) -> str:
    """Canonical JSON text: sorted keys, two space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class _Errors:
    """Collects messages by document path."""

    def __init__(self) -> None:
        self.errors: dict[str, str] = {}

    def add(self, path: str, message: str) -> None:
        self.errors.setdefault(path, message)

    def check_keys(self, path: str, value: t.Any, allowed: set[str]) -> bool:
        if not isinstance(value, dict):
            self.add(path, "must be an object")
            return False

        for key in sorted(set(value) - allowed):
            self.add(f"{path}.{key}", "unknown field")

        return True

    def raise_if_any(self) -> None:
        if self.errors:
            raise DocumentError(self.errors)


@dataclasses.dataclass()
class Document:
    """A parsed document. ``data`` is the canonical form, built objects are
    available through the methods.
    """

    data: dict[str, t.Any]
    bundle: CurvedBundle
    target: CurvedBundle | None = None
    morphism: LinftyMorphism | None = None

    @property
    def command(self) -> str | None:
        return self.data.get("command")

    @property
    def params(self) -> dict[str, t.Any]:
        return self.data.get("params", {})

    def dump(self) -> dict[str, t.Any]:
        return json.loads(json.dumps(self.data))

    def dumps(self) -> str:
        return dumps(self.data)

    def settings(
        self, base: Settings = default_settings, **overrides: int | None
    ) -> Settings:
        """Settings from ``base``, then document params, then non-``None``
        overrides.
        """
        values = {
            "truncate_arity": base.truncate_arity,
            "truncate_order": base.truncate_order,
            "todd_order": base.todd_order,
        }

        for key in values:
            if key in self.params:
                values[key] = self.params[key]

            if overrides.get(key) is not None:
                values[key] = t.cast(int, overrides[key])

        return Settings(**values)

    def window(self, override: t.Sequence[int] | None = None) -> tuple[int, int] | None:
        if override is not None:
            return int(override[0]), int(override[1])

        if "window" in self.params:
            t0, t1 = self.params["window"]
            return t0, t1

        return None

    def points(self, key: str = "points") -> list[tuple[t.Any, ...]]:
        return [parse_point(p) for p in self.data.get(key, [])]

    def correspondence(self) -> list[tuple[int, int]] | None:
        pairs = self.data.get("correspondence")

        if pairs is None:
            return None

        return [(int(i), int(j)) for i, j in pairs]

    def fibre_connection(
        self, key: str = "connection", bundle: CurvedBundle | None = None
    ) -> FibreConnection:
        bundle = bundle or self.bundle
        data = self.data.get(key, {}).get("fibre", {})
        return FibreConnection(
            bundle,
            {
                int(a): {
                    j: {k: bundle.ring.load(v) for k, v in row.items()}
                    for j, row in table.items()
                }
                for a, table in data.items()
            },
        )

    def vector_fields(
        self, key: str = "connection", bundle: CurvedBundle | None = None
    ) -> VectorFieldModule:
        bundle = bundle or self.bundle
        return VectorFieldModule(bundle, self.fibre_connection(key, bundle))

    def affine_connection(
        self,
        key: str = "connection",
        bundle: CurvedBundle | None = None,
        vector_fields: VectorFieldModule | None = None,
    ) -> AffineConnection:
        """The connection on vector fields stored under ``key``. Missing entries
        give the flat connection of the frame.
        """
        bundle = bundle or self.bundle

        if vector_fields is None:
            vector_fields = self.vector_fields(key, bundle)

        data = self.data.get(key, {}).get("affine", {})
        table = {}

        for pair, value in data.items():
            a, b = pair.split(",")
            table[a, b] = {
                label: load_element(bundle, element) for label, element in value.items()
            }

        return AffineConnection(vector_fields, table, name=key)


def load_element(bundle: CurvedBundle, data: t.Mapping[str, t.Any]) -> Element:
    """A function on the bundle from its monomial map."""
    algebra = bundle.algebra
    result = algebra.zero

    for word, scalar in data.items():
        names = [s for s in word.split(",") if s]
        result = result + algebra.monomial(algebra.index(n) for n in names) * (
            bundle.ring.load(scalar)
        )

    return result


def dump_element(element: Element) -> dict[str, t.Any]:
    algebra = element.algebra
    return {
        ",".join(algebra.names[i] for i in mono): algebra.ring.dump(coeff)
        for mono, coeff in sorted(element.terms.items())
    }


def parse(data: t.Any) -> Document:
    """Validate a document and build its objects.

    :param data: The decoded JSON value.
    :raises DocumentError: With every problem found, keyed by document path.
    """
    errors = _Errors()

    if not errors.check_keys("$", data, _TOP):
        errors.raise_if_any()

    if data.get("version") != VERSION:
        errors.add("$.version", f"must be {VERSION}")

    command = data.get("command")

    if command is not None and command not in COMMANDS:
        errors.add("$.command", f"unknown command {command!r}")

    out: dict[str, t.Any] = {"version": VERSION}

    if command is not None:
        out["command"] = command

    if "bundle" not in data:
        errors.add("$.bundle", "required")

    errors.raise_if_any()
    bundle, out["bundle"] = _bundle(errors, "$.bundle", data["bundle"])
    target = None
    morphism = None

    if "target" in data:
        target, out["target"] = _bundle(errors, "$.target", data["target"])

    if "morphism" in data:
        if target is None:
            errors.add("$.morphism", "needs a target bundle")
        elif bundle is not None:
            morphism, out["morphism"] = _morphism(
                errors, "$.morphism", data["morphism"], bundle, target
            )

    for key, owner in (
        ("connection", bundle),
        ("other_connection", bundle),
        ("target_connection", target),
    ):
        if key in data:
            if owner is None:
                errors.add(f"$.{key}", "refers to a missing bundle")
            else:
                out[key] = _connection(errors, f"$.{key}", data[key], owner)

    for key, owner in (("points", bundle), ("target_points", target)):
        if key in data and owner is not None:
            out[key] = _points(errors, f"$.{key}", data[key], owner)

    if "correspondence" in data:
        out["correspondence"] = _correspondence(
            errors, "$.correspondence", data["correspondence"]
        )

    if "params" in data:
        out["params"] = _params(errors, "$.params", data["params"])

    errors.raise_if_any()
    assert bundle is not None
    return Document(out, bundle, target, morphism)


def _bundle(
    errors: _Errors, path: str, data: t.Any
) -> tuple[CurvedBundle | None, dict[str, t.Any]]:
    if not errors.check_keys(path, data, _BUNDLE):
        return None, {}

    base = data.get("base", {})
    dimension = base.get("dimension", 0) if isinstance(base, dict) else None

    if (
        not isinstance(base, dict)
        or set(base) - {"dimension"}
        or not isinstance(dimension, int)
        or isinstance(dimension, bool)
        or dimension < 0
    ):
        errors.add(f"{path}.base", "must be {\"dimension\": n} with n >= 0")
        return None, {}

    fibre = data.get("fibre", [])
    labels: dict[str, int] = {}

    if not isinstance(fibre, list):
        errors.add(f"{path}.fibre", "must be a list of [label, degree] pairs")
        return None, {}

    for i, entry in enumerate(fibre):
        where = f"{path}.fibre[{i}]"

        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not isinstance(entry[0], str)
            or not isinstance(entry[1], int)
            or isinstance(entry[1], bool)
        ):
            errors.add(where, "must be a [label, degree] pair")
            continue

        label, degree = entry

        if not label or _RESERVED.match(label) or any(c in label for c in ",|:∂"):
            errors.add(where, f"label {label!r} is not allowed")
        elif label in labels:
            errors.add(where, f"duplicate label {label!r}")
        elif degree < 1:
            errors.add(where, "degrees must be at least 1")
        else:
            labels[label] = degree

    amplitude = data.get("amplitude", max(labels.values(), default=1))

    if not isinstance(amplitude, int) or isinstance(amplitude, bool) or amplitude < 1:
        errors.add(f"{path}.amplitude", "must be a positive integer")
        return None, {}

    if any(d > amplitude for d in labels.values()):
        errors.add(f"{path}.fibre", f"degrees must be at most {amplitude}")

    if errors.errors:
        return None, {}

    labels = dict(sorted(labels.items(), key=lambda item: (item[1], item[0])))
    ring = ScalarRing(dimension)
    lambdas, table = _taylor(
        errors, f"{path}.lambda", data.get("lambda", {}), ring, labels, labels
    )
    out = {
        "base": {"dimension": dimension},
        "amplitude": amplitude,
        "fibre": [[label, degree] for label, degree in labels.items()],
        "lambda": table,
    }

    if errors.errors:
        return None, out

    space = GradedVectorSpace.from_labels(labels)

    try:
        bundle = CurvedBundle(ring, space, lambdas, amplitude)
    except (ValueError, DgManifoldError) as e:
        errors.add(path, str(e))
        return None, out

    return bundle, out


def _taylor(
    errors: _Errors,
    path: str,
    data: t.Any,
    ring: ScalarRing,
    inputs: t.Mapping[str, int],
    outputs: t.Mapping[str, int],
) -> tuple[dict[int, dict[tuple[str, ...], dict[str, t.Any]]], dict[str, t.Any]]:
    tables: dict[int, dict[tuple[str, ...], dict[str, t.Any]]] = {}
    canonical: dict[str, t.Any] = {}

    if not isinstance(data, dict):
        errors.add(path, "must be an object")
        return tables, canonical

    for n, table in data.items():
        if not n.isdigit() or not isinstance(table, dict):
            errors.add(f"{path}.{n}", "keys must be arities with object values")
            continue

        for key, row in table.items():
            where = f"{path}.{n}.{key or '()'}"
            word = [s for s in key.split(",") if s]

            if len(word) != int(n) or any(a not in inputs for a in word):
                errors.add(where, f"expected {n} known input labels")
                continue

            if not isinstance(row, dict) or any(b not in outputs for b in row):
                errors.add(where, "outputs must be known labels")
                continue

            for b, value in row.items():
                try:
                    scalar = ring.load(value)
                except (ValueError, TypeError) as e:
                    errors.add(f"{where}.{b}", str(e))
                    continue

                if scalar:
                    order = sorted(word, key=list(inputs).index)
                    arity = tables.setdefault(int(n), {})
                    arity.setdefault(tuple(order), {})[b] = scalar
                    entry = canonical.setdefault(str(int(n)), {})
                    entry.setdefault(",".join(order), {})[b] = ring.dump(scalar)

    return tables, canonical


def _morphism(
    errors: _Errors,
    path: str,
    data: t.Any,
    source: CurvedBundle,
    target: CurvedBundle | None,
) -> tuple[LinftyMorphism | None, dict[str, t.Any]]:
    if target is None or not errors.check_keys(path, data, _MORPHISM):
        return None, {}

    base_map = data.get("base_map", [])

    if not isinstance(base_map, list):
        errors.add(f"{path}.base_map", "must be a list")
        return None, {}

    images = []

    for i, value in enumerate(base_map):
        try:
            images.append(source.ring.load(value))
        except (ValueError, TypeError) as e:
            errors.add(f"{path}.base_map[{i}]", str(e))

    inputs = {a: source.degree(a) for a in source.labels}
    outputs = {b: target.degree(b) for b in target.labels}
    taylor, table = _taylor(
        errors, f"{path}.taylor", data.get("taylor", {}), source.ring, inputs, outputs
    )
    out = {"base_map": [source.ring.dump(v) for v in images], "taylor": table}

    if errors.errors:
        return None, out

    try:
        morphism = LinftyMorphism(source, target, images, taylor)
    except DgManifoldError as e:
        errors.add(path, str(e))
        return None, out

    return morphism, out


def _connection(
    errors: _Errors, path: str, data: t.Any, bundle: CurvedBundle
) -> dict[str, t.Any]:
    if not errors.check_keys(path, data, _CONNECTION):
        return {}

    out: dict[str, t.Any] = {}
    fibre = data.get("fibre", {})

    if fibre:
        table: dict[str, t.Any] = {}

        for a, rows in fibre.items():
            for j, row in rows.items():
                for k, value in row.items():
                    where = f"{path}.fibre.{a}.{j}.{k}"

                    known = j in bundle.fibre and k in bundle.fibre

                    if not a.isdigit() or not known:
                        errors.add(where, "unknown coordinate or label")
                        continue

                    try:
                        scalar = bundle.ring.load(value)
                    except (ValueError, TypeError) as e:
                        errors.add(where, str(e))
                        continue

                    if scalar:
                        entry = table.setdefault(a, {}).setdefault(j, {})
                        entry[k] = bundle.ring.dump(scalar)

        out["fibre"] = table

    affine = data.get("affine", {})

    if affine:
        canonical: dict[str, t.Any] = {}

        for pair, value in affine.items():
            where = f"{path}.affine.{pair}"

            if pair.count(",") != 1 or not isinstance(value, dict):
                errors.add(where, "keys are frame pairs 'a,b' with object values")
                continue

            try:
                entry = {
                    label: dump_element(load_element(bundle, element))
                    for label, element in value.items()
                }
            except (KeyError, ValueError, TypeError) as e:
                errors.add(where, f"bad function: {e}")
                continue

            canonical[pair] = {k: v for k, v in entry.items() if v}

        out["affine"] = canonical

    if not errors.errors:
        try:
            document = Document({"connection": out}, bundle)
            document.affine_connection("connection", bundle)
        except (ValueError, DgManifoldError) as e:
            errors.add(path, str(e))

    return out


def _points(
    errors: _Errors, path: str, data: t.Any, bundle: CurvedBundle
) -> list[list[str]]:
    if not isinstance(data, list):
        errors.add(path, "must be a list of points")
        return []

    out = []

    for i, point in enumerate(data):
        if not isinstance(point, list) or len(point) != bundle.ring.dimension:
            errors.add(f"{path}[{i}]", f"must have {bundle.ring.dimension} coordinates")
            continue

        try:
            out.append([_rational(v) for v in point])
        except (ValueError, TypeError) as e:
            errors.add(f"{path}[{i}]", str(e))

    return out


def _rational(value: t.Any) -> str:
    return format_rational(parse_rational(value))


def _correspondence(errors: _Errors, path: str, data: t.Any) -> list[list[int]]:
    if not isinstance(data, list) or not all(
        isinstance(p, list)
        and len(p) == 2
        and all(isinstance(i, int) and not isinstance(i, bool) for i in p)
        for p in data
    ):
        errors.add(path, "must be a list of [i, j] index pairs")
        return []

    return [list(p) for p in data]


def _params(errors: _Errors, path: str, data: t.Any) -> dict[str, t.Any]:
    if not errors.check_keys(path, data, _PARAMS):
        return {}

    out = dict(data)
    window = data.get("window")

    if window is not None and (
        not isinstance(window, list)
        or len(window) != 2
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in window)
    ):
        errors.add(f"{path}.window", "must be [t0, t1]")

    for key, low in (
        ("truncate_arity", 0),
        ("truncate_order", 1),
        ("todd_order", 1),
        ("arity", 0),
    ):
        value = data.get(key)

        if value is not None and (
            not isinstance(value, int) or isinstance(value, bool) or value < low
        ):
            errors.add(f"{path}.{key}", f"must be an integer of at least {low}")

    if data.get("complex", "functions") not in _COMPLEXES:
        errors.add(f"{path}.complex", f"must be one of {', '.join(_COMPLEXES)}")

    tensor = data.get("tensor")

    if tensor is not None and (
        not isinstance(tensor, list)
        or len(tensor) != 2
        or not all(isinstance(v, int) and v >= 0 for v in tensor)
    ):
        errors.add(f"{path}.tensor", "must be [p, q]")

    return out
