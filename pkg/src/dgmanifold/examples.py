"""The bundled example documents.

- ``curvature-line``: ``b = 1``, one generator, ``lambda_0 = 1``.
- ``zero-line``: ``b = 1``, one generator, ``lambda = 0``.
- ``linear-pair``: ``b = 2``, ``lambda_1: L^1 -> L^2`` the identity.
- ``broken-curvature``: ``lambda_1(lambda_0) != 0``, fails validation.
- ``quadratic``: ``b = 3``, ``lambda_2: S^2 L^1 -> L^3``.
- ``affine-curvature``: a line over ``Affine(1)`` with ``lambda_0 = x``.
- ``projection``: ``L^1 + L^2`` with ``lambda_1`` an isomorphism, mapped to 0.
- ``non-submersive``: ``phi_1`` surjective but ``f`` constant.
- ``quadratic-fibration``: ``quadratic`` plus a matched pair, projected.
- ``connection-pair``: ``quadratic`` with a second connection.
"""

from __future__ import annotations

import json
import typing as t
from importlib import resources

from .document import Document
from .document import parse

CORPUS = resources.files("dgmanifold") / "corpus"


def names() -> list[str]:
    return sorted(
        p.name.removesuffix(".json")
        for p in CORPUS.iterdir()
        if p.name.endswith(".json")
    )


def load_data(name: str) -> dict[str, t.Any]:
    """The decoded JSON of an example."""
    path = CORPUS / f"{name}.json"

    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no example named {name!r}") from None

    data: dict[str, t.Any] = json.loads(text)
    return data


def load(name: str) -> Document:
    """Parse an example document.

    :raises KeyError: If there is no such example.
    """
    return parse(load_data(name))
