from __future__ import annotations

import typing as t

import graphql
import pytest
from magql.testing import expect_data
from magql.testing import expect_error
from magql.testing import expect_errors
from magql.testing import expect_validation_error

from dgmanifold.api import schema
from dgmanifold.bundle import CurvedBundle
from dgmanifold.bundle import affine
from dgmanifold.bundle import point
from dgmanifold.config import Settings
from dgmanifold.graded import GradedVectorSpace


def make_bundle(
    degrees: dict[str, int],
    lambdas: dict[int, dict[str, dict[str, t.Any]]] | None = None,
    amplitude: int | None = None,
    dimension: int = 0,
) -> CurvedBundle:
    """Build a bundle from label degrees and tables keyed by comma joined inputs."""
    ring = point() if not dimension else affine(dimension)
    fibre = GradedVectorSpace.from_labels(degrees)
    return CurvedBundle(ring, fibre, lambdas, amplitude)


@pytest.fixture()
def zero_line() -> CurvedBundle:
    return make_bundle({"e": 1}, amplitude=1)


@pytest.fixture()
def curvature_line() -> CurvedBundle:
    return make_bundle({"e": 1}, {0: {"": {"e": 1}}}, amplitude=1)


@pytest.fixture()
def linear_pair() -> CurvedBundle:
    return make_bundle({"e1": 1, "e2": 2}, {1: {"e1": {"e2": 1}}})


@pytest.fixture()
def quadratic() -> CurvedBundle:
    """``lambda_2(a, b) = c`` with ``a, b`` in degree 1 and ``c`` in degree 3."""
    return make_bundle({"a": 1, "b": 1, "c": 3}, {2: {"a,b": {"c": 1}}})


@pytest.fixture()
def settings() -> Settings:
    return Settings(truncate_arity=2, truncate_order=2, todd_order=3)


class Execute:
    def __init__(self, settings: Settings) -> None:
        self._context = {"settings": settings}

    def expect_data(self, source: str, **kwargs: t.Any) -> dict[str, t.Any]:
        return expect_data(schema, source, context=self._context, **kwargs)

    def expect_errors(self, source: str, **kwargs: t.Any) -> list[graphql.GraphQLError]:
        return expect_errors(schema, source, context=self._context, **kwargs)

    def expect_error(self, source: str, **kwargs: t.Any) -> graphql.GraphQLError:
        return expect_error(schema, source, context=self._context, **kwargs)

    def expect_validation_error(self, source: str, **kwargs: t.Any) -> dict[str, t.Any]:
        return expect_validation_error(schema, source, context=self._context, **kwargs)


@pytest.fixture()
def execute(settings: Settings) -> Execute:
    return Execute(settings)
