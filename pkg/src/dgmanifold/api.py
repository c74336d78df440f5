"""The GraphQL surface. Each command is a query field taking the document as JSON
and returning its report as JSON.

.. code-block:: graphql

    query($document: JSON!) { ladder(document: $document, window: [-4, 6]) }
"""

from __future__ import annotations

import logging
import typing as t

import magql
from graphql import GraphQLResolveInfo
from magql.validators import ValidationError

from .commands import COMMANDS
from .commands import run
from .config import default_settings
from .document import parse
from .errors import DocumentError

logger = logging.getLogger(__name__)


def field_name(command: str) -> str:
    """The query field for a command, ``tangent-complex`` becomes
    ``tangent_complex``.
    """
    return command.replace("-", "_")


class DocumentValidator:
    """Validate the ``document`` argument. Every problem is reported, keyed by its
    path in the document.

    :param command: The command of the field. A document naming another command is
        rejected.
    """

    def __init__(self, command: str) -> None:
        self.command = command

    def __call__(
        self, info: GraphQLResolveInfo, value: t.Any, data: t.Any
    ) -> None:
        try:
            document = parse(value)
        except DocumentError as e:
            raise ValidationError(e.errors) from None

        if document.command is not None and document.command != self.command:
            raise ValidationError(
                {"$.command": f"document is for {document.command!r}"}
            )


def validate_window(
    info: GraphQLResolveInfo, value: list[int] | None, data: t.Any
) -> None:
    if value is None:
        return

    if len(value) != 2:
        raise ValidationError("Must be a pair [t0, t1].")

    if value[0] > value[1]:
        raise ValidationError("The lower end must not be greater than the upper.")


class AtLeastValidator:
    """Validate an integer truncation parameter.

    :param low: The minimum allowed value.
    """

    def __init__(self, low: int) -> None:
        self.low = low

    def __call__(
        self, info: GraphQLResolveInfo, value: int | None, data: t.Any
    ) -> None:
        if value is not None and value < self.low:
            raise ValidationError(f"Must be at least {self.low}.")


class CommandResolver:
    """Parse the document and run one command. The ``window`` and truncation
    arguments override the document's ``params``.

    :param command: The command name.
    """

    def __init__(self, command: str) -> None:
        self.command = command

    def __call__(
        self, parent: t.Any, info: GraphQLResolveInfo, **kwargs: t.Any
    ) -> dict[str, t.Any]:
        document = parse(kwargs["document"])
        settings = document.settings(
            (info.context or {}).get("settings", default_settings),
            truncate_arity=kwargs.get("truncate_arity"),
            truncate_order=kwargs.get("truncate_order"),
            todd_order=kwargs.get("todd_order"),
        )
        logger.debug("running %s with %s", self.command, settings)
        return run(
            self.command,
            document,
            settings=settings,
            window=document.window(kwargs.get("window")),
        )


def _field(command: str) -> magql.Field:
    return magql.Field(
        magql.JSON.non_null,
        args={
            "document": magql.Argument(
                magql.JSON.non_null, validators=[DocumentValidator(command)]
            ),
            "window": magql.Argument(
                magql.Int.non_null.list, validators=[validate_window]
            ),
            "truncate_arity": magql.Argument(
                magql.Int, validators=[AtLeastValidator(0)]
            ),
            "truncate_order": magql.Argument(
                magql.Int, validators=[AtLeastValidator(1)]
            ),
            "todd_order": magql.Argument(magql.Int, validators=[AtLeastValidator(1)]),
        },
        resolve=CommandResolver(command),
        description=(COMMANDS[command].__doc__ or "").strip() or None,
    )


def register(schema: magql.Schema) -> None:
    """Add a query field for every command to ``schema``."""
    for command in COMMANDS:
        schema.query.fields[field_name(command)] = _field(command)


schema = magql.Schema()
register(schema)
