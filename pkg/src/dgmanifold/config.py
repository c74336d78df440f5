from __future__ import annotations

import dataclasses
import typing as t

from sympy import QQ


@dataclasses.dataclass()
class Settings:
    """Defaults used when an operation or command is not given an explicit value.
    Operations take these as keyword arguments; documents may override them in their
    ``params`` block and command line flags override documents.
    """

    window_below: t.ClassVar[int] = 4
    """Window starts at ``-2b - window_below``."""

    window_above: t.ClassVar[int] = 4
    """Window ends at ``b + window_above``."""

    truncate_arity: int = 3
    """Arity bound P for Hochschild windows."""

    truncate_order: int = 2
    """Slot order bound R for Hochschild windows."""

    todd_order: int = 4
    """Truncation order K for Todd cocycles."""

    def window(self, amplitude: int) -> tuple[int, int]:
        """The default degree window for a bundle of amplitude ``b``.

        :param amplitude: The top fibre degree b.
        """
        return -2 * amplitude - self.window_below, amplitude + self.window_above


SAMPLE_VALUES: tuple[t.Any, ...] = (
    QQ(0),
    QQ(1),
    QQ(-1),
    QQ(2),
    QQ(-2),
    QQ(1, 2),
    QQ(-1, 2),
    QQ(3),
)
"""Deterministic rational values used to build sample points on affine bases."""


def sample_points(dimension: int) -> list[tuple[t.Any, ...]]:
    """The deterministic sample set on an affine space: cyclic shifts of
    :data:`SAMPLE_VALUES`, one point per shift.

    :param dimension: The number of coordinates.
    """
    n = len(SAMPLE_VALUES)
    return [
        tuple(SAMPLE_VALUES[(shift + i) % n] for i in range(dimension))
        for shift in range(n)
    ]


default_settings = Settings()
