"""Hard-coded 6x6 and 3x3 test fixtures for the threat-detection surfaces.

The 6x6 pair of panels encodes a threat configuration that three specific
intercalate switches turn into a basic one; the 3x3 fixtures realise each of
the four basic threat patterns with the identity labeling.
"""

from __future__ import annotations

from .core import Entry, PartialLatinSquare
from .intercalates import Intercalate
from .configs import Q_PATTERNS

__all__ = [
    "switch_example_left",
    "switch_example_right",
    "switch_example_pair",
    "switch_example_switches",
    "basic_fixture",
]

_LEFT_ENTRIES = (
    (2, 4, 3), (2, 5, 4),
    (3, 2, 1), (3, 3, 2), (3, 4, 4), (3, 5, 3),
    (4, 1, 3), (4, 3, 5), (4, 4, 6), (4, 6, 2),
    (5, 1, 5), (5, 3, 3),
    (6, 4, 2), (6, 6, 6),
)

_RIGHT_ENTRIES = (
    (2, 4, 4), (2, 5, 3),
    (3, 2, 1), (3, 3, 2), (3, 4, 3), (3, 5, 4),
    (4, 1, 5), (4, 3, 3), (4, 4, 2), (4, 6, 6),
    (5, 1, 3), (5, 3, 5),
    (6, 4, 6), (6, 6, 2),
)


def switch_example_left() -> PartialLatinSquare:
    """6x6 partial square holding a (non-basic) threat configuration."""
    return PartialLatinSquare(6, frozenset(Entry(*e) for e in _LEFT_ENTRIES))


def switch_example_right() -> PartialLatinSquare:
    """The same square after the three designated switches; holds a basic
    threat configuration of type 2."""
    return PartialLatinSquare(6, frozenset(Entry(*e) for e in _RIGHT_ENTRIES))


def switch_example_pair() -> tuple:
    """The threatened pair in row 1 (absent from both panels)."""
    return (Entry(1, 2, 2), Entry(1, 3, 1))


def switch_example_switches() -> tuple:
    """The three intercalates (left-panel state) whose switch maps the left
    panel to the right panel."""
    return (
        Intercalate((2, 3), (4, 5), (3, 4), 3),
        Intercalate((4, 6), (4, 6), (2, 6), 6),
        Intercalate((4, 5), (1, 3), (3, 5), 3),
    )


def basic_fixture(t: int) -> PartialLatinSquare:
    """3x3 partial square realising basic pattern ``t`` with identity roles."""
    return PartialLatinSquare(
        3, frozenset(Entry(r, c, s) for (r, c, s) in Q_PATTERNS[t])
    )
