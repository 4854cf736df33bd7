"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: :class:`InputError` -> 2,
:class:`DegenerateFeatureError` -> 3, anything else derived from
:class:`ExcirError` -> 1.
"""

from __future__ import annotations

from collections.abc import Sequence


class ExcirError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ExcirError, ValueError):
    """Invalid user input: bad files, shapes, names, or configuration."""


class TableBudgetError(InputError):
    """A joint probability table would exceed the dense-cell budget."""

    def __init__(self, cells: int, budget: int):
        super().__init__(
            f"joint table needs {cells} cells, exceeding the budget of {budget}"
        )
        self.cells = cells
        self.budget = budget


class EvaluationError(ExcirError):
    """A model evaluation failed or violated the prediction protocol."""


class SingularRowError(ExcirError):
    """A ratio-model denominator evaluated to zero for some row."""


class DegenerateFeatureError(ExcirError):
    """A score is undefined (0/0) for one or more features."""

    def __init__(self, features: Sequence[str], detail: str = ""):
        names = ", ".join(features) if features else "<unnamed>"
        msg = f"degenerate score for feature(s): {names}"
        if detail:
            msg = f"{msg} ({detail})"
        super().__init__(msg)
        self.features = tuple(features)
