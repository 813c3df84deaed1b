"""Shared exception types."""


class ModalTeamError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ModalTeamError):
    """Concrete-syntax error; carries the offending character offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class WellFormednessError(ModalTeamError):
    """Structurally invalid formula, e.g. ML negation over a non-classical subtree."""


class ModelFormatError(ModalTeamError):
    """Invalid model / machine description file."""


class BudgetExceededError(ModalTeamError):
    """An enumeration would exceed the configured budget.

    ``required`` is the exact count that would be needed, ``budget`` the cap
    that was in force.
    """

    def __init__(self, required, budget, what="types"):
        super().__init__(f"budget exceeded: {what} requires {required} > budget {budget}")
        self.required = required
        self.budget = budget
        self.what = what
