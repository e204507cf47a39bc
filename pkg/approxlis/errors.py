"""
Exceptions shared by the structures and the command-line front end.
"""


class ContractViolation(ValueError):
    """A precondition of an operation was not met."""


class StaleHandleError(ContractViolation):
    """An order-maintenance handle was used after it was deleted."""


class ScriptParseError(ValueError):
    """An update script or input file could not be parsed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
