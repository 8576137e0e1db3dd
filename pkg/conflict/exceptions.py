"""Error types raised by the conflict app.

All of them derive from ConflictError so management commands can turn any
domain failure into a CommandError in one place.
"""
from __future__ import annotations

from typing import Optional


class ConflictError(Exception):
    """Base class for every domain error of the app."""


class InvalidArgumentError(ConflictError, ValueError):
    pass


class EmptyInputError(InvalidArgumentError):
    pass


class DegenerateRowError(InvalidArgumentError):
    """Kernel row whose off-diagonal sum is not a positive finite number."""

    def __init__(self, row: int, total: float):
        self.row = row
        self.total = total
        super().__init__(f'weight matrix row {row} is degenerate (off-diagonal kernel sum = {total!r})')


class DegenerateReductionError(InvalidArgumentError):
    pass


class EdgeListParseError(ConflictError, ValueError):
    def __init__(self, line_number: int, line: str, reason: str):
        self.line_number = line_number
        self.line = line
        super().__init__(f'line {line_number}: {reason}: {line!r}')


class UndefinedStatisticError(ConflictError, ValueError):
    pass


class NumericError(ConflictError, ArithmeticError):
    def __init__(self, message: str, coordinate: Optional[str] = None):
        self.coordinate = coordinate
        super().__init__(message)


class SolverDivergenceError(NumericError):
    def __init__(self, level: int, message: str = ''):
        self.level = level
        super().__init__(f'reference trajectory diverged at cognition level {level}' + (f': {message}' if message else ''))


class ConfigError(ConflictError, ValueError):
    def __init__(self, errors: dict[str, str] | str):
        if isinstance(errors, str):
            self.errors = {'': errors}
            super().__init__(errors)
        else:
            self.errors = dict(errors)
            listing = '; '.join(f'{k}: {v}' for k, v in sorted(self.errors.items()))
            super().__init__(f'invalid configuration: {listing}')


class ScenarioError(ConflictError):
    """Any failure of a single scenario, with the sigma/seed it belongs to."""

    def __init__(self, sigma: float, seed: int, cause: BaseException):
        self.sigma = sigma
        self.seed = seed
        self.cause = cause
        super().__init__(f'scenario sigma={sigma:g} seed={seed} failed: {type(cause).__name__}: {cause}')
