"""Shared problem-definition plumbing for the built-in minimal problems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable


class DegenerateDataError(ValueError):
    """Input data violates a builder precondition."""


@dataclass(frozen=True)
class Problem:
    """Everything the offline/online stages need to know about one problem.

    ``basis`` lists the column monomials as exponent tuples over the
    non-hidden variables (original variable order with the hidden one
    removed).
    """

    problem_id: str
    n_vars: int
    hidden_index: int
    var_names: tuple
    basis: tuple
    expected_solutions: int
    build: Callable
    modular_matrix: Callable
    random_data: Callable
    generate_instance: Callable
    original_equations: Callable
    data_to_json: Callable
    data_from_json: Callable
