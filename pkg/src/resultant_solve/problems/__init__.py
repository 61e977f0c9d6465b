"""Built-in minimal problems: matrix builders, equations, and generators."""

from __future__ import annotations

import numpy as np

from . import conic, five_point
from .base import DegenerateDataError, Problem

PROBLEMS: dict[str, Problem] = {
    conic.PROBLEM.problem_id: conic.PROBLEM,
    five_point.PROBLEM.problem_id: five_point.PROBLEM,
}


def get_problem(problem_id: str) -> Problem:
    try:
        return PROBLEMS[problem_id]
    except KeyError:
        raise ValueError(
            f"unknown problem {problem_id!r}; available: {sorted(PROBLEMS)}"
        ) from None


def generate_instance(problem_id: str, rng_seed):
    """Deterministic synthetic instance plus its known ground-truth solutions."""
    problem = get_problem(problem_id)
    return problem.generate_instance(np.random.default_rng(rng_seed))


def original_equations(problem_id: str, data):
    return get_problem(problem_id).original_equations(data)


__all__ = [
    "DegenerateDataError",
    "PROBLEMS",
    "Problem",
    "conic",
    "five_point",
    "generate_instance",
    "get_problem",
    "original_equations",
]
