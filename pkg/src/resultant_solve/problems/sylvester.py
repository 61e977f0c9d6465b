"""Generic Sylvester elimination matrix for two-equation systems.

Given two polynomials in one eliminated variable whose coefficients are
themselves univariate polynomials in the hidden variable, the classical
Sylvester matrix is square of size m1+m2 and multiplies the descending
power basis (u^{m1+m2-1}, ..., u, 1) of the eliminated variable to zero
at common roots.  The assembly is ring-agnostic: coefficients may be
floats (online path) or integer residues (offline modular path).
"""

from __future__ import annotations

import numpy as np

from ..matrixpoly import MatrixPolynomial


def sylvester_entries(coeffs1: list, coeffs2: list) -> list:
    """Entries of the Sylvester matrix as lists of coefficient sequences.

    ``coeffs1``/``coeffs2`` hold one coefficient sequence per power of the
    eliminated variable, descending (leading first); each sequence is the
    hidden-variable polynomial of that coefficient, ascending.
    """
    m1 = len(coeffs1) - 1
    m2 = len(coeffs2) - 1
    if m1 < 1 or m2 < 1:
        raise ValueError("both polynomials must have degree >= 1")
    n = m1 + m2
    entries = [[[] for _ in range(n)] for _ in range(n)]
    for t in range(m2):
        for q, c in enumerate(coeffs1):
            entries[t][t + q] = list(c)
    for s in range(m1):
        for q, c in enumerate(coeffs2):
            entries[m2 + s][s + q] = list(c)
    return entries


def sylvester_matrix_polynomial(coeffs1: list, coeffs2: list) -> MatrixPolynomial:
    """Float Sylvester matrix as a coefficient-stack MatrixPolynomial."""
    entries = sylvester_entries(coeffs1, coeffs2)
    n = len(entries)
    depth = max((len(e) for row in entries for e in row), default=1)
    stack = np.zeros((depth, n, n))
    for r, row in enumerate(entries):
        for c, e in enumerate(row):
            for l, v in enumerate(e):
                stack[l, r, c] = v
    return MatrixPolynomial(stack)
