"""Companion-matrix root finding for the recovered determinant polynomial."""

from __future__ import annotations

import numpy as np

from .spectral import UnivariatePolynomial, trim

DEFAULT_IM_TOL = 1e-6


def roots(p: UnivariatePolynomial) -> np.ndarray:
    """All complex roots of p, as eigenvalues of its monic companion matrix.

    The polynomial is trimmed first; the eigenvalue iteration (balanced
    Hessenberg + shifted QR) returns the full multiset of roots in no
    particular order.
    """
    p = trim(p)
    deg = p.degree
    if deg < 1:
        raise ValueError("no roots: polynomial has degree 0")
    monic = p.coeffs / p.coeffs[-1]
    companion = np.eye(deg, k=-1, dtype=complex)
    companion[:, -1] = -monic[:-1]
    return np.linalg.eigvals(companion)


def real_candidates(roots_: np.ndarray, im_tol: float = DEFAULT_IM_TOL) -> np.ndarray:
    """Real parts of the roots whose imaginary part is negligible.

    Keeps z with |Im z| <= im_tol * (1 + |Re z|), preserving order.
    """
    if im_tol <= 0:
        raise ValueError("im_tol must be positive")
    roots_ = np.asarray(roots_, dtype=complex)
    keep = np.abs(roots_.imag) <= im_tol * (1.0 + np.abs(roots_.real))
    return roots_.real[keep]
