"""Intersection of two plane conics.

Two homogeneous conics  [x y 1] C [x y 1]^T = 0  meet in at most four
points.  Eliminating x via the Sylvester matrix of the two quadratics
(coefficients quadratic in y) gives a 4x4 matrix polynomial in y whose
determinant is the degree-4 resultant; the four y-roots are the
intersection ordinates and x is recovered from the power basis
(x^3, x^2, x, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..poly import MultivariatePolynomial, PolynomialSystem, hide_variable
from .base import DegenerateDataError, Problem
from .sylvester import sylvester_entries, sylvester_matrix_polynomial

VAR_NAMES = ("x", "y")
HIDDEN_INDEX = 1  # y is hidden; x is eliminated by the Sylvester matrix
BASIS = ((3,), (2,), (1,), (0,))
EXPECTED_SOLUTIONS = 4

# both leading x^2 coefficients (near-)zero: the Sylvester determinant
# vanishes identically and no rotation-free template applies
LEADING_TOL = 1e-12


@dataclass(frozen=True)
class ConicPairData:
    """Two symmetric 3x3 conic coefficient matrices, Frobenius-normalized."""

    c1: np.ndarray
    c2: np.ndarray

    def __post_init__(self):
        for name, c in (("c1", self.c1), ("c2", self.c2)):
            c = np.asarray(c, dtype=float)
            if c.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3, got {c.shape}")
            c = (c + c.T) / 2.0
            norm = np.linalg.norm(c)
            if norm == 0.0:
                raise DegenerateDataError(f"{name} is the zero conic")
            object.__setattr__(self, name, c / norm)


def _conic_polynomial(c: np.ndarray) -> MultivariatePolynomial:
    terms = [
        (c[0, 0], (2, 0)),
        (2.0 * c[0, 1], (1, 1)),
        (c[1, 1], (0, 2)),
        (2.0 * c[0, 2], (1, 0)),
        (2.0 * c[1, 2], (0, 1)),
        (c[2, 2], (0, 0)),
    ]
    return MultivariatePolynomial.from_terms(terms, VAR_NAMES)


def original_equations(data: ConicPairData) -> PolynomialSystem:
    return PolynomialSystem(
        (_conic_polynomial(data.c1), _conic_polynomial(data.c2)), 2
    )


def build(data: ConicPairData):
    hidden = hide_variable(original_equations(data), HIDDEN_INDEX)
    # per conic: coefficient polynomials in y of x^2, x, 1 (descending)
    q1, q2 = (
        [list(hp.groups.get((e,), (0.0,))) for e in (2, 1, 0)]
        for hp in hidden.polynomials
    )
    if max(abs(q1[0][0]), abs(q2[0][0])) < LEADING_TOL:
        raise DegenerateDataError(
            "rotate coordinates: both conics lack an x^2 term"
        )
    return sylvester_matrix_polynomial(q1, q2)


def modular_matrix(rng: np.random.Generator, p: int):
    """Sylvester matrix over Z_p with fresh residues for the 12 conic coefficients."""
    from ..offline import ModularPolyMatrix

    quads = []
    for _ in range(2):
        a, b, c, d, e, f = (int(v) for v in rng.integers(1, p, size=6))
        quads.append([[a], [2 * d % p, 2 * b % p], [f, 2 * e % p, c]])
    entries = sylvester_entries(quads[0], quads[1])
    entries = [[[v % p for v in e] for e in row] for row in entries]
    return ModularPolyMatrix(entries, p)


def random_data(rng: np.random.Generator) -> ConicPairData:
    m1 = rng.standard_normal((3, 3))
    m2 = rng.standard_normal((3, 3))
    return ConicPairData((m1 + m1.T) / 2, (m2 + m2.T) / 2)


def _conics_through(points: np.ndarray, rng: np.random.Generator) -> tuple:
    """Two generic conics through four prescribed points, or None."""
    rows = np.array(
        [[x * x, x * y, y * y, x, y, 1.0] for x, y in points]
    )
    _, s, vh = np.linalg.svd(rows)
    if s[3] < 1e-10 * s[0]:
        return None
    span = vh[4:]  # 2-dimensional pencil of conics through the points
    mix = rng.standard_normal((2, 2))
    if abs(np.linalg.det(mix)) < 0.1:
        return None
    v1, v2 = mix @ span
    conics = []
    for v in (v1, v2):
        c = np.array(
            [
                [v[0], v[1] / 2, v[3] / 2],
                [v[1] / 2, v[2], v[4] / 2],
                [v[3] / 2, v[4] / 2, v[5]],
            ]
        )
        # keep the x^2 coefficient healthy so elimination in x is stable
        if abs(c[0, 0]) < 1e-3 * np.linalg.norm(c):
            return None
        conics.append(c)
    return conics[0], conics[1]


def generate_instance(rng: np.random.Generator):
    """Random conic pair constructed from four prescribed intersections."""
    while True:
        points = rng.uniform(-1.0, 1.0, size=(4, 2))
        dists = [
            np.linalg.norm(points[i] - points[j])
            for i in range(4)
            for j in range(i + 1, 4)
        ]
        if min(dists) < 0.2:
            continue
        conics = _conics_through(points, rng)
        if conics is None:
            continue
        data = ConicPairData(*conics)
        return data, [points[i].copy() for i in range(4)]


def data_to_json(data: ConicPairData) -> dict:
    return {"C1": data.c1.ravel().tolist(), "C2": data.c2.ravel().tolist()}


def data_from_json(obj: dict) -> ConicPairData:
    return ConicPairData(
        np.array(obj["C1"], dtype=float).reshape(3, 3),
        np.array(obj["C2"], dtype=float).reshape(3, 3),
    )


PROBLEM = Problem(
    problem_id="conic",
    n_vars=2,
    hidden_index=HIDDEN_INDEX,
    var_names=VAR_NAMES,
    basis=BASIS,
    expected_solutions=EXPECTED_SOLUTIONS,
    build=build,
    modular_matrix=modular_matrix,
    random_data=random_data,
    generate_instance=generate_instance,
    original_equations=original_equations,
    data_to_json=data_to_json,
    data_from_json=data_from_json,
)
