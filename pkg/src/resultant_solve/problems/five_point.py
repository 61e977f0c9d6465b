"""Relative pose from five calibrated correspondences.

The essential matrix lives in the 4-dimensional nullspace of the 5x9
epipolar coefficient matrix,  E = x E1 + y E2 + z E3 + E4,  and must
satisfy det(E) = 0 plus the nine trace constraints
2 E E^T E - trace(E E^T) E = 0.  Expanding those ten cubics in (x, y, z)
and hiding z yields a 10x10 matrix polynomial of entry degree 3 over the
monomial basis (x^3, y^3, x^2 y, x y^2, x^2, y^2, x y, x, y, 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..matrixpoly import MatrixPolynomial
from ..poly import MultivariatePolynomial, PolynomialSystem
from .base import DegenerateDataError, Problem

VAR_NAMES = ("x", "y", "z")
HIDDEN_INDEX = 2
BASIS = (
    (3, 0), (0, 3), (2, 1), (1, 2), (2, 0),
    (0, 2), (1, 1), (1, 0), (0, 1), (0, 0),
)
EXPECTED_SOLUTIONS = 10

RANK_TOL = 1e-9


def _monomials(max_degree: int) -> list:
    out = [
        (a, b, c)
        for a in range(max_degree + 1)
        for b in range(max_degree + 1)
        for c in range(max_degree + 1)
        if a + b + c <= max_degree
    ]
    out.sort(key=lambda e: (sum(e), e), reverse=True)
    return out


MON1 = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)]  # x, y, z, 1
MON2 = _monomials(2)
MON3 = _monomials(3)
_IDX2 = {e: i for i, e in enumerate(MON2)}
_IDX3 = {e: i for i, e in enumerate(MON3)}

# product index tables: monomial i times monomial j lands in slot table[i, j]
_T12 = np.array(
    [[_IDX2[tuple(a + b for a, b in zip(u, v))] for v in MON1] for u in MON1]
)
_T23 = np.array(
    [[_IDX3[tuple(a + b for a, b in zip(u, v))] for v in MON1] for u in MON2]
)

# cubic monomial -> (column in BASIS, z power) for the hidden-variable split
_BASIS_IDX = {e: i for i, e in enumerate(BASIS)}
_COL_OF_MON3 = np.array([_BASIS_IDX[(a, b)] for a, b, _ in MON3])
_ZPOW_OF_MON3 = np.array([c for _, _, c in MON3])


def _table_mul(u: np.ndarray, v: np.ndarray, table: np.ndarray, out_len: int):
    """Multiply two dense monomial-coefficient vectors via an index table.

    Float inputs take the vectorized path; object (exact integer) inputs
    fall back to Python accumulation.
    """
    prod = np.outer(u, v)
    if prod.dtype == object:
        out = np.zeros(out_len, dtype=object)
        for idx, val in zip(table.ravel(), prod.ravel()):
            out[idx] += val
        return out
    return np.bincount(table.ravel(), weights=prod.ravel(), minlength=out_len)


def _mul11(u, v):
    return _table_mul(u, v, _T12, len(MON2))


def _mul21(u, v):
    return _table_mul(u, v, _T23, len(MON3))


def constraint_vectors(e_basis: np.ndarray) -> list:
    """The ten cubic constraints as dense vectors over the MON3 basis.

    ``e_basis`` is (4, 3, 3): the coefficients of (x, y, z, 1) for every
    entry of E.  Works on float or exact object arrays.
    """
    ent = [[np.asarray(e_basis[:, r, c]) for c in range(3)] for r in range(3)]

    def minor(r1, c1, r2, c2):
        return _mul11(ent[r1][c1], ent[r2][c2]) - _mul11(ent[r1][c2], ent[r2][c1])

    det = (
        _mul21(minor(1, 1, 2, 2), ent[0][0])
        - _mul21(minor(1, 0, 2, 2), ent[0][1])
        + _mul21(minor(1, 0, 2, 1), ent[0][2])
    )

    gram = [[None] * 3 for _ in range(3)]
    for r in range(3):
        for c in range(r, 3):
            s = _mul11(ent[r][0], ent[c][0])
            s = s + _mul11(ent[r][1], ent[c][1])
            s = s + _mul11(ent[r][2], ent[c][2])
            gram[r][c] = s
            gram[c][r] = s
    tr = gram[0][0] + gram[1][1] + gram[2][2]

    eqs = [det]
    for r in range(3):
        for c in range(3):
            acc = _mul21(2 * gram[r][0], ent[0][c])
            acc = acc + _mul21(2 * gram[r][1], ent[1][c])
            acc = acc + _mul21(2 * gram[r][2], ent[2][c])
            acc = acc - _mul21(tr, ent[r][c])
            eqs.append(acc)
    return eqs


def _nullspace_basis(data: "FivePointData") -> np.ndarray:
    """E1..E4 spanning the epipolar nullspace, as a (4, 3, 3) stack."""
    q = np.einsum("ni,nj->nij", data.pts_b, data.pts_a).reshape(5, 9)
    _, s, vh = np.linalg.svd(q)
    if s[4] < RANK_TOL * s[0]:
        raise DegenerateDataError(
            "degenerate correspondences: epipolar matrix is rank-deficient"
        )
    return vh[5:].reshape(4, 3, 3)


@dataclass(frozen=True)
class FivePointData:
    """Five unit-norm homogeneous point pairs from two calibrated views."""

    pts_a: np.ndarray
    pts_b: np.ndarray

    def __post_init__(self):
        for name, pts in (("pts_a", self.pts_a), ("pts_b", self.pts_b)):
            pts = np.asarray(pts, dtype=float)
            if pts.shape != (5, 3):
                raise ValueError(f"{name} must be (5, 3), got {pts.shape}")
            norms = np.linalg.norm(pts, axis=1)
            if np.any(norms == 0.0):
                raise DegenerateDataError(f"{name} contains a zero point")
            object.__setattr__(self, name, pts / norms[:, None])


def build(data: FivePointData) -> MatrixPolynomial:
    e_basis = _nullspace_basis(data)
    eqs = constraint_vectors(e_basis)
    stack = np.zeros((4, 10, 10))
    for row, eq in enumerate(eqs):
        stack[_ZPOW_OF_MON3, row, _COL_OF_MON3] = eq
    return MatrixPolynomial(stack)


def modular_matrix(rng: np.random.Generator, p: int):
    """Constraint matrix over Z_p from random residues for the 36 E-basis entries."""
    from ..offline import ModularPolyMatrix

    e_basis = np.zeros((4, 3, 3), dtype=object)
    for i in range(4):
        for r in range(3):
            for c in range(3):
                e_basis[i, r, c] = int(rng.integers(1, p))
    eqs = constraint_vectors(e_basis)
    entries = []
    for eq in eqs:
        row = [[] for _ in range(10)]
        for m, val in enumerate(eq):
            col = _COL_OF_MON3[m]
            zpow = _ZPOW_OF_MON3[m]
            coeffs = row[col]
            if len(coeffs) <= zpow:
                coeffs.extend([0] * (zpow + 1 - len(coeffs)))
            coeffs[zpow] = int(val) % p
        for coeffs in row:
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        entries.append(row)
    return ModularPolyMatrix(entries, p)


def original_equations(data: FivePointData) -> PolynomialSystem:
    eqs = constraint_vectors(_nullspace_basis(data))
    polys = tuple(
        MultivariatePolynomial.from_terms(
            [(float(c), e) for c, e in zip(eq, MON3)], VAR_NAMES
        )
        for eq in eqs
    )
    return PolynomialSystem(polys, 3)


def random_data(rng: np.random.Generator) -> FivePointData:
    return FivePointData(
        rng.standard_normal((5, 3)), rng.standard_normal((5, 3))
    )


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q = -q
    return q


def _skew(t: np.ndarray) -> np.ndarray:
    return np.array(
        [[0.0, -t[2], t[1]], [t[2], 0.0, -t[0]], [-t[1], t[0], 0.0]]
    )


def generate_instance(rng: np.random.Generator):
    """Synthetic correspondences from a random rigid motion.

    Returns the data plus the ground-truth (x, y, z) coordinates of the
    true essential matrix in the instance's own nullspace basis.
    """
    while True:
        rot = _random_rotation(rng)
        t = rng.standard_normal(3)
        if np.linalg.norm(t) < 0.1:
            continue
        t /= np.linalg.norm(t)
        pts3d = np.column_stack(
            [
                rng.uniform(-2.0, 2.0, size=5),
                rng.uniform(-2.0, 2.0, size=5),
                rng.uniform(4.0, 8.0, size=5),
            ]
        )
        pts_a = pts3d
        pts_b = pts3d @ rot.T + t
        try:
            data = FivePointData(pts_a, pts_b)
            e_basis = _nullspace_basis(data)
        except DegenerateDataError:
            continue
        e_true = _skew(t) @ rot
        coords = e_basis.reshape(4, 9) @ e_true.ravel()
        if abs(coords[3]) < 0.1 * np.linalg.norm(coords):
            continue  # ground truth nearly outside the affine chart
        gt = coords[:3] / coords[3]
        return data, [gt]


def data_to_json(data: FivePointData) -> dict:
    return {"pts_a": data.pts_a.tolist(), "pts_b": data.pts_b.tolist()}


def data_from_json(obj: dict) -> FivePointData:
    return FivePointData(
        np.array(obj["pts_a"], dtype=float), np.array(obj["pts_b"], dtype=float)
    )


PROBLEM = Problem(
    problem_id="five_point",
    n_vars=3,
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
