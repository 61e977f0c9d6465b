"""Online stage: from instance data to verified solutions.

One solve executes the whole sampling pipeline: build the matrix
polynomial, evaluate it at the unit-circle points with one FFT, take the
batched determinants, recover and trim the determinant coefficients via
IFFT, root the polynomial through its companion matrix, then back-
substitute every real candidate root with Cramer-rule determinant ratios
and keep the candidates whose residual against the original equations is
small.  No step forms a matrix inverse or solves a linear system through
one; every quantity is a ratio of determinants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrixpoly import MatrixPolynomial, det_complex, evaluate_at
from .offline import SolverTemplate
from .problems import DegenerateDataError, get_problem
from .rootfind import DEFAULT_IM_TOL, real_candidates, roots
from .spectral import UnivariatePolynomial, batched_eval, recover_coefficients, trim

RESIDUAL_FAIL_THRESHOLD = 1e-3
COORDINATE_IM_TOL = 1e-6
# multiplicity-2 roots split by ~sqrt(machine eps) ~ 1e-8, so the merge
# tolerance must sit above that to collapse them into one solution
DUPLICATE_TOL = 1e-7
SINGULAR_FLOOR = 1e-300
REAL_SYMMETRY_TOL = 1e-10


class SingularSubmatrixError(ArithmeticError):
    """The deletion submatrix lost rank at a candidate root."""


class SolveError(RuntimeError):
    """The instance could not be solved (degenerate data or collapse)."""


@dataclass(frozen=True)
class CandidateSolution:
    """A full solution vector with its normalized residual.

    The residual is max_i |f_i(x)| over the original equations divided by
    the Euclidean norm of x, recomputed from the input system.
    """

    x: np.ndarray
    residual: float


@dataclass(frozen=True)
class SolutionSet:
    accepted: tuple
    rejected_count: int
    failed: bool
    candidate_roots: int  # complex roots of the trimmed determinant polynomial
    roots_found: int  # real candidate vectors that reached residual ranking


def cramer_ratio(mp_sub: np.ndarray, rhs: np.ndarray, col: int) -> complex:
    """One Cramer-rule component: det(column-replaced) / det(submatrix).

    Both determinants go through the pivoted-LU determinant; no inverse is
    ever formed.
    """
    mp_sub = np.asarray(mp_sub)
    if mp_sub.ndim != 2 or mp_sub.shape[0] != mp_sub.shape[1]:
        raise ValueError("submatrix must be square")
    if not 0 <= col < mp_sub.shape[1]:
        raise ValueError(f"column {col} out of range")
    denom = det_complex(mp_sub)
    if abs(denom) < SINGULAR_FLOOR:
        raise SingularSubmatrixError("submatrix numerically singular")
    replaced = np.array(mp_sub, dtype=complex, copy=True)
    replaced[:, col] = rhs
    return det_complex(replaced) / denom


def _variable_from_pair(
    m_at_root: np.ndarray, i: int, j: int, j1: int, j2: int
) -> complex:
    sub = np.delete(np.delete(m_at_root, i, axis=0), j, axis=1)
    rhs = -np.delete(m_at_root[:, j], i)
    dets = []
    for idx in (j1, j2):
        col = idx - 1 if idx > j else idx
        replaced = np.array(sub, dtype=complex, copy=True)
        replaced[:, col] = rhs
        dets.append(det_complex(replaced))
    if abs(dets[1]) < SINGULAR_FLOOR:
        raise SingularSubmatrixError("submatrix numerically singular")
    return dets[0] / dets[1]


def recover_variable(
    m_at_root: np.ndarray, template: SolverTemplate, w: int
) -> complex:
    """Value of variable w from the ratio of two column-replaced determinants.

    Deletes the template's row/column pair from the evaluated matrix, forms
    the negated deleted column as right-hand side, and returns
    det(replace col j1) / det(replace col j2); the shared b_j normalization
    cancels, so the result does not depend on the deleted column's monomial.
    """
    i, j = template.deletion_pair
    j1, j2 = template.recovery_pairs[w]
    try:
        return _variable_from_pair(m_at_root, i, j, j1, j2)
    except SingularSubmatrixError:
        raise SingularSubmatrixError(
            f"submatrix numerically singular recovering variable {w}"
        ) from None


def _fallback_deletions(template: SolverTemplate) -> list:
    """Row-major alternates to the template's deletion pair.

    The offline pair is validated on generic data, but a special instance
    can zero it out structurally (for example when the deleted column has
    support only in the deleted row); alternates keep such candidates alive.
    """
    from .offline import TemplateError, select_recovery_pairs

    options = []
    pairs_for_col: dict = {}
    for i in range(template.size):
        for j in range(template.size):
            if (i, j) == template.deletion_pair:
                continue
            if j not in pairs_for_col:
                try:
                    pairs_for_col[j] = select_recovery_pairs(
                        template.basis, j, template.n_vars, template.hidden_index
                    )
                except TemplateError:
                    pairs_for_col[j] = None
            if pairs_for_col[j] is not None:
                options.append(((i, j), pairs_for_col[j]))
    return options


def _assemble_candidates(
    mp: MatrixPolynomial,
    template: SolverTemplate,
    hidden_values: np.ndarray,
    system,
) -> list:
    primary = (template.deletion_pair, template.recovery_pairs)
    fallback: list | None = None  # built only if the template pair degenerates
    out = []
    for v in hidden_values:
        m_at_root = evaluate_at(mp, complex(v))
        vec = None
        discarded = False
        option_index = -1
        while True:
            if option_index < 0:
                (i, j), pairs = primary
            else:
                if fallback is None:
                    fallback = _fallback_deletions(template)
                if option_index >= len(fallback):
                    break
                (i, j), pairs = fallback[option_index]
            option_index += 1
            trial = np.empty(template.n_vars)
            ok = True
            for w in range(template.n_vars):
                if w == template.hidden_index:
                    trial[w] = v
                    continue
                try:
                    val = _variable_from_pair(m_at_root, i, j, *pairs[w])
                except SingularSubmatrixError:
                    ok = False  # try the next deletion pair
                    break
                if abs(val.imag) > COORDINATE_IM_TOL * (1.0 + abs(val.real)):
                    ok = False
                    discarded = True  # non-real coordinate: candidate is dead
                    break
                trial[w] = val.real
            if discarded:
                break
            if ok:
                vec = trial
                break
        if vec is None:
            continue
        norm = float(np.linalg.norm(vec))
        residual = system.max_abs_residual(vec) / (norm if norm > 0.0 else 1.0)
        out.append(CandidateSolution(vec, float(residual)))
    return out


def _deduplicate(candidates: list) -> list:
    """Merge near-identical vectors, keeping the lower residual."""
    kept: list = []
    for cand in candidates:  # already sorted by residual
        scale = 1.0 + float(np.max(np.abs(cand.x)))
        if any(
            np.max(np.abs(cand.x - other.x)) < DUPLICATE_TOL * scale
            for other in kept
        ):
            continue
        kept.append(cand)
    return kept


def solve_online(
    template: SolverTemplate,
    data,
    *,
    im_tol: float = DEFAULT_IM_TOL,
    rank_check: bool = False,
) -> SolutionSet:
    """Run the full online stage for one instance.

    ``rank_check`` additionally verifies that the full matrix is
    numerically rank-deficient at every accepted root (diagnostic; off by
    default).
    """
    problem = get_problem(template.problem_id)
    try:
        mp = problem.build(data)
    except DegenerateDataError as exc:
        raise SolveError(f"degenerate instance: {exc}") from exc
    if mp.size != template.size:
        raise SolveError(
            f"matrix size {mp.size} does not match template {template.size}"
        )

    samples = det_complex(batched_eval(mp, template.k))
    raw = recover_coefficients(samples)
    max_mag = float(np.abs(raw.coeffs).max())
    if max_mag == 0.0:
        raise SolveError("degenerate instance: determinant vanished identically")
    if float(np.abs(raw.coeffs.imag).max()) > REAL_SYMMETRY_TOL * max_mag:
        raise SolveError(
            "degenerate instance: real-coefficient symmetry violated"
        )
    det_poly = trim(UnivariatePolynomial(raw.coeffs.real))
    if det_poly.degree < 1:
        raise SolveError("degenerate instance: determinant degree collapsed")

    all_roots = roots(det_poly)
    hidden_values = real_candidates(all_roots, im_tol)
    system = problem.original_equations(data)
    candidates = _assemble_candidates(mp, template, hidden_values, system)
    candidates.sort(key=lambda c: (c.residual, tuple(c.x)))
    kept = _deduplicate(candidates)

    good = [c for c in kept if c.residual <= RESIDUAL_FAIL_THRESHOLD]
    accepted = tuple(good[: template.r])
    if rank_check:
        for cand in accepted:
            sigma = np.linalg.svd(
                evaluate_at(mp, complex(cand.x[template.hidden_index])),
                compute_uv=False,
            )
            if sigma[-1] > 1e-6 * sigma[0]:
                raise SolveError(
                    "rank check failed: matrix not rank-deficient at accepted root"
                )
    return SolutionSet(
        accepted=accepted,
        rejected_count=len(candidates) - len(accepted),
        failed=not good,
        candidate_roots=len(all_roots),
        roots_found=len(candidates),
    )


def solution_set_to_json(result: SolutionSet) -> dict:
    return {
        "solutions": [
            {"x": c.x.tolist(), "residual": c.residual} for c in result.accepted
        ],
        "failed": result.failed,
        "roots_found": result.roots_found,
        "candidate_roots": result.candidate_roots,
    }
