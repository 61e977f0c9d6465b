"""Once-per-problem template construction.

Everything here runs rarely and must be deterministic and exact:

* the determinant degree k is measured numerically over several random
  data draws,
* the row/column deletion pair is validated by an exact coprimality test
  in Z_p[x] (random data residues, hidden variable kept symbolic): the
  full determinant and the deleted-pair minor must have a constant GCD,
* recovery index pairs are chosen from the monomial basis,

and the results are frozen into a JSON-serializable SolverTemplate that
the online stage replays on every instance.

Floating-point GCDs are ill-defined and rational arithmetic blows up, so
the coprimality test works modulo two fixed 31-bit primes; a pair is
accepted only if its GCD is constant in both independent specializations,
which bounds the false-accept probability below ~deg^2/p^2.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .matrixpoly import det_complex
from .spectral import batched_eval, recover_coefficients, trim

SPECIALIZATION_PRIMES = (2147483647, 2147483629)


class TemplateError(RuntimeError):
    """Offline construction failed; the template is rejected."""


# --- Z_p[x] arithmetic -------------------------------------------------------
#
# Polynomials are lists of ints in [0, p), ascending degree, no trailing
# zeros; [] is the zero polynomial.


def _zp_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _zp_divmod(a: list, b: list, p: int) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    rem = list(a)
    if len(rem) < len(b):
        return [], _zp_trim(rem)
    inv_lead = pow(b[-1], -1, p)
    q = [0] * (len(rem) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = (rem[k + len(b) - 1] * inv_lead) % p
        q[k] = c
        if c:
            for j, bj in enumerate(b):
                rem[k + j] = (rem[k + j] - c * bj) % p
    return _zp_trim(q), _zp_trim(rem)


def _zp_gcd(a: list, b: list, p: int) -> list:
    """Monic Euclidean GCD in Z_p[x]."""
    a, b = _zp_trim(list(a)), _zp_trim(list(b))
    while b:
        a, b = b, _zp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [(c * inv) % p for c in a]
    return a


def _zp_eval(a: list, t: int, p: int) -> int:
    v = 0
    for c in reversed(a):
        v = (v * t + c) % p
    return v


def _zp_det_scalar(m: list, p: int) -> int:
    """Determinant of a square matrix of residues, Gaussian elimination."""
    a = [row[:] for row in m]
    n = len(a)
    det = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = (det * a[k][k]) % p
        inv = pow(a[k][k], -1, p)
        for i in range(k + 1, n):
            f = (a[i][k] * inv) % p
            if f:
                for j in range(k, n):
                    a[i][j] = (a[i][j] - f * a[k][j]) % p
    return det % p


def _zp_interpolate(points: list, values: list, p: int) -> list:
    """Lagrange interpolation through (points[i], values[i]) in Z_p[x]."""
    coeffs = [0] * len(points)
    for t, y in zip(points, values):
        if y == 0:
            continue
        basis = [1]
        denom = 1
        for s in points:
            if s == t:
                continue
            denom = (denom * (t - s)) % p
            basis = [0] + basis
            for i in range(len(basis) - 1):
                basis[i] = (basis[i] - s * basis[i + 1]) % p
        scale = (y * pow(denom, -1, p)) % p
        for i, bc in enumerate(basis):
            coeffs[i] = (coeffs[i] + scale * bc) % p
    return _zp_trim(coeffs)


@dataclass
class ModularPolyMatrix:
    """Square matrix of Z_p[x] entries (coefficient lists, ascending)."""

    entries: list
    p: int

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def entry_degree(self) -> int:
        return max(
            (len(e) - 1 for row in self.entries for e in row if e), default=0
        )

    def minor(self, i: int, j: int) -> "ModularPolyMatrix":
        sub = [
            [e for c, e in enumerate(row) if c != j]
            for r, row in enumerate(self.entries)
            if r != i
        ]
        return ModularPolyMatrix(sub, self.p)


def det_modular(mm: ModularPolyMatrix) -> list:
    """Exact determinant polynomial of a ModularPolyMatrix.

    Mirrors the online pipeline structurally: evaluate the matrix at
    enough distinct field points, take scalar determinants, interpolate.
    """
    n = mm.size
    bound = n * mm.entry_degree
    if bound + 1 > mm.p:
        raise ValueError("field too small for interpolation")
    points = list(range(bound + 1))
    values = []
    for t in points:
        scalar = [[_zp_eval(e, t, mm.p) for e in row] for row in mm.entries]
        values.append(_zp_det_scalar(scalar, mm.p))
    return _zp_interpolate(points, values, mm.p)


# --- template construction ---------------------------------------------------


@dataclass(frozen=True)
class SolverTemplate:
    """Offline artifact consumed by the online stage."""

    problem_id: str
    n_vars: int
    hidden_index: int
    size: int
    basis: tuple
    k: int
    r: int
    deletion_pair: tuple[int, int]
    recovery_pairs: dict

    def __post_init__(self):
        if not self.k >= self.r >= 1:
            raise ValueError(f"need k >= r >= 1, got k={self.k}, r={self.r}")
        i, j = self.deletion_pair
        if not (0 <= i < self.size and 0 <= j < self.size):
            raise ValueError(f"deletion pair {self.deletion_pair} out of range")
        for w, (j1, j2) in self.recovery_pairs.items():
            if j1 == j or j2 == j:
                raise ValueError(f"recovery pair for variable {w} hits deleted column")
            diff = tuple(a - b for a, b in zip(self.basis[j1], self.basis[j2]))
            expected = self._unit(self._reduced_position(w))
            if diff != expected:
                raise ValueError(
                    f"recovery pair for variable {w} has monomial ratio {diff}"
                )

    def _reduced_position(self, w: int) -> int:
        return w - 1 if w > self.hidden_index else w

    def _unit(self, pos: int) -> tuple:
        e = [0] * (self.n_vars - 1)
        e[pos] = 1
        return tuple(e)


def template_to_json(template: SolverTemplate) -> str:
    obj = {
        "problem": template.problem_id,
        "n_vars": template.n_vars,
        "hidden": template.hidden_index,
        "N": template.size,
        "k": template.k,
        "r": template.r,
        "basis": [list(e) for e in template.basis],
        "deletion": list(template.deletion_pair),
        "recovery": {str(w): list(p) for w, p in sorted(template.recovery_pairs.items())},
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def template_from_json(text: str) -> SolverTemplate:
    obj = json.loads(text)
    return SolverTemplate(
        problem_id=obj["problem"],
        n_vars=obj["n_vars"],
        hidden_index=obj["hidden"],
        size=obj["N"],
        basis=tuple(tuple(e) for e in obj["basis"]),
        k=obj["k"],
        r=obj["r"],
        deletion_pair=tuple(obj["deletion"]),
        recovery_pairs={int(w): tuple(p) for w, p in obj["recovery"].items()},
    )


def detect_degree(problem, trials: int, rng_seed: int) -> int:
    """Degree of the determinant polynomial, measured over random data.

    Each trial builds the matrix from fresh random data, samples its
    determinant at N*d+1 unit-circle points, recovers and trims the
    coefficients.  The degree is the maximum over trials, which must also
    be the majority value (degenerate draws can only lose degree).
    """
    if trials < 3:
        raise ValueError("need at least 3 trials")
    children = np.random.SeedSequence(rng_seed).spawn(trials)
    degrees = []
    for child in children:
        data = problem.random_data(np.random.default_rng(child))
        mp = problem.build(data)
        k_sample = mp.size * mp.entry_degree
        samples = det_complex(batched_eval(mp, k_sample))
        degrees.append(trim(recover_coefficients(samples)).degree)
    k = max(degrees)
    if 2 * Counter(degrees)[k] <= trials:
        raise TemplateError(
            f"degenerate template: trimmed degrees {degrees} have no majority at {k}"
        )
    return k


def find_deletion_pair(problem, rng_seed: int) -> tuple[int, int]:
    """First row/column pair in scan order passing the coprimality test.

    For each of two independent specializations (fresh residues, distinct
    primes) the matrix is instantiated over Z_p with the hidden variable
    symbolic.  A pair is accepted when gcd(det M, det minor) is constant
    in both.

    Columns are scanned by ascending total degree of their basis monomial
    (rows ascending within a column): the deleted column's monomial divides
    the Cramer system, and the constant monomial never vanishes at a
    solution, so low-degree columns give far better-conditioned submatrices
    at the roots than an index-order scan.
    """
    children = np.random.SeedSequence(rng_seed).spawn(2)
    specializations = []
    for child, prime in zip(children, SPECIALIZATION_PRIMES):
        rng = np.random.default_rng(child)
        for _ in range(20):
            mm = problem.modular_matrix(rng, prime)
            full_det = det_modular(mm)
            if len(full_det) >= 2:
                break
        else:
            raise TemplateError("degenerate template: modular determinant is constant")
        specializations.append((mm, full_det))

    n = specializations[0][0].size
    columns = sorted(range(n), key=lambda j: (sum(problem.basis[j]), j))
    for j in columns:
        for i in range(n):
            ok = True
            for mm, full_det in specializations:
                minor_det = det_modular(mm.minor(i, j))
                if not minor_det or len(_zp_gcd(full_det, minor_det, mm.p)) != 1:
                    ok = False
                    break
            if ok:
                return (i, j)
    raise TemplateError("no valid deletion pair")


def select_recovery_pairs(
    basis, deleted_col: int, n_vars: int, hidden_index: int
) -> dict:
    """Index pairs whose basis-monomial ratio isolates each unknown.

    For every non-hidden variable, scans pairs (j1, j2) surviving the
    column deletion whose exponent difference is that variable's unit
    vector, preferring lowest total degree, then lexicographic order.
    """
    basis = [tuple(e) for e in basis]
    pairs = {}
    for w in range(n_vars):
        if w == hidden_index:
            continue
        pos = w - 1 if w > hidden_index else w
        unit = tuple(1 if q == pos else 0 for q in range(n_vars - 1))
        candidates = [
            (sum(basis[j1]) + sum(basis[j2]), j1, j2)
            for j1 in range(len(basis))
            for j2 in range(len(basis))
            if j1 != deleted_col
            and j2 != deleted_col
            and tuple(a - b for a, b in zip(basis[j1], basis[j2])) == unit
        ]
        if not candidates:
            raise TemplateError(
                f"basis insufficient for recovery of variable {w} "
                f"with column {deleted_col} deleted"
            )
        _, j1, j2 = min(candidates)
        pairs[w] = (j1, j2)
    return pairs


def build_template(problem, rng_seed: int, trials: int = 8) -> SolverTemplate:
    """Run the full offline stage for one problem."""
    k = detect_degree(problem, trials, rng_seed)
    deletion = find_deletion_pair(problem, rng_seed)
    recovery = select_recovery_pairs(
        problem.basis, deletion[1], problem.n_vars, problem.hidden_index
    )
    if problem.expected_solutions > k:
        raise TemplateError(
            f"expected solution count {problem.expected_solutions} exceeds degree {k}"
        )
    return SolverTemplate(
        problem_id=problem.problem_id,
        n_vars=problem.n_vars,
        hidden_index=problem.hidden_index,
        size=len(problem.basis),
        basis=tuple(tuple(e) for e in problem.basis),
        k=k,
        r=problem.expected_solutions,
        deletion_pair=deletion,
        recovery_pairs=recovery,
    )
