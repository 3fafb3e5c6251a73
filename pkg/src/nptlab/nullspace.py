"""Numerical checks of the null-space lemma for ``((I - |phi><phi|)/(D-1))^{(x)n}``.

The n-copy Schmidt-rank-2 argument reduces to a linear system whose unknowns
are the coefficients of the product vectors ``phi_{l_1} (x) ... (x) phi_{l_n}``
with at least one ``l_t = 0``, and whose equations are the coefficients of the
diagonal kets ``|J>_A |J>_B``. The lemma needs every submatrix obtained by
deleting two rows to keep full column rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, product
from math import comb

import numpy as np

from .distillability import SeesawOptions, SeesawResult, seesaw_min
from .qcore import (
    DEFAULT_SIZE_CAP,
    BipartitePureState,
    ComplexOperator,
    SizeCapError,
    identity,
    random_unitary,
    regrouped_tensor_power,
)

ZERO_EIG_TOL = 1e-10
DEFAULT_RANK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LambdaMatrix:
    """k x k unitary; column l holds the diagonal coefficients of ``|phi_l>``."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=complex)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        k = e.shape[0]
        if e.shape != (k, k):
            raise ValueError(f"LambdaMatrix must be square, got {e.shape}")
        gram = e.conj().T @ e
        if np.max(np.abs(gram - np.eye(k))) > 1e-12:
            raise ValueError("LambdaMatrix columns are not orthonormal")

    @property
    def k(self) -> int:
        return self.entries.shape[0]


def extend_to_unitary(lambda0) -> LambdaMatrix:
    """Householder completion of a positive unit vector to an orthogonal matrix.

    The reflector ``H = I - 2 w w^T / (w^T w)`` with ``w = e_0 - lambda0``
    maps ``e_0`` to ``lambda0``; its columns are the completion.
    """
    lam = np.asarray(lambda0, dtype=float)
    nrm = np.linalg.norm(lam)
    if nrm == 0:
        raise ValueError("cannot extend the zero vector")
    if abs(nrm - 1) > 1e-12:
        raise ValueError(f"lambda0 must have unit norm, got {nrm!r}")
    k = lam.size
    w = np.zeros(k)
    w[0] = 1.0
    w -= lam
    ww = w @ w
    if ww < 1e-30:
        return LambdaMatrix(np.eye(k))
    H = np.eye(k) - 2.0 * np.outer(w, w) / ww
    return LambdaMatrix(H)


def random_lambda_matrix(k: int, rng: np.random.Generator, lambda0=None) -> LambdaMatrix:
    """Random orthonormal basis of the diagonal span with a positive first column.

    Column 0 is ``lambda0`` (a random positive unit vector if omitted); the
    remaining columns are a Haar-random rotation of the Householder completion.
    """
    if lambda0 is None:
        lambda0 = rng.uniform(0.05, 1.0, size=k)
        lambda0 /= np.linalg.norm(lambda0)
    H = extend_to_unitary(lambda0).entries
    R = np.eye(k, dtype=complex)
    R[1:, 1:] = random_unitary(k - 1, rng)
    return LambdaMatrix(H @ R)


def variable_indices(k: int, n: int) -> list[tuple[int, ...]]:
    return [L for L in product(range(k), repeat=n) if 0 in L]


def coefficient_matrix(lm: LambdaMatrix, n: int, size_cap: int = DEFAULT_SIZE_CAP):
    """``A[J, L] = prod_t lam[j_t, l_t]`` with rows J in {0..k-1}^n and
    columns L restricted to multi-indices containing a 0.

    Returns ``(A, row_index, col_index)``.
    """
    k = lm.k
    if k < 3:
        raise ValueError(f"k must be at least 3, got {k}")
    if k**n > size_cap:
        raise SizeCapError(f"k^n = {k**n} exceeds cap {size_cap}")
    rows = list(product(range(k), repeat=n))
    cols = variable_indices(k, n)
    full = reduce(np.kron, [lm.entries] * n) if n > 1 else lm.entries
    # column index of L in the Kronecker ordering is the base-k number L
    col_pos = [int(np.ravel_multi_index(L, (k,) * n)) for L in cols]
    return full[:, col_pos], rows, cols


@dataclass
class RankCheckReport:
    k: int
    n: int
    rows: int
    cols: int
    pairs_tested: int
    exhaustive: bool
    min_singular_value: float
    min_relative_singular_value: float
    pass_: bool
    tol: float
    worst_pair: tuple[int, int] | None = None
    per_trial_min: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": self.k, "n": self.n, "rows": self.rows, "cols": self.cols,
            "pairs_tested": self.pairs_tested,
            "sampling": "exhaustive" if self.exhaustive else "random",
            "min_singular_value": self.min_singular_value,
            "min_relative_singular_value": self.min_relative_singular_value,
            "tol": self.tol,
            "pass": self.pass_,
            "worst_pair": None if self.worst_pair is None else list(self.worst_pair),
            "per_trial_min_singular_values": list(self.per_trial_min),
        }


def two_deleted_rank_check(A: np.ndarray, tol: float = DEFAULT_RANK_TOL, exhaustive_limit: int = 5000,
                           seed: int = 0, k: int = 0, n: int = 0) -> RankCheckReport:
    """Smallest singular value over all submatrices with two rows deleted.

    Pass iff ``s_min / s_max > tol`` for every tested submatrix. When the
    number of row pairs exceeds ``exhaustive_limit`` a seeded random sample of
    that many pairs is tested instead.
    """
    A = np.asarray(A)
    r, c = A.shape
    if r < c + 2 or c < 1:
        raise ValueError(f"need rows >= cols + 2, got {r}x{c}")
    total = comb(r, 2)
    if total <= exhaustive_limit:
        pairs = list(combinations(range(r), 2))
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        flat = rng.choice(total, size=exhaustive_limit, replace=False)
        all_pairs = list(combinations(range(r), 2))
        pairs = [all_pairs[i] for i in sorted(flat)]
        exhaustive = False
    smin = np.inf
    rel = np.inf
    worst = None
    keep = np.ones(r, dtype=bool)
    for p in pairs:
        keep[:] = True
        keep[list(p)] = False
        s = np.linalg.svd(A[keep], compute_uv=False)
        if s[-1] < smin:
            smin = float(s[-1])
        if s[-1] / s[0] < rel:
            rel = float(s[-1] / s[0])
            worst = p
    return RankCheckReport(k=k, n=n, rows=r, cols=c, pairs_tested=len(pairs), exhaustive=exhaustive,
                           min_singular_value=smin, min_relative_singular_value=rel,
                           pass_=rel > tol, tol=tol, worst_pair=worst)


def lemma1_trials(k: int, n: int, trials: int, seed: int = 0, tol: float = DEFAULT_RANK_TOL,
                  exhaustive_limit: int = 5000) -> RankCheckReport:
    """Run the rank check on ``trials`` random LambdaMatrix draws and merge the reports."""
    rng = np.random.default_rng(seed)
    reports = []
    for t in range(trials):
        A, _, _ = coefficient_matrix(random_lambda_matrix(k, rng), n)
        reports.append(two_deleted_rank_check(A, tol, exhaustive_limit, seed=seed + t, k=k, n=n))
    worst = min(reports, key=lambda r: r.min_relative_singular_value)
    return RankCheckReport(
        k=k, n=n, rows=worst.rows, cols=worst.cols,
        pairs_tested=sum(r.pairs_tested for r in reports),
        exhaustive=all(r.exhaustive for r in reports),
        min_singular_value=min(r.min_singular_value for r in reports),
        min_relative_singular_value=worst.min_relative_singular_value,
        pass_=all(r.pass_ for r in reports), tol=tol, worst_pair=worst.worst_pair,
        per_trial_min=[r.min_singular_value for r in reports],
    )


def complement_pt(phi: BipartitePureState) -> ComplexOperator:
    """``(I - |phi><phi|)/(D - 1)``, the PT of the eps = 0 endpoint."""
    return (identity(phi.dimA, phi.dimB) - phi.projector()) * (1.0 / (phi.D - 1))


def nullspace_dimension_check(phi: BipartitePureState, n: int, size_cap: int = DEFAULT_SIZE_CAP,
                              tol: float = ZERO_EIG_TOL) -> tuple[int, int]:
    """Return ``(expected, measured)`` null-space dimensions of ``complement_pt(phi)^{(x)n}``."""
    D = phi.D
    if D**n > size_cap:
        raise SizeCapError(f"D^n = {D**n} exceeds cap {size_cap}")
    op = regrouped_tensor_power(complement_pt(phi), n, size_cap)
    evals = np.linalg.eigvalsh(op.data)
    measured = int(np.sum(np.abs(evals) < tol))
    return D**n - (D - 1) ** n, measured


def sr2_nullspace_scan(phi: BipartitePureState, n: int, opts: SeesawOptions | None = None) -> SeesawResult:
    """See-saw minimum of ``complement_pt(phi)^{(x)n}`` over Schmidt-rank-2 vectors.

    A strictly positive value corroborates that no Schmidt-rank-2 vector lies
    in the null space.
    """
    if phi.schmidt_rank < 3:
        raise ValueError(f"phi must have Schmidt rank >= 3, got {phi.schmidt_rank}")
    opts = opts or SeesawOptions()
    M = regrouped_tensor_power(complement_pt(phi), n, opts.size_cap)
    res = seesaw_min(M, opts)
    res.n_copies = n
    res.epsilon = 0.0
    return res
