"""State families: the complement state, rho(eps), construction methods I/II,
the block-generalized family and the Dur-class PT operator."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np

from .qcore import (
    PSD_TOL,
    BipartitePureState,
    ComplexOperator,
    DimensionError,
    basis_ket,
    identity,
    min_eigenvalue,
    partial_transpose,
    witness_value,
)

COEFF_TOL = 1e-12


class Method(str, Enum):
    METHOD_I = "MethodI"
    METHOD_II = "MethodII"
    GENERALIZED = "Generalized"
    DUR = "Dur"


class SpecError(ValueError):
    """A construction recipe violates its preconditions."""


def _check_schmidt_vector(lam, name: str = "schmidt_coeffs") -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise SpecError(f"{name} must be a non-empty vector")
    if np.any(lam <= 0):
        raise SpecError(f"{name} must be strictly positive, got {lam.tolist()}")
    if abs(np.sum(lam**2) - 1.0) > COEFF_TOL:
        raise SpecError(f"{name} squares sum to {np.sum(lam**2)!r}, not 1")
    return lam


def diagonal_state(lam, d1: int, d2: int, offset: int = 0) -> BipartitePureState:
    """``sum_i lam_i |offset+i, offset+i>``."""
    lam = np.asarray(lam)
    if offset + lam.size > min(d1, d2):
        raise DimensionError(f"{lam.size} coefficients at offset {offset} do not fit in {d1}x{d2}")
    v = np.zeros(d1 * d2, dtype=complex)
    for i, c in enumerate(lam):
        v += c * basis_ket(offset + i, offset + i, d1, d2)
    return BipartitePureState(v, d1, d2)


def maximally_entangled(d: int) -> BipartitePureState:
    return diagonal_state(np.full(d, 1 / np.sqrt(d)), d, d)


def antisym_vector(i: int, j: int, d1: int, d2: int) -> BipartitePureState:
    """``(|ij> - |ji>) / sqrt 2``."""
    if not 0 <= i < j < min(d1, d2):
        raise IndexError(f"need 0 <= i < j < {min(d1, d2)}, got ({i}, {j})")
    v = (basis_ket(i, j, d1, d2) - basis_ket(j, i, d1, d2)) / np.sqrt(2)
    return BipartitePureState(v, d1, d2)


def sym_vector(i: int, j: int, d1: int, d2: int) -> BipartitePureState:
    if not 0 <= i < j < min(d1, d2):
        raise IndexError(f"need 0 <= i < j < {min(d1, d2)}, got ({i}, {j})")
    v = (basis_ket(i, j, d1, d2) + basis_ket(j, i, d1, d2)) / np.sqrt(2)
    return BipartitePureState(v, d1, d2)


@dataclass(frozen=True)
class PTEigenpair:
    value: float
    vector: np.ndarray
    label: str


def _schmidt_form_coefficients(phi: BipartitePureState) -> np.ndarray | None:
    """Diagonal coefficients if ``phi`` is ``sum lam_i |ii>`` with real positive lam, else None."""
    c = phi.coefficient_matrix()
    diag = np.diag(c)
    off = c.copy()
    np.fill_diagonal(off, 0)
    if np.max(np.abs(off), initial=0.0) > COEFF_TOL or np.max(np.abs(diag.imag)) > COEFF_TOL:
        return None
    lam = diag.real
    k = int(np.sum(np.abs(lam) > COEFF_TOL))
    if np.any(lam[:k] <= 0) or np.any(np.abs(lam[k:]) > COEFF_TOL):
        return None
    return lam[:k]


def pure_pt_eigensystem(phi: BipartitePureState, canonicalize: bool = False) -> list[PTEigenpair]:
    """Closed-form eigensystem of ``PT(|phi><phi|)``.

    For ``phi = sum_i lam_i |ii>`` the eigenpairs are ``lam_i^2`` on ``|ii>``,
    ``+lam_i lam_j`` on the symmetric and ``-lam_i lam_j`` on the antisymmetric
    combination of ``|ij>, |ji>``, and zero on every remaining product ket.
    With ``canonicalize=True`` a general ``phi`` is accepted: it is brought to
    that form by local unitaries ``U (x) V`` and the eigenvectors are mapped
    back through ``U (x) conj(V)``.
    """
    d1, d2 = phi.dimA, phi.dimB
    lam = _schmidt_form_coefficients(phi)
    U = V = None
    if lam is None:
        if not canonicalize:
            raise ValueError("state is not of the form sum_i lam_i |ii> with real positive lam; "
                             "pass canonicalize=True")
        sd = phi.schmidt
        k = sd.rank
        lam = sd.coefficients[:k]
        U = _complete_basis(sd.basisA[:, :k])
        V = _complete_basis(sd.basisB[:, :k])
    k = lam.size
    pairs: list[PTEigenpair] = []
    for i in range(k):
        pairs.append(PTEigenpair(float(lam[i] ** 2), basis_ket(i, i, d1, d2), f"|{i}{i}>"))
    for i, j in combinations(range(k), 2):
        pairs.append(PTEigenpair(float(lam[i] * lam[j]), sym_vector(i, j, d1, d2).amplitudes, f"psi+_{i}{j}"))
    for i, j in combinations(range(k), 2):
        pairs.append(PTEigenpair(float(-lam[i] * lam[j]), antisym_vector(i, j, d1, d2).amplitudes, f"psi-_{i}{j}"))
    for a in range(d1):
        for b in range(d2):
            if a < k and b < k:
                continue
            pairs.append(PTEigenpair(0.0, basis_ket(a, b, d1, d2), f"|{a}{b}>"))
    if U is not None:
        W = np.kron(U, V.conj())
        pairs = [PTEigenpair(p.value, W @ p.vector, p.label) for p in pairs]
    return pairs


def _complete_basis(cols: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns to a full unitary (deterministic, via QR)."""
    d, k = cols.shape
    if k == d:
        return cols
    q, _ = np.linalg.qr(np.hstack([cols, np.eye(d)]))
    # QR may flip phases of the leading columns; restore the given ones exactly
    out = q[:, :d].copy()
    out[:, :k] = cols
    return out


def reassemble(pairs: Sequence[PTEigenpair]) -> np.ndarray:
    return sum(p.value * np.outer(p.vector, p.vector.conj()) for p in pairs)


def complement_state(phi: BipartitePureState) -> ComplexOperator:
    """``(I - |phi><phi|)^PT / (D - 1)``: the PPT endpoint of the family."""
    op = identity(phi.dimA, phi.dimB) - phi.projector()
    return partial_transpose(op) * (1.0 / (phi.D - 1))


def build_rho(sigma: ComplexOperator, phi: BipartitePureState, eps: float) -> ComplexOperator:
    """``eps * sigma + (1 - eps) * complement_state(phi)``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {eps}")
    if sigma.dims != (phi.dimA, phi.dimB):
        raise DimensionError(f"sigma dims {sigma.dims} vs phi dims {(phi.dimA, phi.dimB)}")
    return sigma * eps + complement_state(phi) * (1.0 - eps)


@dataclass(frozen=True, eq=False)
class ConstructedPair:
    sigma: ComplexOperator
    phi: BipartitePureState
    lambda_abs: float

    def check(self) -> ConstructedPair:
        self.sigma.validate_density()
        lam = min_eigenvalue(partial_transpose(self.sigma))
        if lam >= -PSD_TOL:
            raise ValueError(f"sigma is PPT (min PT eigenvalue {lam:.3e})")
        if self.phi.schmidt_rank < 3:
            raise ValueError(f"phi has Schmidt rank {self.phi.schmidt_rank} < 3")
        w = witness_value(self.phi, self.sigma)
        if not self.lambda_abs > 0 or abs(w + self.lambda_abs) > 1e-10:
            raise ValueError(f"<phi|sigma^PT|phi> = {w} inconsistent with |Lambda| = {self.lambda_abs}")
        return self

    def rho(self, eps: float) -> ComplexOperator:
        return build_rho(self.sigma, self.phi, eps)


def method_one(beta, i: int, j: int, alpha: float, d: int, d2: int | None = None,
               eta_indices: Sequence[int] | None = None) -> ConstructedPair:
    """Pure sigma first, phi chosen from sigma's PT eigensystem.

    ``sigma = |psi><psi|`` with ``psi = sum_l beta_l |ll>`` of Schmidt rank m,
    and ``phi = sqrt(alpha) |psi-_ij> + sqrt(1 - alpha) |eta>`` where ``eta``
    defaults to ``|mm>``. Extra diagonal product kets outside psi's support can
    be listed in ``eta_indices``; the ``1 - alpha`` weight is split evenly.
    """
    d1, d2 = d, d if d2 is None else d2
    beta = _check_schmidt_vector(beta, "beta")
    m = beta.size
    if m < 2:
        raise SpecError("beta needs at least two coefficients")
    if m >= min(d1, d2):
        raise SpecError(f"Schmidt rank {m} of psi leaves no orthogonal product state in {d1}x{d2}")
    if not 0 < alpha < 1:
        raise SpecError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0 <= i < j < m:
        raise SpecError(f"pair ({i}, {j}) must satisfy 0 <= i < j < {m}")
    etas = [m] if eta_indices is None else list(eta_indices)
    if not etas or len(set(etas)) != len(etas) or any(not m <= l < min(d1, d2) for l in etas):
        raise SpecError(f"eta indices must be distinct and in [{m}, {min(d1, d2)})")
    psi = diagonal_state(beta, d1, d2)
    sigma = psi.projector()
    v = np.sqrt(alpha) * antisym_vector(i, j, d1, d2).amplitudes
    for l in etas:
        v = v + np.sqrt((1 - alpha) / len(etas)) * basis_ket(l, l, d1, d2)
    phi = BipartitePureState.normalized(v, d1, d2)
    return ConstructedPair(sigma, phi, float(alpha * beta[i] * beta[j])).check()


def antisym_mixture(weights: dict[tuple[int, int], float], d1: int, d2: int) -> ComplexOperator:
    rho = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    for (i, j), w in weights.items():
        rho += w * antisym_vector(i, j, d1, d2).projector().data
    return ComplexOperator(rho, d1, d2)


def _weights_from_matrix(weights, k: int) -> dict[tuple[int, int], float]:
    w = np.asarray(weights, dtype=float)
    if w.shape != (k, k):
        raise SpecError(f"weight matrix must be {k}x{k}, got {w.shape}")
    if np.any(np.tril(w) != 0):
        raise SpecError("weight matrix must be strictly upper triangular")
    if np.any(w < 0):
        raise SpecError("weights must be non-negative")
    if abs(w.sum() - 1.0) > COEFF_TOL:
        raise SpecError(f"weights sum to {w.sum()!r}, not 1")
    return {(i, j): float(w[i, j]) for i, j in combinations(range(k), 2) if w[i, j] > 0}


def uniform_weights(k: int) -> np.ndarray:
    w = np.triu(np.ones((k, k)), 1)
    return w / w.sum()


def method_two(lam, weights=None, d1: int | None = None, d2: int | None = None) -> ConstructedPair:
    """phi first; sigma is a mixture of the antisymmetric vectors ``psi-_ij`` of phi's PT."""
    lam = _check_schmidt_vector(lam, "lambda")
    k = lam.size
    d1 = k if d1 is None else d1
    d2 = d1 if d2 is None else d2
    if k < 3:
        raise SpecError(f"phi needs Schmidt rank >= 3, got {k}")
    if k > min(d1, d2):
        raise SpecError(f"Schmidt rank {k} does not fit in {d1}x{d2}")
    w = _weights_from_matrix(uniform_weights(k) if weights is None else weights, k)
    sigma = antisym_mixture(w, d1, d2)
    phi = diagonal_state(lam, d1, d2)
    lambda_abs = sum(a * lam[i] * lam[j] for (i, j), a in w.items())
    return ConstructedPair(sigma, phi, float(lambda_abs)).check()


def block_states(lams: Sequence, d: int, block_indices: Sequence[int] | None = None) -> list[BipartitePureState]:
    """Diagonal states on disjoint index blocks ``[k b, k b + k - 1]``."""
    lams = [_check_schmidt_vector(l) for l in lams]
    k = lams[0].size
    if any(l.size != k for l in lams):
        raise SpecError("all blocks must have the same Schmidt rank")
    if k < 3:
        raise SpecError(f"block Schmidt rank must be >= 3, got {k}")
    blocks = list(range(len(lams))) if block_indices is None else list(block_indices)
    if len(set(blocks)) != len(blocks):
        raise SpecError(f"overlapping blocks {blocks}")
    if any(b < 0 for b in blocks) or k * (max(blocks) + 1) > d:
        raise SpecError(f"blocks {blocks} of size {k} do not fit in dimension {d}")
    return [diagonal_state(l, d, d, offset=k * b) for l, b in zip(lams, blocks)]


def block_sigma(states: Sequence[BipartitePureState]) -> ComplexOperator:
    """Uniform mixture over every antisymmetric PT eigenvector of every block."""
    d = states[0].dimA
    vecs = []
    for phi in states:
        support = np.flatnonzero(np.abs(np.diag(phi.coefficient_matrix())) > COEFF_TOL)
        vecs += [antisym_vector(int(a), int(b), d, d) for a, b in combinations(support, 2)]
    return ComplexOperator(sum(v.projector().data for v in vecs) / len(vecs), d, d)


def generalized_rho(blocks: Sequence[tuple[Sequence[float], int]], sigma: ComplexOperator | None,
                    eps: float, d: int) -> ComplexOperator:
    """``eps sigma + (1 - eps) (I - sum_i |phi_i><phi_i|)^PT / (D - m)``.

    ``blocks`` lists ``(lambda, block_index)`` pairs; block ``b`` occupies
    local indices ``k b .. k b + k - 1``. ``sigma=None`` uses :func:`block_sigma`.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {eps}")
    states = block_states([b[0] for b in blocks], d, [b[1] for b in blocks])
    if sigma is None:
        sigma = block_sigma(states)
    if sigma.dims != (d, d):
        raise DimensionError(f"sigma dims {sigma.dims} vs {(d, d)}")
    m = len(states)
    D = d * d
    proj = sum(s.projector().data for s in states)
    comp = partial_transpose(ComplexOperator(np.eye(D) - proj, d, d))
    return sigma * eps + comp * ((1.0 - eps) / (D - m))


def dur_pt_operator(d: int) -> ComplexOperator:
    """PT of the Dur-class state at c = 1/(d(d+1)), eps = 0.

    ``(sum_{k=1}^{d-1} |phi_k><phi_k| + sum_{k != l} |kl><kl|) / (d^2 - 1)``
    with the Fourier states ``|phi_k> = sum_{j=0}^{d-1} e^{2 pi i jk/d} |jj> / sqrt d``.
    """
    if d < 3:
        raise ValueError(f"d must be at least 3, got {d}")
    D = d * d
    op = np.zeros((D, D), dtype=complex)
    for k in range(1, d):
        v = sum(np.exp(2j * np.pi * j * k / d) * basis_ket(j, j, d, d) for j in range(d)) / np.sqrt(d)
        op += np.outer(v, v.conj())
    for k in range(d):
        for l in range(d):
            if k != l:
                idx = k * d + l
                op[idx, idx] += 1.0
    return ComplexOperator(op / (D - 1), d, d)


@dataclass
class ConstructionSpec:
    """Declarative, JSON-serializable recipe for one state family.

    ``schmidt_coeffs`` holds beta (MethodI), lambda (MethodII) or, for
    Generalized, either one lambda vector reused for every block or a list of
    per-block vectors. ``mixing_weights`` is the strictly upper-triangular
    alpha_ij matrix of MethodII (uniform when omitted).
    """

    method: Method
    d1: int
    d2: int | None = None
    schmidt_coeffs: list | None = None
    mixing_weights: list | None = None
    alpha: float | None = None
    pair: tuple[int, int] | None = None
    block_count: int | None = None
    epsilon: float | None = None
    eta_indices: list[int] | None = None

    def __post_init__(self):
        self.method = Method(self.method)
        if self.d2 is None:
            self.d2 = self.d1
        if self.pair is not None:
            self.pair = tuple(int(x) for x in self.pair)
        if self.epsilon is not None and not 0.0 <= self.epsilon <= 1.0:
            raise SpecError(f"epsilon must lie in [0, 1], got {self.epsilon}")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["method"] = self.method.value
        if self.pair is not None:
            out["pair"] = list(self.pair)
        return {k: v for k, v in out.items() if v is not None}

    @classmethod
    def from_dict(cls, data: dict) -> ConstructionSpec:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise SpecError(f"unknown spec fields: {sorted(unknown)}")
        if "method" not in data or "d1" not in data:
            raise SpecError("spec requires 'method' and 'd1'")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> ConstructionSpec:
        return cls.from_dict(json.loads(text))

    def realize(self) -> StateFamily:
        return realize(self)


@dataclass(frozen=True, eq=False)
class StateFamily:
    """Realized construction: ``sigma``, the null-space states, and normalization."""

    spec: ConstructionSpec
    sigma: ComplexOperator
    phis: list[BipartitePureState]
    lambda_abs: list[float] = field(default_factory=list)

    @property
    def dims(self) -> tuple[int, int]:
        return self.sigma.dims

    @property
    def block_count(self) -> int:
        return len(self.phis)

    def rho(self, eps: float) -> ComplexOperator:
        if len(self.phis) == 1:
            return build_rho(self.sigma, self.phis[0], eps)
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {eps}")
        d1, d2 = self.dims
        D = d1 * d2
        proj = sum(p.projector().data for p in self.phis)
        comp = partial_transpose(ComplexOperator(np.eye(D) - proj, d1, d2))
        return self.sigma * eps + comp * ((1.0 - eps) / (D - len(self.phis)))

    def rho_pt(self, eps: float) -> ComplexOperator:
        return partial_transpose(self.rho(eps))


def realize(spec: ConstructionSpec) -> StateFamily:
    if spec.method is Method.METHOD_I:
        if spec.schmidt_coeffs is None or spec.alpha is None:
            raise SpecError("MethodI requires schmidt_coeffs (beta) and alpha")
        i, j = spec.pair if spec.pair is not None else (0, 1)
        pair = method_one(spec.schmidt_coeffs, i, j, spec.alpha, spec.d1, spec.d2, spec.eta_indices)
        return StateFamily(spec, pair.sigma, [pair.phi], [pair.lambda_abs])
    if spec.method is Method.METHOD_II:
        if spec.schmidt_coeffs is None:
            raise SpecError("MethodII requires schmidt_coeffs (lambda)")
        pair = method_two(spec.schmidt_coeffs, spec.mixing_weights, spec.d1, spec.d2)
        return StateFamily(spec, pair.sigma, [pair.phi], [pair.lambda_abs])
    if spec.method is Method.DUR:
        pair = method_two(np.full(spec.d1, 1 / np.sqrt(spec.d1)), None, spec.d1, spec.d2)
        return StateFamily(spec, pair.sigma, [pair.phi], [pair.lambda_abs])
    # Generalized
    if spec.d1 != spec.d2:
        raise SpecError("Generalized construction requires d1 == d2")
    if spec.schmidt_coeffs is None:
        raise SpecError("Generalized requires schmidt_coeffs")
    coeffs = spec.schmidt_coeffs
    if np.ndim(coeffs) == 1:
        m = spec.block_count or 1
        lams = [coeffs] * m
    else:
        lams = list(coeffs)
        if spec.block_count is not None and spec.block_count != len(lams):
            raise SpecError(f"block_count {spec.block_count} != {len(lams)} coefficient vectors")
    states = block_states(lams, spec.d1)
    sigma = block_sigma(states)
    lambda_abs = [-witness_value(p, sigma) for p in states]
    return StateFamily(spec, sigma, states, lambda_abs)
