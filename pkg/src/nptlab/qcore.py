"""Dense complex linear algebra on bipartite Hilbert spaces.

Operators are stored as dense ``complex128`` arrays together with the local
dimensions of the A and B factors. Basis ordering is the usual Kronecker one:
the basis ket ``|a b>`` sits at index ``a * dimB + b``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
RANK_TOL = 1e-9
ASYMMETRY_REJECT_TOL = 1e-8
DEFAULT_SIZE_CAP = 2**15


class DimensionError(ValueError):
    """Operands disagree on shape or bipartite dimensions."""


class SizeCapError(ValueError):
    """A requested object exceeds the configured dense-size cap."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ComplexOperator:
    """Square complex matrix acting on ``C^dimA (x) C^dimB``."""

    data: np.ndarray
    dimA: int
    dimB: int

    def __post_init__(self):
        data = _frozen(self.data)
        object.__setattr__(self, "data", data)
        if self.dimA < 1 or self.dimB < 1:
            raise DimensionError(f"local dimensions must be positive, got {self.dimA}x{self.dimB}")
        side = self.dimA * self.dimB
        if data.shape != (side, side):
            raise DimensionError(
                f"matrix shape {data.shape} does not match dimA*dimB = {side}"
            )

    @property
    def D(self) -> int:
        return self.dimA * self.dimB

    @property
    def dims(self) -> tuple[int, int]:
        return self.dimA, self.dimB

    def __add__(self, other: ComplexOperator) -> ComplexOperator:
        _check_same_dims(self, other)
        return ComplexOperator(self.data + other.data, self.dimA, self.dimB)

    def __sub__(self, other: ComplexOperator) -> ComplexOperator:
        _check_same_dims(self, other)
        return ComplexOperator(self.data - other.data, self.dimA, self.dimB)

    def __mul__(self, scalar) -> ComplexOperator:
        return ComplexOperator(self.data * scalar, self.dimA, self.dimB)

    __rmul__ = __mul__

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def max_asymmetry(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.max_asymmetry() <= tol

    def is_density(self, hermitian_tol: float = HERMITIAN_TOL, trace_tol: float = TRACE_TOL,
                   psd_tol: float = PSD_TOL) -> bool:
        if not self.is_hermitian(hermitian_tol):
            return False
        if abs(self.trace() - 1.0) > trace_tol:
            return False
        return float(np.linalg.eigvalsh(self.data)[0]) >= -psd_tol

    def validate_density(self) -> ComplexOperator:
        """Raise ``ValueError`` unless this is a density operator within tolerance."""
        asym = self.max_asymmetry()
        if asym > HERMITIAN_TOL:
            raise ValueError(f"not Hermitian: max |M - M^dag| = {asym:.3e}")
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} differs from 1")
        lam = float(np.linalg.eigvalsh(self.data)[0])
        if lam < -PSD_TOL:
            raise ValueError(f"min eigenvalue {lam:.3e} below -{PSD_TOL}")
        return self


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: np.ndarray
    basisA: np.ndarray  # columns
    basisB: np.ndarray  # columns
    rank: int

    def reconstruct(self) -> np.ndarray:
        mat = (self.basisA * self.coefficients) @ self.basisB.T
        return mat.reshape(-1)


@dataclass(frozen=True, eq=False)
class BipartitePureState:
    """Normalized vector on ``C^dimA (x) C^dimB``."""

    amplitudes: np.ndarray
    dimA: int
    dimB: int
    norm_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1))
        object.__setattr__(self, "amplitudes", amps)
        if amps.size != self.dimA * self.dimB:
            raise DimensionError(
                f"vector length {amps.size} does not match {self.dimA}x{self.dimB}"
            )
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > self.norm_tol:
            raise ValueError(f"state is not normalized (norm {nrm!r})")

    @classmethod
    def normalized(cls, amplitudes, dimA: int, dimB: int) -> BipartitePureState:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(amps / nrm, dimA, dimB)

    @property
    def D(self) -> int:
        return self.dimA * self.dimB

    def coefficient_matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dimA, self.dimB)

    @cached_property
    def schmidt(self) -> SchmidtDecomposition:
        return schmidt_decompose(self)

    @property
    def schmidt_rank(self) -> int:
        return self.schmidt.rank

    def projector(self) -> ComplexOperator:
        v = self.amplitudes
        return ComplexOperator(np.outer(v, v.conj()), self.dimA, self.dimB)

    def inner(self, other: BipartitePureState) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _check_same_dims(a: ComplexOperator, b: ComplexOperator) -> None:
    if a.dims != b.dims:
        raise DimensionError(f"dimension mismatch: {a.dims} vs {b.dims}")


def identity(dimA: int, dimB: int) -> ComplexOperator:
    return ComplexOperator(np.eye(dimA * dimB), dimA, dimB)


def maximally_mixed(dimA: int, dimB: int) -> ComplexOperator:
    D = dimA * dimB
    return ComplexOperator(np.eye(D) / D, dimA, dimB)


def basis_ket(a: int, b: int, dimA: int, dimB: int) -> np.ndarray:
    v = np.zeros(dimA * dimB, dtype=complex)
    v[a * dimB + b] = 1.0
    return v


def tensor(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    """Plain Kronecker product ``a (x) b``.

    Dimension metadata is composed per subsystem (``dimA = a.dimA * b.dimA``),
    but the matrix keeps the Kronecker factor order ``(A_a B_a A_b B_b)``; it
    only describes the A:B cut when one operand is trivial on a side. Use
    :func:`regrouped_tensor_power` for n-copy operators across the cut.
    """
    return ComplexOperator(np.kron(a.data, b.data), a.dimA * b.dimA, a.dimB * b.dimB)


def _regroup_permutation(n: int) -> list[int]:
    # axes of the Kronecker-ordered index: (a1, b1, a2, b2, ..., an, bn)
    return [2 * t for t in range(n)] + [2 * t + 1 for t in range(n)]


def regroup_vector(vec: np.ndarray, dA: int, dB: int, n: int) -> np.ndarray:
    """Permute a Kronecker-ordered n-copy vector into A-major ``(a1..an, b1..bn)`` order."""
    perm = _regroup_permutation(n)
    shape = [dA, dB] * n
    return np.asarray(vec).reshape(shape).transpose(perm).reshape(-1)


def regrouped_tensor_power(rho: ComplexOperator, n: int,
                           size_cap: int = DEFAULT_SIZE_CAP) -> ComplexOperator:
    """n-fold tensor power of ``rho`` with all A factors moved before all B factors.

    The result is bipartite over ``H_A^{(x)n} : H_B^{(x)n}`` so that Schmidt
    ranks of vectors on it refer to the cut between the two parties.
    """
    if n < 1:
        raise ValueError(f"number of copies must be positive, got {n}")
    dA, dB = rho.dims
    total = (dA * dB) ** n
    if total > size_cap:
        raise SizeCapError(f"{n} copies of a {dA}x{dB} operator give dimension {total} > cap {size_cap}")
    if n == 1:
        return rho
    full = reduce(np.kron, [rho.data] * n)
    perm = _regroup_permutation(n)
    perm = perm + [2 * n + p for p in perm]
    out = full.reshape([dA, dB] * (2 * n)).transpose(perm).reshape(total, total)
    return ComplexOperator(out, dA**n, dB**n)


def partial_transpose(m: ComplexOperator) -> ComplexOperator:
    """Transpose on subsystem B: entry (m mu, n nu) <- (m nu, n mu)."""
    dA, dB = m.dims
    t = m.data.reshape(dA, dB, dA, dB).transpose(0, 3, 2, 1).reshape(m.D, m.D)
    return ComplexOperator(t, dA, dB)


def schmidt_decompose(psi: BipartitePureState, rank_tol: float = RANK_TOL) -> SchmidtDecomposition:
    """Schmidt decomposition from the SVD of the ``dimA x dimB`` coefficient matrix.

    Phase convention: every A-side vector has its first component of
    non-negligible magnitude made real and positive; the B-side vector
    absorbs the conjugate phase so the reconstruction is unchanged.
    """
    u, s, vh = np.linalg.svd(psi.coefficient_matrix(), full_matrices=False)
    basisB = vh.T.copy()
    for col in range(u.shape[1]):
        nz = np.flatnonzero(np.abs(u[:, col]) > 1e-12)
        if nz.size:
            ph = u[nz[0], col] / abs(u[nz[0], col])
            u[:, col] *= ph.conjugate()
            basisB[:, col] *= ph
    rank = int(np.sum(s > rank_tol))
    return SchmidtDecomposition(coefficients=s, basisA=u, basisB=basisB, rank=rank)


def schmidt_rank(vec: np.ndarray, dimA: int, dimB: int, rank_tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(np.asarray(vec).reshape(dimA, dimB), compute_uv=False)
    return int(np.sum(s > rank_tol))


def hermitian_spectrum(m: ComplexOperator | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix."""
    data = m.data if isinstance(m, ComplexOperator) else np.asarray(m)
    asym = float(np.max(np.abs(data - data.conj().T))) if data.size else 0.0
    if asym > ASYMMETRY_REJECT_TOL:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    # symmetrize so eigh sees exactly what we validated
    return np.linalg.eigh((data + data.conj().T) / 2)


def min_eigenvalue(m: ComplexOperator | np.ndarray) -> float:
    return float(hermitian_spectrum(m)[0][0])


def is_ppt(rho: ComplexOperator, tol: float = PSD_TOL) -> tuple[bool, float]:
    lam = min_eigenvalue(partial_transpose(rho))
    return lam >= -tol, lam


def expectation(vec: np.ndarray, m: ComplexOperator | np.ndarray, imag_tol: float = 1e-10) -> float:
    data = m.data if isinstance(m, ComplexOperator) else m
    val = np.vdot(vec, data @ vec)
    if abs(val.imag) > imag_tol:
        raise ValueError(f"expectation value has imaginary part {val.imag:.3e}")
    return float(val.real)


def witness_value(phi: BipartitePureState, rho: ComplexOperator) -> float:
    """``<phi| rho^PT |phi>``, real part; the imaginary part must vanish."""
    if (phi.dimA, phi.dimB) != rho.dims:
        raise DimensionError(f"state dims {(phi.dimA, phi.dimB)} vs operator dims {rho.dims}")
    return expectation(phi.amplitudes, partial_transpose(rho))


def hs_distance(a: ComplexOperator, b: ComplexOperator) -> float:
    _check_same_dims(a, b)
    diff = a.data - b.data
    val = np.trace(diff @ diff).real
    return float(np.sqrt(max(val, 0.0)))


def random_density(dimA: int, dimB: int, rng: np.random.Generator, rank: int | None = None) -> ComplexOperator:
    D = dimA * dimB
    rank = D if rank is None else rank
    g = rng.standard_normal((D, rank)) + 1j * rng.standard_normal((D, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return ComplexOperator(rho / np.trace(rho).real, dimA, dimB)


def random_hermitian(D: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    return (g + g.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_pure_state(dimA: int, dimB: int, rng: np.random.Generator, schmidt_rank: int | None = None) -> BipartitePureState:
    k = min(dimA, dimB) if schmidt_rank is None else schmidt_rank
    lam = rng.uniform(0.1, 1.0, size=k)
    lam /= np.linalg.norm(lam)
    U = random_unitary(dimA, rng)[:, :k]
    V = random_unitary(dimB, rng)[:, :k]
    return BipartitePureState.normalized(((U * lam) @ V.T).reshape(-1), dimA, dimB)
