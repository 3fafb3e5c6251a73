"""See-saw estimates of the Schmidt-rank-2 minimum f(eps, n) and threshold search.

A negative value returned by :func:`seesaw_min` certifies n-copy
distillability (the witness vector is explicit). A non-negative value only
means that no witness was found.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constructions import ConstructionSpec, StateFamily, realize
from .qcore import (
    DEFAULT_SIZE_CAP,
    RANK_TOL,
    BipartitePureState,
    ComplexOperator,
    SizeCapError,
    regrouped_tensor_power,
    schmidt_rank,
)

CERT_TOL = 1e-10
NO_WITNESS_TOL = 1e-12
MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class SeesawOptions:
    restarts: int = 64
    max_iters: int = 200
    conv_tol: float = 1e-11
    seed: int = 0
    size_cap: int = DEFAULT_SIZE_CAP
    threads: int | None = None

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if not 0 < self.conv_tol < 1e-6:
            raise ValueError(f"conv_tol must lie in (0, 1e-6), got {self.conv_tol}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.size_cap < 1:
            raise ValueError("size_cap must be positive")


@dataclass
class SeesawResult:
    value: float
    witness: BipartitePureState
    iterations_per_restart: list[int]
    converged: list[bool]
    best_restart: int
    n_copies: int = 1
    epsilon: float | None = None
    seed: int = 0
    traces: list[list[float]] = field(default_factory=list, repr=False)

    @property
    def certified(self) -> bool:
        return self.value < -CERT_TOL

    def to_dict(self) -> dict:
        from .io import state_to_json

        return {
            "value": self.value,
            "certified": self.certified,
            "n_copies": self.n_copies,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "best_restart": self.best_restart,
            "iterations_per_restart": list(self.iterations_per_restart),
            "converged": list(self.converged),
            "witness_schmidt_rank": self.witness.schmidt_rank,
            "witness": state_to_json(self.witness),
        }


def _threads(opts: SeesawOptions) -> int:
    if opts.threads is not None:
        return max(1, opts.threads)
    env = os.environ.get("NPTLAB_THREADS")
    return max(1, int(env)) if env else 1


def _min_eigvec(h: np.ndarray) -> tuple[float, np.ndarray]:
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    return float(w[0]), v[:, 0]


def _seesaw_restart(T: np.ndarray, dA: int, dB: int, B: np.ndarray, opts: SeesawOptions):
    """One alternating run from the B-side 2-frame ``B``.

    ``T`` is M reshaped to ``(a, b, a', b')``. Each half-step solves the exact
    minimal eigenproblem of M compressed to ``H_A (x) span(B)`` or
    ``span(A) (x) H_B``, both of which contain the current iterate.
    """
    trace: list[float] = []
    prev = np.inf
    vec = None
    converged = False
    it = 0
    for it in range(1, opts.max_iters + 1):
        # (a) H_A (x) span(b1, b2)
        h = np.einsum("bx,abcz,zy->axcy", B.conj(), T, B, optimize=True).reshape(2 * dA, 2 * dA)
        val, v = _min_eigvec(h)
        C = v.reshape(dA, 2) @ B.T  # dA x dB coefficient matrix
        trace.append(val)
        u, _, _ = np.linalg.svd(C, full_matrices=True)
        A = u[:, :2]
        # (b) span(a1, a2) (x) H_B
        h = np.einsum("ax,abcz,cy->xbyz", A.conj(), T, A, optimize=True).reshape(2 * dB, 2 * dB)
        val, v = _min_eigvec(h)
        C = A @ v.reshape(2, dB)
        trace.append(val)
        vec = C.reshape(-1)
        _, _, vh = np.linalg.svd(C, full_matrices=True)
        B = vh[:2, :].T
        if prev - val <= opts.conv_tol:
            converged = True
            break
        prev = val
    return trace[-1], vec, it, converged, trace


def _b_frames(dB: int, opts: SeesawOptions) -> list[np.ndarray]:
    frames = []
    for child in np.random.SeedSequence(opts.seed).spawn(opts.restarts):
        rng = np.random.default_rng(child)
        g = rng.standard_normal((dB, 2)) + 1j * rng.standard_normal((dB, 2))
        q, _ = np.linalg.qr(g)
        frames.append(q)
    return frames


def seesaw_min(M: ComplexOperator, opts: SeesawOptions | None = None) -> SeesawResult:
    """Upper bound on ``min <phi|M|phi>`` over unit vectors of Schmidt rank <= 2."""
    opts = opts or SeesawOptions()
    dA, dB = M.dims
    if M.D > opts.size_cap:
        raise SizeCapError(f"operator dimension {M.D} exceeds cap {opts.size_cap}")
    if dA < 2 or dB < 2:
        raise ValueError(f"both local dimensions must be >= 2, got {dA}x{dB}")
    asym = M.max_asymmetry()
    if asym > 1e-8:
        raise ValueError(f"operator is not Hermitian (max asymmetry {asym:.3e})")
    data = (M.data + M.data.conj().T) / 2
    T = data.reshape(dA, dB, dA, dB)
    frames = _b_frames(dB, opts)

    def run(B):
        return _seesaw_restart(T, dA, dB, B, opts)

    workers = _threads(opts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, frames))
    else:
        results = [run(B) for B in frames]

    best = min(range(len(results)), key=lambda r: (results[r][0], r))
    _, vec, _, _, _ = results[best]
    witness = BipartitePureState.normalized(vec, dA, dB)
    value = float(np.vdot(witness.amplitudes, data @ witness.amplitudes).real)
    return SeesawResult(
        value=value,
        witness=witness,
        iterations_per_restart=[r[2] for r in results],
        converged=[r[3] for r in results],
        best_restart=best,
        seed=opts.seed,
        traces=[r[4] for r in results],
    )


def n_copy_pt_operator(family: StateFamily, eps: float, n: int, size_cap: int = DEFAULT_SIZE_CAP) -> ComplexOperator:
    """``(rho(eps)^PT)^{(x)n}`` regrouped A-major; PT is applied before the power."""
    return regrouped_tensor_power(family.rho_pt(eps), n, size_cap=size_cap)


def f_estimate(spec: ConstructionSpec | StateFamily, eps: float, n: int,
               opts: SeesawOptions | None = None) -> SeesawResult:
    opts = opts or SeesawOptions()
    family = spec if isinstance(spec, StateFamily) else realize(spec)
    M = n_copy_pt_operator(family, eps, n, opts.size_cap)
    res = seesaw_min(M, opts)
    res.n_copies = n
    res.epsilon = eps
    return res


@dataclass
class ThresholdReport:
    n: int
    lo: float | None
    hi: float | None
    certificate_at_hi: SeesawResult | None
    search_trace: list[tuple[float, float]]
    detected: bool = True
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "detected": self.detected,
            "lo": self.lo,
            "hi": self.hi,
            "semantics": "hi is a certified upper bound on eps_n (explicit witness); "
                         "lo is heuristic (no witness found)",
            "message": self.message,
            "certificate_at_hi": None if self.certificate_at_hi is None else self.certificate_at_hi.to_dict(),
            "search_trace": [[e, f] for e, f in self.search_trace],
        }


def epsilon_threshold(spec: ConstructionSpec | StateFamily, n: int, opts: SeesawOptions | None = None,
                      grid: int = 10, max_bisections: int = 20, width_tol: float = 1e-4) -> ThresholdReport:
    """Bracket the n-copy threshold eps_n by bisection on the sign of the see-saw estimate.

    A uniform grid of ``grid + 1`` points on [0, 1] locates the first sign
    change; bisection then runs until the bracket is narrower than
    ``width_tol`` or ``max_bisections`` halvings have been done.
    """
    opts = opts or SeesawOptions()
    family = spec if isinstance(spec, StateFamily) else realize(spec)
    trace: list[tuple[float, float]] = []
    cache: dict[float, SeesawResult] = {}

    def f(eps: float) -> SeesawResult:
        if eps not in cache:
            cache[eps] = f_estimate(family, eps, n, opts)
            trace.append((eps, cache[eps].value))
        return cache[eps]

    lo = hi = None
    prev = 0.0
    if f(0.0).value < -NO_WITNESS_TOL:
        return ThresholdReport(n, None, None, None, trace, detected=False,
                               message="witness found at eps=0; the endpoint is not undistillable")
    for g in range(1, grid + 1):
        eps = g / grid
        if f(eps).value < -CERT_TOL:
            lo, hi = prev, eps
            break
        prev = eps
    if hi is None:
        return ThresholdReport(n, None, None, None, trace, detected=False,
                               message="no distillability detected anywhere on the grid")
    for _ in range(max_bisections):
        if hi - lo < width_tol:
            break
        mid = (lo + hi) / 2
        v = f(mid).value
        if v < -CERT_TOL:
            hi = mid
        elif v >= -NO_WITNESS_TOL:
            lo = mid
        else:
            # ambiguous band (-CERT_TOL, -NO_WITNESS_TOL]: too close to call, stop here
            break
    return ThresholdReport(n, lo, hi, f(hi), trace)


def certificate_verify(res: SeesawResult, spec: ConstructionSpec | StateFamily, eps: float,
                       size_cap: int = DEFAULT_SIZE_CAP) -> tuple[bool, str]:
    """Rebuild the n-copy PT operator independently and re-check a witness."""
    family = spec if isinstance(spec, StateFamily) else realize(spec)
    try:
        M = n_copy_pt_operator(family, eps, res.n_copies, size_cap)
    except ValueError as exc:
        return False, f"rebuild: {exc}"
    w = res.witness
    if (w.dimA, w.dimB) != M.dims:
        return False, "dims"
    rank = schmidt_rank(w.amplitudes, w.dimA, w.dimB, RANK_TOL)
    if rank > 2:
        return False, "rank"
    val = np.vdot(w.amplitudes, M.data @ w.amplitudes)
    if abs(val.real - res.value) > CERT_TOL or abs(val.imag) > CERT_TOL:
        return False, "value"
    if val.real >= -CERT_TOL:
        return False, "sign"
    return True, "ok"
