"""Hilbert-Schmidt distances of the eps = 0 endpoints from the maximally mixed state."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constructions import ConstructionSpec, Method, realize
from .qcore import ComplexOperator, hs_distance, maximally_mixed

AGREEMENT_TOL = 1e-10


def shell_radius(D: int, m: int) -> float:
    """HS distance between ``I/D`` and a normalized rank ``D - m`` projector."""
    if not 1 <= m < D:
        raise ValueError(f"need 1 <= m < D, got m={m}, D={D}")
    return float(np.sqrt(m / (D * (D - m))))


def gurvits_radius(D: int) -> float:
    """Radius of the largest separable ball around ``I/D``."""
    return float(1.0 / np.sqrt(D * (D - 1)))


def projector_distance(D: int, m: int) -> float:
    """Independent route to :func:`shell_radius` through an explicit diagonal projector."""
    P = np.diag([1.0] * (D - m) + [0.0] * m) / (D - m)
    return hs_distance(ComplexOperator(np.eye(D) / D, D, 1), ComplexOperator(P, D, 1))


def max_block_count(d: int, k: int) -> int:
    return d // k


@dataclass
class GeometryReport:
    D: int
    k: int
    radii: list[tuple[int, float]]
    gurvits_radius: float
    measured_distances: list[tuple[str, float]] = field(default_factory=list)
    trend: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "k": self.k,
            "radii": [[m, r] for m, r in self.radii],
            "gurvits_radius": self.gurvits_radius,
            "measured_distances": [[name, v] for name, v in self.measured_distances],
            "trend": self.trend,
        }


def uniform_block_spec(d: int, k: int, m: int) -> ConstructionSpec:
    return ConstructionSpec(method=Method.GENERALIZED, d1=d, d2=d,
                            schmidt_coeffs=[1 / np.sqrt(k)] * k, block_count=m)


def endpoint_distance(spec: ConstructionSpec) -> float:
    family = realize(spec)
    d1, d2 = family.dims
    return hs_distance(family.rho(0.0), maximally_mixed(d1, d2))


def trend_table(k: int = 3, ds=(3, 6, 9)) -> list[dict]:
    """Largest shell radius per d, relative to the separable-ball radius.

    For ``m = floor(d/k)`` the ratio ``r_m / gurvits`` grows like ``D^{1/4}``,
    so the last column should stay roughly constant.
    """
    rows = []
    for d in ds:
        D = d * d
        m = max_block_count(d, k)
        r = shell_radius(D, m)
        g = gurvits_radius(D)
        rows.append({"d": d, "m": m, "D": D, "r_m": r, "gurvits": g,
                     "ratio": r / g, "ratio_over_D_quarter": (r / g) / D**0.25})
    return rows


def distance_report(spec: ConstructionSpec, trend_ds=(3, 6, 9)) -> GeometryReport:
    """Measure the spec's eps = 0 endpoint against the closed-form shell radius.

    Raises ``ValueError`` when the measured distance disagrees with
    ``shell_radius(D, m)`` by more than 1e-10.
    """
    family = realize(spec)
    d1, d2 = family.dims
    D = d1 * d2
    m = family.block_count
    k = family.phis[0].schmidt_rank
    measured = endpoint_distance(spec)
    expected = shell_radius(D, m)
    if abs(measured - expected) > AGREEMENT_TOL:
        raise ValueError(f"measured distance {measured} != shell radius {expected}")
    radii = [(mm, shell_radius(D, mm)) for mm in range(1, max_block_count(min(d1, d2), k) + 1)]
    return GeometryReport(D=D, k=k, radii=radii, gurvits_radius=gurvits_radius(D),
                          measured_distances=[(f"{spec.method.value}:m={m}", measured)],
                          trend=trend_table(3, trend_ds))


def geometry_rows(d: int, k: int) -> list[dict]:
    """One row per admissible block count m for uniform blocks of rank k in d x d."""
    D = d * d
    rows = []
    for m in range(1, max_block_count(d, k) + 1):
        rows.append({"d": d, "k": k, "m": m, "D": D, "r_m": shell_radius(D, m),
                     "gurvits": gurvits_radius(D),
                     "measured": endpoint_distance(uniform_block_spec(d, k, m))})
    return rows
