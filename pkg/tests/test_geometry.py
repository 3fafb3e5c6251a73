import numpy as np
import pytest

from nptlab.constructions import ConstructionSpec
from nptlab.geometry import (
    distance_report,
    endpoint_distance,
    geometry_rows,
    gurvits_radius,
    max_block_count,
    projector_distance,
    shell_radius,
    trend_table,
    uniform_block_spec,
)


def test_closed_forms():
    assert shell_radius(9, 1) == pytest.approx(1 / np.sqrt(72), abs=1e-15)
    assert shell_radius(9, 3) == pytest.approx(1 / np.sqrt(18), abs=1e-15)
    assert shell_radius(16, 1) == pytest.approx(1 / np.sqrt(240), abs=1e-15)
    assert gurvits_radius(9) == pytest.approx(1 / np.sqrt(72), abs=1e-15)


@pytest.mark.parametrize("D", [4, 9, 16, 36])
def test_projector_oracle(D):
    for m in range(1, D):
        assert abs(shell_radius(D, m) - projector_distance(D, m)) <= 1e-12
    assert shell_radius(D, 1) == pytest.approx(gurvits_radius(D), abs=1e-15)


def test_radii_increase_with_m():
    r = [shell_radius(36, m) for m in range(1, 36)]
    assert all(b > a for a, b in zip(r, r[1:]))


@pytest.mark.parametrize("d,m", [(3, 1), (6, 1), (6, 2)])
def test_measured_endpoint(d, m):
    measured = endpoint_distance(uniform_block_spec(d, 3, m))
    assert abs(measured - shell_radius(d * d, m)) <= 1e-10


def test_method_two_endpoint_is_shell_one():
    spec = ConstructionSpec(method="MethodII", d1=3, schmidt_coeffs=[0.6, 0.64**0.5 * 0.6, 0.8 * 0.8])
    assert abs(endpoint_distance(spec) - shell_radius(9, 1)) <= 1e-10


def test_report():
    rep = distance_report(uniform_block_spec(6, 3, 2))
    assert rep.D == 36 and rep.k == 3
    assert [m for m, _ in rep.radii] == [1, 2]
    assert rep.measured_distances[0][1] == pytest.approx(shell_radius(36, 2), abs=1e-10)
    assert set(rep.to_dict()) >= {"D", "radii", "gurvits_radius", "trend"}


def test_trend_ratio_scales_as_quarter_power():
    rows = trend_table(3, (3, 6, 9, 12))
    scaled = [r["ratio_over_D_quarter"] for r in rows]
    assert max(scaled) / min(scaled) < 1.05
    assert all(abs(s - 1 / np.sqrt(3)) < 0.02 for s in scaled)
    # the raw radius itself decays faster than D^{-1/4}
    raw = [r["r_m"] * r["D"] ** 0.25 for r in rows]
    assert raw[-1] < raw[0] / 2


def test_rows():
    rows = geometry_rows(6, 3)
    assert [r["m"] for r in rows] == [1, 2]
    for r in rows:
        assert abs(r["measured"] - r["r_m"]) <= 1e-10
    assert max_block_count(9, 3) == 3


def test_errors():
    with pytest.raises(ValueError):
        shell_radius(9, 0)
    with pytest.raises(ValueError):
        shell_radius(9, 9)


def test_pt_preserves_distance_to_maximally_mixed():
    from nptlab.constructions import realize
    from nptlab.qcore import hs_distance, maximally_mixed, partial_transpose

    rho = realize(uniform_block_spec(6, 3, 2)).rho(0.0)
    mm = maximally_mixed(6, 6)
    assert abs(hs_distance(mm, partial_transpose(rho)) - hs_distance(mm, rho)) <= 1e-12


def test_largest_radius_uses_rank_three_blocks():
    d = 9
    best = {k: shell_radius(d * d, max_block_count(d, k)) for k in range(3, d + 1)}
    assert max(best, key=best.get) == 3
