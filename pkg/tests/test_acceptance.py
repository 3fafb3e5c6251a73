"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary under "acceptance criteria".
"""
import json
import time

import numpy as np

from nptlab.cli import main
from nptlab.constructions import ConstructionSpec, Method, dur_pt_operator, pure_pt_eigensystem, reassemble, realize
from nptlab.distillability import CERT_TOL, NO_WITNESS_TOL, SeesawOptions, certificate_verify, epsilon_threshold, f_estimate, seesaw_min
from nptlab.geometry import geometry_rows, gurvits_radius, uniform_block_spec
from nptlab.nullspace import coefficient_matrix, lemma1_trials, nullspace_dimension_check, random_lambda_matrix
from nptlab.qcore import (
    hs_distance,
    maximally_mixed,
    min_eigenvalue,
    partial_transpose,
    random_pure_state,
    witness_value,
)

UNIFORM3 = ConstructionSpec(method=Method.METHOD_II, d1=3, schmidt_coeffs=[1 / np.sqrt(3)] * 3)


def _unit(rng, k):
    v = rng.uniform(0.1, 1.0, k)
    return (v / np.linalg.norm(v)).tolist()


def test_c01_pt_eigensystem_reconstruction(record, rng):
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(2, 5))
        dA, dB = int(rng.integers(k, 5)), int(rng.integers(k, 5))
        phi = random_pure_state(dA, dB, rng, schmidt_rank=k)
        rebuilt = reassemble(pure_pt_eigensystem(phi, canonicalize=True))
        worst = max(worst, float(np.max(np.abs(rebuilt - partial_transpose(phi.projector()).data))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 5
    record("C1 PT eigensystem reassembly", ok, f"max err {worst:.2e}, {elapsed:.2f}s")
    assert ok


def _random_spec(rng):
    if rng.random() < 0.5:
        m = int(rng.integers(2, 4))
        d = int(rng.integers(m + 1, 5))
        i, j = sorted(rng.choice(m, 2, replace=False).tolist())
        return ConstructionSpec(method=Method.METHOD_I, d1=d, schmidt_coeffs=_unit(rng, m),
                                alpha=float(rng.uniform(0.05, 0.95)), pair=[i, j])
    k = int(rng.integers(3, 5))
    w = np.triu(rng.uniform(0, 1, (k, k)), 1)
    return ConstructionSpec(method=Method.METHOD_II, d1=int(rng.integers(k, 5)), schmidt_coeffs=_unit(rng, k),
                            mixing_weights=(w / w.sum()).tolist())


def test_c02_witness_identity(record, rng):
    worst = 0.0
    for _ in range(100):
        fam = realize(_random_spec(rng))
        for eps in (0.01, 0.1, 0.5, 1.0):
            worst = max(worst, abs(witness_value(fam.phis[0], fam.rho(eps)) + eps * fam.lambda_abs[0]))
    ok = worst <= 1e-10
    record("C2 witness value = -eps|Lambda|", ok, f"max dev {worst:.2e}")
    assert ok


def test_c03_ppt_endpoint(record):
    specs = [
        ConstructionSpec(method=Method.METHOD_I, d1=3, schmidt_coeffs=[0.6, 0.8], alpha=0.5),
        UNIFORM3,
        uniform_block_spec(6, 3, 2),
    ]
    lams = [min_eigenvalue(partial_transpose(realize(s).rho(0.0))) for s in specs]
    ok = min(lams) >= -1e-10
    record("C3 eps=0 endpoints are PPT", ok, f"min PT eigenvalues {[f'{x:.1e}' for x in lams]}")
    assert ok


def test_c04_rank_property(record):
    t0 = time.perf_counter()
    r2 = lemma1_trials(3, 2, trials=100, seed=0, tol=1e-9)
    r3 = lemma1_trials(3, 3, trials=20, seed=0, tol=1e-9, exhaustive_limit=351)
    elapsed = time.perf_counter() - t0
    lm = random_lambda_matrix(3, np.random.default_rng(1))
    shapes = coefficient_matrix(lm, 2)[0].shape, coefficient_matrix(lm, 3)[0].shape
    ok = (r2.exhaustive and r3.exhaustive and r2.pairs_tested == 36 * 100 and r3.pairs_tested == 351 * 20
          and r2.min_singular_value > 1e-9 and r3.min_singular_value > 1e-9
          and shapes == ((9, 5), (27, 19)) and elapsed < 60)
    record("C4 two-rows-deleted full rank", ok,
           f"s_min (3,2)={r2.min_singular_value:.2e}, (3,3)={r3.min_singular_value:.2e}, {elapsed:.1f}s")
    assert ok


def test_c05_count_identities(record):
    rng = np.random.default_rng(5)
    ok = True
    for k in (3, 4, 5):
        for n in (1, 2, 3):
            A, rows, cols = coefficient_matrix(random_lambda_matrix(k, rng), n)
            ok &= len(rows) == k**n and len(cols) == k**n - (k - 1) ** n and len(rows) > len(cols)
            ok &= A.shape == (len(rows), len(cols))
    record("C5 row/column counts", ok, "k in {3,4,5}, n in {1,2,3}")
    assert ok


def test_c06_nullspace_dimension(record, rng):
    got = {}
    for n in (1, 2):
        phi = random_pure_state(3, 3, rng, schmidt_rank=3)
        got[n] = nullspace_dimension_check(phi, n)
    ok = got[1] == (1, 1) and got[2] == (17, 17)
    record("C6 null-space dimension D^n-(D-1)^n", ok, f"(expected, measured) {got}")
    assert ok


def test_c07_seesaw_oracle(record, rng):
    worst = 0.0
    opts = SeesawOptions(restarts=64, seed=0)
    for d in (2, 3):
        for _ in range(10):
            M = partial_transpose(random_pure_state(d, d, rng, schmidt_rank=2).projector())
            res = seesaw_min(M, opts)
            worst = max(worst, abs(res.value - np.linalg.eigvalsh(M.data)[0]))
    ok = worst <= 1e-8
    record("C7 see-saw reaches dense minimum", ok, f"20 instances, max gap {worst:.2e}")
    assert ok


def test_c08_discussion_bound(record):
    opts = SeesawOptions(restarts=16, seed=0)
    vals = [f_estimate(UNIFORM3, 0.0, n, opts).value for n in (1, 2, 3)]
    ok = all(-1e-10 <= v <= (1 / 8) ** n + 1e-9 for n, v in zip((1, 2, 3), vals))
    record("C8 f(0,n) <= (1/(D-1))^n", ok, "values " + ", ".join(f"{v:.3e}" for v in vals))
    assert ok


def test_c09_threshold(record):
    reps = [epsilon_threshold(UNIFORM3, 1, SeesawOptions(restarts=64, seed=s)) for s in (0, 1)]
    ok = True
    for rep in reps:
        trace = dict(rep.search_trace)
        verified, _ = certificate_verify(rep.certificate_at_hi, UNIFORM3, rep.hi)
        ok &= rep.detected and verified and rep.certificate_at_hi.value < -CERT_TOL
        ok &= trace[rep.lo] >= -NO_WITNESS_TOL
    ok &= abs(reps[0].hi - reps[1].hi) <= 0.02
    record("C9 threshold bracket", ok,
           f"[{reps[0].lo:.5f}, {reps[0].hi:.5f}] seed0; hi seed1 {reps[1].hi:.5f} (analytic 0.2)")
    assert ok


def test_c10_dur_equivalence(record):
    devs = []
    for d in (3, 4):
        fam = realize(ConstructionSpec(method=Method.DUR, d1=d, d2=d))
        devs.append(float(np.max(np.abs(partial_transpose(fam.rho(0.0)).data - dur_pt_operator(d).data))))
    ok = max(devs) <= 1e-10
    record("C10 Dur-class PT operator", ok, f"max deviations {devs}")
    assert ok


def test_c11_geometry(record):
    devs = []
    for d in (3, 4):
        fam = realize(ConstructionSpec(method=Method.METHOD_II, d1=d, schmidt_coeffs=[1 / np.sqrt(d)] * d))
        D = d * d
        devs.append(abs(hs_distance(fam.rho(0.0), maximally_mixed(d, d)) - gurvits_radius(D)))
        devs.append(abs(gurvits_radius(D) - np.sqrt(1 / (D * (D - 1)))))
    rows = geometry_rows(6, 3)
    table = [abs(r["r_m"] - np.sqrt(r["m"] / (36 * (36 - r["m"])))) for r in rows]
    table += [abs(r["measured"] - r["r_m"]) for r in rows]
    ok = max(devs) <= 1e-12 and [r["m"] for r in rows] == [1, 2] and max(table) <= 1e-12
    record("C11 HS distances on the shells", ok, f"max dev {max(devs + table):.1e}")
    assert ok


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_c12_cli_determinism(record, tmp_path):
    spec = _write(tmp_path, "spec.json", UNIFORM3.to_dict())
    runs = {
        "construct": ["construct", "--spec", spec, "--eps", "0.4"],
        "ppt": ["ppt-check", "--spec", spec, "--eps", "0.0"],
        "witness": ["witness", "--spec", spec, "--eps", "0.4"],
        "seesaw": ["seesaw", "--spec", spec, "--eps", "0.4", "--copies", "2", "--restarts", "8", "--seed", "3"],
        "threshold": ["threshold", "--spec", spec, "--restarts", "8", "--seed", "3"],
        "lemma1": ["lemma1", "--trials", "5", "--seed", "3"],
        "geometry": ["geometry", "--d", "6"],
        "dur": ["compare-dur", "--d", "4"],
    }
    bad = []
    for name, argv in runs.items():
        outs = []
        for rep in (0, 1):
            out = tmp_path / f"{name}{rep}.json"
            assert main(argv + ["--out", str(out)]) == 0
            outs.append(out.read_bytes())
        if outs[0] != outs[1]:
            bad.append(name)
    csvs = []
    for rep in (0, 1):
        out = tmp_path / f"sweep{rep}.csv"
        assert main(["sweep", "--spec", spec, "--eps-grid", "0:0.3:0.1", "--restarts", "4", "--out", str(out)]) == 0
        csvs.append(out.read_bytes())
    if csvs[0] != csvs[1]:
        bad.append("sweep")
    ok = not bad
    record("C12 byte-identical CLI reruns", ok, f"{len(runs) + 1} commands" + (f", differing: {bad}" if bad else ""))
    assert ok
