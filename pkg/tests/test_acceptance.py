"""Acceptance criteria 1-8; each test records one PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest
from conftest import FIG2, ROOT
from oracles import vertex_feasibility

from iccregion import baselines, gaussian_core as gc, icc_model
from iccregion.icc_model import ChannelParams, SweepConfig
from iccregion.polytope_fme import LinearInequality, LinearSystem, project
from iccregion.region_geom import axis_intercepts, contains, excess, hausdorff


def test_criterion_1_hk_reduction(zero_coop_sweep, record_criterion):
    start = time.perf_counter()
    hk = baselines.hk_region(ChannelParams(**FIG2), 17)
    d = hausdorff(zero_coop_sweep.region, hk)
    elapsed = time.perf_counter() - start
    ok = d <= 1e-6
    record_criterion(1, ok, f"hausdorff(zero-cooperation sweep, HK) = {d:.3g} bits (tol 1e-6), "
                            f"baseline {elapsed:.1f} s")
    assert ok


def test_criterion_2_gvbc_reduction(fig2, record_criterion):
    start = time.perf_counter()
    ideal = icc_model.ideal_conferencing_region(fig2, SweepConfig(resolution=17))
    gvbc = baselines.gvbc_region(fig2, 17)
    d = hausdorff(ideal, gvbc)
    elapsed = time.perf_counter() - start
    ok = d <= 0.02
    record_criterion(2, ok, f"hausdorff(ideal conferencing, GVBC) = {d:.4f} bits (tol 0.02), "
                            f"{elapsed:.1f} s")
    assert ok


def test_criterion_3_relay_intercepts(fig2_sweeps, record_criterion):
    _, (r1, r2) = fig2_sweeps[4.0]
    params = ChannelParams(**FIG2, K=4.0)
    c1 = baselines.relay_capacity(params, "user2_relays").capacity
    c2 = baselines.relay_capacity(params, "user1_relays").capacity
    d1, d2 = abs(r1 - c1), abs(r2 - c2)
    ok = max(d1, d2) <= 1e-2
    record_criterion(3, ok, f"R1 {r1:.6f} vs relay {c1:.6f}, R2 {r2:.6f} vs relay {c2:.6f} "
                            f"(tol 1e-2)")
    assert ok


def test_criterion_4_containment_chain(fig2, fig2_sweeps, record_criterion):
    hk = baselines.hk_region(fig2, 17)
    gvbc = baselines.gvbc_region(fig2, 17)
    r_k1 = fig2_sweeps[1.0][0].region
    r_k4 = fig2_sweeps[4.0][0].region
    chain = [("HK", hk), ("R(K=1)", r_k1), ("R(K=4)", r_k4), ("GVBC", gvbc)]
    gaps = [excess(outer, inner) for (_, inner), (_, outer) in zip(chain, chain[1:])]
    nested = all(contains(outer, inner, 1e-6) for (_, inner), (_, outer) in zip(chain, chain[1:]))
    gain = excess(hk, r_k1)
    ok = nested and gain > 1e-3
    record_criterion(4, ok, "chain excess " + ", ".join(f"{g:.2g}" for g in gaps)
                     + f" (tol 1e-6); R(K=1) beyond HK by {gain:.4f} bits (need > 1e-3)")
    assert ok


def test_criterion_5_slope_structure(zero_coop_sweep, fig2_sweeps, record_criterion):
    results = [zero_coop_sweep] + [r for r, _ in fig2_sweeps.values()]
    audited = sum(r.n_audited for r in results)
    violations = sum(r.slope_violations for r in results)
    ok = violations == 0 and audited >= 10_000
    record_criterion(5, ok, f"{violations} slope violations over {audited} audited polygons")
    assert ok


def _random_system(rng):
    n = int(rng.integers(2, 7))
    eliminate = int(rng.integers(1, min(4, n - 1) + 1))
    m = int(rng.integers(3, 15))
    A = rng.integers(-2, 3, (m, n))
    A[np.all(A == 0, axis=1), 0] = 1
    b = rng.integers(-2, 7, m).astype(float)
    keep = sorted(rng.choice(n, n - eliminate, replace=False).tolist())
    return A, b, keep


def test_criterion_6_fme_soundness(record_criterion):
    rng = np.random.default_rng(2024)
    disagreements = feasible = 0
    for _ in range(200):
        A, b, keep = _random_system(rng)
        names = [f"x{j}" for j in range(A.shape[1])]
        system = LinearSystem(names, [
            LinearInequality.leq({v: int(c) for v, c in zip(names, row)}, rhs)
            for row, rhs in zip(A, b)])
        proj = project(system, [names[j] for j in keep])
        pts = rng.uniform(-4, 4, (1000, len(keep)))
        got = np.array([proj.is_feasible_at({names[j]: x for j, x in zip(keep, p)})
                        for p in pts])
        want = vertex_feasibility(A, b, keep, pts)
        disagreements += int(np.sum(got != want))
        feasible += int(want.sum())
    ok = disagreements == 0
    record_criterion(6, ok, f"{disagreements} disagreements over 200 systems x 1000 points "
                            f"({feasible} feasible)")
    assert ok


def _random_model(rng):
    k = int(rng.integers(2, 7))
    names = [f"v{i}" for i in range(int(rng.integers(3, 7)))]
    coeffs = {v: rng.normal(size=k) * rng.integers(0, 2, size=k) for v in names}
    return gc.LinearGaussianModel(tuple(f"e{i}" for i in range(k)), coeffs), names


def _gap(x, y):
    return 0.0 if x == y else abs(x - y)  # infinite information on both sides agrees


def test_criterion_7_mi_kernel(record_criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    negative = 0
    for _ in range(1000):
        model, names = _random_model(rng)
        a, b, c = (list(x) for x in np.array_split(rng.permutation(names), 3))
        I = lambda x, y, z=(): gc.conditional_mutual_information(model, x, y, z)
        vals = [I(a, b, c), I(b, a, c), I(a, b), I(a, c, b), I(a, b + c)]
        negative += sum(v < 0 for v in vals)
        worst = max(worst, _gap(vals[0], vals[1]), _gap(vals[4], vals[2] + vals[3]))
    ptp = gc.LinearGaussianModel.from_terms(
        ("x", "z"), {"X": {"x": 1.0}, "Y": {"x": math.sqrt(6.0), "z": 1.0}})
    shannon = abs(gc.mutual_information(ptp, "Y", "X") - 0.5 * math.log2(7.0))
    ok = worst <= 1e-9 and negative == 0 and shannon <= 1e-12
    record_criterion(7, ok, f"max symmetry/chain-rule error {worst:.2g}, {negative} negative, "
                            f"|I - 1/2 log2 7| = {shannon:.2g}")
    assert ok


@pytest.mark.slow
def test_criterion_8_determinism(tmp_path, record_criterion):
    config = ROOT / "configs" / "fig2.json"
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        proc = subprocess.run([sys.executable, "-m", "iccregion", "--config", str(config),
                               "--out", str(out)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outputs.append(out)
    names = sorted(p.name for p in outputs[0].iterdir() if p.suffix in (".csv", ".svg"))
    same = [(outputs[0] / n).read_bytes() == (outputs[1] / n).read_bytes() for n in names]
    report = (outputs[0] / "report.txt").read_text()
    expected = {"hk.csv", "region_K1.csv", "region_K4.csv", "gvbc.csv", "compare.svg"}
    failed = [line for line in report.splitlines() if line.startswith("check") and ": pass" not in line]
    ok = all(same) and expected <= set(names) and not failed
    record_criterion(8, ok, f"{sum(same)}/{len(names)} CSV/SVG files byte-identical across two "
                            f"compare runs; report verdicts "
                            f"{'all pass' if not failed else failed}")
    assert ok
