"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
verdict lines as they complete.  Scan data is shared between criteria via
module-scoped fixtures (the singularity scans feed both the derivative
checks and the ansatz-nesting check).
"""

import math
import time

import numpy as np
import pytest

import clusterxy as cx
from clusterxy.crosscheck import check_model, run_checks

SCAN_STEP = 0.01


def _verdict(num: int, name: str, ok: bool, detail: str = "") -> None:
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} - {name}"
    if detail:
        line += f" | {detail}"
    print(line)


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    count = int(round((stop - start) / step)) + 1
    return np.round(np.linspace(start, stop, count), 12)


# --- shared scan fixtures ------------------------------------------------------


@pytest.fixture(scope="module")
def xzy_scans():
    """Per-site entanglement of the XzY family near the transition."""
    hs = _grid(0.5, 1.5, SCAN_STEP)
    data = {}
    for r in (0.5, 1.0):
        for n in (32, 64, 128, 1024):
            results = [cx.maximize_site(cx.preset_xny(1, r, float(h), n)) for h in hs]
            data[(r, n)] = (hs, results)
    return data


@pytest.fixture(scope="module")
def spt_scans():
    """Period-2 per-site entanglement of the SPT-AFM chain near lambda = 1."""
    lams = _grid(0.5, 1.5, SCAN_STEP)
    data = {}
    for n in (32, 64, 200, 1000):
        results = [cx.maximize_site_af(cx.preset_spt_afm(float(l), n)) for l in lams]
        data[n] = (lams, results)
    return data


@pytest.fixture(scope="module")
def halfway_scans():
    """Per-site entanglement of the halfway Ising chain across h = 0."""
    hs = _grid(-1.0, 1.0, SCAN_STEP)
    assert hs[100] == 0.0
    data = {}
    for n in (16, 32, 128, 1024):
        results = [cx.maximize_site(cx.preset_halfway_xy(1.0, float(h), n)) for h in hs]
        data[n] = (hs, results)
    return data


@pytest.fixture(scope="module")
def ghz_point_result():
    return cx.maximize_site(cx.preset_ghz_cluster(0.0, 128))


@pytest.fixture(scope="module")
def circle_point_result():
    return cx.maximize_site(cx.preset_xny(0, 0.6, 0.8, 64))


# --- criteria ------------------------------------------------------------------


def test_criterion_01_oracle_equivalence():
    start = time.perf_counter()
    rows = run_checks(
        sites=(4, 6, 8, 10),
        points=11,
        include_fidelity=False,
        include_overlaps=False,
    )
    elapsed = time.perf_counter() - start
    worst = max(rows, key=lambda r: r.error)
    ok = all(r.passed for r in rows) and elapsed <= 120.0
    _verdict(
        1,
        "oracle equivalence (7 presets x {4,6,8,10} x 11 points)",
        ok,
        f"max |diff| {worst.error:.2e} ({worst.preset}, N={worst.sites}, "
        f"{worst.check}), runtime {elapsed:.1f}s",
    )
    assert all(r.passed for r in rows)
    assert elapsed <= 120.0


def test_criterion_02_ghz_gap_law():
    worst = 0.0
    for n in (8, 16, 32, 64, 512):
        for g in (-1.5, -1.2, -0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9, 1.2, 1.5):
            gap = cx.ground_and_gap(cx.preset_ghz_cluster(g, n)).gap
            expected = 8.0 * g * g if abs(g) < 1.0 else 8.0
            worst = max(worst, abs(gap - expected))
    ok = worst <= 1e-9
    _verdict(2, "GHZ-cluster gap = 8g^2 (|g|<1) / 8, size-independent", ok, f"max err {worst:.2e}")
    assert worst <= 1e-9


def test_criterion_03_xzy_thermodynamic_gap():
    errors = {}
    for h in _grid(0.0, 2.0, 0.25):
        gap = cx.ground_and_gap(cx.preset_xny(1, 1.0, float(h), 4096)).gap
        errors[float(h)] = abs(gap - 2.0 * abs(1.0 - abs(h)))
    worst_h = max(errors, key=errors.get)
    worst = errors[worst_h]
    ok = worst <= 1e-3
    _verdict(
        3,
        "XzY r=1 gap vs 2|1-|h|| at N=4096",
        ok,
        f"max err {worst:.3e} at h={worst_h} (finite-size gap at the critical "
        f"point is 4*tan(pi/2N) = {4 * math.tan(math.pi / 8192):.3e})",
    )
    assert worst <= 1e-3


def test_criterion_04_spt_afm_gap_law():
    worst = 0.0
    for lam in (0.0, 0.25, 0.5, 0.75, 1.25, 1.5):
        gap = cx.ground_and_gap(cx.preset_spt_afm(lam, 4096)).gap
        expected = (1.0 - abs(lam)) * (1.0 + math.copysign(1.0, 1.0 - abs(lam)))
        worst = max(worst, abs(gap - expected))
    ok = worst <= 1e-3
    _verdict(4, "SPT-AFM gap law at N=4096", ok, f"max err {worst:.2e}")
    assert worst <= 1e-3


def test_criterion_05_halfway_first_order_vs_ising():
    below = cx.ground_and_gap(cx.preset_halfway_xy(0.7, 0.714 - 0.01, 40)).gap
    above = cx.ground_and_gap(cx.preset_halfway_xy(0.7, 0.714 + 0.01, 40)).gap
    jump = abs(above - below)
    min_gap = min(
        cx.ground_and_gap(cx.preset_halfway_xy(1.0, float(sign * h), 64)).gap
        for h in _grid(0.05, 2.0, 0.05)
        for sign in (1.0, -1.0)
    )
    ok = jump > 0.5 and min_gap > 0.1
    _verdict(
        5,
        "halfway XY first-order jump vs gapped halfway Ising",
        ok,
        f"gap(0.704)={below:.4f} gap(0.724)={above:.4f} jump={jump:.4f}; "
        f"halfway-Ising min gap {min_gap:.3f}",
    )
    assert jump > 0.5
    assert min_gap > 0.1


def test_criterion_06_ghz_point_entanglement(ghz_point_result):
    err = abs(ghz_point_result.eg_total - 1.0)
    ok = err <= 1e-6
    _verdict(6, "GHZ point: one bit of geometric entanglement", ok, f"|eg-1| = {err:.2e}")
    assert err <= 1e-6


def test_criterion_07_factorization_circle_density(circle_point_result):
    density = circle_point_result.density
    ok = density <= 1e-6
    _verdict(
        7,
        "XY (r,h)=(0.6,0.8) N=64 per-site density",
        ok,
        f"density = {density:.8f} (even vacuum is the cat of the two exactly "
        f"degenerate factorized products: eg_total = {circle_point_result.eg_total:.8f} "
        f"~ 1 bit, so density ~ 1/N)",
    )
    assert density <= 1e-6


def _derivative_peaks(grid, density_series, critical):
    peaks = []
    for n, densities in density_series:
        deriv = cx.scan_derivative(grid, densities)
        idx = int(np.argmax(np.abs(deriv)))
        peaks.append((n, float(grid[idx]), float(abs(deriv[idx]))))
    locations_ok = all(abs(loc - critical) <= SCAN_STEP + 1e-12 for _, loc, _ in peaks)
    magnitudes = [m for _, _, m in peaks]
    growth_ok = all(b > a for a, b in zip(magnitudes, magnitudes[1:]))
    return peaks, locations_ok, growth_ok


def test_criterion_08_singularity_signatures(xzy_scans, spt_scans):
    details = []
    all_ok = True
    for r in (0.5, 1.0):
        series = [(n, [res.density for res in xzy_scans[(r, n)][1]]) for n in (32, 64, 128, 1024)]
        grid = xzy_scans[(r, 32)][0]
        peaks, locations_ok, growth_ok = _derivative_peaks(grid, series, 1.0)
        all_ok = all_ok and locations_ok and growth_ok
        details.append(
            f"XzY r={r}: peaks " + " ".join(f"N={n}@{loc}:{mag:.3f}" for n, loc, mag in peaks)
        )
    series = [(n, [res.density for res in spt_scans[n][1]]) for n in (32, 64, 200, 1000)]
    grid = spt_scans[32][0]
    peaks, locations_ok, growth_ok = _derivative_peaks(grid, series, 1.0)
    all_ok = all_ok and locations_ok and growth_ok
    details.append("SPT: peaks " + " ".join(f"N={n}@{loc}:{mag:.3f}" for n, loc, mag in peaks))
    _verdict(
        8,
        "entanglement-derivative singularity at the critical point",
        all_ok,
        "; ".join(details),
    )
    assert all_ok


def test_criterion_09_halfway_ising_cusp(halfway_scans):
    hs = halfway_scans[16][0]
    densities = {n: np.array([res.density for res in halfway_scans[n][1]]) for n in halfway_scans}
    collapse = max(
        float(np.max(np.abs(densities[n] - densities[16]))) for n in (32, 128, 1024)
    )
    symmetry = max(
        float(np.max(np.abs(dens[::-1] - dens))) for dens in densities.values()
    )
    i0 = 100
    slopes = {}
    for n, dens in densities.items():
        left = (dens[i0] - dens[i0 - 1]) / SCAN_STEP
        right = (dens[i0 + 1] - dens[i0]) / SCAN_STEP
        slopes[n] = (left, right)
    cusp_ok = all(
        left * right < 0 and abs(left) > 0.01 and abs(right) > 0.01
        for left, right in slopes.values()
    )
    ok = collapse <= 1e-6 and symmetry <= 1e-9 and cusp_ok
    _verdict(
        9,
        "halfway-Ising size collapse, h -> -h symmetry, cusp at h=0",
        ok,
        f"collapse {collapse:.2e}, symmetry {symmetry:.2e}, "
        f"slopes at 0 (N=1024): {slopes[1024][0]:+.4f}/{slopes[1024][1]:+.4f}",
    )
    assert collapse <= 1e-6
    assert symmetry <= 1e-9
    assert cusp_ok


def test_criterion_10_overlap_formula_agreement():
    specs = [
        ("xy", cx.preset_xny(0, 0.5, 1.3, 8), 1.3),
        ("xzy", cx.preset_xny(1, 0.5, 0.7, 8), 0.7),
        ("xn2y", cx.preset_xny(2, 0.5, 1.5, 8), 1.5),
        ("halfway-ising", cx.preset_halfway_xy(1.0, 0.3, 8), 0.3),
        ("ghz-cluster", cx.preset_ghz_cluster(0.5, 8), 0.5),
        ("spt-afm", cx.preset_spt_afm(0.5, 8), 0.5),
    ]
    worst = 0.0
    all_ok = True
    for name, spec, param in specs:
        rows = [
            r
            for r in check_model(name, spec, param, include_fidelity=True, include_overlaps=True)
            if r.check in ("overlap_site", "overlap_block", "state_fidelity")
        ]
        assert rows, f"{name}: ground state not eligible for overlap checks"
        worst = max(worst, max(r.error for r in rows))
        all_ok = all_ok and all(r.passed for r in rows)
    _verdict(
        10,
        "closed-form overlaps match direct inner products (N=8, 20 ansatze)",
        all_ok,
        f"max err {worst:.2e}",
    )
    assert all_ok


def test_criterion_11_ansatz_nesting(
    xzy_scans, spt_scans, halfway_scans, ghz_point_result, circle_point_result
):
    """Lambda(block) >= Lambda(af-site) >= Lambda(site) - 1e-10 at every scan
    point of criteria 6-9, with the sharper log-domain ordering (eg_block <=
    eg_af <= eg_site + 1e-8) checked alongside so the comparison stays
    meaningful where the raw overlaps underflow."""
    lam_tol = 1e-10
    eg_tol = 1e-8
    checked = 0
    worst_gap = -np.inf

    def check_triple(site_res, af_res, block_res):
        nonlocal checked, worst_gap
        assert block_res.lambda_max >= af_res.lambda_max - lam_tol
        assert af_res.lambda_max >= site_res.lambda_max - lam_tol
        assert block_res.eg_total <= af_res.eg_total + eg_tol
        assert af_res.eg_total <= site_res.eg_total + eg_tol
        worst_gap = max(worst_gap, block_res.eg_total - af_res.eg_total)
        checked += 1

    for (r, n), (hs, site_results) in xzy_scans.items():
        for h, site_res in zip(hs, site_results):
            spec = cx.preset_xny(1, r, float(h), n)
            check_triple(site_res, cx.maximize_site_af(spec), cx.maximize_block(spec))
    for n, (lams, af_results) in spt_scans.items():
        for lam, af_res in zip(lams, af_results):
            spec = cx.preset_spt_afm(float(lam), n)
            check_triple(cx.maximize_site(spec), af_res, cx.maximize_block(spec))
    for n, (hs, site_results) in halfway_scans.items():
        for h, site_res in zip(hs, site_results):
            spec = cx.preset_halfway_xy(1.0, float(h), n)
            check_triple(site_res, cx.maximize_site_af(spec), cx.maximize_block(spec))
    for res, spec in (
        (ghz_point_result, cx.preset_ghz_cluster(0.0, 128)),
        (circle_point_result, cx.preset_xny(0, 0.6, 0.8, 64)),
    ):
        check_triple(res, cx.maximize_site_af(spec), cx.maximize_block(spec))

    _verdict(
        11,
        "ansatz-family nesting across all entanglement scans",
        True,
        f"{checked} scan points checked",
    )
