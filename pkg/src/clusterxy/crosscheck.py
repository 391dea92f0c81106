"""Oracle-equivalence suite: runs the analytic solver and the dense
brute-force solver side by side on every preset family and reports
per-point pass/fail rows for energies, gaps, state fidelity, and the
closed-form overlap formulas."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import model as mdl
from .freefermion import DEGENERACY_RTOL, ground_and_gap, even_vacuum_angles
from .entanglement import overlap_site, overlap_block
from .oracle import (
    MAX_BRUTE_SITES,
    direct_overlap,
    exact_ground_state,
    exact_spectrum,
    model_hamiltonian,
    reconstruct_even_vacuum,
)

ENERGY_TOL = 1e-9
FIDELITY_TOL = 1e-9
OVERLAP_TOL = 1e-9

#: preset name -> (sweep parameter label, builder(parameter, sites))
CHECK_PRESETS: dict[str, tuple[str, Callable[[float, int], mdl.ModelSpec]]] = {
    "xy": ("h", lambda p, n: mdl.preset_xny(0, 0.5, p, n)),
    "xzy": ("h", lambda p, n: mdl.preset_xny(1, 0.5, p, n)),
    "xn2y": ("h", lambda p, n: mdl.preset_xny(2, 0.5, p, n)),
    "halfway-xy": ("h", lambda p, n: mdl.preset_halfway_xy(0.5, p, n)),
    "ghz-cluster": ("g", lambda p, n: mdl.preset_ghz_cluster(p, n)),
    "spt-afm": ("lambda", lambda p, n: mdl.preset_spt_afm(p, n)),
    "spt-afm-halfway": ("lambda", lambda p, n: mdl.preset_spt_afm(p, n, halfway=True)),
}


@dataclass(frozen=True)
class CheckRow:
    preset: str
    sites: int
    parameter: float
    check: str
    error: float
    tolerance: float
    passed: bool


def _random_site_angles(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.uniform(0.0, np.pi, size=count)


def _random_block_amplitudes(rng: np.random.Generator, count: int) -> np.ndarray:
    vecs = rng.normal(size=(count, 4))
    return vecs / np.linalg.norm(vecs, axis=1, keepdims=True)


def check_model(
    name: str,
    spec: mdl.ModelSpec,
    parameter: float,
    *,
    include_fidelity: bool = True,
    include_overlaps: bool = True,
    overlap_samples: int = 20,
    flip_theta_sign: bool = False,
    rng: np.random.Generator | None = None,
) -> list[CheckRow]:
    """Compare the analytic solution of one model against dense exact
    diagonalization; returns one row per comparison."""
    rows: list[CheckRow] = []
    report = ground_and_gap(spec)
    need_state = include_fidelity or include_overlaps
    ham = model_hamiltonian(spec)
    exact = exact_spectrum(ham, 2)

    energy_err = abs(report.ground_energy - exact[0])
    gap_err = abs(report.gap - (exact[1] - exact[0]))
    rows.append(CheckRow(name, spec.sites, parameter, "energy", energy_err, ENERGY_TOL, energy_err <= ENERGY_TOL))
    rows.append(CheckRow(name, spec.sites, parameter, "gap", gap_err, ENERGY_TOL, gap_err <= ENERGY_TOL))

    degenerate = report.gap < DEGENERACY_RTOL * max(1.0, abs(report.ground_energy))
    eligible = (
        need_state
        and spec.sites % 2 == 0
        and report.even_vacuum
        and not degenerate
    )
    if not eligible:
        return rows

    ground = exact_ground_state(ham)
    sign = -1.0 if flip_theta_sign else 1.0

    if include_fidelity:
        recon = reconstruct_even_vacuum(spec, angle_sign=sign)
        fid = abs(np.vdot(ground, recon))
        rows.append(
            CheckRow(name, spec.sites, parameter, "state_fidelity", 1.0 - fid, FIDELITY_TOL, 1.0 - fid <= FIDELITY_TOL)
        )

    if include_overlaps:
        rng = rng or np.random.default_rng(1234)
        angles = sign * even_vacuum_angles(spec)
        err_site = 0.0
        for xi in _random_site_angles(rng, overlap_samples):
            closed = abs(overlap_site(angles, float(xi), spec.sites))
            amp = np.array([np.cos(xi / 2.0), np.sin(xi / 2.0)])
            err_site = max(err_site, abs(closed - direct_overlap(ground, amp)))
        rows.append(
            CheckRow(name, spec.sites, parameter, "overlap_site", err_site, OVERLAP_TOL, err_site <= OVERLAP_TOL)
        )
        err_block = 0.0
        for amps in _random_block_amplitudes(rng, overlap_samples):
            closed = abs(overlap_block(angles, amps, spec.sites))
            err_block = max(err_block, abs(closed - direct_overlap(ground, amps)))
        rows.append(
            CheckRow(name, spec.sites, parameter, "overlap_block", err_block, OVERLAP_TOL, err_block <= OVERLAP_TOL)
        )
    return rows


def run_checks(
    sites: Iterable[int] = (8,),
    presets: Iterable[str] | None = None,
    points: int = 11,
    span: tuple[float, float] = (-2.0, 2.0),
    *,
    include_fidelity: bool = True,
    include_overlaps: bool = True,
    overlap_samples: int = 20,
    flip_theta_sign: bool = False,
) -> list[CheckRow]:
    """Run the equivalence suite over preset grids.

    ``flip_theta_sign`` deliberately corrupts the Bogoliubov angle sign in
    the fidelity and overlap legs; it exists as a negative control for the
    check harness itself.
    """
    names = list(presets) if presets is not None else list(CHECK_PRESETS)
    for n in sites:
        if n > MAX_BRUTE_SITES:
            raise ValueError(
                f"oracle checks are capped at {MAX_BRUTE_SITES} sites, got {n}"
            )
    rows: list[CheckRow] = []
    grid = np.linspace(span[0], span[1], points)
    rng = np.random.default_rng(97531)
    for name in names:
        if name not in CHECK_PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(CHECK_PRESETS)}")
        _, build = CHECK_PRESETS[name]
        for n in sites:
            for p in grid:
                rows.extend(
                    check_model(
                        name,
                        build(float(p), int(n)),
                        float(p),
                        include_fidelity=include_fidelity,
                        include_overlaps=include_overlaps,
                        overlap_samples=overlap_samples,
                        flip_theta_sign=flip_theta_sign,
                        rng=rng,
                    )
                )
    return rows
