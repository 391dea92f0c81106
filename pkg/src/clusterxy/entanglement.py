"""Geometric entanglement of the even-sector vacuum.

The vacuum of the antiperiodic (even) sector is a paired state
prod_k [cos(theta_k) + i sin(theta_k) c+_k c+_{N-k-1}] |0>, and its overlap
with translation-invariant product ansatze reduces to short closed-form
products over momenta:

* one identical single-site state on every site (one angle xi),
* one identical two-site state on every block of two (amplitudes a,b,c,d),
* a two-site product of two independent single-site states (period-2
  ansatz, appropriate for antiferromagnetic order).

Maximizing the squared overlap gives the geometric entanglement
E = -log2(Lambda_max^2) and its per-site density E/N.  All overlap factors
are quadratic forms in the block amplitudes, which this module exploits:
log|overlap| and its gradient are cheap, so the maximizations run as
multi-start gradient ascent on the amplitude sphere.  A thermodynamic-limit
version of the per-block density is evaluated by quadrature over the
continuous Bogoliubov angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

from .model import ModelSpec
from .freefermion import (
    DEGENERACY_RTOL,
    ground_and_gap,
    even_vacuum_angles,
)

_LN2 = math.log(2.0)
_TINY = 1e-280
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

#: Site-angle optimization: dense-grid resolution and refinement tolerance.
SITE_GRID_POINTS = 257
SITE_XI_TOL = 1e-10

#: Sphere optimization: number of multi-start seeds for the block problem.
BLOCK_STARTS = 32

#: Fixed-order quadrature nodes used inside the thermodynamic maximization;
#: the value at the optimum is re-evaluated with adaptive quadrature.
THERMO_NODES = 400
THERMO_QUAD_TOL = 1e-9


class EvenVacuumError(ValueError):
    """The global ground state is not the even-sector vacuum, so the
    closed-form overlaps do not describe it."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge to the requested tolerance."""


@dataclass(frozen=True)
class SiteAnsatz:
    """Single-site state cos(xi/2)|up> + sin(xi/2)|down>, identical on
    every site."""

    xi: float

    def __post_init__(self):
        if not 0.0 <= self.xi <= math.pi:
            raise ValueError(f"xi must lie in [0, pi], got {self.xi}")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([math.cos(self.xi / 2.0), math.sin(self.xi / 2.0)])


@dataclass(frozen=True)
class BlockAnsatz:
    """Normalized two-site state a|uu> + b|ud> + c|du> + d|dd>, identical
    on every block of two sites."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        norm2 = self.a**2 + self.b**2 + self.c**2 + self.d**2
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"block amplitudes must be normalized, |v|^2 = {norm2}")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])


@dataclass(frozen=True)
class EntanglementResult:
    """Maximal overlap, total entanglement, per-site density, and the
    maximizing ansatz; ``ground_degenerate`` marks results computed for a
    degenerate ground level's even-vacuum representative."""

    lambda_max: float
    eg_total: float
    density: float
    optimum: object
    mode: str
    ground_degenerate: bool = False


# --- closed-form overlaps ----------------------------------------------------

def _site_factors(angles: np.ndarray, sites: int) -> tuple[np.ndarray, np.ndarray]:
    if sites % 2 != 0:
        raise ValueError("single-site overlap requires an even number of sites")
    half = sites // 2
    angles = np.asarray(angles, dtype=float)
    if angles.shape[0] < half:
        raise ValueError(f"need {half} vacuum angles, got {angles.shape[0]}")
    theta = angles[:half]
    cot = 1.0 / np.tan(np.pi * (np.arange(half) + 0.5) / sites)
    return np.cos(theta), np.sin(theta) * cot


def overlap_site(angles, xi: float, sites: int) -> float:
    """Overlap of the even vacuum with the uniform single-site product state
    at angle xi: prod_k [cos(theta_k) cos^2(xi/2)
    + sin(theta_k) sin^2(xi/2) cot(pi(k+1/2)/N)]."""
    cos_part, sin_part = _site_factors(angles, sites)
    terms = cos_part * math.cos(xi / 2.0) ** 2 + sin_part * math.sin(xi / 2.0) ** 2
    return float(np.prod(terms))


def _block_forms(angles, sites: int) -> tuple[np.ndarray, np.ndarray | None]:
    """Overlap factors of the two-site-block ansatz as quadratic forms.

    Returns (M, q): factor k of the overlap is v.M[k].v for the amplitude
    vector v = (a, b, c, d), and the leftover unpaired factor (present when
    N/2 is odd) is q.v.
    """
    if sites % 2 != 0:
        raise ValueError("block overlap requires an even number of sites")
    half = sites // 2
    angles = np.asarray(angles, dtype=float)
    if angles.shape[0] < half:
        raise ValueError(f"need {half} vacuum angles, got {angles.shape[0]}")
    n_pair = sites // 4 if sites % 4 == 0 else (sites - 2) // 4

    ks = np.arange(n_pair)
    t1 = angles[ks]
    t2 = angles[half - 1 - ks]
    phi = 2.0 * np.pi * (ks + 0.5) / sites
    cot = 1.0 / np.tan(phi)

    a_cross = np.sin(t1) * np.cos(t2)
    b_cross = np.cos(t1) * np.sin(t2)

    m = np.zeros((n_pair, 4, 4))
    m[:, 0, 0] = np.cos(t1) * np.cos(t2)
    m[:, 3, 3] = np.sin(t1) * np.sin(t2)
    m[:, 1, 1] = m[:, 2, 2] = 0.5 * (a_cross - b_cross) * cot
    m[:, 1, 2] = m[:, 2, 1] = 0.5 * (a_cross + b_cross) * cot * np.cos(phi)
    m[:, 0, 3] = m[:, 3, 0] = 0.5 * (a_cross + b_cross) * np.sin(phi)

    q = None
    if sites % 4 != 0:
        mid = (half - 1) // 2
        q = np.array([math.cos(angles[mid]), 0.0, 0.0, math.sin(angles[mid])])
    return m, q


def _block_amplitudes(ansatz) -> np.ndarray:
    amps = getattr(ansatz, "amplitudes", None)
    amps = np.asarray(amps if amps is not None else ansatz, dtype=float)
    if amps.shape != (4,):
        raise ValueError("block ansatz needs 4 real amplitudes")
    return amps


def overlap_block(angles, ansatz, sites: int) -> float:
    """Overlap of the even vacuum with the uniform two-site-block product
    state, evaluated factor by factor (times the unpaired factor when N/2
    is odd)."""
    v = _block_amplitudes(ansatz)
    m, q = _block_forms(angles, sites)
    factors = np.einsum("kij,i,j->k", m, v, v)
    total = float(np.prod(factors)) if factors.size else 1.0
    if q is not None:
        total *= float(q @ v)
    return total


# --- generic sphere maximization over products of quadratic forms ------------

def _forms_value_grad(v, m, q, weights):
    """log of the weighted product of |u.M_k.u| factors at u = v/|v|, with
    the gradient mapped back to v; the optional linear factor q.u enters
    with unit weight.  The objective is scale-invariant, so the gradient is
    purely tangential."""
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm < 1e-150:
        return -1e100, np.zeros_like(v)
    u = v / norm
    mu = m @ u
    d = np.einsum("ki,i->k", mu, u)
    safe = np.where(np.abs(d) < _TINY, np.where(d >= 0.0, _TINY, -_TINY), d)
    val = float(np.sum(weights * np.log(np.abs(safe))))
    grad_u = 2.0 * (weights[:, None] * mu / safe[:, None]).sum(axis=0)
    if q is not None:
        qu = float(q @ u)
        safe_qu = qu if abs(qu) > _TINY else _TINY
        val += math.log(abs(safe_qu))
        grad_u = grad_u + q / safe_qu
    grad_v = (grad_u - float(grad_u @ u) * u) / norm
    return val, grad_v


def _maximize_on_sphere(m, q, weights, starts):
    """Multi-start gradient ascent of the log-product objective over the
    amplitude sphere; returns (best log value, best unit vector)."""

    def negative(v):
        val, grad = _forms_value_grad(v, m, q, weights)
        return -val, -grad

    def clamped(x):
        factors = np.einsum("kij,i,j->k", m, x, x)
        if np.any(np.abs(factors) < 1e-100):
            return True
        return q is not None and abs(float(q @ x)) < 1e-100

    best_val, best_v = -np.inf, None
    for x0 in starts:
        x0 = np.asarray(x0, dtype=float)
        x0 = x0 / np.linalg.norm(x0)
        if clamped(x0):
            # a vanishing factor kills the clamped gradient; nudge off it
            x0 = x0 + 0.05
            x0 = x0 / np.linalg.norm(x0)
        res = minimize(
            negative,
            x0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 500, "ftol": 1e-15, "gtol": 1e-12},
        )
        if -res.fun > best_val:
            best_val, best_v = -res.fun, res.x
    v = best_v / np.linalg.norm(best_v)
    for comp in v:
        if abs(comp) > 1e-12:
            if comp < 0.0:
                v = -v
            break
    return best_val, v


def _block_starts(embedded: list[np.ndarray]) -> list[np.ndarray]:
    eye = np.eye(4)
    starts = [eye[i] for i in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            starts.append((eye[i] + eye[j]) / math.sqrt(2.0))
            starts.append((eye[i] - eye[j]) / math.sqrt(2.0))
    starts.extend(embedded)
    rng = np.random.default_rng(174613)
    while len(starts) < BLOCK_STARTS:
        starts.append(rng.normal(size=4))
    return starts


# --- site-angle maximization --------------------------------------------------

def _site_log_overlap(angles, sites):
    cos_part, sin_part = _site_factors(angles, sites)

    def logf(xi):
        half_angle = 0.5 * np.asarray(xi, dtype=float)
        terms = np.multiply.outer(np.cos(half_angle) ** 2, cos_part) + np.multiply.outer(
            np.sin(half_angle) ** 2, sin_part
        )
        with np.errstate(divide="ignore"):
            return np.sum(np.log(np.abs(terms)), axis=-1)

    return logf


def _golden_max(fun, lo, hi, tol):
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fun(c), fun(d)
    while (hi - lo) > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fun(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fun(d)
    mid = 0.5 * (lo + hi)
    return mid, fun(mid)


def _require_even_vacuum(spec: ModelSpec):
    if spec.sites % 2 != 0:
        raise ValueError("entanglement formulas require an even number of sites")
    report = ground_and_gap(spec)
    if not report.even_vacuum:
        raise EvenVacuumError(
            "ground state is not the even-sector vacuum "
            f"(ground sector {report.ground_sector.value}); the closed-form "
            "overlaps do not apply"
        )
    degenerate = report.gap < DEGENERACY_RTOL * max(1.0, abs(report.ground_energy))
    return degenerate


def _result(log_lambda: float, n: int, optimum, mode: str, degenerate: bool) -> EntanglementResult:
    eg_total = -2.0 * log_lambda / _LN2
    if abs(eg_total) < 1e-14:
        eg_total = abs(eg_total)
    return EntanglementResult(
        lambda_max=math.exp(log_lambda),
        eg_total=eg_total,
        density=eg_total / n,
        optimum=optimum,
        mode=mode,
        ground_degenerate=degenerate,
    )


def maximize_site(spec: ModelSpec) -> EntanglementResult:
    """Geometric entanglement against uniform single-site product states:
    dense xi grid followed by golden-section refinement."""
    degenerate = _require_even_vacuum(spec)
    angles = even_vacuum_angles(spec)
    logf = _site_log_overlap(angles, spec.sites)
    grid = np.linspace(0.0, math.pi, SITE_GRID_POINTS)
    values = logf(grid)
    best = int(np.argmax(values))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, SITE_GRID_POINTS - 1)]
    xi, log_lambda = _golden_max(lambda x: float(logf(x)), lo, hi, SITE_XI_TOL)
    if values[best] > log_lambda:
        xi, log_lambda = grid[best], float(values[best])
    return _result(log_lambda, spec.sites, SiteAnsatz(float(xi)), "per_site", degenerate)


def _site_optimum_embedding(angles, sites) -> tuple[float, np.ndarray]:
    logf = _site_log_overlap(angles, sites)
    grid = np.linspace(0.0, math.pi, SITE_GRID_POINTS)
    values = logf(grid)
    best = int(np.argmax(values))
    xi, _ = _golden_max(
        lambda x: float(logf(x)),
        grid[max(best - 1, 0)],
        grid[min(best + 1, SITE_GRID_POINTS - 1)],
        SITE_XI_TOL,
    )
    c, s = math.cos(xi / 2.0), math.sin(xi / 2.0)
    return xi, np.array([c * c, c * s, c * s, s * s])


def _af_vector(t1, t2):
    return np.array(
        [
            math.cos(t1) * math.cos(t2),
            math.cos(t1) * math.sin(t2),
            math.sin(t1) * math.cos(t2),
            math.sin(t1) * math.sin(t2),
        ]
    )


def _maximize_af(m, q, weights, extra_starts=()):
    """Maximize the log-product objective over the period-2 product family
    (a, b, c, d) = (cos t1, sin t1) x (cos t2, sin t2)."""

    def value_grad(t):
        t1, t2 = float(t[0]), float(t[1])
        v = _af_vector(t1, t2)
        val, grad_v = _forms_value_grad(v, m, q, weights)
        d1 = np.array(
            [
                -math.sin(t1) * math.cos(t2),
                -math.sin(t1) * math.sin(t2),
                math.cos(t1) * math.cos(t2),
                math.cos(t1) * math.sin(t2),
            ]
        )
        d2 = np.array(
            [
                -math.cos(t1) * math.sin(t2),
                math.cos(t1) * math.cos(t2),
                -math.sin(t1) * math.sin(t2),
                math.sin(t1) * math.cos(t2),
            ]
        )
        return val, np.array([grad_v @ d1, grad_v @ d2])

    # coarse vectorized scan, then gradient refinement from the best cells
    grid = np.linspace(0.0, math.pi, 48, endpoint=False)
    tt1, tt2 = np.meshgrid(grid, grid, indexing="ij")
    vecs = np.stack(
        [
            np.cos(tt1) * np.cos(tt2),
            np.cos(tt1) * np.sin(tt2),
            np.sin(tt1) * np.cos(tt2),
            np.sin(tt1) * np.sin(tt2),
        ],
        axis=-1,
    ).reshape(-1, 4)
    factors = np.einsum("kij,ni,nj->nk", m, vecs, vecs)
    with np.errstate(divide="ignore"):
        vals = np.sum(weights * np.log(np.abs(np.where(factors == 0.0, _TINY, factors))), axis=1)
    if q is not None:
        qv = vecs @ q
        vals += np.log(np.abs(np.where(qv == 0.0, _TINY, qv)))
    order = np.argsort(vals)[::-1][:8]
    starts = [np.array([tt1.ravel()[i], tt2.ravel()[i]]) for i in order]
    starts.extend(np.asarray(t, dtype=float) for t in extra_starts)

    def negative(t):
        val, grad = value_grad(t)
        return -val, -grad

    best_val, best_t = -np.inf, None
    for t0 in starts:
        res = minimize(
            negative,
            t0,
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 500, "ftol": 1e-15, "gtol": 1e-12},
        )
        if -res.fun > best_val:
            best_val, best_t = -res.fun, res.x
    return best_val, best_t


def maximize_block(spec: ModelSpec) -> EntanglementResult:
    """Geometric entanglement against uniform two-site-block product states:
    multi-start ascent over the amplitude 3-sphere, seeded with coordinate
    vertices, random points, and the embedded single-site and period-2
    optima."""
    degenerate = _require_even_vacuum(spec)
    angles = even_vacuum_angles(spec)
    m, q = _block_forms(angles, spec.sites)
    weights = np.ones(m.shape[0])
    _, site_embed = _site_optimum_embedding(angles, spec.sites)
    _, af_t = _maximize_af(m, q, weights)
    starts = _block_starts([site_embed, _af_vector(af_t[0], af_t[1])])
    log_lambda, v = _maximize_on_sphere(m, q, weights, starts)
    optimum = BlockAnsatz(*(float(x) for x in v))
    return _result(log_lambda, spec.sites, optimum, "per_block", degenerate)


def maximize_site_af(spec: ModelSpec) -> EntanglementResult:
    """Per-site geometric entanglement against period-2 product states
    (independent states on the two sites of each block), the family that
    stays faithful for antiferromagnetic order."""
    degenerate = _require_even_vacuum(spec)
    angles = even_vacuum_angles(spec)
    m, q = _block_forms(angles, spec.sites)
    weights = np.ones(m.shape[0])
    xi_site, _ = _site_optimum_embedding(angles, spec.sites)
    log_lambda, t = _maximize_af(m, q, weights, extra_starts=[(xi_site / 2.0, xi_site / 2.0)])
    v = _af_vector(t[0], t[1])
    for comp in v:
        if abs(comp) > 1e-12:
            if comp < 0.0:
                v = -v
            break
    optimum = BlockAnsatz(*(float(x) for x in v))
    return _result(log_lambda, spec.sites, optimum, "per_site_af", degenerate)


# --- thermodynamic limit ------------------------------------------------------

def theta_function(spec: ModelSpec):
    """Continuous-momentum Bogoliubov angle mu -> theta(mu) of a model,
    defined by its blocks and field (system size drops out)."""
    strengths = np.array([blk.strength for blk in spec.blocks])
    signs = np.array([1.0 if blk.kind.value == "x" else -1.0 for blk in spec.blocks])
    spans = np.array([1 + blk.mediators for blk in spec.blocks])
    field = spec.field

    def theta(mu):
        mu_arr = np.asarray(mu, dtype=float)
        args = np.multiply.outer(mu_arr, spans)
        alpha = field - np.sum(strengths * np.cos(args), axis=-1)
        beta = np.sum(signs * strengths * np.sin(args), axis=-1)
        root = np.sqrt(alpha * alpha + beta * beta)
        c2 = np.where(root > 0.0, alpha / np.where(root > 0.0, root, 1.0), 1.0)
        sin_t = np.where(beta >= 0.0, 1.0, -1.0) * np.sqrt(np.clip((1.0 - c2) / 2.0, 0.0, 1.0))
        cos_t = np.sqrt(np.clip((1.0 + c2) / 2.0, 0.0, 1.0))
        out = np.arctan2(sin_t, cos_t)
        out = np.where(root == 0.0, 0.0, out)
        return out if out.shape else float(out)

    return theta


def _thermo_forms(theta_of_mu, mu):
    t1 = np.asarray(theta_of_mu(mu), dtype=float)
    t2 = np.asarray(theta_of_mu(np.pi - mu), dtype=float)
    cot = 1.0 / np.tan(mu)
    m = np.zeros((mu.size, 4, 4))
    m[:, 0, 0] = np.cos(t1) * np.cos(t2)
    m[:, 3, 3] = np.sin(t1) * np.sin(t2)
    m[:, 1, 1] = m[:, 2, 2] = 0.5 * np.sin(t1 - t2) * cot
    m[:, 1, 2] = m[:, 2, 1] = 0.5 * np.sin(t1 + t2) * cot * np.cos(mu)
    m[:, 0, 3] = m[:, 3, 0] = 0.5 * np.sin(t1 + t2) * np.sin(mu)
    return m


def _thermo_integrand(theta_of_mu, v):
    def integrand(mu):
        mu_arr = np.atleast_1d(np.asarray(mu, dtype=float))
        m = _thermo_forms(theta_of_mu, mu_arr)
        vals = np.einsum("kij,i,j->k", m, v, v)
        out = np.log(np.maximum(np.abs(vals), _TINY))
        return float(out[0]) if np.isscalar(mu) or np.asarray(mu).shape == () else out

    return integrand


def thermo_block_density(theta_of_mu, quad_tol: float = THERMO_QUAD_TOL) -> float:
    """Thermodynamic-limit per-site density of the two-site-block
    entanglement: -1/pi times the integral of log2 of the overlap factor
    over mu in (0, pi/2), maximized over the block amplitudes.

    The maximization runs on fixed high-order quadrature nodes (with a
    square-root substitution absorbing the logarithmic endpoint
    singularity); the integral at the optimum is then re-evaluated by
    adaptive quadrature to ``quad_tol`` and a QuadratureError is raised if
    that fails to converge.
    """
    nodes, gl_weights = np.polynomial.legendre.leggauss(THERMO_NODES)
    u = 0.5 * (nodes + 1.0)
    du = 0.5 * gl_weights
    mu = 0.5 * math.pi * u * u
    weights = du * math.pi * u  # d(mu) = pi * u * du

    m = _thermo_forms(theta_of_mu, mu)
    q = None
    starts = _block_starts([])
    log_integral, v = _maximize_on_sphere(m, q, weights, starts)

    integrand = _thermo_integrand(theta_of_mu, v)
    value, abserr, info = quad(
        integrand, 0.0, 0.5 * math.pi, epsabs=quad_tol, epsrel=0.0, limit=400, full_output=True
    )[:3]
    if abserr > 100.0 * max(quad_tol, abs(value) * 1e-12):
        raise QuadratureError(
            f"integral did not converge (estimate {value}, error {abserr})"
        )
    # sanity guard: the adaptive value must agree with the node sum used
    # during optimization
    if abs(value - log_integral) > 1e-6 * max(1.0, abs(value)):
        raise QuadratureError(
            "fixed-node and adaptive quadrature disagree "
            f"({log_integral} vs {value}); integrand may be singular"
        )
    return -value / (math.pi * _LN2)


# --- scan utilities -----------------------------------------------------------

def scan_derivative(xs, ys) -> np.ndarray:
    """Finite-difference derivative on a uniform grid: central differences
    in the interior, one-sided at the ends."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError("xs and ys must be 1-D arrays of equal length")
    if xs.size < 3:
        raise ValueError("need at least 3 points")
    steps = np.diff(xs)
    if np.any(steps <= 0.0):
        raise ValueError("xs must be strictly increasing")
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12 * max(1.0, abs(xs[-1] - xs[0]))):
        raise ValueError("non-uniform grid")
    return np.gradient(ys, float(steps[0]))
