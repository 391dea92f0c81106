"""Brute-force reference solver: dense exact diagonalization in the full
spin basis, plus direct overlap maximization on the exact ground vector.

Everything here is deliberately independent of the free-fermion machinery so
the two can cross-check each other at small system sizes.  Basis convention:
site 0 is the most significant qubit and spin-up maps to bit 0, so the
all-up state is basis index 0 (the Jordan-Wigner fermion vacuum).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sparse
from scipy.optimize import minimize

from .model import ModelSpec, PauliString, to_pauli_strings
from .freefermion import Sector, _mode_arrays
from .entanglement import EntanglementResult

#: Dense diagonalization is capped here; 2^14 x 2^14 is the largest matrix
#: worth building at desk scale.
MAX_DENSE_SITES = 14

#: Brute-force block/af overlap maximization cap (ansatz expansion cost).
MAX_BRUTE_SITES = 10

_PAULI = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}


@dataclass(frozen=True)
class DenseOperator:
    """A Hermitian operator on the full 2^N-dimensional spin space."""

    dimension: int
    entries: np.ndarray

    def __post_init__(self):
        if self.entries.shape != (self.dimension, self.dimension):
            raise ValueError("entries shape does not match dimension")
        if not np.allclose(self.entries, self.entries.conj().T, atol=1e-12):
            raise ValueError("operator is not Hermitian within 1e-12")


def dense_hamiltonian(strings: list[PauliString]) -> DenseOperator:
    """Sum of Kronecker-expanded Pauli strings as a dense matrix."""
    if not strings:
        raise ValueError("no Pauli strings given")
    n = len(strings[0].letters)
    if n > MAX_DENSE_SITES:
        raise ValueError(f"dense construction capped at {MAX_DENSE_SITES} sites, got {n}")
    dim = 2**n
    acc = sparse.csr_matrix((dim, dim), dtype=complex)
    for ps in strings:
        if len(ps.letters) != n:
            raise ValueError("inconsistent string lengths")
        mats = [sparse.csr_matrix(_PAULI[ch]) for ch in ps.letters]
        term = reduce(lambda a, b: sparse.kron(a, b, format="csr"), mats)
        acc = acc + ps.coefficient * term
    return DenseOperator(dim, np.asarray(acc.todense()))


def model_hamiltonian(spec: ModelSpec) -> DenseOperator:
    """Dense Hamiltonian of a model (expansion + assembly in one step)."""
    return dense_hamiltonian(to_pauli_strings(spec))


def _eigh(op: DenseOperator, vectors: bool):
    h = op.entries
    if np.all(h.imag == 0.0):
        h = h.real
    if vectors:
        return np.linalg.eigh(h)
    return np.linalg.eigvalsh(h), None


def exact_spectrum(op: DenseOperator, count: int) -> list[float]:
    """The ``count`` smallest eigenvalues, ascending."""
    if count > op.dimension:
        raise ValueError("count exceeds the operator dimension")
    vals, _ = _eigh(op, vectors=False)
    return [float(v) for v in vals[:count]]


def parity_diagonal(n: int) -> np.ndarray:
    """Diagonal of the fermion-parity operator prod_j Z_j: (-1)^popcount."""
    idx = np.arange(2**n, dtype=np.uint64)
    pop = np.zeros(2**n, dtype=int)
    for bit in range(n):
        pop += ((idx >> np.uint64(bit)) & np.uint64(1)).astype(int)
    return np.where(pop % 2 == 0, 1.0, -1.0)


def exact_ground_state(op: DenseOperator) -> np.ndarray:
    """Normalized ground eigenvector.

    On numerical degeneracy the even-fermion-parity representative is
    returned (when one exists in the degenerate subspace), matching the
    even-vacuum convention of the analytic solver.  The global phase is
    fixed by making the largest-magnitude amplitude real and positive.
    """
    vals, vecs = _eigh(op, vectors=True)
    tol = 1e-10 * max(1.0, abs(vals[0]))
    cluster = np.flatnonzero(vals <= vals[0] + tol)
    n = int(round(np.log2(op.dimension)))
    vec = None
    if cluster.size > 1:
        par = parity_diagonal(n)
        sub = vecs[:, cluster]
        even_part = 0.5 * (sub + par[:, None] * sub)
        norms = np.linalg.norm(even_part, axis=0)
        best = int(np.argmax(norms))
        if norms[best] > 1e-8:
            vec = even_part[:, best] / norms[best]
    if vec is None:
        vec = vecs[:, 0]
    vec = np.asarray(vec, dtype=complex)
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    vec = vec / phase
    return vec / np.linalg.norm(vec)


# --- even-vacuum reconstruction in the spin basis ---------------------------

def _jw_annihilators(n: int) -> list[sparse.csr_matrix]:
    """Jordan-Wigner c_j = (prod_{l<j} Z_l) |up><down|_j as sparse matrices."""
    z = sparse.csr_matrix(np.diag([1.0, -1.0]))
    eye = sparse.identity(2, format="csr")
    lower = sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    ops = []
    for j in range(n):
        mats = [z] * j + [lower] + [eye] * (n - j - 1)
        ops.append(reduce(lambda a, b: sparse.kron(a, b, format="csr"), mats))
    return ops


def reconstruct_even_vacuum(spec: ModelSpec, angle_sign: float = 1.0) -> np.ndarray:
    """Even-sector Bogoliubov vacuum expanded in the spin basis.

    Applies prod_{k < N/2} [cos(theta_k) + i sin(theta_k) c+_k c+_{N-k-1}]
    to the all-up state, with momentum operators built from the Jordan-
    Wigner images.  ``angle_sign`` exists so cross-check harnesses can feed
    a deliberately corrupted angle convention.
    """
    n = spec.sites
    if n % 2 != 0:
        raise ValueError("even-vacuum reconstruction requires even sites")
    if n > MAX_DENSE_SITES:
        raise ValueError(f"reconstruction capped at {MAX_DENSE_SITES} sites")
    theta = angle_sign * _mode_arrays(spec, Sector.EVEN).theta[: n // 2]
    cdag = [op.conj().T.tocsr() for op in _jw_annihilators(n)]
    sites = np.arange(n)
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for k in range(n // 2):
        def create(mode: int, vec: np.ndarray) -> np.ndarray:
            phases = np.exp(1j * 2.0 * np.pi * sites * (mode + 0.5) / n) / np.sqrt(n)
            out = np.zeros_like(vec)
            for j in range(n):
                out += phases[j] * (cdag[j] @ vec)
            return out

        pair = create(k, create(n - 1 - k, state))
        state = np.cos(theta[k]) * state + 1j * np.sin(theta[k]) * pair
    return state


# --- product ansatz states and overlaps -------------------------------------

def site_product_state(n: int, amplitudes: np.ndarray) -> np.ndarray:
    """(a|up> + b|down>)^{tensor N} in the full basis."""
    one = np.asarray(amplitudes, dtype=complex)
    if one.shape != (2,):
        raise ValueError("site ansatz needs 2 amplitudes")
    return reduce(np.kron, [one] * n)


def block_product_state(n: int, amplitudes: np.ndarray) -> np.ndarray:
    """Identical two-site blocks (a,b,c,d) tensored over N/2 blocks."""
    blk = np.asarray(amplitudes, dtype=complex)
    if blk.shape != (4,):
        raise ValueError("block ansatz needs 4 amplitudes")
    if n % 2 != 0:
        raise ValueError("block ansatz requires even sites")
    return reduce(np.kron, [blk] * (n // 2))


def direct_overlap(state: np.ndarray, ansatz) -> float:
    """|<product ansatz | state>| by full-basis expansion.

    ``ansatz`` is a SiteAnsatz, a BlockAnsatz, or a raw amplitude array of
    length 2 (per site) or 4 (per two-site block).
    """
    amps = getattr(ansatz, "amplitudes", None)
    if amps is None:
        amps = np.asarray(ansatz, dtype=complex)
    else:
        amps = np.asarray(amps, dtype=complex)
    dim = state.shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError("state length is not a power of two")
    if amps.shape == (2,):
        phi = site_product_state(n, amps)
    elif amps.shape == (4,):
        phi = block_product_state(n, amps)
    else:
        raise ValueError("ansatz must carry 2 or 4 amplitudes")
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise ValueError("ansatz amplitudes are all zero")
    power = n if amps.shape == (2,) else n // 2
    return float(abs(np.vdot(phi, state)) / norm**power)


def _brute_params_to_amps(kind: str, x: np.ndarray, complex_amplitudes: bool) -> np.ndarray:
    if kind == "site":
        amps = x[:2] + 1j * x[2:4] if complex_amplitudes else x[:2].astype(complex)
    elif kind == "block":
        amps = x[:4] + 1j * x[4:8] if complex_amplitudes else x[:4].astype(complex)
    elif kind == "af_site":
        if complex_amplitudes:
            left = x[:2] + 1j * x[2:4]
            right = x[4:6] + 1j * x[6:8]
        else:
            left = x[:2].astype(complex)
            right = x[2:4].astype(complex)
        amps = np.kron(left, right)
    else:
        raise ValueError(f"unknown ansatz kind {kind!r}")
    return amps


def brute_max_overlap(state: np.ndarray, kind: str, complex_amplitudes: bool = True):
    """Maximize |<product|state>| over an ansatz family by multi-start
    simplex refinement of random seeds.

    kind: 'site' (one state on every site), 'block' (one two-site state on
    every block), or 'af_site' (a two-site product of two independent
    one-site states, period-2 translation invariance).  Amplitudes may be
    complex (the default; used to probe whether real optima are globally
    optimal) or restricted to real.
    """
    dim = state.shape[0]
    n = int(round(np.log2(dim)))
    if kind in ("block", "af_site") and n > MAX_BRUTE_SITES:
        raise ValueError(f"brute-force {kind} maximization capped at {MAX_BRUTE_SITES} sites")

    n_params = {"site": 2, "block": 4, "af_site": 4}[kind]
    if complex_amplitudes:
        n_params *= 2

    def negative_overlap(x: np.ndarray) -> float:
        amps = _brute_params_to_amps(kind, x, complex_amplitudes)
        norm = np.linalg.norm(amps)
        if norm < 1e-12:
            return 0.0
        return -direct_overlap(state, amps / norm)

    rng = np.random.default_rng(20240829)
    starts = [np.eye(n_params)[i] for i in range(n_params)]
    starts += [rng.normal(size=n_params) for _ in range(16 + 2 * n_params)]
    # coarse multi-start pass, then a single high-precision polish
    best_val = np.inf
    best_x = None
    for x0 in starts:
        res = minimize(
            negative_overlap,
            x0,
            method="Nelder-Mead",
            options={"fatol": 1e-7, "xatol": 1e-5, "maxfev": 1500},
        )
        if res.fun < best_val:
            best_val = res.fun
            best_x = res.x
    res = minimize(
        negative_overlap,
        best_x,
        method="Nelder-Mead",
        options={"fatol": 1e-13, "xatol": 1e-11, "maxfev": 20000},
    )
    if res.fun < best_val:
        best_val = res.fun
        best_x = res.x

    amps = _brute_params_to_amps(kind, best_x, complex_amplitudes)
    amps = amps / np.linalg.norm(amps)
    lam = -best_val
    eg_total = -2.0 * np.log2(max(lam, 1e-300))
    mode = {"site": "per_site", "block": "per_block", "af_site": "per_site_af"}[kind]
    return EntanglementResult(
        lambda_max=lam,
        eg_total=eg_total,
        density=eg_total / n,
        optimum=amps,
        mode=mode,
    )
