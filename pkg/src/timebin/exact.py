"""Ground-truth continuous-time evolution and discrete-step error measurement.

The dense path diagonalizes the (verified Hermitian) generator once and
exponentiates its spectrum, which is exact to rounding.  Above a dimension
threshold a Lanczos/Krylov propagator steps the state through adaptively
halved substeps, accepting a step only when the subspace residual estimate
clears the requested local tolerance.

`trotter_error_norm` quantifies how far one device iteration (the fast-mode
edge product followed by the diagonal phase) sits from the exact one-unit
propagator, in spectral norm.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import eigh, expm

from .errors import KrylovError, ResourceCapError
from .fock import FockBasis
from .lattice import LatticeGraph
from .operators import SparseOperator, build_hamiltonian, spectral_norm
from .schedule import compile_schedule
from .state import Snapshot, StateVector, Trajectory

__all__ = [
    "exact_propagate",
    "exact_trajectory",
    "fidelity",
    "trotter_error_norm",
    "DENSE_DIM_MAX",
]

DENSE_DIM_MAX = 2048
HERMITICITY_TOL = 1e-10
KRYLOV_DIM = 30
KRYLOV_TOL = 1e-10


def _as_matrix(hamiltonian):
    if isinstance(hamiltonian, SparseOperator):
        return hamiltonian.matrix
    return hamiltonian


def _check_hermitian(matrix) -> None:
    diff = matrix - matrix.conj().T
    if hasattr(diff, "toarray"):
        worst = abs(diff).max() if diff.nnz else 0.0
        scale = abs(matrix).max() if matrix.nnz else 0.0
    else:
        worst = np.abs(diff).max() if diff.size else 0.0
        scale = np.abs(matrix).max() if matrix.size else 0.0
    if worst > HERMITICITY_TOL * max(1.0, scale):
        raise ValueError(
            f"generator is not Hermitian: max |H - H^dag| = {worst:.3e}"
        )


def _lanczos(matvec, start: np.ndarray, max_dim: int):
    """Orthonormal Krylov basis and tridiagonal projection of the generator.

    Returns (alphas, betas, basis_columns, residual_beta); residual_beta is 0
    on happy breakdown (the Krylov space closed on itself).
    """
    dim = start.shape[0]
    vecs = np.empty((max_dim, dim), dtype=np.complex128)
    alphas = []
    betas = []
    vecs[0] = start
    w = matvec(start)
    alpha = float(np.real(np.vdot(start, w)))
    alphas.append(alpha)
    w = w - alpha * start
    for j in range(1, max_dim):
        beta = float(np.linalg.norm(w))
        if beta < 1e-13:
            return np.array(alphas), np.array(betas), vecs[:j], 0.0
        v = w / beta
        # One full re-orthogonalization pass keeps the basis clean enough for
        # the residual estimate to be trustworthy.
        v = v - (vecs[:j].conj() @ v) @ vecs[:j]
        v /= np.linalg.norm(v)
        vecs[j] = v
        betas.append(beta)
        w = matvec(v) - beta * vecs[j - 1]
        alpha = float(np.real(np.vdot(v, w)))
        alphas.append(alpha)
        w = w - alpha * v
    residual = float(np.linalg.norm(w))
    return np.array(alphas), np.array(betas), vecs[:max_dim], residual


def _krylov_step(matvec, psi: np.ndarray, dt: float, max_dim: int, tol: float):
    """Attempt exp(-i H dt) psi in one Krylov space; returns (state, error_ok)."""
    nrm = float(np.linalg.norm(psi))
    alphas, betas, vecs, residual = _lanczos(matvec, psi / nrm, max_dim)
    k = alphas.shape[0]
    tri = np.diag(alphas).astype(np.complex128)
    if k > 1:
        tri += np.diag(betas, 1) + np.diag(betas, -1)
    small = expm(-1j * dt * tri)[:, 0]
    new = nrm * (small @ vecs)
    if residual == 0.0:
        return new, True
    # A-posteriori estimate: weight the step leaves on the last basis vector
    # times the coupling out of the subspace.
    est = residual * abs(small[-1])
    return new, est <= tol


def exact_propagate(
    hamiltonian,
    state: StateVector,
    t: float,
    method: str = "auto",
    dense_dim_max: int = DENSE_DIM_MAX,
    krylov_dim: int = KRYLOV_DIM,
    tol: float = KRYLOV_TOL,
) -> StateVector:
    """Apply ``exp(-i H t)`` to a state.

    `method` is ``"auto"`` (dense up to `dense_dim_max`, Krylov beyond),
    ``"dense"``, or ``"krylov"``.  The generator must be Hermitian; this is
    checked before any work is done.
    """
    matrix = _as_matrix(hamiltonian)
    if matrix.shape[0] != state.basis.dim:
        raise ValueError(
            f"generator dim {matrix.shape[0]} does not match state dim {state.basis.dim}"
        )
    _check_hermitian(matrix)
    if t == 0.0:
        return state.copy()
    if method == "auto":
        method = "dense" if matrix.shape[0] <= dense_dim_max else "krylov"
    if method == "dense":
        dense = matrix.toarray() if hasattr(matrix, "toarray") else np.asarray(matrix)
        evals, evecs = eigh(dense)
        rotated = evecs.conj().T @ state.amplitudes
        new = evecs @ (np.exp(-1j * evals * t) * rotated)
        return StateVector(state.basis, new, copy=False)
    if method == "krylov":
        return _krylov_propagate(matrix, state, t, krylov_dim, tol)
    raise ValueError(f"unknown method {method!r}")


def _krylov_propagate(matrix, state, t, krylov_dim, tol):
    matvec = lambda v: matrix @ v
    psi = state.amplitudes.copy()
    remaining = float(t)
    sign = 1.0 if remaining >= 0 else -1.0
    remaining = abs(remaining)
    dt = min(remaining, 1.0)
    min_dt = remaining * 1e-12
    while remaining > 0.0:
        step = min(dt, remaining)
        new, ok = _krylov_step(matvec, psi, sign * step, krylov_dim, tol)
        if not ok:
            if step <= min_dt:
                raise KrylovError(
                    f"Krylov residual test failed at dt={step:.3e}; "
                    f"generator may be ill-conditioned"
                )
            dt = step / 2.0
            continue
        psi = new
        remaining -= step
        dt = step * 1.5
    return StateVector(state.basis, psi, copy=False)


def exact_trajectory(
    hamiltonian,
    initial: StateVector,
    times,
    method: str = "auto",
    dense_dim_max: int = DENSE_DIM_MAX,
) -> Trajectory:
    """Exact snapshots at the given strictly increasing times (starting point included).

    On the dense path the generator is diagonalized once and reused for every
    snapshot; on the Krylov path the state is stepped between consecutive
    times.
    """
    times = [float(x) for x in times]
    if not times or times[0] != 0.0:
        times = [0.0] + times
    matrix = _as_matrix(hamiltonian)
    _check_hermitian(matrix)
    snaps = [Snapshot(0.0, 0, -1, -1, initial.copy())]
    use_dense = method == "dense" or (
        method == "auto" and matrix.shape[0] <= dense_dim_max
    )
    if use_dense:
        dense = matrix.toarray() if hasattr(matrix, "toarray") else np.asarray(matrix)
        evals, evecs = eigh(dense)
        rotated = evecs.conj().T @ initial.amplitudes
        for k, t in enumerate(times[1:], start=1):
            amps = evecs @ (np.exp(-1j * evals * t) * rotated)
            snaps.append(
                Snapshot(t, k, -1, -1, StateVector(initial.basis, amps, copy=False))
            )
    else:
        current = initial
        for k, t in enumerate(times[1:], start=1):
            current = exact_propagate(
                hamiltonian, current, t - times[k - 1], method="krylov"
            )
            snaps.append(Snapshot(t, k, -1, -1, current.copy()))
    return Trajectory("exact", snaps)


def fidelity(a: StateVector, b: StateVector) -> float:
    """Squared overlap ``|<a|b>|**2``."""
    return abs(a.inner(b)) ** 2


def trotter_error_norm(
    graph: LatticeGraph,
    mu: float,
    U: float,
    basis: FockBasis,
    dense_dim_max: int = DENSE_DIM_MAX,
) -> float:
    """Spectral norm of (one emulated iteration) - (exact one-unit propagator).

    The emulated iteration is the fast-mode unitary: the per-edge couplings in
    canonical order followed by the diagonal mu/U phase.  Dense propagators
    are materialized, so the basis must be desk scale.
    """
    from .device import iteration_unitary  # local import to avoid a cycle

    if basis.dim > dense_dim_max:
        raise ResourceCapError(
            f"basis dim {basis.dim} exceeds dense comparison cap {dense_dim_max}"
        )
    emulated = iteration_unitary(basis, compile_schedule(graph), mu, U)
    h = build_hamiltonian(basis, graph, mu, U).to_dense()
    evals, evecs = eigh(h)
    exact = (evecs * np.exp(-1j * evals)) @ evecs.conj().T
    return spectral_norm(emulated - exact)
