"""Matrix-free Lanczos ground-state solver with full reorthogonalization.

Shared by the DMRG engine and the exact-diagonalization oracle.  All chain
Hamiltonians in this package are real symmetric in the working bases, so
vectors are float64 throughout.  The solver keeps the whole Krylov basis and
reorthogonalizes every step (robustness over speed; the spaces involved are
modest), restarts from the best Ritz vector when the basis hits its cap, and
injects a fresh random direction on breakdown.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal


@dataclass
class LanczosResult:
    value: float
    vector: np.ndarray
    residual: float
    matvecs: int
    converged: bool
    ritz_gap: float


def lanczos_ground(matvec, dim: int, *,
                   v0: np.ndarray | None = None,
                   rng: np.random.Generator | None = None,
                   tol: float = 1e-10,
                   max_matvecs: int = 6000,
                   max_basis: int = 250,
                   deflate: list[np.ndarray] | None = None,
                   max_restarts: int = 3,
                   stagnation_tol: float = 1e-6) -> LanczosResult:
    """Lowest eigenpair of a real symmetric operator given by ``matvec``.

    Convergence is declared when the Ritz residual estimate drops below
    ``tol * max(1, |value|)``.  ``deflate`` lists unit vectors the iteration
    is kept orthogonal to (used to reach the second eigenpair).

    Restarting from the best Ritz vector can stagnate on spectra with large
    exactly-degenerate clusters (the residual then measures the tiny energy
    spread mixed into the vector, not an error in the energy).  A run that
    stops improving across restart cycles is accepted once its residual is
    below ``stagnation_tol * max(1, |value|)``.
    """
    if dim < 1:
        raise ValueError("dimension must be positive")
    if rng is None:
        rng = np.random.default_rng(0)
    dmat = (np.stack(deflate, axis=0) if deflate else
            np.empty((0, dim)))

    def project_out(w, vmat, k):
        for _ in range(2):
            if dmat.shape[0]:
                w -= dmat.T @ (dmat @ w)
            if k:
                w -= vmat[:k].T @ (vmat[:k] @ w)
        return w

    if v0 is None:
        v0 = rng.standard_normal(dim)
    v0 = np.array(v0, dtype=float)

    if dim == 1 and not deflate:
        val = float(matvec(np.ones(1))[0])
        return LanczosResult(val, np.ones(1), 0.0, 1, True, np.inf)

    max_basis = min(max_basis, dim + 2)
    total_mv = 0
    restarts = 0
    best = None
    prev_cycle_resid = np.inf

    while total_mv < max_matvecs:
        vmat = np.empty((max_basis + 1, dim))
        v0 = project_out(v0, vmat, 0)
        norm = float(np.linalg.norm(v0))
        if norm < 1e-12:
            v0 = project_out(rng.standard_normal(dim), vmat, 0)
            norm = float(np.linalg.norm(v0))
        vmat[0] = v0 / norm
        alphas: list[float] = []
        betas: list[float] = []
        theta = np.inf
        gap = np.inf
        resid = np.inf
        evecs = None
        while total_mv < max_matvecs and len(alphas) < max_basis:
            k = len(alphas)
            w = matvec(vmat[k])
            total_mv += 1
            alphas.append(float(np.dot(vmat[k], w)))
            w = project_out(w, vmat, k + 1)
            beta = float(np.linalg.norm(w))

            if k >= 1:
                evals, evecs = eigh_tridiagonal(
                    np.asarray(alphas), np.asarray(betas),
                    select="i", select_range=(0, min(1, k)))
                theta = float(evals[0])
                gap = float(evals[1] - evals[0]) if len(evals) > 1 else np.inf
            else:
                theta = alphas[0]
                evecs = np.ones((1, 1))
                gap = np.inf
            resid = beta * abs(float(evecs[-1, 0]))
            if resid <= tol * max(1.0, abs(theta)):
                x = vmat[:k + 1].T @ evecs[:, 0]
                x /= np.linalg.norm(x)
                return LanczosResult(theta, x, resid, total_mv, True, gap)

            if beta < 1e-13:
                # Invariant subspace reached before convergence: inject a
                # fresh random direction to widen the Krylov space.
                if restarts >= max_restarts:
                    x = vmat[:k + 1].T @ evecs[:, 0]
                    x /= np.linalg.norm(x)
                    return LanczosResult(theta, x, resid, total_mv, False, gap)
                restarts += 1
                w = project_out(rng.standard_normal(dim), vmat, k + 1)
                beta = float(np.linalg.norm(w))
                if beta < 1e-13:
                    # Nothing left outside the explored subspace.
                    x = vmat[:k + 1].T @ evecs[:, 0]
                    x /= np.linalg.norm(x)
                    return LanczosResult(theta, x, resid, total_mv, True, gap)
            betas.append(beta)
            vmat[k + 1] = w / beta

        # Basis cap (or matvec budget) hit: restart from the Ritz vector.
        k = len(alphas)
        x = vmat[:k].T @ evecs[:, 0]
        x /= np.linalg.norm(x)
        rvec = matvec(x) - theta * x
        total_mv += 1
        resid = float(np.linalg.norm(rvec))
        converged = resid <= tol * max(1.0, abs(theta))
        if (not converged and resid > 0.5 * prev_cycle_resid
                and resid <= stagnation_tol * max(1.0, abs(theta))):
            converged = True
        best = LanczosResult(theta, x, resid, total_mv, converged, gap)
        if converged:
            return best
        prev_cycle_resid = resid
        v0 = x

    if best is None:
        raise RuntimeError("Lanczos made no progress within the matvec budget")
    return best


def lowest_two(matvec, dim: int, *,
               v0=None, rng=None, tol: float = 1e-10,
               max_matvecs: int = 6000, max_basis: int = 250):
    """Lowest eigenpair plus the next one (via deflation).

    Returns ``(ground, second)``; ``second`` is ``None`` when the space is
    one-dimensional.
    """
    ground = lanczos_ground(matvec, dim, v0=v0, rng=rng, tol=tol,
                            max_matvecs=max_matvecs, max_basis=max_basis)
    if dim < 2:
        return ground, None
    second = lanczos_ground(matvec, dim, rng=rng, tol=max(tol, 1e-9),
                            max_matvecs=max_matvecs, max_basis=max_basis,
                            deflate=[ground.vector])
    return ground, second
