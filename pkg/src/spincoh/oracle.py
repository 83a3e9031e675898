"""Reference implementations: small-chain exact diagonalization, the
valence-bond two-site state, and a brute-force discord search.

These exist to validate the DMRG engine and the measurement optimizer, so
they deliberately share as little machinery as possible with them: the
Hamiltonian is applied bond by bond over the full 3^N product space, Haar
sampling goes through QR of Ginibre matrices rather than Euler angles, and
measured conditional entropies are evaluated with plain numpy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .lanczos import lanczos_ground
from .linalg import partial_trace, von_neumann_entropy
from .models import ModelSpec, bond_operator_from_terms

MAX_ED_SITES = 14


@dataclass
class EdResult:
    energy: float
    ground_vector: np.ndarray
    n_sites: int
    degeneracy_flag: bool
    gap: float
    residual: float
    parity_resolved: bool


def _site_digits(n_sites: int) -> np.ndarray:
    """Base-3 digits of every product state, shape (3^N, N)."""
    codes = np.arange(3 ** n_sites, dtype=np.int64)
    digits = np.empty((codes.size, n_sites), dtype=np.int8)
    for site in range(n_sites - 1, -1, -1):
        digits[:, site] = codes % 3
        codes = codes // 3
    return digits


def sector_indices(n_sites: int, target_sz: float) -> np.ndarray:
    """Product states with total S^z equal to ``target_sz`` (site m = 1 - digit)."""
    target = round(target_sz)
    if abs(target_sz - target) > 1e-9 or abs(target) > n_sites:
        raise ValueError(f"no S^z sector {target_sz} for {n_sites} sites")
    digitsum = _site_digits(n_sites).sum(axis=1, dtype=np.int64)
    return np.nonzero(digitsum == n_sites - target)[0]


def open_chain_matvec(spec: ModelSpec, n_sites: int):
    """Bond-by-bond application of the open-chain Hamiltonian on 3^N."""
    h = bond_operator_from_terms(spec)

    def matvec(x: np.ndarray) -> np.ndarray:
        y = np.zeros_like(x)
        for i in range(n_sites - 1):
            d1 = 3 ** i
            d2 = 3 ** (n_sites - 2 - i)
            xr = x.reshape(d1, 9, d2)
            y += np.tensordot(h, xr, axes=([1], [1])).transpose(1, 0, 2).reshape(y.shape)
        return y

    return matvec


def ed_ground_state(spec: ModelSpec, n_sites: int,
                    target_sz: float | None = None, *,
                    seed: int = 0,
                    lanczos_tol: float = 1e-11,
                    max_matvecs: int = 20000,
                    degeneracy_tol: float = 1e-8,
                    resolve_degeneracy: str | bool = "auto") -> EdResult:
    """Lowest eigenpair of the open chain, optionally sector restricted.

    Near-degenerate ground states (the valence-bond point, broken-symmetry
    phases) are resolved deterministically: the second state is converged by
    deflation and the returned vector is the even eigenvector of the global
    spin flip m -> -m within the degenerate pair.
    """
    if n_sites < 2:
        raise ValueError("need at least two sites")
    if n_sites > MAX_ED_SITES:
        raise ValueError(f"refusing n_sites={n_sites} > {MAX_ED_SITES}")
    full_dim = 3 ** n_sites
    full_matvec = open_chain_matvec(spec, n_sites)

    if target_sz is None:
        dim = full_dim
        matvec = full_matvec
        flip_closed = True
    else:
        idx = sector_indices(n_sites, target_sz)
        dim = idx.size
        scratch = np.zeros(full_dim)

        def matvec(x):
            scratch[idx] = x
            out = full_matvec(scratch)[idx]
            scratch[idx] = 0.0
            return out

        flip_closed = round(target_sz) == 0

    rng = np.random.default_rng(seed)
    ground = lanczos_ground(matvec, dim, rng=rng, tol=lanczos_tol,
                            max_matvecs=max_matvecs)
    if not ground.converged:
        raise RuntimeError(
            f"ED Lanczos did not converge: residual {ground.residual:.3e}")

    # The global spin flip reverses base-3 codes, so within the full space
    # or the S^z=0 sector it is plain index reversal.
    gap = ground.ritz_gap
    vec = ground.vector
    parity_resolved = False
    want_resolve = (resolve_degeneracy is True
                    or (resolve_degeneracy == "auto" and gap < 1e-6))
    if want_resolve and flip_closed and dim >= 2:
        second = lanczos_ground(matvec, dim, rng=rng, tol=max(lanczos_tol, 1e-10),
                                max_matvecs=max_matvecs,
                                deflate=[ground.vector])
        gap = second.value - ground.value
        if abs(gap) < degeneracy_tol * max(1.0, abs(ground.value)):
            vec = _even_flip_combination(ground.vector, second.vector)
            parity_resolved = True

    if target_sz is not None:
        full = np.zeros(full_dim)
        full[idx] = vec
        vec = full
    return EdResult(energy=ground.value,
                    ground_vector=vec.astype(complex),
                    n_sites=n_sites,
                    degeneracy_flag=bool(gap < 1e-10),
                    gap=float(gap),
                    residual=ground.residual,
                    parity_resolved=parity_resolved)


def _even_flip_combination(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Even-parity combination of two degenerate ground vectors."""
    fv1 = v1[::-1]
    fv2 = v2[::-1]
    fmat = np.array([[np.dot(v1, fv1), np.dot(v1, fv2)],
                     [np.dot(v2, fv1), np.dot(v2, fv2)]])
    fmat = 0.5 * (fmat + fmat.T)
    w, u = np.linalg.eigh(fmat)
    col = int(np.argmin(np.abs(w - 1.0)))
    vec = u[0, col] * v1 + u[1, col] * v2
    return vec / np.linalg.norm(vec)


def rdm_from_vector(v: np.ndarray, sites: list[int],
                    n_sites: int | None = None) -> np.ndarray:
    """Reduced density matrix of the listed sites of a chain state.

    Site order in ``sites`` sets the tensor order of the output (first
    listed site is the slow index).
    """
    v = np.asarray(v)
    if n_sites is None:
        n_sites = round(np.log(v.size) / np.log(3))
    if 3 ** n_sites != v.size:
        raise ValueError("vector length is not a power of 3")
    sites = list(sites)
    if len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct")
    if any(s < 0 or s >= n_sites for s in sites):
        raise ValueError("site index out of range")
    if len(sites) > 4:
        raise ValueError("refusing reduced state on more than 4 sites")
    tensor = v.reshape((3,) * n_sites)
    moved = np.moveaxis(tensor, sites, range(len(sites)))
    mat = moved.reshape(3 ** len(sites), -1)
    rho = mat @ mat.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def ed_point(spec: ModelSpec, n_sites: int, target_sz: float | None = 0.0,
             seed: int = 0, lanczos_tol: float = 1e-11):
    """Ground state plus the central two-site and one-site reduced states."""
    res = ed_ground_state(spec, n_sites, target_sz, seed=seed,
                          lanczos_tol=lanczos_tol)
    center = n_sites // 2 - 1
    rho2 = rdm_from_vector(res.ground_vector, [center, center + 1], n_sites)
    rho1 = rdm_from_vector(res.ground_vector, [center], n_sites)
    return res, rho2, rho1


# --- valence-bond (AKLT) two-site oracle ----------------------------------

AKLT_THETA = float(np.arctan(1.0 / 3.0))


def aklt_two_site_rdm() -> np.ndarray:
    """Bulk two-site reduced state of the valence-bond ground state.

    Built directly from the chi=2 matrix-product tensors with identity left
    environment and maximally mixed right environment (the transfer-matrix
    fixed points), entirely independent of any chain diagonalization.
    """
    a = np.zeros((3, 2, 2))
    a[0] = np.sqrt(2.0 / 3.0) * np.array([[0.0, 1.0], [0.0, 0.0]])
    a[1] = np.sqrt(1.0 / 3.0) * np.array([[-1.0, 0.0], [0.0, 1.0]])
    a[2] = -np.sqrt(2.0 / 3.0) * np.array([[0.0, 0.0], [1.0, 0.0]])
    renv = 0.5 * np.eye(2)
    rho = np.zeros((9, 9))
    for m1 in range(3):
        for m2 in range(3):
            bm = a[m1] @ a[m2]
            for n1 in range(3):
                for n2 in range(3):
                    bn = a[n1] @ a[n2]
                    rho[m1 * 3 + m2, n1 * 3 + n2] = np.trace(bm @ renv @ bn.T)
    return rho.astype(complex)


# --- brute-force discord ---------------------------------------------------

def _haar_batch(batch: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitaries via QR of Ginibre matrices, shape (batch, dim, dim)."""
    g = rng.normal(size=(batch, dim, dim)) + 1j * rng.normal(size=(batch, dim, dim))
    q, r = np.linalg.qr(g)
    d = np.einsum("bii->bi", r)
    return q * (d / np.abs(d))[:, None, :]


def _entropy_bits_batch(mats: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(mats)
    w = np.clip(w, 0.0, None)
    logs = np.log(np.maximum(w, 1e-300))
    terms = np.where(w > 1e-12, w * logs, 0.0)
    return -terms.sum(axis=-1) / np.log(2.0)


def _classical_corr_batch(rho4: np.ndarray, s_a: float,
                          us: np.ndarray) -> np.ndarray:
    """Classical correlation of each basis in a stack of unitaries."""
    nb = us.shape[1]
    cond = np.zeros(us.shape[0])
    for k in range(nb):
        w = us[:, :, k]
        m = np.einsum("bj,ijkl,bl->bik", w.conj(), rho4, w)
        p = np.einsum("bii->b", m).real
        safe = np.maximum(p, 1e-300)
        ent = _entropy_bits_batch(m / safe[:, None, None])
        cond += np.where(p > 1e-14, p * ent, 0.0)
    return s_a - cond


def brute_force_discord(rho_ab: np.ndarray, samples: int = 10000,
                        polish_iters: int = 400, seed: int = 0,
                        polish_top: int = 10) -> float:
    """Upper bound on the discord from dense random basis search.

    ``samples`` Haar-random projective bases on side B are scored directly;
    the best ``polish_top`` are refined with Nelder-Mead over a Hermitian
    generator exp(iH) applied to the basis.  Decreases (statistically) with
    more samples.
    """
    rho = np.asarray(rho_ab, dtype=complex)
    if rho.shape != (9, 9):
        raise ValueError("expected a two-qutrit state")
    rho4 = rho.reshape(3, 3, 3, 3)
    s_a = von_neumann_entropy(partial_trace(rho, (3, 3), trace_out="B"))
    info = (s_a + von_neumann_entropy(partial_trace(rho, (3, 3), trace_out="A"))
            - von_neumann_entropy(rho))

    rng = np.random.default_rng(seed)
    batch = 512
    best_vals = []
    best_us = []
    done = 0
    while done < samples:
        take = min(batch, samples - done)
        us = _haar_batch(batch, 3, rng)[:take]
        vals = _classical_corr_batch(rho4, s_a, us)
        order = np.argsort(vals)[::-1][:polish_top]
        for i in order:
            best_vals.append(float(vals[i]))
            best_us.append(us[i])
        done += take
    order = np.argsort(best_vals)[::-1][:polish_top]
    candidates = [(best_vals[i], best_us[i]) for i in order]

    def value_of(u):
        return float(_classical_corr_batch(rho4, s_a, u[None])[0])

    best = max(v for v, _ in candidates)
    for val0, u0 in candidates:
        def neg(theta, u0=u0):
            herm = np.zeros((3, 3), dtype=complex)
            herm[np.diag_indices(3)] = theta[:3]
            iu = np.triu_indices(3, 1)
            herm[iu] = theta[3:6] + 1j * theta[6:9]
            herm += np.triu(herm, 1).conj().T
            w, v = np.linalg.eigh(herm)
            rot = (v * np.exp(1j * w)) @ v.conj().T
            return -value_of(u0 @ rot)

        res = minimize(neg, np.zeros(9), method="Nelder-Mead",
                       options={"maxiter": polish_iters, "fatol": 1e-10,
                                "xatol": 1e-7})
        best = max(best, -float(res.fun))
    return info - best
