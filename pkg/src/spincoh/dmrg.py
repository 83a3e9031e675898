"""Infinite-system DMRG for spin-1 chains.

An open chain is grown two sites at a time: superblock = left block + free
site + free site + mirrored right block.  The interaction between the two
central sites always uses the exact 9x9 bond; the block-site bonds use the
renormalized edge-site operators carried by each block.  After every ground
state solve the enlarged block is truncated to the dominant eigenvectors of
its reduced density matrix and the left block is mirrored onto the right,
which is exact here because both bond operators are symmetric under site
exchange, term by term.

All block arithmetic is real float64: in the ladder-operator factorization
both model bonds have real coefficients, so superblock Hamiltonians are
real symmetric.  The public reduced density matrices are returned complex
to match the rest of the package.

Blocks carry the total-S^z quantum number of every basis state; the ground
state search runs inside one magnetization sector.  Blocks also carry the
renormalized global spin flip (m -> -m), used to pick a deterministic
representative when the final ground state is (numerically) degenerate:
the even-parity combination.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .lanczos import lanczos_ground
from .models import (SITE_FLIP, SITE_SZ, ModelSpec, bond_operator_from_terms,
                     bond_terms, site_operator)

IDENTITY3 = np.eye(3)


@dataclass
class Block:
    """One renormalized half-chain."""
    n_sites: int
    dim: int
    ham: np.ndarray
    edge_ops: dict
    sz: np.ndarray
    flip: np.ndarray


@dataclass(frozen=True)
class DmrgConfig:
    m: int = 100
    max_iterations: int = 400
    min_iterations: int = 0
    lanczos_tol: float = 1e-10
    lanczos_max_iter: int = 6000
    energy_convergence_tol: float = 1e-9
    consecutive_hits: int = 5
    target_sz: float | None = 0.0
    seed: int = 0
    auto_m: bool = False
    auto_m_max: int = 200
    auto_m_trunc_tol: float = 1e-6
    degeneracy_tol: float = 1e-8
    use_guess: bool = True
    checkpoint_path: str | None = None

    def __post_init__(self):
        if self.m < 3:
            raise ValueError("need m >= 3")
        if self.lanczos_tol <= 0 or self.energy_convergence_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class DmrgResult:
    energy_per_site: float
    rho_two_site: np.ndarray
    rho_one_site: np.ndarray
    truncation_errors: list
    iterations_used: int
    converged: bool
    energy_total: float
    energy_per_site_naive: float
    chain_length: int
    target_sz: float | None
    gap_estimate: float
    parity_resolved: bool
    energy_history: list = field(default_factory=list)


def single_site_block(spec: ModelSpec) -> Block:
    names = sorted({t.left for t in bond_terms(spec)}
                   | {t.right for t in bond_terms(spec)})
    return Block(n_sites=1, dim=3,
                 ham=np.zeros((3, 3)),
                 edge_ops={name: site_operator(name) for name in names},
                 sz=SITE_SZ.copy(),
                 flip=SITE_FLIP.copy())


def _enlarge(block: Block, spec: ModelSpec):
    """Block (x) one bare site: Hamiltonian, S^z labels, spin flip."""
    dim_e = block.dim * 3
    ham = np.kron(block.ham, IDENTITY3)
    for term in bond_terms(spec):
        ham += term.coeff * np.kron(block.edge_ops[term.left],
                                    site_operator(term.right))
    sz = np.add.outer(block.sz, SITE_SZ).ravel()
    flip = np.kron(block.flip, SITE_FLIP)
    return dim_e, ham, sz, flip


def _project_site_op(proj: np.ndarray, op3: np.ndarray) -> np.ndarray:
    """P^dag (I (x) op) P without materializing the Kronecker product."""
    m3, k = proj.shape
    p3 = proj.reshape(m3 // 3, 3, k)
    rotated = np.einsum("ts,msk->mtk", op3, p3).reshape(m3, k)
    return proj.T @ rotated


def truncate(block_rdm: np.ndarray, m: int, sz_labels: np.ndarray | None = None,
             *, multiplet_overflow: float = 0.1):
    """Projector onto the dominant reduced-density-matrix eigenvectors.

    Keeps the ``m`` largest-weight states.  A degenerate multiplet cut by
    the boundary is kept whole when that overflows ``m`` by at most the
    given fraction; otherwise the cut falls back to deterministic order
    (weight, then S^z label, then sector-internal index).  Returns
    ``(projector, truncation_error, kept_labels)``; the error is exactly 0
    when nothing is discarded.
    """
    rdm = np.asarray(block_rdm)
    dim = rdm.shape[0]
    if m >= dim:
        labels = None if sz_labels is None else np.asarray(sz_labels, dtype=np.int64)
        return np.eye(dim), 0.0, labels

    if sz_labels is None:
        w, v = np.linalg.eigh(np.real(0.5 * (rdm + rdm.conj().T)))
        candidates = [(float(w[i]), 0, i, v[:, i]) for i in range(dim)]
        have_labels = False
    else:
        candidates = []
        for label in np.unique(sz_labels):
            sidx = np.nonzero(sz_labels == label)[0]
            blockm = np.real(rdm[np.ix_(sidx, sidx)])
            w, v = np.linalg.eigh(0.5 * (blockm + blockm.T))
            for j in range(sidx.size):
                vec = np.zeros(dim)
                vec[sidx] = v[:, j]
                candidates.append((float(w[j]), int(label), j, vec))
        have_labels = True

    # Deterministic order: weight descending, then S^z label, then index.
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    weights = np.array([c[0] for c in candidates])

    keep = m
    # Extend across a degenerate multiplet at the cutoff when it fits.
    tol = 1e-12 + 1e-9 * abs(weights[m - 1])
    hi = m
    while hi < dim and abs(weights[hi] - weights[m - 1]) <= tol:
        hi += 1
    if hi > m and hi <= int(np.ceil(m * (1.0 + multiplet_overflow))):
        keep = hi

    proj = np.stack([candidates[i][3] for i in range(keep)], axis=1)
    error = float(min(1.0, max(0.0, 1.0 - weights[:keep].sum())))
    kept_labels = (np.array([candidates[i][1] for i in range(keep)],
                            dtype=np.int64) if have_labels else None)
    return proj, error, kept_labels


class _Superblock:
    """Ground-state problem for enlarged-left (x) enlarged-right."""

    def __init__(self, dim_le, ham_le, sz_le, flip_le,
                 dim_re, ham_re, sz_re, flip_re, spec, target_sz):
        self.dim_le = dim_le
        self.dim_re = dim_re
        self.ham_le = ham_le
        self.ham_re = ham_re
        self.flip_le = flip_le
        self.flip_re = flip_re
        self.h4 = bond_operator_from_terms(spec).reshape(3, 3, 3, 3)
        full = dim_le * dim_re
        if target_sz is None:
            self.ridx = None
            self.dim = full
        else:
            target = round(target_sz)
            total = np.add.outer(sz_le, sz_re).ravel()
            self.ridx = np.nonzero(total == target)[0]
            self.dim = self.ridx.size
            if self.dim == 0:
                raise ValueError(f"empty S^z={target} sector in superblock")
        self._scratch = np.zeros(full)

    def to_matrix(self, x: np.ndarray) -> np.ndarray:
        if self.ridx is None:
            return x.reshape(self.dim_le, self.dim_re)
        self._scratch[self.ridx] = x
        return self._scratch.reshape(self.dim_le, self.dim_re).copy()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        psi = self.to_matrix(x)
        out = self.ham_le @ psi
        out += psi @ self.ham_re
        p4 = psi.reshape(self.dim_le // 3, 3, self.dim_re // 3, 3)
        bond = np.tensordot(p4, self.h4, axes=([1, 3], [2, 3]))
        out += bond.transpose(0, 2, 1, 3).reshape(self.dim_le, self.dim_re)
        if self.ridx is None:
            return out.ravel()
        return out.ravel()[self.ridx]

    def flip_apply(self, x: np.ndarray) -> np.ndarray:
        psi = self.to_matrix(x)
        out = self.flip_le @ psi @ self.flip_re.T
        if self.ridx is None:
            return out.ravel()
        return out.ravel()[self.ridx]

    def restrict(self, full_vector: np.ndarray) -> np.ndarray:
        if self.ridx is None:
            return full_vector
        return full_vector[self.ridx]


def _rho_two_site(psi4: np.ndarray) -> np.ndarray:
    rho = np.einsum("aibj,akbl->ijkl", psi4, psi4).reshape(9, 9)
    rho = 0.5 * (rho + rho.T)
    return rho / np.trace(rho)


def _rho_one_site(psi4: np.ndarray) -> np.ndarray:
    rho = np.einsum("aibj,akbj->ik", psi4, psi4)
    rho = 0.5 * (rho + rho.T)
    return rho / np.trace(rho)


def grow_step(left: Block, right: Block, spec: ModelSpec, cfg: DmrgConfig,
              rng: np.random.Generator, guess: np.ndarray | None = None):
    """One growth iteration.

    Returns ``(left', right', energy, state, truncation_error)`` where
    ``state`` carries the superblock ground vector and solver diagnostics.
    ``truncation_error`` is 1 minus the kept reduced-density-matrix weight.
    """
    mirrored = right is left
    dim_le, ham_le, sz_le, flip_le = _enlarge(left, spec)
    if mirrored:
        dim_re, ham_re, sz_re, flip_re = dim_le, ham_le, sz_le, flip_le
    else:
        dim_re, ham_re, sz_re, flip_re = _enlarge(right, spec)

    sb = _Superblock(dim_le, ham_le, sz_le, flip_le,
                     dim_re, ham_re, sz_re, flip_re, spec, cfg.target_sz)

    v0 = None
    if guess is not None and guess.size == dim_le * dim_re:
        v0 = sb.restrict(guess.ravel())
        if np.linalg.norm(v0) < 1e-8:
            v0 = None
    ground = lanczos_ground(sb.matvec, sb.dim, v0=v0, rng=rng,
                            tol=cfg.lanczos_tol,
                            max_matvecs=cfg.lanczos_max_iter)
    if not ground.converged:
        raise RuntimeError(
            f"superblock Lanczos did not converge: residual {ground.residual:.3e}")

    psi = sb.to_matrix(ground.vector)

    rho_sys = psi @ psi.T
    proj, err, labels = truncate(rho_sys, cfg.m, sz_le if cfg.target_sz
                                 is not None else None)
    new_left = _renormalize(left, spec, proj, labels, ham_le, sz_le, flip_le)
    if mirrored:
        new_right = new_left
        err_right = err
    else:
        rho_env = psi.T @ psi
        proj_r, err_right, labels_r = truncate(
            rho_env, cfg.m, sz_re if cfg.target_sz is not None else None)
        new_right = _renormalize(right, spec, proj_r, labels_r,
                                 ham_re, sz_re, flip_re)

    state = _StepState(superblock=sb, psi=psi, energy=ground.value,
                       gap=ground.ritz_gap, residual=ground.residual,
                       matvecs=ground.matvecs, projector=proj)
    return new_left, new_right, ground.value, state, err


def _renormalize(block: Block, spec: ModelSpec, proj, labels,
                 ham_e, sz_e, flip_e) -> Block:
    if labels is None or len(labels) != proj.shape[1]:
        labels = np.rint(np.einsum("ik,i,ik->k", proj,
                                   sz_e.astype(float), proj)).astype(np.int64)
    new_ops = {name: _project_site_op(proj, site_operator(name))
               for name in block.edge_ops}
    return Block(n_sites=block.n_sites + 1,
                 dim=proj.shape[1],
                 ham=proj.T @ ham_e @ proj,
                 edge_ops=new_ops,
                 sz=labels,
                 flip=proj.T @ flip_e @ proj)


@dataclass
class _StepState:
    superblock: _Superblock
    psi: np.ndarray
    energy: float
    gap: float
    residual: float
    matvecs: int
    projector: np.ndarray

    def psi4(self) -> np.ndarray:
        dle, dre = self.psi.shape
        return self.psi.reshape(dle // 3, 3, dre // 3, 3)


def _resolve_parity(state: _StepState, cfg: DmrgConfig,
                    rng: np.random.Generator):
    """Replace a (numerically) degenerate ground vector by the even-parity
    combination under the global spin flip.  Returns (psi, gap, resolved)."""
    sb = state.superblock
    if cfg.target_sz is not None and round(cfg.target_sz) != 0:
        return state.psi, state.gap, False
    if sb.dim < 2:
        return state.psi, state.gap, False
    x1 = sb.restrict(state.psi.ravel()).copy()
    second = lanczos_ground(sb.matvec, sb.dim, rng=rng,
                            tol=max(cfg.lanczos_tol, 1e-9),
                            max_matvecs=cfg.lanczos_max_iter, deflate=[x1])
    gap = second.value - state.energy
    if abs(gap) >= cfg.degeneracy_tol * max(1.0, abs(state.energy)):
        return state.psi, gap, False
    x2 = second.vector
    f1 = sb.flip_apply(x1)
    f2 = sb.flip_apply(x2)
    fmat = np.array([[np.dot(x1, f1), np.dot(x1, f2)],
                     [np.dot(x2, f1), np.dot(x2, f2)]])
    fmat = 0.5 * (fmat + fmat.T)
    w, u = np.linalg.eigh(fmat)
    col = int(np.argmin(np.abs(w - 1.0)))
    combo = u[0, col] * x1 + u[1, col] * x2
    combo /= np.linalg.norm(combo)
    return sb.to_matrix(combo), gap, True


def dmrg_ground_state(spec: ModelSpec, cfg: DmrgConfig | None = None) -> DmrgResult:
    """Grow the chain to the bulk fixed point and return central reduced states.

    The loop ends when the two-site energy estimator (E_n - E_{n-1})/2 is
    stable to ``energy_convergence_tol`` for ``consecutive_hits`` steps in a
    row, or at ``max_iterations``; non-convergence is reported through the
    ``converged`` flag, not an exception.
    """
    cfg = cfg or DmrgConfig()
    rng = np.random.default_rng(cfg.seed)
    block = single_site_block(spec)
    m_current = cfg.m

    energies: list[float] = []
    e_sites: list[float] = []
    trunc_errors: list[float] = []
    guess = None
    hits = 0
    converged = False
    state = None
    iterations = 0

    for iteration in range(1, cfg.max_iterations + 1):
        iterations = iteration
        step_cfg = cfg if m_current == cfg.m else replace(cfg, m=m_current)
        block_new, _, energy, state, err = grow_step(
            block, block, spec, step_cfg, rng, guess=guess)
        energies.append(energy)
        trunc_errors.append(err)
        n_len = 2 * iteration + 2
        if len(energies) >= 2:
            e_sites.append(0.5 * (energies[-1] - energies[-2]))
        else:
            e_sites.append(energies[-1] / n_len)

        if cfg.auto_m and err > cfg.auto_m_trunc_tol and m_current < cfg.auto_m_max:
            m_current = min(cfg.auto_m_max, int(m_current * 1.5) + 1)

        if len(e_sites) >= 2:
            if abs(e_sites[-1] - e_sites[-2]) < cfg.energy_convergence_tol:
                hits += 1
            else:
                hits = 0
            # min_iterations pins a common chain length across sweep points,
            # which keeps finite-size bias smooth along a parameter scan
            if hits >= cfg.consecutive_hits and iteration >= cfg.min_iterations:
                converged = True

        if cfg.use_guess and state.psi.shape[0] == state.psi.shape[1]:
            rho2 = _rho_two_site(state.psi4())
            phi = np.linalg.eigh(rho2)[1][:, -1].reshape(3, 3)
            core = state.projector.T @ state.psi @ state.projector
            guess = np.einsum("ab,ij->aibj", core, phi).ravel()
        block = block_new

        if cfg.checkpoint_path:
            _write_checkpoint(cfg.checkpoint_path, spec, cfg, block,
                              iteration, energies, e_sites, trunc_errors)
        if converged:
            break

    # Resolve the representative of a (numerically) degenerate final ground
    # state deterministically; the guess-seeded solve makes the Ritz gap an
    # unreliable degeneracy probe, so always measure the true gap.
    psi_final, gap, parity_resolved = _resolve_parity(state, cfg, rng)

    dle, dre = psi_final.shape
    psi4 = psi_final.reshape(dle // 3, 3, dre // 3, 3)
    rho2 = _rho_two_site(psi4).astype(complex)
    rho1 = _rho_one_site(psi4).astype(complex)
    chain_length = 2 * iterations + 2

    return DmrgResult(
        energy_per_site=e_sites[-1],
        rho_two_site=rho2,
        rho_one_site=rho1,
        truncation_errors=trunc_errors,
        iterations_used=iterations,
        converged=converged,
        energy_total=energies[-1],
        energy_per_site_naive=energies[-1] / chain_length,
        chain_length=chain_length,
        target_sz=cfg.target_sz,
        gap_estimate=gap,
        parity_resolved=parity_resolved,
        energy_history=energies,
    )


# --- checkpointing ---------------------------------------------------------

CHECKPOINT_VERSION = 1


def _write_checkpoint(path, spec, cfg, block, iteration,
                      energies, e_sites, trunc_errors) -> None:
    names = sorted(block.edge_ops)
    np.savez(path,
             version=CHECKPOINT_VERSION,
             kind=spec.kind, delta=spec.delta, theta=spec.theta,
             iteration=iteration,
             energies=np.asarray(energies),
             e_sites=np.asarray(e_sites),
             trunc_errors=np.asarray(trunc_errors),
             block_n_sites=block.n_sites,
             block_dim=block.dim,
             block_ham=block.ham,
             block_sz=block.sz,
             block_flip=block.flip,
             edge_names=np.array(names),
             edge_ops=np.stack([block.edge_ops[n] for n in names]))


def load_checkpoint(path):
    """Read a growth checkpoint; returns (spec, block, history dict)."""
    data = np.load(path, allow_pickle=False)
    if int(data["version"]) != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {data['version']}")
    spec = ModelSpec(kind=str(data["kind"]), delta=float(data["delta"]),
                     theta=float(data["theta"]))
    names = [str(n) for n in data["edge_names"]]
    block = Block(n_sites=int(data["block_n_sites"]),
                  dim=int(data["block_dim"]),
                  ham=data["block_ham"],
                  edge_ops={n: data["edge_ops"][i] for i, n in enumerate(names)},
                  sz=data["block_sz"],
                  flip=data["block_flip"])
    history = {"iteration": int(data["iteration"]),
               "energies": data["energies"].tolist(),
               "e_sites": data["e_sites"].tolist(),
               "trunc_errors": data["trunc_errors"].tolist()}
    return spec, block, history
