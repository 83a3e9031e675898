"""Correlation and coherence measures on bipartite density matrices.

Mutual information, classical correlation and quantum discord follow the
usual entropic definitions with measurements on one side; the classical
correlation is maximized over projective bases (or, optionally, POVMs
realized as projective measurements on a dilated space) by derivative-free
polishing of Haar-random starting bases.  All entropic quantities are in
bits.

The coherence measures (relative entropy of coherence, l1 norm, skew
information) refer to the S^z product basis, the global incoherent
reference basis of the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import cue, kernels
from .linalg import (matrix_sqrt_psd, partial_trace, tensor_product,
                     von_neumann_entropy, entropy_of_probabilities)
from .models import spin1_operators

ZERO_PROBABILITY = 1e-14


def mutual_information(rho_ab: np.ndarray, dims: tuple[int, int] = (3, 3)) -> float:
    """S(rho_A) + S(rho_B) - S(rho_AB) in bits."""
    rho_a = partial_trace(rho_ab, dims, trace_out="B")
    rho_b = partial_trace(rho_ab, dims, trace_out="A")
    return (von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b)
            - von_neumann_entropy(rho_ab))


def conditional_state(rho_ab: np.ndarray, projector: np.ndarray,
                      dims: tuple[int, int] = (3, 3)):
    """Outcome probability and post-measurement state of side A.

    The measurement operator acts on side B.  Returns ``(p, rho_a)``;
    when ``p`` is below 1e-14 the state is returned as ``None`` and must be
    excluded from conditional-entropy sums.
    """
    da, db = dims
    op = tensor_product(np.eye(da), projector)
    selected = op @ np.asarray(rho_ab, dtype=complex) @ op
    p = float(np.trace(selected).real)
    if p < ZERO_PROBABILITY:
        return p, None
    rho_a = partial_trace(selected, dims, trace_out="B") / p
    return p, 0.5 * (rho_a + rho_a.conj().T)


@dataclass(frozen=True)
class DiscordConfig:
    """Settings of the measurement optimization.

    ``restarts`` Haar-random starting bases are each polished with
    Nelder-Mead over the Euler-angle parametrization; the best classical
    correlation wins, ties resolved by restart index.  ``mode="povm"``
    optimizes over ``povm_outcomes``-outcome measurements realized as
    rank-d projective measurements on the dilated space.
    """
    restarts: int = 50
    polish_max_iter: int = 1200
    polish_tol: float = 1e-8
    measurement_side: str = "B"
    mode: str = "projective"
    povm_outcomes: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.polish_tol <= 0:
            raise ValueError("polish_tol must be positive")
        if self.measurement_side not in ("A", "B"):
            raise ValueError("measurement_side must be 'A' or 'B'")
        if self.mode not in ("projective", "povm"):
            raise ValueError("mode must be 'projective' or 'povm'")


@dataclass(frozen=True)
class DiscordResult:
    discord: float
    classical_correlation: float
    mutual_information: float
    optimal_basis: object
    restarts_within_tol: int


def _projective_dilation_prefix(dim: int, outcomes: int,
                                rng: np.random.Generator,
                                basis: np.ndarray | None = None) -> np.ndarray:
    """Measurement unitary on the dilated space whose column groups
    reproduce a projective basis (Haar random unless given), padded with
    zero POVM elements up to the outcome count.

    Group ``a`` of ``dim`` consecutive columns must span the dilated
    projector Q_a; those are the columns of U^dag at ancilla index ``a``,
    so the dilation unitary comes back adjoint with columns reordered from
    ancilla-fast to outcome-major.
    """
    u = cue.sample_cue(dim, rng) if basis is None else basis
    elements = [np.outer(u[:, k], u[:, k].conj()) for k in range(dim)]
    elements += [np.zeros((dim, dim), dtype=complex)] * (outcomes - dim)
    seed = int(rng.integers(0, 2 ** 31))
    dil = cue.naimark_dilation(cue.Povm(dim=dim, elements=elements),
                               completion_seed=seed)
    perm = [i * outcomes + a for a in range(outcomes) for i in range(dim)]
    return np.ascontiguousarray(dil.unitary_u.conj().T[:, perm])


def _measured_problem(rho_ab: np.ndarray, dims: tuple[int, int],
                      cfg: DiscordConfig):
    """Reshape the state so the measured side is the fast slot of rho4."""
    da, db = dims
    rho4 = np.asarray(rho_ab, dtype=complex).reshape(da, db, da, db)
    if cfg.measurement_side == "A":
        rho4 = rho4.transpose(1, 0, 3, 2)
        da, db = db, da
    if da != 3:
        raise ValueError("the unmeasured side must be a qutrit")
    if cfg.mode == "povm":
        y = cfg.povm_outcomes
        anc = np.zeros((y, y), dtype=complex)
        anc[0, 0] = 1.0
        rho_flat = rho4.reshape(da * db, da * db)
        ext = np.kron(rho_flat, anc).reshape(da, db * y, da, db * y)
        return ext, db * y, y, db
    return rho4, db, db, 1


def classical_correlation(rho_ab: np.ndarray, dims: tuple[int, int] = (3, 3),
                          cfg: DiscordConfig | None = None):
    """Maximized S(rho_A) - sum_k p_k S(rho_{A|k}) over local measurements.

    Returns ``(value, basis, restarts_within_tol)`` where ``basis`` is the
    winning :class:`~spincoh.cue.MeasurementBasis` (projective mode) or
    :class:`~spincoh.cue.Povm`.  The value is a lower bound on the true
    maximum that tightens with more restarts.
    """
    cfg = cfg or DiscordConfig()
    dims = tuple(dims)
    rho4, nb, n_groups, group_size = _measured_problem(rho_ab, dims, cfg)
    trace_out = "B" if cfg.measurement_side == "B" else "A"
    rho_unmeasured = partial_trace(rho_ab, dims, trace_out=trace_out)
    s_unmeasured = von_neumann_entropy(rho_unmeasured)

    rho4 = np.ascontiguousarray(rho4)

    projective_best = None
    if cfg.mode == "povm":
        # The dilated measurement contains every projective one, so anchor
        # one restart at the dilation of the optimal projective basis; the
        # remaining restarts explore dilations of random bases.
        proj_cfg = DiscordConfig(restarts=cfg.restarts,
                                 polish_max_iter=cfg.polish_max_iter,
                                 polish_tol=cfg.polish_tol,
                                 measurement_side=cfg.measurement_side,
                                 seed=cfg.seed)
        _, proj_basis, _ = classical_correlation(rho_ab, dims, proj_cfg)
        projective_best = proj_basis.unitary

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best_val = np.inf
    best_x = None
    best_prefix = None
    values = []
    for index, child in enumerate(seeds):
        rng = np.random.default_rng(child)
        if cfg.mode == "projective":
            prefix = None
            x0 = cue.sample_euler_angles(nb, rng).x0
        else:
            # Polish around a dilated projective basis: angle zero
            # reproduces its statistics exactly, so POVM mode starts at
            # projective quality and explores from there.
            anchor = projective_best if index == 0 else None
            prefix = _projective_dilation_prefix(group_size, n_groups, rng,
                                                 basis=anchor)
            x0 = np.zeros(kernels.angle_count(nb))

        def objective(x, prefix=prefix):
            return kernels.avg_conditional_entropy(x, rho4, n_groups,
                                                   group_size, prefix)

        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxiter": cfg.polish_max_iter,
                                "fatol": cfg.polish_tol, "xatol": 1e-6})
        val = float(res.fun)
        values.append(val)
        if val < best_val:
            best_val = val
            best_x = res.x
            best_prefix = prefix
    within = int(sum(v <= best_val + cfg.polish_tol for v in values))
    value = s_unmeasured - best_val

    u = kernels.euler_unitary(nb, best_x)
    if best_prefix is not None:
        u = best_prefix @ u
    if cfg.mode == "projective":
        basis = cue.MeasurementBasis(dim=nb, unitary=u)
    else:
        y, gs = n_groups, group_size
        elements = []
        for g in range(y):
            p = np.zeros((gs, gs), dtype=complex)
            for t in range(g * gs, (g + 1) * gs):
                v = u[::y, t]
                p += np.outer(v, v.conj())
            elements.append(p)
        basis = cue.Povm(dim=gs, elements=elements)
    return value, basis, within


def quantum_discord(rho_ab: np.ndarray, dims: tuple[int, int] = (3, 3),
                    cfg: DiscordConfig | None = None) -> DiscordResult:
    """Mutual information minus the maximal classical correlation."""
    cfg = cfg or DiscordConfig()
    info = mutual_information(rho_ab, dims)
    value, basis, within = classical_correlation(rho_ab, dims, cfg)
    return DiscordResult(discord=info - value,
                         classical_correlation=value,
                         mutual_information=info,
                         optimal_basis=basis,
                         restarts_within_tol=within)


def basis_distance(t_before: np.ndarray, t_after: np.ndarray) -> float:
    """Distance between two measurement-basis fingerprints.

    Fingerprints are the |<m|u_k>|^2 overlap matrices; the distance is the
    max-abs difference minimized over outcome relabelings, so equivalent
    bases (outcome permutations, reference-diagonal phase rotations)
    compare as equal.
    """
    from itertools import permutations
    n = t_before.shape[1]
    best = np.inf
    for perm in permutations(range(n)):
        d = float(np.max(np.abs(t_before - t_after[:, list(perm)])))
        best = min(best, d)
    return best


# --- coherence measures ---------------------------------------------------

def rel_entropy_coherence(rho: np.ndarray) -> float:
    """S(rho_diag) - S(rho) in bits, in the fixed reference basis."""
    rho = np.asarray(rho)
    diag = np.real(np.diag(rho)).copy()
    return entropy_of_probabilities(diag) - von_neumann_entropy(rho)


def l1_coherence(rho: np.ndarray) -> float:
    """Sum of absolute values of all off-diagonal elements."""
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho)) - np.sum(np.abs(np.diag(rho))))


def skew_information(rho: np.ndarray, observable: np.ndarray) -> float:
    """-1/2 Tr [sqrt(rho), K]^2.

    Equals the variance of K for pure states and is bounded by it for mixed
    ones; vanishes iff sqrt(rho) commutes with K.
    """
    k = np.asarray(observable, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    root = matrix_sqrt_psd(rho)
    val = np.trace(rho @ k @ k).real - np.trace(root @ k @ root @ k).real
    return float(max(val, 0.0))


def variance(rho: np.ndarray, observable: np.ndarray) -> float:
    k = np.asarray(observable, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ k @ k).real - np.trace(rho @ k).real ** 2)


def local_observable(observable: np.ndarray, side: str = "B") -> np.ndarray:
    """Embed a single-site observable into the two-site space."""
    k = np.asarray(observable, dtype=complex)
    eye = np.eye(k.shape[0], dtype=complex)
    if side == "B":
        return tensor_product(eye, k)
    if side == "A":
        return tensor_product(k, eye)
    raise ValueError("side must be 'A' or 'B'")


def spin_observable(name: str) -> np.ndarray:
    """The spin-1 matrix named ``sx``, ``sy`` or ``sz``."""
    ops = spin1_operators()
    try:
        return {"sx": ops.sx, "sy": ops.sy, "sz": ops.sz}[name.lower()]
    except KeyError:
        raise ValueError(f"unknown observable {name!r}") from None
