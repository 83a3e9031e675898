"""Haar-random unitaries via Euler angles, measurement bases, Naimark dilation.

Unitaries are assembled from two-plane rotations E^(i,j)(phi, psi, chi) whose
nonzero elements are E_ii = cos(phi) e^{i psi}, E_ij = sin(phi) e^{i chi},
E_ji = -sin(phi) e^{-i chi}, E_jj = cos(phi) e^{-i psi} plus ones on the rest
of the diagonal.  Drawing psi, chi and the global phase uniformly on
[0, 2*pi) and phi rows as arcsin(xi^(1/(2r+2))) with xi uniform on [0, 1)
makes the composed matrix Haar distributed on U(n); the Monte Carlo tests in
the suite are the acceptance arbiter for this construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .linalg import matrix_sqrt_psd

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class EulerAngleVector:
    """Angle vector parametrizing U(n).

    ``x0`` has ``2(n-1)^2 + n`` entries: the global phase alpha, the n-1
    chi angles, the (n-1)x(n-1) phi matrix (row-major) and the equally
    shaped psi matrix.
    """
    n: int
    x0: np.ndarray

    def __post_init__(self):
        expected = kernels.angle_count(self.n)
        if self.x0.shape != (expected,):
            raise ValueError(
                f"angle vector for n={self.n} must have {expected} entries")

    @property
    def alpha(self) -> float:
        return float(self.x0[0])

    @property
    def chi(self) -> np.ndarray:
        return self.x0[1:self.n]

    @property
    def phi(self) -> np.ndarray:
        nm1 = self.n - 1
        return self.x0[self.n:self.n + nm1 * nm1].reshape(nm1, nm1)

    @property
    def psi(self) -> np.ndarray:
        nm1 = self.n - 1
        return self.x0[self.n + nm1 * nm1:].reshape(nm1, nm1)

    def validate_ranges(self) -> None:
        tau = 2 * np.pi
        if not (0 <= self.alpha < tau):
            raise ValueError("alpha out of [0, 2*pi)")
        if np.any(self.chi < 0) or np.any(self.chi >= tau):
            raise ValueError("chi out of [0, 2*pi)")
        if np.any(self.psi < 0) or np.any(self.psi >= tau):
            raise ValueError("psi out of [0, 2*pi)")
        if np.any(self.phi < 0) or np.any(self.phi > np.pi / 2):
            raise ValueError("phi out of [0, pi/2]")


def unitary_from_angles(angles: EulerAngleVector) -> np.ndarray:
    """Compose the U(n) matrix encoded by an Euler-angle vector."""
    return kernels.euler_unitary(angles.n, angles.x0)


def sample_euler_angles(n: int, rng: np.random.Generator) -> EulerAngleVector:
    """Draw the angle vector of a Haar-distributed unitary."""
    nm1 = n - 1
    x0 = np.empty(kernels.angle_count(n))
    x0[0] = rng.uniform(0.0, 2 * np.pi)
    x0[1:n] = rng.uniform(0.0, 2 * np.pi, size=nm1)
    xi = rng.uniform(0.0, 1.0, size=(nm1, nm1))
    rows = np.arange(nm1, dtype=float)[:, None]
    phi = np.arcsin(xi ** (1.0 / (2.0 * rows + 2.0)))
    x0[n:n + nm1 * nm1] = phi.ravel()
    x0[n + nm1 * nm1:] = rng.uniform(0.0, 2 * np.pi, size=nm1 * nm1)
    return EulerAngleVector(n=n, x0=x0)


def sample_cue(n: int, seed) -> np.ndarray:
    """Haar-random n x n unitary; ``seed`` is an int or a Generator."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return unitary_from_angles(sample_euler_angles(n, rng))


@dataclass(frozen=True)
class MeasurementBasis:
    """Rank-1 projective measurement from the columns of a unitary."""
    dim: int
    unitary: np.ndarray

    @property
    def projectors(self) -> list[np.ndarray]:
        cols = [self.unitary[:, k] for k in range(self.dim)]
        return [np.outer(c, c.conj()) for c in cols]

    def fingerprint(self) -> np.ndarray:
        """Overlap profile T[m, k] = |<m|u_k>|^2.

        Invariant under outcome phases and under rotations generated by the
        reference-basis diagonal, which makes it a stable label for the
        optimizing basis across a parameter sweep.
        """
        return np.abs(self.unitary) ** 2


def basis_from_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> MeasurementBasis:
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n) or np.max(np.abs(u.conj().T @ u - np.eye(n))) > tol:
        raise ValueError("input is not unitary within tolerance")
    return MeasurementBasis(dim=n, unitary=u)


@dataclass(frozen=True)
class Povm:
    """Positive operator valued measure: PSD elements summing to identity."""
    dim: int
    elements: list

    def validate(self, psd_tol: float = 1e-9, sum_tol: float = 1e-10) -> None:
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for p in self.elements:
            if p.shape != (self.dim, self.dim):
                raise ValueError("POVM element has wrong shape")
            if np.max(np.abs(p - p.conj().T)) > 1e-9:
                raise ValueError("POVM element not Hermitian")
            if np.linalg.eigvalsh(p)[0] < -psd_tol:
                raise ValueError("POVM element not PSD")
            total += p
        if np.max(np.abs(total - np.eye(self.dim))) > sum_tol:
            raise ValueError("POVM elements do not sum to identity")


@dataclass(frozen=True)
class NaimarkDilation:
    """Projective extension of a POVM on system (x) ancilla.

    ``isometry_a`` is A = sum_a sqrt(P_a) (x) |e_a>, ``unitary_u`` a unitary
    completion with U (I (x) |u>) = A, and ``projectors_q`` the projectors
    Q_a = U^dag (I (x) |e_a><e_a|) U.  Measuring {Q_a} on rho (x) |u><u|
    reproduces the POVM statistics exactly.
    """
    x: int
    y: int
    isometry_a: np.ndarray
    unitary_u: np.ndarray
    ancilla_u: np.ndarray
    projectors_q: list

    def extended_state(self, rho: np.ndarray) -> np.ndarray:
        anc = np.outer(self.ancilla_u, self.ancilla_u.conj())
        return np.kron(np.asarray(rho, dtype=complex), anc)


def naimark_dilation(povm: Povm, completion_seed: int = 0) -> NaimarkDilation:
    """Dilate a POVM to a projective measurement on system (x) ancilla.

    Only x of the x*y columns of U are fixed by U V = A; the remaining ones
    are completed deterministically (seeded) by orthonormalizing random
    vectors against the isometry.  Any completion leaves the measurement
    statistics on rho (x) |u><u| unchanged.
    """
    povm.validate()
    x = povm.dim
    y = len(povm.elements)
    xy = x * y
    a = np.zeros((xy, x), dtype=complex)
    for out, p in enumerate(povm.elements):
        root = matrix_sqrt_psd(p)
        # sqrt(P_a) (x) |e_a>: row (i, out) of the ancilla-fast layout
        a[out::y, :] += root
    if np.max(np.abs(a.conj().T @ a - np.eye(x))) > 1e-9:
        raise ValueError("dilation isometry failed A^dag A = I check")

    ancilla = np.zeros(y, dtype=complex)
    ancilla[0] = 1.0
    fixed_cols = [i * y for i in range(x)]  # columns selected by I (x) |e_0>

    u = np.zeros((xy, xy), dtype=complex)
    u[:, fixed_cols] = a
    rng = np.random.default_rng(completion_seed)
    free_cols = [c for c in range(xy) if c not in fixed_cols]
    basis = a.copy()
    for c in free_cols:
        for _ in range(5):
            v = rng.normal(size=xy) + 1j * rng.normal(size=xy)
            v -= basis @ (basis.conj().T @ v)
            v -= basis @ (basis.conj().T @ v)
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                break
        else:
            raise ValueError("unitary completion failed: rank deficiency")
        v /= norm
        u[:, c] = v
        basis = np.concatenate([basis, v[:, None]], axis=1)

    if np.max(np.abs(u.conj().T @ u - np.eye(xy))) > 1e-9:
        raise ValueError("unitary completion failed the unitarity check")

    projectors = []
    for out in range(y):
        sel = np.zeros((xy, xy), dtype=complex)
        idx = np.arange(x) * y + out
        sel[idx, idx] = 1.0
        projectors.append(u.conj().T @ sel @ u)

    return NaimarkDilation(x=x, y=y, isometry_a=a, unitary_u=u,
                           ancilla_u=ancilla, projectors_q=projectors)
