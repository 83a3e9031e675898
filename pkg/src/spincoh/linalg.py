"""Dense linear algebra for small quantum states and operators.

Everything downstream (model bonds, measurement optimization, coherence
measures) works with plain ``numpy`` arrays.  The tensor-product index
convention is fixed globally: for a composite system the LEFT factor is the
slow index, i.e. the composite row index is ``i = i_left * dim_right +
i_right``.  ``tensor_product`` and ``partial_trace`` both follow it, as does
the superblock assembly in :mod:`spincoh.dmrg`.

Entropies are in bits (base-2 logarithm).
"""

from __future__ import annotations

import numpy as np

# Tolerances used when validating density matrices.
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
# Eigenvalues below this are treated as exact zeros inside entropies; the
# looser PSD_TOL is reserved for positivity checks so that roundoff in
# nearly-pure states does not trip them.
ENTROPY_EIG_CUTOFF = 1e-12

LOG2 = np.log(2.0)


def is_hermitian(mat: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return float(np.max(np.abs(mat - mat.conj().T))) <= tol


def validate_density_matrix(rho: np.ndarray,
                            herm_tol: float = HERMITICITY_TOL,
                            trace_tol: float = TRACE_TOL,
                            psd_tol: float = PSD_TOL) -> None:
    """Raise ``ValueError`` unless ``rho`` is a valid density matrix.

    Checks Hermiticity, unit trace and positive semidefiniteness, each at
    its own tolerance.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    dev = float(np.max(np.abs(rho - rho.conj().T)))
    if dev > herm_tol:
        raise ValueError(f"density matrix not Hermitian: max deviation {dev:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1")
    wmin = float(np.linalg.eigvalsh(rho)[0])
    if wmin < -psd_tol:
        raise ValueError(f"density matrix has negative eigenvalue {wmin:.3e}")


def eig_hermitian(mat: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as the columns of a unitary matrix.  Raises ``ValueError``
    for non-square or non-Hermitian input.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if not is_hermitian(mat, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(mat)
    return w, v


def matrix_sqrt_psd(rho: np.ndarray, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in ``[-psd_tol, 0)`` are clamped to zero before taking the
    root; anything below ``-psd_tol`` raises ``ValueError``.
    """
    w, v = eig_hermitian(rho)
    if w[0] < -psd_tol:
        raise ValueError(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def tensor_product(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor as the slow index."""
    return np.kron(np.asarray(m1), np.asarray(m2))


def partial_trace(rho: np.ndarray, dims: tuple[int, int],
                  trace_out: str = "B") -> np.ndarray:
    """Trace out one subsystem of a bipartite state.

    ``dims = (dA, dB)`` with the composite index ``i = iA * dB + iB``.
    ``trace_out`` selects the subsystem that is removed: ``"B"`` leaves a
    ``dA x dA`` state, ``"A"`` a ``dB x dB`` one.
    """
    rho = np.asarray(rho)
    da, db = dims
    if rho.shape != (da * db, da * db):
        raise ValueError(f"state of shape {rho.shape} does not factor as {da}x{db}")
    r4 = rho.reshape(da, db, da, db)
    if trace_out == "B":
        return np.einsum("ibjb->ij", r4)
    if trace_out == "A":
        return np.einsum("aiaj->ij", r4)
    raise ValueError(f"trace_out must be 'A' or 'B', got {trace_out!r}")


def entropy_of_probabilities(p: np.ndarray,
                             cutoff: float = ENTROPY_EIG_CUTOFF) -> float:
    """Shannon entropy in bits; values below ``cutoff`` count as zero."""
    p = np.asarray(p, dtype=float)
    p = p[p > cutoff]
    if p.size == 0:
        return 0.0
    return float(-np.sum(p * np.log(p)) / LOG2)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits, with the 0*log(0) = 0 convention."""
    w = np.linalg.eigvalsh(np.asarray(rho))
    return entropy_of_probabilities(w)


def random_density_matrix(dim: int, rng: np.random.Generator,
                          rank: int | None = None) -> np.ndarray:
    """Random mixed state from a normalized Wishart matrix G G^dag."""
    if rank is None:
        rank = dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    w = g @ g.conj().T
    w /= np.trace(w).real
    return 0.5 * (w + w.conj().T)


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^dim."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of the difference of two Hermitian matrices."""
    w = np.linalg.eigvalsh(np.asarray(rho) - np.asarray(sigma))
    return 0.5 * float(np.sum(np.abs(w)))
