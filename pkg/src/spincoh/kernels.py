"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The measurement-basis optimization evaluates its objective (average
conditional entropy after a local projective measurement) tens of thousands
of times per parameter point, on 3x3 and 9x9 matrices where Python/numpy
call overhead dominates.  Those kernels are compiled with ``numba.njit``
when available.

Set the environment variable ``SPINCOH_NO_NUMBA=1`` to force the pure-numpy
fallback path (also used automatically when numba is not importable).  Both
paths are exported unconditionally so tests and the benchmark in
``benchmarks/bench_kernels.py`` can compare them.
"""

from __future__ import annotations

import math
import os

import numpy as np

LOG2 = math.log(2.0)

_DISABLED = os.environ.get("SPINCOH_NO_NUMBA", "").strip() not in ("", "0")
try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # no-op decorator stand-in
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def angle_count(n: int) -> int:
    """Length of the angle vector parametrizing U(n): 2(n-1)^2 + n."""
    return 2 * (n - 1) * (n - 1) + n


def _euler_unitary_impl(n, x0):
    """Unitary from Euler angles via composed two-plane rotations.

    Layout of ``x0``: global phase alpha, then the n-1 chi angles, then the
    (n-1)x(n-1) phi matrix (row-major), then the (n-1)x(n-1) psi matrix.
    The composite rotation E_k touches the trailing k+1 coordinates; its
    factor of depth r acts in the (n-2-r, n-1-r) plane.
    """
    nm1 = n - 1
    alpha = x0[0]
    u = np.eye(n, dtype=np.complex128)
    for k in range(1, n):
        chi_k = x0[k]
        for r in range(k - 1, -1, -1):
            phi = x0[n + r * nm1 + (k - 1)]
            psi = x0[n + nm1 * nm1 + r * nm1 + (k - 1)]
            chi = chi_k if r == 0 else 0.0
            ci = n - 2 - r
            cj = n - 1 - r
            c = math.cos(phi)
            s = math.sin(phi)
            eii = c * complex(math.cos(psi), math.sin(psi))
            eij = s * complex(math.cos(chi), math.sin(chi))
            eji = -s * complex(math.cos(chi), -math.sin(chi))
            ejj = c * complex(math.cos(psi), -math.sin(psi))
            for row in range(n):
                a = u[row, ci]
                b = u[row, cj]
                u[row, ci] = a * eii + b * eji
                u[row, cj] = a * eij + b * ejj
    phase = complex(math.cos(alpha), math.sin(alpha))
    for row in range(n):
        for col in range(n):
            u[row, col] *= phase
    return u


def _eigvals3h_impl(m):
    """Eigenvalues of a 3x3 Hermitian matrix, ascending (closed form)."""
    a00 = m[0, 0].real
    a11 = m[1, 1].real
    a22 = m[2, 2].real
    a01 = m[0, 1]
    a02 = m[0, 2]
    a12 = m[1, 2]
    p1 = (a01.real * a01.real + a01.imag * a01.imag
          + a02.real * a02.real + a02.imag * a02.imag
          + a12.real * a12.real + a12.imag * a12.imag)
    if p1 <= 1e-30:
        w0 = min(a00, a11, a22)
        w2 = max(a00, a11, a22)
        w1 = a00 + a11 + a22 - w0 - w2
        return w0, w1, w2
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b00 = (a00 - q) / p
    b11 = (a11 - q) / p
    b22 = (a22 - q) / p
    b01 = a01 / p
    b02 = a02 / p
    b12 = a12 / p
    det = (b00 * b11 * b22
           + 2.0 * (b01 * b12 * b02.conjugate()).real
           - b00 * (b12.real * b12.real + b12.imag * b12.imag)
           - b11 * (b02.real * b02.real + b02.imag * b02.imag)
           - b22 * (b01.real * b01.real + b01.imag * b01.imag))
    r = det / 2.0
    if r < -1.0:
        r = -1.0
    elif r > 1.0:
        r = 1.0
    phi = math.acos(r) / 3.0
    w2 = q + 2.0 * p * math.cos(phi)
    w0 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    w1 = 3.0 * q - w0 - w2
    return w0, w1, w2


def _avg_conditional_entropy_impl(x0, rho4, n_groups, group_size, prefix):
    """sum_k p_k S(rho_{A|k}) in bits for the basis prefix @ U(x0).

    ``rho4`` has shape (3, nb, 3, nb): a state of a qutrit A and a measured
    side of dimension nb.  Outcome k collects ``group_size`` consecutive
    columns of the measurement unitary as measurement vectors; ``prefix``
    lets the angles act relative to a fixed starting unitary.
    """
    nb = rho4.shape[1]
    u = prefix @ _euler_unitary_impl(nb, x0)
    total = 0.0
    m = np.empty((3, 3), dtype=np.complex128)
    for g in range(n_groups):
        for i in range(3):
            for k in range(3):
                m[i, k] = 0.0
        for t in range(g * group_size, (g + 1) * group_size):
            for i in range(3):
                for k in range(3):
                    acc = 0.0 + 0.0j
                    for j in range(nb):
                        rowacc = 0.0 + 0.0j
                        for l in range(nb):
                            rowacc += rho4[i, j, k, l] * u[l, t]
                        acc += u[j, t].conjugate() * rowacc
                    m[i, k] += acc
        p = (m[0, 0] + m[1, 1] + m[2, 2]).real
        if p > 1e-14:
            w0, w1, w2 = _eigvals3h_impl(m)
            s = 0.0
            for w in (w0 / p, w1 / p, w2 / p):
                if w > 1e-12:
                    s -= w * math.log(w)
            total += p * (s / LOG2)
    return total


# --- pure numpy path ------------------------------------------------------

def euler_unitary_numpy(n: int, x0: np.ndarray) -> np.ndarray:
    return _euler_unitary_impl(int(n), np.asarray(x0, dtype=float))


def avg_conditional_entropy_numpy(x0: np.ndarray, rho4: np.ndarray,
                                  n_groups: int, group_size: int,
                                  prefix: np.ndarray | None = None) -> float:
    """Vectorized numpy twin of the conditional-entropy objective."""
    nb = rho4.shape[1]
    u = euler_unitary_numpy(nb, np.asarray(x0, dtype=float))
    if prefix is not None:
        u = prefix @ u
    half = np.einsum("ijkl,lt->ijkt", rho4, u)
    per_col = np.einsum("jt,ijkt->tik", u.conj(), half)
    ms = per_col.reshape(n_groups, group_size, 3, 3).sum(axis=1)
    ps = np.einsum("gii->g", ms).real
    total = 0.0
    for g in range(n_groups):
        p = ps[g]
        if p > 1e-14:
            w = np.linalg.eigvalsh(ms[g] / p)
            w = w[w > 1e-12]
            total += p * float(-(w * np.log(w)).sum() / LOG2)
    return total


# --- compiled path --------------------------------------------------------

if HAVE_NUMBA:
    _euler_unitary_nb = njit(cache=True)(_euler_unitary_impl)
    _eigvals3h_nb = njit(cache=True)(_eigvals3h_impl)

    @njit(cache=True)
    def _avg_cond_entropy_nb(x0, rho4, n_groups, group_size, prefix):
        nb = rho4.shape[1]
        u = prefix @ _euler_unitary_nb(nb, x0)
        total = 0.0
        m = np.empty((3, 3), dtype=np.complex128)
        for g in range(n_groups):
            for i in range(3):
                for k in range(3):
                    m[i, k] = 0.0
            for t in range(g * group_size, (g + 1) * group_size):
                for i in range(3):
                    for k in range(3):
                        acc = 0.0 + 0.0j
                        for j in range(nb):
                            rowacc = 0.0 + 0.0j
                            for l in range(nb):
                                rowacc += rho4[i, j, k, l] * u[l, t]
                            acc += np.conj(u[j, t]) * rowacc
                        m[i, k] += acc
            p = (m[0, 0] + m[1, 1] + m[2, 2]).real
            if p > 1e-14:
                w0, w1, w2 = _eigvals3h_nb(m)
                s = 0.0
                for w in (w0 / p, w1 / p, w2 / p):
                    if w > 1e-12:
                        s -= w * math.log(w)
                total += p * (s / LOG2)
        return total

    def euler_unitary_numba(n: int, x0: np.ndarray) -> np.ndarray:
        return _euler_unitary_nb(int(n), np.ascontiguousarray(x0, dtype=np.float64))

    def avg_conditional_entropy_numba(x0, rho4, n_groups, group_size,
                                      prefix=None) -> float:
        nb = rho4.shape[1]
        if prefix is None:
            prefix = np.eye(nb, dtype=np.complex128)
        return float(_avg_cond_entropy_nb(
            np.ascontiguousarray(x0, dtype=np.float64),
            np.ascontiguousarray(rho4, dtype=np.complex128),
            int(n_groups), int(group_size),
            np.ascontiguousarray(prefix, dtype=np.complex128)))

    euler_unitary = euler_unitary_numba
    avg_conditional_entropy = avg_conditional_entropy_numba
else:
    euler_unitary_numba = None
    avg_conditional_entropy_numba = None
    euler_unitary = euler_unitary_numpy
    avg_conditional_entropy = avg_conditional_entropy_numpy
