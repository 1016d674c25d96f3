"""Dense Hermitian eigenvalues by cyclic Jacobi.

One kernel, written in plain loops so it can be compiled by numba when that
is available and still run (slowly) without it.  Capacity is 1024 x 1024;
convergence is declared when the off-diagonal Frobenius norm falls below
1e-12 relative to the matrix scale.
"""

from __future__ import annotations

import numpy as np

from .errors import InvariantError

__all__ = ["hermitian_eigenvalues", "MAX_DIMENSION"]

MAX_DIMENSION = 1024
_OFF_NORM_TOL = 1e-12
_MAX_SWEEPS = 60


def _jacobi_kernel(a, tol, max_sweeps):
    # In-place cyclic Jacobi on a complex Hermitian matrix; returns the
    # number of sweeps used (max_sweeps + 1 signals no convergence).
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += abs(a[i, j]) ** 2
        if np.sqrt(2.0 * off) < tol:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * np.conj(phase) * aiq
                    a[i, q] = s * phase * aip + c * aiq
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * phase * aqi
                    a[q, i] = s * np.conj(phase) * api + c * aqi
    off = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            off += abs(a[i, j]) ** 2
    if np.sqrt(2.0 * off) < tol:
        return max_sweeps
    return max_sweeps + 1


try:
    from numba import njit

    _jacobi_kernel = njit(cache=True)(_jacobi_kernel)
except ImportError:   # pragma: no cover - exercised only without numba
    pass


def hermitian_eigenvalues(matrix: np.ndarray, *, hermitian_tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
        Hermitian input, n <= 1024.
    hermitian_tol : float
        Largest tolerated entrywise deviation from the conjugate transpose,
        relative to the matrix scale.

    Returns
    -------
    numpy.ndarray
        Real eigenvalues sorted from largest to smallest.

    Raises
    ------
    InvariantError
        If the input is not square/Hermitian or the sweep limit is hit.
    """
    a = np.asarray(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvariantError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_DIMENSION:
        raise InvariantError(f"dimension {n} exceeds capacity {MAX_DIMENSION}")
    scale = max(1.0, float(np.abs(a).max()) if n else 1.0)
    if float(np.abs(a - a.conj().T).max()) > hermitian_tol * scale:
        raise InvariantError("matrix is not Hermitian within tolerance")
    if n == 0:
        return np.empty(0)
    if n == 1:
        return np.array([a[0, 0].real])
    work = np.ascontiguousarray(a.copy())
    sweeps = _jacobi_kernel(work, _OFF_NORM_TOL * scale, _MAX_SWEEPS)
    if sweeps > _MAX_SWEEPS:
        raise InvariantError("Jacobi sweeps did not converge")
    vals = np.real(np.diag(work))
    return np.sort(vals)[::-1].copy()
