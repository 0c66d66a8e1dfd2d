"""Batched small dense linear algebra: Hermitian Jacobi eigenvalues and pivoted elimination.

All routines act on stacks of kappa x kappa matrices with shape ``(P, k, k)``;
the loops run over matrix entries while numpy vectorises over the stack.
"""

from __future__ import annotations

import numpy as np

__all__ = ["jacobi_eigvalsh", "lu_solve_det", "det"]


def jacobi_eigvalsh(M, tol: float = 1e-13, max_sweeps: int = 60, return_sweeps: bool = False):
    """Eigenvalues of a stack of Hermitian matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    M : array_like, shape (P, k, k) or (k, k)
        Hermitian matrices; only the Hermitian part is used.
    tol : float
        Stop once the off-diagonal Frobenius norm of every matrix is at most
        ``tol * max(1, ||M||_F)``.

    Returns
    -------
    w : ndarray, shape (P, k)
        Real eigenvalues sorted ascending.
    """
    A = np.array(M, dtype=complex)
    single = A.ndim == 2
    if single:
        A = A[None]
    A = 0.5 * (A + np.conj(np.swapaxes(A, -1, -2)))
    P, k, _ = A.shape
    scale = np.maximum(1.0, np.linalg.norm(A, axis=(1, 2)))
    offmask = ~np.eye(k, dtype=bool)
    sweeps = 0
    tiny = np.finfo(float).tiny
    for sweeps in range(1, max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(A[:, offmask]) ** 2, axis=1))
        if np.all(off <= tol * scale):
            sweeps -= 1
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = A[:, p, q]
                r = np.abs(apq)
                live = r > tiny
                phase = np.where(live, apq / np.where(live, r, 1.0), 1.0)
                theta = (A[:, q, q].real - A[:, p, p].real) / (2.0 * np.where(live, r, 1.0))
                sgn = np.where(theta >= 0, 1.0, -1.0)
                with np.errstate(over="ignore"):
                    # theta**2 may overflow for negligible apq; t -> 0 is then the right limit
                    t = sgn / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(live, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # unitary J = diag-phase(q) @ real rotation; A <- J^H A J zeroes A[p, q]
                J = np.broadcast_to(np.eye(k, dtype=complex), (P, k, k)).copy()
                J[:, p, p] = c
                J[:, p, q] = s
                J[:, q, p] = -s * np.conj(phase)
                J[:, q, q] = c * np.conj(phase)
                A = np.conj(np.swapaxes(J, -1, -2)) @ A @ J
    w = np.sort(np.real(np.diagonal(A, axis1=1, axis2=2)), axis=1)
    if single:
        w = w[0]
    if return_sweeps:
        return w, sweeps
    return w


def lu_solve_det(M, b):
    """Solve ``M x = b`` for a stack of matrices by Gaussian elimination with partial pivoting.

    Returns ``(x, det)``; ``det`` is the product of the pivots with the
    permutation sign, so ``|det|`` is available at no extra cost.  Singular
    systems give ``det == 0`` and non-finite entries in ``x``.
    """
    A = np.array(M, dtype=complex)
    x = np.array(b, dtype=complex)
    single = A.ndim == 2
    if single:
        A, x = A[None], x[None]
    P, k, _ = A.shape
    rows = np.arange(P)
    det = np.ones(P, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for col in range(k):
            piv = col + np.argmax(np.abs(A[:, col:, col]), axis=1)
            swap = piv != col
            if np.any(swap):
                r = rows[swap]
                pr = piv[swap]
                A[r, col], A[r, pr] = A[r, pr].copy(), A[r, col].copy()
                x[r, col], x[r, pr] = x[r, pr].copy(), x[r, col].copy()
                det[swap] = -det[swap]
            pivot = A[:, col, col]
            det *= pivot
            if col + 1 < k:
                factors = A[:, col + 1 :, col] / pivot[:, None]
                A[:, col + 1 :, :] -= factors[:, :, None] * A[:, col, None, :]
                x[:, col + 1 :] -= factors * x[:, col, None]
        for col in range(k - 1, -1, -1):
            x[:, col] = (x[:, col] - np.sum(A[:, col, col + 1 :] * x[:, col + 1 :], axis=1)) / A[:, col, col]
    if single:
        return x[0], det[0]
    return x, det


def det(M):
    """Determinant of a stack of matrices via :func:`lu_solve_det`."""
    M = np.asarray(M, dtype=complex)
    b = np.zeros(M.shape[:-1], dtype=complex)
    return lu_solve_det(M, b)[1]
