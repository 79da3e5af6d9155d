"""Cyclic Jacobi eigenvalue iteration, batched over leading axes.

Kept free of LAPACK on purpose: the Bloch oracle uses it as a check that is
independent of the discriminant route.
"""
from __future__ import annotations

import numpy as np

from .errors import NumericalError

__all__ = ["jacobi_eigvalsh", "hermitian_eigvalsh"]


def _off_norm(S):
    n = S.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(S[..., mask] ** 2, axis=-1))


def jacobi_eigvalsh(S, tol=1e-12, max_sweeps=60):
    """Sorted eigenvalues of real symmetric matrices ``S`` with shape (..., n, n).

    Sweeps rotate every (p, r) pair of every matrix in the batch at once and
    stop when each off-diagonal Frobenius norm is below ``tol * ||S||_F``.
    """
    S = np.array(S, dtype=float, copy=True)
    batch_shape = S.shape[:-2]
    n = S.shape[-1]
    S = S.reshape((-1, n, n))
    target = tol * np.maximum(np.sqrt(np.sum(S ** 2, axis=(-2, -1))), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        if np.all(_off_norm(S) <= target):
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = S[:, p, r]
                active = apr != 0.0
                if not np.any(active):
                    continue
                # huge theta means a negligible rotation; t -> 0 is the right limit
                with np.errstate(over="ignore"):
                    theta = (S[:, r, r] - S[:, p, p]) / (2.0 * np.where(active, apr, 1.0))
                    t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rows_p = S[:, p, :].copy()
                rows_r = S[:, r, :].copy()
                S[:, p, :] = c[:, None] * rows_p - s[:, None] * rows_r
                S[:, r, :] = s[:, None] * rows_p + c[:, None] * rows_r
                cols_p = S[:, :, p].copy()
                cols_r = S[:, :, r].copy()
                S[:, :, p] = c[:, None] * cols_p - s[:, None] * cols_r
                S[:, :, r] = s[:, None] * cols_p + c[:, None] * cols_r
    else:
        if not np.all(_off_norm(S) <= target):
            raise NumericalError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.sort(np.diagonal(S, axis1=-2, axis2=-1), axis=-1)
    return w.reshape(batch_shape + (n,))


def hermitian_eigvalsh(H, tol=1e-12, max_sweeps=60):
    """Eigenvalues of Hermitian ``H`` (..., n, n) via the real 2n embedding.

    [[Re H, -Im H], [Im H, Re H]] carries every eigenvalue of H twice; the
    pairs are averaged back into n values.
    """
    H = np.asarray(H, dtype=complex)
    top = np.concatenate([H.real, -H.imag], axis=-1)
    bottom = np.concatenate([H.imag, H.real], axis=-1)
    w = jacobi_eigvalsh(np.concatenate([top, bottom], axis=-2), tol, max_sweeps)
    return 0.5 * (w[..., 0::2] + w[..., 1::2])
