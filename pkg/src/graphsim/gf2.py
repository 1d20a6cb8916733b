"""Tiny GF(2) linear algebra used to fit update rules."""

from __future__ import annotations

import numpy as np


class NotAffine(ValueError):
    pass


def fit_linear(inputs: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    """Return ``M`` (outs x vars) with ``inputs @ M.T == outputs`` over GF(2).

    Free variables are set to zero.  Raises :class:`NotAffine` when the data admit
    no exact solution.
    """
    X = np.asarray(inputs, dtype=np.uint8) & 1
    Y = np.asarray(outputs, dtype=np.uint8) & 1
    n_pts, n_vars = X.shape
    aug = np.concatenate([X, Y], axis=1)
    pivots = []
    row = 0
    for col in range(n_vars):
        hit = np.nonzero(aug[row:, col])[0]
        if hit.size == 0:
            continue
        r = row + hit[0]
        aug[[row, r]] = aug[[r, row]]
        mask = aug[:, col].astype(bool)
        mask[row] = False
        aug[mask] ^= aug[row]
        pivots.append(col)
        row += 1
        if row == n_pts:
            break
    if np.any(aug[row:, n_vars:]):
        raise NotAffine("no GF(2)-linear map reproduces the data")
    M = np.zeros((Y.shape[1], n_vars), dtype=np.uint8)
    for r, col in enumerate(pivots):
        M[:, col] = aug[r, n_vars:]
    return M


def matvec(M: np.ndarray, v) -> np.ndarray:
    return (np.asarray(M, dtype=np.int64) @ np.asarray(v, dtype=np.int64)) % 2


def rank(M: np.ndarray) -> int:
    A = np.asarray(M, dtype=np.uint8).copy() & 1
    r = 0
    for col in range(A.shape[1]):
        hit = np.nonzero(A[r:, col])[0]
        if hit.size == 0:
            continue
        p = r + hit[0]
        A[[r, p]] = A[[p, r]]
        mask = A[:, col].astype(bool)
        mask[r] = False
        A[mask] ^= A[r]
        r += 1
        if r == A.shape[0]:
            break
    return r
