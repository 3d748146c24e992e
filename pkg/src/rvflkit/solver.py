"""Closed-form ridge solves in primal and dual form with the dimension-based switch."""

from __future__ import annotations

import numpy as np
import scipy.linalg


class SolverError(RuntimeError):
    pass


def _spd_solve(G: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Cholesky solve with a pivoted-LU fallback for severely ill-conditioned G."""
    try:
        c, low = scipy.linalg.cho_factor(G, check_finite=False)
        return scipy.linalg.cho_solve((c, low), rhs, check_finite=False)
    except scipy.linalg.LinAlgError:
        pass
    try:
        lu, piv = scipy.linalg.lu_factor(G, check_finite=False)
        return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        cond = np.linalg.cond(G)
        raise SolverError(f"factorization failed (condition number ~{cond:.3e})") from exc


def solve_primal(design, targets, gamma: float) -> np.ndarray:
    """W = (D^t D + I/gamma)^-1 D^t Y, solved by factorization (no explicit inverse)."""
    D = np.asarray(design, dtype=np.float64)
    Y = np.asarray(targets, dtype=np.float64)
    if not gamma > 0:
        raise SolverError("gamma must be positive")
    d = D.shape[1]
    G = D.T @ D + np.eye(d) / gamma
    return _spd_solve(G, D.T @ Y)


def solve_dual(design, targets, gamma: float) -> np.ndarray:
    """W = D^t (D D^t + I/gamma)^-1 Y; preferable when rows < columns."""
    D = np.asarray(design, dtype=np.float64)
    Y = np.asarray(targets, dtype=np.float64)
    if not gamma > 0:
        raise SolverError("gamma must be positive")
    l = D.shape[0]
    G = D @ D.T + np.eye(l) / gamma
    return D.T @ _spd_solve(G, Y)


def solve_auto(design, targets, gamma: float) -> np.ndarray:
    """Primal when columns <= rows, dual otherwise (tie goes to primal)."""
    D = np.asarray(design, dtype=np.float64)
    if D.shape[1] <= D.shape[0]:
        return solve_primal(D, targets, gamma)
    return solve_dual(D, targets, gamma)
