"""Dense symmetric linear algebra and fixed-step integration kernel.

Small, dependency-free (beyond numpy array storage) and fully deterministic:

* ``sym_eig`` -- cyclic Jacobi eigensolver for real symmetric matrices.
  Jacobi is slower than Householder tridiagonalization but is short,
  unconditionally robust on symmetric input, and bit-reproducible, which is
  what the acceptance runs need.  All matrices in this project are tiny
  (at most a few dozen rows), so speed is irrelevant.
* ``pinv`` -- Moore-Penrose pseudoinverse built on ``sym_eig`` applied to
  the smaller of A^T A and A A^T, with explicit rank truncation.  Incidence
  matrices of connected graphs are rank N-1, so truncation is not optional.
* ``rk4_step`` -- one classical fourth-order Runge-Kutta step.  Fixed step,
  no adaptivity: two runs of the same scenario must agree bit for bit.

All functions are pure; nothing here holds mutable state.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

# Relative off-diagonal Frobenius norm at which the Jacobi sweep stops.
_JACOBI_TOL = 1e-14
# Singular values below this times the largest are treated as zero.
_PINV_RCOND = 1e-12


class DivergenceError(RuntimeError):
    """A state or stage evaluation stopped being finite.

    Carries the time of the offending evaluation and the index of the first
    non-finite (or, for magnitude blow-ups, largest) state entry.
    """

    def __init__(self, time: float, index: int, detail: str = "non-finite value"):
        self.time = float(time)
        self.index = int(index)
        super().__init__(f"{detail} at t={self.time:.6g} (state index {self.index})")


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def sym_eig(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors as orthonormal columns, so that ``s @ v[:, i]`` equals
    ``w[i] * v[:, i]`` to roughly 1e-10 * ||s||.

    Raises ValueError if ``s`` is not square, not finite, or asymmetric
    beyond 1e-12 relative Frobenius norm.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("matrix entries must be finite")
    scale = float(np.sqrt(np.sum(s * s)))
    asym = float(np.sqrt(np.sum((s - s.T) ** 2)))
    if asym > 1e-12 * scale + 1e-300:
        raise ValueError(f"matrix is not symmetric (relative asymmetry {asym / scale:.3e})")

    n = s.shape[0]
    a = 0.5 * (s + s.T)  # exact symmetry for the sweep
    v = np.eye(n)
    if n == 1:
        return a[0].copy(), v

    tol = _JACOBI_TOL * scale
    for _ in range(100):
        if _off_diagonal_norm(a) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) if tau != 0.0 else 1.0
                t /= abs(tau) + np.sqrt(1.0 + tau * tau)
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * c

                app, aqq = a[p, p], a[q, q]
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - sn * row_q
                a[q, :] = sn * row_p + c * row_q
                # the rotation annihilates (p, q) exactly; write the exact
                # diagonal update instead of the rounded rotated values
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - sn * vec_q
                v[:, q] = sn * vec_p + c * vec_q
    else:
        raise RuntimeError("Jacobi iteration failed to converge in 100 sweeps")

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def pinv(a: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse with rank truncation.

    Diagonalizes ``a.T @ a`` (or ``a @ a.T``, whichever is smaller) with
    ``sym_eig`` and drops singular values below 1e-12 times the largest.
    Satisfies all four Penrose identities to ~1e-9 relative for matrices
    of modest condition number.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    rows, cols = a.shape

    if cols <= rows:
        lam, v = sym_eig(a.T @ a)
    else:
        lam, v = sym_eig(a @ a.T)
    lam = np.maximum(lam, 0.0)
    lam_max = lam[-1] if lam.size else 0.0
    if lam_max == 0.0:
        return np.zeros((cols, rows))
    keep = lam > (_PINV_RCOND ** 2) * lam_max
    vr = v[:, keep]
    inv_lam = 1.0 / lam[keep]
    if cols <= rows:
        # a+ = V diag(1/lambda) V^T A^T
        return (vr * inv_lam[None, :]) @ (vr.T @ a.T)
    # a+ = A^T U diag(1/lambda) U^T
    return ((a.T @ vr) * inv_lam[None, :]) @ vr.T


def rk4_step(
    f: Callable[[float, np.ndarray], np.ndarray],
    t: float,
    y: np.ndarray,
    dt: float,
) -> np.ndarray:
    """One classical Runge-Kutta step of size ``dt`` for ``dy/dt = f(t, y)``.

    Local error O(dt^5) for smooth ``f``.  Every stage evaluation is checked
    for finiteness; a non-finite entry raises DivergenceError carrying the
    stage time and the offending index.
    """
    if dt <= 0.0:
        raise ValueError(f"step size must be positive, got {dt}")
    y = np.asarray(y, dtype=float)
    half = 0.5 * dt

    def stage(ts: float, ys: np.ndarray) -> np.ndarray:
        k = np.asarray(f(ts, ys), dtype=float)
        bad = ~np.isfinite(k)
        if bad.any():
            raise DivergenceError(ts, int(np.argmax(bad)), "non-finite derivative")
        return k

    k1 = stage(t, y)
    k2 = stage(t + half, y + half * k1)
    k3 = stage(t + half, y + half * k2)
    k4 = stage(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
