"""Dense linear algebra for tiny matrices (n <= 8): finite-difference
Jacobians, characteristic polynomials, and eigenvalues.

Eigenvalues come from the Faddeev-LeVerrier recursion followed by
Durand-Kerner root iteration; ``char_poly_eval`` (complex LU determinant)
is the independent cross-check on any claimed eigenvalue.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError, NumericalError

MAX_EIG_DIM = 8


def jacobian_fd(func, point, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian; column j probes point +- h e_j."""
    if h <= 0:
        raise InputError("h must be positive")
    x = np.asarray(point, dtype=np.float64)
    if x.ndim != 1:
        raise InputError("point must be a vector")
    n = x.size
    jac = np.empty((n, n))
    for j in range(n):
        step = np.zeros(n)
        step[j] = h
        hi = np.asarray(func(x + step), dtype=np.float64)
        lo = np.asarray(func(x - step), dtype=np.float64)
        if hi.shape != (n,) or lo.shape != (n,):
            raise InputError("map must return a vector of the same dimension")
        jac[:, j] = (hi - lo) / (2.0 * h)
    return jac


def _check_square(M) -> np.ndarray:
    a = np.asarray(M)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"matrix must be square, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise InputError("matrix entries must be finite")
    return a


def char_poly_eval(M, lam: complex) -> complex:
    """det(M - lam I) by complex LU factorization with partial pivoting."""
    m = _check_square(M)
    n = m.shape[0]
    a = m.astype(np.complex128) - complex(lam) * np.eye(n)
    det = 1.0 + 0.0j
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0:
            return 0.0 + 0.0j
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            det = -det
        det *= a[col, col]
        if col + 1 < n:
            factors = a[col + 1:, col] / a[col, col]
            a[col + 1:, col:] -= factors[:, None] * a[col, col:]
    return complex(det)


def char_poly_coeffs(M) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest degree first,
    via the Faddeev-LeVerrier recursion."""
    a = _check_square(M).astype(np.float64)
    n = a.shape[0]
    coeffs = np.empty(n + 1)
    coeffs[0] = 1.0
    mk = a.copy()
    for k in range(1, n + 1):
        coeffs[k] = -np.trace(mk) / k
        if k < n:
            mk = a @ (mk + coeffs[k] * np.eye(n))
    return coeffs


def _poly_eval(coeffs: np.ndarray, z: complex) -> complex:
    acc = 0.0 + 0.0j
    for c in coeffs:
        acc = acc * z + c
    return acc


def polynomial_roots(coeffs, tol: float = 1e-12, max_iter: int = 1000) -> np.ndarray:
    """Durand-Kerner iteration on a monic polynomial.

    Raises NumericalError (residuals attached) when neither the update
    steps nor the residuals settle within the iteration budget.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs[0] != 1.0:
        coeffs = coeffs / coeffs[0]
    n = coeffs.size - 1
    if n < 1:
        return np.empty(0, dtype=np.complex128)
    radius = 1.0 + float(np.abs(coeffs[1:]).max())
    seed = 0.4 + 0.9j
    roots = np.array([radius * seed ** (k + 1) for k in range(n)], dtype=np.complex128)
    scale = 1.0 + float(np.abs(coeffs).sum())
    converged = False
    for _ in range(max_iter):
        biggest_move = 0.0
        for i in range(n):
            denom = 1.0 + 0.0j
            for j in range(n):
                if j != i:
                    diff = roots[i] - roots[j]
                    if diff == 0:
                        diff = complex(tol, tol)
                    denom *= diff
            delta = _poly_eval(coeffs, roots[i]) / denom
            roots[i] -= delta
            biggest_move = max(biggest_move, abs(delta))
        if biggest_move <= tol:
            converged = True
            break
    residuals = np.array([abs(_poly_eval(coeffs, z)) for z in roots])
    if not converged and residuals.max() > tol * scale:
        raise NumericalError(
            f"root iteration did not converge (max residual {residuals.max():.3e})",
            residuals=residuals,
        )
    return roots


def eigenvalues_small(M, tol: float = 1e-12, max_iter: int = 1000) -> np.ndarray:
    """All eigenvalues of a small matrix, sorted by modulus descending."""
    a = _check_square(M)
    if a.shape[0] > MAX_EIG_DIM:
        raise InputError(f"eigenvalues_small handles n <= {MAX_EIG_DIM}")
    roots = polynomial_roots(char_poly_coeffs(a), tol=tol, max_iter=max_iter)
    order = np.lexsort((roots.imag, roots.real, np.abs(roots)))[::-1]
    return roots[order]


def unit_eigenvector(M, shift: float = 1.0 + 1e-9, probe_axis: int = -1) -> np.ndarray:
    """Eigenvector for an eigenvalue near ``shift`` by one inverse-iteration
    solve of (M - shift I) v = e_probe, normalized to unit length."""
    a = _check_square(M).astype(np.float64)
    n = a.shape[0]
    rhs = np.zeros(n)
    rhs[probe_axis] = 1.0
    try:
        v = np.linalg.solve(a - shift * np.eye(n), rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"inverse iteration solve failed: {exc}") from exc
    norm = np.linalg.norm(v)
    if norm == 0 or not np.isfinite(norm):
        raise NumericalError("inverse iteration produced a degenerate vector")
    return v / norm


def interior_eigenvalue_pair(eta: float) -> tuple:
    """The two analytic eigenvalue branches of the composed reduced map's
    Jacobian at the interior equilibrium (each has multiplicity two)."""
    root = math.sqrt((eta * eta + eta + 1.0) * (eta * eta - eta + 1.0))
    base = eta * eta / 2.0 + 0.5
    return base - root / 2.0, base + root / 2.0


def boundary_eigenvalue(a: float, eta: float) -> float:
    """The nontrivial analytic eigenvalue modulus of the composed reduced
    map's Jacobian on the boundary fixed-point curve."""
    e3 = math.exp(3.0 * eta)
    return math.exp(-2.0 * eta * a * (1.0 - a) * (e3 - 1.0) / (a + (1.0 - a) * e3))
