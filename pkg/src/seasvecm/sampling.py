"""Low-level matrix-variate samplers on a shared numpy Generator.

Implemented directly (Bartlett decomposition, Cholesky mixing) rather than
through scipy's frozen distributions so that every draw consumes the same
generator stream and runs stay bit-reproducible for a given seed.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cholesky, solve_triangular

__all__ = [
    "draw_wishart",
    "draw_inv_wishart",
    "draw_inv_gamma",
    "draw_matrix_normal",
    "chol_lower",
]


def chol_lower(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with a symmetric-part guard."""
    a = np.asarray(a)
    return cholesky(0.5 * (a + a.conj().T), lower=True)


def _bartlett_factor(rng: np.random.Generator, df: float, p: int) -> np.ndarray:
    """Lower-triangular Bartlett factor A with W = A A' ~ Wishart(df, I)."""
    a = np.zeros((p, p))
    for i in range(p):
        a[i, i] = np.sqrt(rng.chisquare(df - i))
    rows, cols = np.tril_indices(p, -1)
    a[rows, cols] = rng.standard_normal(rows.size)
    return a


def draw_wishart(rng: np.random.Generator, df: float, scale: np.ndarray) -> np.ndarray:
    """Draw from Wishart(df, scale); requires df > p - 1."""
    scale = np.asarray(scale, dtype=float)
    p = scale.shape[0]
    if df <= p - 1:
        raise ValueError(f"wishart needs df > p - 1 = {p - 1}, got {df}")
    l = chol_lower(scale)
    a = _bartlett_factor(rng, df, p)
    la = l @ a
    return la @ la.T


def draw_inv_wishart(
    rng: np.random.Generator, scale: np.ndarray, df: float
) -> np.ndarray:
    """Draw from the inverse Wishart with density
    ``|X|^{-(df + p + 1)/2} exp(-tr(X^{-1} scale) / 2)``.

    Equivalent to inverting a Wishart(df, scale^{-1}) draw; done through
    triangular solves on the Bartlett factor to avoid explicit inverses.
    """
    scale = np.asarray(scale, dtype=float)
    p = scale.shape[0]
    if df <= p - 1:
        raise ValueError(f"inverse wishart needs df > p - 1 = {p - 1}, got {df}")
    c = chol_lower(scale)
    a = _bartlett_factor(rng, df, p)
    # W = (C^-T A)(C^-T A)' ~ Wishart(df, scale^-1);  X = W^-1 = M M' with
    # M = C A^-T obtained by a triangular solve.  The Bartlett factor is
    # one-sided: A A' is Wishart but A' A is not, so the solve must produce
    # C A^-T rather than C A^-1.
    m = solve_triangular(a, c.T, lower=True).T
    return m @ m.T


def draw_inv_gamma(rng: np.random.Generator, shape: float, scale: float) -> float:
    """Draw from the inverse gamma with density
    ``x^{-(shape + 1)} exp(-scale / x)`` (up to constant)."""
    if shape <= 0 or scale <= 0:
        raise ValueError("inverse gamma needs positive shape and scale")
    return scale / rng.gamma(shape)


def draw_matrix_normal(
    rng: np.random.Generator,
    mean: np.ndarray,
    row_cov: np.ndarray,
    col_cov: np.ndarray,
) -> np.ndarray:
    """Draw X ~ mN(mean, row_cov, col_cov), i.e. the (i, j) covariance
    structure with vec(X) ~ N(vec(mean), col_cov kron row_cov) under
    column-major vec."""
    mean = np.asarray(mean, dtype=float)
    p, q = mean.shape
    if p == 0 or q == 0:
        return mean.copy()
    lr = chol_lower(np.asarray(row_cov, dtype=float))
    lc = chol_lower(np.asarray(col_cov, dtype=float))
    z = rng.standard_normal((p, q))
    return mean + lr @ z @ lc.T
