"""Matrix utilities: Hermitian square roots, companion forms, root checks.

The quarterly error-correction model writes the fourth-difference of the
series as a sum of reduced-rank corrections at the zero, bi-annual and
annual frequencies plus lagged fourth-differences.  Everything in this
module is small dense linear algebra: normalising cointegrating pairs via
Hermitian matrix square roots, re-expressing a parameter state as a levels
VAR companion matrix, and classifying its eigenvalues against the four
seasonal unit points 1, -1, i, -i.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError

__all__ = [
    "hermitian_sqrt",
    "normalize_pair",
    "build_companion",
    "stability_check",
    "CompanionMatrix",
    "StabilityReport",
    "UNIT_TARGETS",
]

#: the four points on the unit circle where quarterly integration shows up
UNIT_TARGETS = {"zero": 1.0 + 0.0j, "biannual": -1.0 + 0.0j, "annual": 1.0j}


def hermitian_sqrt(h, tol: float = 1e-12, max_iter: int = 100):
    """Principal square root of a Hermitian positive definite matrix.

    Uses the Newton iteration ``X <- (X + X^-1 H) / 2`` started at ``H``,
    which converges quadratically for positive definite input.  If the
    iteration stalls the eigendecomposition route is used instead; only if
    that also fails to meet the tolerance is an error raised.

    Parameters
    ----------
    h : (r, r) array_like, real or complex
        Hermitian positive definite matrix.
    tol : float
        Relative residual tolerance on ``||X @ X - h||_F``.
    max_iter : int
        Iteration cap for the Newton stage.

    Returns
    -------
    (r, r) ndarray
        Hermitian square root, same dtype kind as the input.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[0] == 0:
        return h.copy()
    hnorm = np.linalg.norm(h)
    if hnorm == 0.0:
        raise ValueError("matrix is zero, no positive definite square root")
    if np.linalg.norm(h - h.conj().T) > max(tol, 1e-10) * max(hnorm, 1.0):
        raise ValueError("matrix is not Hermitian")
    h = 0.5 * (h + h.conj().T)

    x = h.copy()
    for _ in range(max_iter):
        try:
            xinv_h = np.linalg.solve(x, h)
        except np.linalg.LinAlgError:
            break
        x_next = 0.5 * (x + xinv_h)
        x_next = 0.5 * (x_next + x_next.conj().T)
        if not np.all(np.isfinite(x_next)):
            break
        x = x_next
        resid = np.linalg.norm(x @ x - h) / hnorm
        if resid <= tol:
            return x

    # Newton stalled (indefinite or very ill-conditioned input): fall back
    # to the spectral square root before giving up.
    w, v = np.linalg.eigh(h)
    if np.any(w <= 0.0):
        raise ValueError(
            "matrix is not positive definite "
            f"(smallest eigenvalue {w.min():.3e})"
        )
    x = (v * np.sqrt(w)) @ v.conj().T
    x = 0.5 * (x + x.conj().T)
    resid = np.linalg.norm(x @ x - h) / hnorm
    if resid > max(tol, 1e-10):
        raise ConvergenceError(
            f"square root iteration failed, residual {resid:.3e} "
            f"exceeds tolerance {tol:.1e}"
        )
    if np.isrealobj(h):
        x = x.real
    return x


def normalize_pair(a, b):
    """Map a loadings/adjustments pair to its normalised representation.

    Given full-column-rank ``b`` (m, r) and ``a`` (n, r), returns
    ``beta = b @ (b^H b)^{-1/2}`` with orthonormal columns and
    ``alpha = a @ (b^H b)^{1/2}`` so that ``alpha @ beta^H == a @ b^H``.

    Returns
    -------
    (alpha, beta) : pair of ndarrays
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"column mismatch: a has {a.shape[1]} columns, b has {b.shape[1]}"
        )
    r = b.shape[1]
    if r == 0:
        return a.copy(), b.copy()
    gram = b.conj().T @ b
    try:
        root = hermitian_sqrt(gram)
    except ValueError as exc:
        raise ValueError(f"b is rank deficient: {exc}") from exc
    # beta = b @ root^{-1}; root is Hermitian so solve from the left on b^H
    beta = np.linalg.solve(root, b.conj().T).conj().T
    alpha = a @ root
    return alpha, beta


@dataclass
class CompanionMatrix:
    """Levels-VAR companion form of an error-correction parameter state.

    Attributes
    ----------
    matrix : (n*k, n*k) ndarray
        Companion matrix; the first block row holds the levels lag
        coefficients, the sub-diagonal holds identities.
    lag_coefs : list of (n, n) ndarray
        The levels lag coefficient matrices A_1 .. A_k.
    """

    matrix: np.ndarray
    lag_coefs: list = field(default_factory=list)


def _gamma_blocks(gamma: np.ndarray, n: int, k: int) -> list[np.ndarray]:
    """Split the stacked short-run coefficient matrix into per-lag blocks.

    ``gamma`` stacks the transposed lag coefficients row-wise, one (n, n)
    block per retained fourth-difference lag, followed by any unrestricted
    deterministic rows (which do not enter the companion form).
    """
    blocks = []
    for i in range(k - 4):
        blocks.append(gamma[i * n : (i + 1) * n, :].T)
    return blocks


def build_companion(state, spec) -> CompanionMatrix:
    """Re-express an error-correction state as a levels VAR companion matrix.

    Only the stochastic rows (the first ``n``) of each cointegrating block
    enter; deterministic rows multiply dummy regressors, not lagged levels.
    Writing P1, P2 for the zero/bi-annual long-run impact matrices, and
    C31, C32 for the coefficients the annual-frequency pair puts on
    ``y_{t-1} - y_{t-3}`` and ``y_{t-2} - y_{t-4}``, expanding the
    fourth-difference form back to levels gives lag coefficients

        A_1 = P1 + P2 + C31 + G_1
        A_2 = P1 - P2 + C32 + G_2
        A_3 = P1 + P2 - C31 + G_3
        A_4 = I  + P1 - P2 - C32 + G_4
        A_i = G_i - G_{i-4}          for i > 4,

    with G_i the short-run coefficient on the i-th lagged fourth
    difference (zero beyond lag k-4).
    """
    n, k = spec.n, spec.k
    eye = np.eye(n)
    b1 = state.B1[:n, :]
    b2 = state.B2[:n, :]
    br = state.B_R[:n, :]
    bi = state.B_I[:n, :]

    p1 = state.A1 @ b1.T
    p2 = state.A2 @ b2.T
    c31 = 2.0 * (state.A_I @ br.T - state.A_R @ bi.T)
    c32 = -2.0 * (state.A_R @ br.T + state.A_I @ bi.T)

    gblocks = _gamma_blocks(state.Gamma, n, k)

    def gb(i: int) -> np.ndarray:
        return gblocks[i - 1] if 1 <= i <= len(gblocks) else np.zeros((n, n))

    lag_coefs = [
        p1 + p2 + c31 + gb(1),
        p1 - p2 + c32 + gb(2),
        p1 + p2 - c31 + gb(3),
        eye + p1 - p2 - c32 + gb(4),
    ]
    for i in range(5, k + 1):
        lag_coefs.append(gb(i) - gb(i - 4))

    nk = n * k
    comp = np.zeros((nk, nk))
    for i, coef in enumerate(lag_coefs):
        comp[:n, i * n : (i + 1) * n] = coef
    if k > 1:
        comp[n:, :-n] = np.eye(n * (k - 1))
    return CompanionMatrix(matrix=comp, lag_coefs=lag_coefs)


@dataclass
class StabilityReport:
    """Classification of companion eigenvalues against the seasonal unit points.

    ``unit_counts`` maps frequency name to the number of roots matched to
    that point (the annual entry counts conjugate pairs).  ``max_other``
    is the largest modulus among unmatched roots, 0.0 if there are none.
    """

    is_admissible: bool
    unit_counts: dict
    max_other: float
    eigenvalues: np.ndarray
    reason: str = ""


def stability_check(
    companion,
    spec,
    tol_unit: float = 1e-6,
    tol_explosive: float = 1e-9,
) -> StabilityReport:
    """Check a companion matrix for the required seasonal unit-root pattern.

    Admissibility requires exactly ``n - r1`` roots at 1, ``n - r2`` at -1
    and ``n - r3`` conjugate pairs at +/-i (matched within ``tol_unit``,
    with moduli at most ``1 + tol_explosive``), and every remaining root
    strictly inside the circle of radius ``1 - tol_unit``.
    """
    mat = companion.matrix if isinstance(companion, CompanionMatrix) else companion
    eig = np.linalg.eigvals(np.asarray(mat))

    at_one = np.abs(eig - 1.0) <= tol_unit
    at_minus_one = np.abs(eig + 1.0) <= tol_unit
    at_plus_i = np.abs(eig - 1j) <= tol_unit
    at_minus_i = np.abs(eig + 1j) <= tol_unit
    matched = at_one | at_minus_one | at_plus_i | at_minus_i

    counts = {
        "zero": int(at_one.sum()),
        "biannual": int(at_minus_one.sum()),
        "annual": int(at_plus_i.sum()),
    }
    other = np.abs(eig[~matched])
    max_other = float(other.max()) if other.size else 0.0

    n = spec.n
    reason = ""
    if at_plus_i.sum() != at_minus_i.sum():
        reason = (
            f"unpaired annual roots ({int(at_plus_i.sum())} at +i, "
            f"{int(at_minus_i.sum())} at -i)"
        )
    elif counts["zero"] != n - spec.r1:
        reason = f"{counts['zero']} roots at 1, expected {n - spec.r1}"
    elif counts["biannual"] != n - spec.r2:
        reason = f"{counts['biannual']} roots at -1, expected {n - spec.r2}"
    elif counts["annual"] != n - spec.r3:
        reason = f"{counts['annual']} root pairs at +/-i, expected {n - spec.r3}"
    elif np.any(np.abs(eig[matched]) > 1.0 + tol_explosive):
        reason = "matched unit root outside the explosive tolerance"
    elif max_other >= 1.0 - tol_unit:
        reason = f"non-unit root with modulus {max_other:.8f}"

    return StabilityReport(
        is_admissible=(reason == ""),
        unit_counts=counts,
        max_other=max_other,
        eigenvalues=eig,
        reason=reason,
    )
