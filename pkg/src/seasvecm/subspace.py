"""Point estimation and dispersion summaries for cointegrating spaces.

Draws of a cointegrating matrix ``beta`` (m, r, full column rank, real or
complex) identify points on a Grassmann manifold through their column
span.  The posterior is summarised through the average span projector
``P = mean(beta (beta^H beta)^-1 beta^H)``: the point estimate collects
the top-r eigenvectors of ``P``, the dispersion statistic rescales the
trailing eigenvalue mass to [0, 1], and distances between spans are
Frobenius distances between projectors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "span_projector",
    "mean_projector",
    "point_estimate",
    "span_variation",
    "space_distance",
    "SpaceSummary",
    "summarize_draws",
]

#: eigenvalue gap below which a tie at the cut position is reported
TIE_TOL = 1e-12


def span_projector(beta: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column span of one (m, r) frame."""
    beta = np.asarray(beta)
    q, _ = np.linalg.qr(beta)
    return q @ q.conj().T


def mean_projector(betas) -> np.ndarray:
    """Average span projector of a collection of (m, r) frames.

    Each draw is orthonormalised before its projector is formed, so the
    draws may carry arbitrary (nonzero) column scales.
    """
    betas = list(betas)
    if not betas:
        raise ValueError("no draws given")
    first = np.asarray(betas[0])
    m = first.shape[0]
    out = np.zeros((m, m), dtype=complex if np.iscomplexobj(first) else float)
    for b in betas:
        b = np.asarray(b)
        if b.shape != first.shape:
            raise ValueError(
                f"inconsistent draw shapes: {b.shape} versus {first.shape}"
            )
        out += span_projector(b)
    out /= len(betas)
    return 0.5 * (out + out.conj().T)


def _fix_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if np.abs(pivot) == 0.0:
            continue
        out[:, j] = col * (np.conj(pivot) / np.abs(pivot))
    if not np.iscomplexobj(vectors):
        out = out.real
    return out


def point_estimate(projector: np.ndarray, r: int) -> np.ndarray:
    """Top-r eigenvectors of an average projector, phase-normalised.

    Ties in the spectrum at the cut position are resolved by eigenvalue
    order and reported through a warning.
    """
    projector = np.asarray(projector)
    m = projector.shape[0]
    if not 0 < r <= m:
        raise ValueError(f"r must be in 1..{m}, got {r}")
    vals, vecs = np.linalg.eigh(projector)
    vals, vecs = vals[::-1], vecs[:, ::-1]
    if r < m and abs(vals[r - 1] - vals[r]) < TIE_TOL:
        warnings.warn(
            f"eigenvalue tie at the rank cut (lambda_{r} = lambda_{r + 1} = "
            f"{vals[r - 1]:.6f}); estimate kept in eigenvalue order",
            RuntimeWarning,
            stacklevel=2,
        )
    return _fix_phase(vecs[:, :r])


def span_variation(eigenvalues, r: int, m: int) -> float:
    """Dispersion of a draw of spans around the point estimate, in [0, 1].

    Computed as ``(r - sum of the r leading eigenvalues)`` of the average
    projector, rescaled by its maximum ``r (m - r) / m`` so that 0 means
    all draws share one span and 1 means the draws are spread uniformly.
    """
    eigenvalues = np.sort(np.asarray(eigenvalues, dtype=float))[::-1]
    if not 0 < r < m:
        raise ValueError(f"dispersion needs 0 < r < m, got r={r}, m={m}")
    top = float(np.sum(eigenvalues[:r]))
    scale = r * (m - r) / m
    value = float((r - top) / scale)
    # a shared span leaves rounding residue of order eps in (r - top);
    # snap it so the degenerate case reports exactly zero
    if abs(value) <= 1e-12:
        return 0.0
    return value


def space_distance(beta_a: np.ndarray, beta_b: np.ndarray) -> float:
    """Frobenius distance between the span projectors of two frames."""
    beta_a, beta_b = np.asarray(beta_a), np.asarray(beta_b)
    if beta_a.shape != beta_b.shape:
        raise ValueError(f"shape mismatch: {beta_a.shape} versus {beta_b.shape}")
    return float(np.linalg.norm(span_projector(beta_a) - span_projector(beta_b)))


@dataclass
class SpaceSummary:
    """Posterior summary of one cointegrating space."""

    beta_hat: np.ndarray
    tau_sq: float
    eigenvalues: np.ndarray
    n_draws: int

    def distance_to(self, beta_other: np.ndarray) -> float:
        return space_distance(self.beta_hat, np.asarray(beta_other))


def summarize_draws(betas) -> SpaceSummary:
    """Full posterior summary from a collection of (m, r) span draws."""
    betas = list(betas)
    proj = mean_projector(betas)
    m = proj.shape[0]
    r = np.asarray(betas[0]).shape[1]
    vals = np.sort(np.linalg.eigvalsh(proj))[::-1]
    beta_hat = point_estimate(proj, r)
    tau_sq = span_variation(vals, r, m) if 0 < r < m else 0.0
    return SpaceSummary(
        beta_hat=beta_hat, tau_sq=tau_sq, eigenvalues=vals, n_draws=len(betas)
    )
