"""Bayesian comparison of seasonal cointegration models.

A candidate model is a (d, s, r1, r2, r3) tuple: deterministic-term case,
seasonal-dummy flag and the three cointegration ranks.  For each candidate
the marginal data density is estimated by arithmetic averaging of the
closed-form conditional density ``p(y | B1, B2, B_R, B_I, nu)`` over prior
draws of the conditioning blocks, then corrected for the truncation of the
prior to the stable region by the prior probability of admissibility.

Distinct labels can describe one and the same sampling distribution; the
grid enumerator collapses such duplicates:

* with ``r1 = 0`` a restricted trend (d=1) duplicates the unrestricted
  constant case (d=2), and a restricted constant (d=3) duplicates the
  no-deterministics case (d=4);
* with ``r1 = n`` the restricted constant is absorbed into the
  unrestricted one (d=3 -> d=2), and d=1 describes no valid model;
* with ``r2 = r3 = 0`` the seasonal dummies multiply nothing, so s=1
  duplicates s=0.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import NumericalError
from .pipeline import DesignMatrices, ModelSpec, QuarterlySeries, build_design
from .priors import PriorHyper
from .sampling import chol_lower

__all__ = [
    "ModelGrid",
    "ModelScore",
    "enumerate_grid",
    "conditional_log_mdd",
    "estimate_log_mdd",
    "truncation_fraction",
    "score_model",
    "compare_models",
    "model_posteriors",
    "feature_marginals",
]


@dataclass
class ModelGrid:
    """Deduplicated candidate set with uniform prior model probabilities."""

    specs: list
    prior_probs: np.ndarray
    dedup_log: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.specs)


def _canonical(n: int, d: int, s: int, r1: int, r2: int, r3: int):
    """Canonical label of the model class; None when no valid model exists."""
    if r1 == 0:
        d = {1: 2, 3: 4}.get(d, d)
    if r1 == n:
        if d == 1:
            return None
        if d == 3:
            d = 2
    if s == 1 and r2 == 0 and r3 == 0:
        s = 0
    return (d, s, r1, r2, r3)


def enumerate_grid(
    n: int,
    k: int,
    d_values=(1, 2, 3, 4),
    s_values=(0, 1),
    rank_values=None,
) -> ModelGrid:
    """Enumerate all distinct (d, s, r1, r2, r3) models for fixed n and k.

    Returns the kept models with a uniform prior and a log of every
    dropped duplicate mapped to its representative.
    """
    if rank_values is None:
        rank_values = range(n + 1)
    rank_values = sorted(set(int(r) for r in rank_values))
    if any(not 0 <= r <= n for r in rank_values):
        raise ValueError(f"rank values must be in 0..{n}")

    combos = [
        (d, s, r1, r2, r3)
        for d in d_values
        for s in s_values
        for r1 in rank_values
        for r2 in rank_values
        for r3 in rank_values
    ]
    combo_set = set(combos)
    kept, log = [], []
    representative: dict = {}
    for combo in combos:
        canon = _canonical(n, *combo)
        if canon is None:
            log.append(
                {
                    "dropped": combo,
                    "reason": "no valid model (restricted trend with full "
                    "zero-frequency rank)",
                }
            )
            continue
        if canon == combo:
            kept.append(combo)
            representative[canon] = combo
        elif canon in combo_set:
            log.append({"dropped": combo, "duplicate_of": canon})
        elif canon in representative:
            log.append({"dropped": combo, "duplicate_of": representative[canon]})
        else:
            # the canonical twin is outside the requested grid, so this
            # label stays as the representative of its class
            kept.append(combo)
            representative[canon] = combo
            log.append({"kept_for_class": combo, "canonical": canon})

    if not kept:
        raise ValueError("model grid is empty")
    specs = [
        ModelSpec(n=n, k=k, d=d, s=s, r1=r1, r2=r2, r3=r3)
        for (d, s, r1, r2, r3) in kept
    ]
    probs = np.full(len(specs), 1.0 / len(specs))
    return ModelGrid(specs=specs, prior_probs=probs, dedup_log=log)


# ---------------------------------------------------------------------------
# conditional marginal data density


def _stacked_prior_scale(spec: ModelSpec, hyper: PriorHyper) -> np.ndarray:
    """Row scale of the stacked coefficient prior in the conditional
    regression Z0 = Ztilde Gamma_stacked + E."""
    blocks = [hyper.Omega1, hyper.Omega2, 0.5 * np.eye(2 * spec.r3), hyper.Omega_Gamma]
    blocks = [b for b in blocks if b.shape[0]]
    p_all = spec.r1 + spec.r2 + 2 * spec.r3 + spec.n_short_run
    out = np.zeros((p_all, p_all))
    at = 0
    for b in blocks:
        w = b.shape[0]
        out[at : at + w, at : at + w] = b
        at += w
    return out


def _stacked_prior_mean(spec: ModelSpec, hyper: PriorHyper) -> np.ndarray:
    return np.vstack(
        [hyper.mu1.T, hyper.mu2.T, hyper.mu_R.T, hyper.mu_I.T, hyper.mu_Gamma]
    )


def _student_const(n: int, t: int, q: float, s_mat: np.ndarray) -> float:
    i = np.arange(1, n + 1)
    lg = float(np.sum(gammaln((q + t + 1 - i) / 2.0) - gammaln((q + 1 - i) / 2.0)))
    sign, logdet_s = np.linalg.slogdet(s_mat)
    if sign <= 0:
        raise ValueError("prior scale matrix S must be positive definite")
    return -0.5 * n * t * math.log(math.pi) + 0.5 * q * logdet_s + lg


def conditional_log_mdd(
    dm: DesignMatrices,
    hyper: PriorHyper,
    b1: np.ndarray,
    b2: np.ndarray,
    b_r: np.ndarray,
    b_i: np.ndarray,
    nu: float,
) -> float:
    """Exact log marginal density of the sample given the cointegration
    loadings and nu, with Sigma, Gamma and all adjustment blocks
    integrated out analytically.

    Stacking the conditional regressors ``Ztilde = (Z1 B1 | Z2 B2 | X_R |
    X_I | Z4)`` with coefficient prior ``mN(mu, Sigma, nu * Omega)`` and
    ``Sigma ~ iW(S, q)``, the marginal of Z0 is matrix-variate Student
    with row scale ``V = I + nu Ztilde Omega Ztilde'``; the implementation
    evaluates its log density through the Woodbury form

        W = (Z0 - Ztilde mu)' V^{-1} (Z0 - Ztilde mu)
          = R'R - h' OmegaBar h,

    which stays well defined even when ``Ztilde`` loses column rank.
    """
    spec = dm.spec
    n, t = spec.n, dm.n_modeled
    const = _student_const(n, t, hyper.q, hyper.S)

    x_r = -2.0 * dm.Z32 @ b_r - 2.0 * dm.Z31 @ b_i
    x_i = 2.0 * dm.Z31 @ b_r - 2.0 * dm.Z32 @ b_i
    ztilde = np.hstack([dm.Z1 @ b1, dm.Z2 @ b2, x_r, x_i, dm.Z4])
    p_all = ztilde.shape[1]
    if p_all == 0:
        w = dm.Z0.T @ dm.Z0
        sign, logdet = np.linalg.slogdet(hyper.S + w)
        return const - 0.5 * (hyper.q + t) * logdet

    omega = _stacked_prior_scale(spec, hyper)
    mu = _stacked_prior_mean(spec, hyper)
    omega_inv = np.linalg.inv(omega)
    f = ztilde.T @ ztilde
    g = ztilde.T @ dm.Z0
    prec = omega_inv / nu + f
    sign_p, logdet_prec = np.linalg.slogdet(prec)
    sign_o, logdet_omega = np.linalg.slogdet(omega)
    if sign_p <= 0 or sign_o <= 0:
        return -np.inf
    h = g - f @ mu
    w = (
        dm.Z0.T @ dm.Z0
        - mu.T @ g
        - g.T @ mu
        + mu.T @ f @ mu
        - h.T @ np.linalg.solve(prec, h)
    )
    sign_w, logdet_w = np.linalg.slogdet(hyper.S + w)
    if sign_w <= 0 or not np.isfinite(logdet_w):
        return -np.inf
    return float(
        const
        - 0.5 * n * (p_all * math.log(nu) + logdet_omega + logdet_prec)
        - 0.5 * (hyper.q + t) * logdet_w
    )


class _BatchEvaluator:
    """Vectorised conditional density over many prior draws at once.

    All fixed-sample quantities reduce to cross products of the stacked
    regressor matrix ``U = (Z1 | Z2 | Z31 | Z32 | Z4)``, so each draw only
    requires small-matrix algebra of order the stacked coefficient count.
    """

    def __init__(self, dm: DesignMatrices, hyper: PriorHyper):
        spec = dm.spec
        self.spec = spec
        self.hyper = hyper
        self.n = spec.n
        self.t = dm.n_modeled
        u = np.hstack([dm.Z1, dm.Z2, dm.Z31, dm.Z32, dm.Z4])
        self.c_uu = u.T @ u
        self.c_u0 = u.T @ dm.Z0
        self.c_00 = dm.Z0.T @ dm.Z0
        self.m_total = u.shape[1]
        self.p_all = spec.r1 + spec.r2 + 2 * spec.r3 + spec.n_short_run
        self.const = _student_const(self.n, self.t, hyper.q, hyper.S)
        if self.p_all:
            omega = _stacked_prior_scale(spec, hyper)
            self.omega_inv = np.linalg.inv(omega)
            self.logdet_omega = float(np.linalg.slogdet(omega)[1])
            self.mu = _stacked_prior_mean(spec, hyper)

    def _coefficient_maps(self, b1, b2, b_r, b_i) -> np.ndarray:
        """Per-draw (m_total, p_all) maps K with Ztilde = U @ K."""
        spec = self.spec
        n_draws = b1.shape[0]
        k = np.zeros((n_draws, self.m_total, self.p_all))
        o2 = spec.m1
        o31 = o2 + spec.m2
        o32 = o31 + spec.m3
        o4 = o32 + spec.m3
        c2 = spec.r1
        c_r = c2 + spec.r2
        c_i = c_r + spec.r3
        c4 = c_i + spec.r3
        k[:, :o2, :c2] = b1
        k[:, o2:o31, c2:c_r] = b2
        k[:, o31:o32, c_r:c_i] = -2.0 * b_i
        k[:, o32:o4, c_r:c_i] = -2.0 * b_r
        k[:, o31:o32, c_i:c4] = 2.0 * b_r
        k[:, o32:o4, c_i:c4] = -2.0 * b_i
        k[:, o4:, c4:] = np.eye(spec.n_short_run)
        return k

    def __call__(self, b1, b2, b_r, b_i, nu) -> np.ndarray:
        n_draws = nu.shape[0]
        if self.p_all == 0:
            sign, logdet = np.linalg.slogdet(self.hyper.S + self.c_00)
            return np.full(n_draws, self.const - 0.5 * (self.hyper.q + self.t) * logdet)
        k = self._coefficient_maps(b1, b2, b_r, b_i)
        kt = k.transpose(0, 2, 1)
        f = kt @ self.c_uu @ k
        g = kt @ self.c_u0
        prec = self.omega_inv[None, :, :] / nu[:, None, None] + f
        sign_p, logdet_prec = np.linalg.slogdet(prec)
        f_mu = f @ self.mu
        h = g - f_mu
        mu_t_g = self.mu.T @ g
        w = (
            self.c_00[None, :, :]
            - mu_t_g
            - mu_t_g.transpose(0, 2, 1)
            + self.mu.T @ f_mu
            - h.transpose(0, 2, 1) @ np.linalg.solve(prec, h)
        )
        sign_w, logdet_w = np.linalg.slogdet(self.hyper.S[None, :, :] + w)
        out = (
            self.const
            - 0.5 * self.n * (self.p_all * np.log(nu) + self.logdet_omega + logdet_prec)
            - 0.5 * (self.hyper.q + self.t) * logdet_w
        )
        bad = (sign_p <= 0) | (sign_w <= 0) | ~np.isfinite(out)
        out[bad] = -np.inf
        return out


def _draw_prior_loadings(spec: ModelSpec, hyper: PriorHyper, rng, n_draws: int):
    """Vectorised prior draws of (B1, B2, B_R, B_I, nu)."""
    def mn_zero(p_mat, m_weight, rows, cols):
        if rows == 0 or cols == 0:
            return np.zeros((n_draws, rows, cols))
        l = chol_lower(p_mat) / math.sqrt(m_weight)
        return np.einsum(
            "ij,njk->nik", l, rng.standard_normal((n_draws, rows, cols))
        )

    b1 = mn_zero(hyper.P1, spec.m1, spec.m1, spec.r1)
    b2 = mn_zero(hyper.P2, spec.m2, spec.m2, spec.r2)
    b_ri = mn_zero(hyper.annual_loading_cov(), spec.m3, 2 * spec.m3, spec.r3)
    if hyper.nu_fixed is not None:
        nu = np.full(n_draws, float(hyper.nu_fixed))
    else:
        nu = hyper.s_nu / rng.gamma(hyper.n_nu, size=n_draws)
    return b1, b2, b_ri[:, : spec.m3, :], b_ri[:, spec.m3 :, :], nu


def estimate_log_mdd(
    y,
    spec: ModelSpec,
    hyper: Optional[PriorHyper] = None,
    n_draws: int = 200_000,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    batch_size: int = 16_384,
):
    """Monte Carlo estimate of the untruncated log marginal data density.

    Averages ``exp(conditional_log_mdd)`` over independent prior draws of
    the cointegration loadings and nu, in log space.

    Returns
    -------
    (log_mdd, mc_se) : pair of floats
        The log of the averaged density and the delta-method standard
        error of the log estimate.
    """
    if hyper is None:
        hyper = PriorHyper.default(spec)
    hyper.validate(spec)
    if rng is None:
        rng = np.random.default_rng(seed)
    if n_draws < 2:
        raise ValueError("n_draws must be at least 2")
    dm = y if isinstance(y, DesignMatrices) else build_design(y, spec)
    evaluate = _BatchEvaluator(dm, hyper)

    values = np.empty(n_draws)
    done = 0
    while done < n_draws:
        m = min(batch_size, n_draws - done)
        b1, b2, b_r, b_i, nu = _draw_prior_loadings(spec, hyper, rng, m)
        values[done : done + m] = evaluate(b1, b2, b_r, b_i, nu)
        done += m

    top = float(np.max(values))
    if not np.isfinite(top):
        raise NumericalError(
            "every conditional density evaluation underflowed or failed"
        )
    w = np.exp(values - top)
    mean_w = float(np.mean(w))
    log_mdd = top + math.log(mean_w)
    mc_se = float(np.std(w, ddof=1) / (math.sqrt(n_draws) * mean_w))
    return log_mdd, mc_se


# ---------------------------------------------------------------------------
# prior truncation by the stability restriction


def _batched_prior_states(spec: ModelSpec, hyper: PriorHyper, rng, n_draws: int):
    """Vectorised full prior draws of every block entering the companion."""
    n = spec.n
    # inverse Wishart via inverted Bartlett factors
    df = hyper.q
    a = np.zeros((n_draws, n, n))
    for i in range(n):
        a[:, i, i] = np.sqrt(rng.chisquare(df - i, size=n_draws))
    rows, cols = np.tril_indices(n, -1)
    if rows.size:
        a[:, rows, cols] = rng.standard_normal((n_draws, rows.size))
    c = chol_lower(hyper.S)
    m = c[None, :, :] @ np.linalg.inv(a).transpose(0, 2, 1)
    sigma = m @ m.transpose(0, 2, 1)

    if hyper.nu_fixed is not None:
        nu = np.full(n_draws, float(hyper.nu_fixed))
    else:
        nu = hyper.s_nu / rng.gamma(hyper.n_nu, size=n_draws)

    l_sigma = np.linalg.cholesky(sigma)
    sqrt_nu = np.sqrt(nu)[:, None, None]

    def a_block(mu, omega, r):
        if r == 0:
            return np.zeros((n_draws, n, 0))
        l_o = chol_lower(omega)
        z = rng.standard_normal((n_draws, n, r))
        return mu[None] + sqrt_nu * (l_sigma @ z @ l_o.T[None])

    a1 = a_block(hyper.mu1, hyper.Omega1, spec.r1)
    a2 = a_block(hyper.mu2, hyper.Omega2, spec.r2)
    r3 = spec.r3
    if r3:
        z = rng.standard_normal((n_draws, 2 * n, r3))
        half = np.zeros((n_draws, 2 * n, 2 * n))
        half[:, :n, :n] = l_sigma / math.sqrt(2.0)
        half[:, n:, n:] = l_sigma / math.sqrt(2.0)
        a_ri = hyper.mu_RI[None] + sqrt_nu * (half @ z)
        a_r, a_i = a_ri[:, :n, :], a_ri[:, n:, :]
    else:
        a_r = np.zeros((n_draws, n, 0))
        a_i = np.zeros((n_draws, n, 0))

    p = spec.n_short_run
    if p:
        l_og = chol_lower(hyper.Omega_Gamma)
        z = rng.standard_normal((n_draws, p, n))
        gamma = hyper.mu_Gamma[None] + sqrt_nu * (
            l_og[None] @ z @ np.transpose(l_sigma, (0, 2, 1))
        )
    else:
        gamma = np.zeros((n_draws, 0, n))

    b1, b2, b_r, b_i, _ = _draw_prior_loadings(spec, hyper, rng, n_draws)
    return {
        "A1": a1, "B1": b1, "A2": a2, "B2": b2,
        "A_R": a_r, "A_I": a_i, "B_R": b_r, "B_I": b_i,
        "Gamma": gamma, "nu": nu, "Sigma": sigma,
    }


def _batched_companions(blocks: dict, spec: ModelSpec) -> np.ndarray:
    n, k = spec.n, spec.k
    n_draws = blocks["nu"].shape[0]
    tr = lambda x: x.transpose(0, 2, 1)  # noqa: E731
    b1 = blocks["B1"][:, :n, :]
    b2 = blocks["B2"][:, :n, :]
    br = blocks["B_R"][:, :n, :]
    bi = blocks["B_I"][:, :n, :]
    p1 = blocks["A1"] @ tr(b1)
    p2 = blocks["A2"] @ tr(b2)
    c31 = 2.0 * (blocks["A_I"] @ tr(br) - blocks["A_R"] @ tr(bi))
    c32 = -2.0 * (blocks["A_R"] @ tr(br) + blocks["A_I"] @ tr(bi))
    gamma = blocks["Gamma"]

    def gb(i):
        if 1 <= i <= k - 4:
            return tr(gamma[:, (i - 1) * n : i * n, :])
        return np.zeros((n_draws, n, n))

    eye = np.eye(n)[None]
    coefs = [
        p1 + p2 + c31 + gb(1),
        p1 - p2 + c32 + gb(2),
        p1 + p2 - c31 + gb(3),
        eye + p1 - p2 - c32 + gb(4),
    ]
    for i in range(5, k + 1):
        coefs.append(gb(i) - gb(i - 4))

    comp = np.zeros((n_draws, n * k, n * k))
    for i, coef in enumerate(coefs):
        comp[:, :n, i * n : (i + 1) * n] = coef
    if k > 1:
        idx = np.arange(n * (k - 1))
        comp[:, n + idx, idx] = 1.0
    return comp


def _admissible_mask(
    eig: np.ndarray, spec: ModelSpec, tol_unit: float, tol_explosive: float
) -> np.ndarray:
    n = spec.n
    at_one = np.abs(eig - 1.0) <= tol_unit
    at_minus = np.abs(eig + 1.0) <= tol_unit
    at_pi = np.abs(eig - 1j) <= tol_unit
    at_mi = np.abs(eig + 1j) <= tol_unit
    matched = at_one | at_minus | at_pi | at_mi
    mod = np.abs(eig)
    ok = at_one.sum(axis=1) == n - spec.r1
    ok &= at_minus.sum(axis=1) == n - spec.r2
    ok &= at_pi.sum(axis=1) == n - spec.r3
    ok &= at_mi.sum(axis=1) == n - spec.r3
    ok &= np.all(~matched | (mod <= 1.0 + tol_explosive), axis=1)
    ok &= np.all(matched | (mod < 1.0 - tol_unit), axis=1)
    return ok


def truncation_fraction(
    spec: ModelSpec,
    hyper: Optional[PriorHyper] = None,
    n_draws: int = 50_000,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    tol_unit: float = 1e-6,
    tol_explosive: float = 1e-9,
    batch_size: int = 8_192,
) -> float:
    """Prior probability that a parameter draw passes the stability check.

    Estimated by simulating complete states from the untruncated prior and
    classifying the eigenvalues of their companion matrices.
    """
    if hyper is None:
        hyper = PriorHyper.default(spec)
    hyper.validate(spec)
    if rng is None:
        rng = np.random.default_rng(seed)
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    good = 0
    done = 0
    while done < n_draws:
        m = min(batch_size, n_draws - done)
        blocks = _batched_prior_states(spec, hyper, rng, m)
        comp = _batched_companions(blocks, spec)
        eig = np.linalg.eigvals(comp)
        good += int(_admissible_mask(eig, spec, tol_unit, tol_explosive).sum())
        done += m
    return good / n_draws


# ---------------------------------------------------------------------------
# whole-grid comparison


@dataclass
class ModelScore:
    """Scores of one candidate model."""

    spec: ModelSpec
    log_mdd: float
    mc_se: float
    trunc_fraction: float
    n_draws: int
    seed: Optional[int] = None

    @property
    def corrected_log_mdd(self) -> float:
        """Log marginal density under the stability-truncated prior."""
        if self.trunc_fraction <= 0.0:
            return -np.inf
        return self.log_mdd - math.log(self.trunc_fraction)


def score_model(
    y,
    spec: ModelSpec,
    hyper: Optional[PriorHyper] = None,
    n_draws: int = 200_000,
    n_trunc_draws: int = 50_000,
    seed: Optional[int] = None,
    tol_unit: float = 1e-6,
    tol_explosive: float = 1e-9,
) -> ModelScore:
    """Estimate the corrected marginal data density of a single model."""
    if hyper is None:
        hyper = PriorHyper.default(spec)
    if isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(seed)
    rng_mdd, rng_trunc = (np.random.default_rng(s) for s in seq.spawn(2))
    log_mdd, mc_se = estimate_log_mdd(y, spec, hyper, n_draws=n_draws, rng=rng_mdd)
    fraction = truncation_fraction(
        spec,
        hyper,
        n_draws=n_trunc_draws,
        rng=rng_trunc,
        tol_unit=tol_unit,
        tol_explosive=tol_explosive,
    )
    return ModelScore(
        spec=spec,
        log_mdd=log_mdd,
        mc_se=mc_se,
        trunc_fraction=fraction,
        n_draws=n_draws,
        seed=seed,
    )


def _score_worker(args) -> ModelScore:
    values, spec, hyper, n_draws, n_trunc_draws, seed = args
    return score_model(
        values, spec, hyper, n_draws=n_draws, n_trunc_draws=n_trunc_draws, seed=seed
    )


def compare_models(
    y,
    grid: ModelGrid,
    hyper_factory: Optional[Callable[[ModelSpec], PriorHyper]] = None,
    n_draws: int = 200_000,
    n_trunc_draws: int = 50_000,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> list:
    """Score every model of a grid; order of results follows the grid.

    Each model gets an independent child seed spawned from ``seed``, so
    results do not depend on the number of workers.
    """
    values = y.values if isinstance(y, QuarterlySeries) else np.asarray(y, dtype=float)
    if hyper_factory is None:
        hyper_factory = PriorHyper.default
    child_seeds = np.random.SeedSequence(seed).spawn(len(grid.specs))
    tasks = [
        (values, spec, hyper_factory(spec), n_draws, n_trunc_draws, child)
        for spec, child in zip(grid.specs, child_seeds)
    ]
    if workers is None or workers <= 1:
        return [_score_worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_score_worker, tasks))


def model_posteriors(scores, prior_probs=None) -> np.ndarray:
    """Posterior model probabilities from corrected log densities."""
    scores = list(scores)
    if prior_probs is None:
        prior_probs = np.full(len(scores), 1.0 / len(scores))
    prior_probs = np.asarray(prior_probs, dtype=float)
    if prior_probs.shape != (len(scores),):
        raise ValueError("prior_probs length must match the number of scores")
    if np.any(prior_probs < 0) or not np.isclose(prior_probs.sum(), 1.0):
        raise ValueError("prior_probs must be a probability vector")
    log_post = np.array(
        [
            (math.log(p) if p > 0 else -np.inf) + s.corrected_log_mdd
            for p, s in zip(prior_probs, scores)
        ]
    )
    if not np.any(np.isfinite(log_post)):
        raise NumericalError("no model has a finite corrected log density")
    return np.exp(log_post - logsumexp(log_post))


def feature_marginals(grid: ModelGrid, posterior: np.ndarray) -> dict:
    """Prior and posterior probabilities of each model feature value.

    Returns ``{feature: {value: {"prior": p, "posterior": q}}}`` for the
    features d, s, r1, r2, r3.
    """
    posterior = np.asarray(posterior, dtype=float)
    if posterior.shape != (len(grid.specs),):
        raise ValueError("posterior length must match the grid")
    out: dict = {}
    for feature in ("d", "s", "r1", "r2", "r3"):
        table: dict = {}
        for spec, pri, post in zip(grid.specs, grid.prior_probs, posterior):
            val = getattr(spec, feature)
            slot = table.setdefault(val, {"prior": 0.0, "posterior": 0.0})
            slot["prior"] += float(pri)
            slot["posterior"] += float(post)
        out[feature] = dict(sorted(table.items()))
    return out
