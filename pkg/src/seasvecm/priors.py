"""Prior specification and sampling for the seasonal error-correction model.

The conjugate prior family, conditional on the error covariance ``Sigma``
and a scalar shrinkage factor ``nu``:

* ``Sigma ~ iW(S, q)``
* ``nu ~ iG(s_nu, n_nu)`` (density ``nu^{-n_nu-1} exp(-s_nu/nu)``), or fixed
* ``Gamma | Sigma, nu ~ mN(mu_Gamma, Sigma, nu * Omega_Gamma)``
* ``A1 | Sigma, nu ~ mN(mu1, nu * Omega1, Sigma)`` and likewise ``A2``
* stacked ``(A_R; A_I) | Sigma, nu ~ mN((mu_R; mu_I), nu * I, diag(Sigma/2, Sigma/2))``
* ``B1 ~ mN(0, I/m1, P1)`` so the span of ``B1`` is matrix angular central
  Gaussian with parameter ``P1``; ``B2`` likewise with ``(m2, P2)``
* stacked ``(B_R; B_I) ~ mN(0, I/m3, C)`` with
  ``C = [[P_R, -P_I], [P_I, P_R]] / 2``, the real form of a complex matrix
  angular central Gaussian with Hermitian parameter ``P_star = P_R + i P_I``.

``mN(M, V, U)`` denotes the matrix normal with ``vec(X) ~ N(vec M, V kron U)``
under column-major vec, i.e. ``V`` couples columns and ``U`` couples rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import normalize_pair
from .pipeline import ModelSpec
from .sampling import chol_lower, draw_inv_gamma, draw_inv_wishart, draw_matrix_normal

__all__ = ["PriorHyper", "ParamState", "sample_prior_state", "log_prior_density_B_nu"]


def _check_spd(name: str, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if a.size and np.max(np.abs(a - a.T)) > 1e-10 * max(1.0, np.max(np.abs(a))):
        raise ValueError(f"{name} must be symmetric")
    if a.size:
        try:
            np.linalg.cholesky(0.5 * (a + a.T))
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"{name} must be positive definite") from exc
    return 0.5 * (a + a.T)


@dataclass
class PriorHyper:
    """Hyperparameters of the conjugate prior for one model specification.

    Use :meth:`default` to build the standard weakly-informative setting:
    ``S = 0.1 I``, ``q = n + 2``, zero location matrices, identity column
    scales, ``P = 0.1 I`` for every cointegration block and
    ``nu ~ iG(1, 1)``.
    """

    S: np.ndarray
    q: float
    mu_Gamma: np.ndarray
    Omega_Gamma: np.ndarray
    mu1: np.ndarray
    Omega1: np.ndarray
    mu2: np.ndarray
    Omega2: np.ndarray
    mu_R: np.ndarray
    mu_I: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    P_R: np.ndarray
    P_I: np.ndarray
    s_nu: float = 1.0
    n_nu: float = 1.0
    nu_fixed: Optional[float] = None

    @classmethod
    def default(
        cls,
        spec: ModelSpec,
        scale: float = 0.1,
        p_scale: float = 0.1,
        s_nu: float = 1.0,
        n_nu: float = 1.0,
        nu_fixed: Optional[float] = None,
    ) -> "PriorHyper":
        n, p = spec.n, spec.n_short_run
        return cls(
            S=scale * np.eye(n),
            q=n + 2,
            mu_Gamma=np.zeros((p, n)),
            Omega_Gamma=np.eye(p),
            mu1=np.zeros((n, spec.r1)),
            Omega1=np.eye(spec.r1),
            mu2=np.zeros((n, spec.r2)),
            Omega2=np.eye(spec.r2),
            mu_R=np.zeros((n, spec.r3)),
            mu_I=np.zeros((n, spec.r3)),
            P1=p_scale * np.eye(spec.m1),
            P2=p_scale * np.eye(spec.m2),
            P_R=p_scale * np.eye(spec.m3),
            P_I=np.zeros((spec.m3, spec.m3)),
            s_nu=s_nu,
            n_nu=n_nu,
            nu_fixed=nu_fixed,
        )

    def validate(self, spec: ModelSpec) -> "PriorHyper":
        """Check shapes and definiteness against a model specification."""
        n, p = spec.n, spec.n_short_run
        self.S = _check_spd("S", self.S)
        if self.S.shape[0] != n:
            raise ValueError(f"S must be {n}x{n}")
        if self.q <= n - 1:
            raise ValueError(f"q must exceed n - 1 = {n - 1}")
        self.mu_Gamma = np.asarray(self.mu_Gamma, dtype=float).reshape(p, n)
        self.Omega_Gamma = _check_spd("Omega_Gamma", self.Omega_Gamma)
        if self.Omega_Gamma.shape[0] != p:
            raise ValueError(f"Omega_Gamma must be {p}x{p}")
        for label, mu, omega, r in (
            ("1", self.mu1, self.Omega1, spec.r1),
            ("2", self.mu2, self.Omega2, spec.r2),
        ):
            if np.asarray(mu).shape != (n, r):
                raise ValueError(f"mu{label} must be {n}x{r}")
            om = _check_spd(f"Omega{label}", omega)
            if om.shape[0] != r:
                raise ValueError(f"Omega{label} must be {r}x{r}")
        for label, mu in (("mu_R", self.mu_R), ("mu_I", self.mu_I)):
            if np.asarray(mu).shape != (n, spec.r3):
                raise ValueError(f"{label} must be {n}x{spec.r3}")
        self.P1 = _check_spd("P1", self.P1)
        self.P2 = _check_spd("P2", self.P2)
        self.P_R = _check_spd("P_R", self.P_R)
        if self.P1.shape[0] != spec.m1 or self.P2.shape[0] != spec.m2:
            raise ValueError("P1/P2 dimensions must match m1/m2")
        if self.P_R.shape[0] != spec.m3:
            raise ValueError("P_R dimension must match m3")
        self.P_I = np.asarray(self.P_I, dtype=float)
        if self.P_I.shape != (spec.m3, spec.m3):
            raise ValueError("P_I dimension must match m3")
        if np.max(np.abs(self.P_I + self.P_I.T), initial=0.0) > 1e-10:
            raise ValueError("P_I must be antisymmetric")
        _check_spd("realified P_star", self.annual_loading_cov() * 2.0)
        if self.nu_fixed is None and (self.s_nu <= 0 or self.n_nu <= 0):
            raise ValueError("s_nu and n_nu must be positive")
        if self.nu_fixed is not None and self.nu_fixed <= 0:
            raise ValueError("nu_fixed must be positive")
        return self

    def annual_loading_cov(self) -> np.ndarray:
        """Column covariance ``C`` of the stacked (B_R; B_I) block."""
        return 0.5 * np.block([[self.P_R, -self.P_I], [self.P_I, self.P_R]])

    @property
    def mu_RI(self) -> np.ndarray:
        """Stacked location of (A_R; A_I), shape (2n, r3)."""
        return np.vstack([self.mu_R, self.mu_I])


@dataclass
class ParamState:
    """One draw of all model parameters.

    ``Gamma`` stacks the transposed short-run coefficients row-wise
    (``n (k-4) + l`` rows).  The cointegration pairs are stored in the
    unnormalised A/B form used by the sampler together with the
    normalised alpha/beta representation (``beta`` has orthonormal
    columns, ``alpha beta' = A B'``).
    """

    Sigma: np.ndarray
    nu: float
    Gamma: np.ndarray
    A1: np.ndarray
    B1: np.ndarray
    A2: np.ndarray
    B2: np.ndarray
    A_R: np.ndarray
    A_I: np.ndarray
    B_R: np.ndarray
    B_I: np.ndarray
    alpha1: np.ndarray = field(default=None, repr=False)
    beta1: np.ndarray = field(default=None, repr=False)
    alpha2: np.ndarray = field(default=None, repr=False)
    beta2: np.ndarray = field(default=None, repr=False)
    alpha_star: np.ndarray = field(default=None, repr=False)
    beta_star: np.ndarray = field(default=None, repr=False)

    @property
    def A_star(self) -> np.ndarray:
        return self.A_R + 1j * self.A_I

    @property
    def B_star(self) -> np.ndarray:
        return self.B_R + 1j * self.B_I

    def normalized(self) -> "ParamState":
        """Fill the alpha/beta representation from the A/B blocks."""
        self.alpha1, self.beta1 = normalize_pair(self.A1, self.B1)
        self.alpha2, self.beta2 = normalize_pair(self.A2, self.B2)
        self.alpha_star, self.beta_star = normalize_pair(self.A_star, self.B_star)
        return self

    def copy(self) -> "ParamState":
        return ParamState(
            **{
                f: (getattr(self, f).copy() if isinstance(getattr(self, f), np.ndarray) else getattr(self, f))
                for f in (
                    "Sigma",
                    "nu",
                    "Gamma",
                    "A1",
                    "B1",
                    "A2",
                    "B2",
                    "A_R",
                    "A_I",
                    "B_R",
                    "B_I",
                    "alpha1",
                    "beta1",
                    "alpha2",
                    "beta2",
                    "alpha_star",
                    "beta_star",
                )
                if getattr(self, f) is not None or f in ("nu",)
            }
        )


def sample_prior_state(
    spec: ModelSpec, hyper: PriorHyper, rng: np.random.Generator
) -> ParamState:
    """Draw a complete parameter state from the (untruncated) prior."""
    n = spec.n
    sigma = draw_inv_wishart(rng, hyper.S, hyper.q)
    if hyper.nu_fixed is not None:
        nu = float(hyper.nu_fixed)
    else:
        nu = draw_inv_gamma(rng, hyper.n_nu, hyper.s_nu)

    p = spec.n_short_run
    gamma = draw_matrix_normal(rng, hyper.mu_Gamma, nu * hyper.Omega_Gamma, sigma)

    a1 = draw_matrix_normal(rng, hyper.mu1, sigma, nu * hyper.Omega1)
    a2 = draw_matrix_normal(rng, hyper.mu2, sigma, nu * hyper.Omega2)
    half = np.zeros((2 * n, 2 * n))
    half[:n, :n] = 0.5 * sigma
    half[n:, n:] = 0.5 * sigma
    a_ri = draw_matrix_normal(rng, hyper.mu_RI, half, nu * np.eye(spec.r3))

    b1 = draw_matrix_normal(
        rng, np.zeros((spec.m1, spec.r1)), hyper.P1, np.eye(spec.r1) / spec.m1
    )
    b2 = draw_matrix_normal(
        rng, np.zeros((spec.m2, spec.r2)), hyper.P2, np.eye(spec.r2) / spec.m2
    )
    b_ri = draw_matrix_normal(
        rng,
        np.zeros((2 * spec.m3, spec.r3)),
        hyper.annual_loading_cov(),
        np.eye(spec.r3) / spec.m3,
    )

    state = ParamState(
        Sigma=sigma,
        nu=nu,
        Gamma=gamma if p else np.zeros((0, n)),
        A1=a1,
        B1=b1,
        A2=a2,
        B2=b2,
        A_R=a_ri[:n, :],
        A_I=a_ri[n:, :],
        B_R=b_ri[: spec.m3, :],
        B_I=b_ri[spec.m3 :, :],
    )
    return state.normalized()


def _mn_zero_logpdf(x: np.ndarray, col_cov_scale: float, row_cov: np.ndarray) -> float:
    """log density of mN(0, col_cov_scale * I, row_cov) at x (columns iid)."""
    m, r = x.shape
    if r == 0 or m == 0:
        return 0.0
    cov = col_cov_scale * row_cov
    l = chol_lower(cov)
    z = np.linalg.solve(l, x)
    logdet = 2.0 * np.sum(np.log(np.diag(l)))
    quad = float(np.sum(z * z))
    return -0.5 * (r * m * np.log(2.0 * np.pi) + r * logdet + quad)


def log_prior_density_B_nu(state: ParamState, spec: ModelSpec, hyper: PriorHyper) -> float:
    """Exact log prior density of the cointegration loadings and of ``nu``.

    Covers ``B1``, ``B2``, the stacked ``(B_R; B_I)`` and, when it is
    estimated, the inverse-gamma factor for ``nu``.  The conditional
    Sigma/nu factors of the remaining blocks are not included.
    """
    total = _mn_zero_logpdf(state.B1, 1.0 / spec.m1, hyper.P1)
    total += _mn_zero_logpdf(state.B2, 1.0 / spec.m2, hyper.P2)
    b_ri = np.vstack([state.B_R, state.B_I])
    total += _mn_zero_logpdf(b_ri, 1.0 / spec.m3, hyper.annual_loading_cov())
    if hyper.nu_fixed is None:
        from scipy.special import gammaln

        a, s = hyper.n_nu, hyper.s_nu
        if state.nu <= 0:
            return -np.inf
        total += a * np.log(s) - gammaln(a) - (a + 1.0) * np.log(state.nu) - s / state.nu
    return float(total)
