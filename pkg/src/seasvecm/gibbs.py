"""Gibbs sampler for the seasonal error-correction model.

The sampler cycles through the full conditional posteriors of

    Sigma, nu, Gamma, A1, B1, A2, B2, (A_R, A_I), B_R, B_I

in that order, renormalising each cointegration pair to its alpha/beta
representation after the pair is refreshed.  A candidate sweep is accepted
only if the implied levels VAR companion matrix carries exactly the
seasonal unit roots the ranks require and no explosive or stray near-unit
roots; rejected sweeps are retried from the last accepted state.

Every ``*_conditional`` function returns the exact parameters of the
corresponding conditional distribution so they can be validated directly;
the ``draw_*`` wrappers sample from them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .errors import ChainError, NumericalError
from .linalg import build_companion, stability_check
from .pipeline import DesignMatrices, ModelSpec, build_design
from .priors import ParamState, PriorHyper, sample_prior_state
from .sampling import chol_lower, draw_inv_gamma, draw_inv_wishart

__all__ = [
    "ChainOutput",
    "complex_carriers",
    "residual",
    "sigma_conditional",
    "nu_conditional",
    "gamma_conditional",
    "adjustment_conditional",
    "adjustment_annual_conditional",
    "loading_conditional",
    "loading_annual_conditional",
    "draw_sigma",
    "draw_nu",
    "draw_gamma",
    "gibbs_sweep",
    "run_chain",
    "effective_sample_size",
]


def complex_carriers(dm: DesignMatrices, b_r: np.ndarray, b_i: np.ndarray):
    """Real regressors of the annual-frequency adjustment coefficients.

    With ``Z3 = -Z32 - i Z31`` the annual term satisfies
    ``2 Re(Z3 conj(B*) A*') = X_R A_R' + X_I A_I'`` for

        X_R = -2 Z32 B_R - 2 Z31 B_I,
        X_I =  2 Z31 B_R - 2 Z32 B_I.
    """
    x_r = -2.0 * dm.Z32 @ b_r - 2.0 * dm.Z31 @ b_i
    x_i = 2.0 * dm.Z31 @ b_r - 2.0 * dm.Z32 @ b_i
    return x_r, x_i


def _fitted_parts(state: ParamState, dm: DesignMatrices) -> dict:
    x_r, x_i = complex_carriers(dm, state.B_R, state.B_I)
    return {
        "zero": dm.Z1 @ state.B1 @ state.A1.T,
        "biannual": dm.Z2 @ state.B2 @ state.A2.T,
        "annual": x_r @ state.A_R.T + x_i @ state.A_I.T,
        "short_run": dm.Z4 @ state.Gamma,
    }


def residual(state: ParamState, dm: DesignMatrices, skip: tuple = ()) -> np.ndarray:
    """``Z0`` minus the fitted mean, optionally leaving out named blocks.

    Block names: ``zero``, ``biannual``, ``annual``, ``short_run``.
    """
    out = dm.Z0.copy()
    for name, part in _fitted_parts(state, dm).items():
        if name not in skip:
            out -= part
    return out


def _spd_inverse(a: np.ndarray) -> np.ndarray:
    if a.shape[0] == 0:
        return a.copy()
    c = cho_factor(0.5 * (a + a.T), lower=True)
    return cho_solve(c, np.eye(a.shape[0]))


def _prior_square_terms(state: ParamState, hyper: PriorHyper) -> np.ndarray:
    """The (n, n) sum of prior quadratic forms shared by the Sigma and nu
    conditionals (without the 1/nu factor)."""
    n = state.Sigma.shape[0]
    out = np.zeros((n, n))
    if state.Gamma.shape[0]:
        dg = state.Gamma - hyper.mu_Gamma
        out += dg.T @ np.linalg.solve(hyper.Omega_Gamma, dg)
    if state.A1.shape[1]:
        d1 = state.A1 - hyper.mu1
        out += d1 @ np.linalg.solve(hyper.Omega1, d1.T)
    if state.A2.shape[1]:
        d2 = state.A2 - hyper.mu2
        out += d2 @ np.linalg.solve(hyper.Omega2, d2.T)
    if state.A_R.shape[1]:
        dr = state.A_R - hyper.mu_R
        di = state.A_I - hyper.mu_I
        out += 2.0 * (dr @ dr.T + di @ di.T)
    return out


def _shrunk_block_size(spec: ModelSpec) -> int:
    """Total column count of the blocks shrunk by nu."""
    return spec.n_short_run + spec.r1 + spec.r2 + 2 * spec.r3


def sigma_conditional(state: ParamState, dm: DesignMatrices, hyper: PriorHyper):
    """Scale matrix and degrees of freedom of the inverse-Wishart conditional."""
    spec = dm.spec
    e = residual(state, dm)
    s_bar = hyper.S + _prior_square_terms(state, hyper) / state.nu + e.T @ e
    dof = hyper.q + _shrunk_block_size(spec) + dm.n_modeled
    return 0.5 * (s_bar + s_bar.T), float(dof)


def draw_sigma(
    state: ParamState, dm: DesignMatrices, hyper: PriorHyper, rng: np.random.Generator
) -> np.ndarray:
    s_bar, dof = sigma_conditional(state, dm, hyper)
    try:
        return draw_inv_wishart(rng, s_bar, dof)
    except np.linalg.LinAlgError as exc:
        eig = np.linalg.eigvalsh(s_bar)
        raise NumericalError(
            f"conditional scale matrix not positive definite "
            f"(eigenvalue range [{eig.min():.3e}, {eig.max():.3e}])"
        ) from exc


def nu_conditional(state: ParamState, dm: DesignMatrices, hyper: PriorHyper):
    """(scale, shape) of the inverse-gamma conditional of nu."""
    spec = dm.spec
    n_bar = hyper.n_nu + 0.5 * spec.n * _shrunk_block_size(spec)
    quad = _prior_square_terms(state, hyper)
    s_bar = hyper.s_nu + 0.5 * float(np.trace(np.linalg.solve(state.Sigma, quad)))
    return float(s_bar), float(n_bar)


def draw_nu(
    state: ParamState, dm: DesignMatrices, hyper: PriorHyper, rng: np.random.Generator
) -> float:
    if hyper.nu_fixed is not None:
        raise ValueError("nu is fixed in the prior; it has no conditional to draw")
    s_bar, n_bar = nu_conditional(state, dm, hyper)
    return draw_inv_gamma(rng, n_bar, s_bar)


def gamma_conditional(state: ParamState, dm: DesignMatrices, hyper: PriorHyper):
    """(mean, row scale) of the matrix-normal conditional of Gamma.

    The column scale is the current Sigma.
    """
    p = dm.spec.n_short_run
    if p == 0:
        return np.zeros((0, dm.spec.n)), np.zeros((0, 0))
    target = residual(state, dm, skip=("short_run",))
    omega_inv = _spd_inverse(hyper.Omega_Gamma)
    prec = omega_inv / state.nu + dm.Z4.T @ dm.Z4
    rhs = omega_inv @ hyper.mu_Gamma / state.nu + dm.Z4.T @ target
    omega_bar = _spd_inverse(prec)
    return omega_bar @ rhs, omega_bar


def draw_gamma(
    state: ParamState, dm: DesignMatrices, hyper: PriorHyper, rng: np.random.Generator
) -> np.ndarray:
    mean, omega_bar = gamma_conditional(state, dm, hyper)
    if mean.shape[0] == 0:
        return mean
    z = rng.standard_normal(mean.shape)
    return mean + chol_lower(omega_bar) @ z @ chol_lower(state.Sigma).T


def adjustment_conditional(
    state: ParamState, dm: DesignMatrices, hyper: PriorHyper, frequency: str
):
    """(mean, column scale) of the conditional of A1 or A2.

    The row scale is the current Sigma.  ``frequency`` is ``"zero"`` or
    ``"biannual"``.
    """
    if frequency == "zero":
        z, b, mu, omega = dm.Z1, state.B1, hyper.mu1, hyper.Omega1
    elif frequency == "biannual":
        z, b, mu, omega = dm.Z2, state.B2, hyper.mu2, hyper.Omega2
    else:
        raise ValueError(f"unknown frequency {frequency!r}")
    r = b.shape[1]
    if r == 0:
        return np.zeros((dm.spec.n, 0)), np.zeros((0, 0))
    target = residual(state, dm, skip=(frequency,))
    w = z @ b
    omega_inv = _spd_inverse(omega)
    prec = omega_inv / state.nu + w.T @ w
    omega_bar = _spd_inverse(prec)
    mean = (mu @ omega_inv / state.nu + target.T @ w) @ omega_bar
    return mean, omega_bar


def _draw_adjustment(state, dm, hyper, frequency, rng):
    mean, omega_bar = adjustment_conditional(state, dm, hyper, frequency)
    if mean.shape[1] == 0:
        return mean
    z = rng.standard_normal(mean.shape)
    return mean + chol_lower(state.Sigma) @ z @ chol_lower(omega_bar).T


def adjustment_annual_conditional(state: ParamState, dm: DesignMatrices, hyper: PriorHyper):
    """(mean, row scale) of the stacked (A_R'; A_I')' conditional.

    Returns the (2 r3, n) posterior mean of the stacked transposed
    adjustments and its (2 r3, 2 r3) row scale; the column scale is the
    current Sigma.
    """
    r3 = state.B_R.shape[1]
    n = dm.spec.n
    if r3 == 0:
        return np.zeros((0, n)), np.zeros((0, 0))
    target = residual(state, dm, skip=("annual",))
    x_r, x_i = complex_carriers(dm, state.B_R, state.B_I)
    x = np.hstack([x_r, x_i])
    prec = (2.0 / state.nu) * np.eye(2 * r3) + x.T @ x
    omega_bar = _spd_inverse(prec)
    mu_stack = np.vstack([hyper.mu_R.T, hyper.mu_I.T])
    mean = omega_bar @ ((2.0 / state.nu) * mu_stack + x.T @ target)
    return mean, omega_bar


def _draw_adjustment_annual(state, dm, hyper, rng):
    mean, omega_bar = adjustment_annual_conditional(state, dm, hyper)
    r3 = state.B_R.shape[1]
    if r3 == 0:
        return state.A_R.copy(), state.A_I.copy()
    z = rng.standard_normal(mean.shape)
    stacked = mean + chol_lower(omega_bar) @ z @ chol_lower(state.Sigma).T
    return stacked[:r3, :].T, stacked[r3:, :].T


def loading_conditional(
    state: ParamState, dm: DesignMatrices, hyper: PriorHyper, frequency: str
):
    """(mean, covariance) of vec(B1) or vec(B2), column-major vec."""
    if frequency == "zero":
        z, a, p_mat, m_w = dm.Z1, state.A1, hyper.P1, dm.spec.m1
    elif frequency == "biannual":
        z, a, p_mat, m_w = dm.Z2, state.A2, hyper.P2, dm.spec.m2
    else:
        raise ValueError(f"unknown frequency {frequency!r}")
    r = a.shape[1]
    if r == 0:
        return np.zeros(0), np.zeros((0, 0))
    target = residual(state, dm, skip=(frequency,))
    sigma_inv_a = np.linalg.solve(state.Sigma, a)
    prec = m_w * np.kron(np.eye(r), _spd_inverse(p_mat)) + np.kron(
        a.T @ sigma_inv_a, z.T @ z
    )
    cov = _spd_inverse(prec)
    mean = cov @ (z.T @ target @ sigma_inv_a).reshape(-1, order="F")
    return mean, cov


def loading_annual_conditional(
    state: ParamState, dm: DesignMatrices, hyper: PriorHyper, part: str
):
    """(mean, covariance) of vec(B_R) (``part="real"``) or vec(B_I).

    The prior couples B_R and B_I through the Hermitian parameter
    ``P_star = P_R + i P_I``; conditioning one part on the other yields a
    Gaussian with precision ``2 m3 (I kron Q^{-1})``,
    ``Q = P_R + P_I P_R^{-1} P_I``, and a mean shift proportional to
    ``P_I P_R^{-1}`` applied to the other part.
    """
    spec = dm.spec
    r3 = state.A_R.shape[1]
    if r3 == 0:
        return np.zeros(0), np.zeros((0, 0))
    sigma_inv = _spd_inverse(state.Sigma)
    a_r, a_i = state.A_R, state.A_I
    c3131 = dm.Z31.T @ dm.Z31
    c3132 = dm.Z31.T @ dm.Z32
    c3232 = dm.Z32.T @ dm.Z32
    pr_inv = _spd_inverse(hyper.P_R)
    q_mat = hyper.P_R + hyper.P_I @ pr_inv @ hyper.P_I
    q_inv = _spd_inverse(q_mat)
    shift = q_inv @ hyper.P_I @ pr_inv

    if part == "real":
        base = residual(state, dm)
        x_r, x_i = complex_carriers(dm, state.B_R, state.B_I)
        # target with every B_R term removed but the B_I terms kept
        target = base + x_r @ a_r.T + x_i @ a_i.T
        target -= -2.0 * dm.Z31 @ state.B_I @ a_r.T - 2.0 * dm.Z32 @ state.B_I @ a_i.T
        prec = 4.0 * (
            np.kron(a_i.T @ sigma_inv @ a_i, c3131)
            - np.kron(a_i.T @ sigma_inv @ a_r, c3132)
            - np.kron(a_r.T @ sigma_inv @ a_i, c3132.T)
            + np.kron(a_r.T @ sigma_inv @ a_r, c3232)
        ) + 2.0 * spec.m3 * np.kron(np.eye(r3), q_inv)
        lin = 2.0 * (
            dm.Z31.T @ target @ sigma_inv @ a_i - dm.Z32.T @ target @ sigma_inv @ a_r
        )
        lin -= 2.0 * spec.m3 * shift @ state.B_I
    elif part == "imag":
        base = residual(state, dm)
        x_r, x_i = complex_carriers(dm, state.B_R, state.B_I)
        target = base + x_r @ a_r.T + x_i @ a_i.T
        target -= -2.0 * dm.Z32 @ state.B_R @ a_r.T + 2.0 * dm.Z31 @ state.B_R @ a_i.T
        prec = 4.0 * (
            np.kron(a_r.T @ sigma_inv @ a_r, c3131)
            + np.kron(a_r.T @ sigma_inv @ a_i, c3132)
            + np.kron(a_i.T @ sigma_inv @ a_r, c3132.T)
            + np.kron(a_i.T @ sigma_inv @ a_i, c3232)
        ) + 2.0 * spec.m3 * np.kron(np.eye(r3), q_inv)
        lin = -2.0 * (
            dm.Z31.T @ target @ sigma_inv @ a_r + dm.Z32.T @ target @ sigma_inv @ a_i
        )
        lin += 2.0 * spec.m3 * shift @ state.B_R
    else:
        raise ValueError(f"part must be 'real' or 'imag', got {part!r}")

    cov = _spd_inverse(prec)
    mean = cov @ lin.reshape(-1, order="F")
    return mean, cov


def _draw_vec(mean: np.ndarray, cov: np.ndarray, shape: tuple, rng) -> np.ndarray:
    if mean.size == 0:
        return np.zeros(shape)
    draw = mean + chol_lower(cov) @ rng.standard_normal(mean.size)
    return draw.reshape(shape, order="F")


def gibbs_sweep(
    state: ParamState,
    dm: DesignMatrices,
    hyper: PriorHyper,
    rng: np.random.Generator,
) -> ParamState:
    """One systematic-scan update of every parameter block.

    Returns a new candidate state; the caller decides whether to accept it
    (the sweep itself applies no admissibility restriction).
    """
    spec = dm.spec
    new = state.copy()
    new.Sigma = draw_sigma(new, dm, hyper, rng)
    if hyper.nu_fixed is None:
        new.nu = draw_nu(new, dm, hyper, rng)
    new.Gamma = draw_gamma(new, dm, hyper, rng)

    new.A1 = _draw_adjustment(new, dm, hyper, "zero", rng)
    mean, cov = loading_conditional(new, dm, hyper, "zero")
    new.B1 = _draw_vec(mean, cov, (spec.m1, spec.r1), rng)

    new.A2 = _draw_adjustment(new, dm, hyper, "biannual", rng)
    mean, cov = loading_conditional(new, dm, hyper, "biannual")
    new.B2 = _draw_vec(mean, cov, (spec.m2, spec.r2), rng)

    new.A_R, new.A_I = _draw_adjustment_annual(new, dm, hyper, rng)
    mean, cov = loading_annual_conditional(new, dm, hyper, "real")
    new.B_R = _draw_vec(mean, cov, (spec.m3, spec.r3), rng)
    mean, cov = loading_annual_conditional(new, dm, hyper, "imag")
    new.B_I = _draw_vec(mean, cov, (spec.m3, spec.r3), rng)

    return new.normalized()


@dataclass
class ChainOutput:
    """Stored posterior draws plus bookkeeping from one sampler run."""

    draws: list
    spec: ModelSpec
    attempted: int
    accepted: int
    burn_in: int
    thin: int
    seed: Optional[int] = None

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempted if self.attempted else 0.0

    def stack(self, getter) -> np.ndarray:
        """Stack ``getter(state)`` over the stored draws."""
        return np.array([getter(s) for s in self.draws])


ACCEPTANCE_FLOOR = 1e-3


def run_chain(
    y,
    spec: ModelSpec,
    hyper: Optional[PriorHyper] = None,
    *,
    burn_in: int = 1000,
    keep: int = 5000,
    thin: int = 1,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    tol_unit: float = 1e-6,
    tol_explosive: float = 1e-9,
    max_attempts: Optional[int] = None,
    initial: Optional[ParamState] = None,
) -> ChainOutput:
    """Run the posterior sampler on a quarterly sample.

    Parameters
    ----------
    y : QuarterlySeries or (T_raw, n) array_like
    spec : ModelSpec
    hyper : PriorHyper, optional
        Defaults to :meth:`PriorHyper.default`.
    burn_in, keep, thin : int
        Accepted draws to discard, draws to store, thinning stride.
    seed : int, optional
        Seeds a fresh generator when ``rng`` is not given.
    max_attempts : int, optional
        Hard cap on candidate sweeps; defaults to 1000 per required
        accepted draw (an overall acceptance floor of 1e-3).
    initial : ParamState, optional
        Starting state; defaults to an admissible prior draw.

    Returns
    -------
    ChainOutput
        ``keep`` stored states, every one passing the stability check.
    """
    if burn_in < 0 or keep < 0 or thin < 1:
        raise ValueError("burn_in must be >= 0, keep >= 0, thin >= 1")
    if hyper is None:
        hyper = PriorHyper.default(spec)
    hyper.validate(spec)
    if rng is None:
        rng = np.random.default_rng(seed)
    dm = build_design(y, spec)

    needed = burn_in + keep * thin
    if max_attempts is None:
        max_attempts = int(needed / ACCEPTANCE_FLOOR)

    def admissible(s: ParamState) -> bool:
        report = stability_check(
            build_companion(s, spec), spec, tol_unit=tol_unit, tol_explosive=tol_explosive
        )
        return report.is_admissible

    state = initial
    if state is None:
        for _ in range(5000):
            cand = sample_prior_state(spec, hyper, rng)
            if admissible(cand):
                state = cand
                break
        if state is None:
            raise ChainError(
                "could not find an admissible prior draw to start from in "
                "5000 attempts; the prior may be inconsistent with the ranks"
            )
    elif not admissible(state):
        raise ValueError("initial state fails the stability check")

    draws: list = []
    attempted = accepted = 0
    while accepted < needed:
        if attempted >= max_attempts:
            raise ChainError(
                f"sampler exhausted {max_attempts} attempts with {accepted} "
                f"accepted draws (rate {accepted / max(attempted, 1):.2e}); "
                f"needed {needed}"
            )
        try:
            candidate = gibbs_sweep(state, dm, hyper, rng)
            ok = admissible(candidate)
        except (np.linalg.LinAlgError, ValueError):
            ok = False
            candidate = None
        attempted += 1
        if attempted >= 10000 and accepted / attempted < ACCEPTANCE_FLOOR:
            raise ChainError(
                f"acceptance rate {accepted / attempted:.2e} below floor "
                f"{ACCEPTANCE_FLOOR:.0e} after {attempted} attempts"
            )
        if not ok:
            continue
        state = candidate
        accepted += 1
        if accepted > burn_in and (accepted - burn_in) % thin == 0:
            draws.append(state)
            if len(draws) == keep:
                break

    return ChainOutput(
        draws=draws,
        spec=spec,
        attempted=attempted,
        accepted=accepted,
        burn_in=burn_in,
        thin=thin,
        seed=seed,
    )


def effective_sample_size(x) -> float:
    """Effective sample size of a scalar chain via the initial positive
    sequence estimator on autocovariances."""
    x = np.asarray(x, dtype=float)
    m = x.size
    if m < 4:
        return float(m)
    x = x - x.mean()
    var = float(x @ x) / m
    if var <= 0:
        return float(m)
    # autocovariances via FFT
    nfft = 1 << (2 * m - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:m].real / m
    rho = acov / acov[0]
    # sum consecutive pairs until a pair goes non-positive
    s = 0.0
    for j in range(1, m // 2):
        pair = rho[2 * j - 1] + rho[2 * j]
        if pair <= 0:
            break
        s += pair
    ess = m / (1.0 + 2.0 * s)
    return float(min(max(ess, 1.0), m))
