"""Estimator-style interface over the sampler and the model comparison.

Both classes follow the scikit-learn contract: constructor arguments are
stored untouched, all work happens in ``fit``, and fitted results live in
trailing-underscore attributes.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator

from . import compare as _compare
from .gibbs import effective_sample_size, run_chain
from .pipeline import ModelSpec, QuarterlySeries, build_design
from .priors import PriorHyper
from .subspace import summarize_draws

__all__ = ["SeasonalVECM", "SeasonalModelComparison"]

_FREQ_ATTRS = {
    "zero": ("beta1", "r1", "Z1"),
    "biannual": ("beta2", "r2", "Z2"),
    "annual": ("beta_star", "r3", "Z3"),
}


def _validate_panel(x, min_rows: int) -> np.ndarray:
    """Coerce input to a finite 2-D float array with enough rows."""
    if isinstance(x, QuarterlySeries):
        values = x.values
    elif isinstance(x, pd.DataFrame):
        values = x.to_numpy(dtype=float)
    else:
        values = np.asarray(x, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.ndim != 2:
        raise ValueError(f"expected a 2-D sample, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample contains missing or non-finite entries")
    if values.shape[0] < min_rows:
        raise ValueError(
            f"need at least {min_rows} observations, got {values.shape[0]}"
        )
    return values


class SeasonalVECM(BaseEstimator):
    """Bayesian seasonal vector error-correction model for quarterly data.

    Parameters
    ----------
    r1, r2, r3 : int
        Cointegration ranks at the zero, bi-annual and annual frequencies.
    k : int
        Levels lag order (at least 4).
    d : int
        Deterministic-term case (1..4), see :class:`ModelSpec`.
    s : int
        1 includes restricted seasonal dummies.
    hyper : PriorHyper, optional
        Prior hyperparameters; default built from the specification.
    burn_in, keep, thin : int
        Sampler schedule (accepted draws).
    estimate_nu : bool
        If False, fixes the shrinkage scalar at ``nu_value``.
    nu_value : float
        Value of nu when ``estimate_nu`` is False.
    seed : int
        Random seed.

    Attributes
    ----------
    chain_ : ChainOutput
        Stored posterior draws.
    summaries_ : dict
        ``{"zero", "biannual", "annual"} -> SpaceSummary`` for frequencies
        with positive rank.
    acceptance_rate_ : float
        Accepted sweeps over attempted sweeps.
    """

    def __init__(
        self,
        r1: int = 1,
        r2: int = 1,
        r3: int = 1,
        k: int = 5,
        d: int = 2,
        s: int = 0,
        hyper: Optional[PriorHyper] = None,
        burn_in: int = 1000,
        keep: int = 5000,
        thin: int = 1,
        estimate_nu: bool = True,
        nu_value: float = 1.0,
        seed: Optional[int] = 0,
        tol_unit: float = 1e-6,
        tol_explosive: float = 1e-9,
        max_attempts: Optional[int] = None,
    ):
        self.r1 = r1
        self.r2 = r2
        self.r3 = r3
        self.k = k
        self.d = d
        self.s = s
        self.hyper = hyper
        self.burn_in = burn_in
        self.keep = keep
        self.thin = thin
        self.estimate_nu = estimate_nu
        self.nu_value = nu_value
        self.seed = seed
        self.tol_unit = tol_unit
        self.tol_explosive = tol_explosive
        self.max_attempts = max_attempts

    def _spec(self, n: int) -> ModelSpec:
        return ModelSpec(
            n=n, k=self.k, d=self.d, s=self.s, r1=self.r1, r2=self.r2, r3=self.r3
        )

    def fit(self, X, y=None):
        """Sample the posterior on a quarterly sample in levels.

        Parameters
        ----------
        X : QuarterlySeries, DataFrame or (T, n) array_like
        y : ignored
            Present for interface compatibility.
        """
        values = _validate_panel(X, min_rows=self.k + 1)
        spec = self._spec(values.shape[1])
        hyper = self.hyper if self.hyper is not None else PriorHyper.default(spec)
        if not self.estimate_nu:
            hyper.nu_fixed = float(self.nu_value)
        self.spec_ = spec
        self.n_features_in_ = values.shape[1]
        self.chain_ = run_chain(
            values,
            spec,
            hyper,
            burn_in=self.burn_in,
            keep=self.keep,
            thin=self.thin,
            seed=self.seed,
            tol_unit=self.tol_unit,
            tol_explosive=self.tol_explosive,
            max_attempts=self.max_attempts,
        )
        self.acceptance_rate_ = self.chain_.acceptance_rate
        self.summaries_ = {}
        for freq, (attr, rank_attr, _) in _FREQ_ATTRS.items():
            if getattr(spec, rank_attr) > 0:
                self.summaries_[freq] = summarize_draws(
                    [getattr(d, attr) for d in self.chain_.draws]
                )
        self._design_ = build_design(values, spec)
        return self

    def _check_fitted(self):
        if not hasattr(self, "chain_"):
            raise RuntimeError("estimator is not fitted; call fit first")

    def space_summary(self, frequency: str):
        """Posterior summary of the cointegrating space at one frequency."""
        self._check_fitted()
        if frequency not in _FREQ_ATTRS:
            raise ValueError(f"frequency must be one of {sorted(_FREQ_ATTRS)}")
        if frequency not in self.summaries_:
            raise ValueError(f"rank is zero at the {frequency} frequency")
        return self.summaries_[frequency]

    def deviation_series(self) -> pd.DataFrame:
        """Estimated equilibrium deviations ``beta_hat' ytilde_t`` per
        frequency, one column per cointegrating relation (annual-frequency
        relations are split into real and imaginary parts)."""
        self._check_fitted()
        dm = self._design_
        cols = {}
        for freq, (attr, rank_attr, z_attr) in _FREQ_ATTRS.items():
            if freq not in self.summaries_:
                continue
            beta = self.summaries_[freq].beta_hat
            z = getattr(dm, z_attr)
            paths = z @ np.conj(beta)
            for j in range(paths.shape[1]):
                if np.iscomplexobj(paths):
                    cols[f"{freq}_{j + 1}_re"] = paths[:, j].real
                    cols[f"{freq}_{j + 1}_im"] = paths[:, j].imag
                else:
                    cols[f"{freq}_{j + 1}"] = paths[:, j]
        return pd.DataFrame(cols, index=dm.t_index)

    def diagnostics(self) -> dict:
        """Acceptance rate and effective sample sizes of summary functionals."""
        self._check_fitted()
        ess = {}
        sigma_tr = self.chain_.stack(lambda s: float(np.trace(s.Sigma)))
        ess["trace_Sigma"] = effective_sample_size(sigma_tr)
        for freq, (attr, _, _) in _FREQ_ATTRS.items():
            if freq not in self.summaries_:
                continue
            series = self.chain_.stack(
                lambda s, a=attr: float(np.abs(getattr(s, a)[0, 0]) ** 2)
            )
            ess[f"{freq}_projector"] = effective_sample_size(series)
        return {
            "acceptance_rate": self.acceptance_rate_,
            "attempted": self.chain_.attempted,
            "accepted": self.chain_.accepted,
            "ess": ess,
        }


class SeasonalModelComparison(BaseEstimator):
    """Posterior comparison over a grid of seasonal cointegration models.

    Parameters
    ----------
    k : int
        Levels lag order shared by every candidate.
    d_values, s_values : sequences
        Deterministic cases and seasonal-dummy flags to cross.
    rank_values : sequence of int, optional
        Candidate ranks per frequency; defaults to 0..n.
    n_draws : int
        Prior draws for each model's marginal-density estimate.
    n_trunc_draws : int
        Prior draws for each model's stability fraction.
    workers : int, optional
        Process count for scoring models in parallel.

    Attributes
    ----------
    grid_ : ModelGrid
    scores_ : list of ModelScore
    posterior_probs_ : ndarray
    results_ : DataFrame, one ranked row per model
    feature_marginals_ : dict
    """

    def __init__(
        self,
        k: int = 5,
        d_values=(1, 2, 3, 4),
        s_values=(0, 1),
        rank_values=None,
        hyper_factory=None,
        n_draws: int = 200_000,
        n_trunc_draws: int = 50_000,
        seed: Optional[int] = 0,
        workers: Optional[int] = None,
    ):
        self.k = k
        self.d_values = d_values
        self.s_values = s_values
        self.rank_values = rank_values
        self.hyper_factory = hyper_factory
        self.n_draws = n_draws
        self.n_trunc_draws = n_trunc_draws
        self.seed = seed
        self.workers = workers

    def fit(self, X, y=None):
        """Score every candidate model on a quarterly sample in levels."""
        values = _validate_panel(X, min_rows=self.k + 1)
        n = values.shape[1]
        self.n_features_in_ = n
        self.grid_ = _compare.enumerate_grid(
            n,
            self.k,
            d_values=tuple(self.d_values),
            s_values=tuple(self.s_values),
            rank_values=self.rank_values,
        )
        self.scores_ = _compare.compare_models(
            values,
            self.grid_,
            hyper_factory=self.hyper_factory,
            n_draws=self.n_draws,
            n_trunc_draws=self.n_trunc_draws,
            seed=self.seed,
            workers=self.workers,
        )
        self.posterior_probs_ = _compare.model_posteriors(
            self.scores_, self.grid_.prior_probs
        )
        self.feature_marginals_ = _compare.feature_marginals(
            self.grid_, self.posterior_probs_
        )
        rows = []
        for spec, score, prior, post in zip(
            self.grid_.specs, self.scores_, self.grid_.prior_probs, self.posterior_probs_
        ):
            rows.append(
                {
                    "d": spec.d,
                    "s": spec.s,
                    "r1": spec.r1,
                    "r2": spec.r2,
                    "r3": spec.r3,
                    "log_mdd": score.log_mdd,
                    "mc_se": score.mc_se,
                    "trunc_fraction": score.trunc_fraction,
                    "corrected_log_mdd": score.corrected_log_mdd,
                    "prior_prob": float(prior),
                    "posterior_prob": float(post),
                }
            )
        self.results_ = (
            pd.DataFrame(rows)
            .sort_values("posterior_prob", ascending=False)
            .reset_index(drop=True)
        )
        return self

    def top_models(self, m: int = 3) -> pd.DataFrame:
        if not hasattr(self, "results_"):
            raise RuntimeError("estimator is not fitted; call fit first")
        return self.results_.head(m)
