"""Simulation of seasonally cointegrated quarterly series.

Both entry points share one recursion: the fourth difference of the series
is the sum of the three frequency-specific correction terms, the lagged
fourth differences and a Gaussian innovation, and levels are recovered by
adding back the value four quarters earlier.  History before the sample is
fixed at zero.

``default_config`` reproduces a two-variable benchmark process with rank
one at every frequency and one lagged fourth difference.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import build_companion, stability_check
from .pipeline import ModelSpec, QuarterlySeries, deterministic_terms
from .priors import ParamState
from .sampling import chol_lower

__all__ = ["DgpConfig", "default_config", "simulate", "simulate_from_state"]


@dataclass
class DgpConfig:
    """Parameters of a simulated seasonal error-correction process.

    ``B_star``/``A_star`` are the complex annual-frequency blocks; the
    short-run matrices in ``Gammas`` multiply successive lagged fourth
    differences.  No deterministic terms enter the process.
    """

    B1: np.ndarray
    A1: np.ndarray
    B2: np.ndarray
    A2: np.ndarray
    B_star: np.ndarray
    A_star: np.ndarray
    Gammas: list
    Sigma: np.ndarray
    total: int = 250
    discard: int = 50
    start: tuple = (2000, 1)

    def __post_init__(self):
        for name in ("B1", "A1", "B2", "A2"):
            setattr(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        self.B_star = np.atleast_2d(np.asarray(self.B_star, dtype=complex))
        self.A_star = np.atleast_2d(np.asarray(self.A_star, dtype=complex))
        self.Gammas = [np.atleast_2d(np.asarray(g, dtype=float)) for g in self.Gammas]
        self.Sigma = np.atleast_2d(np.asarray(self.Sigma, dtype=float))
        if self.total <= self.discard:
            raise ValueError("total must exceed discard")
        n = self.Sigma.shape[0]
        for name in ("B1", "A1", "B2", "A2", "B_star", "A_star"):
            if getattr(self, name).shape[0] != n:
                raise ValueError(f"{name} must have {n} rows")

    @property
    def n(self) -> int:
        return self.Sigma.shape[0]

    @property
    def k(self) -> int:
        return 4 + len(self.Gammas)

    def to_state(self) -> ParamState:
        """The equivalent parameter state (no deterministic rows)."""
        n = self.n
        gamma = (
            np.vstack([g.T for g in self.Gammas])
            if self.Gammas
            else np.zeros((0, n))
        )
        return ParamState(
            Sigma=self.Sigma.copy(),
            nu=1.0,
            Gamma=gamma,
            A1=self.A1.copy(),
            B1=self.B1.copy(),
            A2=self.A2.copy(),
            B2=self.B2.copy(),
            A_R=self.A_star.real.copy(),
            A_I=self.A_star.imag.copy(),
            B_R=self.B_star.real.copy(),
            B_I=self.B_star.imag.copy(),
        ).normalized()

    def to_spec(self) -> ModelSpec:
        return ModelSpec(
            n=self.n,
            k=self.k,
            d=4,
            s=0,
            r1=self.B1.shape[1],
            r2=self.B2.shape[1],
            r3=self.B_star.shape[1],
        )


def default_config(total: int = 250, discard: int = 50) -> DgpConfig:
    """Two-variable benchmark process with rank one at every frequency."""
    return DgpConfig(
        B1=np.array([[1.0], [-1.0]]),
        A1=np.array([[-0.2], [0.0]]),
        B2=np.array([[1.0], [-1.0]]),
        A2=np.array([[0.2], [0.0]]),
        B_star=np.array([[1.0 + 0.0j], [0.0 + 1.0j]]),
        A_star=np.array([[0.1j], [0.0j]]),
        Gammas=[np.array([[0.1, -0.1], [-0.2, 0.17]])],
        Sigma=np.array([[1.0, -np.sqrt(2.0) / 4.0], [-np.sqrt(2.0) / 4.0, 0.5]]),
        total=total,
        discard=discard,
    )


def _recursion(
    state: ParamState,
    spec: ModelSpec,
    n_steps: int,
    rng: np.random.Generator,
    presample: np.ndarray,
    t_offset: int,
) -> np.ndarray:
    """Simulate ``n_steps`` observations after ``presample`` rows.

    Row j of the returned array is observation time ``t = t_offset + j + 1``
    (1-based), which is what the deterministic terms are evaluated at.
    Returns the full array including the presample rows.
    """
    n, k = spec.n, spec.k
    n_pre = presample.shape[0]
    y = np.zeros((n_pre + n_steps, n))
    y[:n_pre] = presample

    c31 = 2.0 * (state.A_I @ state.B_R.T - state.A_R @ state.B_I.T)
    c32 = -2.0 * (state.A_R @ state.B_R.T + state.A_I @ state.B_I.T)
    m1_z1 = state.A1 @ state.B1.T
    m2_z2 = state.A2 @ state.B2.T
    shocks = rng.standard_normal((n_steps, n)) @ chol_lower(state.Sigma).T

    for j in range(n_pre, n_pre + n_steps):
        t = t_offset + j + 1
        det = deterministic_terms(spec, t)
        z1 = np.concatenate([y[j - 1] + y[j - 2] + y[j - 3] + y[j - 4], det["restricted_zero"][0]])
        z2 = np.concatenate(
            [y[j - 1] - y[j - 2] + y[j - 3] - y[j - 4], det["restricted_pi"][0]]
        )
        ann = det["restricted_annual"][0]
        z31 = np.concatenate([y[j - 1] - y[j - 3], ann[:1]])
        z32 = np.concatenate([y[j - 2] - y[j - 4], ann[1:]])

        d4 = m1_z1 @ z1 + m2_z2 @ z2 + c31 @ z31 + c32 @ z32
        if state.Gamma.shape[0]:
            z4 = np.concatenate(
                [y[j - i] - y[j - i - 4] for i in range(1, k - 3)]
                + [det["unrestricted"][0]]
            )
            d4 += state.Gamma.T @ z4
        d4 += shocks[j - n_pre]
        y[j] = y[j - 4] + d4
    return y


def simulate(
    config: DgpConfig,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
) -> QuarterlySeries:
    """Simulate a quarterly sample from a configured process.

    Runs the recursion from zero initial values for ``config.total`` steps
    and returns the last ``total - discard`` observations.  A process
    whose companion matrix fails the seasonal stability pattern is only
    warned about, since deliberately misspecified processes are a valid
    use of simulation.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    state = config.to_state()
    spec = config.to_spec()

    report = stability_check(build_companion(state, spec), spec)
    if not report.is_admissible:
        warnings.warn(
            f"simulating from a configuration that fails the stability "
            f"pattern: {report.reason}",
            RuntimeWarning,
            stacklevel=2,
        )

    pre = np.zeros((spec.k, config.n))
    path = _recursion(state, spec, config.total, rng, pre, t_offset=-spec.k)
    values = path[spec.k + config.discard :]
    return QuarterlySeries(values=values, start=config.start)


def simulate_from_state(
    state: ParamState,
    spec: ModelSpec,
    n_obs: int,
    rng: np.random.Generator,
    presample: Optional[np.ndarray] = None,
) -> QuarterlySeries:
    """Simulate ``n_obs`` modelled observations conditional on a state.

    The first ``k`` rows of the output are the (fixed) presample, zeros
    by default, and observation times continue 1-based from row one, so
    the result feeds straight back into design construction with the same
    deterministic-term alignment.
    """
    if presample is None:
        presample = np.zeros((spec.k, spec.n))
    presample = np.asarray(presample, dtype=float)
    if presample.shape != (spec.k, spec.n):
        raise ValueError(f"presample must be ({spec.k}, {spec.n})")
    path = _recursion(state, spec, n_obs, rng, presample, t_offset=0)
    return QuarterlySeries(values=path)
