"""Data handling for quarterly series and error-correction design matrices.

Observed levels ``y_t`` (quarterly, n series) are mapped to the regression

    Z0 = Z1 B1 A1' + Z2 B2 A2' + 2 Re(Z3 conj(B*) A*') + Z4 G + E,

where Z0 holds fourth differences, Z1/Z2 the zero and bi-annual frequency
transforms, Z3 = -Z32 - i Z31 the complex annual-frequency transform with
real carriers Z31 (lag1 - lag3) and Z32 (lag2 - lag4), and Z4 the lagged
fourth differences plus unrestricted deterministic terms.  Restricted
deterministic terms are appended as extra columns of Z1, Z2, Z31, Z32.

Time is indexed 1-based from the first raw observation; the first modelled
row is t = k + 1 for a model with k levels lags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd

__all__ = [
    "QuarterlySeries",
    "ModelSpec",
    "DesignMatrices",
    "delta4",
    "transform_zero",
    "transform_pi",
    "transform_annual",
    "deterministic_terms",
    "build_design",
    "read_csv",
    "write_csv",
]


@dataclass
class QuarterlySeries:
    """A multivariate quarterly time series in levels.

    Parameters
    ----------
    values : (T, n) ndarray
        Observations in rows; must be finite.
    start : (year, quarter) tuple
        Calendar position of the first row, quarter in 1..4.
    names : list of str, optional
        Column names; defaults to ``y1 .. yn``.
    """

    values: np.ndarray
    start: tuple = (2000, 1)
    names: Optional[list] = None

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.ndim != 2:
            raise ValueError("values must be a (T, n) array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series contains missing or non-finite entries")
        year, quarter = self.start
        if quarter not in (1, 2, 3, 4):
            raise ValueError(f"start quarter must be 1..4, got {quarter}")
        self.start = (int(year), int(quarter))
        if self.names is None:
            self.names = [f"y{j + 1}" for j in range(self.values.shape[1])]
        if len(self.names) != self.values.shape[1]:
            raise ValueError("number of names does not match number of columns")

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    def dates(self) -> list:
        """Date labels of the rows in YYYYQn form."""
        year, quarter = self.start
        out = []
        for _ in range(self.n_obs):
            out.append(f"{year}Q{quarter}")
            quarter += 1
            if quarter > 4:
                quarter = 1
                year += 1
        return out


def _coerce_values(y) -> np.ndarray:
    if isinstance(y, QuarterlySeries):
        return y.values
    return np.atleast_2d(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class ModelSpec:
    """Dimensions and deterministic-term case of one candidate model.

    Parameters
    ----------
    n : int
        Number of series.
    k : int
        Levels VAR lag order (k >= 4); k - 4 lagged fourth differences.
    d : int
        Deterministic case: 1 = restricted linear trend plus unrestricted
        constant, 2 = unrestricted constant, 3 = restricted constant,
        4 = none.
    s : int
        1 adds restricted seasonal dummies at the bi-annual and annual
        frequencies, 0 omits them.
    r1, r2, r3 : int
        Cointegration ranks at the zero, bi-annual and annual frequencies.
    """

    n: int
    k: int = 5
    d: int = 4
    s: int = 0
    r1: int = 0
    r2: int = 0
    r3: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.k < 4:
            raise ValueError("k must be at least 4")
        if self.d not in (1, 2, 3, 4):
            raise ValueError(f"d must be in 1..4, got {self.d}")
        if self.s not in (0, 1):
            raise ValueError(f"s must be 0 or 1, got {self.s}")
        for label, r in (("r1", self.r1), ("r2", self.r2), ("r3", self.r3)):
            if not 0 <= r <= self.n:
                raise ValueError(f"{label} must be in 0..n, got {r}")

    @property
    def m1(self) -> int:
        """Rows of the zero-frequency regressor (restricted trend/constant)."""
        return self.n + (1 if self.d in (1, 3) else 0)

    @property
    def m2(self) -> int:
        """Rows of the bi-annual regressor (restricted pi-frequency dummy)."""
        return self.n + self.s

    @property
    def m3(self) -> int:
        """Rows of each annual carrier (restricted annual dummies)."""
        return self.n + self.s

    @property
    def n_unrestricted(self) -> int:
        """Unrestricted deterministic columns in Z4 (constant for d in 1, 2)."""
        return 1 if self.d in (1, 2) else 0

    @property
    def n_short_run(self) -> int:
        """Rows of the short-run coefficient matrix (lags plus deterministics)."""
        return self.n * (self.k - 4) + self.n_unrestricted

    @property
    def ranks(self) -> tuple:
        return (self.r1, self.r2, self.r3)

    def label(self) -> str:
        return f"d{self.d}s{self.s}r{self.r1}{self.r2}{self.r3}"


def delta4(y, t: int) -> np.ndarray:
    """Fourth difference ``y_t - y_{t-4}`` at 1-based time t (t >= 5)."""
    v = _coerce_values(y)
    if t < 5 or t > v.shape[0]:
        raise ValueError(f"t must be in 5..{v.shape[0]}, got {t}")
    return v[t - 1] - v[t - 5]


def transform_zero(y, t: int) -> np.ndarray:
    """Zero-frequency transform ``y_{t-1} + y_{t-2} + y_{t-3} + y_{t-4}``."""
    v = _coerce_values(y)
    if t < 5 or t > v.shape[0] + 1:
        raise ValueError(f"t must be at least 5, got {t}")
    return v[t - 2] + v[t - 3] + v[t - 4] + v[t - 5]


def transform_pi(y, t: int) -> np.ndarray:
    """Bi-annual transform ``y_{t-1} - y_{t-2} + y_{t-3} - y_{t-4}``."""
    v = _coerce_values(y)
    if t < 5 or t > v.shape[0] + 1:
        raise ValueError(f"t must be at least 5, got {t}")
    return v[t - 2] - v[t - 3] + v[t - 4] - v[t - 5]


def transform_annual(y, t: int) -> tuple:
    """Annual-frequency carriers ``(y_{t-1} - y_{t-3}, y_{t-2} - y_{t-4})``."""
    v = _coerce_values(y)
    if t < 5 or t > v.shape[0] + 1:
        raise ValueError(f"t must be at least 5, got {t}")
    return v[t - 2] - v[t - 4], v[t - 3] - v[t - 5]


def deterministic_terms(spec: ModelSpec, t) -> dict:
    """Deterministic regressor values at 1-based time(s) t.

    Returns a dict with keys ``restricted_zero`` (trend ``t - 5/2`` for
    d=1, constant for d=3), ``restricted_pi`` (``cos(pi t)`` when s=1),
    ``restricted_annual`` (pair ``sin(pi t / 2)``, ``cos(pi t / 2)`` when
    s=1) and ``unrestricted`` (constant for d in (1, 2)).  Absent terms
    come back as empty arrays.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    empty = np.zeros((t.size, 0))
    out = {
        "restricted_zero": empty,
        "restricted_pi": empty,
        "restricted_annual": np.zeros((t.size, 0)),
        "unrestricted": empty,
    }
    if spec.d == 1:
        out["restricted_zero"] = (t - 2.5)[:, None]
    elif spec.d == 3:
        out["restricted_zero"] = np.ones((t.size, 1))
    if spec.d in (1, 2):
        out["unrestricted"] = np.ones((t.size, 1))
    if spec.s == 1:
        out["restricted_pi"] = np.cos(np.pi * t)[:, None]
        out["restricted_annual"] = np.column_stack(
            [np.sin(np.pi * t / 2.0), np.cos(np.pi * t / 2.0)]
        )
    return out


@dataclass
class DesignMatrices:
    """Stacked regression matrices for one model on one sample.

    All row counts equal ``T = T_raw - k``; row j corresponds to 1-based
    time ``t = k + 1 + j``.  ``Z3`` is the complex annual regressor
    ``-Z32 - i Z31`` kept for identity checks; the samplers work with the
    real carriers.
    """

    Z0: np.ndarray
    Z1: np.ndarray
    Z2: np.ndarray
    Z31: np.ndarray
    Z32: np.ndarray
    Z4: np.ndarray
    spec: ModelSpec
    t_index: np.ndarray = field(default=None)

    @property
    def Z3(self) -> np.ndarray:
        return -self.Z32 - 1j * self.Z31

    @property
    def n_modeled(self) -> int:
        return self.Z0.shape[0]


def build_design(y, spec: ModelSpec) -> DesignMatrices:
    """Construct all regression matrices for a model on a raw sample.

    Parameters
    ----------
    y : QuarterlySeries or (T_raw, n) array_like
    spec : ModelSpec

    Returns
    -------
    DesignMatrices
        With ``T = T_raw - k`` rows each.
    """
    v = _coerce_values(y)
    t_raw, n = v.shape
    if n != spec.n:
        raise ValueError(f"series has {n} columns but spec.n = {spec.n}")
    if t_raw < spec.k + 1:
        raise ValueError(
            f"need at least k + 1 = {spec.k + 1} observations, got {t_raw}"
        )
    k = spec.k
    t_eff = t_raw - k
    # 1-based model times k+1 .. T_raw; 0-based row of time t is t-1
    tt = np.arange(k + 1, t_raw + 1)
    det = deterministic_terms(spec, tt)

    lag = lambda j: v[tt - 1 - j]  # noqa: E731  y_{t-j} for the model rows

    z0 = lag(0) - lag(4)
    z1 = lag(1) + lag(2) + lag(3) + lag(4)
    z2 = lag(1) - lag(2) + lag(3) - lag(4)
    z31 = lag(1) - lag(3)
    z32 = lag(2) - lag(4)

    z1 = np.hstack([z1, det["restricted_zero"]])
    z2 = np.hstack([z2, det["restricted_pi"]])
    if spec.s == 1:
        z31 = np.hstack([z31, det["restricted_annual"][:, :1]])
        z32 = np.hstack([z32, det["restricted_annual"][:, 1:]])

    z4_parts = [lag(j) - lag(j + 4) for j in range(1, k - 3)]
    z4_parts.append(det["unrestricted"])
    z4 = np.hstack(z4_parts) if z4_parts else np.zeros((t_eff, 0))

    assert z1.shape[1] == spec.m1 and z2.shape[1] == spec.m2
    assert z31.shape[1] == spec.m3 and z32.shape[1] == spec.m3
    assert z4.shape[1] == spec.n_short_run

    return DesignMatrices(
        Z0=z0, Z1=z1, Z2=z2, Z31=z31, Z32=z32, Z4=z4, spec=spec, t_index=tt
    )


def _parse_quarter(label: str) -> tuple:
    label = str(label).strip().upper()
    if "Q" not in label:
        raise ValueError(f"cannot parse quarterly date {label!r}, want YYYYQn")
    year_part, q_part = label.split("Q", 1)
    try:
        year, quarter = int(year_part), int(q_part)
    except ValueError as exc:
        raise ValueError(f"cannot parse quarterly date {label!r}") from exc
    if quarter not in (1, 2, 3, 4):
        raise ValueError(f"quarter out of range in {label!r}")
    return year, quarter


def read_csv(path, log_columns: Optional[Sequence[str]] = None) -> QuarterlySeries:
    """Load a quarterly CSV (first column ``date`` as YYYYQn, then series).

    Parameters
    ----------
    path : str or file-like
    log_columns : sequence of str, optional
        Column names to log-transform on load; ``["all"]`` transforms every
        series.
    """
    frame = pd.read_csv(path)
    if frame.shape[1] < 2:
        raise ValueError("CSV must have a date column and at least one series")
    date_col = frame.columns[0]
    if date_col.lower() != "date":
        raise ValueError(f"first column must be 'date', got {date_col!r}")
    dates = [_parse_quarter(v) for v in frame[date_col]]
    for prev, cur in zip(dates, dates[1:]):
        expected = (prev[0] + (prev[1] == 4), prev[1] % 4 + 1)
        if cur != expected:
            raise ValueError(
                f"dates are not consecutive quarters near {prev[0]}Q{prev[1]}"
            )
    names = list(frame.columns[1:])
    values = frame[names].to_numpy(dtype=float)
    if log_columns:
        cols = list(names) if list(log_columns) == ["all"] else list(log_columns)
        for c in cols:
            if c not in names:
                raise ValueError(f"log column {c!r} not present in CSV")
            j = names.index(c)
            if np.any(values[:, j] <= 0.0):
                raise ValueError(f"column {c!r} has non-positive values, cannot log")
            values[:, j] = np.log(values[:, j])
    return QuarterlySeries(values=values, start=dates[0], names=names)


def write_csv(series: QuarterlySeries, path) -> None:
    """Write a quarterly series in the package CSV format."""
    frame = pd.DataFrame(series.values, columns=series.names)
    frame.insert(0, "date", series.dates())
    frame.to_csv(path, index=False)
