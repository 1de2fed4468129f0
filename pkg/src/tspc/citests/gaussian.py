"""Partial-correlation test for Gaussian data.

The statistic is the Fisher z-transform of the sample partial correlation of
the tested pair given the conditioning set.  Under joint Gaussianity the
transformed statistic is approximately N(0, 1/(n - |k| - 3)) when the true
partial correlation is zero, which gives the threshold its closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy import stats

from ..data import DataMatrix
from .base import CiOutcome, CiQuery, CiTestError

__all__ = [
    "CovMatrix",
    "GaussianCiConfig",
    "sample_covariance",
    "partial_correlation",
    "fisher_z",
    "gaussian_gamma",
    "gaussian_ci_test",
]

# Cholesky pivots below this fraction of the trace mean the conditioning
# block is numerically rank-deficient.
_PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class CovMatrix:
    """A p-by-p covariance estimate together with the sample count behind it."""

    sigma: np.ndarray
    n: int

    def __post_init__(self) -> None:
        arr = np.array(self.sigma, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"covariance must be square, got shape {arr.shape}")
        if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-8 * (1.0 + np.abs(arr).max())):
            raise ValueError("covariance must be symmetric")
        if np.any(np.diag(arr) < -1e-12):
            raise ValueError("covariance diagonal must be nonnegative")
        arr = (arr + arr.T) / 2.0
        arr.flags.writeable = False
        object.__setattr__(self, "sigma", arr)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"sample count must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def p(self) -> int:
        return self.sigma.shape[0]


@dataclass(frozen=True)
class GaussianCiConfig:
    """Threshold policy: exactly one of alpha (level) or gamma (fixed cut).

    alpha mode recomputes the cut from the sample and conditioning sizes per
    query; gamma mode compares |z| against the same constant everywhere,
    which is the regime the consistency guarantees speak about.
    """

    alpha: float | None = None
    gamma: float | None = None

    def __post_init__(self) -> None:
        if (self.alpha is None) == (self.gamma is None):
            raise ValueError("exactly one of alpha and gamma must be set")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.gamma is not None and not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


def sample_covariance(values: DataMatrix | np.ndarray) -> CovMatrix:
    """Covariance about the sample mean with 1/n normalization."""
    if isinstance(values, DataMatrix):
        values = values.values
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"data must be two-dimensional, got shape {arr.shape}")
    n = arr.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 rows, got {n}")
    centered = arr - arr.mean(axis=0)
    sigma = centered.T @ centered / n
    return CovMatrix(sigma, n)


def partial_correlation(cov: CovMatrix, query: CiQuery) -> float:
    """Correlation of the pair after conditioning, via the Schur complement.

    The pair is permuted to the leading block and the conditioning set to the
    trailing block; the conditional covariance of the pair is then
    S11 - S12 S22^{-1} S21, factorizing the conditioning block by Cholesky.
    """
    p = cov.p
    for v in (query.i, query.j, *query.k):
        if not 0 <= v < p:
            raise ValueError(f"variable {v} out of range for p={p}")
    idx = [query.i, query.j, *query.k]
    sub = cov.sigma[np.ix_(idx, idx)]
    s11 = sub[:2, :2]
    if query.k:
        s12 = sub[:2, 2:]
        s22 = sub[2:, 2:]
        try:
            chol = sla.cholesky(s22, lower=True)
        except sla.LinAlgError:
            raise CiTestError("conditioning set collinear") from None
        if np.min(np.diag(chol)) ** 2 < _PIVOT_TOL * np.trace(s22):
            raise CiTestError("conditioning set collinear")
        # S22^{-1} S21 through the existing factor, no explicit inverse.
        w = sla.cho_solve((chol, True), s12.T)
        cond = s11 - s12 @ w
    else:
        cond = s11
    var_i = cond[0, 0]
    var_j = cond[1, 1]
    if var_i <= 0.0 or var_j <= 0.0:
        raise CiTestError("degenerate residual variance")
    return float(cond[0, 1] / math.sqrt(var_i * var_j))


def fisher_z(rho: float) -> float:
    """atanh of the correlation; requires |rho| < 1."""
    if not -1.0 < rho < 1.0:
        raise ValueError(f"correlation must satisfy |rho| < 1, got {rho}")
    return math.atanh(rho)


def gaussian_gamma(alpha: float, n: int, cond_size: int) -> float:
    """Threshold Phi^{-1}(1 - alpha) / sqrt(n - cond_size - 3)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if cond_size < 0:
        raise ValueError(f"conditioning size must be nonnegative, got {cond_size}")
    dof = n - cond_size - 3
    if dof <= 0:
        raise ValueError(
            f"need n - |k| - 3 > 0, got n={n} with conditioning size {cond_size}"
        )
    return float(stats.norm.ppf(1.0 - alpha) / math.sqrt(dof))


def gaussian_ci_test(cov: CovMatrix, query: CiQuery, config: GaussianCiConfig) -> CiOutcome:
    """Decide one query: |atanh(partial correlation)| against the threshold.

    A sample partial correlation of magnitude one (possible on degenerate
    data) maps to an infinite statistic, so the pair is declared dependent
    no matter the threshold.
    """
    rho = partial_correlation(cov, query)
    if abs(rho) >= 1.0:
        statistic = math.inf
    else:
        statistic = fisher_z(rho)
    if config.gamma is not None:
        threshold = config.gamma
    else:
        threshold = gaussian_gamma(config.alpha, cov.n, len(query.k))
    return CiOutcome.decide(statistic, threshold)
