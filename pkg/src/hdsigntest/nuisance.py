"""Unbiased plug-in estimators for the variance of the test statistics.

The limiting variances of the mean- and rank-based statistics involve
tr(Sigma^2)-type functionals.  The estimators here are U-statistics over
squared cross inner products of pairwise differences, which makes them
exactly location invariant.  Fast paths reduce everything to Gram
matrices; naive loop oracles in ``_naive`` gate the algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVarianceError, TooFewObservationsError
from .statistics import as_matrix, _require_same_dim


@dataclass(frozen=True)
class VarianceSnapshot:
    """Nuisance estimates entering a standardized test statistic.

    Two-sample snapshots fill every field; one-sample snapshots leave the
    second-sample and cross entries as None.
    """

    tr_sigma1_sq: float
    gamma: float
    sigma1_sq: float
    tr_sigma2_sq: float | None = None
    tr_sigma_cross: float | None = None
    sigma2_sq: float | None = None

    def to_dict(self) -> dict:
        return {
            "tr1": self.tr_sigma1_sq,
            "tr2": self.tr_sigma2_sq,
            "tr12": self.tr_sigma_cross,
            "gamma": self.gamma,
            "sigma1_sq": self.sigma1_sq,
            "sigma2_sq": self.sigma2_sq,
        }


def tr_sigma_sq_hat(x) -> float:
    """Unbiased estimator of tr(Sigma^2) from one sample.

    Defined as the average of [(X_i1 - X_i2)'(X_i3 - X_i4)]^2 over ordered
    quadruples of distinct indices, divided by 4.  With the Gram matrix
    G = XX', expanding the square and counting coincidence patterns gives

        sum = 4(m-2)(m-3) S2 - 8(m-3) S3 + 4 S4

    where S2 = sum_{p!=q} G_pq^2, S3 sums G_pq G_pr over distinct triples
    and S4 sums G_pq G_rs over fully distinct quadruples; S3 and S4 reduce
    to row sums of G by further inclusion-exclusion.
    """
    x = as_matrix(x)
    m = x.shape[0]
    if m < 4:
        raise TooFewObservationsError(
            f"tr(Sigma^2) estimator needs at least 4 observations, got {m}"
        )
    # The estimator only involves differences X_i - X_j, so centering the
    # sample changes nothing mathematically but keeps the Gram reduction
    # well conditioned under large location shifts.
    x = x - x.mean(axis=0)
    g = x @ x.T
    diag = np.diagonal(g)
    rows = g.sum(axis=1) - diag
    s2 = np.einsum("ij,ij->", g, g) - diag @ diag
    s3 = rows @ rows - s2
    tot = rows.sum()
    s4 = tot * tot - 4.0 * s3 - 2.0 * s2
    quad = (m - 2) * (m - 3) * s2 - 2.0 * (m - 3) * s3 + s4
    value = quad / (m * (m - 1) * (m - 2) * (m - 3))
    # The exact U-statistic is an average of squares; clamp float noise.
    return float(max(value, 0.0))


def tr_sigma_cross_hat(x, y) -> float:
    """Unbiased estimator of tr(Sigma_1 Sigma_2) from two samples.

    Average of [(X_i1 - X_i2)'(Y_j1 - Y_j2)]^2 over distinct i-pairs and
    j-pairs, divided by 4.  Reduces to sums over the cross-Gram H = XY':

        sum = 4(m-1)(n-1) S - 4(m-1) S_row - 4(n-1) S_col + 4 S_disj
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    _require_same_dim(x, y)
    m, n = x.shape[0], y.shape[0]
    if m < 2 or n < 2:
        raise TooFewObservationsError(
            "tr(Sigma_1 Sigma_2) estimator needs at least 2 observations per sample"
        )
    x = x - x.mean(axis=0)
    y = y - y.mean(axis=0)
    h = x @ y.T
    sq = np.einsum("ij,ij->", h, h)
    rows = h.sum(axis=1)
    cols = h.sum(axis=0)
    s_row = rows @ rows - sq
    s_col = cols @ cols - sq
    tot = h.sum()
    s_disj = tot * tot - rows @ rows - cols @ cols + sq
    quad = (m - 1) * (n - 1) * sq - (m - 1) * s_row - (n - 1) * s_col + s_disj
    value = quad / (m * (m - 1) * n * (n - 1))
    return float(max(value, 0.0))


def sigma_sq_hat(x) -> float:
    """Marginal variance pooled over coordinates: the per-coordinate sample
    variance (denominator n-1) averaged over the d coordinates.
    """
    x = as_matrix(x)
    n, d = x.shape
    if n < 2:
        raise TooFewObservationsError(
            f"variance estimator needs at least 2 observations, got {n}"
        )
    centered = x - x.mean(axis=0)
    return float(np.einsum("ij,ij->", centered, centered) / (d * (n - 1)))


def _check_gamma(gamma: float, scale: float) -> float:
    # Constant data cancels to ~0 up to float noise; refuse to standardize.
    if not np.isfinite(gamma) or gamma <= 1e-12 * max(scale, 1e-300):
        raise DegenerateVarianceError(
            "estimated variance of the statistic is zero; data are constant"
        )
    return gamma


def gamma1_hat(x, y) -> VarianceSnapshot:
    """Two-sample variance functional estimate.

    gamma = 2 tr(S1^2)/(m)_2 + 2 tr(S2^2)/(n)_2 + 4 tr(S1 S2)/(mn), all
    traces replaced by their unbiased estimates; also records the pooled
    marginal variances of both samples.
    """
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    _require_same_dim(x, y)
    m, n = x.shape[0], y.shape[0]
    if m < 4 or n < 4:
        raise TooFewObservationsError(
            "two-sample variance estimation needs at least 4 observations per sample"
        )
    tr1 = tr_sigma_sq_hat(x)
    tr2 = tr_sigma_sq_hat(y)
    tr12 = tr_sigma_cross_hat(x, y)
    gamma = (
        2.0 * tr1 / (m * (m - 1))
        + 2.0 * tr2 / (n * (n - 1))
        + 4.0 * tr12 / (m * n)
    )
    gamma = _check_gamma(gamma, tr1 + tr2 + tr12)
    return VarianceSnapshot(
        tr_sigma1_sq=tr1,
        tr_sigma2_sq=tr2,
        tr_sigma_cross=tr12,
        gamma=gamma,
        sigma1_sq=sigma_sq_hat(x),
        sigma2_sq=sigma_sq_hat(y),
    )


def gamma2_hat(x) -> VarianceSnapshot:
    """One-sample variance functional estimate: 2 tr(Sigma^2)hat / (n)_2."""
    x = as_matrix(x)
    n = x.shape[0]
    if n < 4:
        raise TooFewObservationsError(
            "one-sample variance estimation needs at least 4 observations"
        )
    tr1 = tr_sigma_sq_hat(x)
    gamma = 2.0 * tr1 / (n * (n - 1))
    gamma = _check_gamma(gamma, tr1)
    return VarianceSnapshot(
        tr_sigma1_sq=tr1,
        gamma=gamma,
        sigma1_sq=sigma_sq_hat(x),
    )
