"""Seeded synthetic-data generators for the simulation models.

Every generator is a pure function of (spec, n, seed): the mean shift is
added after all random draws, so the noise stream is identical for any
shift, and per-replicate reproducibility only needs a derived seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidSpecError, NonpositiveScaleError
from .inference import RsrmAuxiliary

AR1_GAUSS = "ar1-gauss"
AR1_T5 = "ar1-t5"
SPHERICAL_T5 = "spherical-t5"
EQUICORR_GAUSS = "equicorr-gauss"
MODEL_NAMES = (AR1_GAUSS, AR1_T5, SPHERICAL_T5, EQUICORR_GAUSS)

SHIFT_FIRST = "first-coordinate"
SHIFT_SPREAD = "spread-equally"
SHIFT_ZERO = "zero"


@dataclass(frozen=True)
class MeanShift:
    """Mean vector of a generated sample.

    first-coordinate puts the whole magnitude c on coordinate 1;
    spread-equally uses c/sqrt(d) on every coordinate so that the norm of
    the mean is c in both styles and power points stay comparable.
    """

    style: str = SHIFT_ZERO
    magnitude: float = 0.0

    def __post_init__(self):
        if self.style not in (SHIFT_FIRST, SHIFT_SPREAD, SHIFT_ZERO):
            raise InvalidSpecError(f"unknown shift style {self.style!r}")
        if self.magnitude < 0.0:
            raise InvalidSpecError("shift magnitude must be nonnegative")

    def mean_vector(self, d: int) -> np.ndarray:
        mu = np.zeros(d)
        if self.style == SHIFT_FIRST:
            mu[0] = self.magnitude
        elif self.style == SHIFT_SPREAD:
            mu[:] = self.magnitude / math.sqrt(d)
        return mu

    def to_dict(self) -> dict:
        return {"style": self.style, "magnitude": self.magnitude}


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative description of one synthetic data model plus shift."""

    model: str
    d: int
    rho: float = 0.7
    beta: float = 0.7
    df: float = 5.0
    shift: MeanShift = field(default_factory=MeanShift)
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise InvalidSpecError(f"unknown model {self.model!r}")
        if self.d < 1:
            raise InvalidSpecError("dimension must be at least 1")
        if not -1.0 < self.rho < 1.0:
            raise InvalidSpecError("AR coefficient must satisfy |rho| < 1")
        if not 0.0 < self.beta < 1.0:
            raise InvalidSpecError("equicorrelation must be in (0, 1)")
        if not self.df > 0.0:
            raise InvalidSpecError("degrees of freedom must be positive")

    def with_shift(self, style: str, magnitude: float) -> "GeneratorSpec":
        return replace(self, shift=MeanShift(style, magnitude))

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "d": self.d,
            "rho": self.rho,
            "beta": self.beta,
            "df": self.df,
            "shift": self.shift.to_dict(),
            "seed": self.seed,
        }


def _rng_for(spec: GeneratorSpec, rng) -> np.random.Generator:
    return np.random.default_rng(spec.seed) if rng is None else rng


def gen_ar1(spec: GeneratorSpec, n: int, rng=None) -> np.ndarray:
    """Each row is an AR(1) path over its d coordinates with unit-variance
    innovations (Gaussian, or t(df) rescaled to variance one).

    The Gaussian chain starts from its stationary marginal
    N(0, 1/(1 - rho^2)); the t chain has no closed-form stationary start
    and instead discards a burn-in of 10 * ceil(1/(1 - |rho|)) coordinates.
    """
    if spec.model not in (AR1_GAUSS, AR1_T5):
        raise InvalidSpecError(f"gen_ar1 cannot generate model {spec.model!r}")
    if n < 1:
        raise InvalidSpecError("sample size must be at least 1")
    rng = _rng_for(spec, rng)
    d, rho = spec.d, spec.rho
    if spec.model == AR1_GAUSS:
        x = np.empty((n, d))
        x[:, 0] = rng.standard_normal(n) / math.sqrt(1.0 - rho * rho)
        eps = rng.standard_normal((n, d))
        for k in range(1, d):
            x[:, k] = rho * x[:, k - 1] + eps[:, k]
    else:
        if spec.df <= 2.0:
            raise InvalidSpecError(
                "t innovations need df > 2 to be standardized to unit variance"
            )
        burn = 10 * math.ceil(1.0 / (1.0 - abs(rho)))
        scale = math.sqrt((spec.df - 2.0) / spec.df)
        eps = rng.standard_t(spec.df, size=(n, burn + d)) * scale
        path = np.zeros(n)
        x = np.empty((n, d))
        for k in range(burn + d):
            path = rho * path + eps[:, k]
            if k >= burn:
                x[:, k - burn] = path
    return x + spec.shift.mean_vector(d)


def gen_spherical_t(spec: GeneratorSpec, n: int, rng=None):
    """Spherical t(df) rows: standard Gaussian vectors divided by
    independent per-row scales sqrt(chi2_df / df).

    Returns the sample and the auxiliary holding the realized scales with
    the population values of the latent Gaussian component (variance 1,
    tr(Sigma^2) = d).  df = inf degenerates to the spherical Gaussian.
    """
    if spec.model != SPHERICAL_T5:
        raise InvalidSpecError(f"gen_spherical_t cannot generate model {spec.model!r}")
    if n < 1:
        raise InvalidSpecError("sample size must be at least 1")
    rng = _rng_for(spec, rng)
    gauss = rng.standard_normal((n, spec.d))
    if math.isinf(spec.df):
        scales = np.ones(n)
    else:
        scales = np.sqrt(rng.chisquare(spec.df, size=n) / spec.df)
    x = gauss / scales[:, None] + spec.shift.mean_vector(spec.d)
    aux = RsrmAuxiliary(
        p_scales=scales, sigma_v_sq=1.0, tr_sigma_v_sq=float(spec.d)
    )
    return x, aux


def gen_equicorr_gauss(spec: GeneratorSpec, n: int, rng=None) -> np.ndarray:
    """Gaussian rows with covariance (1 - beta) I + beta 11', generated by
    the exact factorization sqrt(1-beta) Z + sqrt(beta) z0 1.
    """
    if spec.model != EQUICORR_GAUSS:
        raise InvalidSpecError(
            f"gen_equicorr_gauss cannot generate model {spec.model!r}"
        )
    if n < 1:
        raise InvalidSpecError("sample size must be at least 1")
    rng = _rng_for(spec, rng)
    z = rng.standard_normal((n, spec.d))
    z0 = rng.standard_normal(n)
    x = math.sqrt(1.0 - spec.beta) * z + math.sqrt(spec.beta) * z0[:, None]
    return x + spec.shift.mean_vector(spec.d)


def gen_rsrm_custom(
    spec: GeneratorSpec,
    n: int,
    base,
    scale_law,
    sigma_v_sq: float = 1.0,
    tr_sigma_v_sq: float | None = None,
    rng=None,
):
    """Randomly scaled rows V_i / P_i + mu from a user-supplied base
    generator of zero-mean rows and a positive scale sampler.

    ``base(rng, n, d)`` must return an (n, d) array; ``scale_law(rng, n)``
    a length-n array of strictly positive scales.  The base rows are drawn
    before the scales, so a constant scale law of one reproduces the base
    output exactly.  Population traces are caller-supplied (they cannot be
    estimated from data); by default the base is assumed isotropic with
    unit variance, giving tr(Sigma_V^2) = d.
    """
    if n < 1:
        raise InvalidSpecError("sample size must be at least 1")
    rng = _rng_for(spec, rng)
    rows = np.asarray(base(rng, n, spec.d), dtype=float)
    if rows.shape != (n, spec.d):
        raise InvalidSpecError(
            f"base generator returned shape {rows.shape}, expected {(n, spec.d)}"
        )
    scales = np.asarray(scale_law(rng, n), dtype=float).ravel()
    if scales.size != n:
        raise InvalidSpecError(f"scale law returned {scales.size} values for n={n}")
    if not np.isfinite(scales).all() or (scales <= 0.0).any():
        raise NonpositiveScaleError("scale law produced a nonpositive value")
    x = rows / scales[:, None] + spec.shift.mean_vector(spec.d)
    aux = RsrmAuxiliary(
        p_scales=scales,
        sigma_v_sq=sigma_v_sq,
        tr_sigma_v_sq=float(spec.d) if tr_sigma_v_sq is None else tr_sigma_v_sq,
    )
    return x, aux


def generate(spec: GeneratorSpec, n: int, rng=None):
    """Generate a sample from any named model.

    Returns (matrix, auxiliary); the auxiliary is None for models without
    latent scales.
    """
    if spec.model in (AR1_GAUSS, AR1_T5):
        return gen_ar1(spec, n, rng), None
    if spec.model == SPHERICAL_T5:
        return gen_spherical_t(spec, n, rng)
    if spec.model == EQUICORR_GAUSS:
        return gen_equicorr_gauss(spec, n, rng), None
    raise InvalidSpecError(f"unknown model {spec.model!r}")
