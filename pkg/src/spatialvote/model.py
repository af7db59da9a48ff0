"""Spatial voting probability model.

A Yea vote on motion j by legislator i has probability G(mu_j + alpha_j' beta_i)
where G is the link CDF (probit or logit), mu_j is the motion's approval
parameter, alpha_j its discrimination vector and beta_i the legislator's ideal
point. The (mu, alpha) pair is the reduced form of a random-utility comparison
between the motion's Yea and Nay policy positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit, ndtr

from .rollcall import MISSING, NAY, YEA, VoteMatrix

# floor/ceiling applied to vote probabilities before taking logs
PROB_EPS = 1e-12


class LinkFunction(Enum):
    PROBIT = "probit"
    LOGIT = "logit"


def link_eval(link: LinkFunction, x):
    """Evaluate the link CDF G elementwise. Rejects non-finite input."""
    arr = np.asarray(x, dtype=float)
    if not np.isfinite(arr).all():
        raise ValueError("link input contains non-finite values")
    if link is LinkFunction.PROBIT:
        out = ndtr(arr)
    elif link is LinkFunction.LOGIT:
        out = expit(arr)
    else:
        raise ValueError(f"unknown link {link!r}")
    return float(out) if np.isscalar(x) else out


@dataclass
class ItemParams:
    """Per-motion approval intercepts and discrimination vectors.

    approval : (m,) array, mu_j.
    discrimination : (m, d) array, alpha_j rows.
    """

    approval: np.ndarray
    discrimination: np.ndarray

    def __post_init__(self):
        self.approval = np.atleast_1d(np.asarray(self.approval, dtype=float))
        disc = np.asarray(self.discrimination, dtype=float)
        if disc.ndim == 1:
            disc = disc[:, None]
        self.discrimination = disc
        if self.approval.ndim != 1 or self.discrimination.ndim != 2:
            raise ValueError("approval must be (m,), discrimination (m, d)")
        if self.approval.shape[0] != self.discrimination.shape[0]:
            raise ValueError(
                f"approval has {self.approval.shape[0]} motions, "
                f"discrimination has {self.discrimination.shape[0]}"
            )
        if not (np.isfinite(self.approval).all() and np.isfinite(self.discrimination).all()):
            raise ValueError("item parameters must be finite")

    @property
    def m(self) -> int:
        return self.approval.shape[0]

    @property
    def dim(self) -> int:
        return self.discrimination.shape[1]


@dataclass(frozen=True)
class VoteAlternatives:
    """Structural parameters of one motion: policy positions and shock scale.

    yea_position/nay_position are points in the d-dimensional policy space;
    shock_scale is the standard deviation scale of the utility shock
    difference (must be positive).
    """

    yea_position: tuple
    nay_position: tuple
    shock_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "yea_position", tuple(float(v) for v in np.atleast_1d(self.yea_position)))
        object.__setattr__(self, "nay_position", tuple(float(v) for v in np.atleast_1d(self.nay_position)))
        if len(self.yea_position) != len(self.nay_position):
            raise ValueError("yea and nay positions must share a dimension")
        if not self.shock_scale > 0:
            raise ValueError(f"shock scale must be positive, got {self.shock_scale}")


def alternatives_to_item_params(alt: VoteAlternatives):
    """Reduce policy positions to (approval, discrimination).

    With quadratic utilities and a shock difference of scale sigma, the Yea
    probability is G((||nay - beta||^2 - ||yea - beta||^2) / sigma), which
    expands to G(mu + alpha' beta) with mu = (nay'nay - yea'yea)/sigma and
    alpha = 2 (yea - nay)/sigma.
    """
    yea = np.asarray(alt.yea_position, dtype=float)
    nay = np.asarray(alt.nay_position, dtype=float)
    mu = float(nay @ nay - yea @ yea) / alt.shock_scale
    alpha = 2.0 * (yea - nay) / alt.shock_scale
    return mu, alpha


def vote_probability(approval, discrimination, ideal_point, link: LinkFunction):
    """Yea probability G(approval + discrimination' ideal_point)."""
    disc = np.atleast_1d(np.asarray(discrimination, dtype=float))
    pt = np.atleast_1d(np.asarray(ideal_point, dtype=float))
    if disc.shape != pt.shape:
        raise ValueError(f"dimension mismatch: {disc.shape} vs {pt.shape}")
    return link_eval(link, float(approval) + float(disc @ pt))


class PriorKind(Enum):
    FIXED = "fixed"
    HIER_VAR = "hier-var"
    HIER_MEAN_VAR = "hier-meanvar"


def _check_spd(mat, name):
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError(f"{name} must be finite")
    if not np.allclose(mat, mat.T):
        raise ValueError(f"{name} must be symmetric")
    try:
        np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} must be positive definite") from None
    return mat


@dataclass
class PriorConfig:
    """Gaussian priors for items and ideal points, optionally hierarchical.

    item_mean/item_cov apply to the stacked (approval, discrimination) vector
    of each motion; ideal_mean/ideal_cov to each non-anchored ideal point.
    Under a hierarchical kind the ideal-point prior mean and/or variance get a
    second stage: variance ~ InvGamma(var_shape, var_scale) and, for the
    mean-and-variance kind, mean ~ Normal(mean_loc, mean_scale_var). The
    inverse-gamma shape must exceed 2 so the implied variance is finite.
    """

    item_mean: np.ndarray
    item_cov: np.ndarray
    ideal_mean: np.ndarray
    ideal_cov: np.ndarray
    kind: PriorKind = PriorKind.FIXED
    var_shape: float = 3.0
    var_scale: float = 2.0
    mean_loc: float = 0.0
    mean_scale_var: float = 25.0

    def __post_init__(self):
        self.item_mean = np.atleast_1d(np.asarray(self.item_mean, dtype=float))
        self.ideal_mean = np.atleast_1d(np.asarray(self.ideal_mean, dtype=float))
        self.item_cov = _check_spd(self.item_cov, "item_cov")
        self.ideal_cov = _check_spd(self.ideal_cov, "ideal_cov")
        if self.item_mean.shape[0] != self.item_cov.shape[0]:
            raise ValueError("item_mean length does not match item_cov")
        if self.ideal_mean.shape[0] != self.ideal_cov.shape[0]:
            raise ValueError("ideal_mean length does not match ideal_cov")
        if self.item_mean.shape[0] != self.ideal_mean.shape[0] + 1:
            raise ValueError("item prior must have dimension d+1 for ideal-point dimension d")
        if not np.isfinite(self.item_mean).all() or not np.isfinite(self.ideal_mean).all():
            raise ValueError("prior means must be finite")
        if self.kind is not PriorKind.FIXED:
            if self.var_shape <= 2.0:
                raise ValueError(
                    f"hierarchical variance shape must exceed 2, got {self.var_shape}"
                )
            if self.var_scale <= 0 or self.mean_scale_var <= 0:
                raise ValueError("hierarchical scale parameters must be positive")

    @property
    def dim(self) -> int:
        return self.ideal_mean.shape[0]

    @classmethod
    def default(cls, dim: int = 1, kind: PriorKind = PriorKind.FIXED) -> "PriorConfig":
        """Diffuse defaults: items N(0, 25 I), ideal points N(0, I)."""
        return cls(
            item_mean=np.zeros(dim + 1),
            item_cov=25.0 * np.eye(dim + 1),
            ideal_mean=np.zeros(dim),
            ideal_cov=np.eye(dim),
            kind=kind,
        )


def linear_predictor(items: ItemParams, ideal_points: np.ndarray) -> np.ndarray:
    """(n, m) array of approval_j + discrimination_j' ideal_i."""
    ideal = np.asarray(ideal_points, dtype=float)
    if ideal.ndim == 1:
        ideal = ideal[:, None]
    if ideal.shape[1] != items.dim:
        raise ValueError(f"ideal points have dim {ideal.shape[1]}, items have {items.dim}")
    return items.approval[None, :] + ideal @ items.discrimination.T


def observed_cell_log_prob(vm: VoteMatrix, items: ItemParams, ideal_points,
                           link: LinkFunction) -> np.ndarray:
    """Log probability of each observed cell, flattened row-major."""
    eta = linear_predictor(items, ideal_points)
    obs = vm.observed_mask
    p = np.clip(link_eval(link, eta[obs]), PROB_EPS, 1.0 - PROB_EPS)
    yea = vm.cells[obs] == YEA
    return np.where(yea, np.log(p), np.log(1.0 - p))


def log_likelihood(vm: VoteMatrix, items: ItemParams, ideal_points,
                   link: LinkFunction) -> float:
    """Bernoulli log likelihood over observed cells only."""
    if items.m != vm.m:
        raise ValueError(f"items cover {items.m} motions, matrix has {vm.m}")
    ideal = np.asarray(ideal_points, dtype=float)
    if ideal.ndim == 1:
        ideal = ideal[:, None]
    if ideal.shape[0] != vm.n:
        raise ValueError(f"ideal points cover {ideal.shape[0]} legislators, matrix has {vm.n}")
    return float(observed_cell_log_prob(vm, items, ideal, link).sum())


def sample_votes(items: ItemParams, ideal_points, link: LinkFunction, rng,
                 observed_mask: np.ndarray = None) -> np.ndarray:
    """Draw an (n, m) cell-code matrix from the model.

    Cells outside observed_mask (if given) are set to MISSING; the Bernoulli
    uniforms are drawn for the full grid so the draw count is mask-independent.
    """
    eta = linear_predictor(items, ideal_points)
    p = link_eval(link, eta)
    cells = np.where(rng.random(eta.shape) < p, YEA, NAY).astype(np.int8)
    if observed_mask is not None:
        cells = np.where(observed_mask, cells, MISSING).astype(np.int8)
    return cells


def _gauss_logpdf_many(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> float:
    """Sum of multivariate normal log densities over rows of x."""
    if x.shape[0] == 0:
        return 0.0
    k = x.shape[1]
    chol = np.linalg.cholesky(cov)
    centered = x - mean[None, :]
    sol = np.linalg.solve(chol, centered.T)
    quad = (sol * sol).sum()
    logdet = 2.0 * np.log(np.diag(chol)).sum()
    return float(-0.5 * (x.shape[0] * (k * math.log(2.0 * math.pi) + logdet) + quad))


def _invgamma_logpdf(x: float, shape: float, scale: float) -> float:
    return (
        shape * math.log(scale)
        - math.lgamma(shape)
        - (shape + 1.0) * math.log(x)
        - scale / x
    )


def log_prior(items: ItemParams, ideal_points, priors: PriorConfig,
              anchored_indices=(), hyper_mean: float = None,
              hyper_var: float = None) -> float:
    """Joint log prior density of items, free ideal points and hyperparameters.

    Anchored ideal points are constants and contribute nothing. Under a
    hierarchical kind the ideal-point stage is evaluated at (hyper_mean,
    hyper_var) and the hyperprior terms are added.
    """
    total = _gauss_logpdf_many(
        np.column_stack([items.approval, items.discrimination]),
        priors.item_mean, priors.item_cov,
    )
    ideal = np.asarray(ideal_points, dtype=float)
    if ideal.ndim == 1:
        ideal = ideal[:, None]
    free = np.ones(ideal.shape[0], dtype=bool)
    anchored = np.asarray(list(anchored_indices), dtype=int)
    if anchored.size:
        free[anchored] = False
    if priors.kind is PriorKind.FIXED:
        total += _gauss_logpdf_many(ideal[free], priors.ideal_mean, priors.ideal_cov)
    else:
        if hyper_var is None:
            raise ValueError("hierarchical prior requires hyper_var")
        if priors.dim != 1:
            raise ValueError("hierarchical priors support dimension 1 only")
        mean = priors.ideal_mean[0] if hyper_mean is None else hyper_mean
        total += _gauss_logpdf_many(
            ideal[free], np.array([mean]), np.array([[hyper_var]])
        )
        total += _invgamma_logpdf(hyper_var, priors.var_shape, priors.var_scale)
        if priors.kind is PriorKind.HIER_MEAN_VAR:
            if hyper_mean is None:
                raise ValueError("mean-and-variance prior requires hyper_mean")
            total += _gauss_logpdf_many(
                np.array([[hyper_mean]]),
                np.array([priors.mean_loc]),
                np.array([[priors.mean_scale_var]]),
            )
    return total
