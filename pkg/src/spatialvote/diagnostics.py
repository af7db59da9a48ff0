"""Convergence and model-comparison diagnostics.

Effective sample size uses the initial-positive-sequence truncation of the
autocorrelation function. DIC and WAIC are computed from retained draws over
observed cells only; WAIC streams over draw chunks so big draw-by-cell
matrices never materialize at once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.fft import next_fast_len, rfft, irfft

from . import model
from .model import ItemParams, LinkFunction
from .rollcall import MISSING, YEA, VoteMatrix
from .sampler import PosteriorDraws


class DegenerateChainWarning(UserWarning):
    """A constant chain has no usable autocorrelation structure."""


def effective_sample_size(chain) -> float:
    """ESS of one scalar chain via initial-positive-sequence truncation.

    The autocovariance comes from an FFT; consecutive lag pairs are summed
    and the series is cut at the first non-positive pair sum. A constant
    chain returns 0.0 with a DegenerateChainWarning. The estimate is capped
    at the chain length.
    """
    x = np.asarray(chain, dtype=float).ravel()
    n = x.size
    if n < 10:
        raise ValueError(f"need at least 10 draws for an ESS estimate, got {n}")
    if not np.isfinite(x).all():
        raise ValueError("chain contains non-finite values")
    if np.ptp(x) == 0.0:
        warnings.warn("constant chain has undefined autocorrelation; ESS set to 0",
                      DegenerateChainWarning, stacklevel=2)
        return 0.0
    centered = x - x.mean()
    nfft = next_fast_len(2 * n)
    spec = rfft(centered, nfft)
    acov = irfft(spec * np.conj(spec), nfft)[:n] / n
    rho = acov / acov[0]
    pairs = n // 2
    pair_sums = rho[0:2 * pairs:2] + rho[1:2 * pairs:2]
    negative = pair_sums <= 0.0
    cut = int(np.argmax(negative)) if negative.any() else pairs
    tau = 2.0 * pair_sums[:cut].sum() - 1.0
    if tau <= 0.0:
        return float(n)
    return float(min(n, n / tau))


def pooled_effective_sample_size(chains) -> float:
    """Sum of per-chain ESS values (chains assumed independently seeded)."""
    chains = list(chains)
    if not chains:
        raise ValueError("no chains given")
    return float(sum(effective_sample_size(c) for c in chains))


@dataclass(frozen=True)
class InfoCriteria:
    """Deviance-based and fully Bayesian model comparison numbers.

    dic = deviance at the posterior-mean parameters plus twice the effective
    parameter count p_d; waic = -2 (lppd - p_w). Smaller is better for both.
    """

    dic: float
    waic: float
    effective_params_dic: float
    effective_params_waic: float
    lppd: float


def _posterior_mean_params(draws: PosteriorDraws):
    items = ItemParams(
        approval=draws.approval.mean(axis=0),
        discrimination=draws.discrimination.mean(axis=0),
    )
    return items, draws.ideal_points.mean(axis=0)


def _resolve_link(draws: PosteriorDraws, link):
    return draws.config.link if link is None else link


def dic(draws: PosteriorDraws, vm: VoteMatrix, link: LinkFunction = None) -> float:
    """Deviance information criterion from retained draws.

    Uses the stored per-draw log likelihoods and the plug-in likelihood at
    the posterior mean: p_d = 2 (logL(mean params) - mean logL).
    """
    return information_criteria(draws, vm, link, want_waic=False).dic


def waic(draws: PosteriorDraws, vm: VoteMatrix, link: LinkFunction = None) -> float:
    return information_criteria(draws, vm, link, want_dic=False).waic


def information_criteria(draws: PosteriorDraws, vm: VoteMatrix,
                         link: LinkFunction = None, chunk: int = 256,
                         want_dic: bool = True, want_waic: bool = True) -> InfoCriteria:
    """Compute DIC and WAIC in one pass over the retained draws.

    WAIC accumulates, per observed cell, a running log-sum-exp of the cell
    likelihood and first/second moments of its log, in chunks of draws.
    """
    s = draws.n_draws
    if s < 2:
        raise ValueError(f"need at least 2 retained draws, got {s}")
    actual = _resolve_link(draws, link)
    items_bar, ideal_bar = _posterior_mean_params(draws)
    plug_in = model.log_likelihood(vm, items_bar, ideal_bar, actual)
    dic_val = p_dic = float("nan")
    if want_dic:
        mean_loglik = float(draws.log_likelihood.mean())
        p_dic = 2.0 * (plug_in - mean_loglik)
        dic_val = -2.0 * plug_in + 2.0 * p_dic
    waic_val = p_waic = lppd = float("nan")
    if want_waic:
        n_cells = int(vm.observed_mask.sum())
        running_lse = np.full(n_cells, -np.inf)
        sum1 = np.zeros(n_cells)
        sum2 = np.zeros(n_cells)
        for start in range(0, s, chunk):
            stop = min(start + chunk, s)
            block = np.empty((stop - start, n_cells))
            for t in range(start, stop):
                items_t = ItemParams(draws.approval[t], draws.discrimination[t])
                block[t - start] = model.observed_cell_log_prob(
                    vm, items_t, draws.ideal_points[t], actual)
            bmax = block.max(axis=0)
            running_lse = np.logaddexp(
                running_lse, bmax + np.log(np.exp(block - bmax[None, :]).sum(axis=0)))
            sum1 += block.sum(axis=0)
            sum2 += (block * block).sum(axis=0)
        lppd = float((running_lse - np.log(s)).sum())
        mean_log = sum1 / s
        var_log = np.maximum(sum2 - s * mean_log ** 2, 0.0) / (s - 1)
        p_waic = float(var_log.sum())
        waic_val = -2.0 * (lppd - p_waic)
    return InfoCriteria(
        dic=dic_val,
        waic=waic_val,
        effective_params_dic=p_dic,
        effective_params_waic=p_waic,
        lppd=lppd,
    )


# posterior predictive checks

def _observed_rates(cells: np.ndarray, axis: int) -> np.ndarray:
    obs = cells != MISSING
    count = obs.sum(axis=axis)
    yea = (cells == YEA).sum(axis=axis)
    keep = count > 0
    return yea[keep] / count[keep]


def stat_overall_yea_rate(cells: np.ndarray) -> float:
    obs = cells != MISSING
    return float((cells == YEA).sum() / obs.sum())


def stat_motion_yea_rate_sd(cells: np.ndarray) -> float:
    return float(np.std(_observed_rates(cells, axis=0)))


def stat_legislator_yea_rate_sd(cells: np.ndarray) -> float:
    return float(np.std(_observed_rates(cells, axis=1)))


def stat_motion_max_agreement(cells: np.ndarray) -> float:
    """Mean over motions of the majority share (max of Yea/Nay fractions)."""
    rates = _observed_rates(cells, axis=0)
    return float(np.maximum(rates, 1.0 - rates).mean())


PPC_STATISTICS = {
    "overall_yea_rate": stat_overall_yea_rate,
    "motion_yea_rate_sd": stat_motion_yea_rate_sd,
    "legislator_yea_rate_sd": stat_legislator_yea_rate_sd,
    "motion_max_agreement": stat_motion_max_agreement,
}


@dataclass(frozen=True)
class PpcResult:
    """One statistic's observed value, replicate draws and tail probability.

    p_value is the fraction of replicate statistics >= the observed one
    (ties count as >=); values near 0 or 1 flag misfit in that direction.
    """

    statistic: str
    observed: float
    replicates: np.ndarray
    p_value: float


def posterior_predictive_check(draws: PosteriorDraws, vm: VoteMatrix,
                               statistic: str, link: LinkFunction = None,
                               rng=None, max_replicates: int = None) -> PpcResult:
    """Replicate the vote matrix at observed positions and compare a statistic.

    One replicate per retained draw (sub-thinned evenly when max_replicates
    is smaller). The default generator is seeded from the draws' seed so
    repeated calls reproduce.
    """
    fn = PPC_STATISTICS.get(statistic)
    if fn is None:
        raise ValueError(
            f"unknown statistic {statistic!r}; known: {sorted(PPC_STATISTICS)}")
    actual = _resolve_link(draws, link)
    if rng is None:
        rng = np.random.default_rng(draws.seed)
    s = draws.n_draws
    if max_replicates is not None and max_replicates < s:
        use = np.linspace(0, s - 1, max_replicates).round().astype(int)
    else:
        use = np.arange(s)
    obs_mask = vm.observed_mask
    observed = fn(vm.cells)
    reps = np.empty(use.size)
    for k, t in enumerate(use):
        items_t = ItemParams(draws.approval[t], draws.discrimination[t])
        cells_rep = model.sample_votes(items_t, draws.ideal_points[t], actual,
                                       rng, observed_mask=obs_mask)
        reps[k] = fn(cells_rep)
    p = float((reps >= observed).mean())
    return PpcResult(statistic=statistic, observed=float(observed),
                     replicates=reps, p_value=p)
