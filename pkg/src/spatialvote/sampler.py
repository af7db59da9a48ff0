"""Gibbs sampler for the spatial voting model.

Each sweep augments the observed votes with latent variables (truncated-normal
utilities under probit, Polya-Gamma weights under logit), then draws every
motion's (approval, discrimination) block and every free ideal point from
their conjugate Gaussian full conditionals, and finally the ideal-point
hyperparameters when the prior is hierarchical. Anchored ideal points stay
bit-identical to their fixed values, which resolves translation, scale and
reflection invariance of the likelihood.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rvs
from .model import (
    ItemParams,
    LinkFunction,
    PriorConfig,
    PriorKind,
    linear_predictor,
    log_likelihood,
)
from .rollcall import YEA, VoteMatrix


class IdentificationWarning(UserWarning):
    """Raised when the anchor set is too small to pin down the posterior."""


@dataclass
class AnchorSpec:
    """Legislators whose ideal points are held fixed.

    indices are row positions in the vote matrix; values is a (k, d) array of
    fixed coordinates. Identification of a d-dimensional model needs d+1
    anchors at affinely independent positions; fewer only draws a warning
    since the sampler still runs (the posterior is simply not identified).
    """

    indices: tuple = ()
    values: np.ndarray = field(default_factory=lambda: np.zeros((0, 1)))

    def __post_init__(self):
        self.indices = tuple(int(i) for i in self.indices)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.size == 0:
            vals = vals.reshape(0, vals.shape[1] if vals.ndim == 2 else 1)
        self.values = vals
        if len(self.indices) != self.values.shape[0]:
            raise ValueError("anchor indices and values disagree in length")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("anchor indices must be distinct")
        if not np.isfinite(self.values).all():
            raise ValueError("anchor values must be finite")
        if len(self.indices) >= 2:
            for a in range(self.values.shape[0]):
                for b in range(a + 1, self.values.shape[0]):
                    if np.array_equal(self.values[a], self.values[b]):
                        raise ValueError("anchor values must be pairwise distinct")

    @classmethod
    def none(cls, dim: int = 1) -> "AnchorSpec":
        return cls(indices=(), values=np.zeros((0, dim)))

    @classmethod
    def pair(cls, low_index: int, high_index: int,
             low: float = -1.0, high: float = 1.0) -> "AnchorSpec":
        """Standard one-dimensional anchoring at two fixed positions."""
        if low == high:
            raise ValueError("anchor positions must differ")
        return cls(indices=(low_index, high_index),
                   values=np.array([[low], [high]]))

    @property
    def count(self) -> int:
        return len(self.indices)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def check(self, n: int, dim: int):
        if self.count and self.dim != dim:
            raise ValueError(f"anchors have dim {self.dim}, model has {dim}")
        for i in self.indices:
            if not 0 <= i < n:
                raise ValueError(f"anchor index {i} outside 0..{n - 1}")
        if self.count < dim + 1:
            warnings.warn(
                f"{self.count} anchors for a {dim}-dimensional model; "
                f"need {dim + 1} for identification",
                IdentificationWarning,
                stacklevel=3,
            )


@dataclass
class ChainConfig:
    """Sampler run settings.

    Defaults follow the production schedule (424000 sweeps, 24000 burn-in,
    thin 5, so 80000 retained draws). Desk-scale exploration typically uses
    6000/1000/1.
    """

    dim: int = 1
    link: LinkFunction = LinkFunction.LOGIT
    priors: PriorConfig = None
    anchors: AnchorSpec = None
    iterations_total: int = 424_000
    burn_in: int = 24_000
    thin: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.priors is None:
            self.priors = PriorConfig.default(self.dim)
        if self.anchors is None:
            self.anchors = AnchorSpec.none(self.dim)
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if self.priors.dim != self.dim:
            raise ValueError(
                f"priors are {self.priors.dim}-dimensional, model is {self.dim}"
            )
        if self.priors.kind is not PriorKind.FIXED and self.dim != 1:
            raise ValueError("hierarchical priors support dimension 1 only")
        if self.iterations_total < 1:
            raise ValueError("iterations_total must be positive")
        if not 0 <= self.burn_in < self.iterations_total:
            raise ValueError("burn_in must lie in [0, iterations_total)")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.retained < 1:
            raise ValueError("schedule retains no draws")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def retained(self) -> int:
        return (self.iterations_total - self.burn_in) // self.thin


@dataclass
class ChainState:
    """Mutable sampler state for one chain."""

    items: ItemParams
    ideal_points: np.ndarray
    latent: np.ndarray
    hyper_mean: float
    hyper_var: float


def init_state(vm: VoteMatrix, cfg: ChainConfig, rng) -> ChainState:
    """Anchored rows at their fixed values, everything else at prior means."""
    cfg.anchors.check(vm.n, cfg.dim)
    items = ItemParams(
        approval=np.full(vm.m, cfg.priors.item_mean[0]),
        discrimination=np.tile(cfg.priors.item_mean[1:], (vm.m, 1)),
    )
    ideal = np.tile(cfg.priors.ideal_mean, (vm.n, 1))
    if cfg.anchors.count:
        ideal[list(cfg.anchors.indices)] = cfg.anchors.values
    hyper_mean = float(cfg.priors.ideal_mean[0]) if cfg.dim == 1 else 0.0
    if cfg.priors.kind is PriorKind.FIXED:
        hyper_var = float(cfg.priors.ideal_cov[0, 0])
    else:
        # prior mean of the inverse-gamma stage
        hyper_var = cfg.priors.var_scale / (cfg.priors.var_shape - 1.0)
    state = ChainState(
        items=items,
        ideal_points=ideal,
        latent=np.full((vm.n, vm.m), np.nan),
        hyper_mean=hyper_mean,
        hyper_var=hyper_var,
    )
    sample_latent(state, vm, cfg.link, rng)
    return state


def sample_latent(state: ChainState, vm: VoteMatrix, link: LinkFunction, rng) -> np.ndarray:
    """Refresh augmentation variables at observed cells; missing cells untouched.

    Probit stores the truncated-normal latent utility (positive for Yea,
    non-positive for Nay); logit stores the Polya-Gamma weight.
    """
    eta = linear_predictor(state.items, state.ideal_points)
    obs = vm.observed_mask
    loc = eta[obs]
    if link is LinkFunction.PROBIT:
        yea = vm.cells[obs] == YEA
        draw = np.empty(loc.size)
        if yea.any():
            draw[yea] = loc[yea] + rvs.trunc_std_normal_lower(-loc[yea], rng)
        nay = ~yea
        if nay.any():
            draw[nay] = loc[nay] - rvs.trunc_std_normal_lower(loc[nay], rng)
    elif link is LinkFunction.LOGIT:
        draw = rvs.polya_gamma(loc, rng)
    else:
        raise ValueError(f"unknown link {link!r}")
    state.latent[obs] = draw
    return state.latent


def _weights_and_responses(state: ChainState, vm: VoteMatrix, link: LinkFunction):
    """Per-cell Gaussian weights W and weighted responses S (zero at missing).

    The two augmentations share one weighted-least-squares shape: probit has
    unit weights with response equal to the latent utility, logit has weight
    omega with weighted response y - 1/2.
    """
    obs = vm.observed_mask
    if link is LinkFunction.PROBIT:
        weights = obs.astype(float)
        responses = np.where(obs, state.latent, 0.0)
    else:
        weights = np.where(obs, state.latent, 0.0)
        responses = np.where(obs, (vm.cells == YEA) - 0.5, 0.0)
    return weights, responses


def _draw_gaussian_blocks(mean_systems, rhs, rng):
    """Draw x_k ~ N(M_k^{-1} r_k, M_k^{-1}) for a batch of SPD systems."""
    cov = np.linalg.inv(mean_systems)
    cov = 0.5 * (cov + np.transpose(cov, (0, 2, 1)))
    mean = np.einsum("kpq,kq->kp", cov, rhs)
    chol = np.linalg.cholesky(cov)
    noise = rng.standard_normal(mean.shape)
    return mean + np.einsum("kpq,kq->kp", chol, noise), mean, cov


def update_item_params(state: ChainState, vm: VoteMatrix, priors: PriorConfig,
                       link: LinkFunction, rng) -> ItemParams:
    """Joint draw of every motion's (approval, discrimination) block.

    The conditional is Gaussian with precision X' W_j X + item_cov^{-1} and
    mean solving against X' S_j + item_cov^{-1} item_mean, where X stacks
    (1, ideal point) rows over all legislators, anchored ones included, and
    only observed cells carry weight. Motions with no observed votes reduce
    to the prior.
    """
    weights, responses = _weights_and_responses(state, vm, link)
    design = np.column_stack([np.ones(vm.n), state.ideal_points])
    prior_prec = np.linalg.inv(priors.item_cov)
    prior_pull = prior_prec @ priors.item_mean
    systems = np.einsum("ip,ij,iq->jpq", design, weights, design) + prior_prec[None]
    rhs = np.einsum("ip,ij->jp", design, responses) + prior_pull[None]
    draw, _, _ = _draw_gaussian_blocks(systems, rhs, rng)
    state.items = ItemParams(approval=draw[:, 0], discrimination=draw[:, 1:])
    return state.items


def update_ideal_points(state: ChainState, vm: VoteMatrix, priors: PriorConfig,
                        anchors: AnchorSpec, link: LinkFunction, rng) -> np.ndarray:
    """Draw every free ideal point; anchored rows are reset to their values.

    Per legislator the conditional is Gaussian with precision
    sum_j W_ij alpha_j alpha_j' + prior_prec over their observed motions and
    mean pulled toward the (possibly hierarchical) prior. Legislators with no
    observed votes reduce to the prior.
    """
    weights, responses = _weights_and_responses(state, vm, link)
    disc = state.items.discrimination
    d = disc.shape[1]
    if priors.kind is PriorKind.FIXED:
        prior_prec = np.linalg.inv(priors.ideal_cov)
        prior_pull = prior_prec @ priors.ideal_mean
    else:
        prior_prec = np.array([[1.0 / state.hyper_var]])
        prior_pull = np.array([state.hyper_mean / state.hyper_var])
    # responses already fold in the weight; only the approval offset needs it
    partial = responses - weights * state.items.approval[None, :]
    systems = np.einsum("jp,ij,jq->ipq", disc, weights, disc) + prior_prec[None]
    rhs = partial @ disc + prior_pull[None]
    draw, _, _ = _draw_gaussian_blocks(systems, rhs, rng)
    if anchors.count:
        draw[list(anchors.indices)] = anchors.values
    state.ideal_points = draw.reshape(vm.n, d)
    return state.ideal_points


def update_hierarchy(state: ChainState, priors: PriorConfig, anchors: AnchorSpec, rng):
    """Draw the ideal-point prior variance (and mean) second stage.

    Conditional on the free ideal points the variance is inverse-gamma and,
    for the mean-and-variance kind, the mean is Gaussian. Only dimension 1 is
    supported; anchored rows do not enter.
    """
    if priors.kind is PriorKind.FIXED:
        raise ValueError("hierarchy update requires a hierarchical prior kind")
    if state.ideal_points.shape[1] != 1:
        raise ValueError("hierarchical priors support dimension 1 only")
    free = np.ones(state.ideal_points.shape[0], dtype=bool)
    if anchors.count:
        free[list(anchors.indices)] = False
    betas = state.ideal_points[free, 0]
    shape = priors.var_shape + 0.5 * betas.size
    scale = priors.var_scale + 0.5 * float(((betas - state.hyper_mean) ** 2).sum())
    state.hyper_var = scale / rng.gamma(shape)
    if priors.kind is PriorKind.HIER_MEAN_VAR:
        prec = betas.size / state.hyper_var + 1.0 / priors.mean_scale_var
        mean = (betas.sum() / state.hyper_var
                + priors.mean_loc / priors.mean_scale_var) / prec
        state.hyper_mean = mean + rng.standard_normal() / np.sqrt(prec)
    return state.hyper_mean, state.hyper_var


@dataclass
class PosteriorDraws:
    """Retained draws from one chain plus the configuration that produced them.

    approval: (s, m); discrimination: (s, m, d); ideal_points: (s, n, d);
    log_likelihood: (s,); hyper_mean/hyper_var: (s,) or None when the prior
    is fixed.
    """

    approval: np.ndarray
    discrimination: np.ndarray
    ideal_points: np.ndarray
    log_likelihood: np.ndarray
    config: ChainConfig
    seed: int
    legislator_ids: tuple = ()
    motion_ids: tuple = ()
    hyper_mean: np.ndarray = None
    hyper_var: np.ndarray = None

    @property
    def n_draws(self) -> int:
        return self.approval.shape[0]

    @property
    def dim(self) -> int:
        return self.discrimination.shape[2]

    @property
    def anchored_indices(self) -> tuple:
        return self.config.anchors.indices


def run_chain(vm: VoteMatrix, cfg: ChainConfig, seed: int = None) -> PosteriorDraws:
    """Run one Gibbs chain and return the retained draws.

    The sweep order is latent variables, item blocks, ideal points, then the
    hierarchy when active. All randomness flows through one generator seeded
    from cfg.seed (or the override), so identical inputs reproduce identical
    draws bit for bit.
    """
    actual_seed = cfg.seed if seed is None else int(seed)
    rng = np.random.default_rng(actual_seed)
    state = init_state(vm, cfg, rng)
    s = cfg.retained
    hier = cfg.priors.kind is not PriorKind.FIXED
    out = PosteriorDraws(
        approval=np.empty((s, vm.m)),
        discrimination=np.empty((s, vm.m, cfg.dim)),
        ideal_points=np.empty((s, vm.n, cfg.dim)),
        log_likelihood=np.empty(s),
        config=cfg,
        seed=actual_seed,
        legislator_ids=vm.legislator_ids,
        motion_ids=vm.motion_ids,
        hyper_mean=np.empty(s) if hier else None,
        hyper_var=np.empty(s) if hier else None,
    )
    k = 0
    for sweep in range(1, cfg.iterations_total + 1):
        sample_latent(state, vm, cfg.link, rng)
        update_item_params(state, vm, cfg.priors, cfg.link, rng)
        update_ideal_points(state, vm, cfg.priors, cfg.anchors, cfg.link, rng)
        if hier:
            update_hierarchy(state, cfg.priors, cfg.anchors, rng)
        if sweep > cfg.burn_in and (sweep - cfg.burn_in) % cfg.thin == 0:
            out.approval[k] = state.items.approval
            out.discrimination[k] = state.items.discrimination
            out.ideal_points[k] = state.ideal_points
            out.log_likelihood[k] = log_likelihood(vm, state.items, state.ideal_points, cfg.link)
            if hier:
                out.hyper_mean[k] = state.hyper_mean
                out.hyper_var[k] = state.hyper_var
            k += 1
    assert k == s
    return out


def run_chains_parallel(vm: VoteMatrix, cfg: ChainConfig, n_chains: int = 4,
                        seeds=None, max_workers: int = None) -> list:
    """Run several chains with distinct seeds, optionally across threads.

    Results are returned in seed order regardless of scheduling, so the
    output is identical to running the chains one by one.
    """
    if n_chains < 1:
        raise ValueError("need at least one chain")
    if seeds is None:
        seeds = [cfg.seed + k for k in range(n_chains)]
    seeds = [int(s) for s in seeds]
    if len(seeds) != n_chains:
        raise ValueError(f"{len(seeds)} seeds for {n_chains} chains")
    if len(set(seeds)) != len(seeds):
        raise ValueError("chain seeds must be distinct")
    if max_workers is None or max_workers <= 1 or n_chains == 1:
        return [run_chain(vm, cfg, seed=s) for s in seeds]
    with ThreadPoolExecutor(max_workers=min(max_workers, n_chains)) as pool:
        futures = [pool.submit(run_chain, vm, cfg, s) for s in seeds]
        return [f.result() for f in futures]


# draws-file serialization: a long-format table and a key-value sidecar

def write_draws(draws: PosteriorDraws, draws_path, config_path=None) -> None:
    """Write the long-format draws table and its config sidecar.

    Values are serialized with repr so reading them back is bit-exact.
    """
    draws_path = str(draws_path)
    if config_path is None:
        config_path = _default_config_path(draws_path)
    s, m = draws.approval.shape
    n = draws.ideal_points.shape[1]
    d = draws.dim
    # one (kind, index, dim) prefix per value in a draw, in storage order
    prefixes = [f"approval,{j},0" for j in range(m)]
    prefixes += [f"discrimination,{j},{k}" for j in range(m) for k in range(d)]
    prefixes += [f"ideal_point,{i},{k}" for i in range(n) for k in range(d)]
    prefixes.append("loglik,0,0")
    if draws.hyper_mean is not None:
        prefixes += ["hyper_mean,0,0", "hyper_var,0,0"]
    with open(draws_path, "w") as fh:
        fh.write("draw,param_kind,index,dim,value\n")
        for t in range(s):
            blocks = [
                draws.approval[t],
                draws.discrimination[t].ravel(),
                draws.ideal_points[t].ravel(),
                [draws.log_likelihood[t]],
            ]
            if draws.hyper_mean is not None:
                blocks.append([draws.hyper_mean[t], draws.hyper_var[t]])
            values = np.concatenate(blocks).tolist()
            fh.write("\n".join(
                f"{t},{pre},{v!r}" for pre, v in zip(prefixes, values)
            ) + "\n")
    with open(config_path, "w") as fh:
        fh.write(serialize_config(draws))


def _default_config_path(draws_path: str) -> str:
    stem = draws_path[:-4] if draws_path.endswith(".csv") else draws_path
    return stem + ".config.txt"


def _fmt_floats(arr) -> str:
    return ",".join(repr(float(v)) for v in np.asarray(arr, dtype=float).ravel())


def serialize_config(draws: PosteriorDraws) -> str:
    """Key-value sidecar capturing the chain configuration and identifiers."""
    cfg = draws.config
    pr = cfg.priors
    lines = [
        "# chain configuration echo",
        f"seed={draws.seed}",
        f"dim={cfg.dim}",
        f"link={cfg.link.value}",
        f"iterations_total={cfg.iterations_total}",
        f"burn_in={cfg.burn_in}",
        f"thin={cfg.thin}",
        f"retained={draws.n_draws}",
        f"prior_kind={pr.kind.value}",
        f"prior_item_mean={_fmt_floats(pr.item_mean)}",
        f"prior_item_cov={_fmt_floats(pr.item_cov)}",
        f"prior_ideal_mean={_fmt_floats(pr.ideal_mean)}",
        f"prior_ideal_cov={_fmt_floats(pr.ideal_cov)}",
        f"prior_var_shape={pr.var_shape!r}",
        f"prior_var_scale={pr.var_scale!r}",
        f"prior_mean_loc={pr.mean_loc!r}",
        f"prior_mean_scale_var={pr.mean_scale_var!r}",
        f"anchor_indices={','.join(str(i) for i in cfg.anchors.indices)}",
        f"anchor_values={_fmt_floats(cfg.anchors.values)}",
        f"legislator_ids={','.join(draws.legislator_ids)}",
        f"motion_ids={','.join(draws.motion_ids)}",
    ]
    return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> dict:
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line {raw!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def _floats_from(text: str) -> np.ndarray:
    if not text:
        return np.array([])
    return np.array([float(v) for v in text.split(",")])


def read_draws(draws_path, config_path=None) -> PosteriorDraws:
    """Read a draws table and sidecar back into PosteriorDraws (bit-exact)."""
    import pandas as pd

    draws_path = str(draws_path)
    if config_path is None:
        config_path = _default_config_path(draws_path)
    with open(config_path) as fh:
        kv = parse_config_text(fh.read())
    dim = int(kv["dim"])
    anchor_idx = tuple(int(i) for i in kv["anchor_indices"].split(",")) if kv.get("anchor_indices") else ()
    anchor_vals = _floats_from(kv.get("anchor_values", "")).reshape(-1, dim) if anchor_idx else np.zeros((0, dim))
    priors = PriorConfig(
        item_mean=_floats_from(kv["prior_item_mean"]),
        item_cov=_floats_from(kv["prior_item_cov"]).reshape(dim + 1, dim + 1),
        ideal_mean=_floats_from(kv["prior_ideal_mean"]),
        ideal_cov=_floats_from(kv["prior_ideal_cov"]).reshape(dim, dim),
        kind=PriorKind(kv["prior_kind"]),
        var_shape=float(kv["prior_var_shape"]),
        var_scale=float(kv["prior_var_scale"]),
        mean_loc=float(kv["prior_mean_loc"]),
        mean_scale_var=float(kv["prior_mean_scale_var"]),
    )
    cfg = ChainConfig(
        dim=dim,
        link=LinkFunction(kv["link"]),
        priors=priors,
        anchors=AnchorSpec(indices=anchor_idx, values=anchor_vals),
        iterations_total=int(kv["iterations_total"]),
        burn_in=int(kv["burn_in"]),
        thin=int(kv["thin"]),
        seed=int(kv["seed"]),
    )
    legislator_ids = tuple(kv["legislator_ids"].split(",")) if kv.get("legislator_ids") else ()
    motion_ids = tuple(kv["motion_ids"].split(",")) if kv.get("motion_ids") else ()
    table = pd.read_csv(
        draws_path,
        dtype={"draw": np.int64, "param_kind": str, "index": np.int64,
               "dim": np.int64, "value": np.float64},
        float_precision="round_trip",
    )
    s = int(kv["retained"])
    n = len(legislator_ids)
    m = len(motion_ids)
    hier = priors.kind is not PriorKind.FIXED

    def grab(kind, shape):
        sub = table[table["param_kind"] == kind]
        arr = np.empty(shape)
        arr[sub["draw"].to_numpy(), sub["index"].to_numpy(), sub["dim"].to_numpy()] = sub["value"].to_numpy()
        return arr

    approval = grab("approval", (s, m, 1))[:, :, 0]
    discrimination = grab("discrimination", (s, m, dim))
    ideal_points = grab("ideal_point", (s, n, dim))
    loglik = grab("loglik", (s, 1, 1))[:, 0, 0]
    hyper_mean = grab("hyper_mean", (s, 1, 1))[:, 0, 0] if hier else None
    hyper_var = grab("hyper_var", (s, 1, 1))[:, 0, 0] if hier else None
    return PosteriorDraws(
        approval=approval,
        discrimination=discrimination,
        ideal_points=ideal_points,
        log_likelihood=loglik,
        config=cfg,
        seed=int(kv["seed"]),
        legislator_ids=legislator_ids,
        motion_ids=motion_ids,
        hyper_mean=hyper_mean,
        hyper_var=hyper_var,
    )
