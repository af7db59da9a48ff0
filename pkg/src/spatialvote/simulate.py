"""Synthetic parliaments and the built-in sensitivity-study catalog.

A scenario pins a block-structured legislature (groups with disjoint
ideal-point sub-intervals, plus optionally a small heterogeneous group whose
members sit between flanking groups), motion parameters drawn from a
zero-mean normal, completely-at-random missingness, and an anchor placement
rule. The catalog's ten scenarios share one generative seed so they differ
only along the axis each one studies: anchor placement (1-5), the fitted
link (6), the missingness rate (7-8) and the prior's hierarchy (9-10).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import summarize
from .diagnostics import InfoCriteria, information_criteria
from .model import ItemParams, LinkFunction, PriorConfig, PriorKind, link_eval
from .rollcall import MISSING, NAY, YEA, VoteMatrix
from .sampler import AnchorSpec, ChainConfig, PosteriorDraws, run_chain

# half-width of the uniform jitter around a heterogeneous member's center
HETERO_JITTER = 0.1


class MissingnessWarning(UserWarning):
    """Some row or column lost every vote to the missingness mask."""


@dataclass(frozen=True)
class GroupSpec:
    """One legislator group.

    Homogeneous groups draw ideal points uniformly from (beta_low, beta_high).
    A heterogeneous group instead cycles its members through fixed centers
    (each jittered by +/- HETERO_JITTER); beta_low/beta_high then bound the
    envelope of possible values.
    """

    label: str
    proportion: float
    beta_low: float
    beta_high: float
    heterogeneous: bool = False
    centers: tuple = ()

    def __post_init__(self):
        if not self.label:
            raise ValueError("group label must be non-empty")
        if not 0.0 < self.proportion <= 1.0:
            raise ValueError(f"group proportion {self.proportion} outside (0, 1]")
        if not self.beta_low < self.beta_high:
            raise ValueError(
                f"group interval [{self.beta_low}, {self.beta_high}] is empty")
        if self.heterogeneous and not self.centers:
            raise ValueError("heterogeneous group needs at least one center")
        if self.heterogeneous:
            for c in self.centers:
                if c - HETERO_JITTER < self.beta_low or c + HETERO_JITTER > self.beta_high:
                    raise ValueError(
                        f"center {c} with jitter escapes the group envelope")


@dataclass(frozen=True)
class ScenarioSpec:
    """Full recipe for one synthetic study."""

    name: str
    description: str
    groups: tuple
    beta_range: tuple
    anchor_targets: object = (-1.5, 3.0)
    n: int = 91
    m: int = 417
    item_variance: float = 9.0
    missing_rate: float = 0.4
    gen_link: LinkFunction = LinkFunction.LOGIT
    fit_link: LinkFunction = LinkFunction.LOGIT
    prior_kind: PriorKind = PriorKind.FIXED
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least 2 legislators")
        if self.m < 1:
            raise ValueError("need at least 1 motion")
        total = sum(g.proportion for g in self.groups)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"group proportions sum to {total}, expected 1")
        lo, hi = self.beta_range
        if not lo < hi:
            raise ValueError("beta_range is empty")
        for g in self.groups:
            if g.beta_low < lo - 1e-12 or g.beta_high > hi + 1e-12:
                raise ValueError(
                    f"group {g.label} interval escapes beta_range {self.beta_range}")
        if self.item_variance <= 0:
            raise ValueError("item variance must be positive")
        if not 0.0 <= self.missing_rate < 1.0:
            raise ValueError(f"missing rate {self.missing_rate} outside [0, 1)")
        if self.anchor_targets != "extremes":
            t1, t2 = self.anchor_targets
            if not float(t1) < float(t2):
                raise ValueError("anchor targets must be ordered low < high")


@dataclass
class SyntheticParliament:
    """Generated ground truth plus the observable vote matrix."""

    spec: ScenarioSpec
    items: ItemParams
    ideal_points: np.ndarray
    groups: tuple
    votes: VoteMatrix

    @property
    def true_beta(self) -> np.ndarray:
        return self.ideal_points[:, 0]


def group_sizes(proportions, n: int) -> list:
    """Apportion n seats by largest remainder; ties go to the earlier group."""
    props = np.asarray(list(proportions), dtype=float)
    quotas = props * n
    sizes = np.floor(quotas).astype(int)
    short = n - int(sizes.sum())
    if short > 0:
        remainders = quotas - sizes
        order = np.argsort(-remainders, kind="stable")
        sizes[order[:short]] += 1
    return [int(s) for s in sizes]


def generate_parliament(spec: ScenarioSpec, rng) -> SyntheticParliament:
    """Draw one parliament: items, ideal points, votes, then the missing mask.

    The draw order is fixed (approvals, discriminations, group-by-group ideal
    points, one uniform block for votes, one uniform block for the mask), so
    two specs sharing a seed share everything upstream of where they differ;
    in particular masks at different rates nest.
    """
    sd = np.sqrt(spec.item_variance)
    approval = rng.normal(0.0, sd, spec.m)
    discrimination = rng.normal(0.0, sd, (spec.m, 1))
    items = ItemParams(approval=approval, discrimination=discrimination)
    sizes = group_sizes((g.proportion for g in spec.groups), spec.n)
    betas = []
    labels = []
    for g, size in zip(spec.groups, sizes):
        if g.heterogeneous:
            for k in range(size):
                center = g.centers[k % len(g.centers)]
                betas.append(center + rng.uniform(-HETERO_JITTER, HETERO_JITTER))
        else:
            betas.extend(rng.uniform(g.beta_low, g.beta_high, size))
        labels.extend([g.label] * size)
    ideal = np.asarray(betas)[:, None]
    eta = items.approval[None, :] + ideal @ items.discrimination.T
    p = link_eval(spec.gen_link, eta)
    cells = np.where(rng.random(eta.shape) < p, YEA, NAY).astype(np.int8)
    mask_uniform = rng.random(eta.shape)
    cells = np.where(mask_uniform < spec.missing_rate, MISSING, cells).astype(np.int8)
    _warn_fully_missing(cells)
    width = len(str(spec.n))
    legislator_ids = tuple(f"L{i + 1:0{width}d}" for i in range(spec.n))
    width_m = len(str(spec.m))
    motion_ids = tuple(f"V{j + 1:0{width_m}d}" for j in range(spec.m))
    votes = VoteMatrix(cells, legislator_ids, motion_ids)
    return SyntheticParliament(
        spec=spec, items=items, ideal_points=ideal, groups=tuple(labels), votes=votes)


def _warn_fully_missing(cells: np.ndarray):
    obs = cells != MISSING
    rows = int((~obs.any(axis=1)).sum())
    cols = int((~obs.any(axis=0)).sum())
    if rows or cols:
        warnings.warn(
            f"missingness left {rows} legislators and {cols} motions with no votes",
            MissingnessWarning, stacklevel=3)


def apply_missingness(vm: VoteMatrix, rate: float, rng) -> VoteMatrix:
    """Blank cells completely at random at the given rate (on top of existing)."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"missing rate {rate} outside [0, 1)")
    mask = rng.random(vm.cells.shape) < rate
    cells = np.where(mask, MISSING, vm.cells).astype(np.int8)
    _warn_fully_missing(cells)
    return VoteMatrix(cells, vm.legislator_ids, vm.motion_ids, vm.meta)


def choose_anchors(true_beta: np.ndarray, targets) -> AnchorSpec:
    """Pick the anchor pair and fix them at -1 and +1.

    targets is either "extremes" (the lowest and highest true ideal points)
    or an ordered pair of positions; the legislators nearest each target are
    anchored, the low target at -1 and the high one at +1.
    """
    beta = np.asarray(true_beta, dtype=float).ravel()
    if beta.size < 2:
        raise ValueError("need at least 2 legislators to anchor")
    if isinstance(targets, str):
        if targets != "extremes":
            raise ValueError(f"unknown anchor rule {targets!r}")
        i_low = int(np.argmin(beta))
        i_high = int(np.argmax(beta))
    else:
        t_low, t_high = (float(t) for t in targets)
        i_low = int(np.argmin(np.abs(beta - t_low)))
        dist_high = np.abs(beta - t_high)
        dist_high[i_low] = np.inf
        i_high = int(np.argmin(dist_high))
    if i_low == i_high:
        raise ValueError("anchor targets resolve to one legislator")
    return AnchorSpec.pair(i_low, i_high)


def _unbalanced_groups() -> tuple:
    # centers of the heterogeneous pair sit midway between the flanking
    # groups' interval centers: (2.25 + -0.25)/2 and (-2.0 + -0.25)/2
    return (
        GroupSpec("group-1", 0.75, 0.5, 4.0),
        GroupSpec("group-2", 0.15, -3.0, -1.0),
        GroupSpec("group-3", 0.02, -1.125 - HETERO_JITTER, 1.0 + HETERO_JITTER,
                  heterogeneous=True, centers=(1.0, -1.125)),
        GroupSpec("group-4", 0.08, -0.75, 0.25),
    )


def _balanced_groups() -> tuple:
    return (
        GroupSpec("left", 0.5, -3.0, -0.5),
        GroupSpec("right", 0.5, 0.5, 3.0),
    )


DEFAULT_CATALOG_SEED = 2718


def scenario_catalog(parliament: str = "unbalanced",
                     base_seed: int = DEFAULT_CATALOG_SEED) -> list:
    """The ten standard scenarios, all sharing one generative seed.

    1-5 vary anchor placement, 6 refits scenario 4's data with a probit link,
    7-8 rerun it at 10% and 60% missingness, 9-10 swap in hierarchical
    priors on the ideal points.
    """
    if parliament == "unbalanced":
        groups = _unbalanced_groups()
        beta_range = (-3.0, 4.0)
    elif parliament == "balanced":
        groups = _balanced_groups()
        beta_range = (-3.0, 3.0)
    else:
        raise ValueError(f"unknown parliament layout {parliament!r}")
    base = dict(groups=groups, beta_range=beta_range, seed=base_seed)
    anchor_plans = [
        ("scenario-1", "anchors symmetric and close to the center", (-0.3, 0.3)),
        ("scenario-2", "low anchor extreme, high anchor central", (-2.5, 0.0)),
        ("scenario-3", "low anchor central, high anchor extreme", (0.0, 2.5)),
        ("scenario-4", "anchors on opposite sides, unequal distances", (-1.5, 3.0)),
        ("scenario-5", "anchors at the true extremes", "extremes"),
    ]
    out = [
        ScenarioSpec(name=name, description=desc, anchor_targets=targets, **base)
        for name, desc, targets in anchor_plans
    ]
    s4 = out[3]
    out.append(replace(s4, name="scenario-6",
                       description="scenario 4 refit with a probit link",
                       fit_link=LinkFunction.PROBIT))
    out.append(replace(s4, name="scenario-7",
                       description="scenario 4 at 10% missing votes",
                       missing_rate=0.10))
    out.append(replace(s4, name="scenario-8",
                       description="scenario 4 at 60% missing votes",
                       missing_rate=0.60))
    out.append(replace(s4, name="scenario-9",
                       description="scenario 4 with hierarchical prior variance",
                       prior_kind=PriorKind.HIER_VAR))
    out.append(replace(s4, name="scenario-10",
                       description="scenario 4 with hierarchical prior mean and variance",
                       prior_kind=PriorKind.HIER_MEAN_VAR))
    return out


@dataclass(frozen=True)
class FitSchedule:
    """Desk-scale chain schedule used by scenario runs."""

    iterations_total: int = 6000
    burn_in: int = 1000
    thin: int = 1
    seed: int = None


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    parliament: SyntheticParliament
    anchors: AnchorSpec
    draws: PosteriorDraws
    criteria: InfoCriteria
    recovery: object
    mean_ci_width: float


def _fit_seed_for(spec: ScenarioSpec) -> int:
    # distinct deterministic stream for the sampler, derived from the
    # generative seed
    return int(np.random.SeedSequence(entropy=spec.seed,
                                      spawn_key=(1,)).generate_state(1)[0])


def run_scenario(spec: ScenarioSpec, schedule: FitSchedule = None) -> ScenarioResult:
    """Generate the parliament, fit it, and score recovery and fit quality.

    Recovery statistics and interval widths cover non-anchored legislators
    only; anchored rows are constants by construction.
    """
    schedule = schedule or FitSchedule()
    rng = np.random.default_rng(spec.seed)
    parliament = generate_parliament(spec, rng)
    anchors = choose_anchors(parliament.true_beta, spec.anchor_targets)
    cfg = ChainConfig(
        dim=1,
        link=spec.fit_link,
        priors=PriorConfig.default(1, kind=spec.prior_kind),
        anchors=anchors,
        iterations_total=schedule.iterations_total,
        burn_in=schedule.burn_in,
        thin=schedule.thin,
        seed=schedule.seed if schedule.seed is not None else _fit_seed_for(spec),
    )
    draws = run_chain(parliament.votes, cfg)
    criteria = information_criteria(draws, parliament.votes)
    free = np.ones(spec.n, dtype=bool)
    free[list(anchors.indices)] = False
    post_mean = draws.ideal_points[:, :, 0].mean(axis=0)
    recovery = summarize.recovery_metrics(post_mean[free], parliament.true_beta[free])
    lo = np.quantile(draws.ideal_points[:, free, 0], 0.025, axis=0)
    hi = np.quantile(draws.ideal_points[:, free, 0], 0.975, axis=0)
    return ScenarioResult(
        spec=spec,
        parliament=parliament,
        anchors=anchors,
        draws=draws,
        criteria=criteria,
        recovery=recovery,
        mean_ci_width=float((hi - lo).mean()),
    )


def group_mean_ordering(parliament: SyntheticParliament, estimates: np.ndarray):
    """Group labels ordered by true mean position and by estimated mean.

    A faithful fit preserves the ordering (the two lists match).
    """
    labels = list(dict.fromkeys(parliament.groups))
    truth = parliament.true_beta
    est = np.asarray(estimates, dtype=float).ravel()
    marks = np.asarray(parliament.groups)
    true_means = {g: truth[marks == g].mean() for g in labels}
    est_means = {g: est[marks == g].mean() for g in labels}
    true_order = sorted(labels, key=lambda g: true_means[g])
    est_order = sorted(labels, key=lambda g: est_means[g])
    return true_order, est_order


def write_truth(parliament: SyntheticParliament, path) -> None:
    """Write the `legislator_id,group,true_beta` sidecar."""
    lines = ["legislator_id,group,true_beta"]
    for lid, grp, beta in zip(parliament.votes.legislator_ids,
                              parliament.groups, parliament.true_beta):
        lines.append(f"{lid},{grp},{float(beta)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_truth(path):
    """Read a truth sidecar back into (ids, groups, true betas)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "legislator_id,group,true_beta":
        raise ValueError("not a truth sidecar")
    ids, groups, betas = [], [], []
    for ln in lines[1:]:
        lid, grp, beta = ln.split(",")
        ids.append(lid)
        groups.append(grp)
        betas.append(float(beta))
    return tuple(ids), tuple(groups), np.array(betas)
