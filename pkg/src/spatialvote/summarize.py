"""Posterior summaries: interval tables, pivot probabilities, bloc cohesion.

All quantiles use linear interpolation (the numpy default) so summaries are
deterministic functions of the draws. Significance of a parameter means its
central 95% interval excludes zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampler import PosteriorDraws


@dataclass(frozen=True)
class ParamSummary:
    """Posterior location/spread/interval for one scalar parameter."""

    kind: str
    index: int
    dim: int
    label: str
    mean: float
    sd: float
    q025: float
    q975: float
    significant: bool


def _summarize_block(kind, block, labels, out):
    """block: (s, count, d) draws; labels: per-index display names."""
    mean = block.mean(axis=0)
    sd = block.std(axis=0, ddof=1)
    lo = np.quantile(block, 0.025, axis=0)
    hi = np.quantile(block, 0.975, axis=0)
    count, d = mean.shape
    for idx in range(count):
        for k in range(d):
            out.append(ParamSummary(
                kind=kind, index=idx, dim=k, label=labels[idx],
                mean=float(mean[idx, k]), sd=float(sd[idx, k]),
                q025=float(lo[idx, k]), q975=float(hi[idx, k]),
                significant=not (lo[idx, k] <= 0.0 <= hi[idx, k]),
            ))


def posterior_summary(draws: PosteriorDraws) -> list:
    """Mean, sd and central 95% interval for every model parameter.

    Includes hyperparameters when the prior is hierarchical. Anchored ideal
    points appear with zero-width intervals at their fixed values.
    """
    if draws.n_draws < 2:
        raise ValueError("need at least 2 draws to summarize")
    out = []
    m = draws.approval.shape[1]
    n = draws.ideal_points.shape[1]
    motion_labels = list(draws.motion_ids) if len(draws.motion_ids) == m else [str(j) for j in range(m)]
    leg_labels = list(draws.legislator_ids) if len(draws.legislator_ids) == n else [str(i) for i in range(n)]
    _summarize_block("approval", draws.approval[:, :, None], motion_labels, out)
    _summarize_block("discrimination", draws.discrimination, motion_labels, out)
    _summarize_block("ideal_point", draws.ideal_points, leg_labels, out)
    if draws.hyper_mean is not None:
        _summarize_block("hyper_mean", draws.hyper_mean[:, None, None], ["hyper"], out)
        _summarize_block("hyper_var", draws.hyper_var[:, None, None], ["hyper"], out)
    return out


@dataclass(frozen=True)
class PivotProbabilities:
    """Posterior membership probabilities for three scale regions per legislator.

    low: mass below the low threshold; high: mass above the high threshold;
    center: mass within half_width of zero. Regions may overlap or leave
    gaps depending on the thresholds, so the three numbers need not sum to 1.
    """

    labels: tuple
    low: np.ndarray
    high: np.ndarray
    center: np.ndarray
    low_threshold: float
    high_threshold: float
    half_width: float


def pivot_probabilities(draws: PosteriorDraws, low_threshold: float = -1.0,
                        high_threshold: float = 1.0, half_width: float = 0.2) -> PivotProbabilities:
    """Fraction of draws in the low, high and center regions of the scale.

    One-dimensional fits only; thresholds must be ordered around zero.
    """
    if draws.dim != 1:
        raise ValueError("pivot probabilities are defined for 1-d fits only")
    if not low_threshold < high_threshold:
        raise ValueError("thresholds must be ordered")
    if half_width <= 0:
        raise ValueError("center half-width must be positive")
    beta = draws.ideal_points[:, :, 0]
    n = beta.shape[1]
    labels = tuple(draws.legislator_ids) if len(draws.legislator_ids) == n else tuple(str(i) for i in range(n))
    return PivotProbabilities(
        labels=labels,
        low=(beta < low_threshold).mean(axis=0),
        high=(beta > high_threshold).mean(axis=0),
        center=(np.abs(beta) < half_width).mean(axis=0),
        low_threshold=low_threshold,
        high_threshold=high_threshold,
        half_width=half_width,
    )


def pivot_report(pivots: PivotProbabilities, region: str = "center",
                 min_probability: float = 0.75, names: dict = None) -> list:
    """Human-readable "Name (99%)" lines for one region, sorted descending."""
    probs = getattr(pivots, region, None)
    if probs is None or region not in ("low", "high", "center"):
        raise ValueError(f"region must be low, high or center, got {region!r}")
    names = names or {}
    entries = [
        (names.get(lab, lab), p)
        for lab, p in zip(pivots.labels, probs)
        if p >= min_probability
    ]
    entries.sort(key=lambda e: (-e[1], e[0]))
    return [f"{name} ({round(100 * p):.0f}%)" for name, p in entries]


@dataclass(frozen=True)
class SignificanceReport:
    count: int
    total: int
    fraction: float
    flags: np.ndarray


def discrimination_significance(draws: PosteriorDraws) -> SignificanceReport:
    """Motions whose 95% interval excludes zero in at least one dimension."""
    lo = np.quantile(draws.discrimination, 0.025, axis=0)
    hi = np.quantile(draws.discrimination, 0.975, axis=0)
    flags = (~((lo <= 0.0) & (0.0 <= hi))).any(axis=1)
    return SignificanceReport(
        count=int(flags.sum()), total=int(flags.size),
        fraction=float(flags.mean()), flags=flags)


def ideal_point_significance(draws: PosteriorDraws) -> SignificanceReport:
    """Significance over non-anchored legislators only.

    Anchored rows are constants, so intervals around them are degenerate and
    excluded from the report.
    """
    lo = np.quantile(draws.ideal_points, 0.025, axis=0)
    hi = np.quantile(draws.ideal_points, 0.975, axis=0)
    flags = (~((lo <= 0.0) & (0.0 <= hi))).any(axis=1)
    free = np.ones(flags.size, dtype=bool)
    anchored = list(draws.anchored_indices)
    if anchored:
        free[anchored] = False
    kept = flags[free]
    return SignificanceReport(
        count=int(kept.sum()), total=int(kept.size),
        fraction=float(kept.mean()) if kept.size else float("nan"), flags=kept)


@dataclass(frozen=True)
class BlocSummary:
    """Spread of posterior-mean positions within one bloc of legislators.

    cv is the coefficient of variation of the members' posterior means
    (sample sd over absolute mean); it is undefined for single-member blocs
    or when the mean is zero, flagged by cv_defined.
    """

    label: str
    members: int
    mean: float
    sd: float
    cv: float
    cv_defined: bool


def bloc_summary(summaries, meta, group_by: str = "bloc") -> list:
    """Cohesion table per bloc (or party) from ideal-point summaries.

    Every ideal-point summary label must appear in meta; meta entries without
    a matching summary are ignored.
    """
    if group_by not in ("bloc", "party"):
        raise ValueError("group_by must be 'bloc' or 'party'")
    by_id = {e.id: getattr(e, group_by) for e in meta}
    groups = {}
    for s in summaries:
        if s.kind != "ideal_point" or s.dim != 0:
            continue
        if s.label not in by_id:
            raise ValueError(f"legislator {s.label!r} missing from meta")
        groups.setdefault(by_id[s.label], []).append(s.mean)
    out = []
    for label in sorted(groups):
        vals = np.asarray(groups[label])
        mean = float(vals.mean())
        if vals.size >= 2:
            sd = float(vals.std(ddof=1))
            defined = mean != 0.0
            cv = sd / abs(mean) if defined else float("nan")
        else:
            sd = float("nan")
            cv = float("nan")
            defined = False
        out.append(BlocSummary(label=label, members=int(vals.size), mean=mean,
                               sd=sd, cv=cv, cv_defined=defined))
    return out


@dataclass(frozen=True)
class RecoveryMetrics:
    """Agreement between estimated and true positions."""

    pearson_r: float
    slope: float
    intercept: float


def recovery_metrics(estimates, truth) -> RecoveryMetrics:
    """Pearson correlation and least-squares line of estimates on truth."""
    est = np.asarray(estimates, dtype=float).ravel()
    tru = np.asarray(truth, dtype=float).ravel()
    if est.shape != tru.shape:
        raise ValueError(f"length mismatch: {est.size} estimates, {tru.size} truths")
    if est.size < 2:
        raise ValueError("need at least 2 points")
    tc = tru - tru.mean()
    ec = est - est.mean()
    ss_t = float(tc @ tc)
    if ss_t == 0.0:
        raise ValueError("truth has zero variance")
    ss_e = float(ec @ ec)
    cov = float(tc @ ec)
    slope = cov / ss_t
    intercept = float(est.mean() - slope * tru.mean())
    r = cov / np.sqrt(ss_t * ss_e) if ss_e > 0 else float("nan")
    return RecoveryMetrics(pearson_r=float(r), slope=float(slope), intercept=intercept)


def summary_table_rows(summaries) -> list:
    """Rows of the delimited summary schema (dim folded into the index)."""
    rows = []
    for s in summaries:
        idx = str(s.index) if s.dim == 0 else f"{s.index}.{s.dim}"
        rows.append(
            f"{s.kind},{idx},{s.mean!r},{s.sd!r},{s.q025!r},{s.q975!r},{str(s.significant).lower()}")
    return rows


def write_summary_table(summaries, path) -> None:
    """Write `param_kind,index,mean,sd,q025,q975,significant` rows."""
    with open(path, "w") as fh:
        fh.write("param_kind,index,mean,sd,q025,q975,significant\n")
        fh.write("\n".join(summary_table_rows(summaries)))
        fh.write("\n")
