"""Command-line interface.

Subcommands: fit, simulate, diagnose, summarize, ppc, scenarios. Every run
writes a manifest (key-value text with input digests, configuration echo and
seeds) into the output directory; re-running with the same configuration and
seed reproduces the data outputs byte for byte.

Exit codes: 0 success, 2 file/IO problems, 3 invalid inputs or configuration,
4 numerical failure, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import os
import sys
import time
from dataclasses import replace

import numpy as np

from . import diagnostics, rollcall, simulate, summarize
from .model import LinkFunction, PriorConfig, PriorKind
from .rollcall import RollCallError
from .sampler import (
    AnchorSpec,
    ChainConfig,
    read_draws,
    run_chain,
    run_chains_parallel,
    write_draws,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_text(path: str, what: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"io: cannot read {what} file {path!r}: {exc}", EXIT_IO) from exc


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_manifest(out_dir: str, command: str, settings: dict, inputs: list,
                    outputs: list, started: float) -> str:
    lines = [
        "# run manifest",
        f"command={command}",
        f"started_unix={started!r}",
        f"duration_seconds={time.time() - started!r}",
    ]
    for key in sorted(settings):
        lines.append(f"config.{key}={settings[key]}")
    for path in inputs:
        lines.append(f"input.{os.path.basename(path)}.sha256={_sha256(path)}")
    for path in outputs:
        lines.append(f"output={os.path.basename(path)}")
    manifest = os.path.join(out_dir, "manifest.txt")
    _atomic_write(manifest, "\n".join(lines) + "\n")
    return manifest


def _load_config_file(path: str) -> dict:
    text = _read_text(path, "config")
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(
                f"validation: config line {lineno} is not key=value: {raw!r}",
                EXIT_VALIDATION)
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


_CONFIGURABLE = {
    "votes", "meta", "dim", "link", "anchors", "iters", "burnin", "thin",
    "chains", "seed", "prior", "threads", "out-dir", "draws", "statistic",
    "replicates", "scenario", "parliament", "missing", "group-by",
}


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser):
    if not getattr(args, "config", None):
        return args
    file_values = _load_config_file(args.config)
    unknown = set(file_values) - _CONFIGURABLE
    if unknown:
        raise CliError(
            f"validation: unknown config keys {sorted(unknown)}", EXIT_VALIDATION)
    # command-line flags win: re-parse with file values as defaults.  The
    # defaults must land on the subparser that owns the arguments; the top
    # parser's set_defaults is clobbered when the subcommand re-parses.
    defaults = {k.replace("-", "_"): v for k, v in file_values.items()}
    known = {k: v for k, v in defaults.items() if hasattr(args, k)}
    for target in (parser, getattr(args, "_subparser", None)):
        if target is not None:
            target.set_defaults(**known)
    fresh = parser.parse_args(args._argv)
    fresh._argv = args._argv
    return fresh


def _parse_anchor_flag(text: str, legislator_ids) -> AnchorSpec:
    """Parse `id=value,id=value,...` into an AnchorSpec over matrix rows."""
    if not text:
        return AnchorSpec.none()
    pos = {lid: i for i, lid in enumerate(legislator_ids)}
    indices, values = [], []
    for part in text.split(","):
        if "=" not in part:
            raise CliError(
                f"validation: anchor {part!r} is not id=value", EXIT_VALIDATION)
        lid, _, val = part.partition("=")
        lid = lid.strip()
        if lid not in pos:
            raise CliError(
                f"validation: anchor id {lid!r} matches no legislator", EXIT_VALIDATION)
        try:
            values.append([float(val)])
        except ValueError:
            raise CliError(
                f"validation: anchor value {val!r} is not a number", EXIT_VALIDATION) from None
        indices.append(pos[lid])
    try:
        return AnchorSpec(indices=tuple(indices), values=np.array(values))
    except ValueError as exc:
        raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc


def _ensure_out_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise CliError(f"io: cannot create output directory {path!r}: {exc}", EXIT_IO) from exc
    return path


def _int(args_value, name: str) -> int:
    try:
        return int(args_value)
    except (TypeError, ValueError):
        raise CliError(f"validation: {name} must be an integer, got {args_value!r}",
                       EXIT_VALIDATION) from None


def _float(args_value, name: str) -> float:
    try:
        return float(args_value)
    except (TypeError, ValueError):
        raise CliError(f"validation: {name} must be a number, got {args_value!r}",
                       EXIT_VALIDATION) from None


def cmd_fit(args) -> int:
    started = time.time()
    votes_text = _read_text(args.votes, "votes")
    meta_text = _read_text(args.meta, "meta") if args.meta else None
    try:
        vm = rollcall.parse_vote_matrix(votes_text, meta_text)
    except RollCallError as exc:
        raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
    anchors = _parse_anchor_flag(args.anchors, vm.legislator_ids)
    dim = _int(args.dim, "dim")
    chains = _int(args.chains, "chains")
    threads = _int(args.threads, "threads")
    if chains < 1:
        raise CliError("validation: chains must be >= 1", EXIT_VALIDATION)
    try:
        cfg = ChainConfig(
            dim=dim,
            link=LinkFunction(args.link),
            priors=PriorConfig.default(dim, kind=PriorKind(args.prior)),
            anchors=anchors,
            iterations_total=_int(args.iters, "iters"),
            burn_in=_int(args.burnin, "burnin"),
            thin=_int(args.thin, "thin"),
            seed=_int(args.seed, "seed"),
        )
    except ValueError as exc:
        raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
    out_dir = _ensure_out_dir(args.out_dir)
    try:
        if chains == 1:
            all_draws = [run_chain(vm, cfg)]
        else:
            all_draws = run_chains_parallel(
                vm, cfg, n_chains=chains, max_workers=threads)
    except np.linalg.LinAlgError as exc:
        raise CliError(f"numerical: {exc}", EXIT_NUMERICAL) from exc
    outputs = []
    for k, draws in enumerate(all_draws):
        stem = "draws" if chains == 1 else f"draws_chain{k + 1}"
        draws_path = os.path.join(out_dir, f"{stem}.csv")
        write_draws(draws, draws_path)
        outputs.extend([draws_path, os.path.join(out_dir, f"{stem}.config.txt")])
    summary_path = os.path.join(out_dir, "summary.csv")
    summarize.write_summary_table(summarize.posterior_summary(all_draws[0]), summary_path)
    outputs.append(summary_path)
    settings = {
        "votes": args.votes, "meta": args.meta or "", "dim": dim,
        "link": args.link, "anchors": args.anchors or "", "iters": cfg.iterations_total,
        "burnin": cfg.burn_in, "thin": cfg.thin, "chains": chains,
        "seed": cfg.seed, "prior": args.prior, "threads": threads,
    }
    inputs = [args.votes] + ([args.meta] if args.meta else [])
    _write_manifest(out_dir, "fit", settings, inputs, outputs, started)
    print(f"fit: {vm.n} legislators x {vm.m} motions, {cfg.retained} retained draws"
          + (f" x {chains} chains" if chains > 1 else "") + f" -> {out_dir}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.time()
    catalog = {s.name: s for s in simulate.scenario_catalog(parliament=args.parliament)}
    key = args.scenario if args.scenario.startswith("scenario-") else f"scenario-{args.scenario}"
    spec = catalog.get(key)
    if spec is None:
        raise CliError(
            f"validation: unknown scenario {args.scenario!r}; known: "
            + ", ".join(catalog), EXIT_VALIDATION)
    seed = _int(args.seed, "seed") if args.seed is not None else spec.seed
    spec = replace(spec, seed=seed)
    if args.missing is not None:
        rate = _float(args.missing, "missing")
        try:
            spec = replace(spec, missing_rate=rate)
        except ValueError as exc:
            raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
    out_dir = _ensure_out_dir(args.out_dir)
    rng = np.random.default_rng(spec.seed)
    parliament = simulate.generate_parliament(spec, rng)
    votes_path = os.path.join(out_dir, "votes.csv")
    _atomic_write(votes_path, rollcall.serialize_vote_matrix(parliament.votes))
    truth_path = os.path.join(out_dir, "truth.csv")
    simulate.write_truth(parliament, truth_path)
    meta = tuple(
        rollcall.LegislatorMeta(id=lid, name=lid, party=grp, bloc=grp)
        for lid, grp in zip(parliament.votes.legislator_ids, parliament.groups))
    meta_path = os.path.join(out_dir, "meta.csv")
    _atomic_write(meta_path, rollcall.serialize_legislator_meta(meta))
    anchors = simulate.choose_anchors(parliament.true_beta, spec.anchor_targets)
    ids = parliament.votes.legislator_ids
    anchor_flag = ",".join(
        f"{ids[i]}={float(v[0])!r}" for i, v in zip(anchors.indices, anchors.values))
    settings = {
        "scenario": spec.name, "parliament": args.parliament, "seed": spec.seed,
        "missing": spec.missing_rate, "suggested_anchors": anchor_flag,
        "fit_link": spec.fit_link.value, "prior": spec.prior_kind.value,
    }
    _write_manifest(out_dir, "simulate", settings, [],
                    [votes_path, truth_path, meta_path], started)
    print(f"simulate: {spec.name} ({spec.n} x {spec.m}, {spec.missing_rate:.0%} missing) -> {out_dir}")
    print(f"suggested anchors: {anchor_flag}")
    return EXIT_OK


def _read_draws_arg(path: str):
    if not os.path.exists(path):
        raise CliError(f"io: draws file {path!r} does not exist", EXIT_IO)
    try:
        return read_draws(path)
    except (KeyError, ValueError) as exc:
        raise CliError(f"validation: bad draws file: {exc}", EXIT_VALIDATION) from exc


def _load_votes_for(args, draws):
    votes_text = _read_text(args.votes, "votes")
    try:
        vm = rollcall.parse_vote_matrix(votes_text)
    except RollCallError as exc:
        raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
    if draws is not None:
        if (vm.legislator_ids != draws.legislator_ids
                or vm.motion_ids != draws.motion_ids):
            raise CliError(
                "validation: votes file does not match the draws' identifiers",
                EXIT_VALIDATION)
    return vm


def cmd_diagnose(args) -> int:
    started = time.time()
    draws = _read_draws_arg(args.draws)
    vm = _load_votes_for(args, draws)
    try:
        crit = diagnostics.information_criteria(draws, vm)
    except ValueError as exc:
        raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
    out_dir = _ensure_out_dir(args.out_dir)
    ess_rows = ["param_kind,index,dim,ess"]
    kinds = [("approval", draws.approval[:, :, None]),
             ("discrimination", draws.discrimination),
             ("ideal_point", draws.ideal_points)]
    if draws.hyper_mean is not None:
        kinds.append(("hyper_mean", draws.hyper_mean[:, None, None]))
        kinds.append(("hyper_var", draws.hyper_var[:, None, None]))
    anchored = set(draws.anchored_indices)
    ess_values = []
    import warnings as _warnings
    for kind, block in kinds:
        for idx in range(block.shape[1]):
            if kind == "ideal_point" and idx in anchored:
                continue
            for k in range(block.shape[2]):
                with _warnings.catch_warnings():
                    _warnings.simplefilter("ignore", diagnostics.DegenerateChainWarning)
                    val = diagnostics.effective_sample_size(block[:, idx, k])
                ess_rows.append(f"{kind},{idx},{k},{val!r}")
                ess_values.append(val)
    ess_path = os.path.join(out_dir, "ess.csv")
    _atomic_write(ess_path, "\n".join(ess_rows) + "\n")
    ess_arr = np.array(ess_values)
    report = [
        "# convergence and information criteria",
        f"retained_draws={draws.n_draws}",
        f"dic={crit.dic!r}",
        f"waic={crit.waic!r}",
        f"effective_params_dic={crit.effective_params_dic!r}",
        f"effective_params_waic={crit.effective_params_waic!r}",
        f"lppd={crit.lppd!r}",
        f"ess_min={float(ess_arr.min())!r}",
        f"ess_median={float(np.median(ess_arr))!r}",
        f"ess_loglik={diagnostics.effective_sample_size(draws.log_likelihood)!r}",
    ]
    diag_path = os.path.join(out_dir, "diagnostics.txt")
    _atomic_write(diag_path, "\n".join(report) + "\n")
    settings = {"draws": args.draws, "votes": args.votes}
    _write_manifest(out_dir, "diagnose", settings, [args.draws, args.votes],
                    [ess_path, diag_path], started)
    print(f"diagnose: dic={crit.dic:.2f} waic={crit.waic:.2f} "
          f"ess_min={ess_arr.min():.1f} -> {out_dir}")
    return EXIT_OK


def cmd_summarize(args) -> int:
    started = time.time()
    draws = _read_draws_arg(args.draws)
    try:
        summaries = summarize.posterior_summary(draws)
    except ValueError as exc:
        raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
    out_dir = _ensure_out_dir(args.out_dir)
    summary_path = os.path.join(out_dir, "summary.csv")
    summarize.write_summary_table(summaries, summary_path)
    outputs = [summary_path]
    if draws.dim == 1:
        pivots = summarize.pivot_probabilities(draws)
        pivot_rows = ["legislator_id,p_low,p_high,p_center"]
        for i, lab in enumerate(pivots.labels):
            pivot_rows.append(
                f"{lab},{float(pivots.low[i])!r},{float(pivots.high[i])!r},{float(pivots.center[i])!r}")
        pivots_path = os.path.join(out_dir, "pivots.csv")
        _atomic_write(pivots_path, "\n".join(pivot_rows) + "\n")
        outputs.append(pivots_path)
    if args.meta:
        meta = rollcall.parse_legislator_meta(_read_text(args.meta, "meta"))
        try:
            blocs = summarize.bloc_summary(summaries, meta, group_by=args.group_by)
        except ValueError as exc:
            raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
        bloc_rows = ["label,members,mean,sd,cv,cv_defined"]
        for b in blocs:
            bloc_rows.append(
                f"{b.label},{b.members},{b.mean!r},{b.sd!r},{b.cv!r},{str(b.cv_defined).lower()}")
        blocs_path = os.path.join(out_dir, "blocs.csv")
        _atomic_write(blocs_path, "\n".join(bloc_rows) + "\n")
        outputs.append(blocs_path)
    settings = {"draws": args.draws, "meta": args.meta or "", "group_by": args.group_by}
    inputs = [args.draws] + ([args.meta] if args.meta else [])
    _write_manifest(out_dir, "summarize", settings, inputs, outputs, started)
    sig = summarize.discrimination_significance(draws)
    print(f"summarize: {len(summaries)} parameters, "
          f"{sig.count}/{sig.total} motions discriminate -> {out_dir}")
    return EXIT_OK


def cmd_ppc(args) -> int:
    started = time.time()
    draws = _read_draws_arg(args.draws)
    vm = _load_votes_for(args, draws)
    names = args.statistic.split(",") if args.statistic else sorted(diagnostics.PPC_STATISTICS)
    seed = _int(args.seed, "seed")
    reps = _int(args.replicates, "replicates") if args.replicates is not None else None
    out_dir = _ensure_out_dir(args.out_dir)
    kv_lines = ["# posterior predictive checks"]
    table_rows = ["statistic,draw,value"]
    for name in names:
        try:
            res = diagnostics.posterior_predictive_check(
                draws, vm, name.strip(), rng=np.random.default_rng(seed),
                max_replicates=reps)
        except ValueError as exc:
            raise CliError(f"validation: {exc}", EXIT_VALIDATION) from exc
        kv_lines.append(f"{res.statistic}.observed={res.observed!r}")
        kv_lines.append(f"{res.statistic}.p_value={res.p_value!r}")
        for t, val in enumerate(res.replicates):
            table_rows.append(f"{res.statistic},{t},{float(val)!r}")
        print(f"ppc: {res.statistic} observed={res.observed:.4f} p={res.p_value:.3f}")
    ppc_path = os.path.join(out_dir, "ppc.txt")
    _atomic_write(ppc_path, "\n".join(kv_lines) + "\n")
    table_path = os.path.join(out_dir, "ppc_draws.csv")
    _atomic_write(table_path, "\n".join(table_rows) + "\n")
    settings = {"draws": args.draws, "votes": args.votes,
                "statistic": args.statistic or "", "seed": seed,
                "replicates": "" if reps is None else reps}
    _write_manifest(out_dir, "ppc", settings, [args.draws, args.votes],
                    [ppc_path, table_path], started)
    return EXIT_OK


def cmd_scenarios(args) -> int:
    started = time.time()
    specs = simulate.scenario_catalog(parliament=args.parliament)
    out_dir = _ensure_out_dir(args.out_dir)
    # descriptions are prose and may contain commas; quote properly
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "description", "n", "m", "missing_rate",
                     "fit_link", "prior", "anchor_targets"])
    for s in specs:
        targets = s.anchor_targets if isinstance(s.anchor_targets, str) \
            else f"{s.anchor_targets[0]!r};{s.anchor_targets[1]!r}"
        writer.writerow([s.name, s.description, s.n, s.m, repr(s.missing_rate),
                         s.fit_link.value, s.prior_kind.value, targets])
        print(f"{s.name}: {s.description}")
    path = os.path.join(out_dir, "scenarios.csv")
    _atomic_write(path, buf.getvalue())
    _write_manifest(out_dir, "scenarios", {"parliament": args.parliament}, [],
                    [path], started)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spatialvote",
        description="Bayesian spatial-voting ideal points from roll-call votes")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out-dir", default="svout", help="output directory")
        p.add_argument("--config", default=None,
                       help="key=value config file; command-line flags win")

    p_fit = sub.add_parser("fit", help="run the Gibbs sampler on a votes file")
    p_fit.add_argument("--votes", required=True)
    p_fit.add_argument("--meta", default=None)
    p_fit.add_argument("--dim", default=1)
    p_fit.add_argument("--link", choices=["probit", "logit"], default="logit")
    p_fit.add_argument("--anchors", default=None,
                       help="comma-separated id=value pairs")
    p_fit.add_argument("--iters", default=6000)
    p_fit.add_argument("--burnin", default=1000)
    p_fit.add_argument("--thin", default=1)
    p_fit.add_argument("--chains", default=1)
    p_fit.add_argument("--seed", default=0)
    p_fit.add_argument("--prior", choices=["fixed", "hier-var", "hier-meanvar"],
                       default="fixed")
    p_fit.add_argument("--threads", default=1)
    common(p_fit)
    p_fit.set_defaults(func=cmd_fit, _subparser=p_fit)

    p_sim = sub.add_parser("simulate", help="write a synthetic parliament to disk")
    p_sim.add_argument("--scenario", required=True, help="scenario-1 .. scenario-10")
    p_sim.add_argument("--parliament", choices=["unbalanced", "balanced"],
                       default="unbalanced")
    p_sim.add_argument("--seed", default=None)
    p_sim.add_argument("--missing", default=None,
                       help="override the scenario's missing rate")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate, _subparser=p_sim)

    p_diag = sub.add_parser("diagnose", help="ESS, DIC and WAIC for a draws file")
    p_diag.add_argument("--draws", required=True)
    p_diag.add_argument("--votes", required=True)
    common(p_diag)
    p_diag.set_defaults(func=cmd_diagnose, _subparser=p_diag)

    p_sum = sub.add_parser("summarize", help="posterior tables from a draws file")
    p_sum.add_argument("--draws", required=True)
    p_sum.add_argument("--meta", default=None)
    p_sum.add_argument("--group-by", choices=["bloc", "party"], default="bloc")
    common(p_sum)
    p_sum.set_defaults(func=cmd_summarize, _subparser=p_sum)

    p_ppc = sub.add_parser("ppc", help="posterior predictive checks")
    p_ppc.add_argument("--draws", required=True)
    p_ppc.add_argument("--votes", required=True)
    p_ppc.add_argument("--statistic", default=None,
                       help="comma-separated statistic names (default: all)")
    p_ppc.add_argument("--replicates", default=None)
    p_ppc.add_argument("--seed", default=0)
    common(p_ppc)
    p_ppc.set_defaults(func=cmd_ppc, _subparser=p_ppc)

    p_sc = sub.add_parser("scenarios", help="list the built-in scenario catalog")
    p_sc.add_argument("--parliament", choices=["unbalanced", "balanced"],
                      default="unbalanced")
    common(p_sc)
    p_sc.set_defaults(func=cmd_scenarios, _subparser=p_sc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
        args._argv = argv
        args = _apply_config_file(args, parser)
        return args.func(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RollCallError, ValueError) as exc:
        print(f"validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except np.linalg.LinAlgError as exc:
        print(f"numerical: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:  # pragma: no cover
        print(f"internal: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
