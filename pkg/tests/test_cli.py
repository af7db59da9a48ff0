import numpy as np
import pytest

from spatialvote import rollcall, simulate
from spatialvote.cli import (
    EXIT_IO,
    EXIT_OK,
    EXIT_VALIDATION,
    main,
)

pytestmark = pytest.mark.filterwarnings(
    "ignore::spatialvote.sampler.IdentificationWarning")


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A small synthetic votes/meta pair plus one finished fit."""
    root = tmp_path_factory.mktemp("cli")
    spec = simulate.scenario_catalog()[3]
    from dataclasses import replace

    spec = replace(spec, n=12, m=18, missing_rate=0.1)
    par = simulate.generate_parliament(spec, np.random.default_rng(1))
    votes_path = root / "votes.csv"
    votes_path.write_text(rollcall.serialize_vote_matrix(par.votes))
    meta = tuple(
        rollcall.LegislatorMeta(id=lid, name=f"Member {lid}", party=grp, bloc=grp)
        for lid, grp in zip(par.votes.legislator_ids, par.groups))
    meta_path = root / "meta.csv"
    meta_path.write_text(rollcall.serialize_legislator_meta(meta))
    fit_dir = root / "fit"
    code = main([
        "fit", "--votes", str(votes_path), "--iters", "120", "--burnin", "40",
        "--anchors", "L02=-1,L09=1", "--seed", "11",
        "--out-dir", str(fit_dir),
    ])
    assert code == EXIT_OK
    return {
        "root": root,
        "votes": votes_path,
        "meta": meta_path,
        "fit": fit_dir,
        "draws": fit_dir / "draws.csv",
    }


class TestFit:
    def test_outputs_present(self, workdir):
        fit = workdir["fit"]
        for name in ("draws.csv", "draws.config.txt", "summary.csv", "manifest.txt"):
            assert (fit / name).exists(), name

    def test_manifest_contents(self, workdir):
        text = (workdir["fit"] / "manifest.txt").read_text()
        assert "command=fit" in text
        assert "config.seed=11" in text
        assert "config.iters=120" in text
        sha_lines = [ln for ln in text.splitlines()
                     if ln.startswith("input.votes.csv.sha256=")]
        assert len(sha_lines) == 1
        assert len(sha_lines[0].split("=")[1]) == 64

    def test_summary_row_count(self, workdir):
        lines = (workdir["fit"] / "summary.csv").read_text().splitlines()
        # 18 approvals + 18 discriminations + 12 ideal points
        assert len(lines) == 1 + 18 + 18 + 12

    def test_rerun_is_byte_identical(self, workdir, tmp_path):
        out = tmp_path / "again"
        code = main([
            "fit", "--votes", str(workdir["votes"]), "--iters", "120",
            "--burnin", "40", "--anchors", "L02=-1,L09=1", "--seed", "11",
            "--out-dir", str(out),
        ])
        assert code == EXIT_OK
        for name in ("draws.csv", "draws.config.txt", "summary.csv"):
            assert (out / name).read_bytes() == (workdir["fit"] / name).read_bytes()

    def test_multichain_threads_deterministic(self, workdir, tmp_path):
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            code = main([
                "fit", "--votes", str(workdir["votes"]), "--iters", "60",
                "--burnin", "20", "--chains", "2", "--threads", "2",
                "--seed", "3", "--out-dir", str(out),
            ])
            assert code == EXIT_OK
            outs.append(out)
        a, b = outs
        for name in ("draws_chain1.csv", "draws_chain2.csv", "summary.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        assert ((a / "draws_chain1.csv").read_bytes()
                != (a / "draws_chain2.csv").read_bytes())

    def test_missing_votes_file(self, tmp_path):
        code = main(["fit", "--votes", str(tmp_path / "nope.csv"),
                     "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_IO

    def test_bad_votes_content(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("legislator_id,a\nL1,2\nL2,1\n")
        code = main(["fit", "--votes", str(bad), "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_VALIDATION

    def test_unknown_anchor_id(self, workdir, tmp_path):
        code = main([
            "fit", "--votes", str(workdir["votes"]), "--anchors", "L99=-1,L02=1",
            "--iters", "30", "--burnin", "10", "--out-dir", str(tmp_path / "o"),
        ])
        assert code == EXIT_VALIDATION

    def test_non_integer_iters(self, workdir, tmp_path):
        code = main([
            "fit", "--votes", str(workdir["votes"]), "--iters", "lots",
            "--out-dir", str(tmp_path / "o"),
        ])
        assert code == EXIT_VALIDATION

    def test_config_file_defaults_and_flag_precedence(self, workdir, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# small run\n"
            "iters=50\n"
            "burnin=10\n"
            "seed=5\n"
        )
        out1 = tmp_path / "fromfile"
        code = main(["fit", "--votes", str(workdir["votes"]),
                     "--config", str(cfg), "--out-dir", str(out1)])
        assert code == EXIT_OK
        manifest = (out1 / "manifest.txt").read_text()
        assert "config.seed=5" in manifest and "config.iters=50" in manifest
        out2 = tmp_path / "flagwins"
        code = main(["fit", "--votes", str(workdir["votes"]),
                     "--config", str(cfg), "--seed", "9", "--out-dir", str(out2)])
        assert code == EXIT_OK
        assert "config.seed=9" in (out2 / "manifest.txt").read_text()

    def test_config_file_unknown_key(self, workdir, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("iterations=50\n")
        code = main(["fit", "--votes", str(workdir["votes"]),
                     "--config", str(cfg), "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_VALIDATION


class TestSimulate:
    def test_writes_scenario_files(self, tmp_path):
        out = tmp_path / "sim"
        code = main(["simulate", "--scenario", "4", "--out-dir", str(out)])
        assert code == EXIT_OK
        vm = rollcall.parse_vote_matrix((out / "votes.csv").read_text())
        assert vm.n == 91 and vm.m == 417
        ids, groups, betas = simulate.read_truth(out / "truth.csv")
        assert ids == vm.legislator_ids
        assert betas.shape == (91,)
        meta = rollcall.parse_legislator_meta((out / "meta.csv").read_text())
        assert len(meta) == 91
        manifest = (out / "manifest.txt").read_text()
        assert "config.scenario=scenario-4" in manifest
        assert "config.suggested_anchors=" in manifest

    def test_long_name_accepted(self, tmp_path):
        out = tmp_path / "sim"
        code = main(["simulate", "--scenario", "scenario-7", "--out-dir", str(out)])
        assert code == EXIT_OK
        vm = rollcall.parse_vote_matrix((out / "votes.csv").read_text())
        rate = (vm.cells == rollcall.MISSING).mean()
        assert abs(rate - 0.10) < 0.02

    def test_seed_override_changes_data(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--scenario", "1", "--out-dir", str(a)]) == EXIT_OK
        assert main(["simulate", "--scenario", "1", "--seed", "99",
                     "--out-dir", str(b)]) == EXIT_OK
        assert ((a / "votes.csv").read_bytes() != (b / "votes.csv").read_bytes())

    def test_missing_override(self, tmp_path):
        out = tmp_path / "sim"
        code = main(["simulate", "--scenario", "4", "--missing", "0.05",
                     "--out-dir", str(out)])
        assert code == EXIT_OK
        vm = rollcall.parse_vote_matrix((out / "votes.csv").read_text())
        assert abs((vm.cells == rollcall.MISSING).mean() - 0.05) < 0.02

    def test_unknown_scenario(self, tmp_path):
        code = main(["simulate", "--scenario", "99", "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_VALIDATION

    def test_reruns_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["simulate", "--scenario", "2",
                         "--out-dir", str(out)]) == EXIT_OK
        assert (a / "votes.csv").read_bytes() == (b / "votes.csv").read_bytes()
        assert (a / "truth.csv").read_bytes() == (b / "truth.csv").read_bytes()


class TestDiagnose:
    def test_happy_path(self, workdir, tmp_path):
        out = tmp_path / "diag"
        code = main(["diagnose", "--draws", str(workdir["draws"]),
                     "--votes", str(workdir["votes"]), "--out-dir", str(out)])
        assert code == EXIT_OK
        ess_lines = (out / "ess.csv").read_text().splitlines()
        assert ess_lines[0] == "param_kind,index,dim,ess"
        # 18 approvals + 18 discriminations + 10 free ideal points
        assert len(ess_lines) == 1 + 18 + 18 + 10
        anchored_rows = [ln for ln in ess_lines
                        if ln.startswith("ideal_point,1,") or ln.startswith("ideal_point,8,")]
        assert anchored_rows == []
        diag = (out / "diagnostics.txt").read_text()
        for key in ("dic=", "waic=", "effective_params_dic=",
                    "effective_params_waic=", "lppd=", "ess_min=",
                    "ess_median=", "ess_loglik="):
            assert key in diag

    def test_votes_mismatch(self, workdir, tmp_path):
        other = tmp_path / "other.csv"
        other.write_text("legislator_id,a\nL1,1\nL2,0\n")
        code = main(["diagnose", "--draws", str(workdir["draws"]),
                     "--votes", str(other), "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_VALIDATION

    def test_missing_draws(self, workdir, tmp_path):
        code = main(["diagnose", "--draws", str(tmp_path / "none.csv"),
                     "--votes", str(workdir["votes"]), "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_IO


class TestSummarize:
    def test_tables_written(self, workdir, tmp_path):
        out = tmp_path / "sum"
        code = main(["summarize", "--draws", str(workdir["draws"]),
                     "--meta", str(workdir["meta"]), "--out-dir", str(out)])
        assert code == EXIT_OK
        assert (out / "summary.csv").exists()
        pivots = (out / "pivots.csv").read_text().splitlines()
        assert pivots[0] == "legislator_id,p_low,p_high,p_center"
        assert len(pivots) == 1 + 12
        blocs = (out / "blocs.csv").read_text().splitlines()
        assert blocs[0] == "label,members,mean,sd,cv,cv_defined"
        assert len(blocs) >= 2

    def test_group_by_party(self, workdir, tmp_path):
        out = tmp_path / "sum"
        code = main(["summarize", "--draws", str(workdir["draws"]),
                     "--meta", str(workdir["meta"]), "--group-by", "party",
                     "--out-dir", str(out)])
        assert code == EXIT_OK

    def test_no_meta_skips_blocs(self, workdir, tmp_path):
        out = tmp_path / "sum"
        code = main(["summarize", "--draws", str(workdir["draws"]),
                     "--out-dir", str(out)])
        assert code == EXIT_OK
        assert not (out / "blocs.csv").exists()


class TestPpc:
    def test_all_statistics(self, workdir, tmp_path):
        out = tmp_path / "ppc"
        code = main(["ppc", "--draws", str(workdir["draws"]),
                     "--votes", str(workdir["votes"]), "--out-dir", str(out)])
        assert code == EXIT_OK
        text = (out / "ppc.txt").read_text()
        for stat in ("overall_yea_rate", "motion_yea_rate_sd",
                     "legislator_yea_rate_sd", "motion_max_agreement"):
            assert f"{stat}.observed=" in text
            assert f"{stat}.p_value=" in text
        table = (out / "ppc_draws.csv").read_text().splitlines()
        assert table[0] == "statistic,draw,value"
        assert len(table) == 1 + 4 * 80  # 80 retained draws in the fixture fit

    def test_subset_and_replicates(self, workdir, tmp_path):
        out = tmp_path / "ppc"
        code = main(["ppc", "--draws", str(workdir["draws"]),
                     "--votes", str(workdir["votes"]),
                     "--statistic", "overall_yea_rate", "--replicates", "9",
                     "--out-dir", str(out)])
        assert code == EXIT_OK
        table = (out / "ppc_draws.csv").read_text().splitlines()
        assert len(table) == 1 + 9

    def test_deterministic_reruns(self, workdir, tmp_path):
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert main(["ppc", "--draws", str(workdir["draws"]),
                         "--votes", str(workdir["votes"]), "--seed", "4",
                         "--out-dir", str(out)]) == EXIT_OK
            outs.append(out)
        assert ((outs[0] / "ppc.txt").read_bytes()
                == (outs[1] / "ppc.txt").read_bytes())
        assert ((outs[0] / "ppc_draws.csv").read_bytes()
                == (outs[1] / "ppc_draws.csv").read_bytes())

    def test_unknown_statistic(self, workdir, tmp_path):
        code = main(["ppc", "--draws", str(workdir["draws"]),
                     "--votes", str(workdir["votes"]),
                     "--statistic", "skewness", "--out-dir", str(tmp_path / "o")])
        assert code == EXIT_VALIDATION


class TestScenarios:
    def test_catalog_listing(self, tmp_path):
        import csv as csvmod

        out = tmp_path / "sc"
        code = main(["scenarios", "--out-dir", str(out)])
        assert code == EXIT_OK
        with open(out / "scenarios.csv", newline="") as fh:
            rows = list(csvmod.reader(fh))
        assert rows[0][:2] == ["name", "description"]
        assert len(rows) == 11
        # prose descriptions contain commas; every row must still be 8 fields
        assert all(len(r) == 8 for r in rows)
        assert rows[1][0] == "scenario-1"
        assert rows[10][0] == "scenario-10"
