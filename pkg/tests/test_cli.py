import csv
import os

import numpy as np
import pytest

from netcov import cli


def write_config(path, extra=""):
    path.write_text(
        "seed = 5\n"
        "experiment.schemes = ebg\n"
        "experiment.families = gaussian\n"
        "experiment.n_active = 1\n"
        "experiment.alphas = 0.6\n"
        "experiment.replicates = 1\n"
        "data.N = 40\n"
        "data.K = 2\n"
        "data.nodes_per_community = 3\n"
        "data.d = 1\n"
        + extra
    )
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_unknown_keys_listed(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("seed = 1\nexperiment.schemez = ebg\nbogus = 2\n")
        with pytest.raises(cli.ConfigError) as err:
            cli.load_config(str(cfg))
        assert "bogus" in str(err.value)
        assert "experiment.schemez" in str(err.value)

    def test_missing_seed(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("experiment.schemes = ebg\n")
        with pytest.raises(cli.ConfigError, match="seed"):
            cli.load_config(str(cfg))

    def test_missing_seed_exit_code(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("experiment.schemes = ebg\n")
        code = cli.main(["simulate", "--config", str(cfg),
                         "--out", str(tmp_path / "o")])
        assert code == 2

    def test_preset_expands_to_full_grid(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("seed = 1\nexperiment.preset = experiment-i\n")
        resolved = cli.load_config(str(cfg))
        cells = cli.enumerate_cells(resolved)
        # 2 schemes x 2 families x 2 active-set sizes x 20 alphas = 160
        # settings, each replicated 10 times
        assert len(cells) == 1600
        settings = {(c.scheme, c.family, c.n_active, c.alpha_index)
                    for c in cells}
        assert len(settings) == 160
        assert all(c.replicate in range(10) for c in cells)

    def test_flag_overrides_file(self, tmp_path):
        cfg = write_config(tmp_path / "c.cfg")
        resolved = cli.load_config(cfg, {"seed": "99"})
        assert resolved["seed"] == "99"

    def test_invalid_scheme_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            cli.main(["fit", "--data", "x", "--scheme", "banana",
                      "--out", "y", "--seed", "1"])
        assert err.value.code == 2


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("sim")
    cfg = write_config(root / "c.cfg")
    out = root / "out"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    cells = sorted(os.listdir(out / "cells"))
    assert len(cells) == 1
    return str(out / "cells" / cells[0])


class TestSimulate:
    def test_cell_directory_contents(self, sim_dir):
        names = set(os.listdir(sim_dir))
        assert {"A.csv", "X.csv", "y.csv", "communities.csv", "manifest",
                "truth.csv", "scenario.csv"} <= names

    def test_manifest_declares_split(self, sim_dir):
        from netcov.data import read_manifest

        manifest = read_manifest(os.path.join(sim_dir, "manifest"))
        assert manifest["train_rows"] == "1-40"
        assert manifest["test_rows"] == "41-80"

    def test_scenario_row(self, sim_dir):
        rows = read_rows(os.path.join(sim_dir, "scenario.csv"))
        assert rows[0]["scheme"] == "ebg"
        assert rows[0]["difficulty_metric"] == "snr"
        assert float(rows[0]["difficulty"]) > 0

    def test_deterministic_rerun(self, tmp_path):
        cfg = write_config(tmp_path / "c.cfg")
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert cli.main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert cli.main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        for name in ("A.csv", "y.csv", "truth.csv"):
            a = next((out1 / "cells").glob(f"*/{name}")).read_bytes()
            b = next((out2 / "cells").glob(f"*/{name}")).read_bytes()
            assert a == b


class TestFit:
    @pytest.mark.parametrize("scheme", ["ebg", "nbg", "lasso"])
    def test_fit_writes_artifacts(self, sim_dir, tmp_path, scheme):
        out = tmp_path / f"fit_{scheme}"
        code = cli.main(["fit", "--data", sim_dir, "--scheme", scheme,
                         "--out", str(out), "--folds", "3",
                         "--grid-size", "8", "--seed", "3"])
        assert code == 0
        names = set(os.listdir(out))
        assert {"cv.csv", "path.csv", "coefficients.csv",
                "active_groups.csv", "groups.csv", "standardization.csv",
                "fit_info", "run_manifest"} <= names
        assert (out / "coef_000.csv").exists()
        assert (out / "coef_007.csv").exists()
        coef = read_rows(out / "coefficients.csv")
        assert len(coef) == 21  # p = 15 edges + 6 covariates

    def test_cv_csv_flags(self, sim_dir, tmp_path):
        out = tmp_path / "fit"
        cli.main(["fit", "--data", sim_dir, "--scheme", "ebg", "--out",
                  str(out), "--folds", "3", "--grid-size", "8",
                  "--seed", "3"])
        rows = read_rows(out / "cv.csv")
        assert len(rows) == 8
        assert sum(int(r["is_min"]) for r in rows) == 1
        assert sum(int(r["is_one_se"]) for r in rows) == 1

    def test_strong_signal_recovers_group(self, sim_dir, tmp_path):
        out = tmp_path / "fit"
        cli.main(["fit", "--data", sim_dir, "--scheme", "ebg", "--out",
                  str(out), "--folds", "5", "--grid-size", "30",
                  "--seed", "3"])
        active = read_rows(out / "active_groups.csv")
        assert any(r["group"] == "(1,1)" for r in active)


class TestSplitCommunities:
    def test_thirteen_community_layout_splits_to_fifty(self, tmp_path):
        # dataset with the 13-community atlas layout, tiny sample size
        from test_groups import atlas_map
        from netcov import Dataset, save_dataset

        rng = np.random.default_rng(0)
        cm = atlas_map()
        n = cm.n
        N = 14
        ds = Dataset(
            edges=rng.standard_normal((N, n * (n - 1) // 2)),
            node_covs=rng.standard_normal((N, n)),
            y=rng.standard_normal(N),
            communities=cm, family="gaussian",
            train_rows=np.arange(10), test_rows=np.arange(10, 14),
        )
        data_dir = tmp_path / "data"
        save_dataset(ds, str(data_dir))
        out = tmp_path / "fit"
        code = cli.main(["fit", "--data", str(data_dir), "--scheme", "nbg",
                         "--out", str(out), "--folds", "3", "--grid-size",
                         "4", "--seed", "1", "--split-communities", "5"])
        assert code == 0
        groups = {r["group"] for r in read_rows(out / "groups.csv")}
        assert len(groups) == 50


class TestEvaluate:
    def test_synthetic_cell_full_row(self, sim_dir, tmp_path):
        fit_dir = tmp_path / "fit"
        cli.main(["fit", "--data", sim_dir, "--scheme", "ebg", "--out",
                  str(fit_dir), "--folds", "3", "--grid-size", "8",
                  "--seed", "3"])
        out = tmp_path / "eval"
        assert cli.main(["evaluate", "--fit", str(fit_dir), "--data",
                         sim_dir, "--out", str(out)]) == 0
        row = read_rows(out / "metrics.csv")[0]
        assert row["method"] == "netcov:ebg"
        assert row["recall"] != ""
        assert row["correlation"] not in ("", None)
        roc = read_rows(out / "roc.csv")
        assert len(roc) == 8
        assert roc[0]["fpr"] == "0.0" and roc[0]["tpr"] == "0.0"

    def test_without_truth_prediction_only(self, sim_dir, tmp_path):
        import shutil

        data2 = tmp_path / "data_no_truth"
        shutil.copytree(sim_dir, data2)
        os.remove(data2 / "truth.csv")
        os.remove(data2 / "scenario.csv")
        fit_dir = tmp_path / "fit"
        cli.main(["fit", "--data", str(data2), "--scheme", "lasso", "--out",
                  str(fit_dir), "--folds", "3", "--grid-size", "8",
                  "--seed", "3"])
        out = tmp_path / "eval"
        assert cli.main(["evaluate", "--fit", str(fit_dir), "--data",
                         str(data2), "--out", str(out)]) == 0
        row = read_rows(out / "metrics.csv")[0]
        assert row["recall"] == "NA"
        assert row["correlation"] != "NA"
        assert not (out / "roc.csv").exists()

    def test_mismatched_p_is_data_error(self, sim_dir, tmp_path):
        fit_dir = tmp_path / "fit"
        cli.main(["fit", "--data", sim_dir, "--scheme", "ebg", "--out",
                  str(fit_dir), "--folds", "3", "--grid-size", "8",
                  "--seed", "3"])
        cfg = write_config(tmp_path / "c2.cfg",
                           extra="data.nodes_per_community = 4\n")
        out2 = tmp_path / "other"
        cli.main(["simulate", "--config", cfg, "--out", str(out2)])
        other = next((out2 / "cells").glob("*"))
        code = cli.main(["evaluate", "--fit", str(fit_dir), "--data",
                         str(other), "--out", str(tmp_path / "eval")])
        assert code == 3


class TestCpm:
    def test_planted_signal(self, tmp_path):
        from netcov import Dataset, save_dataset, FeatureIndex, CommunityMap

        rng = np.random.default_rng(1)
        idx = FeatureIndex(n=10, d=1)
        N = 700
        edges = rng.standard_normal((N, idx.n_edges))
        covs = rng.standard_normal((N, 10))
        y = edges[:, 0] - edges[:, 5] + 0.5 * rng.standard_normal(N)
        ds = Dataset(edges=edges, node_covs=covs, y=y,
                     communities=CommunityMap(
                         assignments=np.repeat([1, 2], 5)),
                     family="gaussian",
                     train_rows=np.arange(500),
                     test_rows=np.arange(500, 700))
        data_dir = tmp_path / "data"
        save_dataset(ds, str(data_dir))
        out = tmp_path / "cpm"
        assert cli.main(["cpm", "--data", str(data_dir), "--out", str(out),
                         "--alpha", "0.0001"]) == 0
        row = read_rows(out / "metrics.csv")[0]
        assert float(row["correlation"]) > 0.5
        edges_rows = read_rows(out / "cpm_edges.csv")
        assert {r["sign"] for r in edges_rows} == {"+", "-"}

    def test_binomial_rejected(self, tmp_path):
        from conftest import make_dataset

        rng = np.random.default_rng(2)
        ds = make_dataset(rng, [1, 1, 2, 2], d=1, N=30, family="binomial")
        from netcov import save_dataset

        data_dir = tmp_path / "data"
        save_dataset(ds, str(data_dir))
        code = cli.main(["cpm", "--data", str(data_dir),
                         "--out", str(tmp_path / "o")])
        assert code == 3

    def test_default_threshold(self):
        parser = cli.build_parser()
        args = parser.parse_args(["cpm", "--data", "x", "--out", "y"])
        assert args.alpha == 0.01


def sweep_config(path, alphas="0.3,0.6", methods="scheme,lasso"):
    path.write_text(
        "seed = 11\n"
        "experiment.schemes = ebg\n"
        "experiment.families = gaussian\n"
        "experiment.n_active = 1\n"
        f"experiment.alphas = {alphas}\n"
        "experiment.replicates = 1\n"
        "data.N = 40\n"
        "data.K = 2\n"
        "data.nodes_per_community = 3\n"
        "data.d = 1\n"
        "solver.grid_size = 8\n"
        "solver.folds = 3\n"
        f"sweep.methods = {methods}\n"
    )
    return str(path)


class TestSweep:
    def test_end_to_end_rows(self, tmp_path):
        cfg = sweep_config(tmp_path / "c.cfg", methods="scheme,lasso,cpm")
        out = tmp_path / "out"
        assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        rows = read_rows(out / "metrics.csv")
        # 2 cells x (netcov:ebg, lasso, cpm)
        assert len(rows) == 6
        assert {r["method"] for r in rows} == {"netcov:ebg", "lasso", "cpm"}

    def test_rerun_from_manifest_is_byte_identical(self, tmp_path):
        cfg = sweep_config(tmp_path / "c.cfg")
        out1 = tmp_path / "o1"
        assert cli.main(["sweep", "--config", cfg, "--out", str(out1)]) == 0
        out2 = tmp_path / "o2"
        assert cli.main(["sweep", "--config", str(out1 / "run_manifest"),
                         "--out", str(out2)]) == 0
        a = (out1 / "metrics.csv").read_bytes()
        b = (out2 / "metrics.csv").read_bytes()
        assert a == b

    def test_worker_pool_matches_sequential(self, tmp_path):
        cfg = sweep_config(tmp_path / "c.cfg")
        out1, out2 = tmp_path / "seq", tmp_path / "par"
        assert cli.main(["sweep", "--config", cfg, "--out", str(out1)]) == 0
        os.environ["NETCOV_THREADS"] = "2"
        try:
            assert cli.main(["sweep", "--config", cfg,
                             "--out", str(out2)]) == 0
        finally:
            del os.environ["NETCOV_THREADS"]
        assert ((out1 / "metrics.csv").read_bytes()
                == (out2 / "metrics.csv").read_bytes())
