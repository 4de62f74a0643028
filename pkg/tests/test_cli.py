import json

import numpy as np
import pytest

from monollr.cli import load_dataset, main
from monollr.estimators import EstimatorConfig, point_predict


def _write_csv(path, xs, ys, header="x,y"):
    lines = [header] if header else []
    lines.extend(f"{x},{y}" for x, y in zip(xs, ys))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def data_csv(tmp_path):
    rng = np.random.default_rng(11)
    xs = np.sort(rng.uniform(0.0, 1.0, 40))
    ys = np.sin(3.0 * xs) + 0.2 * rng.standard_normal(40)
    return _write_csv(tmp_path / "sample.csv", xs, ys)


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------


def test_estimate_llm_stdout(data_csv, capsys):
    rc = main(
        ["estimate", "--data", data_csv, "--x", "0.5", "--method", "llm", "--b", "8"]
    )
    assert rc == 0
    out, err = capsys.readouterr()
    lines = out.strip().splitlines()
    assert lines[0] == "y,cdf"
    cdf = np.array([float(line.split(",")[1]) for line in lines[1:]])
    assert np.all(np.diff(cdf) >= 0.0)
    assert cdf[0] >= 0.0 and cdf[-1] == pytest.approx(1.0)
    sidecar = json.loads(err.strip())
    assert sidecar["command"] == "estimate"
    assert sidecar["monotone"] is True
    assert sidecar["algorithm"] == "running-max"
    assert sidecar["h0"] == pytest.approx((8.0 / 40.0) ** 2)


def test_estimate_clip_density_to_file(data_csv, tmp_path):
    out_file = tmp_path / "est.csv"
    rc = main(
        [
            "estimate", "--data", data_csv, "--x", "0.5", "--method", "llm",
            "--algorithm", "clip-density", "--b", "8", "--out", str(out_file),
        ]
    )
    assert rc == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "y,cdf,density"
    dens = np.array([float(line.split(",")[2]) for line in lines[1:]])
    assert np.all(dens >= 0.0)
    meta = json.loads((tmp_path / "est.csv.meta.json").read_text())
    assert meta["algorithm"] == "clip-density"
    assert meta["monotone"] is True
    assert meta["n"] == 40


def test_estimate_raw_is_not_marked_monotone(data_csv, capsys):
    rc = main(
        ["estimate", "--data", data_csv, "--x", "0.5", "--method", "ll-raw", "--b", "8"]
    )
    assert rc == 0
    _, err = capsys.readouterr()
    assert json.loads(err.strip())["monotone"] is False


def test_estimate_h_flag_scales_by_n(data_csv, capsys):
    # --h 0.2 on n=40 is the same fit as --b 8
    rc = main(
        ["estimate", "--data", data_csv, "--x", "0.5", "--method", "llm", "--h", "0.2"]
    )
    assert rc == 0
    out_h, err_h = capsys.readouterr()
    main(["estimate", "--data", data_csv, "--x", "0.5", "--method", "llm", "--b", "8"])
    out_b, _ = capsys.readouterr()
    assert out_h == out_b
    assert json.loads(err_h.strip())["b"] == pytest.approx(8.0)


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------


def test_predict_x_matches_library(data_csv, capsys):
    rc = main(
        ["predict", "--data", data_csv, "--x", "0.4", "--method", "llm", "--b", "8"]
    )
    assert rc == 0
    out, _ = capsys.readouterr()
    lines = out.strip().splitlines()
    assert lines[0] == "x,prediction"
    got = float(lines[1].split(",")[1])

    sample = load_dataset(data_csv)
    want = point_predict(sample, 0.4, EstimatorConfig(b=8.0), "LLM")
    assert got == pytest.approx(want, rel=1e-11)


def test_predict_eval_last_recomputes(data_csv, capsys):
    rc = main(
        ["predict", "--data", data_csv, "--eval-last", "3", "--method", "ll", "--b", "8"]
    )
    assert rc == 0
    out, _ = capsys.readouterr()
    lines = out.strip().splitlines()
    assert lines[0] == "row,x,y,prediction"
    assert len(lines) == 1 + 3 + 2

    sample = load_dataset(data_csv)
    cfg = EstimatorConfig(b=8.0)
    errors = []
    for k, line in enumerate(lines[1:4]):
        i = sample.n - 3 + k
        row, x_txt, y_txt, pred_txt = line.split(",")
        assert int(row) == i + 1
        assert float(x_txt) == pytest.approx(sample.xs[i], rel=1e-11)
        pred = point_predict(sample.without_index(i), float(sample.xs[i]), cfg, "LL")
        assert float(pred_txt) == pytest.approx(pred, rel=1e-11)
        errors.append(pred - float(sample.ys[i]))
    errors = np.array(errors)
    assert lines[4].startswith("# bias,")
    assert float(lines[4].split(",")[1]) == pytest.approx(np.mean(errors), rel=1e-9)
    assert lines[5].startswith("# mse,")
    assert float(lines[5].split(",")[1]) == pytest.approx(np.mean(errors**2), rel=1e-9)


def test_predict_requires_exactly_one_target(data_csv, capsys):
    rc = main(["predict", "--data", data_csv, "--method", "ll", "--b", "8"])
    assert rc == 2
    assert "exactly one" in capsys.readouterr().err
    rc = main(
        [
            "predict", "--data", data_csv, "--x", "0.4", "--eval-last", "2",
            "--method", "ll", "--b", "8",
        ]
    )
    assert rc == 2
    assert "exactly one" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# cv
# ---------------------------------------------------------------------------


def test_cv_noiseless_linear_prefers_smallest(tmp_path, capsys):
    xs = np.linspace(0.0, 1.0, 30)
    path = _write_csv(tmp_path / "lin.csv", xs, 2.0 - 3.0 * xs)
    rc = main(
        ["cv", "--data", path, "--x", "0.5", "--candidates", "12,3,6",
         "--method", "ll", "--m", "5"]
    )
    assert rc == 0
    out, err = capsys.readouterr()
    lines = out.strip().splitlines()
    assert lines[0] == "b,err,feasible"
    assert lines[1].startswith("12,") and lines[1].endswith(",yes")
    assert lines[-1] == "# best_b,3"
    assert json.loads(err.strip())["best_b"] == 3.0


def test_cv_marks_infeasible_candidates(data_csv, capsys):
    rc = main(
        [
            "cv", "--data", data_csv, "--x", "0.5", "--candidates", "0.01,25",
            "--kernel", "rectangular",
        ]
    )
    assert rc == 0
    out, err = capsys.readouterr()
    lines = out.strip().splitlines()
    assert lines[1] == "0.01,NA,no"
    assert lines[-1] == "# best_b,25"
    assert json.loads(err.strip())["infeasible"] == [0.01]


# ---------------------------------------------------------------------------
# bootstrap
# ---------------------------------------------------------------------------


def _boot_argv(data_csv, extra=()):
    return [
        "bootstrap", "--data", data_csv, "--x", "0.5", "--y", "0.9",
        "--B", "12", "--b", "8", *extra,
    ]


def test_bootstrap_variance_matches_replicates(data_csv, capsys):
    rc = main(_boot_argv(data_csv, ["--seed", "5"]))
    assert rc == 0
    out, err = capsys.readouterr()
    lines = out.strip().splitlines()
    assert lines[0] == "replicate"
    reps = np.array([float(v) for v in lines[1:-1]])
    assert reps.size == 12
    variance = float(lines[-1].split(",")[1])
    assert variance == pytest.approx(np.var(reps, ddof=1), rel=1e-9)
    sidecar = json.loads(err.strip())
    assert sidecar["seed"] == 5
    assert sidecar["variance"] == pytest.approx(variance, rel=1e-11)


def test_bootstrap_seed_controls_output(data_csv, capsys):
    main(_boot_argv(data_csv, ["--seed", "5"]))
    first = capsys.readouterr().out
    main(_boot_argv(data_csv, ["--seed", "5"]))
    again = capsys.readouterr().out
    main(_boot_argv(data_csv, ["--seed", "6"]))
    other = capsys.readouterr().out
    assert first == again
    assert first != other


def test_bootstrap_env_seed(data_csv, capsys, monkeypatch):
    main(_boot_argv(data_csv, ["--seed", "42"]))
    by_flag = capsys.readouterr().out
    monkeypatch.setenv("MONOLLR_SEED", "42")
    main(_boot_argv(data_csv))
    by_env = capsys.readouterr().out
    assert by_env == by_flag
    # explicit flag wins over the environment
    main(_boot_argv(data_csv, ["--seed", "6"]))
    flag_beats_env = capsys.readouterr().out
    monkeypatch.delenv("MONOLLR_SEED")
    main(_boot_argv(data_csv, ["--seed", "6"]))
    assert flag_beats_env == capsys.readouterr().out


def test_bootstrap_bad_env_seed(data_csv, capsys, monkeypatch):
    monkeypatch.setenv("MONOLLR_SEED", "abc")
    rc = main(_boot_argv(data_csv))
    assert rc == 2
    assert "must be an integer" in capsys.readouterr().err


def test_bootstrap_rejects_nonpositive_B(data_csv, capsys):
    rc = main(
        [
            "bootstrap", "--data", data_csv, "--x", "0.5", "--y", "0.9",
            "--B", "0", "--b", "8",
        ]
    )
    assert rc == 2
    assert "at least 1" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _sim_config(tmp_path, **overrides):
    doc = {
        "dgp": {"n": 51, "tau": 0.15, "seed": 3},
        "realizations": 2,
        "eval_points": [{"index": 51, "window": "one_sided_left"}],
        "bandwidths": [5, 10],
        "quantile_levels": [0.5],
        "grid_count": 201,
    }
    doc.update(overrides)
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_simulate_outputs_and_echo_reruns_identically(tmp_path, capsys):
    cfg_path = _sim_config(tmp_path)
    out1 = tmp_path / "run1"
    assert main(["simulate", "--config", cfg_path, "--out", str(out1)]) == 0
    capsys.readouterr()

    names = ["ks_point51.csv", "pred_point51.csv", "quantiles_point51.csv"]
    for name in names + ["run_config.json"]:
        assert (out1 / name).exists()
    assert (out1 / "ks_point51.csv").read_text().splitlines()[0] == "b,ks_lc,ks_llh,ks_llm"
    assert (out1 / "pred_point51.csv").read_text().splitlines()[0] == (
        "b,bias_lc,mse_lc,bias_llh,mse_llh,bias_llm,mse_llm,bias_ll,mse_ll"
    )
    q_lines = (out1 / "quantiles_point51.csv").read_text().splitlines()
    assert q_lines[0] == "alpha,method,bandwidth,true,realization,estimate"
    assert len(q_lines) == 1 + 3 * 2  # three methods, two realizations

    # the echoed config is itself a valid --config and reproduces every byte
    out2 = tmp_path / "run2"
    rc = main(
        ["simulate", "--config", str(out1 / "run_config.json"), "--out", str(out2)]
    )
    assert rc == 0
    for name in names + ["run_config.json"]:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_simulate_seed_override(tmp_path, capsys):
    cfg_path = _sim_config(tmp_path, quantile_levels=[])
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["simulate", "--config", cfg_path, "--out", str(out1)]) == 0
    assert main(
        ["simulate", "--config", cfg_path, "--seed", "7", "--out", str(out2)]
    ) == 0
    capsys.readouterr()
    echo = json.loads((out2 / "run_config.json").read_text())
    assert echo["dgp"]["seed"] == 7
    assert (out1 / "ks_point51.csv").read_text() != (out2 / "ks_point51.csv").read_text()


def test_simulate_warns_about_infeasible_cells(tmp_path, capsys):
    cfg_path = _sim_config(
        tmp_path, bandwidths=[0.05, 10], kernel="rectangular", quantile_levels=[]
    )
    out = tmp_path / "run"
    assert main(["simulate", "--config", cfg_path, "--out", str(out)]) == 0
    assert "infeasible cells marked NA" in capsys.readouterr().err
    ks_rows = (out / "ks_point51.csv").read_text().splitlines()
    assert ks_rows[1] == "0.05,NA,NA,NA"
    assert "NA" not in ks_rows[2]


def test_simulate_rejects_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "invalid JSON" in capsys.readouterr().err

    missing_key = tmp_path / "missing.json"
    missing_key.write_text(json.dumps({"dgp": {"n": 51}}))
    rc = main(["simulate", "--config", str(missing_key), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "invalid experiment config" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# exit codes and diagnostics
# ---------------------------------------------------------------------------


def test_missing_file_is_reported(tmp_path, capsys):
    rc = main(
        ["estimate", "--data", str(tmp_path / "nope.csv"), "--x", "0.5",
         "--method", "llm", "--b", "8"]
    )
    assert rc == 2
    assert "cannot open" in capsys.readouterr().err


def test_non_numeric_cell_names_row_and_column(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0.1,1.0\n0.2,oops\n")
    rc = main(
        ["estimate", "--data", str(path), "--x", "0.5", "--method", "llm", "--b", "8"]
    )
    assert rc == 2
    err = capsys.readouterr().err
    assert "row 3" in err and "column 'y'" in err and "'oops'" in err


def test_estimator_failure_names_the_class(data_csv, capsys):
    # one-sided window at the smallest x leaves nothing in the window
    sample = load_dataset(data_csv)
    rc = main(
        [
            "estimate", "--data", data_csv, "--x", str(float(sample.xs[0])),
            "--method", "llm", "--b", "8", "--window", "one-sided",
        ]
    )
    assert rc == 3
    assert "DegenerateWeights" in capsys.readouterr().err


def test_b_and_h_are_exclusive(data_csv, capsys):
    rc = main(
        ["estimate", "--data", data_csv, "--x", "0.5", "--method", "llm",
         "--b", "8", "--h", "0.2"]
    )
    assert rc == 2
    assert "not both" in capsys.readouterr().err
    rc = main(["estimate", "--data", data_csv, "--x", "0.5", "--method", "llm"])
    assert rc == 2
    assert "bandwidth is required" in capsys.readouterr().err


def test_bad_grid_spec(data_csv, capsys):
    for spec in ("1:2", "a:b:c", "0:1:1"):
        rc = main(
            ["estimate", "--data", data_csv, "--x", "0.5", "--method", "llm",
             "--b", "8", "--grid", spec]
        )
        assert rc == 2
        assert "--grid" in capsys.readouterr().err


def test_help_and_missing_subcommand(capsys):
    assert main(["--help"]) == 0
    assert "estimate" in capsys.readouterr().out
    assert main([]) == 2


# ---------------------------------------------------------------------------
# load_dataset
# ---------------------------------------------------------------------------


def test_load_dataset_sorts_stably(tmp_path):
    path = _write_csv(tmp_path / "d.csv", [2.0, 1.0, 2.0, 0.0], [10.0, 20.0, 30.0, 40.0])
    s = load_dataset(path)
    assert np.array_equal(s.xs, [0.0, 1.0, 2.0, 2.0])
    assert np.array_equal(s.ys, [40.0, 20.0, 10.0, 30.0])


def test_load_dataset_no_sort_keeps_order(tmp_path):
    path = _write_csv(tmp_path / "d.csv", [2.0, 1.0], [10.0, 20.0])
    s = load_dataset(path, sort=False)
    assert np.array_equal(s.xs, [2.0, 1.0])


def test_load_dataset_named_columns(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("age,junk,wage\n30,0,11.0\n20,0,9.5\n")
    s = load_dataset(path, x_col="age", y_col="wage")
    assert np.array_equal(s.xs, [20.0, 30.0])
    assert np.array_equal(s.ys, [9.5, 11.0])
    with pytest.raises(Exception, match="no column named 'height'"):
        load_dataset(path, x_col="height")


def test_load_dataset_index_columns_and_headerless(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("5.0,0.5\n3.0,0.3\n")
    s = load_dataset(path, has_header=False, x_col="1", y_col="0")
    assert np.array_equal(s.xs, [0.3, 0.5])
    assert np.array_equal(s.ys, [3.0, 5.0])


def test_load_dataset_rejects_non_finite(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("x,y\n0.1,inf\n")
    with pytest.raises(Exception, match="non-finite"):
        load_dataset(path)


def test_cli_no_header_flag(tmp_path, capsys):
    path = _write_csv(tmp_path / "d.csv", [0.1, 0.5, 0.9], [1.0, 2.0, 3.0], header=None)
    rc = main(
        ["predict", "--data", str(path), "--no-header", "--x", "0.5",
         "--method", "lc", "--b", "3"]
    )
    assert rc == 0
    assert capsys.readouterr().out.splitlines()[0] == "x,prediction"
