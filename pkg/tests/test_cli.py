import csv
import json
import subprocess
import sys
from datetime import date
from pathlib import Path

import numpy as np
import pytest

from stockcast import __version__, cli
from stockcast.config import RunConfig, bundled, build_config, load_config, parse_lines, parse_models
from stockcast.errors import ValidationError
from stockcast.rng import SplitMix64

HEADER_PREFIX = f"# stockcast {__version__} seed="
PRICES = bundled("nifty50_2015_2019.csv")


def run(*argv):
    return cli.main([str(a) for a in argv])


def rows(path):
    return list(csv.DictReader(ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")))


def tree_bytes(root):
    root = Path(root)
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return path


# ------------------------------------------------------------ ingest / features


def test_ingest_fixture(tmp_path, capsys):
    assert run("ingest", PRICES, "--out", tmp_path) == 0
    text = (tmp_path / "ingest.txt").read_text()
    assert text.startswith(HEADER_PREFIX)
    assert "bars " in text and "dropped 0" in text
    assert capsys.readouterr().out == text


def test_ingest_missing_file_is_io_error(tmp_path, capsys):
    assert run("ingest", tmp_path / "nope.csv", "--out", tmp_path) == 1
    assert "error" in capsys.readouterr().err


def test_ingest_weekend_row_is_validation_error(tmp_path):
    bad = tmp_path / "weekend.csv"
    bad.write_text(
        "Date,Open,High,Low,Close,Volume\n"
        "2016-01-08,100,101,99,100.5,10\n"
        "2016-01-09,100,101,99,100.5,10\n"
        "2016-01-11,100,101,99,100.5,10\n"
    )
    assert run("ingest", bad, "--out", tmp_path / "o") == 2
    assert not (tmp_path / "o").exists()


def test_features_command(tmp_path):
    assert run("features", PRICES, "--out", tmp_path) == 0
    lines = (tmp_path / "features.csv").read_text().splitlines()
    assert lines[0].startswith(HEADER_PREFIX)
    assert len(lines) > 1000


# ------------------------------------------------------------ eval


def test_eval_single_model_gives_two_rows(tmp_path):
    cfg = write_config(tmp_path, "models = cart\nseed = 3\n")
    assert run("eval", "--config", cfg, "--out", tmp_path / "o") == 0
    report = rows(tmp_path / "o" / "report.csv")
    assert [(r["model"], r["case"]) for r in report] == [("cart", "CaseI"), ("cart", "CaseII")]
    assert all(r["seed"] == "3" and r["status"] == "ok" for r in report)
    produced = sorted(tree_bytes(tmp_path / "o"))
    assert produced == [
        "models/cart_classify.json",
        "predictions/cart_classify_CaseI.csv",
        "predictions/cart_classify_CaseII.csv",
        "report.csv",
    ]


def test_eval_regressor_draws_plots(tmp_path):
    assert run("eval", "--models", "regress:cart", "--out", tmp_path) == 0
    svg = (tmp_path / "plots" / "cart_regress_CaseI.svg").read_text()
    assert svg.count("<polyline") == 2 and "</svg>" in svg
    assert f"stockcast {__version__}" in svg


def test_eval_rerun_is_byte_identical(tmp_path):
    args = ["eval", "--models", "cart,regress:svm,logistic", "--seed", 9]
    assert run(*args, "--out", tmp_path / "a") == 0
    assert run(*args, "--out", tmp_path / "b") == 0
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def test_eval_empty_model_list_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("eval", "--models", " ", "--out", tmp_path)
    assert exc.value.code == 2
    cfg = write_config(tmp_path, "models = \n")
    assert run("eval", "--config", cfg, "--out", tmp_path) == 2


def test_eval_partial_failure_exit_three(tmp_path):
    cfg = write_config(tmp_path, "models = cart, lstm\nmodels.lstm.seq_len = 5000\nmodels.lstm.epochs = 1\n")
    assert run("eval", "--config", cfg, "--out", tmp_path / "o") == 3
    report = rows(tmp_path / "o" / "report.csv")
    status = {(r["model"], r["case"]): r["status"] for r in report}
    assert status[("lstm", "CaseI")] == "failed" and status[("lstm", "CaseII")] == "failed"
    assert status[("cart", "CaseI")] == "ok"


def test_unknown_config_key_is_validation_error(tmp_path):
    cfg = write_config(tmp_path, "modles = cart\n")
    assert run("eval", "--config", cfg, "--out", tmp_path) == 2


def test_missing_config_is_io_error(tmp_path):
    assert run("eval", "--config", tmp_path / "none.cfg", "--out", tmp_path) == 1


# ------------------------------------------------------------ granger / sofnn / report


def planted_moods(tmp_path, lag=2, seed=0):
    from stockcast.features import derive_features
    from stockcast.market_data import read_ohlcv

    frame = derive_features(read_ohlcv(PRICES))
    cn = frame.close_norm
    g = SplitMix64(seed)
    calm = 5.0 + g.normal(len(cn))
    calm[:-lag] += cn[lag:]
    others = g.uniform(0.1, 1.0, (len(cn), 3))
    path = tmp_path / "moods.csv"
    lines = ["date,calm,happy,alert,kind"]
    for d, c, o in zip(frame.dates, calm, others):
        lines.append(",".join([d.isoformat()] + [repr(float(v)) for v in (c, *o)]))
    path.write_text("\n".join(lines) + "\n")
    return path


def test_granger_grid_shape(tmp_path):
    assert run("granger", "--out", tmp_path) == 0
    grid = rows(tmp_path / "granger.csv")
    assert [r["lag"] for r in grid] == ["1", "2", "3", "4", "5"]
    assert list(grid[0]) == ["lag", "calm", "happy", "alert", "kind"]
    text = (tmp_path / "granger.txt").read_text()
    assert "GRANGER TEST P-VALUES AT DIFFERENT LAGS" in text


def test_granger_planted_lag_is_grid_minimum(tmp_path):
    cfg = write_config(tmp_path, f"moods = {planted_moods(tmp_path)}\n")
    assert run("granger", "--config", cfg, "--out", tmp_path / "o") == 0
    grid = rows(tmp_path / "o" / "granger.csv")
    calm = [float(r["calm"]) for r in grid]
    assert int(np.argmin(calm)) == 1


def test_granger_misaligned_moods_is_validation_error(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("date,calm,happy,alert,kind\n2015-01-05,1,0,0,0\n")
    cfg = write_config(tmp_path, f"moods = {path}\n")
    assert run("granger", "--config", cfg, "--out", tmp_path / "o") == 2


def test_sofnn_command(tmp_path):
    cfg = write_config(tmp_path, "sofnn.epochs = 3\nsofnn.max_neurons = 8\n")
    assert run("sofnn", "--config", cfg, "--out", tmp_path) == 0
    summary = (tmp_path / "sofnn_summary.txt").read_text().splitlines()
    assert summary[0].startswith(HEADER_PREFIX)
    assert summary[1] == "PERFORMANCE OF SENTIMENT AUGMENTED ALGORITHM (SOFNN)"
    assert summary[-1].startswith("neurons ")
    assert 1 <= int(summary[-1].split()[1]) <= 8
    assert len(rows(tmp_path / "sofnn_report.csv")) == 2


def test_report_compares_with_published(tmp_path):
    assert run("eval", "--models", "adaboost", "--out", tmp_path) == 0
    assert run("report", "--out", tmp_path) == 0
    comp = rows(tmp_path / "comparison.csv")
    ca = [r for r in comp if r["model"] == "adaboost" and r["case"] == "CaseI" and r["metric"] == "ca"]
    assert ca and ca[0]["published"] == "100.00"
    assert float(ca[0]["difference"]) == pytest.approx(float(ca[0]["ours"]) - 100.0, abs=1e-6)


def test_report_without_inputs_is_io_error(tmp_path):
    assert run("report", "--out", tmp_path) == 1


def test_report_rejects_foreign_csv(tmp_path):
    other = tmp_path / "x.csv"
    other.write_text("a,b\n1,2\n")
    assert run("report", other, "--out", tmp_path) == 2


# ------------------------------------------------------------ headers / config


def test_header_hash_tracks_config(tmp_path):
    a = write_config(tmp_path, "models = cart\nseed = 1\n")
    h1 = cli.header_for(load_config(a))
    h2 = cli.header_for(load_config(a))
    h3 = cli.header_for(load_config(a, seed=2))
    h4 = cli.header_for(load_config(a, out="elsewhere"))
    assert h1 == h2 == h4 and h1 != h3
    assert h1.startswith(f"stockcast {__version__} seed=1 config=")


def test_every_output_carries_the_header(tmp_path):
    assert run("eval", "--models", "regress:cart", "--out", tmp_path) == 0
    for path in tmp_path.rglob("*"):
        if path.is_file():
            text = path.read_text()
            if path.suffix == ".json":
                assert json.loads(text)["header"] == cli.header_for(load_config(None, models="regress:cart")), path
            else:
                assert HEADER_PREFIX[2:] in "\n".join(text.splitlines()[:2]), path


def test_config_parsing():
    pairs = parse_lines("# comment\n\nmodels = cart, regress:svm\nmodels.cart.max_depth = 4\nsofnn.delta = 0.25\ngranger.lags = 1, 3\n")
    cfg = build_config(pairs)
    assert [e.label for e in cfg.models] == ["cart_classify", "svm_regress"]
    assert cfg.hp_for("cart", "classify") == {"max_depth": 4}
    assert cfg.sofnn_config().delta == 0.25
    assert cfg.granger_lags == (1, 3)
    assert cfg.train_end == date(2017, 12, 29)
    with pytest.raises(ValidationError):
        parse_lines("a = 1\na = 2\n")
    with pytest.raises(ValidationError):
        parse_lines("no equals sign\n")
    with pytest.raises(ValidationError):
        build_config({"models.cart.bogus": "1"})
    with pytest.raises(ValidationError):
        build_config({"train_end": "2019-01-01", "test_end": "2018-01-01"})
    with pytest.raises(ValidationError):
        build_config({"seed": "-1"})


def test_model_list_syntax():
    assert len(parse_models("all")) == 16
    assert parse_models("knn, classify:knn")[0].label == "knn_classify"
    assert len(parse_models("knn, classify:knn")) == 1
    assert parse_models("multivariate_linear")[0].task == "regress"
    with pytest.raises(ValidationError):
        parse_models("classify:lstm")
    with pytest.raises(ValidationError):
        parse_models("forecast:cart")
    with pytest.raises(ValidationError):
        parse_models("nonsense")


def test_default_config_is_valid():
    cfg = RunConfig()
    assert Path(cfg.prices).exists() and Path(cfg.moods).exists()


def test_console_script_exit_codes(tmp_path):
    exe = [sys.executable, "-m", "stockcast.cli"]
    ok = subprocess.run([*exe, "ingest", PRICES, "--out", str(tmp_path)], capture_output=True)
    missing = subprocess.run([*exe, "ingest", str(tmp_path / "nope.csv"), "--out", str(tmp_path)], capture_output=True)
    assert (ok.returncode, missing.returncode) == (0, 1)
    assert (tmp_path / "ingest.txt").read_text().startswith(HEADER_PREFIX)
    assert b"error" in missing.stderr
