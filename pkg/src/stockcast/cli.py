"""``stockcast`` command line.

Every command collects its files in memory and writes them in sorted order
once it finishes, so identical inputs always give byte-identical trees.

Exit codes: 0 success, 1 I/O problem, 2 invalid input or config, 3 at least
one model failed while the rest of the run completed.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import features as F
from . import harness as H
from . import metrics, persist, published, sentiment, svg
from .config import RunConfig, load_config
from .errors import StockcastError
from .granger import granger_grid
from .lstm import loss_curve_csv, train_lstm
from .market_data import ParseReport, read_ohlcv, validate_series
from .models.base import ModelSpec
from .sofnn import train_sofnn

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_PARTIAL = 0, 1, 2, 3


class Outputs:
    def __init__(self, header: str):
        self.header = header
        self.files: dict[str, str] = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def write(self, root: Path) -> None:
        for name in sorted(self.files):
            path = root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.files[name], encoding="utf-8", newline="\n")


def header_for(cfg: RunConfig) -> str:
    return f"stockcast {__version__} seed={cfg.seed} config={cfg.config_hash}"


def load_frame(cfg: RunConfig) -> F.FeatureFrame:
    if cfg.features:
        return F.frame_from_csv(Path(cfg.features).read_text(encoding="utf-8"))
    return F.derive_features(read_ohlcv(cfg.prices))


def load_moods(cfg: RunConfig, frame: F.FeatureFrame) -> sentiment.MoodSeries:
    if cfg.tweets:
        records = sentiment.parse_tweets(Path(cfg.tweets).read_text(encoding="utf-8"))
        return sentiment.build_mood_series(records, sentiment.Lexicon.load(cfg.lexicon), frame)
    if not cfg.moods:
        raise StockcastError("no mood source configured (set moods or tweets)")
    series = sentiment.parse_mood_csv(Path(cfg.moods).read_text(encoding="utf-8"))
    return sentiment.align_to_frame(series, frame)


def _restrict(frame: F.FeatureFrame, cfg: RunConfig) -> F.FeatureFrame:
    """Drop rows after test_end so nothing later can leak into any input."""
    keep = [i for i, d in enumerate(frame.dates) if d <= cfg.test_end]
    return F.FeatureFrame(tuple(frame.dates[i] for i in keep), frame.values[keep], frame.flagged[keep])


def _with_comment(comment: str, body: str) -> str:
    return f"# {comment}\n{body}"


# ---------------------------------------------------------------- commands


def cmd_ingest(args, cfg: RunConfig, out: Outputs) -> int:
    path = args.prices or cfg.prices
    series = read_ohlcv(path)
    gaps = validate_series(series)
    rep = series.report or ParseReport(len(series.bars), 0)
    lines = [
        f"# {out.header}",
        f"rows_read {rep.rows_read}",
        f"bars {len(series.bars)}",
        f"first {series.bars[0].date.isoformat()}" if series.bars else "first NA",
        f"last {series.bars[-1].date.isoformat()}" if series.bars else "last NA",
        f"dropped {rep.dropped}",
        *(f"dropped {d}" for d in rep.dropped_dates),
        f"gaps {len(gaps.missing)}",
        *gaps.lines(),
    ]
    text = "\n".join(lines) + "\n"
    out.add("ingest.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_features(args, cfg: RunConfig, out: Outputs) -> int:
    frame = F.derive_features(read_ohlcv(args.prices or cfg.prices))
    out.add("features.csv", _with_comment(out.header, F.frame_to_csv(frame)))
    print(f"{len(frame)} feature rows, {int(frame.flagged.sum())} flagged")
    return EXIT_OK


def _run_outputs(out: Outputs, run: H.EvalRun, label: str) -> None:
    out.add(f"predictions/{label}_{run.case}.csv", H.predictions_csv(run, out.header))
    if run.task == "regress":
        chart = svg.line_chart(
            [("actual", run.actual), ("predicted", run.predicted)],
            title=f"{label} {run.case} close_norm",
            comment=out.header,
        )
        out.add(f"plots/{label}_{run.case}.svg", chart)


def cmd_eval(args, cfg: RunConfig, out: Outputs) -> int:
    frame = _restrict(load_frame(cfg), cfg)
    plans = H.make_case_splits(frame, cfg.train_end, cfg.test_end)
    runs: list[H.EvalRun] = []
    failed = False
    for entry in cfg.models:
        label = entry.label
        try:
            if entry.algo == "lstm":
                model, curve = train_lstm(cfg.lstm_config(), frame, plans[0], cfg.mode)
                out.add("lstm_loss.csv", loss_curve_csv(curve, out.header))
                saved = model
            else:
                spec = ModelSpec(entry.algo, entry.task, cfg.hp_for(entry.algo, entry.task), cfg.seed)
                model = H.train_shallow(spec, frame, plans[0], cfg.mode)
                saved = model.model
            case_runs = [H.evaluate(model, plan, cfg.mode, frame) for plan in plans]
        except (StockcastError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            print(f"error: {label} failed: {exc}", file=sys.stderr)
            failed = True
            runs += [H.failed_run(entry.algo, entry.task, plan.case, cfg.mode, cfg.seed) for plan in plans]
            continue
        out.add(f"models/{label}.json", persist.model_to_text(saved, out.header))
        for run in case_runs:
            runs.append(run)
            _run_outputs(out, run, label)
    out.add("report.csv", H.report_csv(runs, out.header))
    print(f"{len(runs)} report rows, {sum(r.status == 'failed' for r in runs)} failed")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_granger(args, cfg: RunConfig, out: Outputs) -> int:
    frame = load_frame(cfg)
    moods = load_moods(cfg, frame)
    keep = np.array([d <= cfg.train_end for d in frame.dates])
    M = moods.matrix()[keep]
    causes = {name: M[:, k] for k, name in enumerate(sentiment.MOODS)}
    grid = granger_grid(causes, frame.close_norm[keep], cfg.granger_lags)
    out.add("granger.csv", grid.to_csv(out.header))
    text = grid.to_text(out.header)
    out.add("granger.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


def _summary_table(runs: list[H.EvalRun], neurons: int, comment: str) -> str:
    fm = metrics.fmt_metric
    lines = [f"# {comment}", "PERFORMANCE OF SENTIMENT AUGMENTED ALGORITHM (SOFNN)"]
    lines.append("metric".ljust(16) + "".join(r.case.rjust(14) for r in runs))
    rows = (("Correlation", "pearson"), ("MAPE", "mape"), ("Matched Cases", "matched_pct"))
    for title, attr in rows:
        lines.append(title.ljust(16) + "".join(fm(getattr(r.report, attr), 4).rjust(14) for r in runs))
    lines.append(f"neurons {neurons}")
    return "\n".join(lines) + "\n"


def cmd_sofnn(args, cfg: RunConfig, out: Outputs) -> int:
    frame = _restrict(load_frame(cfg), cfg)
    moods = load_moods(cfg, frame)
    plans = H.make_case_splits(frame, cfg.train_end, cfg.test_end)
    forecaster = train_sofnn(cfg.sofnn_config(), moods, frame, plans[0])
    runs = [H.evaluate(forecaster, plan, "lagged", frame) for plan in plans]
    for run in runs:
        _run_outputs(out, run, "sofnn")
    out.add("sofnn_report.csv", H.report_csv(runs, out.header))
    out.add("models/sofnn.json", persist.model_to_text(forecaster.model, out.header))
    text = _summary_table(runs, forecaster.model.n_neurons, out.header)
    out.add("sofnn_summary.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


_REPORT_METRICS = ("sensitivity", "specificity", "ppv", "npv", "ca", "mape", "pearson", "matched_pct")


def comparison_csv(report_texts: list[str], comment: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("model", "task", "case", "mode", "metric", "ours", "published", "difference"))
    for text in report_texts:
        rows = csv.DictReader(line for line in text.splitlines() if not line.startswith("#"))
        for row in rows:
            ref = published.lookup(row["model"], row["task"], row["case"])
            for m in _REPORT_METRICS:
                ours = row[m]
                if ours == "NA" and m not in ref:
                    continue
                pub = ref.get(m)
                diff = "NA" if pub is None or ours == "NA" else f"{float(ours) - pub:.6f}"
                w.writerow((row["model"], row["task"], row["case"], row["mode"], m, ours, "NA" if pub is None else f"{pub:.2f}", diff))
    return buf.getvalue()


def cmd_report(args, cfg: RunConfig, out: Outputs) -> int:
    root = Path(cfg.out)
    sources = [Path(p) for p in args.inputs] if args.inputs else [p for p in (root / "report.csv", root / "sofnn_report.csv") if p.exists()]
    if not sources:
        raise FileNotFoundError(f"no report.csv or sofnn_report.csv under {root}")
    texts = [p.read_text(encoding="utf-8") for p in sources]
    for t in texts:
        first = next((ln for ln in t.splitlines() if not ln.startswith("#")), "")
        if first.split(",") != list(H.REPORT_HEADER):
            raise StockcastError("input is not a stockcast report CSV")
    text = comparison_csv(texts, out.header)
    out.add("comparison.csv", text)
    print(f"comparison written for {len(sources)} report file(s)")
    return EXIT_OK


# ---------------------------------------------------------------- parser

COMMANDS = {
    "ingest": (cmd_ingest, "validate a prices CSV and report gaps"),
    "features": (cmd_features, "derive the nine-column feature CSV"),
    "eval": (cmd_eval, "train and evaluate models in Case I and Case II"),
    "granger": (cmd_granger, "mood-by-lag Granger p-value grid"),
    "sofnn": (cmd_sofnn, "sentiment-fused SOFNN weekly forecasts"),
    "report": (cmd_report, "compare a report CSV with published values"),
}


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="flat key = value config file")
    p.add_argument("--seed", type=int, default=d, help="unsigned 64-bit seed")
    p.add_argument("--out", default=d, help="output directory")
    p.add_argument("--mode", choices=H.MODES, default=d, help="feature availability mode")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stockcast", parents=[_global_flags(False)])
    parser.add_argument("--version", action="version", version=f"stockcast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text, parents=[_global_flags(True)])
        if name in ("ingest", "features"):
            sp.add_argument("prices", nargs="?", help="prices CSV (defaults to the config value)")
        if name == "eval":
            sp.add_argument("--models", help="comma-separated model list, overrides the config")
        if name == "report":
            sp.add_argument("inputs", nargs="*", help="report CSVs (default: those in --out)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {"seed": args.seed, "out": args.out, "mode": args.mode, "models": getattr(args, "models", None)}
    if overrides["models"] is not None and not overrides["models"].strip():
        parser.error("--models must name at least one model")
    try:
        cfg = load_config(args.config, **overrides)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except StockcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    out = Outputs(header_for(cfg))
    func = COMMANDS[args.command][0]
    try:
        code = func(args, cfg, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (StockcastError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        out.write(Path(cfg.out))
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
