"""Evaluation reports, class statistics, length ablation, and the CLI.

All reports are JSON (stable key order); plot data (ROC curves, score
histograms) export as CSV.  Every run is deterministic for fixed flags,
files and --seed.
"""

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import attacks, calibration, detection, gec, scoring
from .corpus import (
    HUMAN,
    LLM,
    TextSample,
    bin_by_length,
    load_corpus,
    segment_sentences,
    sliding_windows,
)
from .errors import CalibrationError, GecScoreError
from .scoring import ScoreSet
from .similarity import CLI_METRIC_NAMES, MetricSpec, metric_spec

ENV_SERVICE_URL = "GECSCORE_SERVICE_URL"


@dataclass
class ClassStats:
    mean_human: float
    var_human: float
    mean_llm: float
    var_llm: float
    ratio: float

    def to_dict(self) -> dict:
        return {
            "mean_human": self.mean_human,
            "var_human": self.var_human,
            "mean_llm": self.mean_llm,
            "var_llm": self.var_llm,
            "ratio": self.ratio,
        }


@dataclass
class EvalReport:
    auroc: float
    f1: float
    recall: float
    precision: float
    confusion: tuple  # (tp, fp, tn, fn)
    epsilon: float
    metric: str
    n_human: int
    n_llm: int
    class_stats: ClassStats

    def to_dict(self) -> dict:
        tp, fp, tn, fn = self.confusion
        return {
            "auroc": self.auroc,
            "f1": self.f1,
            "recall": self.recall,
            "precision": self.precision,
            "confusion": {"tp": tp, "fp": fp, "tn": tn, "fn": fn},
            "epsilon": self.epsilon,
            "metric": self.metric,
            "n_human": self.n_human,
            "n_llm": self.n_llm,
            "class_stats": self.class_stats.to_dict(),
        }


def class_statistics(score_set: ScoreSet, labels) -> ClassStats:
    """Population mean/variance of amplified scores per class, and their ratio."""
    labels = list(labels)
    amp = score_set.amplified
    h = amp[[l == HUMAN for l in labels]]
    l = amp[[lb == LLM for lb in labels]]
    if len(h) == 0 or len(l) == 0:
        raise CalibrationError("class_statistics needs both classes")
    mean_h = float(h.mean())
    mean_l = float(l.mean())
    return ClassStats(
        mean_human=mean_h,
        var_human=float(h.var()),
        mean_llm=mean_l,
        var_llm=float(l.var()),
        ratio=mean_l / mean_h if mean_h > 0 else float("nan"),
    )


def _require_labeled(samples) -> list[str]:
    unlabeled = [s.id for s in samples if s.label not in (HUMAN, LLM)]
    if unlabeled:
        raise CalibrationError(f"evaluation corpus has unlabeled samples: {unlabeled[:5]}")
    return [s.label for s in samples]


def evaluate_with_scores(
    samples: list[TextSample],
    backend: gec.GecBackendConfig,
    metric: MetricSpec,
    lowercase: bool = True,
    service_url: str | None = None,
) -> tuple[EvalReport, ScoreSet]:
    """Full pipeline over a labeled corpus: correct, orient, amplify, calibrate, report."""
    labels = _require_labeled(samples)
    score_set = scoring.gecscore_set(samples, backend, metric, lowercase, service_url)
    amp = score_set.amplified
    auroc_val = calibration.auroc(amp, labels)
    thr = calibration.select_threshold(amp, labels)
    is_pos = np.array([l == LLM for l in labels], dtype=bool)
    pred = amp > thr.epsilon
    tp = int((pred & is_pos).sum())
    fp = int((pred & ~is_pos).sum())
    tn = int((~pred & ~is_pos).sum())
    fn = int((~pred & is_pos).sum())
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    report = EvalReport(
        auroc=auroc_val,
        f1=f1,
        recall=recall,
        precision=precision,
        confusion=(tp, fp, tn, fn),
        epsilon=thr.epsilon,
        metric=metric.name(),
        n_human=int((~is_pos).sum()),
        n_llm=int(is_pos.sum()),
        class_stats=class_statistics(score_set, labels),
    )
    return report, score_set


def evaluate(
    samples: list[TextSample],
    backend: gec.GecBackendConfig,
    metric: MetricSpec,
    lowercase: bool = True,
    service_url: str | None = None,
) -> EvalReport:
    return evaluate_with_scores(samples, backend, metric, lowercase, service_url)[0]


def augment_with_windows(samples: list[TextSample], max_window_n: int) -> list[TextSample]:
    """Sentence-window fragments (window sizes 1..max_window_n) of every sample."""
    out: list[TextSample] = []
    for s in samples:
        sentences = segment_sentences(s.text)
        for n in range(1, max_window_n + 1):
            for w, text in enumerate(sliding_windows(sentences, n)):
                out.append(
                    TextSample(
                        id=f"{s.id}:w{n}.{w}",
                        text=text,
                        label=s.label,
                        source_model=s.source_model,
                        domain=s.domain,
                    )
                )
    return out


def ablate_length(
    samples: list[TextSample],
    backend: gec.GecBackendConfig,
    metrics: list[MetricSpec],
    window_n: int,
    bin_width: int,
    per_class_cap: int = 500,
    seed: int = 0,
    lowercase: bool = True,
    service_url: str | None = None,
) -> list[dict]:
    """AUROC per (metric, length bin) over window-augmented, balance-sampled data."""
    _require_labeled(samples)
    windows = augment_with_windows(samples, window_n)
    rows: list[dict] = []
    for b in bin_by_length(windows, bin_width):
        humans = [s for s in b.samples if s.label == HUMAN]
        llms = [s for s in b.samples if s.label == LLM]
        take = min(per_class_cap, len(humans), len(llms))
        if take == 0:
            rows.append(
                {
                    "bin_lower": b.lower,
                    "bin_upper": b.upper,
                    "n_per_class": 0,
                    "metric": None,
                    "auroc": None,
                    "note": "skipped: single-class or empty bin",
                }
            )
            continue
        rng = random.Random(gec.derive_seed(seed, f"bin:{b.lower}"))
        chosen = rng.sample(humans, take) + rng.sample(llms, take)
        for metric in metrics:
            report = evaluate(chosen, backend, metric, lowercase, service_url)
            rows.append(
                {
                    "bin_lower": b.lower,
                    "bin_upper": b.upper,
                    "n_per_class": take,
                    "metric": metric.name(),
                    "auroc": report.auroc,
                    "note": None,
                }
            )
    return rows


def histogram_csv(score_set: ScoreSet, labels) -> str:
    lines = ["score,label"]
    for score, label in zip(score_set.amplified, labels):
        lines.append(f"{float(score)!r},{label}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# CLI
# --------------------------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 on usage errors, not argparse's 2
        raise UsageError(message)


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {value!r}")


def _add_shared(p: _Parser) -> None:
    p.add_argument("--gec", choices=["identity", "rules", "http"], default="rules")
    p.add_argument("--gec-endpoint", default=None, help="correction service URL (http backend)")
    p.add_argument("--metric", choices=sorted(CLI_METRIC_NAMES), default="chrf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write primary output here instead of stdout")
    p.add_argument("--lowercase", type=_parse_bool, default=True, metavar="BOOL")


def build_parser() -> _Parser:
    parser = _Parser(prog="gecscore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="classify one or more input texts")
    _add_shared(p)
    p.add_argument("--prelim", required=True, help="labeled preliminary corpus (JSONL)")
    p.add_argument("--input", default=None, help="raw text file with one sample")
    p.add_argument("--input-jsonl", default=None, help="corpus file of inputs (labels ignored)")
    p.add_argument("--id", default=None, help="sample id for --input (default: file stem)")

    p = sub.add_parser("evaluate", help="full-pipeline evaluation report")
    _add_shared(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--hist", default=None, help="write score,label histogram CSV here")
    p.add_argument("--roc", default=None, help="write threshold,tpr,fpr,j ROC CSV here")

    p = sub.add_parser("calibrate", help="select the decision threshold")
    _add_shared(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--roc", default=None)

    p = sub.add_parser("stats", help="per-class amplified score statistics")
    _add_shared(p)
    p.add_argument("--corpus", required=True)

    p = sub.add_parser("attack", help="robustness evaluation before/after an attack")
    _add_shared(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--attack", choices=["none", "chars", "paraphrase"], default="chars")
    p.add_argument("--rate", type=float, default=0.1)
    p.add_argument("--ops", default=",".join(attacks.ALL_OPS))
    p.add_argument("--min-token-len", type=int, default=3)

    p = sub.add_parser("ablate-length", help="AUROC by metric and text-length bin")
    _add_shared(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--metrics", default="chrf,edit", help="comma-separated metric names")
    p.add_argument("--window-n", type=int, default=8)
    p.add_argument("--bin-width", type=int, default=30)
    p.add_argument("--per-bin", type=int, default=500)

    p = sub.add_parser("correct", help="show GEC output (debug)")
    _add_shared(p)
    p.add_argument("--text", default=None)
    p.add_argument("--corpus", default=None)

    p = sub.add_parser("metrics", help="list available metric specs")
    _add_shared(p)
    return parser


def _backend_from_args(args) -> gec.GecBackendConfig:
    endpoint = args.gec_endpoint or os.environ.get(ENV_SERVICE_URL)
    if args.gec == "http":
        if not endpoint:
            raise UsageError("--gec http requires --gec-endpoint or GECSCORE_SERVICE_URL")
        return gec.GecBackendConfig(kind="http", endpoint=endpoint)
    return gec.GecBackendConfig(kind=args.gec)


def _metric_from_args(args) -> MetricSpec:
    kind, extra = CLI_METRIC_NAMES[args.metric]
    params = dict(extra)
    if kind == "external":
        endpoint = args.gec_endpoint or os.environ.get(ENV_SERVICE_URL)
        if not endpoint:
            raise UsageError(
                f"metric {args.metric!r} requires --gec-endpoint or GECSCORE_SERVICE_URL"
            )
        params["endpoint"] = endpoint
    return metric_spec(kind, **params)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_inputs(args) -> list[TextSample]:
    if (args.input is None) == (args.input_jsonl is None):
        raise UsageError("detect requires exactly one of --input or --input-jsonl")
    if args.input is not None:
        text = Path(args.input).read_text(encoding="utf-8")
        sid = args.id or Path(args.input).stem
        return [TextSample(id=sid, text=text)]
    return load_corpus(args.input_jsonl)


def run(argv: list[str]) -> int:
    """Dispatch a CLI invocation; 0 on success, 1 on usage error, 2 on runtime error."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        parser.print_usage(sys.stderr)
        return 1
    try:
        backend = _backend_from_args(args)
        metric = _metric_from_args(args)
        service_url = args.gec_endpoint or os.environ.get(ENV_SERVICE_URL)

        if args.command == "detect":
            prelim = load_corpus(args.prelim, require_label=True)
            inputs = _load_inputs(args)
            results = detection.detect_batch(
                prelim, inputs, backend, metric, args.lowercase, service_url
            )
            _emit(args, "".join(r.to_json() + "\n" for r in results))
            return 0

        if args.command == "evaluate":
            samples = load_corpus(args.corpus, require_label=True)
            report, score_set = evaluate_with_scores(
                samples, backend, metric, args.lowercase, service_url
            )
            if args.hist:
                Path(args.hist).write_text(
                    histogram_csv(score_set, [s.label for s in samples]), encoding="utf-8"
                )
            if args.roc:
                points = calibration.roc_points(
                    score_set.amplified, [s.label for s in samples]
                )
                Path(args.roc).write_text(calibration.roc_csv(points), encoding="utf-8")
            _emit(args, json.dumps(report.to_dict(), sort_keys=True) + "\n")
            return 0

        if args.command == "calibrate":
            samples = load_corpus(args.corpus, require_label=True)
            score_set = scoring.gecscore_set(
                samples, backend, metric, args.lowercase, service_url
            )
            labels = [s.label for s in samples]
            thr = calibration.select_threshold(score_set.amplified, labels)
            if args.roc:
                points = calibration.roc_points(score_set.amplified, labels)
                Path(args.roc).write_text(calibration.roc_csv(points), encoding="utf-8")
            payload = {
                "epsilon": thr.epsilon,
                "j": thr.j_at_epsilon,
                "tpr": thr.tpr,
                "fpr": thr.fpr,
                "n_pos": thr.n_pos,
                "n_neg": thr.n_neg,
                "metric": metric.name(),
            }
            _emit(args, json.dumps(payload, sort_keys=True) + "\n")
            return 0

        if args.command == "stats":
            samples = load_corpus(args.corpus, require_label=True)
            score_set = scoring.gecscore_set(
                samples, backend, metric, args.lowercase, service_url
            )
            stats = class_statistics(score_set, [s.label for s in samples])
            _emit(args, json.dumps(stats.to_dict(), sort_keys=True) + "\n")
            return 0

        if args.command == "attack":
            samples = load_corpus(args.corpus, require_label=True)
            params = None
            if args.attack == "chars":
                ops = tuple(op for op in args.ops.split(",") if op)
                params = attacks.PerturbationConfig(
                    rate=args.rate, ops=ops, seed=args.seed, min_token_len=args.min_token_len
                )
            before, after = attacks.robustness_eval(
                samples,
                args.attack,
                params,
                backend,
                metric,
                args.lowercase,
                endpoint=service_url,
                service_url=service_url,
            )
            payload = {
                "attack": args.attack,
                "before": before.to_dict(),
                "after": after.to_dict(),
                "delta_auroc": after.auroc - before.auroc,
            }
            _emit(args, json.dumps(payload, sort_keys=True) + "\n")
            return 0

        if args.command == "ablate-length":
            samples = load_corpus(args.corpus, require_label=True)
            specs = []
            for name in args.metrics.split(","):
                name = name.strip()
                if name not in CLI_METRIC_NAMES:
                    raise UsageError(f"unknown metric {name!r}")
                kind, extra = CLI_METRIC_NAMES[name]
                specs.append(metric_spec(kind, **extra))
            rows = ablate_length(
                samples,
                backend,
                specs,
                window_n=args.window_n,
                bin_width=args.bin_width,
                per_class_cap=args.per_bin,
                seed=args.seed,
                lowercase=args.lowercase,
                service_url=service_url,
            )
            _emit(args, json.dumps(rows, sort_keys=True) + "\n")
            return 0

        if args.command == "correct":
            if (args.text is None) == (args.corpus is None):
                raise UsageError("correct requires exactly one of --text or --corpus")
            if args.text is not None:
                corrected = gec.correct([args.text], backend)[0]
                _emit(args, corrected + "\n")
            else:
                samples = load_corpus(args.corpus)
                corrected = gec.correct([s.text for s in samples], backend)
                _emit(
                    args,
                    "".join(
                        json.dumps({"id": s.id, "corrected": c}, sort_keys=True) + "\n"
                        for s, c in zip(samples, corrected)
                    ),
                )
            return 0

        if args.command == "metrics":
            listing = []
            for name in sorted(CLI_METRIC_NAMES):
                kind, extra = CLI_METRIC_NAMES[name]
                spec = metric_spec(kind, **extra)
                listing.append(
                    {
                        "name": name,
                        "kind": spec.kind,
                        "direction": spec.direction,
                        "params": {k: v for k, v in spec.params.items() if k != "endpoint"},
                    }
                )
            _emit(args, json.dumps(listing, sort_keys=True) + "\n")
            return 0

        raise UsageError(f"unknown command {args.command!r}")  # pragma: no cover
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except (GecScoreError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
