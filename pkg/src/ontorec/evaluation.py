"""Cross-validated precision/coverage of next-page recommendations."""

from __future__ import annotations

import math
import random
from collections.abc import Collection, Sequence
from dataclasses import dataclass
from decimal import Decimal

from ontorec.errors import NoScorableTransactions, TooFewSequences
from ontorec.mapper import SequenceDatabase
from ontorec.miner import MinerParams, onto_spm
from ontorec.ontology import AnnotationMap, SemanticDistanceMatrix
from ontorec.rules import DEFAULT_MAX_RESULTS, generate_rules, recommend_instances

DEFAULT_WINDOW = 2
DEFAULT_FOLDS = 10


def parse_thresholds(text: str) -> list[float]:
    """``"0.1:1.0:0.1"`` (inclusive range) or a comma list ``"0.2,0.5"``."""
    text = text.strip()
    if ":" in text:
        start, stop, step = (Decimal(p) for p in text.split(":"))
        if step <= 0:
            raise ValueError("threshold step must be positive")
        out = []
        value = start
        while value <= stop:
            out.append(float(value))
            value += step
    else:
        out = [float(p) for p in text.split(",") if p.strip()]
    if not out or any(not 0.0 <= t <= 1.0 for t in out):
        raise ValueError(f"thresholds must be a non-empty list within [0, 1]: {text!r}")
    if out != sorted(out):
        raise ValueError("thresholds must be ascending")
    return out


def kfold_split(db: SequenceDatabase, k: int = DEFAULT_FOLDS, seed: int = 0,
                ) -> list[tuple[SequenceDatabase, SequenceDatabase]]:
    """Seeded shuffle into ``k`` folds whose sizes differ by at most one.

    The first ``len(db) % k`` folds take the extra sequence. Sequences keep
    their original relative order inside train and test parts.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if len(db) < k:
        raise TooFewSequences(f"{len(db)} sequences cannot fill {k} folds")
    order = list(range(len(db)))
    random.Random(seed).shuffle(order)
    base, extra = divmod(len(db), k)
    splits = []
    start = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        test = set(order[start:start + size])
        start += size
        train = [i for i in range(len(db)) if i not in test]
        splits.append((db.subset(train), db.subset(sorted(test))))
    return splits


def precision(rec: Collection[str], eval_part: Collection[str]) -> float:
    rec, eval_part = set(rec), set(eval_part)
    if not rec:
        raise ValueError("precision is undefined for an empty recommendation set")
    return len(rec & eval_part) / len(rec)


def coverage(rec: Collection[str], eval_part: Collection[str]) -> float:
    rec, eval_part = set(rec), set(eval_part)
    if not eval_part:
        raise ValueError("coverage is undefined for an empty evaluation set")
    return len(rec & eval_part) / len(eval_part)


@dataclass(frozen=True)
class EvalSplit:
    window: tuple[str, ...]
    eval_part: tuple[str, ...]

    @classmethod
    def of(cls, transaction: Sequence[str], n: int) -> "EvalSplit":
        return cls(tuple(transaction[:n]), tuple(transaction[n:]))


@dataclass(frozen=True)
class EvalRow:
    threshold: float
    precision: float  # nan when no transaction received a recommendation
    coverage: float
    n_scored: int
    n_skipped: int
    n_empty: int  # scored transactions with an empty Rec set (left out of precision)


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    folds: int
    window: int

    def to_table(self) -> str:
        out = [f"# folds={self.folds} window={self.window} "
               "empty Rec sets score coverage 0 and are left out of precision\n",
               "threshold\tprecision\tcoverage\tn_scored\tn_skipped\n"]
        for r in self.rows:
            p = "nan" if math.isnan(r.precision) else f"{r.precision:.6f}"
            out.append(f"{r.threshold:.2f}\t{p}\t{r.coverage:.6f}\t{r.n_scored}\t{r.n_skipped}\n")
        return "".join(out)


def _pages(instances, ann: AnnotationMap | None) -> set[str]:
    if ann is None:
        return set(instances)
    return {url for inst in instances for url in ann.pages_for(inst)}


def run_sweep(db: SequenceDatabase, ann: AnnotationMap | None, M: SemanticDistanceMatrix | None,
              params: MinerParams, n: int = DEFAULT_WINDOW, thresholds: Sequence[float] = (0.1,),
              *, folds: int = DEFAULT_FOLDS, seed: int = 0, min_conf: float = 0.0,
              max_results: int = DEFAULT_MAX_RESULTS, workers: int = 1) -> EvalReport:
    """k-fold precision/coverage for each recommendation threshold.

    Rules are mined on each training part. Every test transaction longer
    than ``n`` is split after its first ``n`` instances; the head drives the
    recommendation and the rest is the evaluation set, compared at page
    level. Per-threshold means are taken over a fold's transactions and then
    averaged over folds.
    """
    thresholds = list(thresholds)
    if thresholds != sorted(thresholds):
        raise ValueError("thresholds must be sorted ascending")

    fold_stats = []  # per fold: list of (precision_sum, precision_n, coverage_sum) per threshold
    scored = skipped = 0
    empty = [0] * len(thresholds)
    total_rules = 0
    for train, test in kfold_split(db, folds, seed):
        rb = generate_rules(onto_spm(train, M, params, workers), min_conf,
                            min_sup=params.min_sup, delta=params.delta)
        total_rules += len(rb)
        p_sum = [0.0] * len(thresholds)
        p_n = [0] * len(thresholds)
        c_sum = [0.0] * len(thresholds)
        t_scored = 0
        for items in test.item_sequences:
            if len(items) <= n:
                skipped += 1
                continue
            split = EvalSplit.of(items, n)
            eval_pages = _pages(split.eval_part, ann)
            if not eval_pages:
                skipped += 1
                continue
            t_scored += 1
            for t, thr in enumerate(thresholds):
                recs = recommend_instances(split.window, rb, ann, M, n, thr, max_results)
                rec_pages = {url for r in recs for url in r.pages}
                c_sum[t] += coverage(rec_pages, eval_pages)
                if rec_pages:
                    p_sum[t] += precision(rec_pages, eval_pages)
                    p_n[t] += 1
                else:
                    empty[t] += 1
        scored += t_scored
        if t_scored:
            fold_stats.append((p_sum, p_n, c_sum, t_scored))

    if scored == 0 or total_rules == 0:
        raise NoScorableTransactions(
            f"nothing to score: {scored} transaction(s) longer than the window, {total_rules} rule(s) mined")

    rows = []
    for t, thr in enumerate(thresholds):
        fold_p = [p_sum[t] / p_n[t] for p_sum, p_n, _, _ in fold_stats if p_n[t]]
        fold_c = [c_sum[t] / cnt for _, _, c_sum, cnt in fold_stats]
        rows.append(EvalRow(
            threshold=thr,
            precision=sum(fold_p) / len(fold_p) if fold_p else math.nan,
            coverage=sum(fold_c) / len(fold_c),
            n_scored=scored,
            n_skipped=skipped,
            n_empty=empty[t],
        ))
    return EvalReport(tuple(rows), folds, n)
