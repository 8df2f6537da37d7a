"""Sequential association rules and next-page recommendation."""

from __future__ import annotations

import math
import re
from collections import defaultdict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from ontorec.errors import EmptyHistory, FileSyntaxError, FormatVersionMismatch, MissingPrefixSupport
from ontorec.logs import normalize_url
from ontorec.mapper import map_urls
from ontorec.miner import FrequentSequence, Pattern
from ontorec.ontology import UNREACHABLE, AnnotationMap, SemanticDistanceMatrix

RULE_FORMAT_VERSION = "v1"
DEFAULT_MAX_RESULTS = 10

_HEADER_RE = re.compile(r"^#ontorec-rules (\S+)(.*)$")


@dataclass(frozen=True, order=True)
class SequentialRule:
    antecedent: Pattern
    consequent: str
    rule_support: float
    confidence: float

    def __post_init__(self):
        if not self.antecedent:
            raise ValueError("rule antecedent must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")


@dataclass(frozen=True)
class Recommendation:
    pages: tuple[str, ...]
    instance: str
    confidence: float
    matched_antecedent_length: int
    tiebreak_distance: float


class RuleBase:
    """Rules indexed by exact antecedent, plus the parameters that produced them."""

    def __init__(self, rules: Iterable[SequentialRule] = (), *, min_sup: float | None = None,
                 delta: float = math.inf, min_conf: float = 0.0):
        ordered = sorted(rules, key=lambda r: (r.antecedent, r.consequent))
        for a, b in zip(ordered, ordered[1:]):
            if (a.antecedent, a.consequent) == (b.antecedent, b.consequent):
                raise ValueError(f"duplicate rule {a.antecedent} -> {a.consequent}")
        self.rules: tuple[SequentialRule, ...] = tuple(ordered)
        self.min_sup = min_sup
        self.delta = delta
        self.min_conf = min_conf
        index: dict[Pattern, list[SequentialRule]] = defaultdict(list)
        for r in self.rules:
            index[r.antecedent].append(r)
        self._index = {k: tuple(v) for k, v in index.items()}

    def matching(self, antecedent: Sequence[str]) -> tuple[SequentialRule, ...]:
        return self._index.get(tuple(antecedent), ())

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RuleBase):
            return NotImplemented
        return (self.rules, self.min_sup, self.delta, self.min_conf) == (
            other.rules, other.min_sup, other.delta, other.min_conf)

    def __repr__(self) -> str:
        return f"RuleBase({len(self.rules)} rules, min_sup={self.min_sup}, delta={self.delta}, min_conf={self.min_conf})"


def generate_rules(frequents: Iterable[FrequentSequence], min_conf: float = 0.0, *,
                   min_sup: float | None = None, delta: float = math.inf) -> RuleBase:
    """One rule ``prefix -> last item`` per frequent sequence of length >= 2.

    Confidence is the ratio of the two support counts. ``min_sup`` and
    ``delta`` are recorded on the rule base for provenance only.
    """
    if not 0.0 <= min_conf <= 1.0:
        raise ValueError(f"min_conf must be in [0, 1], got {min_conf}")
    frequents = list(frequents)
    counts = {f.items: f.support_count for f in frequents}
    rules = []
    for f in frequents:
        if len(f.items) < 2:
            continue
        prefix = f.items[:-1]
        if prefix not in counts:
            raise MissingPrefixSupport(f"no support recorded for prefix {' '.join(prefix)}")
        confidence = f.support_count / counts[prefix]
        if confidence >= min_conf:
            rules.append(SequentialRule(prefix, f.items[-1], f.support, confidence))
    return RuleBase(rules, min_sup=min_sup, delta=delta, min_conf=min_conf)


# -- persistence ------------------------------------------------------------

def _fmt_delta(delta: float) -> str:
    return "inf" if math.isinf(delta) else str(int(delta))


def parse_delta(text: str) -> float:
    """``"inf"`` or a non-negative integer."""
    text = text.strip().lower()
    if text in ("inf", "infinite", "infinity"):
        return math.inf
    value = int(text)
    if value < 0:
        raise ValueError("delta must be non-negative")
    return value


def format_rulebase(rb: RuleBase) -> str:
    min_sup = "none" if rb.min_sup is None else repr(rb.min_sup)
    lines = [f"#ontorec-rules {RULE_FORMAT_VERSION} min_sup={min_sup} delta={_fmt_delta(rb.delta)} "
             f"min_conf={rb.min_conf!r}\n"]
    for r in rb.rules:
        lines.append(f"{' '.join(r.antecedent)}\t{r.consequent}\t{r.rule_support!r}\t{r.confidence!r}\n")
    return "".join(lines)


def parse_rulebase(text: str, source: str | None = None) -> RuleBase:
    lines = text.splitlines()
    m = _HEADER_RE.match(lines[0]) if lines else None
    if m is None:
        raise FileSyntaxError("missing '#ontorec-rules' header", source=source, lineno=1)
    if m.group(1) != RULE_FORMAT_VERSION:
        raise FormatVersionMismatch(f"rule file version {m.group(1)!r}, expected {RULE_FORMAT_VERSION!r}",
                                    source=source, lineno=1)
    try:
        params = dict(tok.split("=", 1) for tok in m.group(2).split())
        min_sup = None if params["min_sup"] == "none" else float(params["min_sup"])
        delta = parse_delta(params["delta"])
        min_conf = float(params["min_conf"])
    except (KeyError, ValueError):
        raise FileSyntaxError("bad generation parameters in header", source=source, lineno=1) from None

    rules = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        try:
            antecedent, consequent, support, confidence = fields
            rules.append(SequentialRule(tuple(antecedent.split()), consequent.strip(),
                                        float(support), float(confidence)))
        except ValueError:
            raise FileSyntaxError("expected <antecedent><TAB><consequent><TAB><support><TAB><confidence>",
                                  source=source, lineno=lineno) from None
    try:
        return RuleBase(rules, min_sup=min_sup, delta=delta, min_conf=min_conf)
    except ValueError as exc:
        raise FileSyntaxError(str(exc), source=source) from None


def save_rulebase(rb: RuleBase, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_rulebase(rb))


def load_rulebase(path) -> RuleBase:
    with open(path, encoding="utf-8") as fh:
        return parse_rulebase(fh.read(), source=str(path))


# -- recommendation ---------------------------------------------------------

def _distance(M: SemanticDistanceMatrix | None, a: str, b: str) -> float:
    if M is None or a not in M or b not in M:
        return UNREACHABLE
    return M.distance(a, b)


def recommend_instances(history: Sequence[str], rb: RuleBase, ann: AnnotationMap | None,
                        M: SemanticDistanceMatrix | None, n: int = 2, threshold: float = 0.0,
                        k: int = DEFAULT_MAX_RESULTS) -> list[Recommendation]:
    """Rank next-step instances for an instance history (most recent last).

    The search pattern starts as the most recent instance and grows backwards
    by one instance per round, for at most ``n`` rounds. Rules whose
    antecedent equals the pattern and whose confidence reaches ``threshold``
    are collected; a consequent found by several rules keeps its best entry.
    Ranking: confidence descending, then semantic distance from the most
    recent instance to the consequent, then consequent id. Consequents
    already inside the window are dropped. When ``ann`` is None the instance
    id stands in for its page.
    """
    if n < 1:
        raise ValueError("window count n must be at least 1")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    if not history:
        raise EmptyHistory("no visited page maps to an ontology instance")

    window = tuple(history[-n:])
    seen = set(window)
    best: dict[str, tuple] = {}
    for length in range(1, len(window) + 1):
        pattern = window[-length:]
        for rule in rb.matching(pattern):
            if rule.confidence < threshold or rule.consequent in seen:
                continue
            dist = _distance(M, pattern[-1], rule.consequent)
            key = (-rule.confidence, dist, -length)
            if rule.consequent not in best or key < best[rule.consequent][0]:
                best[rule.consequent] = (key, rule, length, dist)

    ranked = sorted(best.values(), key=lambda v: (v[0][0], v[0][1], v[1].consequent))
    out = []
    for _key, rule, length, dist in ranked:
        pages = ann.pages_for(rule.consequent) if ann is not None else (rule.consequent,)
        if not pages:
            continue
        out.append(Recommendation(pages, rule.consequent, rule.confidence, length, dist))
        if len(out) == k:
            break
    return out


def recommend(active: Sequence[str], rb: RuleBase, ann: AnnotationMap, M: SemanticDistanceMatrix | None,
              n: int = 2, threshold: float = 0.0, k: int = DEFAULT_MAX_RESULTS) -> list[Recommendation]:
    """Recommend pages for an active session given as visited urls, oldest first."""
    history = [o.inst for o in map_urls((normalize_url(u) for u in active), ann)]
    return recommend_instances(history, rb, ann, M, n, threshold, k)
