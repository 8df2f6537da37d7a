"""Level-wise sequential pattern mining with semantic-distance pruning.

Patterns are ordered lists of single instances. A sequence supports a
pattern when the pattern occurs in it in order, gaps allowed. Candidates of
length k come from joining frequent (k-1)-patterns GSP style, and a
candidate is discarded before support counting when the two items being
glued together are farther apart than ``delta`` in the distance matrix.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from collections.abc import Collection, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from ontorec.errors import EmptyDatabase, FileSyntaxError
from ontorec.mapper import SequenceDatabase
from ontorec.ontology import SemanticDistanceMatrix

Pattern = tuple[str, ...]

INFINITE = math.inf


@dataclass(frozen=True)
class MinerParams:
    min_sup: float
    delta: float = INFINITE
    max_len: int | None = None

    def __post_init__(self):
        if not 0 < self.min_sup <= 1:
            raise ValueError(f"min_sup must be in (0, 1], got {self.min_sup}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")
        if math.isfinite(self.delta) and self.delta != int(self.delta):
            raise ValueError(f"delta must be an integer or infinite, got {self.delta}")
        if self.max_len is not None and self.max_len < 1:
            raise ValueError(f"max_len must be positive, got {self.max_len}")

    def min_count(self, db_size: int) -> int:
        """Absolute support threshold: ceil(min_sup * |S|), at least 1."""
        # round() first so that e.g. 0.1 * 30 does not ceil to 4
        return max(1, math.ceil(round(self.min_sup * db_size, 9)))


@dataclass(frozen=True, order=True)
class FrequentSequence:
    items: Pattern
    support_count: int
    support: float

    def __len__(self) -> int:
        return len(self.items)


def is_subsequence(pattern: Sequence[str], sequence: Sequence[str]) -> bool:
    """True iff ``pattern`` occurs in ``sequence`` in order, not necessarily contiguously."""
    it = iter(sequence)
    return all(any(x == y for y in it) for x in pattern)


def _count_chunk(by_prefix: dict[Pattern, frozenset[str]], sequences: Sequence[Sequence[str]]) -> Counter:
    # Prefixes are indexed by their first item, so each sequence only visits
    # prefixes that can start inside it. For a prefix matched greedily ending
    # at position e, prefix + (x,) is contained iff x occurs after e.
    counts: Counter = Counter()
    empty_lasts = by_prefix.get(())
    by_first: dict[str, list[tuple[Pattern, frozenset[str]]]] = defaultdict(list)
    for prefix, lasts in by_prefix.items():
        if prefix:
            by_first[prefix[0]].append((prefix, lasts))

    for seq in sequences:
        last_pos: dict[str, int] = {}
        first_pos: dict[str, int] = {}
        for pos, item in enumerate(seq):
            last_pos[item] = pos
            first_pos.setdefault(item, pos)
        if empty_lasts:
            for x in empty_lasts.intersection(last_pos):
                counts[(x,)] += 1
        for head, start in first_pos.items():
            for prefix, lasts in by_first.get(head, ()):
                end = start
                for wanted in prefix[1:]:
                    end += 1
                    while end < len(seq) and seq[end] != wanted:
                        end += 1
                    if end >= len(seq):
                        break
                else:
                    if len(lasts) <= len(seq) - end - 1:
                        for x in lasts:
                            if last_pos.get(x, -1) > end:
                                counts[prefix + (x,)] += 1
                    else:
                        for x in set(seq[end + 1:]).intersection(lasts):
                            counts[prefix + (x,)] += 1
    return counts


def _chunks(seq: Sequence, n: int) -> list[Sequence]:
    size = math.ceil(len(seq) / n)
    return [seq[k:k + size] for k in range(0, len(seq), size)]


def count_support(candidates: Iterable[Sequence[str]], db: SequenceDatabase | Sequence[Sequence[str]],
                  workers: int = 1) -> dict[Pattern, int]:
    """Number of database sequences containing each candidate.

    With ``workers > 1`` the database is split across processes and the
    per-chunk counts summed, which gives the same integers as a serial run.
    """
    sequences = db.item_sequences if isinstance(db, SequenceDatabase) else tuple(map(tuple, db))
    cands = [tuple(c) for c in candidates]
    if any(not c for c in cands):
        raise ValueError("candidates must be non-empty")
    grouped: dict[Pattern, set[str]] = defaultdict(set)
    for c in cands:
        grouped[c[:-1]].add(c[-1])
    by_prefix = {p: frozenset(lasts) for p, lasts in grouped.items()}

    if workers > 1 and len(sequences) >= 2 * workers:
        total: Counter = Counter()
        parts = _chunks(sequences, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_count_chunk, [by_prefix] * len(parts), parts):
                total.update(part)
    else:
        total = _count_chunk(by_prefix, sequences)
    return {c: total.get(c, 0) for c in cands}


def _admissible(a: str, b: str, M: SemanticDistanceMatrix | None, delta: float) -> bool:
    if math.isinf(delta):
        return True
    return M.distance(a, b) <= delta


def apriori_join(prev: Iterable[FrequentSequence | Sequence[str]], M: SemanticDistanceMatrix | None,
                 delta: float = INFINITE, *, allow_repeats: bool = True,
                 prune_subsequences: bool = False) -> list[Pattern]:
    """Candidate k-patterns from the frequent (k-1)-patterns in ``prev``.

    P joins Q when P without its first item equals Q without its last item;
    the candidate is P followed by Q's last item, kept only if that glued
    pair is within ``delta``. The two contiguous (k-1)-windows of such a
    candidate are P and Q themselves, so they are always present.

    ``prune_subsequences`` additionally drops candidates having a
    single-middle-item deletion that is delta-admissible but missing from
    ``prev``. By anti-monotonicity such a candidate cannot be frequent, so
    this only saves counting work. Deletions creating an out-of-range pair
    are not required to be present.

    ``allow_repeats=False`` skips candidates whose glued pair is one
    instance twice. Such patterns can still be supported by sequences like
    a-b-a, so the miner leaves this on.
    """
    pats = sorted({tuple(p.items if isinstance(p, FrequentSequence) else p) for p in prev})
    if not pats:
        return []
    k = len(pats[0]) + 1
    if any(len(p) != k - 1 for p in pats):
        raise ValueError("all joined patterns must have the same length")
    if not math.isinf(delta) and M is None:
        raise ValueError("a distance matrix is required for finite delta")

    known = set(pats)
    by_head: dict[Pattern, list[Pattern]] = defaultdict(list)
    for q in pats:
        by_head[q[:-1]].append(q)

    out = []
    for p in pats:
        for q in by_head.get(p[1:], ()):
            a, b = p[-1], q[-1]
            if not allow_repeats and a == b:
                continue
            if not _admissible(a, b, M, delta):
                continue
            cand = p + (b,)
            if not prune_subsequences or all(
                not _admissible(cand[i - 1], cand[i + 1], M, delta)
                or cand[:i] + cand[i + 1:] in known
                for i in range(1, k - 1)
            ):
                out.append(cand)
    return out


def _frequent(counts: dict[Pattern, int], min_count: int, n: int) -> list[FrequentSequence]:
    return sorted(FrequentSequence(c, cnt, cnt / n) for c, cnt in counts.items() if cnt >= min_count)


def onto_spm(db: SequenceDatabase, M: SemanticDistanceMatrix | None, params: MinerParams,
             workers: int = 1) -> list[FrequentSequence]:
    """Mine all frequent, delta-admissible sequences of ``db``.

    ``M`` may be None when ``params.delta`` is infinite. The result is sorted
    by (length, items).
    """
    n = len(db)
    if n == 0:
        raise EmptyDatabase("cannot mine an empty sequence database")
    min_count = params.min_count(n)

    level = _frequent(count_support(((i,) for i in sorted(db.instance_universe)), db, workers),
                      min_count, n)
    found = list(level)
    k = 2
    while level and (params.max_len is None or k <= params.max_len):
        candidates = apriori_join(level, M, params.delta, prune_subsequences=True)
        if not candidates:
            break
        level = _frequent(count_support(candidates, db, workers), min_count, n)
        found.extend(level)
        k += 1
    found.sort(key=lambda f: (len(f.items), f.items))
    return found


def format_frequents(frequents: Collection[FrequentSequence]) -> str:
    return "".join(f"{' '.join(f.items)}\t{f.support_count}\t{f.support!r}\n" for f in frequents)


def read_frequents(text: str, source: str | None = None) -> list[FrequentSequence]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        try:
            items, count, support = fields
            out.append(FrequentSequence(tuple(items.split()), int(count), float(support)))
        except ValueError:
            raise FileSyntaxError("expected <items><TAB><count><TAB><support>",
                                  source=source, lineno=lineno) from None
    return out
