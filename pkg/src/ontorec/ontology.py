"""Domain ontology, page annotations and instance-level semantic distance."""

from __future__ import annotations

import math
from collections import defaultdict, deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from ontorec.errors import CycleError, DanglingReference, FileSyntaxError, UnknownConcept
from ontorec.logs import normalize_url

#: Distance between concepts with no connecting is-a path. Compares greater
#: than any finite bound, so a finite ``delta`` always prunes it.
UNREACHABLE = math.inf


@dataclass(frozen=True)
class Ontology:
    concepts: frozenset[str]
    is_a: frozenset[tuple[str, str]] = frozenset()
    relations: frozenset[tuple[str, str, str]] = frozenset()
    axioms: tuple[str, ...] = ()
    instances: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        _validate(self)

    def concept_of(self, instance: str) -> str:
        return self.instances[instance]

    def neighbours(self) -> dict[str, set[str]]:
        """Undirected adjacency over the is-a edges."""
        adj: dict[str, set[str]] = {c: set() for c in self.concepts}
        for child, parent in self.is_a:
            adj[child].add(parent)
            adj[parent].add(child)
        return adj


def _validate(o: Ontology) -> None:
    for child, parent in sorted(o.is_a):
        for c in (child, parent):
            if c not in o.concepts:
                raise DanglingReference(f"is-a edge {child} -> {parent} names unknown concept {c!r}")
    for name, src, dst in sorted(o.relations):
        for c in (src, dst):
            if c not in o.concepts:
                raise DanglingReference(f"relation {name} names unknown concept {c!r}")
    for inst, concept in sorted(o.instances.items()):
        if concept not in o.concepts:
            raise DanglingReference(f"instance {inst!r} has unknown concept {concept!r}")
    _check_acyclic(o.concepts, o.is_a)


def _check_acyclic(concepts: Iterable[str], edges: Iterable[tuple[str, str]]) -> None:
    parents: dict[str, list[str]] = defaultdict(list)
    indegree = {c: 0 for c in concepts}
    for child, parent in edges:
        parents[child].append(parent)
        indegree[parent] += 1
    queue = deque(c for c, d in indegree.items() if d == 0)
    seen = 0
    while queue:
        c = queue.popleft()
        seen += 1
        for p in parents[c]:
            indegree[p] -= 1
            if indegree[p] == 0:
                queue.append(p)
    if seen != len(indegree):
        stuck = sorted(c for c, d in indegree.items() if d > 0)
        raise CycleError(f"is-a cycle through {', '.join(stuck)}")


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def load_ontology(text: str, source: str | None = None) -> Ontology:
    """Parse the line-oriented ontology format.

    One declaration per line::

        concept <id>
        isa <child> <parent>
        rel <name> <src> <dst>
        axiom <free text>
        instance <id> <concept>
    """
    concepts: set[str] = set()
    is_a: set[tuple[str, str]] = set()
    relations: set[tuple[str, str, str]] = set()
    axioms: list[str] = []
    instances: dict[str, str] = {}
    arity = {"concept": 1, "isa": 2, "rel": 3, "instance": 2}

    for lineno, line in _content_lines(text):
        keyword, _, rest = line.partition(" ")
        if keyword == "axiom":
            if not rest.strip():
                raise FileSyntaxError("empty axiom", source=source, lineno=lineno)
            axioms.append(rest.strip())
            continue
        args = rest.split()
        if keyword not in arity:
            raise FileSyntaxError(f"unknown declaration {keyword!r}", source=source, lineno=lineno)
        if len(args) != arity[keyword]:
            raise FileSyntaxError(f"{keyword} takes {arity[keyword]} argument(s), got {len(args)}",
                                  source=source, lineno=lineno)
        if keyword == "concept":
            concepts.add(args[0])
        elif keyword == "isa":
            is_a.add((args[0], args[1]))
        elif keyword == "rel":
            relations.add((args[0], args[1], args[2]))
        else:
            inst, concept = args
            if instances.get(inst, concept) != concept:
                raise FileSyntaxError(f"instance {inst!r} declared with two concepts",
                                      source=source, lineno=lineno)
            instances[inst] = concept

    return Ontology(frozenset(concepts), frozenset(is_a), frozenset(relations), tuple(axioms), instances)


def serialize_ontology(o: Ontology) -> str:
    """Canonical text form; ``load_ontology(serialize_ontology(o)) == o``."""
    lines = [f"concept {c}" for c in sorted(o.concepts)]
    lines += [f"isa {c} {p}" for c, p in sorted(o.is_a)]
    lines += [f"rel {n} {s} {d}" for n, s, d in sorted(o.relations)]
    lines += [f"axiom {a}" for a in o.axioms]
    lines += [f"instance {i} {c}" for i, c in sorted(o.instances.items())]
    return "\n".join(lines) + "\n"


def _bfs(adj: Mapping[str, set[str]], start: str) -> dict[str, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for n in adj[c]:
            if n not in dist:
                dist[n] = dist[c] + 1
                queue.append(n)
    return dist


def concept_distance(o: Ontology, c1: str, c2: str) -> float:
    """Number of is-a edges on the shortest undirected path, or UNREACHABLE."""
    for c in (c1, c2):
        if c not in o.concepts:
            raise UnknownConcept(f"unknown concept {c!r}")
    if c1 == c2:
        return 0
    return _bfs(o.neighbours(), c1).get(c2, UNREACHABLE)


class SemanticDistanceMatrix:
    """Pairwise distances between instances.

    Instances map to rows of a square table, and several instances may share
    a row (all instances of one concept do). Unreachable pairs hold ``inf``.
    """

    def __init__(self, rows: Mapping[str, int], table: np.ndarray):
        table = np.asarray(table, dtype=float)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise ValueError("distance table must be square")
        if not np.array_equal(table, table.T):
            raise ValueError("distance table must be symmetric")
        if np.any(np.diag(table) != 0) or np.any(table < 0):
            raise ValueError("distance table needs a zero diagonal and non-negative entries")
        self._rows = dict(rows)
        self._table = table
        self._table.setflags(write=False)

    @classmethod
    def from_pairs(cls, instances: Iterable[str], pairs: Mapping[tuple[str, str], float],
                   default: float = UNREACHABLE) -> "SemanticDistanceMatrix":
        """Build from explicit ``{(i, j): d}`` entries; missing pairs get ``default``."""
        names = sorted(set(instances))
        rows = {n: k for k, n in enumerate(names)}
        table = np.full((len(names), len(names)), float(default))
        np.fill_diagonal(table, 0.0)
        for (a, b), d in pairs.items():
            if a != b:
                table[rows[a], rows[b]] = table[rows[b], rows[a]] = d
        return cls(rows, table)

    @property
    def instances(self) -> list[str]:
        return sorted(self._rows)

    @property
    def size(self) -> int:
        return len(self._rows)

    def __contains__(self, instance: str) -> bool:
        return instance in self._rows

    def distance(self, a: str, b: str) -> float:
        d = self._table[self._rows[a], self._rows[b]]
        return int(d) if math.isfinite(d) else UNREACHABLE

    def __getitem__(self, pair: tuple[str, str]) -> float:
        return self.distance(*pair)

    def max_finite(self) -> int:
        finite = self._table[np.isfinite(self._table)]
        return int(finite.max()) if finite.size else 0


def build_distance_matrix(o: Ontology) -> SemanticDistanceMatrix:
    """Instance distances implied by the concept hierarchy (a cache of concept_distance)."""
    used = sorted(set(o.instances.values()))
    index = {c: k for k, c in enumerate(used)}
    adj = o.neighbours()
    table = np.full((len(used), len(used)), UNREACHABLE)
    for c in used:
        for other, d in _bfs(adj, c).items():
            if other in index:
                table[index[c], index[other]] = d
    rows = {inst: index[c] for inst, c in o.instances.items()}
    return SemanticDistanceMatrix(rows, table)


# -- annotations ------------------------------------------------------------

class AnnotationMap(Mapping[str, tuple[str, ...]]):
    """Normalized url -> ordered instance ids, plus the inverse page index."""

    def __init__(self, pages: Mapping[str, Iterable[str]]):
        self._pages = {url: tuple(insts) for url, insts in pages.items()}
        inverse: dict[str, list[str]] = defaultdict(list)
        for url, insts in self._pages.items():
            for inst in dict.fromkeys(insts):
                inverse[inst].append(url)
        self._inverse = {inst: tuple(sorted(urls)) for inst, urls in inverse.items()}

    def __getitem__(self, url: str) -> tuple[str, ...]:
        return self._pages[url]

    def __iter__(self):
        return iter(self._pages)

    def __len__(self) -> int:
        return len(self._pages)

    def pages_for(self, instance: str) -> tuple[str, ...]:
        """Every url annotated with ``instance``, sorted."""
        return self._inverse.get(instance, ())

    @property
    def instances(self) -> frozenset[str]:
        return frozenset(self._inverse)


def load_annotations(text: str, o: Ontology, source: str | None = None) -> AnnotationMap:
    """Parse ``<url><TAB><inst>(,<inst>)*`` lines; urls are normalized on load."""
    pages: dict[str, tuple[str, ...]] = {}
    for lineno, line in _content_lines(text):
        url, sep, rest = line.partition("\t")
        if not sep or not rest.strip():
            raise FileSyntaxError("expected <url><TAB><instance list>", source=source, lineno=lineno)
        insts = tuple(i.strip() for i in rest.split(","))
        if any(not i for i in insts):
            raise FileSyntaxError("empty instance id", source=source, lineno=lineno)
        for inst in insts:
            if inst not in o.instances:
                raise DanglingReference(f"undeclared instance {inst!r}", source=source, lineno=lineno)
        try:
            key = normalize_url(url.strip())
        except ValueError:
            raise FileSyntaxError(f"bad url {url!r}", source=source, lineno=lineno) from None
        if key in pages:
            raise FileSyntaxError(f"url {key!r} annotated twice", source=source, lineno=lineno)
        pages[key] = insts
    return AnnotationMap(pages)


def format_annotations(ann: AnnotationMap) -> str:
    return "".join(f"{url}\t{','.join(ann[url])}\n" for url in sorted(ann))
