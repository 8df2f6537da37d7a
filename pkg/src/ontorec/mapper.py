"""Turn url sessions into sequences of semantic objects (page, instance)."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from ontorec.errors import FileSyntaxError
from ontorec.logs import Session
from ontorec.ontology import AnnotationMap


class SemanticObject(NamedTuple):
    pg: str | None
    inst: str


@dataclass(frozen=True)
class SemanticSequence:
    session_id: str
    objects: tuple[SemanticObject, ...]

    def __post_init__(self):
        if not self.objects:
            raise ValueError("a semantic sequence needs at least one object")

    @property
    def items(self) -> tuple[str, ...]:
        return tuple(o.inst for o in self.objects)

    def __len__(self) -> int:
        return len(self.objects)


@dataclass(frozen=True)
class SequenceDatabase:
    sequences: tuple[SemanticSequence, ...] = ()

    @classmethod
    def from_item_lists(cls, item_lists: Iterable[Sequence[str]], prefix: str = "s") -> "SequenceDatabase":
        """Build a database straight from instance lists (no page information)."""
        seqs = tuple(
            SemanticSequence(f"{prefix}{k}", tuple(SemanticObject(None, i) for i in items))
            for k, items in enumerate(item_lists)
        )
        return cls(seqs)

    @cached_property
    def item_sequences(self) -> tuple[tuple[str, ...], ...]:
        return tuple(s.items for s in self.sequences)

    @cached_property
    def instance_universe(self) -> frozenset[str]:
        return frozenset(i for items in self.item_sequences for i in items)

    def subset(self, indices: Iterable[int]) -> "SequenceDatabase":
        return SequenceDatabase(tuple(self.sequences[k] for k in indices))

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)


def map_urls(urls: Iterable[str], ann: AnnotationMap, *, collapse_duplicates: bool = True) -> list[SemanticObject]:
    objects: list[SemanticObject] = []
    for url in urls:
        for inst in ann.get(url, ()):
            if collapse_duplicates and objects and objects[-1].inst == inst:
                continue
            objects.append(SemanticObject(url, inst))
    return objects


def map_session(s: Session, ann: AnnotationMap, *, collapse_duplicates: bool = True) -> SemanticSequence | None:
    """Map a session to its semantic objects; None when nothing is annotated."""
    objects = map_urls(s.urls, ann, collapse_duplicates=collapse_duplicates)
    return SemanticSequence(s.session_id, tuple(objects)) if objects else None


def build_sequence_database(sessions: Iterable[Session], ann: AnnotationMap, min_len: int = 2,
                            *, collapse_duplicates: bool = True) -> SequenceDatabase:
    if min_len < 1:
        raise ValueError("min_len must be at least 1")
    seqs = []
    for s in sessions:
        mapped = map_session(s, ann, collapse_duplicates=collapse_duplicates)
        if mapped is not None and len(mapped) >= min_len:
            seqs.append(mapped)
    return SequenceDatabase(tuple(seqs))


def format_sequence_database(db: SequenceDatabase) -> str:
    return "".join(f"{s.session_id}\t{' '.join(s.items)}\n" for s in db)


def read_sequence_database(text: str, source: str | None = None) -> SequenceDatabase:
    """Parse ``session_id<TAB>inst inst ...`` lines. Page urls are not stored in the file."""
    seqs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        sid, sep, rest = line.partition("\t")
        items = rest.split()
        if not sep or not items:
            raise FileSyntaxError("expected <session_id><TAB><instances>", source=source, lineno=lineno)
        seqs.append(SemanticSequence(sid, tuple(SemanticObject(None, i) for i in items)))
    return SequenceDatabase(tuple(seqs))
