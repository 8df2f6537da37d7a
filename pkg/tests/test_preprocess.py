"""Golden-fixture checks for parse -> clean -> sessionize."""

import json
from collections import defaultdict
from pathlib import Path

import pytest

from ontorec.logs import filter_entries, format_sessions, parse_log, read_sessions, sessionize

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def golden():
    lines = (DATA / "golden_mixed.log").read_text(encoding="utf-8").splitlines()
    expected = json.loads((DATA / "golden_expected.json").read_text(encoding="utf-8"))
    entries = list(parse_log(lines))
    kept, removed = filter_entries(entries)
    sessions = sessionize(kept, expected["timeout"])
    return lines, expected, entries, kept, removed, sessions


def test_line_and_filter_counts(golden):
    lines, expected, entries, kept, removed, _ = golden
    assert len(lines) == len(entries) == expected["lines"]
    assert {k: removed.get(k, 0) for k in expected["removed"]} == expected["removed"]
    assert len(kept) == expected["kept"]
    assert sum(removed.values()) + len(kept) == len(entries)


def test_session_file_matches_golden(golden):
    *_, sessions = golden
    assert format_sessions(sessions) == (DATA / "golden_sessions.tsv").read_text(encoding="utf-8")


def test_sessions_concatenate_to_cleaned_stream(golden):
    _, _, _, kept, _, sessions = golden
    by_user = defaultdict(list)
    for e in sorted(kept, key=lambda e: e.timestamp):
        by_user[e.user_key].append(e)
    rebuilt = defaultdict(list)
    for s in sorted(sessions, key=lambda s: s.start):
        rebuilt[s.user_key].extend(s.page_views)
    assert set(rebuilt) == set(by_user)
    for user, stream in by_user.items():
        assert rebuilt[user] == [(e.url, e.timestamp) for e in stream]


def test_session_file_round_trip(golden):
    *_, sessions = golden
    text = format_sessions(sessions)
    again = read_sessions(text)
    assert [s.session_id for s in again] == [s.session_id for s in sessions]
    assert [s.urls for s in again] == [s.urls for s in sessions]
    assert format_sessions(again) == text


def test_input_order_does_not_matter(golden):
    _, _, _, kept, _, sessions = golden
    assert format_sessions(sessionize(list(reversed(kept)), 1800)) == format_sessions(sessions)
