"""Access-log parsing, noise removal and sessionization."""

from __future__ import annotations

import hashlib
import re
from collections import Counter, defaultdict
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from urllib.parse import unquote, urlsplit

from ontorec.errors import BadStatus, BadTimestamp, FileSyntaxError, LogParseError, MalformedLine

LOG_FORMATS = ("common", "combined")

DEFAULT_ASSET_SUFFIXES = (".css", ".js", ".gif", ".png", ".jpg", ".jpeg", ".ico", ".svg", ".woff")
DEFAULT_CRAWLER_KEYWORDS = ("bot", "crawler", "spider", "slurp")
DEFAULT_TIMEOUT = 1800.0

# host ident authuser [date] "request" status bytes
_COMMON = r'(?P<host>\S+) (?P<ident>\S+) (?P<user>\S+) \[(?P<time>[^\]]*)\] "(?P<request>(?:[^"\\]|\\.)*)" (?P<status>\S+) (?P<bytes>\S+)'
_COMBINED = _COMMON + r' "(?P<referrer>(?:[^"\\]|\\.)*)" "(?P<agent>(?:[^"\\]|\\.)*)"'

_PATTERNS = {
    "common": re.compile(r"^" + _COMMON + r"\s*$"),
    "combined": re.compile(r"^" + _COMBINED + r"\s*$"),
}

_MONTHS = {m: i for i, m in enumerate(
    ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"), start=1)}
_TIME_RE = re.compile(r"^(\d{2})/([A-Za-z]{3})/(\d{4}):(\d{2}):(\d{2}):(\d{2}) ([+-])(\d{2})(\d{2})$")


@dataclass(frozen=True)
class LogEntry:
    client_id: str
    user_agent: str
    timestamp: datetime
    method: str
    url: str
    status: int
    bytes: int | None = None
    referrer: str | None = None

    @property
    def user_key(self) -> str:
        """Client address plus full user-agent string."""
        return f"{self.client_id} {self.user_agent}" if self.user_agent else self.client_id


@dataclass(frozen=True)
class Session:
    session_id: str
    user_key: str
    page_views: tuple[tuple[str, datetime], ...]

    def __post_init__(self):
        if not self.page_views:
            raise ValueError("a session needs at least one page view")

    @property
    def urls(self) -> tuple[str, ...]:
        return tuple(url for url, _ in self.page_views)

    @property
    def start(self) -> datetime:
        return self.page_views[0][1]


def parse_timestamp(text: str) -> datetime:
    """Parse ``10/Oct/2000:13:55:36 -0700`` without depending on the C locale."""
    m = _TIME_RE.match(text.strip())
    if not m:
        raise BadTimestamp(f"unparseable timestamp {text!r}")
    day, mon, year, hh, mm, ss, sign, oh, om = m.groups()
    month = _MONTHS.get(mon.capitalize())
    if month is None:
        raise BadTimestamp(f"unknown month {mon!r}")
    offset = timedelta(hours=int(oh), minutes=int(om))
    if sign == "-":
        offset = -offset
    try:
        return datetime(int(year), month, int(day), int(hh), int(mm), int(ss),
                        tzinfo=timezone(offset))
    except ValueError as exc:
        raise BadTimestamp(f"invalid timestamp {text!r}: {exc}") from None


def normalize_url(target: str, *, strip_query: bool = True) -> str:
    """Reduce a request target to a comparable path.

    Absolute-form targets lose their scheme and host. The query string and
    fragment are dropped (when ``strip_query``), percent-escapes decoded and
    a trailing slash removed everywhere except the root.
    """
    if not target:
        raise MalformedLine("empty request target")
    parts = urlsplit(target)
    path = unquote(parts.path)
    if not path:
        path = "/"
    if not path.startswith("/"):
        raise MalformedLine(f"request target {target!r} is not a path")
    path = path.rstrip("/") or "/"
    if not strip_query and parts.query:
        path = f"{path}?{parts.query}"
    return path


def parse_log_line(line: str, format: str = "combined", *, strip_query: bool = True) -> LogEntry:
    """Parse one Common or Combined Log Format line."""
    if format not in _PATTERNS:
        raise ValueError(f"unknown log format {format!r}; expected one of {LOG_FORMATS}")
    m = _PATTERNS[format].match(line.rstrip("\r\n"))
    if m is None:
        raise MalformedLine(f"line does not match the {format} log format")

    request = m.group("request").split()
    if len(request) == 3:
        method, target, _protocol = request
    elif len(request) == 2:  # HTTP/0.9 style, no protocol token
        method, target = request
    else:
        raise MalformedLine(f"bad request field {m.group('request')!r}")

    timestamp = parse_timestamp(m.group("time"))

    raw_status = m.group("status")
    if not raw_status.isdigit() or not 100 <= int(raw_status) <= 599:
        raise BadStatus(f"bad status {raw_status!r}")

    raw_bytes = m.group("bytes")
    if raw_bytes == "-":
        size = None
    elif raw_bytes.isdigit():
        size = int(raw_bytes)
    else:
        raise MalformedLine(f"bad byte count {raw_bytes!r}")

    referrer = agent = None
    if format == "combined":
        referrer = m.group("referrer")
        referrer = None if referrer in ("", "-") else referrer
        agent = m.group("agent")

    return LogEntry(
        client_id=m.group("host"),
        user_agent="" if agent in (None, "-") else agent,
        timestamp=timestamp,
        method=method.upper(),
        url=normalize_url(target, strip_query=strip_query),
        status=int(raw_status),
        bytes=size,
        referrer=referrer,
    )


def parse_log(lines: Iterable[str], format: str = "combined", *, source: str | None = None,
              skip_malformed: bool = False, strip_query: bool = True,
              errors: Counter | None = None) -> Iterator[LogEntry]:
    """Parse an iterable of log lines, attaching file/line context to failures.

    Blank lines are ignored. With ``skip_malformed`` bad lines are counted
    into ``errors`` (keyed by error code) instead of raising.
    """
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            yield parse_log_line(line, format, strip_query=strip_query)
        except LogParseError as exc:
            if not skip_malformed:
                raise exc.with_context(source, lineno) from None
            if errors is not None:
                errors[exc.code] += 1


# -- cleaning ---------------------------------------------------------------

# Order matters: an entry failing several predicates is attributed to the first.
REMOVAL_REASONS = ("status", "method", "asset", "robots", "crawler")


def removal_reason(entry: LogEntry, asset_suffixes: Sequence[str] = DEFAULT_ASSET_SUFFIXES,
                   crawler_keywords: Sequence[str] = DEFAULT_CRAWLER_KEYWORDS) -> str | None:
    """Name of the first retention predicate ``entry`` fails, or None if kept."""
    if entry.status != 200:
        return "status"
    if entry.method != "GET":
        return "method"
    path = entry.url.lower()
    if path.endswith(tuple(s.lower() for s in asset_suffixes)):
        return "asset"
    if path == "/robots.txt":
        return "robots"
    agent = entry.user_agent.lower()
    if any(k.lower() in agent for k in crawler_keywords):
        return "crawler"
    return None


def filter_entries(entries: Iterable[LogEntry], asset_suffixes: Sequence[str] = DEFAULT_ASSET_SUFFIXES,
                   crawler_keywords: Sequence[str] = DEFAULT_CRAWLER_KEYWORDS,
                   ) -> tuple[list[LogEntry], Counter]:
    """Like :func:`clean_entries` but also return removal counts per reason."""
    kept: list[LogEntry] = []
    removed: Counter = Counter({reason: 0 for reason in REMOVAL_REASONS})
    for entry in entries:
        reason = removal_reason(entry, asset_suffixes, crawler_keywords)
        if reason is None:
            kept.append(entry)
        else:
            removed[reason] += 1
    return kept, removed


def clean_entries(entries: Iterable[LogEntry], asset_suffixes: Sequence[str] = DEFAULT_ASSET_SUFFIXES,
                  crawler_keywords: Sequence[str] = DEFAULT_CRAWLER_KEYWORDS) -> list[LogEntry]:
    """Keep successful GET page requests made by (apparent) humans."""
    return filter_entries(entries, asset_suffixes, crawler_keywords)[0]


# -- sessionization ---------------------------------------------------------

def session_id_for(user_key: str, ordinal: int) -> str:
    digest = hashlib.sha1(user_key.encode("utf-8")).hexdigest()[:12]
    return f"{digest}.{ordinal}"


def _entry_order(entry: LogEntry):
    # full ordering so that the result does not depend on input order
    return (entry.timestamp, entry.url, entry.method, entry.status, entry.bytes or 0, entry.referrer or "")


def sessionize(entries: Iterable[LogEntry], timeout: float | timedelta = DEFAULT_TIMEOUT) -> list[Session]:
    """Split each user's page views into sessions at gaps longer than ``timeout``.

    Sessions come back ordered by start time, then user key, then ordinal.
    """
    limit = timeout if isinstance(timeout, timedelta) else timedelta(seconds=timeout)
    if limit < timedelta(0):
        raise ValueError("timeout must be non-negative")

    by_user: dict[str, list[LogEntry]] = defaultdict(list)
    for entry in entries:
        by_user[entry.user_key].append(entry)

    sessions: list[tuple[datetime, str, int, Session]] = []
    for user_key, visits in by_user.items():
        visits.sort(key=_entry_order)
        chunks: list[list[LogEntry]] = [[visits[0]]]
        for prev, cur in zip(visits, visits[1:]):
            if cur.timestamp - prev.timestamp > limit:
                chunks.append([])
            chunks[-1].append(cur)
        for ordinal, chunk in enumerate(chunks):
            views = tuple((e.url, e.timestamp) for e in chunk)
            s = Session(session_id_for(user_key, ordinal), user_key, views)
            sessions.append((s.start, user_key, ordinal, s))
    sessions.sort(key=lambda t: t[:3])
    return [s for *_, s in sessions]


# -- session file -----------------------------------------------------------

def _escape_url(url: str) -> str:
    return url.replace("%", "%25").replace(",", "%2C").replace("\t", "%09").replace("\n", "%0A")


def _escape_field(text: str) -> str:
    return text.replace("\t", " ").replace("\n", " ")


def format_sessions(sessions: Iterable[Session]) -> str:
    """Render sessions as ``session_id, user_key, first_visit, urls`` TSV lines."""
    out = []
    for s in sessions:
        urls = ",".join(_escape_url(u) for u in s.urls)
        out.append(f"{s.session_id}\t{_escape_field(s.user_key)}\t{s.start.isoformat()}\t{urls}\n")
    return "".join(out)


def read_sessions(text: str, source: str | None = None) -> list[Session]:
    """Parse a session file.

    The file keeps only the first-visit timestamp, so every page view of a
    loaded session carries that timestamp.
    """
    sessions = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4 or not fields[3]:
            raise FileSyntaxError("expected 4 tab-separated fields", source=source, lineno=lineno)
        sid, user_key, first, urls = fields
        try:
            ts = datetime.fromisoformat(first)
        except ValueError:
            raise FileSyntaxError(f"bad timestamp {first!r}", source=source, lineno=lineno) from None
        views = tuple((unquote(u), ts) for u in urls.split(","))
        sessions.append(Session(sid, user_key, views))
    return sessions
