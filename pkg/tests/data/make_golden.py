"""Regenerate the golden preprocessing fixture.

    python tests/data/make_golden.py

Writes ``golden_mixed.log`` (1000 Combined Log Format lines) together with
the expected filter counts and session file. The expectations come from
the generator's own plan (which line is noise and why, where each session
starts) rather than from running the package.
"""

import hashlib
import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

HERE = Path(__file__).parent
TOTAL_LINES = 1000
TIMEOUT = 1800
MONTHS = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]

BROWSERS = [
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) Chrome/120.0",
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 13_5) Safari/605.1.15",
    "Mozilla/5.0 (X11; Linux x86_64; rv:121.0) Firefox/121.0",
    "Opera/9.80 (Windows NT 6.1) Presto/2.12",
]
CRAWLERS = [
    "Googlebot/2.1 (+http://www.google.com/bot.html)",
    "Mozilla/5.0 (compatible; bingbot/2.0)",
    "Mozilla/5.0 (compatible; Yahoo! Slurp)",
    "ExampleCrawler/1.0",
    "Sogou web spider/4.0",
]
# (raw request target, normalized path)
PAGES = [(f"/product/{k:03d}", f"/product/{k:03d}") for k in range(40)] + [
    ("/", "/"),
    ("/about/", "/about"),
    ("/search?q=red+shoes", "/search"),
    ("/category/shoes/?page=2", "/category/shoes"),
    ("/product/%41BC", "/product/ABC"),
    ("http://shop.test/product/007?ref=ad", "/product/007"),
]
ASSETS = ["/static/site.css", "/static/app.js", "/img/logo.png", "/img/hero.JPG", "/favicon.ico"]


def stamp(ts):
    return f"{ts.day:02d}/{MONTHS[ts.month - 1]}/{ts:%Y:%H:%M:%S} {ts:%z}"


def line(ip, ts, method, target, status, agent, size=1234, referrer="-"):
    return f'{ip} - - [{stamp(ts)}] "{method} {target} HTTP/1.1" {status} {size} "{referrer}" "{agent}"'


def main():
    rng = random.Random(20240601)
    base = datetime(2024, 6, 1, 8, 0, 0, tzinfo=timezone.utc)
    plus2 = timezone(timedelta(hours=2))

    users = []
    for u in range(28):
        ip = f"192.168.1.{10 + u}"
        users.append((ip, BROWSERS[u % len(BROWSERS)]))
    users.append(("192.168.1.10", "Mozilla/5.0 (iPad; CPU OS 17_0) Mobile/15E148"))  # shares an IP
    users.append(("10.0.0.5", BROWSERS[0]))

    records = []  # (utc time, tiebreak, text)
    sessions = []  # (start, user_key, ordinal, start_iso, [paths])
    counter = 0

    def add(ts, text):
        nonlocal counter
        records.append((ts.astimezone(timezone.utc), counter, text))
        counter += 1

    for u, (ip, agent) in enumerate(users):
        tz = plus2 if u == 3 else timezone.utc
        t = base + timedelta(seconds=rng.randrange(0, 6 * 3600))
        key = f"{ip} {agent}"
        for ordinal in range(rng.randint(1, 3)):
            if ordinal:
                # strictly more than the timeout; sometimes by one second
                t += timedelta(seconds=TIMEOUT + 1 if rng.random() < 0.3 else rng.randint(TIMEOUT + 2, 20000))
            start = t
            paths = []
            for view in range(rng.randint(1, 9)):
                if view:
                    t += timedelta(seconds=TIMEOUT if rng.random() < 0.1 else rng.randint(1, 900))
                raw, norm = rng.choice(PAGES)
                add(t.astimezone(tz), line(ip, t.astimezone(tz), "GET", raw, 200, agent))
                paths.append(norm)
            sessions.append((start, key, ordinal, start.astimezone(tz).isoformat(), paths))

    n_pages = len(records)
    noise_kinds = [
        ("status", lambda ip, ag, ts: line(ip, ts, "GET", rng.choice(PAGES)[0], rng.choice([404, 500, 304]), ag)),
        ("method", lambda ip, ag, ts: line(ip, ts, rng.choice(["POST", "HEAD"]), "/cart", 200, ag)),
        ("asset", lambda ip, ag, ts: line(ip, ts, "GET", rng.choice(ASSETS), 200, ag)),
        ("robots", lambda ip, ag, ts: line(ip, ts, "GET", "/robots.txt", 200, ag)),
    ]
    expected = {"status": 0, "method": 0, "asset": 0, "robots": 0, "crawler": 0}
    for k in range(TOTAL_LINES - n_pages):
        ts = base + timedelta(seconds=rng.randrange(0, 14 * 3600))
        if k % 3 == 0:
            # crawler traffic; its label is whatever rule fires first
            ip = f"66.249.66.{rng.randint(1, 254)}"
            agent = rng.choice(CRAWLERS)
            roll = rng.random()
            if roll < 0.15:
                add(ts, line(ip, ts, "GET", rng.choice(PAGES)[0], 404, agent))
                expected["status"] += 1
            elif roll < 0.3:
                add(ts, line(ip, ts, "GET", "/robots.txt", 200, agent))
                expected["robots"] += 1
            elif roll < 0.4:
                add(ts, line(ip, ts, "GET", rng.choice(ASSETS), 200, agent))
                expected["asset"] += 1
            else:
                add(ts, line(ip, ts, "GET", rng.choice(PAGES)[0], 200, agent))
                expected["crawler"] += 1
        else:
            ip, agent = rng.choice(users)
            reason, make = rng.choice(noise_kinds)
            add(ts, make(ip, agent, ts))
            expected[reason] += 1

    records.sort()
    texts = [text for *_, text in records]
    # real logs are only roughly ordered: swap a few neighbours
    for _ in range(25):
        i = rng.randrange(len(texts) - 1)
        texts[i], texts[i + 1] = texts[i + 1], texts[i]
    assert len(texts) == TOTAL_LINES

    sessions.sort(key=lambda s: (s[0], s[1], s[2]))
    session_lines = []
    for start, key, ordinal, iso, paths in sessions:
        sid = hashlib.sha1(key.encode()).hexdigest()[:12] + f".{ordinal}"
        session_lines.append(f"{sid}\t{key}\t{iso}\t{','.join(paths)}\n")

    expected_doc = {
        "lines": TOTAL_LINES,
        "removed": expected,
        "kept": n_pages,
        "sessions": len(sessions),
        "timeout": TIMEOUT,
    }
    (HERE / "golden_mixed.log").write_text("\n".join(texts) + "\n", encoding="utf-8")
    (HERE / "golden_sessions.tsv").write_text("".join(session_lines), encoding="utf-8")
    (HERE / "golden_expected.json").write_text(json.dumps(expected_doc, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
