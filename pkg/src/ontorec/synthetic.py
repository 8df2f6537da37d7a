"""Seeded synthetic shop: ontology, page annotations and a Combined-format access log.

The site has ``product_count`` products spread over ``category_count``
categories, one page per product. Visitors walk between product pages,
staying inside the current category with probability 0.7. Category and
product popularity follow a Zipf law so that some navigation pairs are
common enough to be frequent at low support thresholds.

Concept hierarchy (three levels)::

    Product <- Category_NN <- ProductConcept_NNN

so two products of one category are 2 edges apart and products of
different categories 4 edges apart. Side concepts (Supplier, Order, ...)
are linked by relations only and never enter distances.
"""

from __future__ import annotations

import random
from bisect import bisect
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from itertools import accumulate

INTRA_CATEGORY_PROB = 0.7
CRAWLER_FRACTION = 0.05
SITE = "http://shop.example.test"

_MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
_START = datetime(2024, 3, 4, 0, 0, 0, tzinfo=timezone.utc)
_SPAN = timedelta(days=14)

_BROWSERS = (
    "Mozilla/5.0 (Windows NT 10.0; Win64; x64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/122.0 Safari/537.36",
    "Mozilla/5.0 (Macintosh; Intel Mac OS X 14_3) AppleWebKit/605.1.15 (KHTML, like Gecko) Version/17.3 Safari/605.1.15",
    "Mozilla/5.0 (X11; Linux x86_64; rv:123.0) Gecko/20100101 Firefox/123.0",
    "Mozilla/5.0 (iPhone; CPU iPhone OS 17_3 like Mac OS X) AppleWebKit/605.1.15 (KHTML, like Gecko) Mobile/15E148",
    "Mozilla/5.0 (Linux; Android 14; Pixel 8) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/122.0 Mobile Safari/537.36",
)
_CRAWLERS = (
    "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)",
    "Mozilla/5.0 (compatible; bingbot/2.0; +http://www.bing.com/bingbot.htm)",
    "Mozilla/5.0 (compatible; Yahoo! Slurp; http://help.yahoo.com/help/us/ysearch/slurp)",
    "Baiduspider+(+http://www.baidu.com/search/spider.htm)",
)
_SIDE_CONCEPTS = ("Supplier", "ProductCategory", "Order", "Purchase", "Warehouse")
_RELATIONS = (
    ("suppliedBy", "Product", "Supplier"),
    ("belongsTo", "Product", "ProductCategory"),
    ("contains", "Order", "Product"),
    ("fulfils", "Purchase", "Order"),
    ("storedIn", "Product", "Warehouse"),
)


@dataclass(frozen=True)
class SyntheticConfig:
    product_count: int = 300
    category_count: int = 60
    session_count: int = 1600
    mean_session_length: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if min(self.product_count, self.category_count, self.session_count) <= 0:
            raise ValueError("synthetic counts must be positive")
        if self.category_count > self.product_count:
            raise ValueError("category_count cannot exceed product_count")
        if self.mean_session_length < 1:
            raise ValueError("mean_session_length must be at least 1")


@dataclass(frozen=True)
class SyntheticCorpus:
    ontology: str
    annotations: str
    log: str
    sessions: tuple[tuple[str, ...], ...]  # ground-truth url sequence per generated session


def _product_id(i: int) -> str:
    return f"p{i:03d}"


def _product_url(i: int) -> str:
    return f"/product/{i:03d}"


class _Weighted:
    def __init__(self, items, weights):
        self.items = list(items)
        self.cum = list(accumulate(weights))

    def draw(self, rng: random.Random, exclude=None):
        while True:
            x = self.items[bisect(self.cum, rng.random() * self.cum[-1])]
            if x != exclude or len(self.items) == 1:
                return x


def _zipf(n: int) -> list[float]:
    return [1.0 / (rank + 1) for rank in range(n)]


def _geometric(rng: random.Random, mean: float) -> int:
    p = 1.0 / mean
    length = 1
    while rng.random() >= p:
        length += 1
    return length


def _clf_line(ip: str, ts: datetime, method: str, url: str, status: int, size: int,
              referrer: str, agent: str) -> str:
    stamp = f"{ts.day:02d}/{_MONTHS[ts.month - 1]}/{ts:%Y:%H:%M:%S} +0000"
    return f'{ip} - - [{stamp}] "{method} {url} HTTP/1.1" {status} {size} "{referrer}" "{agent}"'


def generate_synthetic(cfg: SyntheticConfig = SyntheticConfig()) -> SyntheticCorpus:
    """Build the ontology text, annotation text and access log for ``cfg``."""
    rng = random.Random(cfg.seed)
    n_cat = cfg.category_count
    categories = [[] for _ in range(n_cat)]
    for i in range(cfg.product_count):
        categories[i % n_cat].append(i)

    onto = ["# synthetic shop ontology", "concept Product"]
    onto += [f"concept {c}" for c in _SIDE_CONCEPTS]
    onto += [f"concept Category_{j:02d}" for j in range(n_cat)]
    onto += [f"concept ProductConcept_{i:03d}" for i in range(cfg.product_count)]
    onto += [f"isa Category_{j:02d} Product" for j in range(n_cat)]
    onto += [f"isa ProductConcept_{i:03d} Category_{i % n_cat:02d}" for i in range(cfg.product_count)]
    onto += [f"rel {name} {src} {dst}" for name, src, dst in _RELATIONS]
    onto += ["axiom every Order contains at least one Product"]
    onto += [f"instance {_product_id(i)} ProductConcept_{i:03d}" for i in range(cfg.product_count)]
    annotations = "".join(f"{_product_url(i)}\t{_product_id(i)}\n" for i in range(cfg.product_count))

    cat_pick = _Weighted(range(n_cat), rng.sample(_zipf(n_cat), n_cat))
    in_cat = [_Weighted(members, rng.sample(_zipf(len(members)), len(members))) for members in categories]

    def walk(length: int) -> list[int]:
        cat = cat_pick.draw(rng)
        path = [in_cat[cat].draw(rng)]
        while len(path) < length:
            if len(categories[cat]) > 1 and rng.random() < INTRA_CATEGORY_PROB:
                path.append(in_cat[cat].draw(rng, exclude=path[-1]))
            else:
                cat = cat_pick.draw(rng)
                path.append(in_cat[cat].draw(rng, exclude=path[-1]))
        return path

    # Visitors return for further sessions after at least an hour away, so
    # a 30-minute inactivity timeout recovers the generated sessions exactly.
    n_users = max(1, round(cfg.session_count * 0.8))
    owners = [rng.randrange(n_users) for _ in range(cfg.session_count)]
    agents = [rng.choice(_BROWSERS) for _ in range(n_users)]
    next_free = [_START + timedelta(seconds=rng.randrange(int(_SPAN.total_seconds()))) for _ in range(n_users)]

    records: list[tuple[datetime, int, str]] = []
    sessions = []
    seq_no = 0
    for owner in owners:
        path = walk(_geometric(rng, cfg.mean_session_length))
        ip = f"10.{owner // 65536 % 256}.{owner // 256 % 256}.{owner % 256}"
        ts = next_free[owner]
        referrer = "-"
        for product in path:
            url = _product_url(product)
            line = _clf_line(ip, ts, "GET", url, 200, rng.randint(2000, 40000), referrer, agents[owner])
            records.append((ts, seq_no, line))
            seq_no += 1
            referrer = SITE + url
            ts += timedelta(seconds=rng.randint(5, 600))
        sessions.append(tuple(_product_url(p) for p in path))
        next_free[owner] = ts + timedelta(seconds=3600 + rng.randrange(86400))

    n_crawl = round(len(records) * CRAWLER_FRACTION / (1 - CRAWLER_FRACTION))
    for _ in range(n_crawl):
        ts = _START + timedelta(seconds=rng.randrange(int(_SPAN.total_seconds())))
        url = "/robots.txt" if rng.random() < 0.1 else _product_url(rng.randrange(cfg.product_count))
        ip = f"66.249.{rng.randrange(64, 80)}.{rng.randrange(1, 255)}"
        line = _clf_line(ip, ts, "GET", url, 200, rng.randint(2000, 40000), "-", rng.choice(_CRAWLERS))
        records.append((ts, seq_no, line))
        seq_no += 1

    records.sort()
    log = "".join(line + "\n" for _, _, line in records)
    return SyntheticCorpus("\n".join(onto) + "\n", annotations, log, tuple(sessions))
