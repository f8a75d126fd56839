"""Transaction retrieval: jobs, rate-limit backoff, worker pools.

Sources are either a local dump file (first-class, because public explorer
APIs drift) or an HTTP explorer speaking the layout in `explorers`. The
fetch stage is the only part of the pipeline that talks to the network;
everything downstream consumes TransactionRecords.

Rate limiting: on a 429 the worker sleeps, doubles its pause up to a cap,
and retries the same request; the pause resets after a success. Each
worker keeps its own backoff state.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import requests

from . import explorers
from .records import LEDGERS, TransactionRecord, read_dump_lenient

DEFAULT_PAGE_SIZE = 100  # the Ripple history service caps responses at 100
_BLOCKS_PER_TASK = 8


class FetchError(Exception):
    """Retrieval failed; `failed_ranges` lists what to re-run."""

    def __init__(self, message: str, failed_ranges: Optional[list[str]] = None,
                 partial: Optional["FetchResult"] = None):
        super().__init__(message)
        self.failed_ranges = failed_ranges or []
        self.partial = partial


@dataclass(frozen=True)
class BackoffPolicy:
    """Pause schedule for 429s and transient network errors."""

    initial: float = 5.0
    factor: float = 2.0
    cap: float = 60.0
    max_retries: int = 8


def policy_from_env(env: Optional[dict] = None) -> BackoffPolicy:
    """Backoff policy with LEDGERGRAPH_BACKOFF_* environment overrides."""
    env = os.environ if env is None else env
    return BackoffPolicy(
        initial=float(env.get("LEDGERGRAPH_BACKOFF_INITIAL", 5.0)),
        factor=float(env.get("LEDGERGRAPH_BACKOFF_FACTOR", 2.0)),
        cap=float(env.get("LEDGERGRAPH_BACKOFF_CAP", 60.0)),
        max_retries=int(env.get("LEDGERGRAPH_MAX_RETRIES", 8)),
    )


@dataclass(frozen=True)
class FetchJob:
    """One retrieval task: a ledger, a [start, end) window, a source."""

    ledger: str
    start: int
    end: int
    source: str
    workers: int = 1
    page_size: int = DEFAULT_PAGE_SIZE
    api_key: Optional[str] = None

    def __post_init__(self) -> None:
        if self.ledger not in LEDGERS:
            raise ValueError(f"unknown ledger {self.ledger!r}")
        if self.start >= self.end:
            raise ValueError(f"empty interval [{self.start}, {self.end})")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not (1 <= self.page_size <= 100):
            raise ValueError("page_size must be in [1, 100]")

    def is_local(self) -> bool:
        return not self.source.startswith(("http://", "https://"))


@dataclass
class FetchResult:
    records: list[TransactionRecord] = field(default_factory=list)
    skipped_payloads: int = 0
    failed_ranges: list[str] = field(default_factory=list)


class RetryingClient:
    """requests wrapper with per-instance (that is, per-worker) backoff.

    Sleeps are routed through the injected `sleep` so tests can observe the
    schedule instead of waiting it out; `pauses` records every pause taken.
    """

    def __init__(
        self,
        policy: BackoffPolicy,
        sleep: Callable[[float], None] = time.sleep,
        api_key: Optional[str] = None,
        timeout: float = 30.0,
    ):
        self.policy = policy
        self.sleep = sleep
        self.api_key = api_key
        self.timeout = timeout
        self.session = requests.Session()
        self.pauses: list[float] = []

    def get_json(self, url: str, params: Optional[dict] = None) -> dict:
        params = dict(params or {})
        if self.api_key:
            params["apikey"] = self.api_key
        delay = self.policy.initial
        retries = 0
        while True:
            try:
                resp = self.session.get(url, params=params, timeout=self.timeout)
            except requests.RequestException as exc:
                if retries >= self.policy.max_retries:
                    raise FetchError(f"{url} unreachable after {retries} retries: {exc}") from exc
            else:
                if resp.status_code == 200:
                    try:
                        return resp.json()
                    except ValueError as exc:
                        raise FetchError(f"{url} returned non-JSON body") from exc
                if resp.status_code != 429:
                    raise FetchError(f"{url} returned HTTP {resp.status_code}")
                if retries >= self.policy.max_retries:
                    raise FetchError(
                        f"{url} still rate-limited after {retries} retries"
                    )
            self.pauses.append(delay)
            self.sleep(delay)
            delay = min(delay * self.policy.factor, self.policy.cap)
            retries += 1


def resolve_endpoint(
    ledger: str,
    override: Optional[str] = None,
    config: Optional[dict] = None,
    env: Optional[dict] = None,
) -> tuple[str, Optional[str]]:
    """Base URL and API key for a ledger.

    Precedence: explicit override, then LEDGERGRAPH_<LEDGER>_URL/_KEY
    environment variables, then the config file, then built-in defaults.
    """
    env = os.environ if env is None else env
    tag = ledger.upper()
    cfg = (config or {}).get(ledger, {})
    url = override or env.get(f"LEDGERGRAPH_{tag}_URL") or cfg.get("url") \
        or explorers.EXPLORER_DEFAULTS[ledger]
    key = env.get(f"LEDGERGRAPH_{tag}_KEY") or cfg.get("key")
    return url, key


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object keyed by ledger")
    return cfg


# -- ripple: offset pagination over a time window ---------------------------


@dataclass(frozen=True)
class PageRequest:
    """One interval-source request; covers [start, end) at `offset`."""

    start: int
    end: int
    limit: int
    offset: int


def _dedup_key(tx: dict, ledger: str, record: TransactionRecord):
    """Cross-page duplicate detection: the native hash when present, else
    the record's (timestamp, senders, recipients) tuple."""
    try:
        return explorers.tx_hash(tx, ledger)
    except explorers.PayloadError:
        return (record.timestamp, record.senders, record.recipients)


def paginate_ripple(start: int, end: int, page_size: int = DEFAULT_PAGE_SIZE) -> Iterator[PageRequest]:
    """Request descriptors covering [start, end), one page at a time.

    The sequence is unbounded; the fetch loop stops at the first page that
    comes back with fewer than `page_size` records.
    """
    if page_size > 100:
        raise ValueError("the history service serves at most 100 transactions per request")
    offset = 0
    while True:
        yield PageRequest(start=start, end=end, limit=page_size, offset=offset)
        offset += page_size


def _fetch_interval(job: FetchJob, make_client: Callable[[], RetryingClient]) -> FetchResult:
    url = explorers.interval_url(job.source)
    pages = paginate_ripple(job.start, job.end, job.page_size)
    page_lock = threading.Lock()
    stop = threading.Event()
    results: dict[int, tuple[PageRequest, list]] = {}
    errors: dict[int, FetchError] = {}

    def worker() -> None:
        client = make_client()
        while not stop.is_set():
            with page_lock:
                req = next(pages)
            try:
                payload = client.get_json(
                    url,
                    {"start": req.start, "end": req.end, "limit": req.limit,
                     "offset": req.offset},
                )
            except FetchError as exc:
                errors[req.offset] = exc
                stop.set()
                return
            txs = payload.get("transactions", [])
            results[req.offset] = (req, txs)
            if len(txs) < req.limit:
                stop.set()
                return

    threads = [threading.Thread(target=worker) for _ in range(job.workers)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    result = FetchResult()
    seen: set = set()
    last_short = min(
        (off for off, (req, txs) in results.items() if len(txs) < req.limit),
        default=None,
    )
    for offset in sorted(results):
        if last_short is not None and offset > last_short:
            continue  # speculative page beyond the end of the data
        _, txs = results[offset]
        for tx in txs:
            try:
                record = explorers.parse_ripple_tx(tx)
            except (explorers.PayloadError, ValueError):
                result.skipped_payloads += 1
                continue
            key = _dedup_key(tx, job.ledger, record)
            if key in seen:
                continue
            seen.add(key)
            if job.start <= record.timestamp < job.end:
                result.records.append(record)
    for offset in sorted(errors):
        result.failed_ranges.append(
            f"{job.ledger} [{job.start}, {job.end}) page offset {offset}: {errors[offset]}"
        )
    if result.failed_ranges:
        raise FetchError(
            f"{len(result.failed_ranges)} page(s) failed", result.failed_ranges, partial=result
        )
    return result


# -- block-oriented ledgers ---------------------------------------------------


def _block_time(client: RetryingClient, base: str, height: int) -> int:
    payload = client.get_json(explorers.header_url(base, height))
    return int(payload["time"])


def _lower_bound_block(
    client: RetryingClient, base: str, latest: int, threshold: int
) -> int:
    """Smallest height whose block time is >= threshold (latest+1 if none).

    Block times are treated as non-decreasing, which is how the chain's
    median-time rules make them behave at day granularity.
    """
    lo, hi = 0, latest + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _block_time(client, base, mid) >= threshold:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _fetch_blocks(job: FetchJob, make_client: Callable[[], RetryingClient]) -> FetchResult:
    base = job.source
    probe = make_client()
    latest = int(probe.get_json(explorers.latest_url(base))["height"])
    first = _lower_bound_block(probe, base, latest, job.start)
    past = _lower_bound_block(probe, base, latest, job.end)
    result = FetchResult()
    if first >= past:
        return result

    chunks = [
        range(lo, min(lo + _BLOCKS_PER_TASK, past))
        for lo in range(first, past, _BLOCKS_PER_TASK)
    ]

    def fetch_chunk(blocks: range) -> tuple[list[tuple[object, TransactionRecord]], int]:
        client = make_client()
        out: list[tuple[object, TransactionRecord]] = []
        skipped = 0
        for height in blocks:
            payload = client.get_json(explorers.block_txs_url(base, height))
            block_time = payload.get("time")
            for tx in payload.get("txs", []):
                try:
                    record = explorers.parse_block_tx(job.ledger, tx, block_time)
                except (explorers.PayloadError, ValueError):
                    skipped += 1
                    continue
                if record is None:
                    skipped += 1
                    continue
                if job.start <= record.timestamp < job.end:
                    out.append((_dedup_key(tx, job.ledger, record), record))
        return out, skipped

    outcomes: list[object] = [None] * len(chunks)

    def run(i: int) -> None:
        try:
            outcomes[i] = fetch_chunk(chunks[i])
        except FetchError as exc:
            outcomes[i] = exc

    if job.workers == 1:
        for i in range(len(chunks)):
            run(i)
    else:
        with ThreadPoolExecutor(max_workers=job.workers) as pool:
            list(pool.map(run, range(len(chunks))))

    seen: set = set()
    for i, outcome in enumerate(outcomes):
        if isinstance(outcome, FetchError):
            blocks = chunks[i]
            result.failed_ranges.append(
                f"{job.ledger} blocks [{blocks.start}, {blocks.stop}): {outcome}"
            )
            continue
        assert outcome is not None
        pairs, skipped = outcome
        result.skipped_payloads += skipped
        for h, record in pairs:
            if h in seen:
                continue
            seen.add(h)
            result.records.append(record)
    if result.failed_ranges:
        raise FetchError(
            f"{len(result.failed_ranges)} block range(s) failed",
            result.failed_ranges,
            partial=result,
        )
    return result


# -- entry point --------------------------------------------------------------


def fetch_transactions(
    job: FetchJob,
    policy: Optional[BackoffPolicy] = None,
    sleep: Callable[[float], None] = time.sleep,
) -> FetchResult:
    """Retrieve every transaction of `job.ledger` in [start, end).

    Local sources are dump files (undecodable lines are skipped and
    counted). HTTP sources are paged or block-walked with `job.workers`
    concurrent fetchers; the result is the same multiset of records for
    any worker count. Raises FetchError (with the failed sub-ranges and
    any partial result) when a range cannot be retrieved.
    """
    if job.is_local():
        with open(job.source, encoding="utf-8") as fh:
            records, skipped = read_dump_lenient(fh)
        kept = [r for r in records if job.start <= r.timestamp < job.end]
        return FetchResult(records=kept, skipped_payloads=skipped)

    policy = policy or policy_from_env()

    def make_client() -> RetryingClient:
        return RetryingClient(policy, sleep=sleep, api_key=job.api_key)

    if job.ledger == "ripple":
        return _fetch_interval(job, make_client)
    return _fetch_blocks(job, make_client)
