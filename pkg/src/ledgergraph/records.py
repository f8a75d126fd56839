"""Normalized transaction records and graph construction.

Every supported ledger is reduced to one record shape so the analytics
side never sees ledger-specific payloads. The on-disk dump format is one
JSON object per line with exactly these fields:

    {"ledger": "...", "senders": [...], "recipients": [...],
     "timestamp": <unix seconds>, "tx_kind": "..."}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .graph import DirectedGraph

LEDGERS = ("bitcoin", "dogecoin", "ethereum", "ethereum_internal", "ripple")
UTXO_LEDGERS = frozenset({"bitcoin", "dogecoin"})
SINGLE_PAIR_LEDGERS = frozenset({"ethereum", "ethereum_internal", "ripple"})

RIPPLE_PAYMENT = "Payment"


class RecordSchemaError(ValueError):
    """A decoded record violates the dump schema."""


@dataclass(frozen=True)
class TransactionRecord:
    """One ledger transaction, normalized.

    UTXO ledgers (bitcoin, dogecoin) may carry several senders and
    recipients; account ledgers (ethereum, ethereum_internal, ripple) carry
    exactly one of each. `tx_kind` is the ledger-native type tag; only
    Ripple uses it for filtering (payments vs bookkeeping transactions).
    """

    ledger: str
    senders: tuple[str, ...]
    recipients: tuple[str, ...]
    timestamp: int
    tx_kind: str = ""

    def __post_init__(self) -> None:
        if self.ledger not in LEDGERS:
            raise RecordSchemaError(f"unknown ledger {self.ledger!r}")
        if not self.senders or not self.recipients:
            raise RecordSchemaError("senders and recipients must be non-empty")
        if any(not isinstance(a, str) or not a for a in self.senders + self.recipients):
            raise RecordSchemaError("addresses must be non-empty strings")
        if self.ledger in SINGLE_PAIR_LEDGERS and (
            len(self.senders) != 1 or len(self.recipients) != 1
        ):
            raise RecordSchemaError(
                f"{self.ledger} records must have exactly one sender and one recipient"
            )

    def to_json_dict(self) -> dict:
        return {
            "ledger": self.ledger,
            "senders": list(self.senders),
            "recipients": list(self.recipients),
            "timestamp": self.timestamp,
            "tx_kind": self.tx_kind,
        }


def record_from_json_dict(obj: object) -> TransactionRecord:
    if not isinstance(obj, dict):
        raise RecordSchemaError(f"record must be a JSON object, got {type(obj).__name__}")
    try:
        ledger = obj["ledger"]
        senders = obj["senders"]
        recipients = obj["recipients"]
        timestamp = obj["timestamp"]
    except KeyError as exc:
        raise RecordSchemaError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(senders, list) or not isinstance(recipients, list):
        raise RecordSchemaError("senders and recipients must be JSON arrays")
    if isinstance(timestamp, bool) or not isinstance(timestamp, (int, float)):
        raise RecordSchemaError("timestamp must be a number (unix seconds)")
    tx_kind = obj.get("tx_kind", "")
    if not isinstance(tx_kind, str):
        raise RecordSchemaError("tx_kind must be a string")
    return TransactionRecord(
        ledger=ledger,
        senders=tuple(senders),
        recipients=tuple(recipients),
        timestamp=int(timestamp),
        tx_kind=tx_kind,
    )


def write_dump(records: Iterable[TransactionRecord], stream: IO[str]) -> int:
    """Write records as newline-delimited JSON; returns the count."""
    count = 0
    for rec in records:
        stream.write(json.dumps(rec.to_json_dict(), sort_keys=True))
        stream.write("\n")
        count += 1
    return count


def read_dump(stream: IO[str]) -> Iterator[TransactionRecord]:
    """Strict dump reader: any bad line raises."""
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordSchemaError(f"line {lineno}: not valid JSON ({exc.msg})") from None
        try:
            yield record_from_json_dict(obj)
        except RecordSchemaError as exc:
            raise RecordSchemaError(f"line {lineno}: {exc}") from None


def read_dump_lenient(stream: IO[str]) -> tuple[list[TransactionRecord], int]:
    """Dump reader that skips undecodable lines.

    Lines that are not valid JSON are counted and skipped (truncated
    downloads happen); lines that decode but violate the record schema
    raise, because they mean the file is not a dump of this format.
    Returns (records, skipped_line_count).
    """
    records: list[TransactionRecord] = []
    skipped = 0
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            skipped += 1
            continue
        try:
            records.append(record_from_json_dict(obj))
        except RecordSchemaError as exc:
            raise RecordSchemaError(f"line {lineno}: {exc}") from None
    return records, skipped


def _dedupe(addresses: tuple[str, ...]) -> list[str]:
    # first-seen order, so edge emission stays deterministic
    return list(dict.fromkeys(addresses))


def map_to_edges(record: TransactionRecord) -> list[tuple[str, str]]:
    """Per-ledger mapping from one transaction to sender->recipient pairs.

    UTXO ledgers expand to the full cross product of the (deduplicated)
    input and output address sets. Account ledgers yield their single
    pair; Ripple only for payments, since its other transaction kinds move
    no funds between two parties.
    """
    if record.ledger in UTXO_LEDGERS:
        senders = _dedupe(record.senders)
        recipients = _dedupe(record.recipients)
        return [(s, r) for s in senders for r in recipients]
    if record.ledger == "ripple" and record.tx_kind != RIPPLE_PAYMENT:
        return []
    return [(record.senders[0], record.recipients[0])]


@dataclass
class IngestionStats:
    """Counters from one build: how many transactions became what."""

    transactions: int = 0
    binary_connections: int = 0  # address pairs before dedup, self-pairs included
    unique_arcs: int = 0
    self_loops: int = 0
    edge_reuse_ratio: float = 0.0
    skipped_records: int = 0
    nodes: int = 0

    def to_json_dict(self) -> dict:
        ratio = self.transactions / self.nodes if self.nodes else 0.0
        return {
            "transactions": self.transactions,
            "binary_connections": self.binary_connections,
            "unique_arcs": self.unique_arcs,
            "self_loops": self.self_loops,
            "edge_reuse_ratio": self.edge_reuse_ratio,
            "skipped_records": self.skipped_records,
            "nodes": self.nodes,
            "transactions_to_addresses_ratio": ratio,
        }


def build_graph(
    records: Iterable[TransactionRecord], skipped_records: int = 0
) -> tuple[DirectedGraph, IngestionStats]:
    """Build the interaction graph from a record stream.

    One node per distinct address that appears in a mapped edge; one arc per
    distinct sender->recipient pair. The arc set is independent of record
    order (node ids are not).
    """
    graph = DirectedGraph()
    stats = IngestionStats(skipped_records=skipped_records)
    for record in records:
        stats.transactions += 1
        for sender, recipient in map_to_edges(record):
            stats.binary_connections += 1
            graph.add_interaction(sender, recipient)
    stats.unique_arcs = graph.arc_count
    stats.self_loops = graph.self_loop_count
    stats.edge_reuse_ratio = graph.edge_reuse_ratio()
    stats.nodes = graph.node_count
    return graph, stats
