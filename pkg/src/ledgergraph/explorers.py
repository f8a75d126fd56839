"""Block-explorer payload parsing and endpoint layout.

Two retrieval shapes cover the supported ledgers:

- interval sources (ripple): the service answers a time window directly,
  at most `page_size` transactions per request, so the client walks
  offset pages until a short page.
- block sources (bitcoin, dogecoin, ethereum, ethereum_internal): the
  service is block-oriented; the client binary-searches block headers for
  the window boundaries and then pulls each block's transactions.

The per-transaction JSON shapes mirror the public explorers each ledger is
normally scraped from (blockchain.info, SoChain, Etherscan, the Ripple
Data API); the endpoint layout itself is the small uniform protocol below,
which any fixture or proxy can implement:

    GET {base}/api/latest                 -> {"height": H}
    GET {base}/api/block/{h}/header       -> {"height": h, "time": T}
    GET {base}/api/block/{h}/txs          -> {"time": T, "txs": [tx, ...]}
    GET {base}/v2/transactions?start=&end=&limit=&offset=
                                          -> {"transactions": [tx, ...]}
"""

from __future__ import annotations

import datetime as _dt
from typing import Optional

from .records import TransactionRecord

EXPLORER_DEFAULTS = {
    "bitcoin": "https://blockchain.info",
    "dogecoin": "https://sochain.com",
    "ethereum": "https://api.etherscan.io",
    "ethereum_internal": "https://api.etherscan.io",
    "ripple": "https://data.ripple.com",
}

BLOCK_LEDGERS = frozenset({"bitcoin", "dogecoin", "ethereum", "ethereum_internal"})


class PayloadError(ValueError):
    """A transaction object does not match the expected explorer schema."""


def _as_timestamp(value: object, what: str) -> int:
    if isinstance(value, bool):
        raise PayloadError(f"{what} must be a timestamp")
    if isinstance(value, (int, float)):
        return int(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return int(text)
        except ValueError:
            pass
        try:
            parsed = _dt.datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError:
            raise PayloadError(f"{what} is neither unix seconds nor ISO-8601: {value!r}") from None
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=_dt.timezone.utc)
        return int(parsed.timestamp())
    raise PayloadError(f"{what} must be a timestamp, got {type(value).__name__}")


def tx_hash(tx: dict, ledger: str) -> str:
    key = "txid" if ledger == "dogecoin" else "hash"
    value = tx.get(key)
    if not isinstance(value, str) or not value:
        raise PayloadError(f"transaction is missing its {key!r} field")
    return value


def parse_bitcoin_tx(tx: object, block_time: Optional[int]) -> Optional[TransactionRecord]:
    """blockchain.info shape: inputs[].prev_out.addr and out[].addr.

    Coinbase transactions (no spendable input address) and fully
    non-standard outputs have no sender/recipient to map; those return
    None rather than raising.
    """
    if not isinstance(tx, dict):
        raise PayloadError("transaction must be a JSON object")
    senders = []
    for inp in tx.get("inputs", []):
        prev = inp.get("prev_out") if isinstance(inp, dict) else None
        addr = prev.get("addr") if isinstance(prev, dict) else None
        if addr:
            senders.append(addr)
    recipients = [o["addr"] for o in tx.get("out", []) if isinstance(o, dict) and o.get("addr")]
    if not senders or not recipients:
        return None
    when = tx.get("time", block_time)
    if when is None:
        raise PayloadError("transaction has no time and no block time was given")
    return TransactionRecord(
        ledger="bitcoin",
        senders=tuple(senders),
        recipients=tuple(recipients),
        timestamp=_as_timestamp(when, "tx time"),
        tx_kind="transfer",
    )


def parse_dogecoin_tx(tx: object, block_time: Optional[int]) -> Optional[TransactionRecord]:
    """SoChain shape: inputs[].address and outputs[].address."""
    if not isinstance(tx, dict):
        raise PayloadError("transaction must be a JSON object")
    senders = [
        i["address"] for i in tx.get("inputs", []) if isinstance(i, dict) and i.get("address")
    ]
    recipients = [
        o["address"] for o in tx.get("outputs", []) if isinstance(o, dict) and o.get("address")
    ]
    if not senders or not recipients:
        return None
    when = tx.get("time", block_time)
    if when is None:
        raise PayloadError("transaction has no time and no block time was given")
    return TransactionRecord(
        ledger="dogecoin",
        senders=tuple(senders),
        recipients=tuple(recipients),
        timestamp=_as_timestamp(when, "tx time"),
        tx_kind="transfer",
    )


def parse_ethereum_tx(
    tx: object, block_time: Optional[int], ledger: str = "ethereum"
) -> Optional[TransactionRecord]:
    """Etherscan shape: from / to / timeStamp.

    Contract creations have an empty `to`; there is no recipient address to
    draw an arc to, so they map to None.
    """
    if not isinstance(tx, dict):
        raise PayloadError("transaction must be a JSON object")
    sender = tx.get("from")
    recipient = tx.get("to")
    if not isinstance(sender, str) or not sender:
        raise PayloadError("transaction is missing 'from'")
    if not recipient:
        return None
    when = tx.get("timeStamp", block_time)
    if when is None:
        raise PayloadError("transaction has no timeStamp and no block time was given")
    return TransactionRecord(
        ledger=ledger,
        senders=(sender,),
        recipients=(recipient,),
        timestamp=_as_timestamp(when, "timeStamp"),
        tx_kind=str(tx.get("type", "call")) if ledger == "ethereum_internal" else "transaction",
    )


def parse_ripple_tx(tx: object) -> TransactionRecord:
    """Ripple Data API shape: date plus tx.TransactionType/Account/Destination.

    Non-payment transactions (AccountSet, OfferCreate, ...) have no
    destination; they are kept as records with a self-referential recipient
    so the stream stays complete, and the edge mapper drops them by kind.
    """
    if not isinstance(tx, dict):
        raise PayloadError("transaction must be a JSON object")
    body = tx.get("tx")
    if not isinstance(body, dict):
        raise PayloadError("transaction is missing its 'tx' body")
    account = body.get("Account")
    if not isinstance(account, str) or not account:
        raise PayloadError("transaction is missing 'Account'")
    kind = body.get("TransactionType")
    if not isinstance(kind, str) or not kind:
        raise PayloadError("transaction is missing 'TransactionType'")
    destination = body.get("Destination")
    if not isinstance(destination, str) or not destination:
        destination = account
    when = tx.get("date")
    if when is None:
        raise PayloadError("transaction is missing 'date'")
    return TransactionRecord(
        ledger="ripple",
        senders=(account,),
        recipients=(destination,),
        timestamp=_as_timestamp(when, "date"),
        tx_kind=kind,
    )


def parse_block_tx(
    ledger: str, tx: object, block_time: Optional[int]
) -> Optional[TransactionRecord]:
    if ledger == "bitcoin":
        return parse_bitcoin_tx(tx, block_time)
    if ledger == "dogecoin":
        return parse_dogecoin_tx(tx, block_time)
    if ledger in ("ethereum", "ethereum_internal"):
        return parse_ethereum_tx(tx, block_time, ledger)
    raise ValueError(f"{ledger!r} is not a block-oriented ledger")


# -- endpoint layout --------------------------------------------------------


def latest_url(base: str) -> str:
    return f"{base.rstrip('/')}/api/latest"


def header_url(base: str, height: int) -> str:
    return f"{base.rstrip('/')}/api/block/{height}/header"


def block_txs_url(base: str, height: int) -> str:
    return f"{base.rstrip('/')}/api/block/{height}/txs"


def interval_url(base: str) -> str:
    return f"{base.rstrip('/')}/v2/transactions"
