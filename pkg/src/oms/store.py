"""Embedded transactional key-document store.

Contract every service relies on:

* all-or-nothing transactions with optimistic per-key versioning
  (conflicting writers get :class:`ConflictError` and may retry);
* snapshot reads that never block writers;
* durability through an append-only JSON-lines log — a commit is exactly one
  appended line, so a torn write is discarded on replay and the store is
  always fully pre- or fully post-transaction;
* an append-only audit trail with a gapless sequence;
* a soft-hide retention sweep (history windows hide, audit never purges).

Values are plain JSON-serializable dicts/lists/scalars. Keys are namespaced
strings such as ``"account:7"`` or ``"order:product:12"``.
"""

from __future__ import annotations

import copy
import hashlib
import json
import os
import threading
from typing import Any, Callable, Iterator, Optional

from .errors import ConflictError


class OptimisticConflict(ConflictError):
    """Version check failed at commit; safe to retry the whole transaction."""


JSONValue = Any

RETENTION_DAYS = 183
RETAINED_PREFIXES = ("order:", "report:", "sheet:")


def _canonical(value: JSONValue) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


class Transaction:
    """Unit of work over the store. Reads see committed state plus own writes."""

    def __init__(self, store: "Store"):
        self._store = store
        self._reads: dict[str, int] = {}
        self._writes: dict[str, JSONValue] = {}
        self._deletes: set[str] = set()
        self._done = False

    def get(self, key: str, default: JSONValue = None) -> JSONValue:
        if key in self._deletes:
            return default
        if key in self._writes:
            return copy.deepcopy(self._writes[key])
        value, version = self._store._read_versioned(key)
        self._reads.setdefault(key, version)
        return copy.deepcopy(value) if value is not None else default

    def put(self, key: str, value: JSONValue) -> None:
        if key not in self._reads:
            _, version = self._store._read_versioned(key)
            self._reads[key] = version
        self._deletes.discard(key)
        self._writes[key] = copy.deepcopy(value)

    def delete(self, key: str) -> None:
        if key not in self._reads:
            _, version = self._store._read_versioned(key)
            self._reads[key] = version
        self._writes.pop(key, None)
        self._deletes.add(key)

    def keys(self, prefix: str = "") -> list[str]:
        committed = self._store._keys_snapshot(prefix)
        live = (set(committed) | {k for k in self._writes if k.startswith(prefix)}) - self._deletes
        return sorted(live)

    def next_seq(self, name: str) -> int:
        """Monotone counter; conflict detection keeps it gapless per store."""
        key = f"seq:{name}"
        current = self.get(key, 0)
        self.put(key, current + 1)
        return current + 1

    def commit(self) -> None:
        if self._done:
            raise RuntimeError("transaction already finished")
        self._done = True
        if not self._writes and not self._deletes:
            return
        self._store._commit(self._reads, self._writes, self._deletes)

    def rollback(self) -> None:
        self._done = True
        self._writes.clear()
        self._deletes.clear()


class Snapshot:
    """Immutable point-in-time read view."""

    def __init__(self, data: dict[str, JSONValue]):
        self._data = data

    def get(self, key: str, default: JSONValue = None) -> JSONValue:
        value = self._data.get(key)
        return copy.deepcopy(value) if value is not None else default

    def keys(self, prefix: str = "") -> list[str]:
        return sorted(k for k in self._data if k.startswith(prefix))

    def values(self, prefix: str = "") -> Iterator[JSONValue]:
        for key in self.keys(prefix):
            yield copy.deepcopy(self._data[key])


class Store:
    def __init__(self, path: Optional[str] = None, *, fsync: bool = True):
        self._path = path
        self._fsync = fsync
        self._lock = threading.RLock()
        self._write_gate = threading.RLock()  # one writer builds+commits at a time
        self._data: dict[str, JSONValue] = {}
        self._versions: dict[str, int] = {}
        self._log = None
        if path:
            self._replay(path)
            self._log = open(path, "ab")

    # -- internal plumbing -------------------------------------------------

    def _replay(self, path: str) -> None:
        if not os.path.exists(path):
            return
        with open(path, "rb") as fh:
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    break  # torn tail from a crash mid-append; discard
                for key, value in record.get("puts", {}).items():
                    self._data[key] = value
                    self._versions[key] = self._versions.get(key, 0) + 1
                for key in record.get("dels", []):
                    self._data.pop(key, None)
                    self._versions[key] = self._versions.get(key, 0) + 1

    def _read_versioned(self, key: str) -> tuple[Optional[JSONValue], int]:
        with self._lock:
            return self._data.get(key), self._versions.get(key, 0)

    def _keys_snapshot(self, prefix: str) -> list[str]:
        with self._lock:
            return [k for k in self._data if k.startswith(prefix)]

    def _commit(self, reads: dict[str, int], writes: dict[str, JSONValue], deletes: set[str]) -> None:
        with self._lock:
            for key, seen in reads.items():
                if self._versions.get(key, 0) != seen:
                    raise OptimisticConflict(f"concurrent write on {key!r}",
                                             details={"key": key})
            if self._log is not None:
                record = _canonical({"puts": writes, "dels": sorted(deletes)})
                self._log.write(record.encode("utf-8") + b"\n")
                self._log.flush()
                if self._fsync:
                    os.fsync(self._log.fileno())
            for key, value in writes.items():
                self._data[key] = value
                self._versions[key] = self._versions.get(key, 0) + 1
            for key in deletes:
                self._data.pop(key, None)
                self._versions[key] = self._versions.get(key, 0) + 1

    # -- public API ----------------------------------------------------------

    def transaction(self) -> "_TxnContext":
        return _TxnContext(self)

    def run(self, fn: Callable[[Transaction], Any], *, retries: int = 25) -> Any:
        """Run ``fn`` transactionally.

        Writers serialize on the write gate (readers never wait), so hot keys
        like sequence counters cannot trigger retry storms; the optimistic
        version check still backstops raw ``transaction()`` users, and only
        commit-time version races are retried. Semantic conflicts (a slot
        already booked, say) propagate immediately.
        """
        with self._write_gate:
            for attempt in range(retries):
                txn = Transaction(self)
                try:
                    result = fn(txn)
                    txn.commit()
                    return result
                except OptimisticConflict:
                    if attempt == retries - 1:
                        raise
        raise OptimisticConflict("transaction retries exhausted")

    def snapshot(self) -> Snapshot:
        with self._lock:
            return Snapshot(copy.deepcopy(self._data))

    def select(self, prefix: str) -> list[tuple[str, JSONValue]]:
        """Copies of all (key, value) pairs under a prefix; cheaper than a
        full snapshot for hot single-prefix reads."""
        with self._lock:
            return [(k, copy.deepcopy(v)) for k, v in self._data.items()
                    if k.startswith(prefix)]

    def get(self, key: str, default: JSONValue = None) -> JSONValue:
        value, _ = self._read_versioned(key)
        return copy.deepcopy(value) if value is not None else default

    def digest(self) -> str:
        """Content hash of all live data; equal digests mean equal state."""
        with self._lock:
            return hashlib.sha256(_canonical(self._data).encode("utf-8")).hexdigest()

    def dump(self) -> str:
        """Documented backup/export format: canonical JSON of all live data."""
        with self._lock:
            return json.dumps(self._data, sort_keys=True, indent=2)

    @classmethod
    def from_dump(cls, text: str) -> "Store":
        store = cls()
        data = json.loads(text)
        with store._lock:
            store._data = data
            store._versions = {k: 1 for k in data}
        return store

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None


class _TxnContext:
    def __init__(self, store: Store):
        self._txn = Transaction(store)

    def __enter__(self) -> Transaction:
        return self._txn

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is None:
            self._txn.commit()
        else:
            self._txn.rollback()
        return False


class AuditLog:
    """Append-only audit trail stored under ``audit:`` keys with a gapless seq."""

    def __init__(self, store: Store):
        self._store = store

    def append(self, txn: Transaction, *, actor: str, action: str, entity: str,
               timestamp: str, before: JSONValue = None, after: JSONValue = None) -> int:
        seq = txn.next_seq("audit")
        entry = {
            "seq": seq,
            "actor": actor,
            "action": action,
            "entity": entity,
            "timestamp": timestamp,
            "before_digest": _digest_of(before),
            "after_digest": _digest_of(after),
        }
        txn.put(f"audit:{seq:012d}", entry)
        return seq

    def entries(self) -> list[dict[str, Any]]:
        snap = self._store.snapshot()
        return [snap.get(k) for k in snap.keys("audit:")]


def _digest_of(value: JSONValue) -> Optional[str]:
    if value is None:
        return None
    return hashlib.sha256(_canonical(value).encode("utf-8")).hexdigest()[:16]


def retention_sweep(store: Store, *, today_iso: str) -> dict[str, int]:
    """Soft-hide retained entities older than the six-month window.

    Audit entries are never touched. Returns per-prefix hidden counts.
    """
    from datetime import date, timedelta

    cutoff = date.fromisoformat(today_iso) - timedelta(days=RETENTION_DAYS)
    counts: dict[str, int] = {p: 0 for p in RETAINED_PREFIXES}

    def sweep(txn: Transaction) -> None:
        for prefix in RETAINED_PREFIXES:
            for key in txn.keys(prefix):
                record = txn.get(key)
                if not isinstance(record, dict) or record.get("_hidden"):
                    continue
                stamp = record.get("date") or record.get("generated_at", "")[:10]
                if not stamp:
                    continue
                if date.fromisoformat(stamp) <= cutoff:
                    record["_hidden"] = True
                    txn.put(key, record)
                    counts[prefix] += 1

    store.run(sweep)
    return counts
