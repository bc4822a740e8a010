"""On-disk cache of computed series.

Entries are JSON files named by the SHA-256 of their key
(module, op, target, N, order, zdepth).  Each file carries a schema
version and a checksum of its payload; a file that fails either test
raises SchemaMismatch and the caller recomputes.  Writes go to a temporary
file in the same directory followed by an atomic rename, so concurrent
readers only ever see complete entries.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .errors import SchemaMismatch
from .exact import TruncSeries, rat, rat_str
from .ifun import Generators, ZIFunction, generators_from_ifunction, z_ifunction
from .targets import TargetConfig

SCHEMA_VERSION = 1
ENV_VAR = "MSPLAB_CACHE"
DEFAULT_SPOT_CHECK_RATE = 0.1


@dataclass(frozen=True)
class CacheKey:
    module: str
    op: str
    target: int
    N: int | None
    order: int
    zdepth: int | None

    def as_list(self) -> list:
        return [self.module, self.op, self.target, self.N, self.order, self.zdepth]

    def digest(self) -> str:
        raw = json.dumps(self.as_list(), separators=(",", ":"))
        return hashlib.sha256(raw.encode()).hexdigest()


@dataclass
class CacheEntry:
    key: CacheKey
    payload: dict  # name -> list of "num/den" strings
    schema_version: int = SCHEMA_VERSION


def _checksum(payload: dict) -> str:
    raw = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(raw.encode()).hexdigest()


def default_cache_dir() -> Path | None:
    v = os.environ.get(ENV_VAR)
    return Path(v) if v else None


def encode_series(s: TruncSeries) -> list:
    return [rat_str(c) for c in s.coeffs]


def decode_series(data: list) -> TruncSeries:
    return TruncSeries.from_coeffs([rat(c) for c in data], len(data) - 1)


class Cache:
    """Content-addressed store rooted at ``root``."""

    def __init__(self, root: str | os.PathLike, spot_check_rate: float = DEFAULT_SPOT_CHECK_RATE,
                 rng: random.Random | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.spot_check_rate = spot_check_rate
        self.rng = rng or random.Random()

    def path(self, key: CacheKey) -> Path:
        return self.root / f"{key.digest()}.json"

    def ref(self, key: CacheKey) -> str:
        return f"cache:{key.digest()}"

    def store(self, entry: CacheEntry) -> Path:
        doc = {
            "schema_version": entry.schema_version,
            "key": entry.key.as_list(),
            "payload": entry.payload,
            "checksum": _checksum(entry.payload),
        }
        data = json.dumps(doc, sort_keys=True, indent=1).encode()
        dest = self.path(entry.key)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, dest)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return dest

    def load(self, key: CacheKey) -> CacheEntry | None:
        """The stored entry, None when absent; SchemaMismatch when untrustworthy."""
        p = self.path(key)
        try:
            raw = p.read_bytes()
        except FileNotFoundError:
            return None
        try:
            doc = json.loads(raw)
        except ValueError as exc:
            raise SchemaMismatch(f"unreadable cache file {p.name}") from exc
        if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
            raise SchemaMismatch(f"schema version mismatch in {p.name}")
        if doc.get("key") != key.as_list():
            raise SchemaMismatch(f"key mismatch in {p.name}")
        payload = doc.get("payload")
        if not isinstance(payload, dict) or doc.get("checksum") != _checksum(payload):
            raise SchemaMismatch(f"checksum failure in {p.name}")
        return CacheEntry(key, payload, SCHEMA_VERSION)

    def get_or_compute(self, key: CacheKey, compute: Callable[[], dict]) -> tuple[dict, bool]:
        """(payload, hit).  Untrustworthy entries are recomputed and rewritten.

        A fraction ``spot_check_rate`` of hits is recomputed and must agree
        exactly with the stored payload.
        """
        try:
            entry = self.load(key)
        except SchemaMismatch:
            entry = None
        if entry is not None:
            if self.spot_check_rate and self.rng.random() < self.spot_check_rate:
                fresh = compute()
                if fresh != entry.payload:
                    raise SchemaMismatch(f"cache entry {key.digest()} differs from recomputation")
            return entry.payload, True
        payload = compute()
        self.store(CacheEntry(key, payload))
        return payload, False


def open_cache(path: str | os.PathLike | None) -> Cache | None:
    """A cache at ``path``, or at $MSPLAB_CACHE, or None when neither is set."""
    root = Path(path) if path else default_cache_dir()
    return Cache(root) if root else None


def cached_generators(t: TargetConfig, order: int, cache: Cache | None) -> tuple[Generators, str | None]:
    """Generators built from a cached I-function of Z; (generators, payload_ref)."""
    if cache is None:
        return generators_from_ifunction(t, z_ifunction(t, order)), None
    key = CacheKey("ifun", "z_ifunction", t.k, None, order, None)

    def compute() -> dict:
        I = z_ifunction(t, order)
        return {f"I{j}": encode_series(s) for j, s in enumerate(I.components())}

    payload, _ = cache.get_or_compute(key, compute)
    I = ZIFunction(*(decode_series(payload[f"I{j}"]) for j in range(4)))
    return generators_from_ifunction(t, I), cache.ref(key)
