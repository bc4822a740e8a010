"""Cache round trips, defect detection and concurrent writers."""

from __future__ import annotations

import json
import random
import subprocess
import sys

import pytest

from msplab.cache import (Cache, CacheEntry, CacheKey, cached_generators, decode_series, encode_series,
                          open_cache)
from msplab.errors import SchemaMismatch
from msplab.ifun import generators
from msplab.targets import target_config

KEY = CacheKey("ifun", "z_ifunction", 6, None, 20, None)


def test_store_then_load_generators(tmp_path):
    cache = Cache(tmp_path)
    t = target_config(6)
    g1, ref1 = cached_generators(t, 20, cache)
    g2, ref2 = cached_generators(t, 20, cache)
    direct = generators(t, 20)
    assert ref1 == ref2 and ref1.startswith("cache:")
    for name in ("I0", "I11", "I22", "J1", "J2", "J3"):
        assert getattr(g1, name) == getattr(direct, name) == getattr(g2, name)


def test_series_codec_round_trip():
    s = generators(target_config(10), 8).I22
    assert decode_series(encode_series(s)) == s
    assert all("/" in c for c in encode_series(s))


def test_corrupted_digit_is_detected(tmp_path):
    cache = Cache(tmp_path)
    cache.store(CacheEntry(KEY, {"I0": ["1/1", "360/1", "1247400/1"]}))
    path = cache.path(KEY)
    path.write_text(path.read_text().replace("360/1", "361/1"))
    with pytest.raises(SchemaMismatch):
        cache.load(KEY)


def test_schema_version_mismatch(tmp_path):
    cache = Cache(tmp_path)
    cache.store(CacheEntry(KEY, {"x": ["1/1"]}))
    doc = json.loads(cache.path(KEY).read_text())
    doc["schema_version"] = 99
    cache.path(KEY).write_text(json.dumps(doc))
    with pytest.raises(SchemaMismatch):
        cache.load(KEY)


def test_untrusted_entry_is_recomputed(tmp_path):
    cache = Cache(tmp_path, spot_check_rate=0)
    cache.path(KEY).write_text("{not json")
    payload, hit = cache.get_or_compute(KEY, lambda: {"x": ["2/1"]})
    assert not hit and payload == {"x": ["2/1"]}
    assert cache.load(KEY).payload == {"x": ["2/1"]}


def test_spot_check_catches_a_stale_entry(tmp_path):
    cache = Cache(tmp_path, spot_check_rate=1.0, rng=random.Random(0))
    cache.store(CacheEntry(KEY, {"x": ["1/1"]}))
    with pytest.raises(SchemaMismatch):
        cache.get_or_compute(KEY, lambda: {"x": ["2/1"]})


def test_environment_default(tmp_path, monkeypatch):
    monkeypatch.setenv("MSPLAB_CACHE", str(tmp_path / "c"))
    cache = open_cache(None)
    assert cache is not None and cache.root == tmp_path / "c"
    monkeypatch.delenv("MSPLAB_CACHE")
    assert open_cache(None) is None


def test_no_temp_files_left(tmp_path):
    cache = Cache(tmp_path)
    cache.store(CacheEntry(KEY, {"x": ["1/1"]}))
    assert [p.name for p in tmp_path.iterdir()] == [cache.path(KEY).name]


def test_parallel_verify_all_share_a_cache(tmp_path):
    cmd = [sys.executable, "-m", "msplab.cli", "verify-all", "--N", "7", "--order", "10",
           "--cache-dir", str(tmp_path)]
    procs = [subprocess.Popen(cmd + ["--k", str(k)], stdout=subprocess.PIPE) for k in (6, 10, 6, 10)]
    outs = [p.communicate(timeout=600) for p in procs]
    assert all(p.returncode == 0 for p in procs)
    assert outs[0][0] == outs[2][0] and outs[1][0] == outs[3][0]
    cache = Cache(tmp_path, spot_check_rate=0)
    for path in tmp_path.glob("*.json"):
        doc = json.loads(path.read_text())
        key = CacheKey(*doc["key"])
        assert cache.load(key) is not None
