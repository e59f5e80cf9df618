# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
# tests/test_storage.py
import json
import logging
import sqlite3
from unittest.mock import MagicMock, patch

import pytest

from qaoatransfer.errors import VerificationError
from qaoatransfer.storage import (
    MANIFEST_NAME, ResultCache, RunManifest, atomic_write, cache_key, canonical_json, verify_manifest,
)


@pytest.fixture
def cache(tmp_path):
    return ResultCache(str(tmp_path / "cache"))


def test_cache_put_get(cache):
    cache.put("k1", "optima", '{"a": 1}')
    assert cache.get("k1") == '{"a": 1}'
    assert cache.get("missing") is None
    assert cache.hits == 1
    assert cache.misses == 1


def test_get_or_compute_computes_once(cache):
    compute = MagicMock(return_value="payload")
    assert cache.get_or_compute("key", "optima", compute) == "payload"
    assert cache.get_or_compute("key", "optima", compute) == "payload"
    compute.assert_called_once()


def test_cache_persists_across_instances(tmp_path):
    first = ResultCache(str(tmp_path / "cache"))
    first.put("k", "landscape", "x")
    second = ResultCache(str(tmp_path / "cache"))
    assert second.get("k") == "x"
    assert second.count() == 1
    assert second.count("optima") == 0


def test_cache_clear(cache):
    cache.put("a", "optima", "1")
    cache.put("b", "landscape", "2")
    assert cache.clear("optima") == 1
    assert cache.count() == 1
    assert cache.clear() == 1


def test_cache_init_failure_is_critical(tmp_path, caplog):
    """An unusable database is logged at CRITICAL and re-raised."""
    with patch("qaoatransfer.storage.sqlite3.connect", side_effect=sqlite3.OperationalError("disk I/O error")):
        with caplog.at_level(logging.CRITICAL, logger="ResultCache"):
            with pytest.raises(sqlite3.Error):
                ResultCache(str(tmp_path / "cache"))
    assert "Database init failed" in caplog.text


def test_cache_key_is_order_independent():
    assert cache_key("optima", a=1, b=[2, 3]) == cache_key("optima", b=[2, 3], a=1)
    assert cache_key("optima", a=1) != cache_key("landscape", a=1)
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_atomic_write(tmp_path):
    path = tmp_path / "sub" / "out.txt"
    atomic_write(str(path), "hello\n")
    assert path.read_text() == "hello\n"
    assert not (tmp_path / "sub" / "out.txt.tmp").exists()


def test_manifest_round_trip(tmp_path):
    manifest = RunManifest("abc123", "1.0.0", "maxcut")
    manifest.write_artifact(str(tmp_path), "maxcut.json", '{"value": 4}\n')
    manifest.record_timing("solve", 0.12345)
    manifest.write(str(tmp_path))

    data = json.loads((tmp_path / MANIFEST_NAME).read_text())
    assert data["config_hash"] == "abc123"
    assert data["timings"] == {"solve": 0.123}
    assert set(data["artifacts"]) == {"maxcut.json"}

    verified = verify_manifest(str(tmp_path))
    assert verified.artifacts == manifest.artifacts


def test_manifest_detects_drift(tmp_path):
    manifest = RunManifest("abc123", "1.0.0")
    manifest.write_artifact(str(tmp_path), "a.csv", "x,y\n")
    manifest.write_artifact(str(tmp_path), "b.csv", "z\n")
    manifest.write(str(tmp_path))
    (tmp_path / "a.csv").write_text("x,y,tampered\n")
    (tmp_path / "b.csv").unlink()
    assert manifest.drift(str(tmp_path)) == ["a.csv", "b.csv"]
    with pytest.raises(VerificationError):
        verify_manifest(str(tmp_path))


def test_verify_without_manifest(tmp_path):
    with pytest.raises(VerificationError):
        verify_manifest(str(tmp_path))


def test_verify_unreadable_manifest(tmp_path):
    (tmp_path / MANIFEST_NAME).write_text("{not json")
    with pytest.raises(VerificationError):
        verify_manifest(str(tmp_path))
