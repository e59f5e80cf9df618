# qaoatransfer/storage.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Result cache and run artifacts
# SQLite index of computed payloads keyed by content hash
# Atomic artifact writes (.tmp + replace)
# Run manifests: config hash, version, artifact hashes, timings

import hashlib
import json
import logging
import os
import sqlite3
import threading
import time
from typing import Any, Callable, Dict, List, Optional

from qaoatransfer.errors import VerificationError

logger = logging.getLogger('ResultCache')

MANIFEST_NAME = "manifest.json"


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def cache_key(kind: str, **parts: Any) -> str:
    return sha256_text(canonical_json({"kind": kind, **parts}))


def atomic_write(path: str, text: str):
    """Write text to path through a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = path + ".tmp"
    with open(tmp_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp_path, path)


class ResultCache:
    """
    Persistent payload cache.
    - One SQLite file (cache.db) in the cache directory
    - Payloads stored as text exactly as produced, so a hit is byte-identical
    - Safe to share between worker threads
    """

    def __init__(self, cache_dir: str):
        self.cache_dir = os.path.abspath(cache_dir)
        self.db_path = os.path.join(self.cache_dir, "cache.db")
        self.lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        os.makedirs(self.cache_dir, exist_ok=True)
        self._init_db()
        logger.info(f"[ResultCache] Initialized at {self.cache_dir}")

    def _init_db(self):
        try:
            conn = sqlite3.connect(self.db_path)
            conn.execute("""
                CREATE TABLE IF NOT EXISTS results (
                    key TEXT PRIMARY KEY,
                    kind TEXT,
                    payload TEXT,
                    created INTEGER
                )
            """)
            conn.commit()
            conn.close()
        except sqlite3.Error as e:
            logger.critical(f"[ResultCache] Database init failed: {e}")
            raise

    def get(self, key: str) -> Optional[str]:
        with self.lock:
            try:
                conn = sqlite3.connect(self.db_path)
                row = conn.execute("SELECT payload FROM results WHERE key = ?", (key,)).fetchone()
                conn.close()
            except sqlite3.Error as e:
                logger.error(f"[ResultCache] Lookup failed for {key[:12]}: {e}")
                return None
            if row is None:
                self.misses += 1
                return None
            self.hits += 1
            return row[0]

    def put(self, key: str, kind: str, payload: str):
        with self.lock:
            try:
                conn = sqlite3.connect(self.db_path)
                conn.execute("INSERT OR REPLACE INTO results (key, kind, payload, created) VALUES (?, ?, ?, ?)",
                             (key, kind, payload, int(time.time())))
                conn.commit()
                conn.close()
            except sqlite3.Error as e:
                logger.error(f"[ResultCache] Store failed for {key[:12]}: {e}")

    def get_or_compute(self, key: str, kind: str, compute: Callable[[], str]) -> str:
        payload = self.get(key)
        if payload is not None:
            logger.debug(f"[ResultCache] Hit {kind} {key[:12]}")
            return payload
        payload = compute()
        self.put(key, kind, payload)
        return payload

    def count(self, kind: Optional[str] = None) -> int:
        conn = sqlite3.connect(self.db_path)
        if kind is None:
            row = conn.execute("SELECT COUNT(*) FROM results").fetchone()
        else:
            row = conn.execute("SELECT COUNT(*) FROM results WHERE kind = ?", (kind,)).fetchone()
        conn.close()
        return int(row[0])

    def clear(self, kind: Optional[str] = None) -> int:
        with self.lock:
            conn = sqlite3.connect(self.db_path)
            if kind is None:
                cur = conn.execute("DELETE FROM results")
            else:
                cur = conn.execute("DELETE FROM results WHERE kind = ?", (kind,))
            conn.commit()
            removed = cur.rowcount
            conn.close()
        logger.info(f"[ResultCache] Cleared {removed} entries")
        return removed


class RunManifest:
    """Artifacts of one run with their SHA-256; timings are informational only."""

    def __init__(self, config_hash: str, version: str, command: str = ""):
        self.config_hash = config_hash
        self.version = version
        self.command = command
        self.artifacts: Dict[str, str] = {}
        self.timings: Dict[str, float] = {}

    def add_artifact(self, out_dir: str, relpath: str):
        self.artifacts[relpath] = sha256_file(os.path.join(out_dir, relpath))

    def write_artifact(self, out_dir: str, relpath: str, text: str):
        atomic_write(os.path.join(out_dir, relpath), text)
        self.add_artifact(out_dir, relpath)

    def record_timing(self, phase: str, seconds: float):
        self.timings[phase] = round(seconds, 3)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "version": self.version,
            "command": self.command,
            "artifacts": dict(sorted(self.artifacts.items())),
            "timings": self.timings,
        }

    def write(self, out_dir: str) -> str:
        path = os.path.join(out_dir, MANIFEST_NAME)
        atomic_write(path, json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        logger.info(f"[ResultCache] Manifest written: {len(self.artifacts)} artifacts",
                    extra={"config_hash": self.config_hash})
        return path

    @classmethod
    def load(cls, path: str) -> "RunManifest":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        manifest = cls(data["config_hash"], data["version"], data.get("command", ""))
        manifest.artifacts = dict(data.get("artifacts", {}))
        manifest.timings = dict(data.get("timings", {}))
        return manifest

    def drift(self, out_dir: str) -> List[str]:
        """Relative paths whose current hash differs from the recorded one (or that vanished)."""
        drifted = []
        for relpath, expected in sorted(self.artifacts.items()):
            path = os.path.join(out_dir, relpath)
            if not os.path.exists(path) or sha256_file(path) != expected:
                drifted.append(relpath)
        return drifted


def verify_manifest(out_dir: str) -> RunManifest:
    path = os.path.join(out_dir, MANIFEST_NAME)
    if not os.path.exists(path):
        raise VerificationError(f"No manifest in {out_dir}")
    try:
        manifest = RunManifest.load(path)
    except (OSError, ValueError, KeyError) as e:
        raise VerificationError(f"Unreadable manifest {path}: {e}") from e
    drifted = manifest.drift(out_dir)
    if drifted:
        for relpath in drifted:
            logger.error(f"[ResultCache] Drift: {relpath}")
        raise VerificationError(f"{len(drifted)} artifact(s) drifted: {', '.join(drifted)}")
    logger.info(f"[ResultCache] Manifest verified: {len(manifest.artifacts)} artifacts")
    return manifest
