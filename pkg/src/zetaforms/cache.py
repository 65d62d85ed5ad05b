"""On-disk cache of form records, one JSON file per (construction, n).

Entries carry the engine version and a SHA-256 of the record payload; a
version mismatch is a miss, a bad checksum raises CacheCorrupt.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

from .errors import CacheCorrupt

ENGINE_VERSION = "zetaforms-0.1.0/records-1"
DEFAULT_CACHE_DIR = "zf-cache"


def default_cache_dir() -> Path:
    return Path(os.environ.get("ZF_CACHE_DIR") or DEFAULT_CACHE_DIR)


def custom_construction_id(params_json: str) -> str:
    """Stable id for a user parameter file: hash of its canonical JSON."""
    doc = json.loads(params_json)
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return "custom-" + hashlib.sha256(canon.encode()).hexdigest()[:16]


def _digest(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class RecordCache:
    def __init__(self, root=None, engine: str = ENGINE_VERSION):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.engine = engine

    def path(self, construction: str, n: int) -> Path:
        return self.root / construction / f"n{n:05d}.json"

    def get(self, construction: str, n: int, precision_bits: int):
        """The cached record dict, or None on a miss (absent, other engine or precision)."""
        path = self.path(construction, n)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text())
            engine = entry["engine"]
            payload = entry["record"]
            digest = entry["sha256"]
        except (ValueError, KeyError, TypeError) as exc:
            raise CacheCorrupt(n, f"unreadable ({exc})") from exc
        if engine != self.engine:
            return None
        if _digest(payload) != digest:
            raise CacheCorrupt(n, "checksum mismatch")
        if entry.get("construction") != construction or payload.get("n") != n:
            raise CacheCorrupt(n, "entry does not belong to this slot")
        if payload.get("precision_bits") != precision_bits:
            return None
        return payload

    def put(self, construction: str, n: int, payload: dict) -> None:
        entry = {
            "construction": construction,
            "n": n,
            "engine": self.engine,
            "record": payload,
            "sha256": _digest(payload),
        }
        atomic_write(self.path(construction, n), json.dumps(entry, indent=1) + "\n")

    # named blobs (fitted operators and the like)
    def blob_path(self, name: str) -> Path:
        return self.root / "blobs" / f"{name}.json"

    def get_blob(self, name: str):
        path = self.blob_path(name)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text())
        except ValueError:
            return None
        if entry.get("engine") != self.engine or _digest(entry.get("data")) != entry.get("sha256"):
            return None
        return entry["data"]

    def put_blob(self, name: str, data) -> None:
        entry = {"engine": self.engine, "data": data, "sha256": _digest(data)}
        atomic_write(self.blob_path(name), json.dumps(entry) + "\n")
