from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import threading
from pathlib import Path
from typing import Any

from ..matchers import normalize

_MISS = {"__cached_miss__": True}


def normalize_identifier(identifier: str) -> str:
    """DOIs are case-insensitive and often carry a resolver prefix; titles are normalized text."""
    ident = identifier.strip()
    doi = re.sub(r"^(?:https?://(?:dx\.)?doi\.org/|doi:)", "", ident, flags=re.I)
    if doi.startswith("10."):
        return doi.lower()
    return normalize(ident)


def slug(identifier: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", normalize_identifier(identifier)).strip("_")


class ResponseCache:
    """One JSON file per provider response under ``root/<namespace>/``.

    Writes go to a temporary file that is renamed into place, so readers
    never observe a partial file. ``root=None`` keeps everything in memory.
    """

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else None
        self._memory: dict[tuple[str, str], Any] = {}
        self._lock = threading.Lock()

    def _path(self, namespace: str, key: str) -> Path:
        norm = normalize_identifier(key)
        digest = hashlib.sha256(norm.encode("utf-8")).hexdigest()[:16]
        return self.root / namespace / f"{slug(key)[:60]}-{digest}.json"

    def get(self, namespace: str, key: str) -> tuple[bool, Any]:
        """``(hit, value)``; a cached miss is a hit with value None."""
        mem_key = (namespace, normalize_identifier(key))
        with self._lock:
            if mem_key in self._memory:
                return True, self._memory[mem_key]
        if self.root is None:
            return False, None
        path = self._path(namespace, key)
        if not path.is_file():
            return False, None
        value = json.loads(path.read_text(encoding="utf-8"))
        value = None if value == _MISS else value
        with self._lock:
            self._memory[mem_key] = value
        return True, value

    def put(self, namespace: str, key: str, value: Any) -> None:
        with self._lock:
            self._memory[(namespace, normalize_identifier(key))] = value
        if self.root is None:
            return
        path = self._path(namespace, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(_MISS if value is None else value, fh, sort_keys=True)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
