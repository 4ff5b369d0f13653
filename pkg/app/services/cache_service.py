"""
Cache Service - stores command payloads keyed by a hash of their inputs.
Dilate scans and atlas runs redo expensive exact linear algebra, so the CLI
looks results up here before computing them.
"""

import hashlib
import json
import logging
from typing import Any, Callable, Optional

from sqlalchemy import select

from app.config import settings
from app import database
from app.database import get_db_session, init_db
from app.models import CachedResult

logger = logging.getLogger(__name__)


class CacheService:
    """Get/put of serialized results; every failure degrades to a cache miss."""

    def __init__(self):
        self._ready: Optional[bool] = None
        self._cache_dir: Optional[str] = None

    def configure(self, cache_dir: Optional[str] = None, enabled: Optional[bool] = None):
        """Point the cache at a directory (defaults from settings)."""
        database.close_db()
        self._cache_dir = cache_dir or settings.staircase_cache_dir
        self._ready = init_db(self._cache_dir) if (settings.cache_enabled if enabled is None else enabled) else False

    @property
    def enabled(self) -> bool:
        if self._ready is None:
            self.configure()
        return bool(self._ready)

    @staticmethod
    def make_key(command: str, canonical_input: Any, order_spec: str = "", extra: Any = None) -> str:
        """sha256 over canonical JSON of the inputs and the version."""
        blob = json.dumps(
            {
                "command": command,
                "input": canonical_input,
                "order": order_spec,
                "extra": extra,
                "version": settings.version,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def get(self, key: str) -> Optional[str]:
        if not self.enabled:
            return None
        try:
            with get_db_session() as db:
                row = db.execute(select(CachedResult).where(CachedResult.key == key)).scalar_one_or_none()
                if row:
                    logger.info(f"Cache hit for {row.command} ({key[:12]})")
                    return row.payload
        except Exception as e:
            logger.warning(f"Unreadable cache entry {key[:12]}: {e}")
        return None

    def put(self, key: str, command: str, payload: str):
        if not self.enabled:
            return
        try:
            with get_db_session() as db:
                existing = db.execute(select(CachedResult).where(CachedResult.key == key)).scalar_one_or_none()
                if existing:
                    existing.payload = payload
                else:
                    db.add(CachedResult(key=key, command=command, payload=payload))
            logger.debug(f"Cached {command} result ({key[:12]})")
        except Exception as e:
            logger.warning(f"Could not store cache entry {key[:12]}: {e}")

    def get_or_compute(self, key: str, command: str, compute: Callable[[], str]) -> str:
        """Cached payload or a fresh one (stored on the way out)."""
        cached = self.get(key)
        if cached is not None:
            return cached
        payload = compute()
        self.put(key, command, payload)
        return payload


cache_service = CacheService()
