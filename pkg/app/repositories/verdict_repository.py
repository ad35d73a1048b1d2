"""
Repository for oracle verdicts.

Keeps the memo table of classical entailment answers, in process memory by
default or in Redis (DDL_CACHE_BACKEND=redis) so that several runs can
share one cache.
"""

import logging
import os
import threading
from typing import Dict, Optional

import redis
from dotenv import load_dotenv

from app.schemas.oracle import OracleVerdict

logger = logging.getLogger(__name__)
load_dotenv()


class VerdictRepository:
    """
    Linearizable map from query digest to OracleVerdict.
    """

    def __init__(self, backend: Optional[str] = None):
        """Select the backend; Redis failures fall back to memory."""
        self.backend = (backend or os.getenv("DDL_CACHE_BACKEND", "memory")).lower()
        self.ttl_seconds = int(os.getenv("DDL_CACHE_TTL_SECONDS", 86400))
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()
        self._verdicts: Dict[str, OracleVerdict] = {}
        self.redis_client = None

        if self.backend == "redis":
            self.redis_host = os.getenv("REDIS_HOST", "localhost")
            self.redis_port = int(os.getenv("REDIS_PORT", 6379))
            self.redis_db = int(os.getenv("REDIS_DB", 0))
            self.redis_password = os.getenv("REDIS_PASSWORD", "")
            try:
                self.redis_client = redis.Redis(
                    host=self.redis_host,
                    port=self.redis_port,
                    db=self.redis_db,
                    password=self.redis_password if self.redis_password else None,
                    decode_responses=True,
                )
                self.redis_client.ping()
                logger.info(f"Verdict cache on Redis at {self.redis_host}:{self.redis_port}")
            except redis.exceptions.ConnectionError as e:
                logger.warning(f"Redis unavailable, using in-memory verdict cache: {e}")
                self.redis_client = None
                self.backend = "memory"
        elif self.backend != "memory":
            logger.warning(f"Unknown cache backend '{self.backend}', using memory")
            self.backend = "memory"

    def get(self, key: str) -> Optional[OracleVerdict]:
        """
        Look up a verdict.

        Args:
            key: Query digest

        Returns:
            The cached verdict, or None
        """
        with self._lock:
            verdict = self._verdicts.get(key)
        if verdict is None and self.redis_client is not None:
            try:
                data = self.redis_client.get(f"verdict:{key}")
                if data:
                    verdict = OracleVerdict.model_validate_json(data)
                    with self._lock:
                        self._verdicts[key] = verdict
            except redis.exceptions.RedisError as e:
                logger.error(f"Failed to read verdict from Redis: {e}")
        with self._lock:
            if verdict is None:
                self.misses += 1
            else:
                self.hits += 1
        return verdict

    def save(self, key: str, verdict: OracleVerdict) -> bool:
        """
        Store a verdict; the first stored verdict for a key wins.

        Args:
            key: Query digest
            verdict: Verdict to store

        Returns:
            True if this call stored it
        """
        with self._lock:
            if key in self._verdicts:
                return False
            self._verdicts[key] = verdict
        if self.redis_client is not None:
            try:
                self.redis_client.setex(f"verdict:{key}", self.ttl_seconds, verdict.model_dump_json())
            except redis.exceptions.RedisError as e:
                logger.error(f"Failed to save verdict to Redis: {e}")
        return True

    def clear(self) -> None:
        with self._lock:
            self._verdicts.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._verdicts)
