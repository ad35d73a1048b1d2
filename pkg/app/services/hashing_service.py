"""
Hashing service for oracle-query cache keys.

Renders an OracleQuery canonically and digests it with SHA-256, so that equal
queries share one verdict-cache entry regardless of set iteration order.
"""

import hashlib
import logging
from functools import lru_cache

from app.schemas.concepts import canonical_order
from app.schemas.oracle import OracleQuery

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4096)
def _axioms_text(section: str, axioms: frozenset) -> str:
    return "\n".join(f"{section}: {axiom.render()}." for axiom in canonical_order(axioms))


class HashingService:
    """
    Service for turning oracle queries into stable cache keys.
    """

    @staticmethod
    def canonical_text(query: OracleQuery) -> str:
        """
        Canonical text of a query: sorted tbox lines, sorted rbox lines, the goal.

        Args:
            query: Oracle query to render

        Returns:
            Newline-separated canonical rendering
        """
        parts = [
            _axioms_text("tbox", query.tbox),
            _axioms_text("rbox", query.rbox),
            f"goal: {query.goal.render()}",
        ]
        return "\n".join(part for part in parts if part)

    @staticmethod
    def digest(data: bytes) -> str:
        """
        SHA-256 hex digest of raw bytes.

        Args:
            data: Bytes to hash

        Returns:
            64-character lowercase hex string
        """
        try:
            return hashlib.sha256(data).hexdigest()
        except Exception as e:
            logger.error(f"Failed to hash data: {e}")
            raise

    @staticmethod
    def query_key(query: OracleQuery) -> str:
        """Cache key of an oracle query."""
        key = HashingService.digest(HashingService.canonical_text(query).encode("utf-8"))
        logger.debug(f"Query key: {key[:12]}")
        return key
