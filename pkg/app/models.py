"""
SQLAlchemy models for the result cache.

Models:
- CachedResult: serialized command output keyed by a hash of its inputs
"""

from sqlalchemy import Column, DateTime, Integer, String, Text
from sqlalchemy.sql import func

from app.database import Base


class CachedResult(Base):
    """One cached command payload."""

    __tablename__ = "cached_results"

    id = Column(Integer, primary_key=True, autoincrement=True)
    key = Column(String(64), unique=True, nullable=False, index=True)  # sha256 hex
    command = Column(String(30), nullable=False)
    payload = Column(Text, nullable=False)
    created_at = Column(DateTime, server_default=func.now())

    def __repr__(self):
        return f"<CachedResult {self.command} {self.key[:12]}>"
