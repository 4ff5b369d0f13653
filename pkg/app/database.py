"""
Database connection and session management.
A SQLite file under STAIRCASE_CACHE_DIR holds the result cache.
Uses SQLAlchemy's synchronous engine; the CLI is a single short-lived process.
"""

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, sessionmaker

from app.config import settings

logger = logging.getLogger(__name__)

# Base class for models
Base = declarative_base()

# Global engine and session maker (initialized lazily)
engine: Optional[Engine] = None
session_maker = None


def _get_database_url(cache_dir: Optional[str] = None) -> str:
    """SQLite URL inside the cache directory (created on demand)."""
    directory = Path(cache_dir or settings.staircase_cache_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return f"sqlite:///{directory / 'cache.db'}"


def _create_engine(cache_dir: Optional[str] = None):
    """Create database engine for the cache directory."""
    global engine, session_maker

    database_url = _get_database_url(cache_dir)
    engine = create_engine(
        database_url,
        echo=settings.debug,
        connect_args={"check_same_thread": False},
    )
    session_maker = sessionmaker(engine, expire_on_commit=False)
    logger.debug(f"Using cache database {database_url}")


def init_db(cache_dir: Optional[str] = None) -> bool:
    """Create tables. Won't crash if the cache location is unusable."""
    try:
        _create_engine(cache_dir)
        Base.metadata.create_all(engine)
        logger.debug("Cache tables initialized")
        return True
    except Exception as e:
        logger.warning(f"Cache initialization failed: {e}")
        logger.warning("Continuing without the result cache")
        close_db()
        return False


def close_db():
    """Close database connections."""
    global engine, session_maker
    if engine:
        try:
            engine.dispose()
            logger.debug("Cache connections closed")
        except Exception as e:
            logger.error(f"Error closing cache database: {e}")
    engine = None
    session_maker = None


@contextmanager
def get_db_session():
    """Get database session context manager."""
    if not session_maker:
        raise RuntimeError("Database not initialized")

    session = session_maker()
    try:
        yield session
        session.commit()
    except Exception as e:
        session.rollback()
        logger.error(f"Database error: {e}")
        raise
    finally:
        session.close()
