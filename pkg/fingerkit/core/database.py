"""Database connection and session management for the scan cache."""
from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

from fingerkit.core.config import cache_database_url

# Base class for SQLAlchemy models
Base = declarative_base()


@lru_cache(maxsize=None)
def get_engine(url: str):
    """One engine per database URL; tables are created on first use."""
    if url.startswith("sqlite:///"):
        Path(url[len("sqlite:///"):]).parent.mkdir(parents=True, exist_ok=True)
        engine = create_engine(url, connect_args={"check_same_thread": False})
    else:
        engine = create_engine(url)
    import fingerkit.models  # noqa: F401  registers ScanRecord / ScanCell on Base
    Base.metadata.create_all(bind=engine)
    return engine


@contextmanager
def session_scope(cache_dir: Path = None):
    """Creates a session on the cache database, yields it, and closes it after usage."""
    SessionLocal = sessionmaker(autocommit=False, autoflush=False,
                                bind=get_engine(cache_database_url(cache_dir)))
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()
