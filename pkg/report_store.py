"""
Persistent storage of verification reports.

Reports go to any SQLAlchemy URL; Postgres connections get a pooled engine
with keepalives, SQLite is used as-is.
"""

import logging
import time
import uuid
from datetime import datetime, timezone
from typing import Callable, Optional, TypeVar

from sqlalchemy import Column, DateTime, Integer, String, Text, create_engine
from sqlalchemy.exc import OperationalError
from sqlalchemy.orm import Session as DBSession
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from config import Settings, get_settings
from harness import SurvivorReport

logger = logging.getLogger(__name__)

Base = declarative_base()

T = TypeVar("T")


def _now() -> datetime:
    return datetime.now(timezone.utc)


class ReportRecord(Base):
    """One verification run."""

    __tablename__ = "chartforge_reports"

    id = Column(String, primary_key=True)
    budget = Column(String, nullable=False, index=True)
    signature = Column(String, nullable=False, index=True)
    whites = Column(Integer, nullable=True)
    survivors = Column(Integer, nullable=False, default=0)
    report_json = Column(Text, nullable=False)
    created_at = Column(DateTime, default=_now)
    updated_at = Column(DateTime, default=_now, onupdate=_now)

    def __repr__(self):
        return f"<ReportRecord(id={self.id}, signature={self.signature}, budget={self.budget})>"


def _engine(database_url: str):
    if database_url.startswith("postgresql"):
        return create_engine(
            database_url,
            pool_size=10,
            max_overflow=20,
            pool_pre_ping=True,
            pool_recycle=3600,
            connect_args={
                "connect_timeout": 10,
                "keepalives": 1,
                "keepalives_idle": 30,
                "keepalives_interval": 10,
                "keepalives_count": 5,
            },
        )
    if database_url in ("sqlite://", "sqlite:///:memory:"):
        # one shared connection, or every session would see its own empty database
        return create_engine(database_url, poolclass=StaticPool, connect_args={"check_same_thread": False})
    return create_engine(database_url)


class ReportStore:
    def __init__(self, database_url: Optional[str] = None, settings: Optional[Settings] = None):
        url = database_url or (settings or get_settings()).report_url()
        self.engine = _engine(url)
        Base.metadata.create_all(self.engine)
        self.SessionLocal = sessionmaker(bind=self.engine, autocommit=False, autoflush=False)
        logger.info("report store ready at %s", self.engine.url.render_as_string(hide_password=True))

    def _get_db(self) -> DBSession:
        return self.SessionLocal()

    def _retry_on_connection_error(self, func: Callable[[], T], max_retries: int = 3, delay: float = 1) -> T:
        for attempt in range(max_retries):
            try:
                return func()
            except OperationalError as e:
                if "connection" in str(e).lower() and attempt < max_retries - 1:
                    logger.warning("connection error, retrying in %ss (attempt %d/%d)", delay, attempt + 1, max_retries)
                    time.sleep(delay)
                    try:
                        self.engine.dispose()
                    except Exception:
                        logger.debug("engine dispose failed", exc_info=True)
                    continue
                raise
        raise RuntimeError("unreachable")

    @staticmethod
    def _serialize_report(report: SurvivorReport) -> str:
        return report.model_dump_json()

    @staticmethod
    def _deserialize_report(text: str) -> SurvivorReport:
        return SurvivorReport.model_validate_json(text)

    def save_report(self, report: SurvivorReport) -> str:
        report_id = uuid.uuid4().hex[:12]

        def _save() -> str:
            db = self._get_db()
            try:
                db.add(
                    ReportRecord(
                        id=report_id,
                        budget=report.budget,
                        signature=report.signature,
                        whites=report.whites,
                        survivors=report.counts.survivors,
                        report_json=self._serialize_report(report),
                    )
                )
                db.commit()
                logger.info("saved report %s", report_id)
                return report_id
            finally:
                db.close()

        return self._retry_on_connection_error(_save)

    def get_report(self, report_id: str) -> Optional[SurvivorReport]:
        def _get() -> Optional[SurvivorReport]:
            db = self._get_db()
            try:
                record = db.query(ReportRecord).filter_by(id=report_id).first()
                if not record:
                    logger.info("report not found: %s", report_id)
                    return None
                return self._deserialize_report(record.report_json)
            finally:
                db.close()

        return self._retry_on_connection_error(_get)

    def list_reports(self) -> list[tuple[str, str, str, Optional[int], int]]:
        """(id, signature, budget, whites, survivors), oldest first."""

        def _list():
            db = self._get_db()
            try:
                records = db.query(ReportRecord).order_by(ReportRecord.created_at, ReportRecord.id).all()
                return [(r.id, r.signature, r.budget, r.whites, r.survivors) for r in records]
            finally:
                db.close()

        return self._retry_on_connection_error(_list)

    def delete_report(self, report_id: str) -> bool:
        def _delete() -> bool:
            db = self._get_db()
            try:
                record = db.query(ReportRecord).filter_by(id=report_id).first()
                if not record:
                    return False
                db.delete(record)
                db.commit()
                logger.info("deleted report %s", report_id)
                return True
            finally:
                db.close()

        return self._retry_on_connection_error(_delete)

