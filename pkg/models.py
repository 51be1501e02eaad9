import json
import logging
from datetime import datetime, timezone

from sqlalchemy import Boolean, Column, DateTime, Integer, String, Text, create_engine, select
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import DeclarativeBase, Session

from app import config
from errors import ConfigError, PartitionLabError
from recurrence_lab import entry_to_record

# Used when neither an explicit URL nor DATABASE_URL is configured
DEFAULT_DATABASE_URL = "sqlite:///partition_lab.db"


class Base(DeclarativeBase):
    pass


class CatalogRecord(Base):
    """Model for storing mined recurrences"""
    __tablename__ = 'catalog_entries'

    id = Column(Integer, primary_key=True)
    key = Column(String(1024), unique=True, nullable=False, index=True)  # canonical key
    coefficients = Column(Text, nullable=False)  # JSON {offset: coefficient}
    tail = Column(Text, nullable=False)  # JSON {even: [c0, c1], odd: [c0, c1]}
    claimed_lo = Column(Integer, nullable=False)
    claimed_hi = Column(Integer, nullable=False)
    empirical_lo = Column(Integer)  # null when the recurrence fails inside its claim
    empirical_hi = Column(Integer)
    provenance = Column(String(128), nullable=False)
    classification = Column(String(32), nullable=False)
    anomaly = Column(Boolean, default=False)
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc))

    def __init__(self, **kwargs):
        for key, value in kwargs.items():
            setattr(self, key, value)

    def update_from_record(self, record):
        """Copy the fields of a catalog record (as written by entry_to_record)"""
        empirical = record.get("empirical") or (None, None)
        self.key = record["key"]
        self.coefficients = json.dumps(record["coefficients"], sort_keys=True)
        self.tail = json.dumps(record["tail"], sort_keys=True)
        self.claimed_lo, self.claimed_hi = record["claimed"]
        self.empirical_lo, self.empirical_hi = empirical
        self.provenance = record["provenance"]
        self.classification = record["classification"]
        self.anomaly = bool(record.get("anomaly"))

    def to_record(self):
        empirical = None
        if self.empirical_lo is not None and self.empirical_hi is not None:
            empirical = [self.empirical_lo, self.empirical_hi]
        return {
            "key": self.key,
            "coefficients": json.loads(self.coefficients),
            "tail": json.loads(self.tail),
            "claimed": [self.claimed_lo, self.claimed_hi],
            "empirical": empirical,
            "provenance": self.provenance,
            "classification": self.classification,
            "anomaly": bool(self.anomaly),
        }

    def __repr__(self):
        return f"<CatalogRecord {self.key[:30]}...>"


def get_engine(url=None):
    """Engine for the catalog database, creating the table on first use"""
    url = url or config.database_url or DEFAULT_DATABASE_URL
    try:
        engine = create_engine(url)
        Base.metadata.create_all(engine)
    except SQLAlchemyError as e:
        logging.error(f"Error opening catalog database {url}: {str(e)}")
        raise ConfigError(f"cannot open catalog database {url}: {str(e)}")
    return engine


def save_catalog(catalog, url=None):
    """
    Store every catalog entry, updating rows whose canonical key already exists

    Args:
        catalog (Catalog): Mined catalog
        url (str): SQLAlchemy URL, defaults to the configured database

    Returns:
        int: Number of newly inserted rows
    """
    engine = get_engine(url)
    inserted = 0
    with Session(engine) as session:
        try:
            # Step 1: upsert each entry by canonical key
            for entry in catalog.entries:
                record = entry_to_record(entry)
                row = session.scalars(select(CatalogRecord).where(CatalogRecord.key == record["key"])).first()
                if row is None:
                    row = CatalogRecord()
                    session.add(row)
                    inserted += 1
                row.update_from_record(record)
            # Step 2: commit once for the whole catalog
            session.commit()
        except SQLAlchemyError as e:
            session.rollback()
            logging.error(f"Error saving catalog: {str(e)}")
            raise PartitionLabError(f"saving the catalog failed: {str(e)}")
    logging.info(f"Saved {len(catalog.entries)} catalog entries ({inserted} new)")
    return inserted


def load_catalog_records(url=None):
    """All stored catalog records, ordered by insertion"""
    engine = get_engine(url)
    with Session(engine) as session:
        rows = session.scalars(select(CatalogRecord).order_by(CatalogRecord.id)).all()
        return [row.to_record() for row in rows]
