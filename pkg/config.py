import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()

logger = logging.getLogger(__name__)

ROOT = Path(__file__).resolve().parent


class Settings(BaseModel):
    """Tunables for chartforge, read from CHARTFORGE_* environment variables."""

    database_url: Optional[str] = None
    log_level: str = "WARNING"
    rules_dir: Path = ROOT / "rules"
    cycle_cap: int = Field(10_000, ge=1)
    domain_cap: int = Field(4096, ge=1)
    site_cap: int = Field(5000, ge=1)
    split_depth: int = Field(1, ge=0)
    workers: int = Field(1, ge=1)

    @classmethod
    def from_env(cls) -> "Settings":
        values = {}
        for name in cls.model_fields:
            raw = os.getenv(f"CHARTFORGE_{name.upper()}")
            if raw is not None and raw != "":
                values[name] = raw
        return cls(**values)

    def report_url(self) -> str:
        if self.database_url:
            return self.database_url
        logger.warning("CHARTFORGE_DATABASE_URL not set, falling back to in-memory SQLite")
        return "sqlite://"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings.from_env()


def configure_logging(level: Optional[str] = None) -> None:
    level = (level or get_settings().log_level).upper()
    root = logging.getLogger()
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s: %(name)s: %(message)s"))
        root.addHandler(handler)
    root.setLevel(level)
