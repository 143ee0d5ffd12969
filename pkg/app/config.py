from pydantic_settings import BaseSettings
from typing import List, Literal, Optional
import logging
import os


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "Bilateral Trade Lab"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    HOST: str = "0.0.0.0"
    PORT: int = 8000
    LOG_LEVEL: str = "INFO"

    # API Authentication (open API when unset)
    API_SECRET_KEY: Optional[str] = None

    # CORS
    CORS_ORIGINS: List[str] = ["http://localhost:5173", "http://localhost:3000"]

    # Storage
    STORAGE_PATH: str = "./storage"
    MAX_SEQUENCE_ROWS: int = 1_000_000

    # Experiments
    DEFAULT_MASTER_SEED: int = 20240501
    WORKERS: int = 1
    LOG_BASE: Literal["e", "2"] = "e"
    FLOAT_DIGITS: int = 17
    SLOPE_MIN_HORIZON: int = 256
    SLOPE_MIN_POINTS: int = 4

    # Learners
    EXP3P_DELTA: Optional[float] = None

    @property
    def traces_dir(self) -> str:
        return os.path.join(self.STORAGE_PATH, "traces")

    @property
    def summaries_dir(self) -> str:
        return os.path.join(self.STORAGE_PATH, "summaries")

    @property
    def curves_dir(self) -> str:
        return os.path.join(self.STORAGE_PATH, "curves")

    @property
    def sequences_dir(self) -> str:
        return os.path.join(self.STORAGE_PATH, "sequences")

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


settings = Settings()


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging once for CLI and server entry points"""
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
