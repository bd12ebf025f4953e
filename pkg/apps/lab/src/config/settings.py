from __future__ import annotations

from functools import lru_cache
from typing import Literal

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LoggingConfig(BaseModel):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"
    json_lines: bool = False


class OutputConfig(BaseModel):
    significant_digits: int = Field(default=9, ge=1, le=17)
    default_format: Literal["json", "csv"] = "json"


class SamplerDefaults(BaseModel):
    seed: int = Field(default=20240601, ge=0)
    samples: int = Field(default=100_000, ge=1)
    workers: int = Field(default=1, ge=1)
    chunk_size: int = Field(default=65536, ge=1)


class OptimizerDefaults(BaseModel):
    restarts: int = Field(default=50, ge=1)
    seed: int = Field(default=7, ge=0)
    max_sweeps: int = Field(default=400, ge=1)


class SelftestConfig(BaseModel):
    # every suite tolerance is multiplied by this; a negative value fails every check
    tolerance_scale: float = 1.0
    samples: int = Field(default=200_000, ge=2)
    seed: int = Field(default=11, ge=0)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="QTHERMO_",
        case_sensitive=False,
        extra="ignore",
        env_nested_delimiter="__",
        env_file_encoding="utf-8",
    )

    APP_NAME: str = "qthermo-lab"
    APP_VERSION: str = "0.1.0"

    LOGGING: LoggingConfig = LoggingConfig()
    OUTPUT: OutputConfig = OutputConfig()
    SAMPLER: SamplerDefaults = SamplerDefaults()
    OPTIMIZER: OptimizerDefaults = OptimizerDefaults()
    SELFTEST: SelftestConfig = SelftestConfig()


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
