"""
Centralized configuration for divlog.
Loads from environment variables (prefix ``DIVLOG_``) / .env file via pydantic-settings.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from divlog.core.search import SearchBudget

# ── Project paths ────────────────────────────────────────────────────────────

PROJECT_ROOT = Path(__file__).resolve().parent.parent
SCENARIOS_DIR = PROJECT_ROOT / "scenarios"
REPORTS_DIR = PROJECT_ROOT / "reports"


class Settings(BaseSettings):
    """Search bounds and output options, loaded from .env or environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="DIVLOG_",
        env_file=str(PROJECT_ROOT / ".env"),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # ── Enumeration bounds ────────────────────────────────────────────────
    max_carrier: int = 3
    grid_denom: int = 4
    cost_bound: int = 3
    depth: int = 3

    # Largest finite set enumerated for P(N x -)
    max_set_size: int = 2

    # Above this many cases a check switches from exhaustive to seeded sampling
    max_cases: int = 20_000

    # Renyi orders for zCDP/tCDP sups, "start:stop:step" or a comma list
    alpha_grid: str = "1.125:16:0.125"

    tolerance: float = 1e-9
    seed: int = 0

    # ── Output ────────────────────────────────────────────────────────────
    output_format: Literal["text", "json"] = "text"
    jobs: int = 1
    report_dir: str = str(REPORTS_DIR)

    @field_validator("max_carrier", "grid_denom", "cost_bound", "depth", "max_set_size",
                     "max_cases", "jobs")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("bounds must be positive")
        return value

    @field_validator("tolerance")
    @classmethod
    def _positive_tolerance(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("tolerance must be > 0")
        return value

    # ── Helpers ───────────────────────────────────────────────────────────

    def budget(self) -> SearchBudget:
        """Freeze the enumeration bounds into the budget every checker takes."""
        return SearchBudget(
            max_carrier=self.max_carrier,
            grid_denom=self.grid_denom,
            cost_bound=self.cost_bound,
            depth=self.depth,
            max_set_size=self.max_set_size,
            max_cases=self.max_cases,
            seed=self.seed,
            tolerance=self.tolerance,
        )

    def snapshot(self) -> dict[str, object]:
        """Config echo written into every report."""
        return {
            "max_carrier": self.max_carrier,
            "grid_denom": self.grid_denom,
            "cost_bound": self.cost_bound,
            "depth": self.depth,
            "max_set_size": self.max_set_size,
            "max_cases": self.max_cases,
            "alpha_grid": self.alpha_grid,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


# ── Singleton ─────────────────────────────────────────────────────────────

_settings: Settings | None = None


def get_settings() -> Settings:
    """Get or create the global settings instance."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings
