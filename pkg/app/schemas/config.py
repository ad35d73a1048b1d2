"""
Pydantic schema for one command-line run.
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class RunConfig(BaseModel):
    """Validated options shared by every `ddl` sub-command."""

    model_config = ConfigDict(frozen=True)

    input_path: Optional[Path] = Field(default=None, description="KB source file")
    output_path: Optional[Path] = Field(default=None, description="Report destination, stdout when unset")
    format: Literal["text", "json"] = "text"
    oracle: Optional[str] = Field(default=None, description="External oracle command")
    timeout: float = Field(default=30.0, gt=0, description="External oracle timeout in seconds")
    seed: int = 1
    cases: int = Field(default=100, ge=1)
    mode: Literal["all", "cautious", "brave"] = "all"
    query: Optional[str] = None
    artifacts_dir: Optional[Path] = Field(default=None, description="Where failing postulate cases are dumped")
