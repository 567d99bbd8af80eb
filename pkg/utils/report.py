"""Fidelity reports: deterministic JSON for scripts, jinja2 text for people."""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from jinja2 import Environment, PackageLoader

logger = logging.getLogger(__name__)

TOOL_NAME = "avgfid"


@dataclass
class ReportDocument:
    command: str
    version: str
    channel: Dict[str, Any]
    results: Dict[str, Any]
    method: Optional[str] = None
    gate: Optional[Dict[str, Any]] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    duration_seconds: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        # key order is part of the output format
        data: Dict[str, Any] = {"tool": {"name": TOOL_NAME, "version": self.version}, "command": self.command}
        if self.method is not None:
            data["method"] = self.method
        data["channel"] = self.channel
        if self.gate is not None:
            data["gate"] = self.gate
        data["parameters"] = self.parameters
        data["results"] = self.results
        if self.duration_seconds is not None:
            data["duration_seconds"] = self.duration_seconds
        return data

    def to_json(self) -> str:
        # floats use their shortest round-trip repr, so every double is preserved exactly
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def render_text(self) -> str:
        return _environment().get_template("report.j2").render(report=self.to_dict()).rstrip() + "\n"

    def render(self, output_format: str = "json") -> str:
        if output_format == "text":
            return self.render_text()
        return self.to_json()


def _format_number(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, float):
        return str(value)
    return f"{value:.15g}"


_env: Optional[Environment] = None


def _environment() -> Environment:
    global _env
    if _env is None:
        _env = Environment(loader=PackageLoader("utils", "templates"), autoescape=False, trim_blocks=True, lstrip_blocks=True, keep_trailing_newline=True)
        _env.filters["num"] = _format_number
    return _env
