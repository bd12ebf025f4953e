from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Sequence

PROJECT_ROOT = Path(__file__).resolve().parents[2]
CLI_SCRIPT = PROJECT_ROOT / "apps" / "lab" / "src" / "cli" / "run_lab.py"


@dataclass(frozen=True)
class LabRun:
    code: int
    stdout: str
    stderr: str


LabRunner = Callable[[Sequence[str]], LabRun]


def build_cli_env() -> dict[str, str]:
    env = os.environ.copy()
    search_paths = [
        str(PROJECT_ROOT),
        str(PROJECT_ROOT / "apps" / "lab" / "src"),
        str(PROJECT_ROOT / "packages"),
    ]
    existing = env.get("PYTHONPATH")
    if existing:
        search_paths.append(existing)
    env["PYTHONPATH"] = os.pathsep.join(search_paths)
    return env


def assert_result_document(payload: Dict[str, Any], *, command: str) -> None:
    for key in ("request", "results", "table", "notes"):
        assert key in payload, f"document missing '{key}'"
    assert payload["request"].get("command") == command, "request echo carries the wrong command"
    assert isinstance(payload["results"], dict) and payload["results"], "results must be populated"
    assert isinstance(payload["notes"], list), "notes must be a list"
    table = payload["table"]
    if table is not None:
        width = len(table["columns"])
        assert all(len(row) == width for row in table["rows"]), "table rows must match the header"


def extract_json_from_mixed_output(raw_output: str) -> Dict[str, Any]:
    """
    Log lines can end up interleaved with the document when stderr is merged
    into stdout. Slice from the first '{' to the last '}' so json.loads can parse it.
    """
    start = raw_output.find("{")
    end = raw_output.rfind("}")
    if start == -1 or end == -1 or end <= start:
        raise ValueError("Could not locate JSON payload in CLI output")
    snippet = raw_output[start : end + 1]
    return json.loads(snippet)
