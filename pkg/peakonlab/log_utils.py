"""
Run logging helpers

log_execution writes one JSON record per node execution under {run_dir}/logs/ and appends a
readable block to {run_dir}/logs/run.log. Events go to {run_dir}/events.jsonl without
timestamps, so that file stays reproducible.
"""
import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import numpy as np
from pydantic import BaseModel

from peakonlab.exporters import event_line
from peakonlab.state import Event


def summarize(value: Any) -> Any:
    """Short JSON-friendly description of a state value"""
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, np.ndarray):
        return f"ndarray{value.shape}"
    if isinstance(value, BaseModel):
        return type(value).__name__
    if isinstance(value, dict):
        return {str(k): summarize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return f"{type(value).__name__}[{len(value)}]"
    return type(value).__name__


def log_execution(run_dir: Optional[str], node_name: str, state_update: Dict[str, Any],
                  metadata: Optional[Dict[str, Any]] = None):
    """
    Log node execution and state updates.

    Creates logs in: {run_dir}/logs/{node_name}_{timestamp}.json and {run_dir}/logs/run.log

    Args:
        run_dir: Run directory path (None disables logging)
        node_name: Name of the node
        state_update: State changes made by the node
        metadata: Additional numbers worth keeping (drift, margins, ...)
    """
    if not run_dir:
        return
    logs_dir = Path(run_dir) / "logs"
    logs_dir.mkdir(parents=True, exist_ok=True)

    # Capture timestamp once for consistency
    now = datetime.now()
    timestamp = now.strftime("%Y%m%d_%H%M%S_%f")
    timestamp_iso = now.isoformat()

    entry = {
        "timestamp": timestamp_iso,
        "node": node_name,
        "update": summarize(state_update),
        "metadata": summarize(metadata or {}),
    }
    with open(logs_dir / f"{node_name}_{timestamp}.json", "w", encoding="utf-8") as f:
        json.dump(entry, f, indent=2, ensure_ascii=False)

    with open(logs_dir / "run.log", "a", encoding="utf-8") as f:
        f.write(f"\n{'='*60}\n")
        f.write(f"[{timestamp_iso}] NODE: {node_name}\n")
        f.write(f"{'='*60}\n")
        for key, value in state_update.items():
            if key == "status":
                f.write(f"status: {value}\n")
            elif key == "events":
                f.write(f"events: {len(value)}\n")
            elif key == "checks":
                failed = [c.name for c in value if not c.passed]
                f.write(f"checks: {len(value)} ({len(failed)} failed)\n")
                for name in failed:
                    f.write(f"  FAILED {name}\n")
        for key, value in (metadata or {}).items():
            f.write(f"{key}: {value}\n")
        f.write("\n")

    print(f"[LOG] {node_name} execution logged")


def log_event(run_dir: Optional[str], event: Event):
    """Append one structured event to {run_dir}/events.jsonl"""
    if not run_dir:
        return
    path = Path(run_dir) / "events.jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8", newline="\n") as f:
        f.write(event_line(event) + "\n")


def log_events(run_dir: Optional[str], events: Iterable[Event]):
    for event in events:
        log_event(run_dir, event)
