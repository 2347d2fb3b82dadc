import json
import logging
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel

logger = logging.getLogger(__name__)


class HistoryLogger:
    """Append-only JSON-lines log of CLI runs, enabled by KG_HISTORY_FILE."""

    def __init__(self, path: Optional[str] = None):
        path = path or os.getenv("KG_HISTORY_FILE")
        self.path: Optional[Path] = Path(path) if path else None
        if self.path is None:
            logger.debug("KG_HISTORY_FILE not set, run history disabled")

    def is_enabled(self) -> bool:
        return self.path is not None

    def log_cli_command(
        self,
        command: str,
        parameters: Optional[Dict[str, Any]] = None,
        result: Optional[Any] = None,
        success: bool = True,
        error: Optional[str] = None,
    ) -> Optional[Dict[str, Any]]:
        """Record one CLI command execution."""
        document: Dict[str, Any] = {
            "type": "cli_command",
            "command": command,
            "parameters": self._serialize_object(parameters or {}),
            "success": success,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        if result is not None:
            document["result"] = self._serialize_object(result)
        if error:
            document["error"] = error

        if self.path is None:
            return None
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(document, sort_keys=True) + "\n")
        except OSError as e:
            logger.error(f"Could not write run history to {self.path}: {e}")
            return None
        return document

    def get_history(self, limit: int = 100, command: Optional[str] = None) -> List[Dict[str, Any]]:
        """Most recent entries first."""
        if self.path is None or not self.path.exists():
            return []
        entries = []
        with self.path.open("r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    logger.warning(f"Skipping malformed history line in {self.path}")
                    continue
                if command is None or entry.get("command") == command:
                    entries.append(entry)
        return entries[::-1][:limit]

    def _serialize_object(self, obj: Any) -> Any:
        """Convert an object to a JSON-serializable format."""
        if isinstance(obj, (str, int, float, bool, type(None))):
            return obj
        if isinstance(obj, BaseModel):
            return self._serialize_object(obj.model_dump(mode="json"))
        if isinstance(obj, dict):
            return {str(k): self._serialize_object(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self._serialize_object(item) for item in obj]
        if hasattr(obj, "tolist"):
            return obj.tolist()
        return str(obj)


_history_logger: Optional[HistoryLogger] = None


def get_history_logger() -> HistoryLogger:
    """Get or create the shared history logger."""
    global _history_logger
    if _history_logger is None:
        _history_logger = HistoryLogger()
    return _history_logger


def reset_history_logger() -> None:
    global _history_logger
    _history_logger = None
