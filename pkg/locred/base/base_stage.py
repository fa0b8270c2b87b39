import json
import logging
from abc import ABC, abstractmethod
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from locred.base.exceptions import ConfigError


class StageStatus(Enum):
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"
    VERIFIED = "verified"


# stage results that later stages may consume
FINISHED = (StageStatus.COMPLETED, StageStatus.VERIFIED)


class ProcessLog:
    """Ordered record of stage transitions; finished entries carry the stage results."""

    def __init__(self):
        self.entries: List[Dict[str, Any]] = []
        self.start_time = datetime.now()
        self._started: Dict[str, datetime] = {}

    def log(self, owner: str, stage: str, data: Any, status: StageStatus, details: str = ""):
        now = datetime.now()
        if status is StageStatus.RUNNING:
            self._started[stage] = now
        started = self._started.get(stage)
        self.entries.append({
            "timestamp": now.isoformat(),
            "owner": owner,
            "stage": stage,
            "status": status.value,
            "data": data,
            "details": details,
            "elapsed_time": (now - self.start_time).total_seconds(),
            "stage_seconds": None if started is None or status is StageStatus.RUNNING
            else (now - started).total_seconds(),
        })
        logging.info(f"[{owner}] {stage}: {status.value}" + (f" - {details}" if details else ""))

    def get_stage_data(self, stage: str) -> Optional[Any]:
        finished = {s.value for s in FINISHED}
        return next((e["data"] for e in reversed(self.entries)
                     if e["stage"] == stage and e["status"] in finished), None)

    def require(self, stage: str) -> Dict[str, Any]:
        """Results of a finished stage; a stage run out of order is a configuration error."""
        data = self.get_stage_data(stage)
        if data is None:
            raise ConfigError(f"stage {stage} has not completed")
        return data

    def stage_durations(self) -> Dict[str, float]:
        return {e["stage"]: e["stage_seconds"] for e in self.entries if e["stage_seconds"] is not None}

    def elapsed_seconds(self) -> float:
        return (datetime.now() - self.start_time).total_seconds()

    def save_to_file(self, filepath: Path):
        """Write the entries as JSON; numeric payloads are summarised, not dumped."""
        Path(filepath).parent.mkdir(parents=True, exist_ok=True)
        serialisable = [
            {key: (value if key != "data" else _summarise(value)) for key, value in entry.items()}
            for entry in self.entries
        ]
        with open(filepath, 'w') as f:
            json.dump(serialisable, f, indent=2, default=str)


def _summarise(data: Any) -> Any:
    if isinstance(data, dict):
        return {key: _summarise(value) for key, value in data.items()}
    if isinstance(data, (str, int, float, bool)) or data is None:
        return data
    if isinstance(data, (list, tuple)) and all(isinstance(v, (str, int, float, bool)) for v in data):
        return list(data)
    return type(data).__name__


class BaseStage(ABC):
    """One step of an experiment run; writes its result into the ProcessLog."""

    name: str = "stage"

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def execute(self, process_log: ProcessLog, **kwargs) -> Dict[str, Any]:
        pass
