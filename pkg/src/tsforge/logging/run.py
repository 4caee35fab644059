"""Run directory bookkeeping for CLI commands"""

import csv
import json
import logging
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from .. import __version__

logger = logging.getLogger(__name__)

LOSS_FILE = "loss_history.csv"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


class RunLogger:
    """Owns one run directory: run.json, VERSION, the config snapshot and the loss trace"""

    def __init__(self, run_dir: Path, command: str):
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)

        self._run_id = str(uuid.uuid4())
        self._command = command
        self._started_at = _utc_now()
        self._ended_at: Optional[str] = None
        self._status = "running"
        self._outputs: List[str] = []
        self._summary: Dict[str, Any] = {}
        self._loss_file = None
        self._loss_writer = None

        (self.run_dir / "VERSION").write_text(__version__ + "\n")
        self._save()
        logger.info(f"Run {self._run_id} ({command}) writing to {self.run_dir}")

    @property
    def run_id(self) -> str:
        return self._run_id

    @property
    def outputs(self) -> List[str]:
        return list(self._outputs)

    def path(self, name: str) -> Path:
        return self.run_dir / name

    def declare_output(self, name: str) -> Path:
        """Record an output file the run promises to produce"""
        if name not in self._outputs:
            self._outputs.append(name)
            self._save()
        return self.run_dir / name

    def snapshot_config(self, settings) -> Path:
        path = self.declare_output("config.json")
        settings.snapshot(path)
        return path

    def log_loss(self, step: int, d_loss: float, g_loss: float) -> None:
        """Append one row to the loss history; flushed so a crashed run keeps its trace"""
        if self._loss_writer is None:
            path = self.declare_output(LOSS_FILE)
            resuming = path.exists() and path.stat().st_size > 0
            self._loss_file = open(path, "a" if resuming else "w", newline="")
            self._loss_writer = csv.writer(self._loss_file)
            if not resuming:
                self._loss_writer.writerow(["step", "d_loss", "g_loss"])
        self._loss_writer.writerow([step, repr(float(d_loss)), repr(float(g_loss))])
        self._loss_file.flush()

    def truncate_loss_history(self, last_step: int) -> None:
        """Drop rows after ``last_step`` so a resumed run appends a continuous trace"""
        path = self.run_dir / LOSS_FILE
        if not path.exists():
            return
        with open(path, "r", newline="") as f:
            rows = list(csv.reader(f))
        kept = [rows[0]] + [r for r in rows[1:] if r and int(r[0]) <= last_step] if rows else []
        with open(path, "w", newline="") as f:
            csv.writer(f).writerows(kept)
        logger.debug(f"Loss history truncated to step {last_step}")

    def set_summary(self, **values: Any) -> None:
        self._summary.update(values)
        self._save()

    def _save(self) -> None:
        data = {
            "run_id": self._run_id,
            "command": self._command,
            "version": __version__,
            "started_at": self._started_at,
            "ended_at": self._ended_at,
            "status": self._status,
            "outputs": self._outputs,
            "summary": self._summary,
        }
        with open(self.run_dir / "run.json", "w") as f:
            json.dump(data, f, indent=2)

    def end_run(self, status: str = "ok") -> str:
        """
        Close the loss file and record the final status, which is returned.
        An ok run with a declared output missing on disk ends "incomplete".
        """
        if self._loss_file is not None:
            self._loss_file.close()
            self._loss_file = None
            self._loss_writer = None
        missing = [name for name in self._outputs if not (self.run_dir / name).exists()]
        if status == "ok" and missing:
            status = "incomplete"
            logger.error(f"Run {self._run_id} is missing declared outputs: {missing}")
        self._status = status
        self._ended_at = _utc_now()
        self._save()
        logger.info(f"Run {self._run_id} ended: {status}")
        return status

    @staticmethod
    def read(run_dir: Path) -> Dict[str, Any]:
        with open(Path(run_dir) / "run.json", "r") as f:
            return json.load(f)
