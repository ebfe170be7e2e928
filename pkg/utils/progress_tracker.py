import time
import logging
from typing import Dict, Any


class ScanProgressTracker:
    """Logs progress of a long scan with elapsed time and ETA."""

    def __init__(self, label: str, total_steps: int, report_every: float = 0.1):
        self.logger = logging.getLogger(__name__)
        self.label = label
        self.total_steps = max(total_steps, 1)
        self.current_step = 0
        self.report_every = max(1, int(self.total_steps * report_every))
        self.start_time = time.time()

    def update_step(self, step: int):
        """Update current step; logs every `report_every` fraction of the scan."""
        self.current_step = step
        if step % self.report_every and step != self.total_steps:
            return
        elapsed_time = time.time() - self.start_time
        if step > 0:
            estimated_remaining = elapsed_time / step * (self.total_steps - step)
            self.logger.info(
                f"{self.label} ({step}/{self.total_steps}) - "
                f"Elapsed: {self._format_time(elapsed_time)} - "
                f"ETA: {self._format_time(estimated_remaining)}"
            )

    def complete(self):
        elapsed_time = time.time() - self.start_time
        self.logger.info(f"{self.label} completed in {self._format_time(elapsed_time)}")

    def _format_time(self, seconds: float) -> str:
        """Format time in human-readable format."""
        if seconds < 60:
            return f"{seconds:.1f}s"
        elif seconds < 3600:
            minutes = seconds // 60
            seconds = seconds % 60
            return f"{int(minutes)}m {int(seconds):02d}s"
        else:
            hours = seconds // 3600
            minutes = (seconds % 3600) // 60
            return f"{int(hours)}h {int(minutes)}m"

    def get_progress_info(self) -> Dict[str, Any]:
        """Get current progress information."""
        return {
            'label': self.label,
            'current_step': self.current_step,
            'total_steps': self.total_steps,
            'progress_percentage': (self.current_step / self.total_steps) * 100,
            'elapsed_time': time.time() - self.start_time,
            'is_complete': self.current_step >= self.total_steps,
        }
