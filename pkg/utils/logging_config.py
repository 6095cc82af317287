"""
Logging configuration for the bearing fault detector.

Log records go to stdout (and optionally a file); stderr is left to the
command line's one-line error report.
"""
import logging
import sys
from typing import Optional, List, Dict, Any

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
NOISY_LOGGERS = ('sklearn', 'joblib')


def _attach(root: logging.Logger, handler: logging.Handler, level: int) -> None:
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    root.addHandler(handler)


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Configure the root logger for a pipeline run.

    Args:
        level: Logging level name (DEBUG, INFO, WARNING, ERROR, CRITICAL);
            unknown names fall back to INFO
        log_file: Optional path that receives the same records as stdout
    """
    numeric_level = getattr(logging, level.upper(), logging.INFO)
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    root_logger.handlers.clear()

    _attach(root_logger, logging.StreamHandler(sys.stdout), numeric_level)
    if log_file:
        _attach(root_logger, logging.FileHandler(log_file, encoding='utf-8'), numeric_level)

    for name in NOISY_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)


class RunLogCollector(logging.Handler):
    """Keeps the most recent log records of a run in memory.

    The bench harness attaches one while it runs so that warnings and errors
    raised by individual detectors end up in its summary.
    """

    def __init__(self, max_logs: int = 200):
        super().__init__()
        self.logs: List[Dict[str, Any]] = []
        self.max_logs = max_logs

    def emit(self, record):
        try:
            self.logs.append({
                'timestamp': record.created,
                'level': record.levelname,
                'message': record.getMessage(),
                'logger': record.name,
            })
            del self.logs[:-self.max_logs]
        except Exception:
            self.handleError(record)

    def get_logs(self, level: Optional[str] = None) -> List[Dict[str, Any]]:
        """Stored records, optionally only those at ``level``."""
        if level:
            return [log for log in self.logs if log['level'] == level]
        return list(self.logs)

    def clear_logs(self):
        self.logs.clear()
