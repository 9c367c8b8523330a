import hashlib
import json
import logging
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional

CONSOLE_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
FILE_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def setup_logging(verbosity: int = 0, log_dir: Optional[str] = None) -> None:
    """Console handler on the root logger, plus pipeline.log when a directory is known."""
    level = logging.WARNING if verbosity < 0 else logging.DEBUG if verbosity > 0 else logging.INFO
    root = logging.getLogger()
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    root.addHandler(console)
    if log_dir:
        path = Path(log_dir)
        path.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path / 'pipeline.log')
        file_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
        root.addHandler(file_handler)


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


class RunLogger:
    def __init__(self, log_dir: str = "logs"):
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)

        # Run events: subcommand start/finish, numerical failures, validation failures
        self.run_logger = self._channel('dp3.run', 'run.log')

        # Audit trail of written artifacts
        self.audit_logger = self._channel('dp3.audit', 'audit.log')

    def _channel(self, name: str, filename: str) -> logging.Logger:
        channel = logging.getLogger(f'{name}.{self.log_dir.resolve()}')
        channel.setLevel(logging.INFO)
        channel.propagate = False
        if not channel.handlers:
            handler = RotatingFileHandler(
                self.log_dir / filename,
                maxBytes=1024*1024,  # 1MB
                backupCount=10
            )
            handler.setFormatter(logging.Formatter(FILE_FORMAT))
            channel.addHandler(handler)
        return channel

    def close(self) -> None:
        for channel in (self.run_logger, self.audit_logger):
            for handler in list(channel.handlers):
                handler.close()
                channel.removeHandler(handler)

    @staticmethod
    def _entry(event_type: str, message: str, details: Optional[Dict[str, Any]]) -> str:
        return json.dumps({
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'event_type': event_type,
            'message': message,
            'details': details or {}
        }, default=str)

    def log_run_event(self,
                      event_type: str,
                      message: str,
                      details: Optional[Dict[str, Any]] = None,
                      level: str = 'INFO'):
        """Log a run event as one JSON document."""
        log_method = getattr(self.run_logger, level.lower())
        log_method(self._entry(event_type, message, details))

    def log_artifact(self, path: Path, kind: str, details: Optional[Dict[str, Any]] = None) -> str:
        """Record a written file with its sha256; returns the digest."""
        digest = sha256_of(Path(path))
        payload = dict(details or {})
        payload.update({'path': str(path), 'kind': kind, 'sha256': digest})
        self.audit_logger.info(self._entry('ARTIFACT_WRITTEN', f'{kind} written', payload))
        return digest

    def log_numerical_failure(self, error: Exception, input_data: Any = None):
        """Log a numerical failure with the error's details."""
        details = error.to_dict() if hasattr(error, 'to_dict') else {'error': type(error).__name__}
        details['input'] = str(input_data)[:200]  # Truncate long inputs
        self.log_run_event('NUMERICAL_FAILURE', str(error), details, level='ERROR')

    def log_validation_failure(self,
                               validation_type: str,
                               input_data: Any,
                               reason: str):
        """Log validation failures."""
        self.log_run_event(
            event_type='VALIDATION_FAILURE',
            message=f'Validation failed for type: {validation_type}',
            details={
                'reason': reason,
                'input': str(input_data)[:200]
            },
            level='WARNING'
        )
