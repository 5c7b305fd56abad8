"""Centralized logging for the QED workbench."""

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional

from utils.config import config
from utils.serialization import sanitize_for_json


class QedLogger:
    """Centralized logging for searches, oracle runs and law checks.

    The console handler writes to stderr; stdout carries reports only.
    """

    def __init__(self, name: str = "qedlab", level: str = config.LOG_LEVEL):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, level.upper(), logging.INFO))
        self.audit_logger: Optional[logging.Logger] = None

        if not self.logger.handlers:
            self._setup_handlers()

    def _setup_handlers(self):
        """Setup logging handlers."""
        console_handler = logging.StreamHandler(sys.stderr)
        console_formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        console_handler.setFormatter(console_formatter)
        self.logger.addHandler(console_handler)

        if not config.LOG_TO_FILE:
            return

        try:
            log_dir = Path(config.LOG_DIR)
            log_dir.mkdir(exist_ok=True)

            file_handler = logging.FileHandler(log_dir / 'qedlab.log')
            file_formatter = logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
            )
            file_handler.setFormatter(file_formatter)
            self.logger.addHandler(file_handler)

            error_handler = logging.FileHandler(log_dir / 'qedlab_errors.log')
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(file_formatter)
            self.logger.addHandler(error_handler)

            # JSON lines, one per search / oracle / law event
            audit_handler = logging.FileHandler(log_dir / 'qedlab_audit.log')
            audit_handler.setFormatter(logging.Formatter('%(message)s'))
            self.audit_logger = logging.getLogger('qedlab.audit')
            self.audit_logger.setLevel(logging.INFO)
            self.audit_logger.propagate = False
            self.audit_logger.addHandler(audit_handler)

            self.logger.info(f"File logging initialized under {log_dir}")

        except Exception as e:
            self.logger.warning(f"Could not create file handlers: {e}")

    def get_logger(self) -> logging.Logger:
        """Get the logger instance."""
        return self.logger

    def _audit(self, kind: str, subject: str, event: str, details: Dict[str, Any]):
        if self.audit_logger is None:
            return
        entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "kind": kind,
            "subject": subject,
            "event": event,
            "details": sanitize_for_json(details),
        }
        self.audit_logger.info(json.dumps(entry, sort_keys=True))

    def log_search(self, system: str, event: str, details: Dict[str, Any], level: str = "INFO"):
        """Log QED-test search events."""
        log_method = getattr(self.logger, level.lower())
        log_method(f"Search {system}: {event} - {json.dumps(sanitize_for_json(details), sort_keys=True)}")
        self._audit("search", system, event, details)

    def log_oracle(self, system: str, depth: int, bug_count: int, complete: bool):
        """Log bug-oracle results."""
        details = {"depth": depth, "bugs": bug_count, "complete": complete}
        level = logging.INFO if complete else logging.WARNING
        self.logger.log(level, f"Oracle {system}: {bug_count} bugs up to depth {depth}"
                        f"{'' if complete else ' (incomplete)'}")
        self._audit("oracle", system, "bugs", details)

    def log_law(self, law: str, instances: int, violations: int, systems: int):
        """Log law-check outcomes."""
        details = {"instances": instances, "violations": violations, "systems": systems}
        if violations:
            self.logger.error(f"Law {law}: {violations} violations over {instances} instances")
        else:
            self.logger.info(f"Law {law}: {instances} instances on {systems} systems, no violations")
        self._audit("law", law, "checked", details)


# Global logger instance
qed_logger = QedLogger()
logger = qed_logger.get_logger()
