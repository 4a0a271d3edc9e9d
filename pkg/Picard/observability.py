import logging
import json
import os
from datetime import datetime

from Picard.config import Config

# Setup logging
log_dir = Config.LOG_DIR
os.makedirs(log_dir, exist_ok=True)
log_file = os.path.join(log_dir, "picard.log")

logger = logging.getLogger("picard")
if not logger.handlers:
    handler = logging.FileHandler(log_file)
    handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(Config.LOG_LEVEL.upper())
    # stdout belongs to the CLI
    logger.propagate = False


class Observability:
    @staticmethod
    def log_step(step_name: str, input_data: dict, output_data: dict):
        """Logs one computation step as a JSON line."""
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "step": step_name,
            "input": str(input_data),
            "output": str(output_data)
        }
        logger.info(json.dumps(log_entry))

    @staticmethod
    def record_report(report):
        """Appends a verification report summary to the history file."""
        history_file = os.path.join(log_dir, "verifications.json")
        entry = {
            "name": report.name,
            "seed": report.seed,
            "trials": report.trials,
            "parameters": dict(report.parameters),
            "passed": report.passed,
            "checks": [check.name for check in report.checks],
            "timestamp": datetime.now().isoformat()
        }

        history = []
        if os.path.exists(history_file):
            with open(history_file, "r") as f:
                try:
                    history = json.load(f)
                except json.JSONDecodeError:
                    pass

        history.append(entry)

        with open(history_file, "w") as f:
            json.dump(history, f, indent=2)
