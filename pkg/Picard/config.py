import logging
import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    LOG_DIR = os.getenv("PICARD_LOG_DIR", os.path.join(os.path.dirname(os.path.dirname(__file__)), "logs"))
    LOG_LEVEL = os.getenv("PICARD_LOG_LEVEL", "INFO")
    DEFAULT_SEED = int(os.getenv("PICARD_SEED", "0"))
    DEFAULT_TRIALS = int(os.getenv("PICARD_TRIALS", "20"))
    SAMPLE_HEIGHT = int(os.getenv("PICARD_SAMPLE_HEIGHT", "100"))
    SYMBOLIC_DISC_MAX_DEGREE = int(os.getenv("PICARD_SYMBOLIC_DISC_MAX_DEGREE", "8"))
    MAX_WORKERS = int(os.getenv("PICARD_MAX_WORKERS", "4"))
    SNF_SAMPLES = int(os.getenv("PICARD_SNF_SAMPLES", "200"))
    GRID_MAX_GENUS = int(os.getenv("PICARD_GRID_MAX_GENUS", "12"))
    GRID_MAX_N = int(os.getenv("PICARD_GRID_MAX_N", "10"))

    @staticmethod
    def validate():
        if logging.getLevelName(Config.LOG_LEVEL.upper()) not in (
            logging.DEBUG, logging.INFO, logging.WARNING, logging.ERROR, logging.CRITICAL
        ):
            raise ValueError(f"PICARD_LOG_LEVEL '{Config.LOG_LEVEL}' is not a logging level.")
        if Config.DEFAULT_SEED < 0:
            raise ValueError("PICARD_SEED must be non-negative.")
        for name in ("DEFAULT_TRIALS", "SAMPLE_HEIGHT", "MAX_WORKERS", "SNF_SAMPLES", "GRID_MAX_GENUS", "GRID_MAX_N"):
            if getattr(Config, name) < 1:
                raise ValueError(f"{name} must be a positive integer.")
        if Config.SYMBOLIC_DISC_MAX_DEGREE < 2:
            raise ValueError("PICARD_SYMBOLIC_DISC_MAX_DEGREE must be at least 2.")
