import logging
import os
import sys
from datetime import datetime

LOG_FILE = f"{datetime.now().strftime('%m_%d_%Y_%H_%M_%S')}.log"
log_dir = os.path.join(os.getcwd(), "logs")

# Create the log directory if it doesn't exist
os.makedirs(log_dir, exist_ok=True)

LOG_FILE_PATH = os.path.join(log_dir, LOG_FILE)
LOG_FORMAT = "[%(asctime)s] %(name)s - %(levelname)s - %(message)s"

logging.basicConfig(
    filename=LOG_FILE_PATH,
    format=LOG_FORMAT,
    level=logging.INFO
)


def enable_console_logging(level: int = logging.INFO) -> None:
    """Mirror log records to stderr (used by the CLI --verbose flag)."""
    root = logging.getLogger()
    for handler in root.handlers:
        if getattr(handler, "_console_mirror", False):
            return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler.setLevel(level)
    handler._console_mirror = True
    root.addHandler(handler)
