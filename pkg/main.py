import signal
import sys
from pathlib import Path
from typing import Optional

from loguru import logger

from lib import cli
from lib.settings import load_settings


def setup_logger(level: Optional[str] = None):
    """Console logging on stderr (stdout carries reports) plus an optional rotating file."""
    config = load_settings()["logging"]
    logger.remove()  # Remove default handler
    logger.add(
        sys.stderr,
        colorize=True,
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <level>{message}</level>",
        level=level or config["console_level"],
    )
    if config["file_enabled"]:
        log_file_path = Path(__file__).parent / config["file_path"]
        logger.add(
            log_file_path,
            rotation="10 MB",
            retention="7 days",
            format="{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}",
            level="DEBUG",
            encoding="utf-8",
        )
        logger.debug(f"Logging to '{log_file_path}'")


def handle_exit(sig, frame):
    """Gracefully handle Ctrl+C."""
    logger.warning("EXIT SIGNAL RECEIVED")
    sys.exit(130)


def main():
    args = cli.build_parser().parse_args()
    setup_logger(args.log_level)
    signal.signal(signal.SIGINT, handle_exit)
    sys.exit(cli.execute(args))


if __name__ == "__main__":
    main()
