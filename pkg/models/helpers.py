import logging
import sys
from typing import Optional, Union


LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

logger = logging.getLogger(__name__)


def setup_logging(level: Union[str, int] = logging.INFO) -> None:
    """Configure root logging for the CLI

    Args:
        level: Level name ("DEBUG", "INFO", ...) or logging constant
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def resolve_log_level(configured: str, verbose: bool = False, quiet: bool = False) -> str:
    """CLI flags win over the configured level"""
    if verbose:
        return "DEBUG"
    if quiet:
        return "WARNING"
    return configured


def show_progress(quiet: bool = False, stream: Optional[object] = None) -> bool:
    """Progress bars only on an interactive stderr"""
    stream = stream if stream is not None else sys.stderr
    return not quiet and hasattr(stream, "isatty") and stream.isatty()


def handle_keyboard_interrupt(signum, frame):
    """Handle keyboard interrupt (Ctrl+C)"""
    print("\n\nInterrupted.", file=sys.stderr)
    sys.exit(130)
