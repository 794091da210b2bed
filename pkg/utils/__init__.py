"""Utils package."""

from utils.errors import YamabeError
from utils.logging import configure_logging

__all__ = [
    "YamabeError",
    "configure_logging",
]
