"""Utility functions and helpers."""

from .logging import get_logger, setup_logger
from .system import SystemInfo, default_threads, format_duration, get_system_info

__all__ = [
    "SystemInfo",
    "default_threads",
    "format_duration",
    "get_logger",
    "get_system_info",
    "setup_logger",
]
