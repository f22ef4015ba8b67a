"""Host information and thread-count helpers."""

import platform
from dataclasses import dataclass
from typing import Optional

import numpy as np
import psutil


@dataclass
class SystemInfo:
    """System information container."""
    python_version: str
    numpy_version: str
    platform: str
    hostname: str
    cpu_count: int
    physical_cores: Optional[int]
    memory_total: int
    memory_available: int


def get_system_info() -> SystemInfo:
    """Gather the host facts shown by ``steelinv info``."""
    memory = psutil.virtual_memory()

    return SystemInfo(
        python_version=platform.python_version(),
        numpy_version=np.__version__,
        platform=platform.platform(),
        hostname=platform.node(),
        cpu_count=psutil.cpu_count() or 1,
        physical_cores=psutil.cpu_count(logical=False),
        memory_total=memory.total,
        memory_available=memory.available,
    )


def default_threads() -> int:
    """Physical core count, the default ceiling for ``--threads``."""
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


def format_bytes(bytes_val: float) -> str:
    """Format bytes into human-readable string."""
    for unit in ["B", "KB", "MB", "GB", "TB"]:
        if bytes_val < 1024:
            return f"{bytes_val:.1f} {unit}"
        bytes_val /= 1024
    return f"{bytes_val:.1f} PB"


def format_duration(seconds: float) -> str:
    """Render a wall time the way the comparison table shows it."""
    if seconds < 60:
        return f"{seconds:.1f} s"
    return f"{seconds / 60:.1f} min"
