"""
Bandwidth - Memory Throughput Harness

Compares the throughput of element-wise float64 addition over Variables
with a plain single-threaded memory copy of the same size. Element-wise
operations without variances should be bound by memory bandwidth, so the
add throughput is expected to reach a sizeable fraction of memcpy.

Bytes moved per element:
    memcpy: 16 (read 8, write 8)
    add:    24 (read 2 x 8, write 8)

Usage:
    from lib.bandwidth import measure

    report = measure(size=10_000_000, repeat=5)
    print(report.ratio)
"""

import logging
from dataclasses import dataclass
from timeit import default_timer as timer
from typing import Callable

import numpy as np

from src import ops
from src.units import m
from src.variable import array

logger = logging.getLogger(__name__)

DEFAULT_SIZE = 10_000_000
DEFAULT_REPEAT = 5

ITEMSIZE = np.dtype(np.float64).itemsize


@dataclass
class BandwidthReport:
    """
    Result of one measurement.

    Attributes:
        size: Elements per array
        repeat: Timed repetitions (best is kept)
        memcpy_seconds: Best time of one copy
        add_seconds: Best time of one Variable addition
    """
    size: int
    repeat: int
    memcpy_seconds: float
    add_seconds: float

    @property
    def memcpy_bytes(self) -> int:
        return 2 * ITEMSIZE * self.size

    @property
    def add_bytes(self) -> int:
        return 3 * ITEMSIZE * self.size

    @property
    def memcpy_throughput(self) -> float:
        """Bytes per second."""
        return self.memcpy_bytes / self.memcpy_seconds

    @property
    def add_throughput(self) -> float:
        """Bytes per second."""
        return self.add_bytes / self.add_seconds

    @property
    def ratio(self) -> float:
        """Add throughput as a fraction of memcpy throughput."""
        return self.add_throughput / self.memcpy_throughput


def _best_time(fn: Callable[[], object], repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t_start = timer()
        fn()
        elapsed = timer() - t_start
        best = min(best, elapsed)
    return max(best, 1e-12)


def measure(size: int = DEFAULT_SIZE, repeat: int = DEFAULT_REPEAT) -> BandwidthReport:
    """
    Time memcpy and Variable addition over size float64 elements.

    Args:
        size: Elements per array
        repeat: Repetitions; the fastest is reported

    Returns:
        BandwidthReport
    """
    if size < 1 or repeat < 1:
        raise ValueError("size and repeat must be positive")

    src_buf = np.ones(size, dtype=np.float64)
    dst_buf = np.empty_like(src_buf)
    # warm up pages of the destination
    np.copyto(dst_buf, src_buf)
    memcpy_seconds = _best_time(lambda: np.copyto(dst_buf, src_buf), repeat)

    a = array(["x"], np.ones(size, dtype=np.float64), unit=m)
    b = array(["x"], np.full(size, 2.0, dtype=np.float64), unit=m)
    ops.add(a, b)
    add_seconds = _best_time(lambda: ops.add(a, b), repeat)

    report = BandwidthReport(size, repeat, memcpy_seconds, add_seconds)
    logger.debug(
        f"bandwidth size={size}: memcpy {memcpy_seconds:.6f}s, add {add_seconds:.6f}s, "
        f"ratio {report.ratio:.3f}"
    )
    return report
