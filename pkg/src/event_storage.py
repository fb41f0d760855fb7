"""
Event Storage - Ragged Arrays of Variable-Length Lists

Stores many small lists in one flat buffer plus an offsets array, so list i
lives in flat[offsets[i]:offsets[i + 1]]. Per-event payloads are tiny, so
keeping them contiguous avoids per-list allocations and keeps kernels
streaming through memory.

Example:
    from src.event_storage import EventStorage

    storage = EventStorage.from_lists([[1.0, 2.0], [3.0]])
    print(storage.offsets)        # [0 2 3]
    print(storage.list(1))        # [3.]
"""

from typing import List, Optional, Sequence

import numpy as np

from .errors import ShapeError, ValidationError


def gather_positions(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """
    Flat buffer positions covering consecutive ranges.

    Args:
        starts: Start position of every range
        lengths: Length of every range

    Returns:
        Concatenation of arange(start, start + length) over all ranges
    """
    starts = np.asarray(starts, dtype=np.int64).ravel()
    lengths = np.asarray(lengths, dtype=np.int64).ravel()
    total = int(lengths.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    out_starts = np.cumsum(lengths) - lengths
    shift = np.repeat(starts - out_starts, lengths)
    return shift + np.arange(total, dtype=np.int64)


class EventStorage:
    """
    Flat buffer plus offsets.

    Attributes:
        flat: 1-D buffer of all list elements
        offsets: int64 array of length (list count + 1)
    """

    def __init__(self, flat: np.ndarray, offsets: np.ndarray, validate: bool = True):
        self.flat = np.asarray(flat)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        if validate:
            problems = self.validate()
            if problems:
                raise ValidationError(problems, "event storage")

    @classmethod
    def from_lists(
        cls,
        lists: Sequence[Sequence],
        dtype: Optional[np.dtype] = None,
    ) -> "EventStorage":
        """Build storage from a sequence of lists."""
        arrays = [np.asarray(item, dtype=dtype).ravel() for item in lists]
        lengths = np.array([a.size for a in arrays], dtype=np.int64)
        offsets = np.zeros(len(arrays) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        if arrays:
            flat = np.concatenate(arrays)
            if dtype is not None:
                flat = flat.astype(dtype, copy=False)
        else:
            flat = np.zeros(0, dtype=dtype or np.float64)
        return cls(flat, offsets)

    @classmethod
    def from_lengths(cls, flat: np.ndarray, lengths: np.ndarray) -> "EventStorage":
        """Build storage from a flat buffer and per-list lengths."""
        lengths = np.asarray(lengths, dtype=np.int64).ravel()
        offsets = np.zeros(lengths.size + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        return cls(flat, offsets)

    def validate(self) -> List[str]:
        """
        Check the offsets invariants.

        Returns:
            List of problems (empty if valid)
        """
        problems = []
        if self.flat.ndim != 1:
            problems.append(f"flat buffer must be 1-D, got {self.flat.ndim}-D")
        if self.offsets.ndim != 1 or self.offsets.size < 1:
            problems.append("offsets must be a non-empty 1-D array")
            return problems
        if self.offsets[0] != 0:
            problems.append(f"offsets must start at 0, got {int(self.offsets[0])}")
        if np.any(np.diff(self.offsets) < 0):
            problems.append("offsets must be non-decreasing")
        if self.offsets[-1] != self.flat.size:
            problems.append(
                f"last offset {int(self.offsets[-1])} does not match "
                f"flat length {self.flat.size}"
            )
        return problems

    @property
    def count(self) -> int:
        """Number of lists."""
        return self.offsets.size - 1

    def lengths(self) -> np.ndarray:
        """Length of every list."""
        return np.diff(self.offsets)

    def list(self, index: int) -> np.ndarray:
        """Writable view of list index."""
        return self.flat[self.offsets[index]:self.offsets[index + 1]]

    def positions(self, list_ids: np.ndarray) -> np.ndarray:
        """Flat positions of the given lists, in order."""
        list_ids = np.asarray(list_ids, dtype=np.int64).ravel()
        return gather_positions(self.offsets[list_ids], self.lengths()[list_ids])

    def gather(
        self,
        list_ids: np.ndarray,
        group_sizes: Optional[np.ndarray] = None,
    ) -> "EventStorage":
        """
        Build new compact storage from selected lists.

        Args:
            list_ids: Lists to take, in output order
            group_sizes: If given, consecutive runs of this many selected lists
                are concatenated into one output list

        Returns:
            New EventStorage owning its buffers
        """
        list_ids = np.asarray(list_ids, dtype=np.int64).ravel()
        lengths = self.lengths()[list_ids]
        flat = self.flat[self.positions(list_ids)]
        if group_sizes is not None:
            group_sizes = np.asarray(group_sizes, dtype=np.int64).ravel()
            if int(group_sizes.sum()) != list_ids.size:
                raise ShapeError(
                    f"group sizes sum to {int(group_sizes.sum())}, "
                    f"expected {list_ids.size}"
                )
            group_ends = np.cumsum(group_sizes)
            cumulative = np.concatenate([[0], np.cumsum(lengths)])
            totals = cumulative[group_ends] - cumulative[group_ends - group_sizes]
            lengths = totals
        return EventStorage.from_lengths(flat, lengths)

    def with_flat(self, flat: np.ndarray) -> "EventStorage":
        """Storage with the same offsets and a different flat buffer."""
        flat = np.asarray(flat)
        if flat.shape != self.flat.shape:
            raise ShapeError(
                f"flat buffer length {flat.size} does not match {self.flat.size}"
            )
        return EventStorage(flat, self.offsets, validate=False)

    @staticmethod
    def concat(storages: Sequence["EventStorage"]) -> "EventStorage":
        """Append the lists of several storages into one."""
        flats = [st.flat for st in storages]
        lengths = [st.lengths() for st in storages]
        return EventStorage.from_lengths(np.concatenate(flats), np.concatenate(lengths))

    def copy(self) -> "EventStorage":
        return EventStorage(self.flat.copy(), self.offsets.copy(), validate=False)

    def __repr__(self) -> str:
        return f"EventStorage(lists={self.count}, events={self.flat.size})"
