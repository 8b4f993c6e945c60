"""Strong lower/upper record extraction and record-time interleavings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import StateError

__all__ = [
    "RecordTrace",
    "RecordScanner",
    "Interleaving",
    "extract_records",
    "classify_ordering",
    "inter_record_gaps",
]

# n = 3 orderings in their conventional numbering O1..O6.
LABELLED_ORDER_N3 = (
    ("U2", "U3", "L2", "L3"),
    ("U2", "L2", "L3", "U3"),
    ("U2", "L2", "U3", "L3"),
    ("L2", "U2", "L3", "U3"),
    ("L2", "U2", "U3", "L3"),
    ("L2", "L3", "U2", "U3"),
)


@dataclass(frozen=True)
class Interleaving:
    """Relative order of the non-initial lower (L) and upper (U) record times.

    ``events`` holds ``2(n-1)`` tags such as ``"U2"`` or ``"L3"``.
    """

    n: int
    events: tuple[str, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("interleavings need n >= 2")
        if len(self.events) != 2 * (self.n - 1):
            raise ValueError(f"expected {2 * (self.n - 1)} events, got {len(self.events)}")
        for side in "LU":
            seq = [int(e[1:]) for e in self.events if e[0] == side]
            if seq != list(range(2, self.n + 1)):
                raise ValueError(f"inadmissible interleaving {self.events}")

    @classmethod
    def from_sides(cls, sides: Iterable[str]) -> "Interleaving":
        """Build from a side string such as ``"UULL"``; indices are implied."""
        sides = list(sides)
        counts = {"L": 1, "U": 1}
        events = []
        for s in sides:
            if s not in counts:
                raise ValueError(f"bad side tag {s!r}")
            counts[s] += 1
            events.append(f"{s}{counts[s]}")
        return cls(n=len(sides) // 2 + 1, events=tuple(events))

    @classmethod
    def parse(cls, text: str) -> "Interleaving":
        events = tuple(t.strip() for t in text.replace(" ", ",").split(",") if t.strip())
        return cls(n=len(events) // 2 + 1, events=events)

    @property
    def sides(self) -> str:
        return "".join(e[0] for e in self.events)

    @property
    def tag(self) -> str:
        return ",".join(self.events)

    @property
    def label(self) -> str | None:
        """``"O1"``..``"O6"`` for n = 3, otherwise None."""
        if self.n == 3:
            return f"O{LABELLED_ORDER_N3.index(self.events) + 1}"
        return None

    def __str__(self) -> str:
        return self.tag


@dataclass(frozen=True)
class RecordTrace:
    """Record times (1-based) and values of one realised sequence."""

    n_target: int
    upper_times: tuple[int, ...]
    lower_times: tuple[int, ...]
    upper_values: tuple[float, ...]
    lower_values: tuple[float, ...]
    draws_consumed: int

    @property
    def complete(self) -> bool:
        return len(self.upper_times) >= self.n_target and len(self.lower_times) >= self.n_target

    @property
    def first_value(self) -> float:
        return self.upper_values[0]

    def completion_time(self) -> int:
        self._require_complete()
        return max(self.upper_times[self.n_target - 1], self.lower_times[self.n_target - 1])

    def _require_complete(self):
        if not self.complete:
            raise StateError(
                f"trace is censored: {len(self.lower_times)} lower / {len(self.upper_times)} upper "
                f"records of {self.n_target} after {self.draws_consumed} draws"
            )


class RecordScanner:
    """Incremental left-to-right record extractor.

    Feed observations one at a time; ``feed`` returns True once both the
    ``n_target``-th upper and lower records have been seen.
    """

    def __init__(self, n_target: int):
        if n_target < 2:
            raise ValueError("n_target must be >= 2")
        self.n_target = n_target
        self.upper_times: list[int] = []
        self.lower_times: list[int] = []
        self.upper_values: list[float] = []
        self.lower_values: list[float] = []
        self.draws = 0

    @property
    def done(self) -> bool:
        return len(self.upper_times) >= self.n_target and len(self.lower_times) >= self.n_target

    def feed(self, value: float) -> bool:
        if self.done:
            return True
        self.draws += 1
        t = self.draws
        if t == 1:
            self.upper_times.append(1)
            self.lower_times.append(1)
            self.upper_values.append(value)
            self.lower_values.append(value)
            return False
        # strict comparisons: ties never create strong records; records past
        # the n-th on one side cannot affect the other side
        if value > self.upper_values[-1]:
            if len(self.upper_times) < self.n_target:
                self.upper_times.append(t)
                self.upper_values.append(value)
        elif value < self.lower_values[-1]:
            if len(self.lower_times) < self.n_target:
                self.lower_times.append(t)
                self.lower_values.append(value)
        return self.done

    def trace(self) -> RecordTrace:
        return RecordTrace(
            n_target=self.n_target,
            upper_times=tuple(self.upper_times),
            lower_times=tuple(self.lower_times),
            upper_values=tuple(self.upper_values),
            lower_values=tuple(self.lower_values),
            draws_consumed=self.draws,
        )


def extract_records(sequence: Iterable[float], n_target: int) -> RecordTrace:
    """Scan ``sequence`` for strong records, stopping once both n-th records exist."""
    scanner = RecordScanner(n_target)
    empty = True
    for value in sequence:
        empty = False
        if scanner.feed(float(value)):
            break
    if empty:
        raise ValueError("sequence must be non-empty")
    return scanner.trace()


def _merged_events(trace: RecordTrace) -> list[tuple[int, str]]:
    n = trace.n_target
    events = [(t, f"U{k}") for k, t in enumerate(trace.upper_times[1:n], start=2)]
    events += [(t, f"L{k}") for k, t in enumerate(trace.lower_times[1:n], start=2)]
    events.sort()
    return events


def classify_ordering(trace: RecordTrace) -> Interleaving:
    """Interleaving of the record times 2..n of a complete trace."""
    trace._require_complete()
    return Interleaving(n=trace.n_target, events=tuple(tag for _, tag in _merged_events(trace)))


def inter_record_gaps(trace: RecordTrace) -> list[int]:
    """Non-record observations between consecutive record events, starting at time 1.

    The first gap is the run of ties with the first observation; it is
    always 0 for atomless data.
    """
    trace._require_complete()
    times = [1] + [t for t, _ in _merged_events(trace)]
    return [b - a - 1 for a, b in zip(times, times[1:])]
