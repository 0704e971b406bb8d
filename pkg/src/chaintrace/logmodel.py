"""Connection-log data model: intervals, records, chains, CSV round trip.

Times are integer units (the toy data lives in [0, 24]); swapping in epoch
seconds changes nothing.  A station token is an opaque label, deliberately
not a location.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from random import Random

SEP = b"\x1f"


class ParseError(ValueError):
    """Malformed log/escrow row; message carries the row number."""


class EncodingError(ValueError):
    """Username not encodable into the canonical tuple form."""


@dataclass(frozen=True, order=True)
class TimeInterval:
    """Closed interval [t1, t2]; touching endpoints count as contact."""

    t1: int
    t2: int

    def __post_init__(self):
        if self.t1 > self.t2:
            raise ParseError(f"interval start {self.t1} after end {self.t2}")

    def overlaps(self, other: "TimeInterval") -> bool:
        return self.t1 <= other.t2 and other.t1 <= self.t2

    def length(self) -> int:
        return self.t2 - self.t1


def intervals_overlap(a: TimeInterval, b: TimeInterval) -> bool:
    """True iff the closed intervals intersect (endpoints included)."""
    return a.overlaps(b)


def overlap_interval(a: TimeInterval, b: TimeInterval) -> TimeInterval:
    """The intersection [max(starts), min(ends)]; caller must know it exists."""
    if not a.overlaps(b):
        raise ValueError(f"intervals {a} and {b} do not overlap")
    return TimeInterval(max(a.t1, b.t1), min(a.t2, b.t2))


@dataclass(frozen=True)
class ConnectionRecord:
    user: str
    interval: TimeInterval

    def __post_init__(self):
        if not self.user:
            raise ParseError("empty username")


@dataclass
class BaseStationLog:
    """One station's records.  The token is an identifier, not a place."""

    station_token: str
    records: list[ConnectionRecord] = field(default_factory=list)


def encode_tuple(user: str, interval: TimeInterval) -> bytes:
    """Canonical injective encoding of (username, t1, t2) for filter insertion.

    token bytes, 0x1F, t1 as decimal ASCII, 0x1F, t2 as decimal ASCII.
    """
    raw = user.encode("utf-8")
    if SEP in raw:
        raise EncodingError("username contains the 0x1F separator")
    return raw + SEP + str(interval.t1).encode() + SEP + str(interval.t2).encode()


def decode_tuple(blob: bytes) -> tuple[str, TimeInterval]:
    """Inverse of encode_tuple; used as the injectivity oracle in tests."""
    token, t1, t2 = blob.split(SEP)
    return token.decode("utf-8"), TimeInterval(int(t1), int(t2))


CSV_HEADER = ["station", "user", "t_start", "t_end"]


def save_logs(logs: list[BaseStationLog], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for log in logs:
            for rec in log.records:
                w.writerow([log.station_token, rec.user,
                            rec.interval.t1, rec.interval.t2])


def load_logs(path) -> list[BaseStationLog]:
    """Read the CSV, preserving station order of first appearance."""
    logs: dict[str, BaseStationLog] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file, expected a header row")
        if header != CSV_HEADER:
            raise ParseError(f"unknown header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(f"row {lineno}: expected 4 fields, got {len(row)}")
            station, user, t1, t2 = row
            try:
                iv = TimeInterval(int(t1), int(t2))
            except ValueError as exc:
                raise ParseError(f"row {lineno}: {exc}") from None
            if iv.t1 < 0:
                raise ParseError(f"row {lineno}: negative time")
            logs.setdefault(station, BaseStationLog(station)).records.append(
                ConnectionRecord(user, iv))
    return list(logs.values())


def generate_logs(n_users: int, n_stations: int, horizon: int, density: int,
                  rng: Random) -> list[BaseStationLog]:
    """Synthetic fixture: `density` records spread over users and stations.

    Deterministic for a given rng seed; all intervals inside [0, horizon].
    """
    if n_users <= 0 or n_stations <= 0 or horizon <= 0 or density < 0:
        raise ValueError("sizes must be positive (density may be zero)")
    users = [chr(ord("A") + i) if i < 26 else f"u{i}" for i in range(n_users)]
    logs = [BaseStationLog(f"bs{j}") for j in range(n_stations)]
    seen = set()
    while len(seen) < density:
        j = rng.randrange(n_stations)
        user = users[rng.randrange(n_users)]
        t1 = rng.randint(0, horizon - 1)
        t2 = rng.randint(t1, min(horizon, t1 + rng.choice([1, 2, 3, 5, 8])))
        key = (j, user, t1, t2)
        if key in seen:  # station logs are sets of tuples, duplicates add nothing
            continue
        seen.add(key)
        logs[j].records.append(ConnectionRecord(user, TimeInterval(t1, t2)))
    return logs


@dataclass(frozen=True)
class ProximityChain:
    """Ordered users A..B plus per-edge (evidence_label, overlap) pairs.

    The evidence label is whatever the search layer knows the station as:
    a catalog index for agency-built chains, a raw token for plaintext ones.
    """

    users: tuple[str, ...]
    contacts: tuple[tuple[str, TimeInterval], ...]

    def __post_init__(self):
        if len(self.users) < 2:
            raise ValueError("a chain needs at least two users")
        if len(self.contacts) != len(self.users) - 1:
            raise ValueError("one contact per edge required")
        if len(set(self.users)) != len(self.users):
            raise ValueError("duplicate user in chain")
        starts = [c[1].t1 for c in self.contacts]
        if any(a > b for a, b in zip(starts, starts[1:])):
            raise ValueError("contact overlaps out of order")

    def endpoints(self) -> tuple[str, str]:
        return self.users[0], self.users[-1]


@dataclass(frozen=True)
class InfectionChain:
    """A proximity chain whose every edge probability cleared the threshold."""

    chain: ProximityChain
    edge_probabilities: tuple[float, ...]
    overall: float

    def __post_init__(self):
        if len(self.edge_probabilities) != len(self.chain.contacts):
            raise ValueError("one probability per edge required")
