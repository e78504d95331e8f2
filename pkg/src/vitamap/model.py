"""Domain types for georeferenced biography timelines.

Everything here is an immutable value: construction validates, and all
operations are pure functions, so values can be shared freely across
threads. Dates use the proleptic Gregorian calendar throughout; day
numbers count from 1600-01-01 = 0 so both bundled datasets land on
positive numbers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

TOKEN_RE = re.compile(r"[a-z0-9][a-z0-9-]*\Z")

EVENT_KINDS = frozenset(
    {"birth", "death", "residence", "study", "work", "visit", "excavation", "other"}
)


def is_token(text: str) -> bool:
    """True if text matches the identifier grammar [a-z0-9][a-z0-9-]*."""
    return bool(TOKEN_RE.match(text))


# ---------------------------------------------------------------------------
# Coordinates


@dataclass(frozen=True)
class GeoPoint:
    """WGS84 latitude/longitude in decimal degrees.

    Longitude is normalized into (-180, 180] at construction (adding or
    subtracting whole turns), so every point has one canonical form and
    normalization is idempotent bit for bit.
    """

    lat: float
    lon: float

    def __post_init__(self) -> None:
        lat = float(self.lat)
        lon = float(self.lon)
        if not math.isfinite(lat) or not -90.0 <= lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat!r}")
        if not math.isfinite(lon):
            raise ValueError(f"longitude out of range: {self.lon!r}")
        if not -180.0 < lon <= 180.0:
            lon = lon % 360.0
            if lon > 180.0:
                lon -= 360.0
        object.__setattr__(self, "lat", lat)
        object.__setattr__(self, "lon", lon)


# ---------------------------------------------------------------------------
# Calendar

_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)
_DAYS_BEFORE_MONTH = (0, 31, 59, 90, 120, 151, 181, 212, 243, 273, 304, 334)


def is_leap_year(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def days_in_month(year: int, month: int) -> int:
    if month == 2 and is_leap_year(year):
        return 29
    return _DAYS_IN_MONTH[month - 1]


def _days_before_year(year: int) -> int:
    # Days from 0001-01-01 to year-01-01.
    y = year - 1
    return y * 365 + y // 4 - y // 100 + y // 400


_EPOCH_OFFSET = _days_before_year(1600)
_MAX_DAY_NUMBER = _days_before_year(10000) - _EPOCH_OFFSET - 1


@dataclass(frozen=True, order=True)
class CalendarDate:
    """A proleptic Gregorian calendar day. Years 1..9999."""

    year: int
    month: int
    day: int

    def __post_init__(self) -> None:
        for name in ("year", "month", "day"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"{name} must be an integer, got {value!r}")
        if not 1 <= self.year <= 9999:
            raise ValueError(f"year out of range: {self.year}")
        if not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")
        if not 1 <= self.day <= days_in_month(self.year, self.month):
            raise ValueError(f"day out of range: {self.year:04d}-{self.month:02d}-{self.day:02d}")

    def isoformat(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"


def to_day_number(d: CalendarDate) -> int:
    """Day count with 1600-01-01 = 0; strictly monotone in calendar order."""
    n = _days_before_year(d.year) + _DAYS_BEFORE_MONTH[d.month - 1] + (d.day - 1)
    if d.month > 2 and is_leap_year(d.year):
        n += 1
    return n - _EPOCH_OFFSET


def from_day_number(n: int) -> CalendarDate:
    """Inverse of to_day_number over the valid date range."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"day number must be an integer, got {n!r}")
    days = n + _EPOCH_OFFSET
    if days < 0 or n > _MAX_DAY_NUMBER:
        raise ValueError(f"day number out of range: {n}")
    year = max(1, 1 + days * 400 // 146097)
    while _days_before_year(year + 1) <= days:
        year += 1
    while _days_before_year(year) > days:
        year -= 1
    doy = days - _days_before_year(year)
    month = 1
    while doy >= days_in_month(year, month):
        doy -= days_in_month(year, month)
        month += 1
    return CalendarDate(year, month, doy + 1)


@dataclass(frozen=True)
class DateInterval:
    """Inclusive [start, end] calendar-day interval with a circa flag."""

    start: CalendarDate
    end: CalendarDate
    circa: bool = False

    def __post_init__(self) -> None:
        if to_day_number(self.end) < to_day_number(self.start):
            raise ValueError("interval end precedes start")

    def overlaps(self, other: "DateInterval") -> bool:
        return (
            to_day_number(self.start) <= to_day_number(other.end)
            and to_day_number(other.start) <= to_day_number(self.end)
        )


# ---------------------------------------------------------------------------
# Events and biographies


@dataclass(frozen=True)
class LifeEvent:
    """One georeferenced timeline entry: a time interval plus a place.

    The place is either a gazetteer key, an inline point, or both; an
    inline point overrides the gazetteer at resolution time.
    """

    id: str
    kind: str
    when: DateInterval
    place_key: str | None = None
    point: GeoPoint | None = None
    label: str = ""
    note: str = ""
    attachments: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not is_token(self.id):
            raise ValueError(f"invalid event id: {self.id!r}")
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown kind: {self.kind!r}")
        if self.place_key is None and self.point is None:
            raise ValueError(f"event {self.id!r} needs a place key or an inline point")
        if self.place_key == "":
            raise ValueError("place_key must not be empty (use None)")
        object.__setattr__(self, "attachments", tuple(self.attachments))
        for path in self.attachments:
            if not path or path.startswith("/"):
                raise ValueError(f"attachment path must be relative: {path!r}")
        if not self.label:
            object.__setattr__(self, "label", self.place_key or self.id)


@dataclass(frozen=True)
class Biography:
    """A titled, ordered collection of life events.

    Authoring order of events is preserved; consumers that need
    chronological order sort with the stable key
    (start day, end day, authoring index). Duplicate event ids are
    representable so that validate_biography can report them.
    """

    title: str
    id: str
    events: tuple[LifeEvent, ...]
    gazetteer_hint: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        if not self.title:
            raise ValueError("biography title must not be empty")
        if not is_token(self.id):
            raise ValueError(f"invalid biography id: {self.id!r}")
        if not self.events:
            raise ValueError("biography has no events")
        if self.gazetteer_hint == "":
            raise ValueError("gazetteer_hint must not be empty (use None)")


@dataclass(frozen=True)
class ItineraryLeg:
    """One hop of a chronological route: event, point, leg and running km."""

    index: int
    event_id: str
    point: GeoPoint
    leg_km: float
    cum_km: float


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Diagnostic:
    """A validation finding attached to an event."""

    severity: str  # "error" or "warning"
    event_id: str
    message: str


@dataclass(frozen=True)
class ParseDiagnostic:
    """A parse finding located in source text (1-based line and column)."""

    line: int
    column: int
    message: str


class InvalidBiographyError(Exception):
    """Raised by emitters when a biography fails validation."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0].message if self.diagnostics else "unknown"
        super().__init__(f"biography failed validation: {first}")


def validate_biography(
    biography: Biography, base_dir: str | Path | None = None
) -> list[Diagnostic]:
    """Check a biography and return diagnostics instead of raising.

    Checks, in order, per event in authoring order: duplicate id (error),
    interval end before start (error, re-checked defensively), overlap
    with an earlier residence for residence events (warning), start date
    earlier than the previous event's (warning), and, when base_dir is
    given, attachment files missing relative to it (warning). The result
    is deterministic for identical inputs.
    """
    out: list[Diagnostic] = []
    seen_ids: set[str] = set()
    residences: list[LifeEvent] = []
    prev_start: int | None = None
    base = Path(base_dir) if base_dir is not None else None

    for event in biography.events:
        if event.id in seen_ids:
            out.append(Diagnostic("error", event.id, f"duplicate event id '{event.id}'"))
        seen_ids.add(event.id)

        if to_day_number(event.when.end) < to_day_number(event.when.start):
            out.append(Diagnostic("error", event.id, "interval end precedes start"))

        if event.kind == "residence":
            for earlier in residences:
                if event.when.overlaps(earlier.when):
                    out.append(
                        Diagnostic(
                            "warning",
                            event.id,
                            f"overlapping residences: '{earlier.id}' and '{event.id}'",
                        )
                    )
            residences.append(event)

        start_day = to_day_number(event.when.start)
        if prev_start is not None and start_day < prev_start:
            out.append(Diagnostic("warning", event.id, "event out of chronological order"))
        prev_start = start_day

        if base is not None:
            for attachment in event.attachments:
                if not (base / attachment).exists():
                    out.append(
                        Diagnostic("warning", event.id, f"missing attachment file '{attachment}'")
                    )

    return out
