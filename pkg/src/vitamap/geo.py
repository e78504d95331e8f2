"""Great-circle geometry: leg distances, itineraries, bounding boxes,
route statistics.

Distances use the haversine formula on a sphere of mean radius
6371.0088 km. For mnemonic maps that is plenty: the spherical
approximation is within half a percent of ellipsoidal geodesics, and
the value is pinned in the tests. Distances stay in full double
precision here; rounding happens only in the emitters.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .gazetteer import GazetteerEntry, normalize_key, resolve
from .model import (
    Biography,
    CalendarDate,
    GeoPoint,
    ItineraryLeg,
    LifeEvent,
    to_day_number,
)

EARTH_RADIUS_KM = 6371.0088  # IUGG mean radius


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned lat/lon box; no antimeridian wrapping."""

    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float

    def __post_init__(self) -> None:
        if self.min_lat > self.max_lat:
            raise ValueError("min_lat exceeds max_lat")
        for name in ("min_lon", "max_lon"):
            value = getattr(self, name)
            if not -180.0 < value <= 180.0:
                raise ValueError(f"{name} out of range: {value!r}")


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in km between two normalized points.

    Symmetric by construction; the arc term is clamped to [0, 1] so
    antipodal pairs cannot wander out of asin's domain.
    """
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    h = min(1.0, max(0.0, h))
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


def itinerary_order(biography: Biography) -> list[LifeEvent]:
    """Events sorted chronologically with the stable tie-break
    (start day, end day, authoring index)."""
    return sorted(
        biography.events,
        key=lambda e: (to_day_number(e.when.start), to_day_number(e.when.end)),
    )


def build_itinerary(
    biography: Biography, gazetteer: dict[str, GazetteerEntry]
) -> list[ItineraryLeg]:
    """Resolve every event and chain them into legs with running totals.

    Leg 0 is the starting point (0 km); leg i carries the great-circle
    distance from leg i-1. UnknownPlace propagates with the offending
    event id attached.
    """
    legs: list[ItineraryLeg] = []
    previous: GeoPoint | None = None
    cum_km = 0.0
    for index, event in enumerate(itinerary_order(biography)):
        point = resolve(event, gazetteer)
        leg_km = 0.0 if previous is None else haversine_km(previous, point)
        cum_km += leg_km
        legs.append(
            ItineraryLeg(index=index, event_id=event.id, point=point, leg_km=leg_km, cum_km=cum_km)
        )
        previous = point
    return legs


def bounding_box(points: list[GeoPoint]) -> BoundingBox:
    """Componentwise min/max box over at least one point.

    Routes spanning the antimeridian are not given a wrapped box; they
    produce the naive full-width box and a warning.
    """
    if not points:
        raise ValueError("bounding_box requires at least one point")
    min_lat = min(p.lat for p in points)
    max_lat = max(p.lat for p in points)
    min_lon = min(p.lon for p in points)
    max_lon = max(p.lon for p in points)
    if max_lon - min_lon > 180.0:
        warnings.warn(
            "points span more than 180 degrees of longitude; emitting the "
            "full-width box instead of wrapping across the antimeridian",
            stacklevel=2,
        )
    return BoundingBox(min_lat=min_lat, max_lat=max_lat, min_lon=min_lon, max_lon=max_lon)


@dataclass(frozen=True)
class RouteStats:
    event_count: int
    distinct_place_count: int
    first_start: CalendarDate
    last_end: CalendarDate
    total_km: float
    box: BoundingBox


def route_stats(legs: list[ItineraryLeg], biography: Biography) -> RouteStats:
    """Summarize an itinerary built from the given biography.

    Distinct places are counted by normalized gazetteer key; events
    located only by an inline point count by their exact coordinate
    pair.
    """
    by_id = {event.id: event for event in biography.events}
    identities: set[tuple] = set()
    for leg in legs:
        event = by_id[leg.event_id]
        if event.place_key is not None:
            identities.add(("key", normalize_key(event.place_key)))
        else:
            identities.add(("point", (leg.point.lat, leg.point.lon)))
    first_start = min((e.when.start for e in biography.events), key=to_day_number)
    last_end = max((e.when.end for e in biography.events), key=to_day_number)
    return RouteStats(
        event_count=len(legs),
        distinct_place_count=len(identities),
        first_start=first_start,
        last_end=last_end,
        total_km=legs[-1].cum_km if legs else 0.0,
        box=bounding_box([leg.point for leg in legs]),
    )
