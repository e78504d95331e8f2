"""vitamap: compile biography timelines into georeferenced artifacts.

A biography is authored as a VITA text file (events with date intervals
and places), places resolve through an offline gazetteer TSV, and the
emitters produce KML placemarks with TimeSpans and timeline colors,
GeoJSON FeatureCollections, and itinerarium distance tables.
"""

from .emit import (
    DEFAULT_PALETTE,
    EmitConfig,
    distance_matrix,
    emit_geojson,
    emit_itinerarium,
    emit_kml,
    timeline_bucket,
)
from .gazetteer import (
    GazetteerEntry,
    GazetteerParseError,
    GeocoderError,
    UnknownPlace,
    gazetteer_row,
    load_gazetteer,
    normalize_key,
    remote_resolve,
    resolve,
)
from .geo import (
    EARTH_RADIUS_KM,
    BoundingBox,
    RouteStats,
    bounding_box,
    build_itinerary,
    haversine_km,
    itinerary_order,
    route_stats,
)
from .model import (
    Biography,
    CalendarDate,
    DateInterval,
    Diagnostic,
    GeoPoint,
    InvalidBiographyError,
    ItineraryLeg,
    LifeEvent,
    ParseDiagnostic,
    from_day_number,
    to_day_number,
    validate_biography,
)
from .vita import VitaParseError, parse_biography, parse_date_expr, serialize_biography

__version__ = "0.1.0"

__all__ = [
    "Biography",
    "BoundingBox",
    "CalendarDate",
    "DEFAULT_PALETTE",
    "DateInterval",
    "Diagnostic",
    "EARTH_RADIUS_KM",
    "EmitConfig",
    "GazetteerEntry",
    "GazetteerParseError",
    "GeocoderError",
    "GeoPoint",
    "InvalidBiographyError",
    "ItineraryLeg",
    "LifeEvent",
    "ParseDiagnostic",
    "RouteStats",
    "UnknownPlace",
    "VitaParseError",
    "bounding_box",
    "build_itinerary",
    "distance_matrix",
    "emit_geojson",
    "emit_itinerarium",
    "emit_kml",
    "from_day_number",
    "gazetteer_row",
    "haversine_km",
    "itinerary_order",
    "load_gazetteer",
    "normalize_key",
    "parse_biography",
    "parse_date_expr",
    "remote_resolve",
    "resolve",
    "route_stats",
    "serialize_biography",
    "timeline_bucket",
    "to_day_number",
    "validate_biography",
]
