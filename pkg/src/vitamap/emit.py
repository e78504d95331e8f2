"""Deterministic emitters: KML 2.2 placemarks with TimeSpans and
timeline color buckets, GeoJSON FeatureCollections, and itinerarium
tables in aligned text or CSV.

All three emitters are pure text producers: identical inputs give
byte-identical output. Coordinates are written with 6 decimal places
(about 0.11 m, beyond source accuracy, and diff-stable) and distances
with 3, rounded half-even. Nothing here touches the filesystem.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass

from .gazetteer import GazetteerEntry, normalize_key, resolve
from .geo import build_itinerary, haversine_km, itinerary_order
from .model import (
    Biography,
    InvalidBiographyError,
    ItineraryLeg,
    LifeEvent,
    to_day_number,
    validate_biography,
)

KML_NAMESPACE = "http://www.opengis.net/kml/2.2"

# Timeline gradient, oldest to newest, in KML aabbggrr order:
# red, orange, yellow, green, blue.
DEFAULT_PALETTE = ("ff0000ff", "ff00a5ff", "ff00ffff", "ff00ff00", "ffff0000")

_KML_COLOR_RE = re.compile(r"[0-9a-f]{8}\Z")


@dataclass(frozen=True)
class EmitConfig:
    """Knobs for the KML emitter."""

    bucket_count: int = 5
    palette: tuple[str, ...] = DEFAULT_PALETTE
    include_attachments: bool = True

    def __post_init__(self) -> None:
        if self.bucket_count < 1:
            raise ValueError("bucket_count must be at least 1")
        object.__setattr__(self, "palette", tuple(self.palette))
        if not self.palette:
            raise ValueError("palette must not be empty")
        for color in self.palette:
            if not _KML_COLOR_RE.match(color):
                raise ValueError(f"palette colors are aabbggrr hex: {color!r}")

    def color_for(self, bucket: int) -> str:
        return self.palette[bucket % len(self.palette)]


def timeline_bucket(event: LifeEvent, biography: Biography, bucket_count: int) -> int:
    """Era index of an event among the biography's start dates.

    With start days spanning [t0, t1], the bucket is
    floor(n * (start - t0) / (t1 - t0 + 1)) in pure integer arithmetic,
    always in [0, n-1]; a single-date biography collapses to bucket 0.
    """
    if bucket_count < 1:
        raise ValueError("bucket_count must be at least 1")
    starts = [to_day_number(e.when.start) for e in biography.events]
    t0, t1 = min(starts), max(starts)
    if t1 == t0:
        return 0
    return bucket_count * (to_day_number(event.when.start) - t0) // (t1 - t0 + 1)


def _check_valid(biography: Biography) -> None:
    errors = [d for d in validate_biography(biography) if d.severity == "error"]
    if errors:
        raise InvalidBiographyError(errors)


def _xml_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _cdata(text: str) -> str:
    # "]]>" cannot appear inside a CDATA section; split it across two.
    return "<![CDATA[" + text.replace("]]>", "]]]]><![CDATA[>") + "]]>"


def _placemark_name(event: LifeEvent) -> str:
    return event.label + (" (c.)" if event.when.circa else "")


def _description(event: LifeEvent, include_attachments: bool) -> str:
    parts = [_xml_escape(event.note)]
    if include_attachments and event.attachments:
        anchors = "".join(f'<br/><a href="{path}">{path}</a>' for path in event.attachments)
        parts.append(_cdata(anchors))
    return "".join(parts)


def emit_kml(
    biography: Biography,
    gazetteer: dict[str, GazetteerEntry],
    config: EmitConfig | None = None,
) -> str:
    """Render a biography as a KML 2.2 document.

    One Placemark per event in itinerary order, each with a TimeSpan,
    a style reference for its timeline bucket, and a Point. Notes are
    XML-escaped; attachments become relative links inside CDATA. The
    circa flag is surfaced by appending " (c.)" to the placemark name.
    Raises InvalidBiographyError or UnknownPlace instead of emitting
    partial output.
    """
    config = config or EmitConfig()
    _check_valid(biography)
    placemarks = [
        (event, resolve(event, gazetteer), timeline_bucket(event, biography, config.bucket_count))
        for event in itinerary_order(biography)
    ]

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<kml xmlns="{KML_NAMESPACE}">',
        "  <Document>",
        f"    <name>{_xml_escape(biography.title)}</name>",
    ]
    for bucket in sorted({bucket for _, _, bucket in placemarks}):
        out += [
            f'    <Style id="era-{bucket}">',
            "      <IconStyle>",
            f"        <color>{config.color_for(bucket)}</color>",
            "      </IconStyle>",
            "    </Style>",
        ]
    for event, point, bucket in placemarks:
        description = _description(event, config.include_attachments)
        out += [
            "    <Placemark>",
            f"      <name>{_xml_escape(_placemark_name(event))}</name>",
            f"      <description>{description}</description>",
            "      <TimeSpan>",
            f"        <begin>{event.when.start.isoformat()}</begin>",
            f"        <end>{event.when.end.isoformat()}</end>",
            "      </TimeSpan>",
            f"      <styleUrl>#era-{bucket}</styleUrl>",
            "      <Point>",
            f"        <coordinates>{point.lon:.6f},{point.lat:.6f},0</coordinates>",
            "      </Point>",
            "    </Placemark>",
        ]
    out += ["  </Document>", "</kml>"]
    return "\n".join(out) + "\n"


def emit_geojson(biography: Biography, gazetteer: dict[str, GazetteerEntry]) -> str:
    """Render a biography as a GeoJSON FeatureCollection.

    One Point feature per event in itinerary order, coordinates
    [lon, lat] with 6 decimals, properties in fixed key order
    (id, label, kind, start, end, circa, note, attachments).
    """
    _check_valid(biography)
    features = []
    for event in itinerary_order(biography):
        point = resolve(event, gazetteer)
        properties = ", ".join(
            (
                f'"id": {json.dumps(event.id)}',
                f'"label": {json.dumps(event.label, ensure_ascii=False)}',
                f'"kind": {json.dumps(event.kind)}',
                f'"start": "{event.when.start.isoformat()}"',
                f'"end": "{event.when.end.isoformat()}"',
                f'"circa": {"true" if event.when.circa else "false"}',
                f'"note": {json.dumps(event.note, ensure_ascii=False)}',
                f'"attachments": {json.dumps(list(event.attachments), ensure_ascii=False)}',
            )
        )
        features.append(
            "    {\n"
            '      "type": "Feature",\n'
            '      "geometry": {"type": "Point", "coordinates": '
            f"[{point.lon:.6f}, {point.lat:.6f}]}},\n"
            f'      "properties": {{{properties}}}\n'
            "    }"
        )
    body = ",\n".join(features)
    return (
        "{\n"
        '  "type": "FeatureCollection",\n'
        '  "features": [\n'
        f"{body}\n"
        "  ]\n"
        "}\n"
    )


ITINERARY_CSV_HEADER = ("index", "start", "end", "place", "label", "lat", "lon", "leg_km", "cum_km")


def emit_itinerarium(
    legs: list[ItineraryLeg], biography: Biography, fmt: str = "text"
) -> str:
    """Render an itinerary as an aligned text table or as CSV.

    The text table lists one stop per line under the header
    ``# START END PLACE LAT LON LEG_KM CUM_KM``. The CSV variant adds
    the place key column and quotes per RFC 4180. Distances have 3
    decimals, half-even.
    """
    if fmt not in ("text", "csv"):
        raise ValueError(f"unknown itinerarium format: {fmt!r}")
    by_id = {event.id: event for event in biography.events}
    rows = []
    for leg in legs:
        event = by_id[leg.event_id]
        place = normalize_key(event.place_key) if event.place_key is not None else ""
        rows.append(
            (
                str(leg.index),
                event.when.start.isoformat(),
                event.when.end.isoformat(),
                place,
                event.label,
                f"{leg.point.lat:.6f}",
                f"{leg.point.lon:.6f}",
                f"{leg.leg_km:.3f}",
                f"{leg.cum_km:.3f}",
            )
        )

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(ITINERARY_CSV_HEADER)
        writer.writerows(rows)
        return buffer.getvalue()

    header = ("#", "START", "END", "PLACE", "LAT", "LON", "LEG_KM", "CUM_KM")
    # Text table shows the human-facing label in the PLACE column.
    text_rows = [(r[0], r[1], r[2], r[4], r[5], r[6], r[7], r[8]) for r in rows]
    widths = [
        max(len(header[i]), max((len(row[i]) for row in text_rows), default=0))
        for i in range(len(header))
    ]
    right_aligned = {4, 5, 6, 7}
    lines = []
    for row in [header, *text_rows]:
        cells = [
            cell.rjust(widths[i]) if i in right_aligned else cell.ljust(widths[i])
            for i, cell in enumerate(row)
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def distance_matrix(
    biography: Biography, gazetteer: dict[str, GazetteerEntry]
) -> str:
    """Pairwise great-circle km matrix over distinct resolved places, CSV.

    Places appear in order of first itinerary occurrence; keyed places
    are labeled by normalized key, inline-only points by
    "lat,lon". The diagonal is 0.000 and the matrix is exactly
    symmetric because both cells come from the same computation.
    """
    by_id = {event.id: event for event in biography.events}
    labels: list[str] = []
    points: list = []
    seen: set[tuple] = set()
    for leg in build_itinerary(biography, gazetteer):
        event = by_id[leg.event_id]
        if event.place_key is not None:
            identity = ("key", normalize_key(event.place_key))
            label = identity[1]
        else:
            identity = ("point", (leg.point.lat, leg.point.lon))
            label = f"{leg.point.lat:.6f},{leg.point.lon:.6f}"
        if identity in seen:
            continue
        seen.add(identity)
        labels.append(label)
        points.append(leg.point)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["place", *labels])
    for i, label in enumerate(labels):
        distances = [
            "0.000" if i == j else f"{haversine_km(points[min(i, j)], points[max(i, j)]):.3f}"
            for j in range(len(labels))
        ]
        writer.writerow([label, *distances])
    return buffer.getvalue()
