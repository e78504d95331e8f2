"""Offline gazetteer: place keys to coordinates, plus the optional
remote-resolver client.

The gazetteer file is UTF-8 TSV with exactly five columns per line:

    key<TAB>display_name<TAB>lat<TAB>lon<TAB>region

Lines starting with ``#`` are comments, blank lines are skipped, there
is no header row. Keys follow the ``[a-z0-9][a-z0-9-]*`` grammar and
must be unique. The file bundled with a biography is the source of
truth; the remote resolver only ever *suggests* a row to paste in, so
compiled outputs stay reproducible offline.
"""

from __future__ import annotations

import json
import re
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass

from .model import GeoPoint, LifeEvent, ParseDiagnostic, is_token


@dataclass(frozen=True)
class GazetteerEntry:
    key: str
    display_name: str
    point: GeoPoint
    region: str = ""


class GazetteerParseError(Exception):
    """Gazetteer file failure carrying all diagnostics."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = sorted(diagnostics, key=lambda d: (d.line, d.column))
        first = self.diagnostics[0]
        super().__init__(f"line {first.line}: {first.message}")


class UnknownPlace(Exception):
    """A place key that neither the event nor the gazetteer can resolve."""

    def __init__(self, key: str, event_id: str | None = None, reason: str | None = None):
        self.key = key
        self.event_id = event_id
        message = reason or f"unknown place '{key}'"
        if event_id is not None:
            message += f" (event '{event_id}')"
        super().__init__(message)


class GeocoderError(Exception):
    """Remote resolver failure: network, HTTP status or malformed body."""


def load_gazetteer(source: str) -> dict[str, GazetteerEntry]:
    """Parse gazetteer TSV text into an ordered key -> entry map.

    Raises GazetteerParseError listing every malformed row; an empty
    file is a valid empty gazetteer.
    """
    entries: dict[str, GazetteerEntry] = {}
    first_line: dict[str, int] = {}
    diags: list[ParseDiagnostic] = []

    for lineno, raw in enumerate(source.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not line.strip() or line.startswith("#"):
            continue
        columns = line.split("\t")
        if len(columns) != 5:
            diags.append(
                ParseDiagnostic(
                    lineno, 1, f"expected 5 tab-separated columns, got {len(columns)}"
                )
            )
            continue
        key, display_name, lat_text, lon_text, region = columns
        if not is_token(key):
            diags.append(ParseDiagnostic(lineno, 1, f"invalid key '{key}'"))
            continue
        if key in first_line:
            diags.append(
                ParseDiagnostic(
                    lineno, 1, f"duplicate key '{key}' (first defined on line {first_line[key]})"
                )
            )
            continue
        if not display_name:
            diags.append(ParseDiagnostic(lineno, 1, "empty display_name"))
            continue
        point = _parse_coordinates(lat_text, lon_text, lineno, diags)
        if point is None:
            continue
        first_line[key] = lineno
        entries[key] = GazetteerEntry(key, display_name, point, region)

    if diags:
        raise GazetteerParseError(diags)
    return entries


def _parse_coordinates(
    lat_text: str, lon_text: str, lineno: int, diags: list[ParseDiagnostic]
) -> GeoPoint | None:
    try:
        lat = float(lat_text)
    except ValueError:
        diags.append(ParseDiagnostic(lineno, 1, f"unparsable latitude '{lat_text}'"))
        return None
    try:
        lon = float(lon_text)
    except ValueError:
        diags.append(ParseDiagnostic(lineno, 1, f"unparsable longitude '{lon_text}'"))
        return None
    if not -90.0 <= lat <= 90.0:
        diags.append(ParseDiagnostic(lineno, 1, "latitude out of range"))
        return None
    if not -180.0 < lon <= 180.0:
        diags.append(ParseDiagnostic(lineno, 1, "longitude out of range"))
        return None
    return GeoPoint(lat, lon)


def gazetteer_row(entry: GazetteerEntry) -> str:
    """Render one entry as a TSV row (no trailing newline)."""
    return "\t".join(
        (
            entry.key,
            entry.display_name,
            f"{entry.point.lat:.6f}",
            f"{entry.point.lon:.6f}",
            entry.region,
        )
    )


_SEPARATOR_RUN_RE = re.compile(r"[\s_]+")


def normalize_key(name: str) -> str:
    """Fold a display name into a lookup key.

    Lowercases (non-ASCII letters included), collapses runs of
    whitespace and underscores into single hyphens and strips hyphens
    from the ends. Idempotent. Raises UnknownPlace when nothing is left.
    """
    key = _SEPARATOR_RUN_RE.sub("-", name.lower()).strip("-")
    if not key:
        raise UnknownPlace(name, reason=f"name normalizes to empty key: {name!r}")
    return key


def resolve(event: LifeEvent, gazetteer: dict[str, GazetteerEntry]) -> GeoPoint:
    """Resolve an event's location: inline point wins, else gazetteer.

    Raises UnknownPlace (carrying the event id) when neither path
    yields a point.
    """
    if event.point is not None:
        return event.point
    assert event.place_key is not None  # model invariant
    try:
        key = normalize_key(event.place_key)
    except UnknownPlace:
        raise UnknownPlace(event.place_key, event_id=event.id) from None
    entry = gazetteer.get(key)
    if entry is None:
        raise UnknownPlace(key, event_id=event.id)
    return entry.point


def remote_resolve(name: str, endpoint: str, timeout: float = 10.0) -> GazetteerEntry:
    """Ask a remote geocoder for a suggested gazetteer entry.

    Issues one GET ``endpoint?q=<url-encoded name>`` and expects a JSON
    object with exactly the fields key, display_name, lat and lon. The
    result is returned for display; it is never merged into a loaded
    gazetteer. Never called unless the caller explicitly enabled it.
    """
    url = f"{endpoint}?q={urllib.parse.quote(name)}"
    try:
        with urllib.request.urlopen(url, timeout=timeout) as response:
            body = response.read()
    except urllib.error.HTTPError as exc:
        if exc.code == 404:
            raise GeocoderError("place not found at endpoint") from exc
        raise GeocoderError(f"geocoder returned status {exc.code}") from exc
    except urllib.error.URLError as exc:
        raise GeocoderError(f"geocoder unreachable: {exc.reason}") from exc

    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise GeocoderError("malformed geocoder response: not a JSON object") from exc
    if not isinstance(payload, dict) or set(payload) != {"key", "display_name", "lat", "lon"}:
        raise GeocoderError(
            "malformed geocoder response: expected exactly key, display_name, lat, lon"
        )
    key, display_name = payload["key"], payload["display_name"]
    lat, lon = payload["lat"], payload["lon"]
    if not isinstance(key, str) or not is_token(key):
        raise GeocoderError("malformed geocoder response: bad key")
    if not isinstance(display_name, str) or not display_name:
        raise GeocoderError("malformed geocoder response: bad display_name")
    for value in (lat, lon):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise GeocoderError("malformed geocoder response: lat/lon must be numbers")
    try:
        point = GeoPoint(float(lat), float(lon))
    except ValueError as exc:
        raise GeocoderError(f"malformed geocoder response: {exc}") from exc
    return GazetteerEntry(key=key, display_name=display_name, point=point, region="")
