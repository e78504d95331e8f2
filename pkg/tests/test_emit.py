"""Emitter tests: KML, GeoJSON, itinerarium tables, timeline buckets."""

from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from vitamap.emit import (
    DEFAULT_PALETTE,
    EmitConfig,
    KML_NAMESPACE,
    distance_matrix,
    emit_geojson,
    emit_itinerarium,
    emit_kml,
    timeline_bucket,
)
from vitamap.geo import build_itinerary, itinerary_order
from vitamap.gazetteer import UnknownPlace, load_gazetteer
from vitamap.model import (
    Biography,
    CalendarDate,
    DateInterval,
    GeoPoint,
    InvalidBiographyError,
    LifeEvent,
)

from strategies import biographies

NS = {"kml": KML_NAMESPACE}

GAZ = load_gazetteer(
    "deir-el-medina\tDeir el-Medina\t25.7286\t32.6014\tEgypt\n"
    "giza\tGiza\t29.9773\t31.1325\tEgypt\n"
    "luxor\tLuxor\t25.6872\t32.6396\tEgypt\n"
)


def interval(year: int) -> DateInterval:
    return DateInterval(CalendarDate(year, 1, 1), CalendarDate(year, 12, 31))


def day_event(id: str, year: int, month: int, day: int, **kw) -> LifeEvent:
    d = CalendarDate(year, month, day)
    kw.setdefault("place_key", "giza")
    kw.setdefault("kind", "other")
    return LifeEvent(id=id, when=DateInterval(d, d), **kw)


def simple_biography(*events: LifeEvent) -> Biography:
    return Biography(title="Test", id="test", events=events)


NEFERTARI = LifeEvent(
    id="nefertari-tomb",
    kind="excavation",
    when=interval(1904),
    place_key="deir-el-medina",
    label="Deir el-Medina",
)


class TestTimelineBucket:
    def test_single_event_is_bucket_zero(self):
        b = simple_biography(day_event("a", 1900, 1, 1))
        assert timeline_bucket(b.events[0], b, 5) == 0

    @pytest.mark.parametrize("n", [1, 2, 5, 10])
    def test_boundaries(self, n):
        events = tuple(day_event(f"e{i}", 1900 + i, 1, 1) for i in range(15))
        b = simple_biography(*events)
        assert timeline_bucket(events[0], b, n) == 0
        assert timeline_bucket(events[-1], b, n) == n - 1

    def test_floor_formula(self):
        # span of 9 days, n=5: day k lands in bucket floor(5k/10).
        events = tuple(day_event(f"e{i}", 1900, 1, 1 + i) for i in range(10))
        b = simple_biography(*events)
        assert [timeline_bucket(e, b, 5) for e in events] == [5 * k // 10 for k in range(10)]

    @settings(max_examples=60)
    @given(biographies(), st.sampled_from([1, 2, 5]), st.sampled_from([2, 3]))
    def test_scaling_refines_buckets(self, b, n, factor):
        ordered = itinerary_order(b)
        coarse = [timeline_bucket(e, b, n) for e in ordered]
        fine = [timeline_bucket(e, b, n * factor) for e in ordered]
        assert coarse == [f // factor for f in fine]
        assert coarse == sorted(coarse)  # non-decreasing in start order


class TestEmitKml:
    def test_document_structure(self):
        text = emit_kml(simple_biography(NEFERTARI), GAZ)
        root = ET.fromstring(text)
        assert root.tag == f"{{{KML_NAMESPACE}}}kml"
        doc = root.find("kml:Document", NS)
        assert doc is not None
        assert doc.findtext("kml:name", namespaces=NS) == "Test"

    def test_year_event_timespan(self):
        text = emit_kml(simple_biography(NEFERTARI), GAZ)
        assert "<begin>1904-01-01</begin>" in text
        assert "<end>1904-12-31</end>" in text

    def test_note_is_escaped(self):
        e = day_event("a", 1900, 1, 1, note="x < y & z")
        text = emit_kml(simple_biography(e), GAZ)
        assert "x &lt; y &amp; z" in text

    def test_circa_suffix_on_name(self):
        e = LifeEvent(
            id="a",
            kind="other",
            when=DateInterval(CalendarDate(1665, 1, 1), CalendarDate(1665, 12, 31), circa=True),
            place_key="giza",
            label="Giza",
        )
        text = emit_kml(simple_biography(e), GAZ)
        assert "<name>Giza (c.)</name>" in text

    def test_attachments_in_cdata(self):
        e = day_event("a", 1900, 1, 1, attachments=("img/tomb.jpg",))
        text = emit_kml(simple_biography(e), GAZ)
        assert '<![CDATA[<br/><a href="img/tomb.jpg">img/tomb.jpg</a>]]>' in text
        off = emit_kml(simple_biography(e), GAZ, EmitConfig(include_attachments=False))
        assert "CDATA" not in off

    def test_style_urls_resolve(self):
        events = tuple(day_event(f"e{i}", 1900 + i, 1, 1) for i in range(12))
        text = emit_kml(simple_biography(*events), GAZ)
        root = ET.fromstring(text)
        styles = {s.get("id") for s in root.iter(f"{{{KML_NAMESPACE}}}Style")}
        refs = {u.text.lstrip("#") for u in root.iter(f"{{{KML_NAMESPACE}}}styleUrl")}
        assert refs <= styles
        assert len(root.findall(".//kml:Placemark", NS)) == 12

    def test_coordinates_lon_lat_six_decimals(self):
        text = emit_kml(simple_biography(NEFERTARI), GAZ)
        assert "<coordinates>32.601400,25.728600,0</coordinates>" in text

    def test_placemarks_in_itinerary_order(self):
        late = day_event("late", 1910, 1, 1, place_key="luxor")
        early = day_event("early", 1900, 1, 1)
        text = emit_kml(Biography(title="T", id="t", events=(late, early)), GAZ)
        root = ET.fromstring(text)
        names = [p.findtext("kml:name", namespaces=NS) for p in root.findall(".//kml:Placemark", NS)]
        assert names == ["giza", "luxor"]

    def test_palette_cycles_by_modulo(self):
        events = tuple(day_event(f"e{i}", 1900 + i, 1, 1) for i in range(10))
        cfg = EmitConfig(bucket_count=7, palette=DEFAULT_PALETTE)
        text = emit_kml(simple_biography(*events), GAZ, cfg)
        assert f"<color>{DEFAULT_PALETTE[6 % 5]}</color>" in text

    def test_validation_error_aborts(self):
        dup = simple_biography(day_event("a", 1900, 1, 1), day_event("a", 1910, 1, 1))
        with pytest.raises(InvalidBiographyError):
            emit_kml(dup, GAZ)

    def test_unknown_place_aborts(self):
        b = simple_biography(day_event("a", 1900, 1, 1, place_key="atlantis"))
        with pytest.raises(UnknownPlace):
            emit_kml(b, GAZ)

    def test_deterministic(self):
        b = simple_biography(NEFERTARI, day_event("g", 1906, 5, 2, note="again"))
        assert emit_kml(b, GAZ) == emit_kml(b, GAZ)


class TestEmitGeoJson:
    def test_axis_order_and_decimals(self):
        e = day_event("a", 1900, 1, 1, place_key=None, point=GeoPoint(25.73, 32.60))
        text = emit_geojson(simple_biography(e), GAZ)
        assert '"coordinates": [32.600000, 25.730000]' in text

    def test_empty_note_still_present(self):
        text = emit_geojson(simple_biography(NEFERTARI), GAZ)
        assert '"note": ""' in text

    def test_feature_count_matches_events(self):
        events = tuple(day_event(f"e{i}", 1900 + i, 1, 1) for i in range(12))
        payload = json.loads(emit_geojson(simple_biography(*events), GAZ))
        assert payload["type"] == "FeatureCollection"
        assert len(payload["features"]) == 12

    def test_fixed_property_keys_in_order(self):
        payload = json.loads(emit_geojson(simple_biography(NEFERTARI), GAZ))
        props = payload["features"][0]["properties"]
        assert list(props) == [
            "id", "label", "kind", "start", "end", "circa", "note", "attachments",
        ]
        assert props["start"] == "1904-01-01"
        assert props["end"] == "1904-12-31"
        assert props["circa"] is False

    def test_deterministic(self):
        b = simple_biography(NEFERTARI)
        assert emit_geojson(b, GAZ) == emit_geojson(b, GAZ)


class TestEmitItinerarium:
    def make_legs(self):
        b = Biography(
            title="T",
            id="t",
            events=(
                day_event("a", 1900, 1, 1),
                day_event("b", 1905, 1, 1, place_key="luxor", label="Luxor, Egypt"),
                day_event("c", 1910, 1, 1, place_key="luxor"),
            ),
        )
        return build_itinerary(b, GAZ), b

    def test_text_header_and_zero_first_leg(self):
        legs, b = self.make_legs()
        text = emit_itinerarium(legs, b, "text")
        lines = text.splitlines()
        assert lines[0].split() == ["#", "START", "END", "PLACE", "LAT", "LON", "LEG_KM", "CUM_KM"]
        assert lines[1].split()[-2] == "0.000"

    def test_same_place_second_row_zero(self):
        legs, b = self.make_legs()
        rows = list(csv.reader(io.StringIO(emit_itinerarium(legs, b, "csv"))))
        assert rows[0] == list(
            ("index", "start", "end", "place", "label", "lat", "lon", "leg_km", "cum_km")
        )
        assert rows[3][7] == "0.000"  # luxor -> luxor

    def test_csv_quoting_of_commas(self):
        legs, b = self.make_legs()
        text = emit_itinerarium(legs, b, "csv")
        assert '"Luxor, Egypt"' in text

    def test_csv_resummation_oracle(self):
        legs, b = self.make_legs()
        rows = list(csv.reader(io.StringIO(emit_itinerarium(legs, b, "csv"))))[1:]
        total = 0.0
        for row in rows:
            total += float(row[7])
            assert abs(float(row[8]) - total) <= 1e-3

    def test_unknown_format_rejected(self):
        legs, b = self.make_legs()
        with pytest.raises(ValueError, match="unknown itinerarium format"):
            emit_itinerarium(legs, b, "xml")

    def test_deterministic(self):
        legs, b = self.make_legs()
        for fmt in ("text", "csv"):
            assert emit_itinerarium(legs, b, fmt) == emit_itinerarium(legs, b, fmt)


class TestDistanceMatrix:
    def test_two_place_matrix(self):
        b = Biography(
            title="T",
            id="t",
            events=(day_event("a", 1900, 1, 1), day_event("b", 1905, 1, 1, place_key="luxor")),
        )
        rows = list(csv.reader(io.StringIO(distance_matrix(b, GAZ))))
        assert rows[0] == ["place", "giza", "luxor"]
        assert rows[1][0] == "giza" and rows[1][1] == "0.000"
        assert rows[2][2] == "0.000"
        assert rows[1][2] == rows[2][1]
        assert float(rows[1][2]) > 0

    def test_duplicate_places_collapse(self):
        b = Biography(
            title="T",
            id="t",
            events=(
                day_event("a", 1900, 1, 1),
                day_event("b", 1905, 1, 1),
                day_event("c", 1910, 1, 1, place_key="luxor"),
            ),
        )
        rows = list(csv.reader(io.StringIO(distance_matrix(b, GAZ))))
        assert len(rows) == 3  # header + two distinct places
