"""Hypothesis strategies shared by the round-trip and property tests."""

from __future__ import annotations

from hypothesis import strategies as st

from vitamap.model import (
    Biography,
    DateInterval,
    GeoPoint,
    LifeEvent,
    EVENT_KINDS,
    from_day_number,
)

tokens = st.from_regex(r"[a-z0-9][a-z0-9-]{0,15}", fullmatch=True)

# Free-text values must survive the format's trim-and-comment rules:
# no newlines, no '#', no surrounding ASCII whitespace.
_text_chars = st.characters(
    blacklist_categories=("Cs",), blacklist_characters="\n\r#"
)


def _trimmed(min_size: int) -> st.SearchStrategy[str]:
    return (
        st.text(_text_chars, min_size=min_size, max_size=30)
        .map(lambda s: s.strip(" \t\r\f\v"))
        .filter(lambda s: len(s) >= min_size)
    )


titles = _trimmed(1)
notes = st.one_of(st.just(""), _trimmed(1))
rel_paths = st.from_regex(r"[a-z0-9][a-z0-9_./-]{0,20}", fullmatch=True)

day_numbers = st.integers(min_value=0, max_value=200_000)
calendar_dates = day_numbers.map(from_day_number)


@st.composite
def date_intervals(draw) -> DateInterval:
    a = draw(day_numbers)
    b = draw(day_numbers)
    if a > b:
        a, b = b, a
    return DateInterval(from_day_number(a), from_day_number(b), draw(st.booleans()))


geo_points = st.builds(
    GeoPoint,
    lat=st.floats(min_value=-90.0, max_value=90.0, allow_nan=False),
    lon=st.floats(min_value=-360.0, max_value=360.0, allow_nan=False),
)


@st.composite
def life_events(draw, event_id: str | None = None) -> LifeEvent:
    eid = event_id if event_id is not None else draw(tokens)
    has_place = draw(st.booleans())
    has_point = draw(st.booleans()) or not has_place
    return LifeEvent(
        id=eid,
        kind=draw(st.sampled_from(sorted(EVENT_KINDS))),
        when=draw(date_intervals()),
        place_key=draw(tokens) if has_place else None,
        point=draw(geo_points) if has_point else None,
        label=draw(st.one_of(st.just(""), titles)),
        note=draw(notes),
        attachments=tuple(draw(st.lists(rel_paths, max_size=3))),
    )


@st.composite
def biographies(draw) -> Biography:
    ids = draw(st.lists(tokens, min_size=1, max_size=6, unique=True))
    events = tuple(draw(life_events(event_id=eid)) for eid in ids)
    return Biography(
        title=draw(titles),
        id=draw(tokens),
        events=events,
        gazetteer_hint=draw(st.one_of(st.none(), rel_paths)),
    )
