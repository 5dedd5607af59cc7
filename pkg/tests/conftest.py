from __future__ import annotations

import math

import pytest
from hypothesis import strategies as st

from auric import events as ev
from auric.store import Store

APPS = ("messages", "email", "browser", "gallery", "notes")
FIELDS = ("body", "subject", "search")

_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\b"),
    min_size=1, max_size=6,
)


@st.composite
def unit_vectors(draw, dim: int | None = None):
    d = dim if dim is not None else draw(st.integers(min_value=2, max_value=6))
    raw = draw(st.lists(
        st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
        min_size=d, max_size=d,
    ).filter(lambda v: sum(x * x for x in v) > 1e-4))
    norm = math.sqrt(math.fsum(x * x for x in raw))
    return tuple(x / norm for x in raw)


@st.composite
def raw_events(draw):
    ts = draw(st.integers(min_value=0, max_value=2**41))
    kind = draw(st.sampled_from(sorted(ev.KINDS)))
    if kind == ev.UNLOCK:
        return ev.unlock(ts)
    if kind == ev.SCREEN_OFF:
        return ev.screen_off(ts)
    if kind == ev.CAPTURE:
        face = draw(st.none() | unit_vectors())
        return ev.capture(ts, face)
    app = draw(st.sampled_from(APPS))
    if kind == ev.WINDOW_STATE:
        return ev.window_state(ts, app, draw(_text))
    if kind == ev.VIEW_CLICK:
        return ev.view_click(ts, app, draw(_text))
    if kind == ev.SCROLL:
        return ev.scroll(ts, app, draw(st.sampled_from((ev.SCROLL_UP, ev.SCROLL_DOWN))))
    delta = draw(st.just(ev.BACKSPACE) | _text)
    return ev.text_change(ts, app, draw(st.sampled_from(FIELDS)), delta)


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "store")
