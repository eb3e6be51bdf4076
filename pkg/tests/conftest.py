from __future__ import annotations

from hypothesis import settings, strategies as st

from spidergather import PointOnSpider, SpiderInstance

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


def points(max_leg: int, max_x: int):
    return st.builds(
        PointOnSpider,
        st.integers(min_value=1, max_value=max_leg),
        st.integers(min_value=0, max_value=max_x),
    )


@st.composite
def spider_instances(
    draw,
    *,
    max_legs: int = 4,
    max_users: int = 9,
    max_x: int = 60,
    with_facilities: bool = False,
    max_facilities: int = 4,
    max_r: int = 3,
):
    d = draw(st.integers(min_value=1, max_value=max_legs))
    users = draw(points(d, max_x).flatmap(
        lambda first: st.lists(points(d, max_x), max_size=max_users - 1).map(
            lambda rest: (first, *rest)
        )
    ))
    facilities = None
    if with_facilities:
        facilities = tuple(
            draw(st.lists(points(d, max_x), min_size=1, max_size=max_facilities))
        )
    r = draw(st.integers(min_value=1, max_value=max_r))
    return SpiderInstance(d=d, users=users, facilities=facilities, r=r)
