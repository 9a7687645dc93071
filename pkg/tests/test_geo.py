import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from citynet import EARTH_RADIUS_KM, geographic_span, great_circle


def test_zero_distance_same_point():
    assert great_circle(40.7, -74.0, 40.7, -74.0) == 0.0


def test_antipodal_is_half_circumference():
    d = great_circle(0.0, 0.0, 0.0, 180.0)
    assert d == pytest.approx(math.pi * EARTH_RADIUS_KM, abs=1e-6)  # 20015.0868...


def test_one_degree_of_latitude():
    # R * pi / 180 = 111.1949... km regardless of longitude
    d = great_circle(10.0, 25.0, 11.0, 25.0)
    assert d == pytest.approx(EARTH_RADIUS_KM * math.pi / 180.0, abs=1e-9)
    assert d == pytest.approx(111.1949, abs=1e-4)


def test_symmetry_and_broadcast():
    assert great_circle(1.0, 2.0, 3.0, 4.0) == pytest.approx(great_circle(3.0, 4.0, 1.0, 2.0))
    lats = np.array([0.0, 10.0, 20.0])
    out = great_circle(lats, 0.0, 0.0, 0.0)
    assert out.shape == (3,)
    assert out[0] == 0.0
    assert out[1] == pytest.approx(great_circle(10.0, 0.0, 0.0, 0.0))


@given(
    st.floats(-89.0, 89.0),
    st.floats(-179.0, 179.0),
    st.floats(-89.0, 89.0),
    st.floats(-179.0, 179.0),
)
@settings(max_examples=200, deadline=None)
def test_distance_bounds_and_symmetry(lat1, lon1, lat2, lon2):
    d = great_circle(lat1, lon1, lat2, lon2)
    assert 0.0 <= d <= math.pi * EARTH_RADIUS_KM + 1e-9
    assert d == pytest.approx(great_circle(lat2, lon2, lat1, lon1), abs=1e-9)


def test_span_single_place_zero():
    assert geographic_span([(48.85, 2.35)]) == 0.0


def test_span_two_places_one_km_apart():
    # each point sits ~0.5 km from the midpoint
    dlat = 1.0 / (EARTH_RADIUS_KM * math.pi / 180.0)
    span = geographic_span([(40.0, 5.0), (40.0 + dlat, 5.0)])
    assert span == pytest.approx(0.5, abs=1e-3)


def test_span_accepts_attribute_objects():
    class P:
        def __init__(self, lat, lon):
            self.lat, self.lon = lat, lon

    assert geographic_span([P(10.0, 10.0)]) == 0.0


def test_span_empty_raises():
    with pytest.raises(ValueError):
        geographic_span([])


def test_span_translation_insensitive_at_small_scale():
    pts = [(0.01 * i, 0.02 * i) for i in range(5)]
    base = geographic_span(pts)
    shifted = geographic_span([(lat + 1.0, lon + 1.0) for lat, lon in pts])
    assert shifted == pytest.approx(base, rel=1e-3)
