"""Spherical-Earth geometry: haversine distance and per-user geographic span."""

from __future__ import annotations

import numpy as np

__all__ = ["EARTH_RADIUS_KM", "great_circle", "geographic_span"]

EARTH_RADIUS_KM = 6371.0


def great_circle(lat1, lon1, lat2, lon2):
    """Great-circle (haversine) distance in kilometers.

    Accepts scalars or numpy arrays (broadcast); angles in degrees.
    """
    lat1, lon1, lat2, lon2 = (
        np.radians(np.asarray(x, dtype=float)) for x in (lat1, lon1, lat2, lon2)
    )
    s1 = np.sin((lat2 - lat1) / 2.0)
    s2 = np.sin((lon2 - lon1) / 2.0)
    h = s1 * s1 + np.cos(lat1) * np.cos(lat2) * s2 * s2
    d = 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))
    return float(d) if np.ndim(d) == 0 else d


def geographic_span(places) -> float:
    """Mean great-circle distance from each place to the degree-space centroid.

    ``places`` is a non-empty sequence of ``(lat, lon)`` pairs or of objects
    with ``lat``/``lon`` attributes. A single place has span 0.
    """
    lats: list[float] = []
    lons: list[float] = []
    for p in places:
        if hasattr(p, "lat"):
            lats.append(p.lat)
            lons.append(p.lon)
        else:
            lat, lon = p
            lats.append(lat)
            lons.append(lon)
    if not lats:
        raise ValueError("geographic span undefined for an empty place set")
    la = np.asarray(lats, dtype=float)
    lo = np.asarray(lons, dtype=float)
    return float(np.mean(great_circle(la, lo, la.mean(), lo.mean())))
