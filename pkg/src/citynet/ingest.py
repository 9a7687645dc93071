"""Parsing of check-ins / venues / follows, dataset assembly, and construction
of the empirical city social network (reciprocal follows + a shared venue)."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .graph import SocialGraph

__all__ = [
    "CATEGORIES",
    "SOCIAL_CATEGORIES",
    "SEMI_SOCIAL_CATEGORIES",
    "NON_SOCIAL_CATEGORIES",
    "category_class",
    "ParseError",
    "Venue",
    "CheckIn",
    "CityDataset",
    "parse_checkins",
    "parse_venues",
    "parse_follows",
    "load_dataset",
    "save_dataset",
    "build_city_network",
]

#: The nine top-level venue categories.
CATEGORIES = (
    "Arts and Entertainment",
    "College and University",
    "Food",
    "Nightlife Spot",
    "Outdoors and Recreation",
    "Professional and Other Places",
    "Residence",
    "Shop and Service",
    "Travel and Transport",
)

# Legacy label, normalized at parse time.
_CATEGORY_ALIASES = {"Food and Drink": "Food"}

SOCIAL_CATEGORIES = frozenset({"Food", "Nightlife Spot", "Residence"})
SEMI_SOCIAL_CATEGORIES = frozenset({"Professional and Other Places", "Shop and Service"})
NON_SOCIAL_CATEGORIES = frozenset(CATEGORIES) - SOCIAL_CATEGORIES - SEMI_SOCIAL_CATEGORIES


def category_class(category: str) -> str:
    """Sociality class of a category: ``social``, ``semi-social`` or ``non-social``."""
    if category in SOCIAL_CATEGORIES:
        return "social"
    if category in SEMI_SOCIAL_CATEGORIES:
        return "semi-social"
    if category in NON_SOCIAL_CATEGORIES:
        return "non-social"
    raise ValueError(f"unknown category {category!r}")


class ParseError(ValueError):
    """Malformed input file; the message names the offending line."""


@dataclass(frozen=True)
class Venue:
    id: str
    name: str
    lat: float
    lon: float
    category: str

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"venue {self.id!r}: latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"venue {self.id!r}: longitude {self.lon} out of range")
        if self.category not in CATEGORIES:
            raise ValueError(f"venue {self.id!r}: unknown category {self.category!r}")


@dataclass(frozen=True)
class CheckIn:
    user: str
    venue: str
    timestamp: int

    def __post_init__(self) -> None:
        if self.timestamp < 0:
            raise ValueError(
                f"check-in ({self.user!r}, {self.venue!r}): negative timestamp"
            )


class CityDataset:
    """Immutable users / venues / check-ins / follows bundle for one city.

    Users are exactly the ids appearing in check-ins, every check-in
    references a known venue, and every follow endpoint is a known user.
    ``visited`` maps each user to the set of venues they checked into.
    """

    __slots__ = ("users", "venues", "checkins", "follows", "visited")

    def __init__(
        self,
        users: Iterable[str],
        venues: Mapping[str, Venue],
        checkins: Iterable[CheckIn],
        follows: Iterable[tuple[str, str]],
    ) -> None:
        users_f = frozenset(users)
        venues_d = dict(venues)
        checkins_t = tuple(checkins)
        follows_f = frozenset((a, b) for a, b in follows)
        visited: dict[str, set[str]] = {}
        for c in checkins_t:
            if c.user not in users_f:
                raise ValueError(f"check-in references unknown user {c.user!r}")
            if c.venue not in venues_d:
                raise ValueError(f"check-in references unknown venue {c.venue!r}")
            visited.setdefault(c.user, set()).add(c.venue)
        for u in users_f:
            if u not in visited:
                raise ValueError(f"user {u!r} has no check-ins")
        for a, b in follows_f:
            if a not in users_f or b not in users_f:
                raise ValueError(f"follow ({a!r}, {b!r}) references an unknown user")
        self.users = users_f
        self.venues = venues_d
        self.checkins = checkins_t
        self.follows = follows_f
        self.visited = {u: frozenset(vs) for u, vs in visited.items()}

    @classmethod
    def assemble(cls, checkins, venues, follows) -> tuple["CityDataset", dict[str, int]]:
        """Build a dataset from parsed pieces.

        Users are derived from check-ins; follows with an endpoint that never
        checked in are dropped. Returns ``(dataset, stats)`` where stats
        records how many follows were dropped.
        """
        users = {c.user for c in checkins}
        follows_set = {(a, b) for a, b in follows}
        kept = {(a, b) for a, b in follows_set if a in users and b in users}
        stats = {"dropped_follows": len(follows_set) - len(kept)}
        return cls(users, venues, checkins, kept), stats

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CityDataset):
            return NotImplemented
        return (
            self.users == other.users
            and self.venues == other.venues
            and self.checkins == other.checkins
            and self.follows == other.follows
        )

    def __repr__(self) -> str:
        return (
            f"CityDataset(users={len(self.users)}, venues={len(self.venues)}, "
            f"checkins={len(self.checkins)}, follows={len(self.follows)})"
        )


_CHECKIN_HEADER = ["user_id", "venue_id", "unix_timestamp"]
_VENUE_HEADER = ["venue_id", "name", "lat", "lon", "category"]
_FOLLOW_HEADER = ["follower_id", "followee_id"]


def _rows(stream: Iterable[str], header: list[str], what: str):
    rdr = csv.reader(stream)
    first = next(rdr, None)
    if first != header:
        raise ParseError(f"{what}: line 1: expected header {','.join(header)!r}")
    for line_no, row in enumerate(rdr, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"{what}: line {line_no}: expected {len(header)} fields, got {len(row)}"
            )
        yield line_no, row


def parse_checkins(stream: Iterable[str]) -> list[CheckIn]:
    """Parse ``user_id,venue_id,unix_timestamp`` rows (header mandatory)."""
    out: list[CheckIn] = []
    for ln, row in _rows(stream, _CHECKIN_HEADER, "check-ins"):
        user, venue, ts = (f.strip() for f in row)
        if not user or not venue:
            raise ParseError(f"check-ins: line {ln}: empty id")
        try:
            t = int(ts)
        except ValueError:
            raise ParseError(f"check-ins: line {ln}: invalid timestamp {ts!r}") from None
        if t < 0:
            raise ParseError(f"check-ins: line {ln}: negative timestamp")
        out.append(CheckIn(user, venue, t))
    return out


def parse_venues(stream: Iterable[str]) -> dict[str, Venue]:
    """Parse ``venue_id,name,lat,lon,category`` rows (header mandatory)."""
    out: dict[str, Venue] = {}
    for ln, row in _rows(stream, _VENUE_HEADER, "venues"):
        vid, name, lat_s, lon_s, cat = (f.strip() for f in row)
        if not vid:
            raise ParseError(f"venues: line {ln}: empty venue id")
        if vid in out:
            raise ParseError(f"venues: line {ln}: duplicate venue id {vid!r}")
        try:
            lat = float(lat_s)
            lon = float(lon_s)
        except ValueError:
            raise ParseError(f"venues: line {ln}: invalid coordinate") from None
        cat = _CATEGORY_ALIASES.get(cat, cat)
        try:
            out[vid] = Venue(vid, name, lat, lon, cat)
        except ValueError as e:
            raise ParseError(f"venues: line {ln}: {e}") from None
    return out


def parse_follows(stream: Iterable[str]) -> set[tuple[str, str]]:
    """Parse ``follower_id,followee_id`` rows (header mandatory); duplicates collapse."""
    out: set[tuple[str, str]] = set()
    for ln, row in _rows(stream, _FOLLOW_HEADER, "follows"):
        a, b = (f.strip() for f in row)
        if not a or not b:
            raise ParseError(f"follows: line {ln}: empty user id")
        out.add((a, b))
    return out


def save_dataset(d: CityDataset, path) -> None:
    """Serialize to a canonical JSON document (stable key order, one line)."""
    doc = {
        "users": sorted(d.users),
        "venues": {
            vid: {"name": v.name, "lat": v.lat, "lon": v.lon, "category": v.category}
            for vid, v in d.venues.items()
        },
        "checkins": [[c.user, c.venue, c.timestamp] for c in d.checkins],
        "follows": sorted([a, b] for a, b in d.follows),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_dataset(path) -> CityDataset:
    """Load a dataset JSON document; raises ValueError on any malformation."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        venues = {
            vid: Venue(vid, rec["name"], float(rec["lat"]), float(rec["lon"]), rec["category"])
            for vid, rec in doc["venues"].items()
        }
        checkins = [CheckIn(u, v, int(t)) for u, v, t in doc["checkins"]]
        follows = {(a, b) for a, b in doc["follows"]}
        users = doc["users"]
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ValueError(f"invalid dataset document: {e}") from None
    return CityDataset(users, venues, checkins, follows)


def build_city_network(d: CityDataset, include_isolated: bool = False) -> SocialGraph:
    """Tie ``(u, v)`` iff the follows are reciprocal and u, v share a visited venue.

    By default only users with at least one tie become nodes;
    ``include_isolated=True`` keeps every dataset user as a node.
    """
    recip = {(a, b) for a, b in d.follows if a < b and (b, a) in d.follows}
    edges = [(a, b) for a, b in recip if d.visited[a] & d.visited[b]]
    nodes = d.users if include_isolated else ()
    return SocialGraph(nodes=nodes, edges=edges)
