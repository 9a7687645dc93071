"""Place-focused social network generator.

Pipeline: sample a place assignment for every user (anchor place drawn by
popularity, further places by popularity x rank-distance decay), then form
ties independently per shared place with category-dependent probabilities,
closing triangles among co-assigned users. All randomness derives from
per-user / per-venue substreams of the configured seed, so outputs are
reproducible and independent of iteration interleaving.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import Callable, Mapping

import numpy as np

from .geo import EARTH_RADIUS_KM, great_circle
from .graph import SocialGraph
from .ingest import CATEGORIES, CheckIn, CityDataset, ParseError, Venue, category_class
from .powerlaw import sample_zipf

__all__ = [
    "GeneratorConfig",
    "PlaceAssignment",
    "rank_distance",
    "assignment_weights",
    "assign_places",
    "tie_probability",
    "form_ties",
    "generate",
    "calibrate_uniform_tie_prob",
    "generate_synthetic_city",
    "DEFAULT_CATEGORY_WEIGHTS",
    "read_assignment",
    "write_assignment",
]

log = logging.getLogger(__name__)

_PROB_FIELDS = ("p_social", "p_semi", "p_other", "p_overpopular", "closure_prob", "uniform_tie_prob")


@dataclass(frozen=True)
class GeneratorConfig:
    """Model constants, ablation switches and the RNG seed."""

    alpha: float = 0.84
    p_social: float = 0.15
    p_semi: float = 0.08
    p_other: float = 0.01
    p_overpopular: float = 0.001
    pop_threshold: int = 30
    closure_prob: float = 0.15
    ablate_distance: bool = False
    ablate_categories: bool = False
    ablate_closure: bool = False
    uniform_tie_prob: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.pop_threshold < 1:
            raise ValueError("pop_threshold must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        for name in _PROB_FIELDS:
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass(frozen=True)
class PlaceAssignment:
    """Per-user ordered distinct venues; the first entry is the anchor place."""

    visits: dict[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        for u, vs in self.visits.items():
            if not vs:
                raise ValueError(f"user {u!r} has an empty place assignment")
            if len(set(vs)) != len(vs):
                raise ValueError(f"user {u!r} has duplicate places")


def rank_distance(venues: Mapping[str, Venue], v1: str, v2: str) -> int:
    """1 + number of venues strictly closer to v1 than v2 is.

    Distance ties count as closer when the competing venue id sorts before
    v2, so ranks over a fixed venue table are a permutation of 1..n-1.
    """
    if v1 not in venues:
        raise ValueError(f"unknown venue {v1!r}")
    if v2 not in venues:
        raise ValueError(f"unknown venue {v2!r}")
    if v1 == v2:
        raise ValueError("rank distance requires two distinct venues")
    a = venues[v1]
    b = venues[v2]
    d_ab = great_circle(a.lat, a.lon, b.lat, b.lon)
    n = 0
    for wid, w in venues.items():
        if wid == v1 or wid == v2:
            continue
        d = great_circle(a.lat, a.lon, w.lat, w.lon)
        if d < d_ab or (d == d_ab and wid < v2):
            n += 1
    return n + 1


def _venue_arrays(d: CityDataset) -> tuple[list[str], np.ndarray, np.ndarray]:
    ids = sorted(d.venues)
    lat = np.array([d.venues[v].lat for v in ids], dtype=float)
    lon = np.array([d.venues[v].lon for v in ids], dtype=float)
    return ids, lat, lon


def _empirical_popularity(d: CityDataset) -> Counter:
    pop: Counter = Counter()
    for vs in d.visited.values():
        pop.update(vs)
    return pop


def _rank_weights(
    lat: np.ndarray,
    lon: np.ndarray,
    pop: np.ndarray,
    ai: int,
    alpha: float,
    ablate_distance: bool,
) -> np.ndarray:
    """Unnormalized selection weights relative to anchor index ``ai``."""
    if ablate_distance:
        w = pop.copy()
    else:
        dist = great_circle(lat[ai], lon[ai], lat, lon)
        order = np.argsort(dist, kind="stable")  # stable: ties go to the smaller id
        order = order[order != ai]
        ranks = np.empty(lat.size, dtype=float)
        ranks[order] = np.arange(1, lat.size, dtype=float)
        ranks[ai] = 1.0  # placeholder; the anchor weight is zeroed below
        w = pop * ranks ** -alpha
    w[ai] = 0.0
    return w


def assignment_weights(d: CityDataset, anchor: str, cfg: GeneratorConfig) -> dict[str, float]:
    """Selection weight per venue given an anchor: popularity x rank^-alpha
    (popularity alone under the distance ablation); the anchor gets 0."""
    if anchor not in d.venues:
        raise ValueError(f"unknown venue {anchor!r}")
    ids, lat, lon = _venue_arrays(d)
    popc = _empirical_popularity(d)
    pop = np.array([popc.get(v, 0) for v in ids], dtype=float)
    ai = ids.index(anchor)
    w = _rank_weights(lat, lon, pop, ai, cfg.alpha, cfg.ablate_distance)
    return dict(zip(ids, w.tolist()))


def _pick_places(
    rng: np.random.Generator,
    m: int,
    anchor_cdf: np.ndarray,
    weight_of: Callable[[int], np.ndarray],
) -> list[int]:
    """Anchor by popularity CDF, then m-1 weighted draws without replacement.

    ``weight_of(ai)`` must return a fresh, mutable weight vector. Stops early
    if every remaining weight is zero.
    """
    total = float(anchor_cdf[-1])
    ai = int(np.searchsorted(anchor_cdf, rng.random() * total, side="right"))
    ai = min(ai, anchor_cdf.size - 1)
    chosen = [ai]
    if m > 1:
        w = weight_of(ai)
        for _ in range(m - 1):
            c = np.cumsum(w)
            t = float(c[-1])
            if t <= 0.0:
                break
            j = int(np.searchsorted(c, rng.random() * t, side="right"))
            j = min(j, w.size - 1)
            chosen.append(j)
            w[j] = 0.0
    return chosen


def assign_places(d: CityDataset, cfg: GeneratorConfig) -> PlaceAssignment:
    """Sample each user's places.

    The number of places m is drawn from the empirical distinct-venues-per-user
    multiset (clamped to the venue count); the anchor is drawn proportional to
    empirical popularity; the remaining m-1 places by ``assignment_weights``
    without replacement. Each user consumes an independent substream of the
    seed, so results do not depend on user iteration order.
    """
    if not d.users:
        return PlaceAssignment({})
    ids, lat, lon = _venue_arrays(d)
    n_venues = len(ids)
    popc = _empirical_popularity(d)
    pop = np.array([popc.get(v, 0) for v in ids], dtype=float)
    anchor_cdf = np.cumsum(pop)
    users = sorted(d.users)
    counts = np.array([len(d.visited[u]) for u in users], dtype=np.int64)
    cache: dict[int, np.ndarray] = {}

    def weight_of(ai: int) -> np.ndarray:
        base = cache.get(ai)
        if base is None:
            base = _rank_weights(lat, lon, pop, ai, cfg.alpha, cfg.ablate_distance)
            cache[ai] = base
        return base.copy()

    visits: dict[str, tuple[str, ...]] = {}
    for i, u in enumerate(users):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(0, i)))
        m = min(int(counts[rng.integers(counts.size)]), n_venues)
        chosen = _pick_places(rng, m, anchor_cdf, weight_of)
        visits[u] = tuple(ids[j] for j in chosen)
    return PlaceAssignment(visits)


def tie_probability(venue: Venue, model_popularity: int, cfg: GeneratorConfig) -> float:
    """Per-pair tie probability at a venue with the given model popularity.

    Category class decides the base rate; venues whose model popularity
    exceeds the threshold fall back to the over-popular rate. The category
    ablation replaces only the category-dependent rates with one uniform
    probability; the popularity threshold is its own mechanism and keeps
    suppressing over-popular venues (without it, the pair mass of the
    biggest venues swallows the uniform tie budget and triadic closure
    re-concentrates everything there, which says nothing about categories).
    """
    if model_popularity > cfg.pop_threshold:
        return cfg.p_overpopular
    if cfg.ablate_categories:
        return cfg.uniform_tie_prob
    cls = category_class(venue.category)
    if cls == "social":
        return cfg.p_social
    if cls == "semi-social":
        return cfg.p_semi
    return cfg.p_other


def form_ties(a: PlaceAssignment, d: CityDataset, cfg: GeneratorConfig) -> SocialGraph:
    """Per-venue pair draws plus within-place triadic closure.

    Venues are processed in sorted id order on independent RNG substreams;
    assignee pairs are drawn in sorted order. On a successful pair (u1, u2),
    each current friend f of u1 that is also assigned here closes (f, u2)
    with ``closure_prob`` (no cascading). Re-adding an edge is a no-op. The
    node set is every assigned user.
    """
    assigned: dict[str, list[str]] = {}
    for u, vs in a.visits.items():
        for v in vs:
            if v not in d.venues:
                raise ValueError(f"assignment references unknown venue {v!r}")
            assigned.setdefault(v, []).append(u)
    adj: dict[str, set[str]] = {u: set() for u in a.visits}
    for j, vid in enumerate(sorted(d.venues)):
        users_v = assigned.get(vid)
        if users_v is None or len(users_v) < 2:
            continue
        users_v = sorted(users_v)
        k = len(users_v)
        p = tie_probability(d.venues[vid], k, cfg)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1, j)))
        draws = rng.random(k * (k - 1) // 2)
        hits = np.flatnonzero(draws < p)
        if hits.size == 0:
            continue
        row_starts = np.concatenate(([0], np.cumsum(np.arange(k - 1, 0, -1))))
        rows = np.searchsorted(row_starts, hits, side="right") - 1
        cols = hits - row_starts[rows] + rows + 1
        members = set(users_v)
        for r_i, c_i in zip(rows.tolist(), cols.tolist()):
            u1 = users_v[r_i]
            u2 = users_v[c_i]
            adj[u1].add(u2)
            adj[u2].add(u1)
            if cfg.ablate_closure:
                continue
            for f in sorted((adj[u1] & members) - {u2}):
                if rng.random() < cfg.closure_prob:
                    adj[f].add(u2)
                    adj[u2].add(f)
    return SocialGraph._from_adjacency(adj)


def generate(d: CityDataset, cfg: GeneratorConfig) -> tuple[PlaceAssignment, SocialGraph]:
    """Run the full pipeline; one seed drives both stages."""
    a = assign_places(d, cfg)
    return a, form_ties(a, d, cfg)


def calibrate_uniform_tie_prob(
    d: CityDataset,
    cfg: GeneratorConfig,
    *,
    rel_tol: float = 0.03,
    max_rounds: int = 8,
) -> float:
    """Uniform tie probability matching the full model's tie count.

    Runs one full-model pilot with ``cfg.seed``, then a short fixed-point
    iteration of uniform pilots on the same place assignment, returning the
    probability whose realized tie count came closest to the pilot's.
    """
    full_cfg = replace(cfg, ablate_categories=False)
    assignment = assign_places(d, full_cfg)
    target = form_ties(assignment, d, full_cfg).edge_count
    if target == 0:
        return 0.0
    per_venue: Counter = Counter()
    for vs in assignment.visits.values():
        per_venue.update(vs)
    total_pairs = sum(k * (k - 1) // 2 for k in per_venue.values())
    p = min(1.0, target / max(total_pairs, 1))
    best_p, best_err = p, math.inf
    for _ in range(max_rounds):
        trial = replace(cfg, ablate_categories=True, uniform_tie_prob=p)
        got = form_ties(assignment, d, trial).edge_count
        err = abs(got - target) / target
        if err < best_err:
            best_p, best_err = p, err
        if err <= rel_tol:
            break
        p = min(1.0, p * target / max(got, 1))
    log.debug("calibrated uniform tie probability %.6g (target %d ties, err %.3f)",
              best_p, target, best_err)
    return best_p


_CITY_CENTER = (40.0, -80.0)
_KM_PER_DEG = math.pi * EARTH_RADIUS_KM / 180.0

DEFAULT_CATEGORY_WEIGHTS: dict[str, float] = {
    "Food": 0.40,
    "Nightlife Spot": 0.20,
    "Residence": 0.20,
    "Shop and Service": 0.05,
    "Professional and Other Places": 0.05,
    "Arts and Entertainment": 0.025,
    "Outdoors and Recreation": 0.025,
    "College and University": 0.025,
    "Travel and Transport": 0.025,
}


def _apportion(weights: np.ndarray, total: int, cap: int) -> np.ndarray:
    """Integer counts proportional to ``weights`` summing to ``total``, each <= cap.

    Largest-remainder rounding; when the cap clips a venue the excess is
    redistributed over the rest. Requires ``total <= cap * count_nonzero``.
    """
    w = np.asarray(weights, dtype=float)
    out = np.minimum(np.floor(total * w / w.sum()).astype(np.int64), cap)
    frac = total * w / w.sum() - out  # negative where the cap clipped
    while (deficit := total - int(out.sum())) > 0:
        open_ = np.flatnonzero((out < cap) & (w > 0))
        if open_.size == 0:
            raise ValueError("apportionment infeasible: total exceeds cap * venues")
        order = open_[np.argsort(-frac[open_], kind="stable")]
        take = order[:deficit]
        out[take] += 1
        frac[take] -= 1.0
    return out


def generate_synthetic_city(
    n_users: int,
    n_venues: int,
    popularity_exponent: float = 1.87,
    span_km: float = 10.0,
    seed: int = 0,
    *,
    count_exponent: float = 2.0,
    min_places: int = 1,
    pop_xmin: int = 1,
    category_weights: Mapping[str, float] | None = None,
    alpha: float = 0.84,
    start_time: int = 1_262_304_000,
    duration_s: int = 30 * 86400,
) -> CityDataset:
    """Desk-scale synthetic city.

    Venues fall uniformly in a disc of radius ``span_km`` around the city
    center, with categories drawn from ``category_weights`` (the default
    table is weighted toward residential / food / nightlife places, the mix
    that makes co-location socially meaningful). Venue popularity follows a
    discrete power law with ``popularity_exponent`` on ``pop_xmin`` and up
    (raise the floor to synthesize a denser city where even the long tail
    of venues hosts a crowd); per-user distinct-place counts follow a power
    law with ``count_exponent`` (min ``min_places``). The two margins must
    agree on the total number of check-ins, and the reconciliation
    deliberately bends the user side: venue budgets are kept exactly as
    drawn (rescaling a discrete power-law sample shifts its fitted
    exponent, so the popularity margin is the one that must stay untouched)
    and the user counts are apportioned up or down to match their sum.
    Users then fill those slots lightest-first, picking an anchor by
    popularity over still-open venues and further places by popularity x
    rank-distance decay; the hard budgets keep the realized popularity on
    the drawn law (a plain popularity-weighted walk would saturate the top
    venues and steepen the tail), while the rank factor keeps per-user
    spans localized. Check-ins get uniform timestamps in a 30-day window,
    and reciprocal follows are synthesized among co-visitors (plus a
    sprinkle of one-way follows that friendship extraction must ignore).
    """
    if n_users < 1 or n_venues < 1:
        raise ValueError("need at least one user and one venue")
    if popularity_exponent <= 1.0:
        raise ValueError("popularity exponent must exceed 1 (non-normalizable otherwise)")
    if count_exponent <= 1.0:
        raise ValueError("count exponent must exceed 1 (non-normalizable otherwise)")
    if span_km <= 0:
        raise ValueError("span must be positive")
    if min_places < 1:
        raise ValueError("min_places must be >= 1")
    if not 1 <= pop_xmin <= n_users:
        raise ValueError("pop_xmin must be in [1, n_users] (a venue hosts at most one visit per user)")
    weights_map = dict(category_weights or DEFAULT_CATEGORY_WEIGHTS)
    unknown = set(weights_map) - set(CATEGORIES)
    if unknown:
        raise ValueError(f"unknown categories in weights: {sorted(unknown)}")
    cat_names = [c for c in CATEGORIES if weights_map.get(c, 0) > 0]
    if not cat_names:
        raise ValueError("category weights are all zero")
    cat_p = np.array([weights_map[c] for c in cat_names], dtype=float)
    cat_p = cat_p / cat_p.sum()

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    vw = max(5, len(str(n_venues - 1)))
    uw = max(5, len(str(n_users - 1)))
    venue_ids = [f"v{i:0{vw}d}" for i in range(n_venues)]
    user_ids = [f"u{i:0{uw}d}" for i in range(n_users)]

    # uniform in the disc: radius via sqrt of a uniform, angle uniform
    r = span_km * np.sqrt(rng.random(n_venues))
    theta = rng.random(n_venues) * (2.0 * math.pi)
    y = r * np.sin(theta)
    x = r * np.cos(theta)
    clat, clon = _CITY_CENTER
    lat = clat + y / _KM_PER_DEG
    lon = clon + x / (_KM_PER_DEG * math.cos(math.radians(clat)))
    cats = rng.choice(len(cat_names), size=n_venues, p=cat_p)
    venues = {
        vid: Venue(vid, f"Place {i}", float(lat[i]), float(lon[i]), cat_names[int(cats[i])])
        for i, vid in enumerate(venue_ids)
    }

    drawn_pop = sample_zipf(popularity_exponent, n_venues, rng, xmin=pop_xmin, xmax=n_users)
    m_raw = np.minimum(
        np.maximum(sample_zipf(count_exponent, n_users, rng, xmax=n_venues), min_places),
        n_venues,
    )
    floor_total = n_users * min_places
    if int(drawn_pop.sum()) >= floor_total:
        # user counts absorb the total-sum mismatch; the tiny epsilon keeps
        # minimum-count users eligible for leftover slots
        head = (m_raw - min_places).astype(float) + 1e-9
        extra = _apportion(head, int(drawn_pop.sum()) - floor_total, n_venues - min_places)
        m_all = min_places + extra
        remaining = drawn_pop.astype(float)
    else:
        # degenerate many-users-few-venues regime: the drawn budgets cannot
        # host everyone's minimum, so the venue margin has to inflate
        m_all = m_raw
        remaining = _apportion(drawn_pop, int(m_all.sum()), n_users).astype(float)
    # ``remaining`` is every venue's slot budget; a venue hosts at most one
    # visit per user. Draw weights stay popularity x rank^-alpha (a venue
    # merely closes once full) so per-user span statistics match what a
    # popularity-anchored walk over the finished dataset produces; scaling
    # weights by the open slot count instead would make late users
    # artificially local.
    pop_f = remaining.copy()
    geo_cache: dict[int, np.ndarray] = {}

    def weight_of(ai: int) -> np.ndarray:
        geo = geo_cache.get(ai)
        if geo is None:
            geo = _rank_weights(lat, lon, pop_f, ai, alpha, False)
            geo_cache[ai] = geo
        return geo * (remaining > 0.0)

    checkins: list[CheckIn] = []
    visitors: dict[str, list[str]] = {vid: [] for vid in venue_ids}
    # lightest users first: the bulk of users then draw while nearly every
    # venue is still open, i.e. under the same conditions a popularity-
    # anchored walk over the finished dataset would see, which keeps the
    # span distribution honest. The few heaviest users go last and absorb
    # whatever the closing open set still offers; their draws get truncated
    # when fewer venues remain open than their budgeted count, so realized
    # visit totals can fall somewhat short of the slot total.
    for i in np.argsort(m_all, kind="stable"):
        uid = user_ids[i]
        anchor_cdf = np.cumsum(pop_f * (remaining > 0.0))
        chosen = _pick_places(rng, int(m_all[i]), anchor_cdf, weight_of)
        remaining[chosen] -= 1.0
        for j in chosen:
            ts = int(rng.integers(start_time, start_time + duration_s))
            checkins.append(CheckIn(uid, venue_ids[j], ts))
            visitors[venue_ids[j]].append(uid)

    follows: set[tuple[str, str]] = set()
    for vid in venue_ids:
        vis = visitors[vid]
        if len(vis) < 2:
            continue
        for _ in range(min(3, len(vis) * (len(vis) - 1) // 2)):
            a_i, b_i = rng.choice(len(vis), size=2, replace=False)
            a_u, b_u = vis[int(a_i)], vis[int(b_i)]
            follows.add((a_u, b_u))
            follows.add((b_u, a_u))
    for _ in range(n_users // 10):  # one-way noise
        a_i, b_i = rng.integers(0, n_users, size=2)
        if a_i != b_i:
            follows.add((user_ids[int(a_i)], user_ids[int(b_i)]))

    return CityDataset(user_ids, venues, checkins, follows)


_ASSIGNMENT_HEADER = ["user_id", "venue_id", "position"]


def write_assignment(a: PlaceAssignment, path) -> None:
    """CSV rows ``user_id,venue_id,position`` with position 0 = anchor."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(_ASSIGNMENT_HEADER)
        for u in sorted(a.visits):
            for pos, v in enumerate(a.visits[u]):
                wr.writerow([u, v, pos])


def read_assignment(path, venues: Mapping[str, Venue] | None = None) -> PlaceAssignment:
    """Read an assignment CSV; validates venue ids when a table is supplied."""
    rows: dict[str, list[tuple[int, str]]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        rdr = csv.reader(fh)
        header = next(rdr, None)
        if header != _ASSIGNMENT_HEADER:
            raise ParseError(
                f"assignment: line 1: expected header {','.join(_ASSIGNMENT_HEADER)!r}"
            )
        for ln, row in enumerate(rdr, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"assignment: line {ln}: expected 3 fields, got {len(row)}")
            u, v, pos_s = (f.strip() for f in row)
            try:
                pos = int(pos_s)
            except ValueError:
                raise ParseError(f"assignment: line {ln}: invalid position {pos_s!r}") from None
            if venues is not None and v not in venues:
                raise ParseError(f"assignment: line {ln}: unknown venue {v!r}")
            rows.setdefault(u, []).append((pos, v))
    visits: dict[str, tuple[str, ...]] = {}
    for u, lst in rows.items():
        lst.sort()
        if [p for p, _ in lst] != list(range(len(lst))):
            raise ParseError(f"assignment: user {u!r} has non-contiguous positions")
        visits[u] = tuple(v for _, v in lst)
    return PlaceAssignment(visits)
