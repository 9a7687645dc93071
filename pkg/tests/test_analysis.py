import math

import pytest

from citynet import (
    CheckIn,
    CityDataset,
    GeneratorConfig,
    PlaceAssignment,
    SocialGraph,
    Venue,
    average_shortest_path,
    colocation_friendship_probability,
    compute_metric_report,
    degree_distribution,
    generate,
    generate_synthetic_city,
    giant_component,
    ks_distance,
    place_popularity,
    popularity_ccdf,
    popularity_comparison,
    random_baseline,
    span_distribution,
    triangle_common_place_fraction,
)
from citynet.analysis import write_ccdf_csv, write_degree_csv, write_span_pdf_csv

from bruteforce import adjacency, bf_average_shortest_path
from conftest import random_edge_set


def v(vid, cat="Food", lat=40.0, lon=-80.0):
    return Venue(vid, f"Place {vid}", lat, lon, cat)


# --- degree distribution -----------------------------------------------------


def test_degree_distribution_triangle(triangle_graph):
    assert degree_distribution(triangle_graph) == {2: 3}


def test_degree_distribution_path_and_star():
    path = SocialGraph(edges=[("a", "b"), ("b", "c")])
    assert degree_distribution(path) == {1: 2, 2: 1}
    star = SocialGraph(edges=[("hub", "a"), ("hub", "b"), ("hub", "c")])
    assert degree_distribution(star) == {1: 3, 3: 1}


# --- shortest paths ----------------------------------------------------------


def test_average_path_three_node_line():
    g = SocialGraph(edges=[("a", "b"), ("b", "c")])
    assert average_shortest_path(g) == pytest.approx(4.0 / 3.0)


def test_average_path_requires_connected():
    g = SocialGraph(edges=[("a", "b"), ("c", "d")])
    with pytest.raises(ValueError):
        average_shortest_path(g)
    with pytest.raises(ValueError):
        average_shortest_path(SocialGraph())
    with pytest.raises(ValueError):
        average_shortest_path(SocialGraph(edges=[("a", "b")]), mode="psychic")


def test_single_node_path_zero():
    assert average_shortest_path(SocialGraph(nodes=["x"])) == 0.0


def test_sampled_equals_exact_when_sources_cover():
    nodes, edges = random_edge_set(13)
    g = giant_component(SocialGraph(nodes=nodes, edges=edges))
    exact = average_shortest_path(g)
    assert average_shortest_path(g, mode="sampled", k_sources=g.node_count) == exact
    assert average_shortest_path(g, mode="sampled", k_sources=10 * g.node_count) == exact


def test_sampled_close_and_deterministic():
    nodes, edges = random_edge_set(29, max_nodes=40, p=0.2)
    g = giant_component(SocialGraph(nodes=nodes, edges=edges))
    exact = average_shortest_path(g)
    k = max(2, g.node_count // 2)
    s1 = average_shortest_path(g, mode="sampled", k_sources=k, seed=3)
    s2 = average_shortest_path(g, mode="sampled", k_sources=k, seed=3)
    assert s1 == s2
    assert s1 == pytest.approx(exact, rel=0.5)


@pytest.mark.parametrize("seed", range(10))
def test_average_path_matches_brute_force(seed):
    nodes, edges = random_edge_set(seed)
    g = giant_component(SocialGraph(nodes=nodes, edges=edges))
    adj = adjacency(list(g.edges()), g.nodes())
    assert average_shortest_path(g) == pytest.approx(
        bf_average_shortest_path(adj), abs=1e-9
    )


# --- random baseline ---------------------------------------------------------


def test_random_baseline_validation():
    with pytest.raises(ValueError):
        random_baseline(0, 0)
    with pytest.raises(ValueError):
        random_baseline(5, 11)  # max is 10
    with pytest.raises(ValueError):
        random_baseline(5, -1)


def test_random_baseline_zero_edges():
    assert random_baseline(4, 0) == (0.0, 0.0, 0.0)


def test_random_baseline_deterministic_per_seed():
    a = random_baseline(60, 90, seed=1)
    b = random_baseline(60, 90, seed=1)
    c = random_baseline(60, 90, seed=2)
    assert a == b
    assert a != c


def test_random_baseline_dense_regime_complete_graph():
    # n=5, k=10 forces the dense sampler and must produce K5 exactly
    m = random_baseline(5, 10)
    assert m.c_r == pytest.approx(1.0)
    assert m.d_r == pytest.approx(1.0)


def test_random_baseline_clustering_near_density():
    # sparse G(n, k): expected clustering is about k / C(n, 2)
    m = random_baseline(400, 800, seed=0)
    assert m.c_r == pytest.approx(800 / (400 * 399 / 2), abs=0.02)


# --- popularity --------------------------------------------------------------


def make_dataset():
    venues = {
        "v1": v("v1"),
        "v2": v("v2", lon=-80.01),
        "v3": v("v3", lon=-80.02),
        "dead": v("dead", lon=-80.03),
    }
    checkins = [
        CheckIn("a", "v1", 10),
        CheckIn("a", "v2", 20),
        CheckIn("b", "v1", 30),
        CheckIn("c", "v3", 40),
    ]
    return CityDataset(["a", "b", "c"], venues, checkins, [])


def test_place_popularity_counts_distinct_visitors():
    pop = place_popularity(make_dataset())
    assert pop == {"v1": 2, "v2": 1, "v3": 1, "dead": 0}


def test_place_popularity_from_assignment():
    d = make_dataset()
    a = PlaceAssignment({"a": ("v1",), "b": ("v1", "v2")})
    pop = place_popularity(a, d.venues)
    assert pop == {"v1": 2, "v2": 1, "v3": 0, "dead": 0}
    with pytest.raises(TypeError):
        place_popularity(["not", "a", "dataset"])


def test_popularity_ccdf_values():
    assert popularity_ccdf({"a": 1, "b": 1, "c": 2}) == [(1, 1.0), (2, pytest.approx(1 / 3))]
    assert popularity_ccdf({"a": 3, "b": 0}) == [(3, 1.0)]
    with pytest.raises(ValueError):
        popularity_ccdf({"a": 0})


def test_popularity_comparison_grouped_curve():
    emp = {"v1": 3, "v2": 1, "v3": 1, "v4": 2}
    mod = {"v1": 9, "v2": 1, "v3": 3, "v4": 4}
    cmp_ = popularity_comparison(emp, mod)
    assert cmp_.grouped == ((1, 2.0), (2, 4.0), (3, 9.0))
    assert cmp_.spearman == pytest.approx(1.0)
    assert ("v1", 3, 9) in cmp_.pairs


def test_popularity_comparison_degenerate_and_mismatch():
    assert popularity_comparison({"v": 1}, {"v": 5}).spearman is None
    assert popularity_comparison({"a": 1, "b": 2}, {"a": 3, "b": 3}).spearman is None
    with pytest.raises(ValueError):
        popularity_comparison({"a": 1}, {"b": 1})
    with pytest.raises(ValueError):
        popularity_comparison({}, {})


# --- spans and KS ------------------------------------------------------------


def test_span_distribution_samples_and_pdf():
    d = make_dataset()
    samples, pdf = span_distribution(d, bin_width_km=0.5)
    by_user = {s.user: s.span_km for s in samples}
    assert by_user["b"] == 0.0 and by_user["c"] == 0.0
    assert by_user["a"] > 0.0
    assert [s.user for s in samples] == ["a", "b", "c"]
    total = sum(density * 0.5 for _, density in pdf)
    assert total == pytest.approx(1.0)


def test_span_distribution_validation():
    d = make_dataset()
    with pytest.raises(ValueError):
        span_distribution(d, bin_width_km=0.0)
    a = PlaceAssignment({"a": ("v1",)})
    with pytest.raises(ValueError):
        span_distribution(a)  # venue table required
    samples, _ = span_distribution(a, d.venues)
    assert samples[0].span_km == 0.0


def test_ks_distance_known_values():
    assert ks_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert ks_distance([0.0, 0.1], [5.0, 6.0]) == 1.0
    assert ks_distance([0.0, 1.0], [0.5]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ks_distance([], [1.0])


# --- triangles and places ----------------------------------------------------


def test_triangle_common_place_fraction_half():
    g = SocialGraph(
        edges=[("a", "b"), ("b", "c"), ("c", "a"), ("x", "y"), ("y", "z"), ("z", "x")]
    )
    visited = {
        "a": {"v1"}, "b": {"v1"}, "c": {"v1"},          # shared place
        "x": {"v1"}, "y": {"v2"}, "z": {"v3"},          # none shared by all three
    }
    assert triangle_common_place_fraction(g, visited) == pytest.approx(0.5)


def test_triangle_common_place_none_without_triangles():
    g = SocialGraph(edges=[("a", "b")])
    assert triangle_common_place_fraction(g, {"a": {"v"}, "b": {"v"}}) is None


# --- colocation --------------------------------------------------------------


def coloc_dataset():
    venues = {"v1": v("v1"), "v2": v("v2", cat="Travel and Transport", lon=-80.01)}
    checkins = [
        CheckIn("a", "v1", 0),
        CheckIn("b", "v1", 50),
        CheckIn("a", "v1", 3000),
        CheckIn("c", "v1", 3100),
        CheckIn("a", "v2", 0),
        CheckIn("c", "v2", 10),
    ]
    return CityDataset(["a", "b", "c"], venues, checkins, [])


def test_colocation_pairs_vs_events():
    d = coloc_dataset()
    g = SocialGraph(nodes=["c"], edges=[("a", "b")])
    # Food pairs within the hour: ab, ac, bc -> only ab are friends
    pairs = colocation_friendship_probability(d, g, mode="pairs")
    assert pairs["Food"] == pytest.approx(1 / 3)
    assert pairs["Travel and Transport"] == 0.0
    # events double-count the repeated a/b colocation: ab twice, ac twice, bc once
    events = colocation_friendship_probability(d, g, mode="events")
    assert events["Food"] == pytest.approx(2 / 5)


def test_colocation_window_and_warning():
    venues = {"v1": v("v1")}
    checkins = [CheckIn("a", "v1", 0), CheckIn("b", "v1", 7200)]
    d = CityDataset(["a", "b"], venues, checkins, [])
    g = SocialGraph(edges=[("a", "b")])
    with pytest.warns(UserWarning, match="no colocated pairs"):
        out = colocation_friendship_probability(d, g, window_s=3600)
    assert out == {}
    # exactly at the window boundary counts
    out = colocation_friendship_probability(d, g, window_s=7200)
    assert out["Food"] == 1.0
    with pytest.raises(ValueError):
        colocation_friendship_probability(d, g, window_s=-1)
    with pytest.raises(ValueError):
        colocation_friendship_probability(d, g, mode="vibes")


# --- combined report ---------------------------------------------------------


def test_metric_report_smoke():
    d = generate_synthetic_city(300, 200, seed=2)
    assignment, g = generate(d, GeneratorConfig(seed=4))
    report = compute_metric_report(g, dataset=d, assignment=assignment, seed=0)
    assert report["n"] == g.node_count and report["k"] == g.edge_count
    assert 0.0 <= report["clustering"] <= 1.0
    assert report["avg_path"] is None or report["avg_path"] >= 1.0
    assert -0.5 <= report["modularity"] <= 1.0
    assert isinstance(report["coloc_prob"], dict)
    assert report["baseline"] is not None and report["baseline"]["c_r"] < 0.1
    assert report["popularity_fit"] is not None
    assert report["triangle_common_place"] is None or 0.0 <= report["triangle_common_place"] <= 1.0


def test_metric_report_minimal_graph():
    g = SocialGraph(nodes=["only"])
    report = compute_metric_report(g)
    assert report["k"] == 0
    assert report["avg_path"] is None
    assert report["modularity"] is None
    assert report["baseline"] is None
    assert report["coloc_prob"] is None


# --- csv writers -------------------------------------------------------------


def test_csv_writers(tmp_path):
    g = SocialGraph(edges=[("a", "b"), ("b", "c")])
    write_degree_csv(g, tmp_path / "deg.csv")
    assert (tmp_path / "deg.csv").read_text().splitlines()[0] == "degree,count"
    write_ccdf_csv({"v": 2, "w": 1}, tmp_path / "ccdf.csv")
    lines = (tmp_path / "ccdf.csv").read_text().splitlines()
    assert lines[0] == "popularity,ccdf" and lines[1] == "1,1.0"
    write_span_pdf_csv([(0.0, 0.4)], tmp_path / "pdf.csv")
    assert "bin_left_km,density" in (tmp_path / "pdf.csv").read_text()
