"""citynet: place-focused social networks in cities.

Build the empirical check-in/follow network of a city, generate synthetic
counterparts from place assignments and per-place tie formation, and analyze
both with the same metric toolkit.
"""

__version__ = "0.1.0"

from .analysis import (
    BaselineMetrics,
    PopularityComparison,
    SpanSample,
    average_shortest_path,
    colocation_friendship_probability,
    compute_metric_report,
    degree_distribution,
    ks_distance,
    place_popularity,
    popularity_ccdf,
    popularity_comparison,
    random_baseline,
    span_distribution,
    triangle_common_place_fraction,
)
from .community import Partition, louvain, modularity
from .generator import (
    DEFAULT_CATEGORY_WEIGHTS,
    GeneratorConfig,
    PlaceAssignment,
    assign_places,
    assignment_weights,
    calibrate_uniform_tie_prob,
    form_ties,
    generate,
    generate_synthetic_city,
    rank_distance,
    read_assignment,
    tie_probability,
    write_assignment,
)
from .geo import EARTH_RADIUS_KM, geographic_span, great_circle
from .graph import (
    SocialGraph,
    average_clustering,
    connected_components,
    enumerate_triangles,
    giant_component,
    local_clustering,
    read_edge_list,
    write_edge_list,
)
from .ingest import (
    CATEGORIES,
    CheckIn,
    CityDataset,
    NON_SOCIAL_CATEGORIES,
    ParseError,
    SEMI_SOCIAL_CATEGORIES,
    SOCIAL_CATEGORIES,
    Venue,
    build_city_network,
    category_class,
    load_dataset,
    parse_checkins,
    parse_follows,
    parse_venues,
    save_dataset,
)
from .powerlaw import PowerLawFit, fit_power_law, sample_zipf

__all__ = [
    "__version__",
    # graph
    "SocialGraph",
    "average_clustering",
    "connected_components",
    "enumerate_triangles",
    "giant_component",
    "local_clustering",
    "read_edge_list",
    "write_edge_list",
    # geo
    "EARTH_RADIUS_KM",
    "great_circle",
    "geographic_span",
    # power laws
    "PowerLawFit",
    "fit_power_law",
    "sample_zipf",
    # communities
    "Partition",
    "louvain",
    "modularity",
    # ingestion
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
    "save_dataset",
    "load_dataset",
    "build_city_network",
    # generator
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
    # analysis
    "degree_distribution",
    "average_shortest_path",
    "BaselineMetrics",
    "random_baseline",
    "place_popularity",
    "popularity_ccdf",
    "PopularityComparison",
    "popularity_comparison",
    "SpanSample",
    "span_distribution",
    "ks_distance",
    "triangle_common_place_fraction",
    "colocation_friendship_probability",
    "compute_metric_report",
]
