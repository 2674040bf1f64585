"""Distance-to-measure fields and Fermat distance-to-measure metrics on point clouds.

The package evaluates the distance-to-measure (DTM) of weighted discrete
measures exactly, builds weighted graphs over point clouds whose shortest-path
metric is the empirical Fermat distance-to-measure (FDTM), extracts geodesic
polylines, and ships brute-force oracles plus a desk-scale experiment harness.
"""

from fdtm.errors import CsvFormatError, InvalidInputError, UnsupportedError
from fdtm.measures import (
    DtmParams,
    PointCloud,
    WeightedMeasure,
    lecam_pair,
    make_empirical,
    sample_circle,
    sample_ring,
    scale_measure,
)
from fdtm.dtm import SpatialIndex, dtm_batch, dtm_segment_integral, dtm_value
from fdtm.graph import (
    Complete,
    EndpointAverageDtm,
    KNearest,
    MetricGraph,
    SampleFermat,
    SubdividedDtm,
    Yao,
    build_graph,
    default_degree,
    edge_count_bound_check,
)
from fdtm.paths import (
    GeodesicResult,
    ShortestPathTree,
    all_pairs_sampled,
    fdtm_query,
    single_source,
)
from fdtm.runtime import get_threads, set_threads

__version__ = "0.1.0"

__all__ = [
    "CsvFormatError",
    "InvalidInputError",
    "UnsupportedError",
    "DtmParams",
    "PointCloud",
    "WeightedMeasure",
    "lecam_pair",
    "make_empirical",
    "sample_circle",
    "sample_ring",
    "scale_measure",
    "SpatialIndex",
    "dtm_batch",
    "dtm_segment_integral",
    "dtm_value",
    "Complete",
    "KNearest",
    "Yao",
    "SubdividedDtm",
    "EndpointAverageDtm",
    "SampleFermat",
    "MetricGraph",
    "build_graph",
    "default_degree",
    "edge_count_bound_check",
    "GeodesicResult",
    "ShortestPathTree",
    "all_pairs_sampled",
    "fdtm_query",
    "single_source",
    "get_threads",
    "set_threads",
]
