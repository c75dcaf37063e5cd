"""Random graphs with bounded maximum degree: exact counting, uniform sampling,
structural census and first-order limit laws."""
from .counting import (
    DegreeClass,
    degree_class_weight,
    lambda_p,
    matchings,
    mu_p,
    simplicity_constant,
    truncated_poisson,
)
from .graph import Configuration, Graph, GraphError, Multigraph, graph_image, parse_graph, format_graph
from .sampler import SamplerSpec, batch_sample, sample_uniform_graph

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "DegreeClass",
    "Graph",
    "GraphError",
    "Multigraph",
    "SamplerSpec",
    "__version__",
    "batch_sample",
    "degree_class_weight",
    "format_graph",
    "graph_image",
    "lambda_p",
    "matchings",
    "mu_p",
    "parse_graph",
    "sample_uniform_graph",
    "simplicity_constant",
    "truncated_poisson",
]
