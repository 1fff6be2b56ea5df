"""Exact flag-algebra tools for Ramsey multiplicity problems on graphs."""

__version__ = "0.1.0"

from .graphs import (Graph, GraphError, canonical_form, complement, enumerate_graphs, named_graph,
                     parse_graph)
from .exact import RatMatrix, is_psd
from .densities import (ConstGraphon, WeightedGraph, complement_w, from_graph, hom_density,
                        objective, t_inj)
from .flags import Flag, a_coeff, a_coeff_lifted, enumerate_flags
from .certificates import (AlphaCertificate, LowerBoundCertificate, load_certificate, verify_alpha,
                           verify_lower)
from .search import SearchConfig, hill_climb, random_regular, switch
from .sdp_export import export_sdp

__all__ = [
    "Graph", "GraphError", "canonical_form", "complement", "enumerate_graphs", "named_graph",
    "parse_graph", "RatMatrix", "is_psd", "ConstGraphon", "WeightedGraph", "complement_w",
    "from_graph", "hom_density", "objective", "t_inj", "Flag", "a_coeff", "a_coeff_lifted",
    "enumerate_flags", "AlphaCertificate", "LowerBoundCertificate", "load_certificate",
    "verify_alpha", "verify_lower", "SearchConfig", "hill_climb", "random_regular", "switch",
    "export_sdp", "__version__",
]
