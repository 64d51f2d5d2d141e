"""Exact Cheeger constants, fillings, spectra and integral homology of cell complexes."""

from .complex import INF, CellComplex, Chain, ChainComplex, NormSpec, build_simplicial, complex_from_json, complex_to_json, load_complex
from .constructors import (
    build_fibration,
    cycle_graph,
    hypercube_skeleton,
    lens_space,
    named_complex,
    random_complex,
    random_connected_graph,
    simplex_boundary,
)
from .errors import (
    CheegerKitError,
    ComplexError,
    DimensionError,
    EnumerationCapError,
    InfiniteCoverError,
    InvariantViolation,
    NotRationalHomologySphere,
    OracleViolation,
)
from .filling import cheeger, min_cofilling, min_filling, tilde_h2
from .homology import chain_contraction_probe, homology, universal_abelian_cover
from .snf import smith_normal_form
from .spectral import cheeger_l2_down, cheeger_l2_up, hodge_laplacian, spectral_report, tilde_h2_l2
from .surgery import FramedLink, surgery_h1

__version__ = "0.1.0"
