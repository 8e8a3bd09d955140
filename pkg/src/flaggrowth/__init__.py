"""Homology of flag complexes, Salvetti covers and Davis complexes over Q and F_p."""

__version__ = "0.1.0"

from .chains import ChainComplex, integral_homology, reduced_betti, simplicial_chain_complex
from .complexes import (
    SimplicialComplex,
    barycentric_subdivision,
    build_complex,
    builtin,
    delete_vertex,
    empty_triangles,
    full_subcomplex,
    is_flag,
    is_isomorphic,
    join,
    library,
    link,
    octahedralize,
    star,
    subdivide_edge,
)
from .davis import DavisComplex, build_davis, davis_betti, embedding_criterion, mv_check
from .linalg import PrimeField, SizeLimitError, SparseIntMatrix, gfp_rank, rank, rational_rank, smith_normal_form
from .nerve import coefficient_nerve_homology, collapse_report, e1_dimensions, nerve_subcomplex
from .salvetti import (
    BettiTable,
    CoverSpec,
    InconsistencyError,
    build_cover_complex,
    character_decomposition_check,
    cover_betti,
    normalized_betti_scan,
    torsion_rank_profile,
    twisted_complex,
)

__all__ = [name for name in dir() if not name.startswith("_")]
