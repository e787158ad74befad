"""locfin: bounded-degree localization of finite simplicial complexes.

A library for converting a finite ordered simplicial complex into a
homotopy-equivalent complex of the same dimension whose vertices each meet a
bounded number of edges, together with the verification machinery (exact
integer homology via Smith normal form, greedy collapsibility, fiber
certification, degree audits) that checks the construction's properties.
"""

from .core import (Complex, SimplicialMap, ValidationReport, base_restriction,
                   closure, edge_degree, identity_map, image_complex,
                   induced_subcomplex, intersection, is_chain, pad_to_level,
                   point, poset_leq, product, ray_segment, skeleton, union,
                   validate, vertex_degrees)
from .construction import (DegreeBounds, PipelineError, Tower, TowerStage,
                           attach_level, completion_round, degree_bounds,
                           first_fit_coloring, grow_edges, localize,
                           mapping_telescope, projection_map, spread_level,
                           telescope)
from .homology import (ChainComplex, HomologyResult, InducedMapResult,
                       SNFResult, chain_complex, field_betti, homology,
                       induced_map_homology, is_acyclic, smith_normal_form)
from .verify import (CollapseReport, DegreeReport, FiberReport, GeneratorSpec,
                     TelescopeReport, check_pseudofibration,
                     check_telescope_lemmas, collapse_to_point, cone,
                     degree_audit, fixture, FIXTURE_NAMES, generate,
                     shelled_tree, surjective_on_simplices)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
