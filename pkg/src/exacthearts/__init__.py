"""Exact subcategories of module categories over quiver algebras: acyclicity,
Ext-resolutions, finitely presented functors, hearts and t-pairs."""

from .linalg import Field, InputError, Matrix
from .quiver import PathAlgebra, Quiver, build_path_algebra, parse_relation
from .modules import (
    Module,
    ModuleMap,
    decompose,
    direct_sum,
    enumerate_indecomposables,
    ext1_dim,
    hom_dim,
    injective,
    projective,
    simple,
)
from .exact import (
    INDUCED,
    SPLIT,
    ExactSubcat,
    check_maximally_nonnegative,
    check_resolving,
    whole_module_category,
)
from .complexes import ChainMap, Complex, classify_acyclicity, cone, is_quasi_iso
from .resolutions import (
    ext_resolution,
    extend_to_chain_map,
    horseshoe,
    null_homotopy_after_qis,
    pad_presentation,
    transfer_resolution,
)
from .functors import FpFunctor, is_effaceable, membership_completion
from .hearts import (
    DerivedUniverse,
    characterize_maximal_nonnegativity,
    completion_crosscheck,
    compute_heart,
    heart_membership,
    maximal_t_pairs,
    verify_t_pair,
)
from .workspace import Workspace, WorkspaceError, parse

__version__ = "0.1.0"
