"""Component-tree image filtering: Max/Min-trees, structure-aware connected
filters, monotone contrast transforms, dual-view generation, and metrics."""

from .image import (
    ConfigurationError,
    Connectivity,
    DomainError,
    GrayImage,
    default_connectivity,
    negate,
    neighbors,
)
from .tree import (
    ComponentTree,
    TreeKind,
    build_max_tree,
    build_min_tree,
    leaf_count,
    oracle_tree,
    tree_isomorphic,
)
from .filters import (
    DsaifPair,
    RemovalMask,
    dsaif_pair,
    lsaif,
    mark_removals,
    reconstruct,
    structure_aware_filter,
    usaif,
)
from .contrast import (
    BEZIER_Z_CHOICES,
    GAMMA_RANGE,
    MonotoneTransform,
    apply_transform,
    bezier_lut,
    gamma_lut,
    identity_lut,
    parse_descriptor,
    sample_transform,
)
from .metrics import LabelMap, TreeStats, dice, error_diversity, tree_stats
from .io import (
    ParseError,
    export_dot,
    read_pgm,
    read_volume,
    write_pgm,
    write_volume,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
