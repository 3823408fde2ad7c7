"""Canonical tree-like decompositions of graphs, set systems and bipartition
systems, together with a CMSO2 evaluator and executable transductions that
reproduce the decompositions logically and are cross-checked against the
direct algorithms."""

from .core import (
    BipartitionSystem,
    DiGraph,
    ExtRelStruct,
    RootedTree,
    SetSystem,
    UnrootedTree,
    bipartitions_overlap,
    build_structure,
    normalize_bipartition_system,
    normalize_set_system,
    sets_overlap,
)
from .errors import (
    DecompError,
    DegreeTooLarge,
    FormulaSyntaxError,
    Inconsistent,
    MissingSymbol,
    NodeInX,
    NotCograph,
    NotConnected,
    NotLaminar,
    NotThin,
    NotWeaklyBipartitive,
    NotWeaklyPartitive,
    RequiresUndirected,
    ScopeError,
    TooLarge,
    UnboundVariable,
    UniverseTooLarge,
)
from .graphdec import (
    Cotree,
    CotreeLabel,
    ModularDecomposition,
    Skeleton,
    SplitDecomposition,
    cotree,
    count_modules,
    count_modules_via_tree,
    cut_rank,
    equiv_classes,
    graph_from_cotree,
    graph_from_modular,
    graph_from_skeleton,
    graph_from_split,
    is_bijoin,
    is_module,
    is_split,
    modular_decomposition,
    modules_set_system,
    rank_width_of,
    skeleton,
    split_decomposition,
)
from .identification import (
    BiColouring,
    IdPair,
    NodeCase,
    ThinPartition,
    avoiding_leaf,
    classify_node,
    decode,
    four_bicolourings,
    has_unique_request,
    identify_thin,
    is_thin,
    thin_4_partition,
)
from .laminar import (
    is_laminar,
    is_laminar_bipartitions,
    laminar_tree,
    laminar_tree_bipartitions,
    rooted_reduction,
    tree_to_sets,
    unrooted_tree_to_bipartitions,
)
from .partitive import (
    Label,
    WBTree,
    WPTree,
    generate_bipartition_family,
    generate_family,
    is_bipartitive,
    is_partitive,
    is_weakly_bipartitive,
    is_weakly_partitive,
    strong_bipartitions,
    strong_members,
    weakly_bipartitive_tree,
    weakly_partitive_tree,
)

__version__ = "0.1.0"
