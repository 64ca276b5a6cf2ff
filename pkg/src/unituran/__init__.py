"""Uniform Turan densities of k-graphs: orderings, certificates, palettes and reduced maps."""

__version__ = "0.1.0"

from .hypergraph import (  # noqa: E402
    BudgetExceeded,
    Hypergraph,
    complete_graph,
    family_F,
    family_labels,
    find_embedding,
    is_embedding,
    is_f_free,
    shadow,
    tight_cycle,
    tight_path,
)
from .vanishing import (  # noqa: E402
    ColoredDigraph,
    Digraph,
    acyclic_ordering,
    build_type_digraph,
    digraph_to_ordering,
    find_vanishing_ordering,
    is_vanishing,
    transitive_digraph,
    type_assignment,
)
from .conditions import (  # noqa: E402
    SplitCertificate,
    Verdict,
    check_club,
    check_spade,
    find_split_certificate,
    paper_split_certificate,
    verdict,
    verify_split,
)
from .palette import (  # noqa: E402
    Palette,
    build_H,
    conj_palette,
    lower_bound,
    sample_psi,
    vanishing_palette,
    verify_palette_avoids,
)
from .density import (  # noqa: E402
    DensitySpec,
    WitnessGraph,
    check_j_dense,
    check_kj_dense,
    concentration_experiment,
    count_cliques,
    edge_density,
)
from .reduced import (  # noqa: E402
    AnchorFamily,
    ReducedGraph,
    ReducedMap,
    algorithm1_color,
    build_reduced_map_from_anchors,
    find_reduced_map,
    is_d_dense,
    lemma5_bound_check,
    normalized_degree,
    s_rho,
    verify_anchors,
    verify_reduced_map,
)
