"""Signatures of squared-distance matrices of finite and sampled metric
measure spaces: inertia computation, limit-signature trajectories,
indefinite scaling embeddings, prescribed-signature constructions, and
seeded random-graph spectra."""

__version__ = "0.1.0"

from .errors import (
    AsymmetryError,
    BadParams,
    ConeViolation,
    DiameterTooLarge,
    Disconnected,
    DuplicatePoints,
    EpsilonUnderflow,
    InvalidInput,
    InvalidMeasure,
    MmsigError,
    MonotonicityViolation,
    NegativeDistance,
    NoConvergence,
    NonzeroDiagonal,
    SingularBlock,
    StrictnessViolated,
    TriangleViolation,
    UnknownName,
    ZeroOffDiagonal,
)
from .linalg import (
    EigenDecomposition,
    Inertia,
    as_sym_matrix,
    double_center,
    eig_sym,
    haynsworth_check,
    inertia,
    schur_complement,
    weighted_center,
)
from .spaces import (
    FiniteMetricSpace,
    Graph,
    PseudoEuclideanPointSet,
    from_distance_matrix,
    from_euclidean_points,
    from_graph,
    from_pseudo_euclidean,
    named_example,
    read_distance_csv,
    read_edge_list,
    squared_intervals,
    strict_cauchy_schwarz_check,
    write_distance_csv,
    write_edge_list,
)
from .sampling import (
    DiscreteMeasure,
    SampleTrajectory,
    dedup_matrix_invariance,
    gv_sample,
    k_matrix,
    load_measure,
    parse_measure_spec,
    t_matrix,
    trial_seed,
)
from .signature import (
    EmbeddabilityVerdict,
    SignatureTrajectory,
    centered_signature,
    classify_embeddability,
    kernel_reconstruction_check,
    limit_signature_trajectory,
    mds_embed,
    s_matrix,
    sampled_signature_trajectory,
    space_signature,
    verify_isometry,
)
from .constructions import (
    CountableRadoModel,
    er_adjacency,
    perturb_to_max_negative,
    prescribed_signature_space,
    quadratic_gap_clique,
    rado_consistency_check,
    rado_metric_space,
    rado_s_matrix,
    residue_class_clique,
    union_r_matrix,
    union_space,
)
from .spectral import (
    ESD,
    RatioTrajectory,
    delta_ratio,
    esd,
    ks_to_semicircle,
    rado_ratio_experiment,
    rado_ratio_trials,
    sampled_prefix_trajectory,
    semicircle_cdf,
)
