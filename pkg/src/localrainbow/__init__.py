"""Per-vertex rainbow colorings of complete graphs: how many colors does a
family need so that every copy of a target graph is rainbow for at least
one of its own vertices?  This package models the coloring families,
verifies goodness, runs the counting proofs as deterministic
violation-finding algorithms with machine-checkable certificates, solves
small cases exactly, and constructs good families for the upper-bound side.
"""

from .extract import (
    BipartitionExtraction,
    CliqueExtraction,
    MatchingExtraction,
    StarExtraction,
    bipartition_extract,
    clique_extract,
    matching_extract,
    star_extract,
)
from .exact import ExactResult, compute_c, decide_good_exists, export_cnf
from .finders import (
    DEFAULT_CONFIG,
    FinderConfig,
    FinderOutcome,
    ThresholdNotMet,
    detect_h6_member,
    find_c4,
    find_clique,
    find_complete_bipartite,
    find_i4,
    find_matching_56,
    find_matching_large,
    find_p2_3k2,
    find_p2_k2_k2,
    find_p2_p2,
    find_p4,
    find_s4,
    find_star,
    generic_find,
)
from .generate import GeneratorSpec, construct_good_family, generate
from .model import (
    AnchoredViolation,
    ColoringFamily,
    ColorRangeError,
    DenseFamily,
    Embedding,
    FamilyFormatError,
    InjectiveFamily,
    MonochromaticFamily,
    PatternError,
    PatternGraph,
    ScaleGuardError,
    SeededFamily,
    SizeMismatchError,
    ViolationCertificate,
    count_copies,
    enumerate_copies,
    make_pattern,
    read_family,
    subgraph_contains,
    write_family,
)
from .verify import (
    GoodnessReport,
    check_anchored,
    check_certificate,
    copy_is_good,
    extend_violation,
    extend_with_slack,
    family_is_good,
    find_bad_copy,
    is_rainbow,
)

__version__ = "0.1.0"
