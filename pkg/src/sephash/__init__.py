"""Perfect and separating hash families with large universe.

The toolkit builds solution-free integer sets for the invariant linear
equations attached to cyclic permutation sequences of a small set R,
then turns (R, M, q) into perfect-hash-family matrices, with exhaustive
verification oracles at desk scale.
"""

from .sequences import SeqAnalysis, analyze, delete_max, enumerate_sequences, is_monotonic
from .arrays import (
    AncestorString,
    ArrayDiagnostics,
    BipartiteArray,
    PlasticParams,
    ancestor,
    array_from_sequence,
    build_ancestor_string,
    diagnostics,
    theta_schedule,
)
from .solfree import (
    CapExceededError,
    SolutionFreeCert,
    SolutionWitness,
    behrend_base,
    find_solution,
    greedy_solution_free,
    link_construct,
    max_solution_free_exact,
    pipeline_single_equation,
    verify_solution_free,
)
from .hashfam import (
    EnumerationCapError,
    HashFamilyMatrix,
    PlasticSet,
    RainbowCycle,
    SHFType,
    TowerCollisionError,
    bound_lower_lll,
    bound_upper,
    build_phf,
    find_rainbow_cycle,
    plastic_tower,
    rainbow_cycle_relation,
    verify_shf,
)

__version__ = "0.1.0"

__all__ = [
    "SeqAnalysis",
    "analyze",
    "delete_max",
    "enumerate_sequences",
    "is_monotonic",
    "AncestorString",
    "ArrayDiagnostics",
    "BipartiteArray",
    "PlasticParams",
    "ancestor",
    "array_from_sequence",
    "build_ancestor_string",
    "diagnostics",
    "theta_schedule",
    "CapExceededError",
    "SolutionFreeCert",
    "SolutionWitness",
    "behrend_base",
    "find_solution",
    "greedy_solution_free",
    "link_construct",
    "max_solution_free_exact",
    "pipeline_single_equation",
    "verify_solution_free",
    "EnumerationCapError",
    "HashFamilyMatrix",
    "PlasticSet",
    "RainbowCycle",
    "SHFType",
    "TowerCollisionError",
    "bound_lower_lll",
    "bound_upper",
    "build_phf",
    "find_rainbow_cycle",
    "plastic_tower",
    "rainbow_cycle_relation",
    "verify_shf",
]
