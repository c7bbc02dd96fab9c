"""Random cycles of i.i.d. compositions of Markov interval maps.

Build finite random systems from affine, base-beta, or intermittent
branches, enumerate their random cycles with derivative weights, and compare
the resulting weighted empirical measures against stationary densities.
"""

from .beta import (
    BetaSystem,
    DigitSequence,
    DigitStats,
    build_beta_system,
    digit_limit_targets,
    digit_sequence,
    digit_stats,
    q_closed_form_golden,
    q_from_density,
    weighted_digit_averages,
)
from .cycles import (
    Cycle,
    CycleSet,
    annealed_partition_direct,
    birkhoff_average,
    birkhoff_product,
    birkhoff_ratio,
    cycle_measure_xi,
    cycle_point_measure,
    enumerate_cycles,
    enumerate_preimages,
    enumerate_skew_fixed_points,
    find_cycle_in_cylinder,
    pair_sum_statistic,
    pressure_from_cycles,
    sample_averaged_measure,
    weighted_functional_average,
)
from .errors import (
    ConvergenceError,
    DomainError,
    InadmissibleWordError,
    MarkovStructureError,
    NumericalError,
    ParameterError,
    RandcyclesError,
    SizeGuardError,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .lsv import (
    LsvSpec,
    build_lsv_system,
    classify_case,
    lsv_map,
    neutral_mass_profile,
    return_time_tail,
)
from .maps import (
    AffineBranch,
    BetaPieceBranch,
    Interval,
    LsvLeftBranch,
    MarkovMap,
    affine_markov_map,
    doubling_map,
    validate_markov,
    wraps_as_circle,
)
from .measures import (
    GOLDEN_RATIO,
    PiecewiseConstantDensity,
    WeightedPointMeasure,
    golden_density,
    kolmogorov_distance,
    lebesgue_density,
    pelikan_index,
    ulam_stationary,
)
from .symbolic import (
    Alphabet,
    RandomSystem,
    SampleWord,
    TransitionMatrix,
    admissible_words,
    build_alphabet_and_matrix,
    count_admissible_words,
    count_all_words,
    cylinder_interval,
    mixing_index,
)

__version__ = "0.1.0"
