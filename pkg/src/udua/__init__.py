"""Joint UAV base-station deployment and user association solvers."""

from .association import (
    Association,
    Infeasible,
    RateMatrix,
    brute_force_association,
    build_rate_matrix,
    solve_greedy,
    solve_km,
)
from .channel import (
    ChannelParams,
    GainTable,
    SystemBounds,
    build_gain_table,
    expected_gain,
    link_rate,
    load_channel_params,
    los_probability,
    path_gain,
    system_bounds,
)
from .deployment import (
    BudgetExceeded,
    Deployment,
    SAConfig,
    Solution,
    evaluate_deployment,
    exhaustive_search,
    random_deployment,
    random_solution,
    simulated_annealing,
)
from .knowledge import (
    DifferenceDegree,
    KnowledgeDatabase,
    KnowledgeEntry,
    build_database,
    difference_degree,
    knn_query,
    load_database,
    save_database,
    solve_online,
)
from .scenario import (
    GridRegion,
    ScenarioGenConfig,
    ScenarioGenerationError,
    UserSet,
    distribution_matrix,
    load_user_sets,
    sample_user_set,
    save_user_sets,
)

__version__ = "0.1.0"
