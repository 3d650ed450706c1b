"""rsl: SI rumor spreading, rumor-centrality source estimation, and
Monte Carlo verification of the closed-form detection laws on trees and
tree-like random graphs.

The hot Monte Carlo kernels run on a compiled extension when it is built
(``rsl.BACKEND == "compiled"``) and fall back to a bit-identical
pure-Python implementation otherwise.
"""

from .centrality import (CentralityReport, estimate_source, rank_of_node,
                         rumor_center, rumor_centrality_tree)
from .experiments import (ExperimentConfig, ExperimentResult, compare_to_theory,
                          er_experiment, geometric_detection,
                          random_tree_detection, run_experiment)
from .generators import (GeometricTreeSpec, check_geometric, erdos_renyi,
                         galton_watson, geometric_tree, offspring_categorical,
                         offspring_deterministic, offspring_poisson,
                         random_regular, regular_tree)
from .graphs import Graph, bfs_tree, build_graph, is_tree, read_edgelist, root_at
from .kernels import BACKEND
from .oracles import (UrnState, polya_limit_sample, polya_limit_samples,
                      simulate_branching, simulate_renewal)
from .spreading import (InfectionHistory, SpreadingTimeSpec, StopRule, at_count,
                        at_time, boundary_size, deterministic, exponential,
                        gamma_delay, infected_subgraph, rumor_graph, simulate_si,
                        uniform)
from .theory import (alpha_d, beta_limit_params, branching_constant, ck_limit,
                     ck_upper_bound, extinction_prob, inc_beta, malthusian)

__version__ = "0.1.0"
