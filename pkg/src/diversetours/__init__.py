"""Sets of diverse near-optimal TSP tours via a (mu+1)-EA."""
from .decomposition import decompose, optimal_population, verify_theorem1
from .diversity import (
    ED,
    PD,
    DiversityVector,
    Population,
    div_score,
    fitness_ed,
    fitness_pd,
    gtype,
    gtype_percent,
    nd_vector,
    optimal_gtype,
    overlap_vector,
    select_removal,
    sigma_score,
)
from .ea import EaConfig, RunRecord, run
from .estimator import DiverseTourEA
from .instance import Instance, Tour, bundled, load_opt_tour, load_tsplib, tour_cost
from .mutation import MutationKind, invert_segment, mutate

__version__ = "0.1.0"

__all__ = [
    "ED", "PD", "DiversityVector", "Population", "div_score", "fitness_ed", "fitness_pd",
    "gtype", "gtype_percent", "nd_vector", "optimal_gtype", "overlap_vector",
    "select_removal", "sigma_score", "decompose", "optimal_population", "verify_theorem1",
    "EaConfig", "RunRecord", "run", "DiverseTourEA", "Instance", "Tour", "bundled",
    "load_opt_tour", "load_tsplib", "tour_cost", "MutationKind", "invert_segment", "mutate",
]
