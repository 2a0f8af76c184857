"""scikit-learn flavoured wrapper around :func:`diversetours.ea.run`.

``fit`` takes an instance (or coordinates, or a vertex count) instead of a
feature matrix; there is no ``predict``. The point is ``get_params`` /
``set_params`` / ``clone`` for parameter sweeps.
"""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .diversity import Population
from .ea import COPIES_OF_OPTIMAL, RANDOM_TOURS, EaConfig, run
from .instance import UNIT, Tour
from .mutation import MutationKind
from .validation import check_instance, check_tour


class DiverseTourEA(BaseEstimator):
    """Evolve ``mu`` tours of cost at most ``(1 + alpha) * OPT`` with maximal edge diversity.

    Parameters
    ----------
    mu : int
        Population size.
    measure : {"ED", "PD"}
        Edge-count or pairwise-distance survival selection.
    mutation : {"2opt", "3opt", "4opt"}
    alpha : float
        Quality slack; ignored on unit-weight instances.
    max_iters : int or None
        Iteration budget, ``mu * n**2`` when None.
    init : {"auto", "random-tours", "copies-of-optimal"}
        ``auto`` uses random tours on unit instances and the optimal tour otherwise.
    mutation_style : {"inversions", "reconnect"}
    ties : {"random", "last"}
        Survival tie rule.
    random_state : int
    """

    def __init__(self, mu=3, measure="ED", mutation="2opt", alpha=0.0, max_iters=None,
                 init="auto", mutation_style="inversions", ties="random", random_state=0):
        self.mu = mu
        self.measure = measure
        self.mutation = mutation
        self.alpha = alpha
        self.max_iters = max_iters
        self.init = init
        self.mutation_style = mutation_style
        self.ties = ties
        self.random_state = random_state

    def _config(self, unit: bool) -> EaConfig:
        init = self.init
        if init == "auto":
            init = RANDOM_TOURS if unit else COPIES_OF_OPTIMAL
        return EaConfig(
            mu=int(self.mu),
            measure=str(self.measure),
            mutation=MutationKind.parse(self.mutation, self.mutation_style),
            alpha=float(self.alpha),
            max_iters=self.max_iters,
            init_mode=init,
            seed=int(self.random_state),
            ties=self.ties,
        )

    def fit(self, X, y=None, opt_tour=None):
        instance = check_instance(X)
        if opt_tour is not None:
            opt_tour = check_tour(opt_tour, instance.n)
        record = run(self._config(instance.weight_kind == UNIT), instance, opt_tour)
        self.instance_ = instance
        self.record_ = record
        self.population_ = [Tour(p) for p in record.population]
        self.n_iter_ = record.iterations
        self.gtype_ = record.gtype
        self.gtype_percent_ = record.gtype_percent
        self.converged_ = record.terminated == "optimum-reached"
        return self

    def score(self, X=None, y=None) -> float:
        """Fraction of the optimal gtype reached, in ``[0, 1]``."""
        check_is_fitted(self, "record_")
        return self.gtype_percent_ / 100.0

    def population(self) -> Population:
        check_is_fitted(self, "record_")
        return Population(self.population_, self.instance_.n)
