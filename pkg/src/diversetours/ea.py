"""Diversity-maximising (mu+1)-EA under a tour-quality threshold.

Each iteration mutates a uniformly chosen member; the offspring joins when
its cost is at most ``(1 + alpha) * OPT`` and then one member is dropped by
ED or PD survival selection. Rejected offspring still count as an iteration.

Survival ties are broken uniformly at random by default, so an offspring
that is exactly as good as the worst member can replace it and the
population drifts across plateaus. ``ties="last"`` always drops the
newcomer instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as K
from .diversity import (
    ED,
    TIE_RANDOM,
    Population,
    div_score,
    gtype,
    measure_code,
    min_sum_squares,
    percent_of_optimal,
    sigma_score,
    tie_code,
)
from .instance import UNIT, Instance, Tour, tour_cost
from .mutation import STYLES, MutationKind, make_rng

RANDOM_TOURS = "random-tours"
COPIES_OF_OPTIMAL = "copies-of-optimal"
INIT_MODES = (RANDOM_TOURS, COPIES_OF_OPTIMAL)

OPTIMUM_REACHED = "optimum-reached"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class EaConfig:
    mu: int = 3
    measure: str = ED
    mutation: MutationKind = field(default_factory=MutationKind)
    alpha: float = 0.0
    opt: int | None = None
    max_iters: int | None = None
    init_mode: str = RANDOM_TOURS
    seed: int = 0
    ties: str = TIE_RANDOM

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError(f"mu must be >= 1, got {self.mu}")
        object.__setattr__(self, "measure", self.measure.upper())
        measure_code(self.measure)
        if isinstance(self.mutation, (int, str)):
            object.__setattr__(self, "mutation", MutationKind.parse(str(self.mutation)))
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.opt is not None and self.opt <= 0:
            raise ValueError(f"opt must be positive, got {self.opt}")
        if self.max_iters is not None and self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        tie_code(self.ties)
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}")

    def budget(self, n: int) -> int:
        return self.mu * n * n if self.max_iters is None else self.max_iters


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one EA run; ``population`` and ``config`` are not part of equality."""

    instance: str
    n: int
    mu: int
    alpha: float
    measure: str
    mutation: str
    seed: int
    iterations: int
    terminated: str
    gtype: int
    gtype_percent: float
    div: float
    sigma: float
    population: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False, repr=False)
    config: EaConfig | None = field(default=None, compare=False, repr=False)


def resolve_opt(config: EaConfig, instance: Instance, opt_tour: Tour | None = None) -> int:
    """OPT from the supplied optimal tour; unit instances fall back to ``n``."""
    if opt_tour is not None:
        cost = tour_cost(instance, opt_tour)
        if config.opt is not None and config.opt != cost:
            raise ValueError(f"config.opt={config.opt} but the optimal tour costs {cost}")
        return cost
    if config.opt is not None:
        return config.opt
    if instance.weight_kind == UNIT:
        return instance.n
    raise ValueError("a weighted instance needs an optimal tour or config.opt")


def threshold(config: EaConfig, opt: int) -> float:
    return (1.0 + config.alpha) * opt


def initialize(config: EaConfig, instance: Instance, opt_tour: Tour | None = None,
               rng=None) -> Population:
    rng = make_rng(config.seed if rng is None else rng)
    n = instance.n
    if config.init_mode == COPIES_OF_OPTIMAL:
        if opt_tour is None:
            raise ValueError("copies-of-optimal initialisation needs the optimal tour")
        return Population([opt_tour] * config.mu, n)
    if instance.weight_kind != UNIT:
        raise ValueError(
            "random-tours initialisation is only supported on unit-weight instances"
        )
    return Population([rng.permutation(n) for _ in range(config.mu)], n)


def step(pop: Population, config: EaConfig, instance: Instance, rng,
         opt: int | None = None) -> Population:
    """One offspring attempt; mutates ``pop`` in place and returns it."""
    if pop.size != config.mu:
        raise ValueError(f"population has {pop.size} members, config.mu={config.mu}")
    if opt is None:
        opt = resolve_opt(config, instance)
    _, dsq = K.step(
        pop.perms, pop.adj, pop.counts, pop.overlaps, pop.size,
        instance.distances, threshold(config, opt),
        config.mutation.k, STYLES[config.mutation.style],
        measure_code(config.measure), tie_code(config.ties), make_rng(rng),
    )
    pop.sumsq += dsq
    return pop


def is_optimal(pop: Population, measure: str) -> bool:
    if pop.sumsq != min_sum_squares(pop.n, pop.size):
        return False
    if measure_code(measure) == K.PD and pop.size > 1:
        return K.overlap_spread(pop.overlaps, pop.size) <= 1
    return True


def evolve(pop: Population, config: EaConfig, instance: Instance, rng, opt: int,
           max_iters: int) -> tuple[int, bool]:
    """Run steps in compiled code until optimal or ``max_iters`` attempts."""
    code = measure_code(config.measure)
    iters, reached, sumsq = K.evolve(
        pop.perms, pop.adj, pop.counts, pop.overlaps, pop.size,
        instance.distances, threshold(config, opt),
        config.mutation.k, STYLES[config.mutation.style], code, tie_code(config.ties),
        make_rng(rng),
        pop.sumsq, max_iters, min_sum_squares(pop.n, pop.size),
        code == K.PD and pop.size > 1,
    )
    pop.sumsq = sumsq
    return int(iters), bool(reached)


def summarize(pop: Population, config: EaConfig, instance: Instance, iterations: int,
              reached: bool) -> RunRecord:
    g = gtype(pop)
    two = pop.size >= 2
    return RunRecord(
        instance=instance.name,
        n=instance.n,
        mu=config.mu,
        alpha=float(config.alpha),
        measure=config.measure,
        mutation=config.mutation.label,
        seed=int(config.seed),
        iterations=iterations,
        terminated=OPTIMUM_REACHED if reached else BUDGET_EXHAUSTED,
        gtype=g,
        gtype_percent=percent_of_optimal(g, instance.n, config.mu),
        div=div_score(pop) if two else math.nan,
        sigma=sigma_score(pop) if two else math.nan,
        population=tuple(tuple(int(v) for v in t.perm) for t in pop),
        config=config,
    )


def run(config: EaConfig, instance: Instance, opt_tour: Tour | None = None) -> RunRecord:
    """Initialise from ``config.seed`` and iterate until optimum or budget."""
    opt = resolve_opt(config, instance, opt_tour)
    if config.opt is None and instance.weight_kind != UNIT:
        config = replace(config, opt=opt)
    rng = np.random.default_rng(config.seed)
    pop = initialize(config, instance, opt_tour, rng)
    iters, reached = evolve(pop, config, instance, rng, opt, config.budget(instance.n))
    return summarize(pop, config, instance, iters, reached)
