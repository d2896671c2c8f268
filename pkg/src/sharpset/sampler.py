"""Probabilistic frontier recovery.

Draws strictly positive objectives and harvests the optimal vertices of
max w'y over the projection; every harvested point is a genuine
undominated extreme point because the optimum of a strictly positive
objective over the box-bounded projection is attained at one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .molp import Polyhedron, make_ineq
from .ratlp import Rat
from .reduce import IneqSet, eliminate_redundant

PRECISION = 2**53

EXPONENTIAL = "exponential"
HALFNORMAL = "halfnormal"


@dataclass
class SamplerConfig:
    K: int
    distribution: str = EXPONENTIAL
    seed: int = 0
    record_objectives: bool = False

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.distribution not in (EXPONENTIAL, HALFNORMAL):
            raise ValueError(f"unknown distribution {self.distribution!r}")


def _draw_objective(config: SamplerConfig, index: int, n: int):
    rng = np.random.default_rng([config.seed, index])
    if config.distribution == EXPONENTIAL:
        x = rng.exponential(1.0, size=n)
    else:
        x = np.abs(rng.standard_normal(size=n))
    w = [Rat(max(1, int(v * PRECISION)), PRECISION) for v in x]
    return w


def probabilistic_frontier(poly: Polyhedron, config: SamplerConfig) -> IneqSet:
    oracle = poly.oracle()
    n = poly.n
    collected = {}
    objectives = []
    for i in range(config.K):
        w = _draw_objective(config, i, n)
        if config.record_objectives:
            objectives.append(w)
        beta, y = oracle.support(w)
        y = tuple(y)
        # re-certification: the point is in Q and attains the support value
        # of its strictly positive objective, hence undominated
        assert sum(wi * yi for wi, yi in zip(w, y)) == beta
        assert oracle.membership(list(y))
        collected.setdefault(y, make_ineq(y, "probabilistic"))
    out = eliminate_redundant(list(collected.values()), poly.model)
    if config.record_objectives:
        out.log.append({"objectives": objectives})
    return out
