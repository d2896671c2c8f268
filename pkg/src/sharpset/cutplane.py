"""Integrality evidence and max-rank integral point enumeration.

Randomized integrality checking: floor-of-normal objectives must give
integral LP values over the projection.  When the projection is integral,
all maximal-rank integral points are enumerated on the split polytope
(u, v with y = u - v) with one no-good cut per found point.
"""

from __future__ import annotations

import numpy as np

from .discretize import STATIC
from .molp import Polyhedron, build_ddcp, make_ineq
from .ratlp import (
    EQ,
    LE,
    ONE,
    Rat,
    ZERO,
    LinearProgram,
    is_integral,
    rat,
    solve_milp_feasibility,
)

GENERATOR = "numpy PCG64"


class GateRefusal(Exception):
    """Raised when a method is requested outside its justified scope."""


def check_integrality(poly, K: int, sigma, seed: int, objectives=None):
    """Draw K floored-normal objectives; evidence holds when every LP value
    over the projection is an integer."""
    oracle = poly.oracle() if isinstance(poly, Polyhedron) else poly
    n = poly.n
    if objectives is None:
        rng = np.random.default_rng(seed)
        objectives = [
            [rat(int(np.floor(x))) for x in rng.normal(0.0, float(sigma), size=n)]
            for _ in range(K)
        ]
    values = []
    for c in objectives:
        value, _ = oracle.support(list(c))
        values.append(value)
        if not is_integral(value):
            return {
                "evidence": False,
                "counterexample": {"objective": c, "value": value},
                "generator": GENERATOR,
                "seed": seed,
                "K": K,
                "sigma": sigma,
            }
    return {
        "evidence": True,
        "generator": GENERATOR,
        "seed": seed,
        "K": K,
        "sigma": sigma,
        "values": values,
    }


def max_rank(poly: Polyhedron):
    """Exact maximum of 1'y over the projection, with a vertex witness."""
    oracle = poly.oracle()
    r, ystar = oracle.support([ONE] * poly.n)
    return {"r": r, "witness": make_ineq(ystar, "cutplane")}


def enumerate_max_rank_integral(poly: Polyhedron, override=False, evidence=None):
    """All integral y in the projection with maximal rank.

    Justified for static models; dynamic models can exhibit solutions of
    unequal rank, so they require an explicit override plus integrality
    evidence.
    """
    spec = poly.model.spec
    if spec.family != STATIC:
        if not override:
            raise GateRefusal(
                "max-rank enumeration is gated to static models; "
                "pass override with integrality evidence to force it"
            )
        if not evidence:
            raise GateRefusal("override requires positive integrality evidence")
    r = max_rank(poly)["r"]
    if not is_integral(r):
        raise GateRefusal(f"maximal rank {r} is not an integer")

    n = poly.n
    oracle = poly.oracle()
    rows, senses, b = [], [], []
    if poly.pair_edges is not None:
        # membership rows arrive lazily as violated cycle cuts
        m = 0
        nvar = 2 * n
        ycuts = [{o: ONE} for o in poly.pair_diag] + list(poly.cut_pool)
        lazy = True
    elif poly.zfree_rows is not None:
        m = 0
        nvar = 2 * n
        ycuts = list(poly.zfree_rows)
        lazy = False
    else:
        m = poly.m
        nvar = 2 * n + m
        ycuts = []
        lazy = False
        for ydict, zdict in poly.rows:
            row = [ZERO] * nvar
            for i, a in ydict.items():
                row[i] = a
                row[n + i] = -a
            for k, bval in zdict.items():
                row[2 * n + k] = bval
            rows.append(row)
            senses.append(LE)
            b.append(ZERO)

    def ycut_row(coeff):
        row = [ZERO] * nvar
        for i, a in coeff.items():
            row[i] = a
            row[n + i] = -a
        return row

    for coeff in ycuts:
        rows.append(ycut_row(coeff))
        senses.append(LE)
        b.append(ZERO)
    for i in range(n):
        row = [ZERO] * nvar
        row[i] = ONE
        row[n + i] = ONE
        rows.append(row)
        senses.append(LE)
        b.append(ONE)
    rank_row = [ONE] * n + [-ONE] * n + [ZERO] * m
    rows.append(rank_row)
    senses.append(EQ)
    b.append(r)

    bounds = [(0, 1)] * (2 * n) + [(None, None)] * m
    binaries = list(range(2 * n))
    found = []
    while True:
        lp = LinearProgram(
            sense="min",
            c=[ZERO] * nvar,
            rows=rows,
            senses=senses,
            b=b,
            bounds=bounds,
        )
        res = solve_milp_feasibility(lp, binaries)
        if not res["feasible"]:
            break
        point = res["point"]
        u = point[:n]
        v = point[n : 2 * n]
        y = [ui - vi for ui, vi in zip(u, v)]
        if lazy:
            cycle = oracle._find_positive_cycle(y)
            if cycle is not None:
                coeff = {}
                for o in cycle:
                    coeff[o] = coeff.get(o, ZERO) + ONE
                poly.cut_pool.append(coeff)
                rows.append(ycut_row(coeff))
                senses.append(LE)
                b.append(ZERO)
                continue
        found.append(make_ineq(y, "cutplane"))
        w = u + v
        ones = sum(1 for x in w if x == 1)
        cut = [ONE if x == 1 else -ONE for x in w] + [ZERO] * m
        rows.append(cut)
        senses.append(LE)
        b.append(Rat(ones - 1))
        if len(found) > 3**n:
            raise AssertionError("no-good loop failed to terminate")
    return sorted(found)
