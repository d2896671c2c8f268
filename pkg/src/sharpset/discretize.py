"""Patch enumeration for panel multinomial choice models.

A patch is a maximal open cell of shock space on which the induced choice
(per period, and per state in dynamic models) is constant.  Patches are
certified by exact strict-feasibility LPs; one-dimensional binary systems
use exact threshold sorting instead of candidate scans.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .ratlp import Rat, ZERO, rat, strict_feasibility

STATIC = "StaticPanel"
DYN_COND = "DynCondOneLag"
DYN_UNCOND = "DynUncondOneLag"
AR2 = "DynCondBinaryTwoLag"

STATIONARY = "Stationary"
EXCHANGEABLE = "Exchangeable"


def alt_labels(D: int) -> list:
    """Outcome labels: {0,1} for binary models, 1..D otherwise."""
    return [0, 1] if D == 2 else list(range(1, D + 1))


@dataclass
class ModelSpec:
    """Inputs pinning down one local model.

    v[d][t] is the index value of alternative d (0-based) in period t
    (0-based).  gamma is the one-lag state-dependence parameter; gamma1 and
    gamma2 belong to the two-lag binary family.  y0 / y_minus1 are initial
    conditions given as outcome labels.
    """

    family: str
    D: int
    T: int
    restriction: str = STATIONARY
    v: Optional[list] = None
    gamma: Optional[Rat] = None
    gamma1: Optional[Rat] = None
    gamma2: Optional[Rat] = None
    y0: Optional[int] = None
    y_minus1: Optional[int] = None

    def __post_init__(self):
        if self.D < 2:
            raise ValueError("need at least two alternatives")
        if self.T < 2:
            raise ValueError("need at least two periods")
        if self.family not in (STATIC, DYN_COND, DYN_UNCOND, AR2):
            raise ValueError(f"unknown family {self.family!r}")
        if self.restriction not in (STATIONARY, EXCHANGEABLE):
            raise ValueError(f"unknown restriction {self.restriction!r}")
        if self.family == AR2:
            if self.D != 2 or self.T != 3:
                raise ValueError("two-lag binary family requires D=2, T=3")
            if self.gamma1 is None or self.gamma2 is None:
                raise ValueError("two-lag family needs gamma1 and gamma2")
            if self.y0 not in (0, 1) or self.y_minus1 not in (0, 1):
                raise ValueError("two-lag initial conditions must be 0/1")
            self.gamma1 = rat(self.gamma1)
            self.gamma2 = rat(self.gamma2)
        if self.family in (DYN_COND, DYN_UNCOND):
            if self.gamma is None:
                raise ValueError("one-lag dynamic families need gamma")
            self.gamma = rat(self.gamma)
        if self.family == DYN_COND:
            if self.y0 not in alt_labels(self.D):
                raise ValueError("y0 must be an outcome label")
        if self.family != AR2:
            if self.v is None:
                raise ValueError("index values v are required")
            if len(self.v) != self.D or any(len(row) != self.T for row in self.v):
                raise ValueError("v must be D x T")
            self.v = [[rat(x) for x in row] for row in self.v]
        else:
            if self.v is None or len(self.v) != 1 or len(self.v[0]) != 3:
                raise ValueError("two-lag family takes v as a 1 x 3 matrix")
            self.v = [[rat(x) for x in self.v[0]]]

    @property
    def labels(self):
        return alt_labels(self.D)

    def y0_index(self) -> int:
        return self.labels.index(self.y0)


@dataclass(frozen=True)
class Patch:
    """Family-tagged patch payload; see module docstring."""

    family: str
    payload: tuple

    def __lt__(self, other):
        return self.payload < other.payload


# ---------------------------------------------------------------------------
# scenario systems
#
# A "scenario" is one (period, state) slot in which a choice is prescribed.
# A candidate patch assigns a choice d to every scenario; it is a patch iff
# the conjunction of the strict cells over all scenarios is nonempty.
# ---------------------------------------------------------------------------


def _scenario_utils(spec: ModelSpec):
    """List of scenarios; each is (key, [utility offset of alt j]_j).

    The cell for choosing d in a scenario is
      {zeta : u_d + zeta_d > u_j + zeta_j for all j != d}.
    """
    D, T = spec.D, spec.T
    out = []
    if spec.family == STATIC:
        for t in range(T):
            out.append((("t", t), [spec.v[j][t] for j in range(D)]))
        return out
    g = spec.gamma
    if spec.family == DYN_COND:
        s0 = spec.y0_index()
        out.append(
            (("t", 0, "s", s0), [spec.v[j][0] + (g if j == s0 else ZERO) for j in range(D)])
        )
        for t in range(1, T):
            for s in range(D):
                out.append(
                    (
                        ("t", t, "s", s),
                        [spec.v[j][t] + (g if j == s else ZERO) for j in range(D)],
                    )
                )
        return out
    if spec.family == DYN_UNCOND:
        for t in range(T):
            for s in range(D):
                out.append(
                    (
                        ("t", t, "s", s),
                        [spec.v[j][t] + (g if j == s else ZERO) for j in range(D)],
                    )
                )
        return out
    raise AssertionError(spec.family)


def _strict_rows(scenarios, assignment):
    """Strict inequality system for a partial scenario->choice assignment."""
    D = len(scenarios[0][1])
    A, b = [], []
    for (key, util), d in assignment:
        for j in range(D):
            if j == d:
                continue
            row = [ZERO] * D
            row[j] = Rat(1)
            row[d] = Rat(-1)
            A.append(row)
            b.append(util[d] - util[j])
    return A, b


def _patches_by_dfs(spec: ModelSpec):
    """Enumerate feasible scenario assignments by pruned depth-first scan."""
    scenarios = _scenario_utils(spec)
    D = spec.D
    found = []

    def recurse(idx, assignment):
        if idx == len(scenarios):
            found.append(tuple(d for (_, d) in assignment))
            return
        for d in range(D):
            trial = assignment + [(scenarios[idx], d)]
            A, b = _strict_rows(scenarios, trial)
            if strict_feasibility(A, b)["strictly_feasible"]:
                recurse(idx + 1, trial)

    recurse(0, [])
    return found  # tuples of choices in scenario order


def _binary_thresholds(spec: ModelSpec):
    """Scenario thresholds for D=2: choice 1 iff zeta < threshold.

    zeta is the one-dimensional reduced shock (shock of alternative 0 minus
    shock of alternative 1); the threshold of a scenario is the utility
    advantage of alternative 1.
    """
    out = []
    for key, util in _scenario_utils(spec):
        out.append((key, util[1] - util[0]))
    return out


def _interval_assignments(thresholds):
    """Feasible 0/1 assignments from sorted distinct thresholds.

    Each open interval between consecutive distinct thresholds yields one
    patch: scenario choice is 1 exactly when the interval lies below the
    scenario's threshold.
    """
    distinct = sorted(set(th for _, th in thresholds))
    cuts = len(distinct)
    # interval k lies strictly between distinct[k-1] and distinct[k]
    assignments = []
    for k in range(cuts + 1):
        assignments.append(
            tuple(1 if distinct.index(th) >= k else 0 for _, th in thresholds)
        )
    return assignments


def _scenario_tuple_to_patch(spec: ModelSpec, choices: tuple) -> Patch:
    D, T = spec.D, spec.T
    if spec.family == STATIC:
        return Patch(STATIC, tuple(choices))
    if spec.family == DYN_COND:
        c = choices[0]
        rest = choices[1:]
        C = tuple(tuple(rest[(t - 1) * D + s] for s in range(D)) for t in range(1, T))
        return Patch(DYN_COND, (c, C))
    if spec.family == DYN_UNCOND:
        M = tuple(tuple(choices[t * D + s] for s in range(D)) for t in range(T))
        return Patch(DYN_UNCOND, M)
    raise AssertionError(spec.family)


def static_patches(spec: ModelSpec):
    """All strictly feasible choice tuples (d_1..d_T), lexicographic.

    For T=2 the closed-form rule is used: (d,d) is always a patch and
    (d,d') with d != d' is one iff dv_d < dv_d' for dv_d = v_{d2} - v_{d1}.
    """
    if spec.family != STATIC:
        raise ValueError("static_patches requires the static family")
    if spec.T == 2:
        dv = [spec.v[d][1] - spec.v[d][0] for d in range(spec.D)]
        payloads = []
        for d1 in range(spec.D):
            for d2 in range(spec.D):
                if d1 == d2 or dv[d1] < dv[d2]:
                    payloads.append((d1, d2))
        return [Patch(STATIC, p) for p in sorted(payloads)]
    return _generic_patches(spec)


def _generic_patches(spec: ModelSpec):
    if spec.D == 2:
        choices = _interval_assignments(_binary_thresholds(spec))
    else:
        choices = _patches_by_dfs(spec)
    patches = sorted({_scenario_tuple_to_patch(spec, c) for c in choices})
    return patches


def patches_lp(spec: ModelSpec):
    """LP-certified route (cross-check for the closed rules and fast paths)."""
    if spec.family == AR2:
        raise ValueError("two-lag patches are defined by the interval system")
    choices = _patches_by_dfs(spec)
    return sorted({_scenario_tuple_to_patch(spec, c) for c in choices})


def dyn_cond_patches(spec: ModelSpec):
    """All strictly feasible (c, C) patches, lexicographic order."""
    if spec.family != DYN_COND:
        raise ValueError("dyn_cond_patches requires the conditional family")
    return _generic_patches(spec)


def dyn_uncond_patches(spec: ModelSpec):
    """All strictly feasible T x D patch matrices, lexicographic order."""
    if spec.family != DYN_UNCOND:
        raise ValueError("dyn_uncond_patches requires the unconditional family")
    return _generic_patches(spec)


def ar2_thresholds(spec: ModelSpec):
    """The seven interval thresholds of the two-lag binary family.

    Entry j of a patch is 1 iff the shock lies strictly below threshold j.
    """
    v1, v2, v3 = spec.v[0]
    g1, g2 = spec.gamma1, spec.gamma2
    y0, ym1 = Rat(spec.y0), Rat(spec.y_minus1)
    return [
        v1 + g1 * y0 + g2 * ym1,
        v2 + g2 * y0,
        v2 + g1 + g2 * y0,
        v3,
        v3 + g2,
        v3 + g1,
        v3 + g1 + g2,
    ]


def ar2_patches(spec: ModelSpec):
    """All 7-tuples over {0,1} whose interval system is strictly feasible."""
    if spec.family != AR2:
        raise ValueError("ar2_patches requires the two-lag binary family")
    ths = ar2_thresholds(spec)
    labeled = [((j,), th) for j, th in enumerate(ths)]
    payloads = sorted(set(_interval_assignments(labeled)))
    return [Patch(AR2, p) for p in payloads]


def patches_for(spec: ModelSpec):
    return {
        STATIC: static_patches,
        DYN_COND: dyn_cond_patches,
        DYN_UNCOND: dyn_uncond_patches,
        AR2: ar2_patches,
    }[spec.family](spec)


def regions(patches, T: int):
    """All |F|^T ordered patch-index tuples in lexicographic order."""
    if not patches:
        raise ValueError("empty patch list")
    n = len(patches)
    return list(itertools.product(range(n), repeat=T))


def patch_is_strictly_feasible(spec: ModelSpec, patch: Patch) -> bool:
    """Independent recheck of one patch against its defining open system."""
    if spec.family == AR2:
        ths = ar2_thresholds(spec)
        lo, hi = None, None
        for j, bit in enumerate(patch.payload):
            if bit == 1:
                hi = ths[j] if hi is None else min(hi, ths[j])
            else:
                lo = ths[j] if lo is None else max(lo, ths[j])
        if lo is None or hi is None:
            return True
        return lo < hi
    scenarios = _scenario_utils(spec)
    choices = _patch_to_scenario_tuple(spec, patch)
    assignment = list(zip(scenarios, choices))
    A, b = _strict_rows(scenarios, assignment)
    return strict_feasibility(A, b)["strictly_feasible"]


def _patch_to_scenario_tuple(spec: ModelSpec, patch: Patch):
    if spec.family == STATIC:
        return tuple(patch.payload)
    if spec.family == DYN_COND:
        c, C = patch.payload
        return (c,) + tuple(C[t][s] for t in range(spec.T - 1) for s in range(spec.D))
    if spec.family == DYN_UNCOND:
        return tuple(patch.payload[t][s] for t in range(spec.T) for s in range(spec.D))
    raise AssertionError(spec.family)
