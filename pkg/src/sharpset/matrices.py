"""Discrete local model construction.

Builds the 0/1 matrix A mapping region probabilities q to outcome
probabilities p = Aq, together with the restriction matrix R encoding
stationarity or exchangeability of the shock distribution, and the
exchangeable representation matrix P_E.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .discretize import (
    AR2,
    DYN_COND,
    DYN_UNCOND,
    EXCHANGEABLE,
    STATIC,
    STATIONARY,
    ModelSpec,
    Patch,
    regions,
)
from .ratlp import Rat, ZERO, ONE

NEG_ONE = Rat(-1)


@dataclass
class DiscreteModel:
    spec: ModelSpec
    patches: list
    A: list  # rows over outcome labels, columns over regions
    R: list
    row_labels: list
    col_labels: list
    P_E: Optional[list] = None

    def to_triplets(self):
        """Sparse (row, col, value) form for debugging dumps."""

        def sparse(M):
            return [
                (i, j, str(v))
                for i, row in enumerate(M)
                for j, v in enumerate(row)
                if v != 0
            ]

        out = {"A": sparse(self.A), "R": sparse(self.R)}
        if self.P_E is not None:
            out["P_E"] = sparse(self.P_E)
        return out


def _outcome_static(patch_payloads, region):
    return tuple(patch_payloads[f][t] for t, f in enumerate(region))


def _outcome_dyn_cond(patch_payloads, region, y0_index):
    c, C0 = patch_payloads[region[0]]
    seq = [c]
    for t in range(1, len(region)):
        _, Ct = patch_payloads[region[t]]
        seq.append(Ct[t - 1][seq[-1]])
    return tuple(seq)


def _outcome_dyn_uncond(patch_payloads, region, g):
    seq = [g]
    for t, f in enumerate(region):
        seq.append(patch_payloads[f][t][seq[-1]])
    return tuple(seq)


def _outcome_ar2(patch_payloads, region):
    f1, f2, f3 = (patch_payloads[f] for f in region)
    d = f1[0]
    d2 = f2[1 + d]
    d3 = f3[3 + d + 2 * d2]
    return (d, d2, d3)


def region_outcome(spec: ModelSpec, patches, region, g=None):
    """Outcome tuple realized on one region (and initial condition g)."""
    payloads = [p.payload for p in patches]
    if spec.family == STATIC:
        return _outcome_static(payloads, region)
    if spec.family == DYN_COND:
        return _outcome_dyn_cond(payloads, region, spec.y0_index())
    if spec.family == DYN_UNCOND:
        return _outcome_dyn_uncond(payloads, region, g)
    if spec.family == AR2:
        return _outcome_ar2(payloads, region)
    raise AssertionError(spec.family)


def _indicator_matrix(row_labels, col_outcomes):
    index = {lab: i for i, lab in enumerate(row_labels)}
    A = [[ZERO] * len(col_outcomes) for _ in row_labels]
    for j, out in enumerate(col_outcomes):
        A[index[out]][j] = ONE
    return A


def _stationarity_rows(n_patches, region_list, block_offsets=(0,), width=None):
    """One row per (patch f, period t >= 2): regions with first-period patch f
    carry +1, regions with period-t patch f carry -1, summed across blocks."""
    T = len(region_list[0])
    width = width or len(region_list)
    rows = []
    for f in range(n_patches):
        for t in range(1, T):
            row = [ZERO] * (width * len(block_offsets))
            for off in block_offsets:
                for j, reg in enumerate(region_list):
                    if reg[0] == f:
                        row[off * width + j] += ONE
                    if reg[t] == f:
                        row[off * width + j] -= ONE
            rows.append(row)
    return _dedup_rows(rows)


def _exchangeability_rows(region_list, block_offsets=(0,), width=None):
    """One row per (region, adjacent transposition): q_R - q_{tau(R)}."""
    T = len(region_list[0])
    width = width or len(region_list)
    index = {reg: j for j, reg in enumerate(region_list)}
    rows = []
    for reg in region_list:
        for t in range(T - 1):
            swapped = list(reg)
            swapped[t], swapped[t + 1] = swapped[t + 1], swapped[t]
            swapped = tuple(swapped)
            if swapped == reg:
                continue
            row = [ZERO] * (width * len(block_offsets))
            for off in block_offsets:
                row[off * width + index[reg]] = ONE
                row[off * width + index[swapped]] = NEG_ONE
            rows.append(row)
    return _dedup_rows(rows)


def _dedup_rows(rows):
    """Drop zero rows and exact or sign-flipped duplicates."""
    seen = set()
    out = []
    for row in rows:
        if all(v == 0 for v in row):
            continue
        key = tuple(row)
        neg = tuple(-v for v in row)
        if key in seen or neg in seen:
            continue
        seen.add(key)
        out.append(row)
    return out


def _restriction(spec, n_patches, region_list, block_offsets=(0,)):
    if spec.restriction == STATIONARY:
        return _stationarity_rows(n_patches, region_list, block_offsets)
    return _exchangeability_rows(region_list, block_offsets)


def build_static(patches, spec: ModelSpec) -> DiscreteModel:
    if not patches:
        raise ValueError("empty patch list")
    labels = spec.labels
    region_list = regions(patches, spec.T)
    row_labels = [
        tuple(labels[d] for d in out)
        for out in itertools.product(range(spec.D), repeat=spec.T)
    ]
    outcomes = [
        tuple(labels[d] for d in region_outcome(spec, patches, reg))
        for reg in region_list
    ]
    A = _indicator_matrix(row_labels, outcomes)
    R = _restriction(spec, len(patches), region_list)
    return DiscreteModel(spec, list(patches), A, R, row_labels, region_list)


def build_P_exchangeable(patches, T: int):
    """One row per multiset of patch indices; 1 on each permutation of it."""
    n = len(patches)
    region_list = regions(patches, T)
    index = {reg: j for j, reg in enumerate(region_list)}
    rows = []
    for multiset in itertools.combinations_with_replacement(range(n), T):
        row = [ZERO] * len(region_list)
        for perm in set(itertools.permutations(multiset)):
            row[index[perm]] = ONE
        rows.append(row)
    return rows


def build_dyn_cond(patches, spec: ModelSpec) -> DiscreteModel:
    if not patches:
        raise ValueError("empty patch list")
    labels = spec.labels
    region_list = regions(patches, spec.T)
    row_labels = [
        tuple(labels[d] for d in out)
        for out in itertools.product(range(spec.D), repeat=spec.T)
    ]
    outcomes = [
        tuple(labels[d] for d in region_outcome(spec, patches, reg))
        for reg in region_list
    ]
    A = _indicator_matrix(row_labels, outcomes)
    R = _restriction(spec, len(patches), region_list)
    return DiscreteModel(spec, list(patches), A, R, row_labels, region_list)


def build_dyn_uncond(patches, spec: ModelSpec) -> DiscreteModel:
    if not patches:
        raise ValueError("empty patch list")
    labels = spec.labels
    region_list = regions(patches, spec.T)
    row_labels = [
        tuple(labels[d] for d in out)
        for out in itertools.product(range(spec.D), repeat=spec.T + 1)
    ]
    col_labels = []
    outcomes = []
    for g in range(spec.D):
        for reg in region_list:
            col_labels.append((labels[g], reg))
            outcomes.append(
                tuple(labels[d] for d in region_outcome(spec, patches, reg, g=g))
            )
    A = _indicator_matrix(row_labels, outcomes)
    R = _restriction(
        spec, len(patches), region_list, block_offsets=tuple(range(spec.D))
    )
    return DiscreteModel(spec, list(patches), A, R, row_labels, col_labels)


def build_ar2(patches, spec: ModelSpec) -> DiscreteModel:
    if not patches:
        raise ValueError("empty patch list")
    region_list = regions(patches, 3)
    row_labels = list(itertools.product((0, 1), repeat=3))
    outcomes = [region_outcome(spec, patches, reg) for reg in region_list]
    A = _indicator_matrix(row_labels, outcomes)
    # B1: patch appears in period 1 vs period 3; B2: period 2 vs period 3
    R = []
    for f in range(len(patches)):
        for a, b in ((0, 2), (1, 2)):
            row = [ZERO] * len(region_list)
            for j, reg in enumerate(region_list):
                if reg[a] == f:
                    row[j] += ONE
                if reg[b] == f:
                    row[j] -= ONE
            R.append(row)
    R = _dedup_rows(R)
    return DiscreteModel(spec, list(patches), A, R, row_labels, region_list)


def build_model(spec: ModelSpec, patches=None) -> DiscreteModel:
    from .discretize import patches_for

    if patches is None:
        patches = patches_for(spec)
    builder = {
        STATIC: build_static,
        DYN_COND: build_dyn_cond,
        DYN_UNCOND: build_dyn_uncond,
        AR2: build_ar2,
    }[spec.family]
    model = builder(patches, spec)
    if spec.restriction == EXCHANGEABLE and spec.family in (STATIC, DYN_COND):
        model.P_E = build_P_exchangeable(patches, spec.T)
    return model
