"""Enumeration of local-model cases as weak orderings of thresholds.

Which discretized model a family produces depends only on the weak
ordering (ties allowed) of finitely many linear threshold forms in the
model inputs.  This module enumerates those orderings, certifies each
with an exact realizing assignment of the inputs, and can quotient by
the family's documented symmetry so that only canonically distinct
cases remain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .discretize import AR2, DYN_UNCOND, STATIC, ModelSpec, alt_labels
from .ratlp import LE, EQ, ONE, OPTIMAL, Rat, ZERO, LinearProgram, solve_lp

# threshold forms per family: name -> coefficients over the free parameters


def _threshold_forms(family, D=2):
    if family == STATIC:
        params = [f"dv{d}" for d in alt_labels(D)]
        forms = {p: {p: ONE} for p in params}
    elif family == DYN_UNCOND:
        if D != 2:
            raise ValueError("threshold orderings are supported for D = 2 only")
        params = ["v1", "v2", "g"]
        forms = {
            "v1": {"v1": ONE},
            "v2": {"v2": ONE},
            "v1+g": {"v1": ONE, "g": ONE},
            "v2+g": {"v2": ONE, "g": ONE},
        }
    elif family == AR2:
        # thresholds for initial condition (1, 1), in the period order used
        # by the discretizer
        params = ["v1", "v2", "v3", "g1", "g2"]
        forms = {
            "v1+g1+g2": {"v1": ONE, "g1": ONE, "g2": ONE},
            "v2+g2": {"v2": ONE, "g2": ONE},
            "v2+g1+g2": {"v2": ONE, "g1": ONE, "g2": ONE},
            "v3": {"v3": ONE},
            "v3+g2": {"v3": ONE, "g2": ONE},
            "v3+g1": {"v3": ONE, "g1": ONE},
            "v3+g1+g2": {"v3": ONE, "g1": ONE, "g2": ONE},
        }
    else:
        raise ValueError(f"no threshold ordering support for family {family!r}")
    return params, forms


@dataclass
class CaseDescriptor:
    family: str
    thresholds: tuple  # all threshold names
    ordering: tuple  # blocks of names, ascending; names within a block tie
    representative: dict  # parameter name -> exact value realizing the ordering
    realizable: bool


def realizable(ordering, family, D=2):
    """Exact realizability of a weak ordering of the family's thresholds.

    Maximizes the smallest strict gap between consecutive blocks subject
    to exact ties within blocks; the ordering is realizable iff the
    optimal margin is positive, and the witness is the realizing
    parameter assignment.
    """
    params, forms = _threshold_forms(family, D)
    names = [n for block in ordering for n in block]
    if sorted(names) != sorted(forms):
        raise ValueError("ordering must cover every threshold exactly once")
    npar = len(params)
    index = {p: i for i, p in enumerate(params)}

    def row_of(name, sign):
        row = [ZERO] * (npar + 1)
        for p, c in forms[name].items():
            row[index[p]] += sign * c
        return row

    rows, senses, b = [], [], []
    for block in ordering:
        first = block[0]
        for other in block[1:]:
            row = row_of(first, ONE)
            for i, v in enumerate(row_of(other, -ONE)):
                row[i] += v
            rows.append(row)
            senses.append(EQ)
            b.append(ZERO)
    for low, high in zip(ordering, ordering[1:]):
        row = row_of(low[0], ONE)
        for i, v in enumerate(row_of(high[0], -ONE)):
            row[i] += v
        row[npar] = ONE  # margin
        rows.append(row)
        senses.append(LE)
        b.append(ZERO)
    lp = LinearProgram(
        sense="max",
        c=[ZERO] * npar + [ONE],
        rows=rows,
        senses=senses,
        b=b,
        bounds=[(None, None)] * npar + [(None, ONE)],
    )
    res = solve_lp(lp)
    assert res.status == OPTIMAL  # feasible (all zero) and margin-capped
    ok = res.x[npar] > 0
    witness = {p: res.x[i] for i, p in enumerate(params)} if ok else None
    return {"ok": ok, "witness": witness}


def _weak_orderings(names):
    """All ordered partitions of names (every weak ordering, ties allowed)."""
    names = list(names)
    n = len(names)
    for k in range(1, n + 1):
        for assign in itertools.product(range(k), repeat=n):
            if set(assign) != set(range(k)):
                continue
            blocks = [
                tuple(names[i] for i in range(n) if assign[i] == j) for j in range(k)
            ]
            yield tuple(blocks)


def _compositions(D):
    """Ordered positive partitions of D, largest-rank block first."""
    out = []

    def rec(rest, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for c in range(1, rest + 1):
            rec(rest - c, acc + [c])

    rec(D, [])
    out.sort(key=lambda comp: (-len(comp), comp))
    return out


def _static_canonical(D):
    """One case per tie pattern of the sorted index differences, with the
    descending integer representative (ties share a value)."""
    labels = list(alt_labels(D))
    cases = []
    for comp in _compositions(D):
        values = []
        for j, size in enumerate(comp):
            values.extend([Rat(D - j)] * size)
        rep = {f"dv{d}": v for d, v in zip(labels, values)}
        blocks_desc = []
        pos = 0
        for size in comp:
            blocks_desc.append(tuple(f"dv{d}" for d in labels[pos : pos + size]))
            pos += size
        ordering = tuple(reversed(blocks_desc))
        cases.append(
            CaseDescriptor(
                family=STATIC,
                thresholds=tuple(f"dv{d}" for d in labels),
                ordering=ordering,
                representative=rep,
                realizable=True,
            )
        )
    return cases


_SWAP = {"v1": "v2", "v2": "v1", "v1+g": "v2+g", "v2+g": "v1+g"}


def _time_swap(ordering):
    return tuple(tuple(sorted(_SWAP[n] for n in block)) for block in ordering)


def _canonical_key(ordering):
    return tuple(tuple(sorted(block)) for block in ordering)


def enumerate_cases(family, D=2, T=2, symmetry="none"):
    """All realizable threshold orderings of a family, as case descriptors.

    symmetry="canonical" applies the family's documented quotient:
    alternative relabeling for the static family (cases become tie
    patterns of the sorted differences) and time relabeling for the
    binary one-lag dynamic family.
    """
    if symmetry not in ("none", "canonical"):
        raise ValueError(f"unknown symmetry {symmetry!r}")
    if T != 2:
        raise ValueError("case enumeration is supported for T = 2 only")
    if family == STATIC:
        if symmetry == "canonical":
            return _static_canonical(D)
        names = [f"dv{d}" for d in alt_labels(D)]
        cases = []
        for ordering in _weak_orderings(names):
            cert = realizable(ordering, family, D)
            if cert["ok"]:
                cases.append(
                    CaseDescriptor(
                        family=family,
                        thresholds=tuple(names),
                        ordering=ordering,
                        representative=cert["witness"],
                        realizable=True,
                    )
                )
        return cases
    if family == DYN_UNCOND:
        if D != 2:
            raise ValueError("dynamic case enumeration is supported for D = 2 only")
        names = ["v1", "v2", "v1+g", "v2+g"]
        cases = []
        for ordering in _weak_orderings(names):
            if symmetry == "canonical":
                key = _canonical_key(ordering)
                if key > _canonical_key(_time_swap(ordering)):
                    continue
            cert = realizable(ordering, family, D)
            if cert["ok"]:
                cases.append(
                    CaseDescriptor(
                        family=family,
                        thresholds=tuple(names),
                        ordering=ordering,
                        representative=cert["witness"],
                        realizable=True,
                    )
                )
        return cases
    raise ValueError(f"case enumeration does not support family {family!r}")


def model_inputs(case: CaseDescriptor, representative=None) -> ModelSpec:
    """Build the discretizer input realizing a case's ordering."""
    rep = case.representative if representative is None else representative
    if case.family == STATIC:
        labels = alt_labels(len(case.thresholds))
        v = [[ZERO, rep[f"dv{d}"]] for d in labels]
        return ModelSpec(STATIC, D=len(labels), T=2, v=v)
    if case.family == DYN_UNCOND:
        # thresholds are in single-index form v_t + g * state; the
        # two-alternative model uses half the state-dependence swing
        half = rep["g"] / 2
        v = [[ZERO, ZERO], [rep["v1"] + half, rep["v2"] + half]]
        return ModelSpec(DYN_UNCOND, D=2, T=2, v=v, gamma=half)
    if case.family == AR2:
        return ModelSpec(
            AR2,
            D=2,
            T=3,
            v=[[rep["v1"], rep["v2"], rep["v3"]]],
            gamma1=rep["g1"],
            gamma2=rep["g2"],
            y0=1,
            y_minus1=1,
        )
    raise ValueError(f"no model construction for family {case.family!r}")


def representative_variants(case: CaseDescriptor, count, seed=0):
    """Alternative exact representatives of the same ordering, obtained by
    positive rescaling plus a common shift of the index parameters (both
    preserve every threshold ordering)."""
    import random

    rng = random.Random(seed)
    shiftable = {p for p in case.representative if p.startswith(("dv", "v"))}
    out = []
    for _ in range(count):
        alpha = Rat(rng.randint(1, 30), rng.randint(1, 30))
        shift = Rat(rng.randint(-20, 20), rng.randint(1, 7))
        rep = {
            p: alpha * Rat(v) + (shift if p in shiftable else ZERO)
            for p, v in case.representative.items()
        }
        out.append(rep)
    return out
