"""Redundancy elimination and canonicalization of inequality lists.

An inequality y'p <= 0 is redundant given others Y if some lambda >= 0
gives y <= Y lambda componentwise: then y'p <= lambda'Y'p <= 0 for every
p >= 0 satisfying the others.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ratlp import LE, OPTIMAL, LinearProgram, Rat, ZERO, solve_lp


@dataclass
class IneqSet:
    vectors: list
    labels: Optional[list] = None
    log: list = field(default_factory=list)

    def payloads(self):
        return [v.y for v in self.vectors]


def implied_by(y, others):
    """(implied?, witness lambda) for y <= sum_j lambda_j * others_j."""
    y = list(y)
    n = len(y)
    if not others:
        return all(v <= 0 for v in y), []
    k = len(others)
    rows = [[-others[j][i] for j in range(k)] for i in range(n)]
    lp = LinearProgram(
        sense="min",
        c=[ZERO] * k,
        rows=rows,
        senses=[LE] * n,
        b=[-v for v in y],
        bounds=[(0, None)] * k,
    )
    res = solve_lp(lp)
    if res.status != OPTIMAL:
        return False, None
    return True, res.x


def canonicalize(vectors, model=None) -> IneqSet:
    """Dedupe exact duplicates and sort lexicographically."""
    seen = {}
    for v in vectors:
        seen.setdefault(v.y, v)
    ordered = [seen[y] for y in sorted(seen)]
    labels = list(model.row_labels) if model is not None else None
    return IneqSet(vectors=ordered, labels=labels)


def eliminate_redundant(vectors, model=None) -> IneqSet:
    """Trivial filter, then sequential Farkas passes in canonical order."""
    base = canonicalize(vectors, model)
    log = []
    survivors = []
    for v in base.vectors:
        if all(c <= 0 for c in v.y):
            log.append({"removed": v.y, "reason": "trivial"})
        else:
            survivors.append(v)
    kept = list(survivors)
    for v in survivors:
        others = [u.y for u in kept if u.y != v.y]
        implied, lam = implied_by(v.y, others)
        if implied:
            kept = [u for u in kept if u.y != v.y]
            log.append(
                {
                    "removed": v.y,
                    "reason": "farkas",
                    "witness": {tuple(o): l for o, l in zip(others, lam)},
                }
            )
    out = IneqSet(vectors=kept, labels=base.labels, log=log)
    _verify_log(out, log)
    return out


def _verify_log(out, log):
    """Symbolic soundness: each removed vector is dominated by its witness
    combination of vectors that were present when it was removed."""
    for entry in log:
        if entry["reason"] != "farkas":
            continue
        y = entry["removed"]
        combo = [ZERO] * len(y)
        for o, l in entry["witness"].items():
            assert l >= 0
            for i, c in enumerate(o):
                combo[i] += l * c
        assert all(a <= b for a, b in zip(y, combo))
