"""Analytic inequality families, one generator per model class.

Each generator builds inequality vectors y (meaning y'p <= 0 over the
outcome-sequence probability vector p) directly from the model inputs,
without touching the LP machinery.  They serve as independent
cross-checks of the solver pipeline: every generated vector must pass
the dual-polyhedron membership test of the matching discretized model.

Conventions shared with the rest of the package: outcome sequences are
ordered lexicographically over the alternative labels, and a marginal
statement like P(Y_1 in A) <= P(Y_2 in A) becomes the vector with +1 on
outcomes with first entry in A and -1 on outcomes with second entry in
A, coefficients summed where they overlap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .discretize import AR2, DYN_COND, ModelSpec, alt_labels
from .molp import make_ineq
from .ratlp import Rat, ZERO
from .reduce import IneqSet

PROVENANCE = "closedform"


def _outcomes(labels, T=2):
    return list(itertools.product(labels, repeat=T))


def _vector(outcomes, coeff):
    return tuple(coeff.get(o, ZERO) for o in outcomes)


def _add(coeff, outcome, value):
    coeff[outcome] = coeff.get(outcome, ZERO) + value


# ---------------------------------------------------------------------------
# binary static model
# ---------------------------------------------------------------------------

# vectors over (p00, p01, p10, p11)
_FIRST_BELOW_SECOND = (ZERO, -Rat(1), Rat(1), ZERO)  # p10 <= p01
_FIRST_ABOVE_SECOND = (ZERO, Rat(1), -Rat(1), ZERO)  # p01 <= p10


def cm_inequalities(sign) -> IneqSet:
    """Binary two-period stationary model, keyed by the sign of the
    period-1 minus period-2 index difference.

    sign < 0 gives p10 <= p01, sign > 0 gives p01 <= p10, and sign = 0
    gives both vectors (their conjunction encodes equality).
    """
    if sign < 0:
        rows = [_FIRST_BELOW_SECOND]
    elif sign > 0:
        rows = [_FIRST_ABOVE_SECOND]
    else:
        rows = [_FIRST_BELOW_SECOND, _FIRST_ABOVE_SECOND]
    return IneqSet(vectors=[make_ineq(r, PROVENANCE) for r in rows])


# ---------------------------------------------------------------------------
# ranked alternatives (static models, D >= 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankedAlternatives:
    """Alternatives ranked by strictly decreasing index-function
    differences dv_d (period-2 minus period-1 index component)."""

    labels: tuple
    dv: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.dv):
            raise ValueError("labels and differences must align")
        if len(set(self.dv)) != len(self.dv):
            raise ValueError(
                "tied index differences are not supported here; "
                "use the solver pipeline for tied cases"
            )

    @property
    def D(self):
        return len(self.labels)

    @property
    def order(self):
        """Labels sorted by strictly decreasing difference."""
        return tuple(
            sorted(self.labels, key=lambda d: self.dv[self.labels.index(d)], reverse=True)
        )

    def upper(self, i):
        """The i alternatives with the largest differences."""
        return frozenset(self.order[:i])

    def lower(self, j):
        """The alternatives of rank j..D (1-based)."""
        return frozenset(self.order[j - 1 :])


def ranked(dv, labels=None) -> RankedAlternatives:
    dv = tuple(Rat(v) for v in dv)
    if labels is None:
        labels = tuple(alt_labels(len(dv)))
    return RankedAlternatives(labels=tuple(labels), dv=dv)


def pp_static_inequalities(rk: RankedAlternatives) -> IneqSet:
    """Stationary static model: P(Y1 in U_i) <= P(Y2 in U_i) for each
    proper upper set U_i of the ranking."""
    outcomes = _outcomes(rk.labels)
    vectors = []
    labels = []
    for i in range(1, rk.D):
        U = rk.upper(i)
        coeff = {}
        for d1, d2 in outcomes:
            if d1 in U:
                _add(coeff, (d1, d2), Rat(1))
            if d2 in U:
                _add(coeff, (d1, d2), -Rat(1))
        vectors.append(make_ineq(_vector(outcomes, coeff), PROVENANCE))
        labels.append(frozenset(U))
    return IneqSet(vectors=vectors, labels=labels)


# ---------------------------------------------------------------------------
# exchangeable static model: staircase sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StaircaseSet:
    """A union of products (upper set) x (lower set) of the ranking,
    viewed as a subset of [D] x [D]; its permutation is the transpose."""

    pairs: frozenset

    def per(self) -> "StaircaseSet":
        return StaircaseSet(frozenset((b, a) for a, b in self.pairs))


def staircase_sets(D):
    """All staircase subsets of [D] x [D] in rank coordinates, generated
    canonically from nondecreasing threshold sequences: for each m in
    1..D and nondecreasing (i_1 <= ... <= i_m) the set
    {(d, d') | d <= m, d' >= i_d}.  Yields C(2D, D) - 1 distinct sets.
    """
    for m in range(1, D + 1):
        for seq in itertools.combinations_with_replacement(range(1, D + 1), m):
            pairs = frozenset(
                (d, dp) for d in range(1, m + 1) for dp in range(seq[d - 1], D + 1)
            )
            yield StaircaseSet(pairs)


def exchangeable_family(rk: RankedAlternatives) -> IneqSet:
    """Exchangeable static model: P((Y1,Y2) in A) <= P((Y1,Y2) in per(A))
    for every staircase set A of the ranking."""
    outcomes = _outcomes(rk.labels)
    order = rk.order
    vectors = []
    labels = []
    for sc in staircase_sets(rk.D):
        coeff = {}
        for a, b in sc.pairs:
            _add(coeff, (order[a - 1], order[b - 1]), Rat(1))
        for a, b in sc.per().pairs:
            _add(coeff, (order[a - 1], order[b - 1]), -Rat(1))
        vectors.append(make_ineq(_vector(outcomes, coeff), PROVENANCE))
        labels.append(sc)
    return IneqSet(vectors=vectors, labels=labels)


# ---------------------------------------------------------------------------
# one-lag dynamic model, conditional stationarity
# ---------------------------------------------------------------------------


@dataclass
class DynLowerSets:
    """Per-state utility improvements and their lower-set families.

    delta[(d, d1)] is the period-1-to-2 improvement of alternative d
    when d1 was chosen in period 1; lower_families[d1] collects all
    nonempty proper subsets L with delta on L <= delta off L.  The
    construction is tie-robust: ties simply enlarge the families.
    """

    labels: tuple
    delta: dict
    lower_families: dict

    @property
    def family_union(self):
        """All lower sets across states, deterministically ordered."""
        seen = set()
        for d1 in self.labels:
            seen.update(self.lower_families[d1])
        return sorted(seen, key=lambda A: (len(A), sorted(A)))

    def lower_join(self, d, A):
        """Union of the lower sets of state d contained in A (itself a
        lower set of state d, possibly empty)."""
        out = frozenset()
        for B in self.lower_families[d]:
            if B <= A:
                out |= B
        return out


def dyn_lower_sets(spec: ModelSpec) -> DynLowerSets:
    labels = tuple(spec.labels)
    gamma = Rat(spec.gamma)
    delta = {}
    for d1 in labels:
        for d in labels:
            row = spec.v[labels.index(d)]
            delta[(d, d1)] = (
                Rat(row[1])
                - Rat(row[0])
                + (gamma if d == d1 else ZERO)
                - (gamma if d == spec.y0 else ZERO)
            )
    families = {}
    for d1 in labels:
        fam = []
        for r in range(1, len(labels)):
            for combo in itertools.combinations(labels, r):
                L = frozenset(combo)
                rest = [delta[(d, d1)] for d in labels if d not in L]
                if max(delta[(d, d1)] for d in L) <= min(rest):
                    fam.append(L)
        families[d1] = fam
    return DynLowerSets(labels=labels, delta=delta, lower_families=families)


def dynamic_family(spec: ModelSpec) -> IneqSet:
    """One-lag dynamic model with T = 2: for every lower set A, the
    probability of landing in the A-compatible lower join in period 2
    is at most the probability of choosing within A in period 1."""
    if spec.family != DYN_COND or spec.T != 2:
        raise ValueError("dynamic family requires the one-lag model with T = 2")
    ls = dyn_lower_sets(spec)
    outcomes = _outcomes(ls.labels)
    vectors = []
    labels = []
    for A in ls.family_union:
        coeff = {}
        for d1 in ls.labels:
            for d2 in ls.lower_join(d1, A):
                _add(coeff, (d1, d2), Rat(1))
        for d1 in A:
            for d2 in ls.labels:
                _add(coeff, (d1, d2), -Rat(1))
        vectors.append(make_ineq(_vector(outcomes, coeff), PROVENANCE))
        labels.append(A)
    return IneqSet(vectors=vectors, labels=labels)


# ---------------------------------------------------------------------------
# binary one-lag dynamic model: guarded two-period inequalities
# ---------------------------------------------------------------------------

# vectors over (p00, p01, p10, p11); p_{d1 d2} = P(Y1=d1, Y2=d2)
_KPT_TABLE = (
    # (guard, vector, description)
    ("second_le_first_0", (ZERO, -Rat(1), Rat(1), ZERO), "P(Y2=0) <= P(Y1=0)"),
    ("second_le_first_1", (ZERO, Rat(1), -Rat(1), ZERO), "P(Y2=1) <= P(Y1=1)"),
    ("switch_down", (-Rat(1), -Rat(1), Rat(1), ZERO), "P(Y1=1,Y2=0) <= P(Y1=0)"),
    ("stay_down", (ZERO, -Rat(1), ZERO, ZERO), "P(Y1=0,Y2=0) <= P(Y1=0)"),
    ("stay_up", (ZERO, ZERO, -Rat(1), ZERO), "P(Y1=1,Y2=1) <= P(Y1=1)"),
    ("switch_up", (ZERO, Rat(1), -Rat(1), -Rat(1)), "P(Y1=0,Y2=1) <= P(Y1=1)"),
)


def kpt_family(a1, a2, gamma_tilde, y0) -> IneqSet:
    """Binary one-lag dynamic model in single-index form: Y_t indicates
    a_t + gamma_tilde * Y_{t-1} + fixed effect + shock > 0, with
    conditionally stationary shocks.  Emits each two-period inequality
    whose guard holds at (a1, a2, gamma_tilde, y0); guards are
    inclusive, so ties emit both sides."""
    a1, a2, g = Rat(a1), Rat(a2), Rat(gamma_tilde)
    c = a2 - a1
    t = g * Rat(y0)
    guards = {
        "second_le_first_0": c + min(ZERO, g) >= t,
        "second_le_first_1": c + max(ZERO, g) <= t,
        "switch_down": c + g * Rat(1 - y0) >= ZERO,
        "stay_down": c >= t,
        "stay_up": c + g * Rat(1 - y0) <= ZERO,
        "switch_up": c <= t,
    }
    vectors = []
    labels = []
    for key, vec, desc in _KPT_TABLE:
        if guards[key]:
            vectors.append(make_ineq(vec, PROVENANCE))
            labels.append(desc)
    return IneqSet(vectors=vectors, labels=labels)


# ---------------------------------------------------------------------------
# one-lag dynamic model under serially-iid shocks: nonlinear comparison set
# ---------------------------------------------------------------------------


def pp2_family(spec: ModelSpec):
    """Sets A whose complement is a lower set of every state in A, with
    an exact evaluator of the nonlinear restriction
    P(Y1 in A, Y2 in A) >= P(Y1 in A)^2 on a rational CCP vector.

    These restrictions hold under conditionally serially-iid shocks and
    are complementary to dynamic_family: neither implies the other.
    """
    ls = dyn_lower_sets(spec)
    labels = ls.labels
    full = frozenset(labels)
    sets = []
    for r in range(1, len(labels)):
        for combo in itertools.combinations(labels, r):
            A = frozenset(combo)
            comp = full - A
            if all(comp in ls.lower_families[d] for d in A):
                sets.append(A)
    sets.sort(key=lambda A: (len(A), sorted(A)))
    outcomes = _outcomes(labels)

    def evaluator(p, A):
        A = frozenset(A)
        p = [Rat(v) for v in p]
        both = sum(
            (p[i] for i, (d1, d2) in enumerate(outcomes) if d1 in A and d2 in A),
            ZERO,
        )
        first = sum((p[i] for i, (d1, _) in enumerate(outcomes) if d1 in A), ZERO)
        return both >= first * first

    return {"sets": sets, "evaluator": evaluator}


# ---------------------------------------------------------------------------
# binary two-lag dynamic model, conditional stationarity
# ---------------------------------------------------------------------------


@dataclass
class Ar2Deltas:
    """Exact utility-threshold gaps of the binary two-lag model.

    base(t, d1, d2) is the period-t threshold when the previous two
    choices were d1 (one lag) and d2 (two lags); the gap functions
    compare it against the period-1 or period-s thresholds, using the
    worst-case lag contribution for periods whose lags are not pinned
    down by the conditioning event.
    """

    v: tuple
    g1: Rat
    g2: Rat
    y0: int
    ym1: int

    def base(self, t, d1, d2):
        return self.v[t - 1] + self.g1 * Rat(d1) + self.g2 * Rat(d2)

    def gap_first(self, t, d1, d2):
        return self.base(t, d1, d2) - self.base(1, self.y0, self.ym1)

    def gap_second(self, t, d1, d2, hi):
        edge = max(self.g1, ZERO) if hi else min(self.g1, ZERO)
        return self.base(t, d1, d2) - (self.v[1] + edge + self.g2 * Rat(self.y0))

    def gap_later(self, s, t, d1, d2, hi):
        if hi:
            edge = max(self.g1, ZERO) + max(self.g2, ZERO)
        else:
            edge = min(self.g1, ZERO) + min(self.g2, ZERO)
        return self.base(t, d1, d2) - (self.v[s - 1] + edge)


def ar2_deltas(spec: ModelSpec, T=None) -> Ar2Deltas:
    if spec.family != AR2:
        raise ValueError("two-lag gaps require the binary two-lag model")
    T = spec.T if T is None else T
    v = tuple(Rat(x) for x in spec.v[0][:T])
    if len(v) < T:
        raise ValueError("need an index value for every period")
    return Ar2Deltas(
        v=v, g1=Rat(spec.gamma1), g2=Rat(spec.gamma2), y0=spec.y0, ym1=spec.y_minus1
    )


def ar2_family(spec: ModelSpec, T=None) -> IneqSet:
    """Binary two-lag model: guarded inequalities bounding the mass of
    recent-history events by single-period marginals.

    For each target period t and comparison period r (= 1, 2, or an
    earlier s >= 3), the union of history events whose threshold gap
    against period r has the favorable sign is bounded by P(Y_r = b).
    """
    d = ar2_deltas(spec, T)
    T = len(d.v)
    outcomes = _outcomes((0, 1), T)
    vectors = []
    labels = []

    def emit(plus_positions, r, b, tag):
        # plus_positions: list of (period -> value) dicts for the union
        if not plus_positions:
            return
        coeff = {}
        for cond in plus_positions:
            for o in outcomes:
                if all(o[p - 1] == val for p, val in cond.items()):
                    _add(coeff, o, Rat(1))
        for o in outcomes:
            if o[r - 1] == b:
                _add(coeff, o, -Rat(1))
        vectors.append(make_ineq(_vector(outcomes, coeff), PROVENANCE))
        labels.append({"target": tag, "bound": (r, b), "union": plus_positions})

    if T >= 2:
        emit(
            [{1: d1, 2: 0} for d1 in (0, 1) if d.gap_first(2, d1, spec.y0) >= ZERO],
            1, 0, "period 2 vs 1",
        )
        emit(
            [{1: d1, 2: 1} for d1 in (0, 1) if d.gap_first(2, d1, spec.y0) <= ZERO],
            1, 1, "period 2 vs 1",
        )
    for t in range(3, T + 1):
        histories = list(itertools.product((0, 1), repeat=2))
        emit(
            [
                {t - 2: d2, t - 1: d1, t: 0}
                for d1, d2 in histories
                if d.gap_first(t, d1, d2) >= ZERO
            ],
            1, 0, f"period {t} vs 1",
        )
        emit(
            [
                {t - 2: d2, t - 1: d1, t: 1}
                for d1, d2 in histories
                if d.gap_first(t, d1, d2) <= ZERO
            ],
            1, 1, f"period {t} vs 1",
        )
        emit(
            [
                {t - 2: d2, t - 1: d1, t: 0}
                for d1, d2 in histories
                if d.gap_second(t, d1, d2, hi=True) >= ZERO
            ],
            2, 0, f"period {t} vs 2",
        )
        emit(
            [
                {t - 2: d2, t - 1: d1, t: 1}
                for d1, d2 in histories
                if d.gap_second(t, d1, d2, hi=False) <= ZERO
            ],
            2, 1, f"period {t} vs 2",
        )
        for s in range(3, t):
            emit(
                [
                    {t - 2: d2, t - 1: d1, t: 0}
                    for d1, d2 in histories
                    if d.gap_later(s, t, d1, d2, hi=True) >= ZERO
                ],
                s, 0, f"period {t} vs {s}",
            )
            emit(
                [
                    {t - 2: d2, t - 1: d1, t: 1}
                    for d1, d2 in histories
                    if d.gap_later(s, t, d1, d2, hi=False) <= ZERO
                ],
                s, 1, f"period {t} vs {s}",
            )
    return IneqSet(vectors=vectors, labels=labels)
