"""Dual polyhedron construction and undominated extreme point enumeration.

The polyhedron is Q = {y | exists z: A'y <= R'z, ||y||_inf <= 1}.  The
solutions of interest are the undominated extreme points of its
y-projection, equivalently the vertices of D := proj_y(Q) - R^n_+,
enumerated here by outer approximation: keep a vertex/ray description of
an outer set, push each vertex toward Q along the diagonal, and cut with
the supporting inequality obtained from the LP duals until every vertex
lies in D.

Large models avoid the full region-row LPs in two ways: row-heavy LPs are
posed in dual form (few rows, many columns), and two-period stationary
models use lazy cycle cuts — membership of y reduces to the absence of a
positive-weight cycle on the patch graph with edge weights given by y.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .discretize import AR2, DYN_COND, DYN_UNCOND, STATIC, STATIONARY
from .matrices import DiscreteModel
from .ratlp import (
    EQ,
    LE,
    ONE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    Rat,
    ZERO,
    solve_lp,
)

NEG_ONE = Rat(-1)


@dataclass(frozen=True)
class IneqVector:
    y: tuple
    rank: Rat
    provenance: str

    def __lt__(self, other):
        return self.y < other.y


def make_ineq(y, provenance):
    y = tuple(y)
    return IneqVector(y=y, rank=sum(y, ZERO), provenance=provenance)


@dataclass
class Polyhedron:
    model: DiscreteModel
    n: int  # y dimension (outcome count)
    m: int  # z dimension (restriction rows)
    rows: list  # (ydict, zdict) encoding sum_i a_i y_i + sum_k b_k z_k <= 0
    zfree_rows: Optional[list] = None  # ydicts, z-free exchangeable form
    pair_edges: Optional[dict] = None  # (f1, f2) -> outcome index list
    pair_diag: Optional[list] = None  # outcome indices forced <= 0
    cut_pool: list = field(default_factory=list)

    def oracle(self):
        if self.pair_edges is not None:
            return _CycleOracle(self)
        if self.zfree_rows is not None:
            return _ZFreeOracle(self)
        return _MatrixOracle(self)


def build_ddcp(model: DiscreteModel) -> Polyhedron:
    n = len(model.A)
    m = len(model.R)
    ncols = len(model.A[0])
    rows = []
    for j in range(ncols):
        ydict = {i: model.A[i][j] for i in range(n) if model.A[i][j] != 0}
        zdict = {k: -model.R[k][j] for k in range(m) if model.R[k][j] != 0}
        rows.append((ydict, zdict))

    zfree = None
    if model.P_E is not None:
        zfree = []
        for prow in model.P_E:
            coeff = {}
            for j, pv in enumerate(prow):
                if pv == 0:
                    continue
                for i in range(n):
                    if model.A[i][j] != 0:
                        coeff[i] = coeff.get(i, ZERO) + pv * model.A[i][j]
            zfree.append(coeff)

    poly = Polyhedron(model=model, n=n, m=m, rows=rows, zfree_rows=zfree)
    _detect_pair_structure(poly)
    return poly


def _detect_pair_structure(poly):
    """Two-period stationary models give region rows y_o <= z_{f1} - z_{f2}."""
    model = poly.model
    spec = model.spec
    if spec.restriction != STATIONARY or spec.T != 2:
        return
    if spec.family not in (STATIC, DYN_COND, DYN_UNCOND):
        return
    outcome_of = {}
    for j, lab in enumerate(model.col_labels):
        reg = lab[1] if spec.family == DYN_UNCOND else lab
        i = next(i for i in range(poly.n) if model.A[i][j] != 0)
        outcome_of.setdefault(reg, []).append(i)
    edges, diag = {}, []
    for (f1, f2), outs in outcome_of.items():
        if f1 == f2:
            diag.extend(outs)
        else:
            edges[(f1, f2)] = outs
    poly.pair_edges = edges
    poly.pair_diag = sorted(set(diag))


# ---------------------------------------------------------------------------
# support oracles: membership, scalar support, and the diagonal push LP
# ---------------------------------------------------------------------------


class _MatrixOracle:
    """LPs over the explicit row system; row-heavy instances are posed in
    dual form (the row count becomes the column count)."""

    DUAL_THRESHOLD = 150

    def __init__(self, poly: Polyhedron):
        self.poly = poly

    def _ineq_system(self, extra_y_rows=(), extra_b=(), with_t=False):
        """Rows G x <= h over x = (y, z[, t]) including the y box."""
        poly = self.poly
        n, m = poly.n, poly.m
        width = n + m + (1 if with_t else 0)
        G, h = [], []
        for ydict, zdict in poly.rows:
            row = [ZERO] * width
            for i, a in ydict.items():
                row[i] = a
            for k, bval in zdict.items():
                row[n + k] = bval
            G.append(row)
            h.append(ZERO)
        for i in range(n):
            row = [ZERO] * width
            row[i] = ONE
            G.append(row)
            h.append(ONE)
            row = [ZERO] * width
            row[i] = NEG_ONE
            G.append(row)
            h.append(ONE)
        for er, eb in zip(extra_y_rows, extra_b):
            row = [ZERO] * width
            for i, a in er.items():
                row[i] = a
            if with_t:
                row[-1] = NEG_ONE
            G.append(row)
            h.append(eb)
        return G, h

    def _minimize(self, c, G, h, want_row_duals=None):
        """min c'x s.t. Gx <= h; returns (value, x, selected row duals)."""
        if len(G) <= self.DUAL_THRESHOLD:
            lp = LinearProgram(
                sense="min",
                c=c,
                rows=G,
                senses=[LE] * len(G),
                b=h,
                bounds=[(None, None)] * len(c),
            )
            res = solve_lp(lp)
            assert res.status == OPTIMAL
            duals = None
            if want_row_duals is not None:
                duals = [res.duals[i] for i in want_row_duals]
            return res.value, res.x, duals
        # dual posing: min h'lam s.t. G'lam = -c, lam >= 0
        nvar = len(c)
        rows = [[G[r][j] for r in range(len(G))] for j in range(nvar)]
        lp = LinearProgram(
            sense="min",
            c=list(h),
            rows=rows,
            senses=[EQ] * nvar,
            b=[-cj for cj in c],
            bounds=[(0, None)] * len(G),
        )
        res = solve_lp(lp)
        assert res.status == OPTIMAL
        x = [-d for d in res.duals]
        value = -res.value
        duals = None
        if want_row_duals is not None:
            duals = [res.x[i] for i in want_row_duals]
        return value, x, duals

    def membership(self, y):
        """exists z: R'z >= A'y given a fixed y."""
        poly = self.poly
        if poly.m == 0:
            return all(
                sum(a * y[i] for i, a in ydict.items()) <= 0
                for ydict, _ in poly.rows
            )
        G, h = [], []
        for ydict, zdict in poly.rows:
            if not zdict and sum(a * y[i] for i, a in ydict.items()) > 0:
                return False
            row = [ZERO] * poly.m
            for k, bval in zdict.items():
                row[k] = bval
            G.append(row)
            h.append(-sum(a * y[i] for i, a in ydict.items()))
        if len(G) <= self.DUAL_THRESHOLD:
            lp = LinearProgram(
                sense="min",
                c=[ZERO] * poly.m,
                rows=G,
                senses=[LE] * len(G),
                b=h,
                bounds=[(None, None)] * poly.m,
            )
            return solve_lp(lp).status == OPTIMAL
        # infeasibility shows up as an unbounded homogeneous dual
        rows = [[G[r][k] for r in range(len(G))] for k in range(poly.m)]
        lp = LinearProgram(
            sense="min",
            c=list(h),
            rows=rows,
            senses=[EQ] * poly.m,
            b=[ZERO] * poly.m,
            bounds=[(0, None)] * len(G),
        )
        res = solve_lp(lp)
        if res.status == UNBOUNDED:
            return False
        assert res.status == OPTIMAL and res.value == 0
        return True

    def support(self, w):
        """(beta, y*) for beta = max w'y over Q."""
        poly = self.poly
        c = [ZERO] * (poly.n + poly.m)
        for i, wi in enumerate(w):
            c[i] = -wi
        G, h = self._ineq_system()
        value, x, _ = self._minimize(c, G, h)
        return -value, x[: poly.n]

    def bolt(self, v):
        """min t s.t. y + t*1 >= v, y in Q -> (t*, y*, w)."""
        poly = self.poly
        n = poly.n
        extra = [{i: NEG_ONE} for i in range(n)]
        eb = [-vi for vi in v]
        G, h = self._ineq_system(extra, eb, with_t=True)
        c = [ZERO] * (n + poly.m) + [ONE]
        first_extra = len(G) - n
        value, x, duals = self._minimize(
            c, G, h, want_row_duals=list(range(first_extra, len(G)))
        )
        w = _normalize_bolt_duals(duals)
        return value, x[:n], w


def _normalize_bolt_duals(duals):
    if all(d <= 0 for d in duals):
        duals = [-d for d in duals]
    assert all(d >= 0 for d in duals), f"mixed-sign push-LP duals {duals}"
    total = sum(duals)
    assert total == 1, f"push-LP duals sum to {total}, expected 1"
    return list(duals)


class _ZFreeOracle:
    """Direct LPs on the z-free exchangeable form P_E A' y <= 0."""

    def __init__(self, poly: Polyhedron):
        self.poly = poly

    def _rows(self, with_t=False, extra=(), eb=()):
        n = self.poly.n
        width = n + (1 if with_t else 0)
        G, h = [], []
        for coeff in self.poly.zfree_rows:
            row = [ZERO] * width
            for i, a in coeff.items():
                row[i] = a
            G.append(row)
            h.append(ZERO)
        for er, ebv in zip(extra, eb):
            row = [ZERO] * width
            for i, a in er.items():
                row[i] = a
            if with_t:
                row[-1] = NEG_ONE
            G.append(row)
            h.append(ebv)
        return G, h

    def membership(self, y):
        return all(
            sum(a * y[i] for i, a in coeff.items()) <= 0
            for coeff in self.poly.zfree_rows
        )

    def support(self, w):
        n = self.poly.n
        G, h = self._rows()
        lp = LinearProgram(
            sense="max",
            c=list(w),
            rows=G,
            senses=[LE] * len(G),
            b=h,
            bounds=[(NEG_ONE, ONE)] * n,
        )
        res = solve_lp(lp)
        assert res.status == OPTIMAL
        return res.value, res.x

    def bolt(self, v):
        n = self.poly.n
        extra = [{i: NEG_ONE} for i in range(n)]
        eb = [-vi for vi in v]
        G, h = self._rows(with_t=True, extra=extra, eb=eb)
        lp = LinearProgram(
            sense="min",
            c=[ZERO] * n + [ONE],
            rows=G,
            senses=[LE] * len(G),
            b=h,
            bounds=[(NEG_ONE, ONE)] * n + [(None, None)],
        )
        res = solve_lp(lp)
        assert res.status == OPTIMAL
        duals = res.duals[len(self.poly.zfree_rows) :]
        return res.value, res.x[:n], _normalize_bolt_duals(duals)


class _CycleOracle:
    """Two-period stationary models: membership is the absence of a
    positive-weight cycle on the patch graph; scalar LPs are solved lazily
    against a shared pool of cycle cuts."""

    def __init__(self, poly: Polyhedron):
        self.poly = poly
        nodes = sorted({f for e in poly.pair_edges for f in e})
        self.nodes = nodes
        self.node_index = {f: k for k, f in enumerate(nodes)}
        # edge list: (from, to, outcome index list)
        self.edges = [
            (self.node_index[f1], self.node_index[f2], outs)
            for (f1, f2), outs in sorted(poly.pair_edges.items())
        ]

    def _find_positive_cycle(self, y):
        """Positive-weight cycle with edge weight max_o y_o, or None."""
        nv = len(self.nodes)
        dist = [ZERO] * nv
        pred = [None] * nv
        weights = []
        for a, b, outs in self.edges:
            wbest, obest = None, None
            for o in outs:
                if wbest is None or y[o] > wbest:
                    wbest, obest = y[o], o
            weights.append((a, b, wbest, obest))
        marked = None
        for it in range(nv + 1):
            changed = False
            for a, b, wv, o in weights:
                if dist[a] + wv > dist[b]:
                    dist[b] = dist[a] + wv
                    pred[b] = (a, o)
                    changed = True
                    if it == nv:
                        marked = b
            if not changed:
                return None
        # walk back nv steps to land inside the cycle, then collect it
        node = marked
        for _ in range(nv):
            node = pred[node][0]
        cycle, cur = [], node
        while True:
            a, o = pred[cur]
            cycle.append(o)
            cur = a
            if cur == node:
                break
        return cycle

    def membership(self, y):
        if any(y[o] > 0 for o in self.poly.pair_diag):
            return False
        return self._find_positive_cycle(y) is None

    def _lazy_solve(self, build_lp, point_of):
        """Resolve an LP over Q by alternating solve and cycle separation."""
        while True:
            res = solve_lp(build_lp(self.poly.cut_pool))
            assert res.status == OPTIMAL
            y = point_of(res)
            if any(y[o] > 0 for o in self.poly.pair_diag):
                raise AssertionError("diagonal rows must be in the master LP")
            cycle = self._find_positive_cycle(y)
            if cycle is None:
                return res
            coeff = {}
            for o in cycle:
                coeff[o] = coeff.get(o, ZERO) + ONE
            self.poly.cut_pool.append(coeff)

    def _master_rows(self, pool, with_t=False, extra=(), eb=()):
        n = self.poly.n
        width = n + (1 if with_t else 0)
        G, h = [], []
        for o in self.poly.pair_diag:
            row = [ZERO] * width
            row[o] = ONE
            G.append(row)
            h.append(ZERO)
        for coeff in pool:
            row = [ZERO] * width
            for o, a in coeff.items():
                row[o] = a
            G.append(row)
            h.append(ZERO)
        for er, ebv in zip(extra, eb):
            row = [ZERO] * width
            for i, a in er.items():
                row[i] = a
            if with_t:
                row[-1] = NEG_ONE
            G.append(row)
            h.append(ebv)
        return G, h

    def support(self, w):
        n = self.poly.n

        def build(pool):
            G, h = self._master_rows(pool)
            return LinearProgram(
                sense="max",
                c=list(w),
                rows=G,
                senses=[LE] * len(G),
                b=h,
                bounds=[(NEG_ONE, ONE)] * n,
            )

        res = self._lazy_solve(build, lambda r: r.x)
        return res.value, res.x

    def bolt(self, v):
        n = self.poly.n
        extra = [{i: NEG_ONE} for i in range(n)]
        eb = [-vi for vi in v]

        def build(pool):
            G, h = self._master_rows(pool, with_t=True, extra=extra, eb=eb)
            return LinearProgram(
                sense="min",
                c=[ZERO] * n + [ONE],
                rows=G,
                senses=[LE] * len(G),
                b=h,
                bounds=[(NEG_ONE, ONE)] * n + [(None, None)],
            )

        res = self._lazy_solve(build, lambda r: r.x[:n])
        nfixed = len(self.poly.pair_diag) + len(self.poly.cut_pool)
        duals = res.duals[nfixed : nfixed + n]
        return res.value, res.x[:n], _normalize_bolt_duals(duals)


def membership(poly: Polyhedron, y) -> bool:
    return poly.oracle().membership(list(y))


# ---------------------------------------------------------------------------
# outer approximation over D = proj_y(Q) - R^n_+
# ---------------------------------------------------------------------------


def _rank_of(rows, n):
    M = [list(r) for r in rows]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c]
        M[r] = [v / inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


class _OuterApprox:
    """Vertex/ray description of the outer set, refined cut by cut.

    Constraints are w'y <= beta with w >= 0; the recession cone is fixed at
    -R^n_+ (no cut ever removes a ray).  Adjacency of two generators is the
    exact geometric test: their common tight constraints have rank n-1 in
    the homogenized system.
    """

    def __init__(self, n):
        self.n = n
        # constraints: (w list, beta); start from the unit upper box y <= 1
        self.cons = [([ONE if j == i else ZERO for j in range(n)], ONE) for i in range(n)]
        self.vertices = [tuple([ONE] * n)]
        self.tight = [set(range(n))]
        self.verified = [False]
        # rays -e_i: tight for constraint c iff w_i == 0
        self.ray_tight = [set(j for j in range(n) if j != i) for i in range(n)]

    def _homog(self, c):
        w, beta = self.cons[c]
        return list(w) + [-beta]

    def _adjacent(self, tight_a, tight_b):
        common = tight_a & tight_b
        if len(common) < self.n - 1:
            return False
        rows = [self._homog(c) for c in common]
        return _rank_of(rows, self.n + 1) == self.n - 1

    def unverified(self):
        return [i for i, ok in enumerate(self.verified) if not ok]

    def mark_verified(self, idx):
        self.verified[idx] = True

    def add_cut(self, w, beta):
        cid = len(self.cons)
        self.cons.append((list(w), beta))
        vals = [
            sum(wi * vi for wi, vi in zip(w, v)) - beta for v in self.vertices
        ]
        rayvals = [-w[i] for i in range(self.n)]
        for i in range(self.n):
            if rayvals[i] == 0:
                self.ray_tight[i].add(cid)
        out = [i for i, val in enumerate(vals) if val > 0]
        if not out:
            for i, val in enumerate(vals):
                if val == 0:
                    self.tight[i].add(cid)
            return
        keep = [i for i, val in enumerate(vals) if val <= 0]
        new_vertices = []
        for a in out:
            va = self.vertices[a]
            for b in keep:
                if vals[b] == 0:
                    continue
                if not self._adjacent(self.tight[a], self.tight[b]):
                    continue
                vb = self.vertices[b]
                theta = vals[a] / (vals[a] - vals[b])
                p = tuple(
                    va[i] + theta * (vb[i] - va[i]) for i in range(self.n)
                )
                new_vertices.append((p, (self.tight[a] & self.tight[b]) | {cid}))
            for ri in range(self.n):
                if rayvals[ri] == 0:
                    continue
                if not self._adjacent(self.tight[a], self.ray_tight[ri]):
                    continue
                s = -vals[a] / rayvals[ri]
                p = list(va)
                p[ri] = p[ri] - s
                new_vertices.append(
                    (tuple(p), (self.tight[a] & self.ray_tight[ri]) | {cid})
                )
        vertices, tight, verified = [], [], []
        for i in keep:
            vertices.append(self.vertices[i])
            t = self.tight[i]
            if vals[i] == 0:
                t = t | {cid}
            tight.append(t)
            verified.append(self.verified[i])
        seen = set(vertices)
        for p, t in new_vertices:
            if p in seen:
                # merge tight sets of duplicate crossings
                k = vertices.index(p)
                tight[k] |= t
                continue
            seen.add(p)
            vertices.append(p)
            tight.append(t)
            verified.append(False)
        self.vertices = vertices
        self.tight = tight
        self.verified = verified


def solve_undominated(poly: Polyhedron, provenance="benson"):
    """All undominated extreme points of the y-projection, sorted."""
    oracle = poly.oracle()
    outer = _OuterApprox(poly.n)
    while True:
        pending = outer.unverified()
        if not pending:
            break
        idx = pending[0]
        v = outer.vertices[idx]
        t, _, w = oracle.bolt(list(v))
        if t <= 0:
            outer.mark_verified(idx)
            continue
        beta, _ = oracle.support(w)
        val = sum(wi * vi for wi, vi in zip(w, v))
        assert val > beta, "cut must separate the pushed vertex"
        outer.add_cut(w, beta)
    out = []
    for v in outer.vertices:
        assert oracle.membership(list(v))
        out.append(make_ineq(v, provenance))
    return sorted(out)


def oracle_undominated(model: DiscreteModel, dim_limit: int = 9):
    """Brute-force {0, +-1}^n scan; undominated maximal feasible points.

    Feasibility in Q is downward closed (A has nonnegative entries), so a
    feasible grid point is dominated iff bumping one coordinate stays
    feasible.
    """
    poly = build_ddcp(model)
    n = poly.n
    if n > dim_limit:
        raise ValueError(f"oracle refuses y-dimension {n} > {dim_limit}")
    oracle = poly.oracle()
    vals = (NEG_ONE, ZERO, ONE)
    feasible = set()
    for cand in itertools.product(vals, repeat=n):
        if oracle.membership(list(cand)):
            feasible.add(cand)
    out = []
    for cand in feasible:
        dominated = False
        for i in range(n):
            if cand[i] < 1:
                bumped = cand[:i] + (cand[i] + 1,) + cand[i + 1 :]
                if bumped in feasible:
                    dominated = True
                    break
        if dominated:
            continue
        out.append(make_ineq(cand, "oracle"))
    from .reduce import eliminate_redundant

    return eliminate_redundant(out, model)
