"""Exact rational linear programming kernel.

Provides a two-phase simplex over arbitrary-precision rationals with
Bland's anti-cycling pivot rule, upper-bounded variables, dual values,
Farkas infeasibility certificates, a strict-feasibility test for open
systems, and branch-and-bound feasibility search over binary variables.

All arithmetic is exact; there are no tolerances anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as Rat

ZERO = Rat(0)
ONE = Rat(1)


def rat(x) -> Rat:
    """Coerce ints, strings like "3/2", floats and rationals to Rat."""
    if isinstance(x, float):
        # exact binary expansion of the float
        from fractions import Fraction

        f = Fraction(x)
        return Rat(f.numerator, f.denominator)
    return Rat(x)


def is_integral(x) -> bool:
    return Rat(x).denominator == 1


OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"

LE = "<="
EQ = "=="


@dataclass
class LinearProgram:
    """General-form LP: sense c'x over rows (<= or ==) and variable bounds.

    bounds[j] = (lo, hi) with None meaning unbounded on that side.
    """

    sense: str  # "max" or "min"
    c: list
    rows: list  # list of coefficient lists
    senses: list  # "<=" or "==" per row
    b: list
    bounds: list  # list of (lo|None, hi|None)

    def __post_init__(self):
        n = len(self.c)
        if len(self.rows) != len(self.b) or len(self.rows) != len(self.senses):
            raise ValueError("row count mismatch")
        for r in self.rows:
            if len(r) != n:
                raise ValueError("row length mismatch")
        if len(self.bounds) != n:
            raise ValueError("bounds length mismatch")
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be max or min")
        self.c = [rat(v) for v in self.c]
        self.rows = [[rat(v) for v in r] for r in self.rows]
        self.b = [rat(v) for v in self.b]
        self.bounds = [
            (None if lo is None else rat(lo), None if hi is None else rat(hi))
            for lo, hi in self.bounds
        ]


@dataclass
class LPResult:
    """Outcome of an exact LP solve.

    status: Optimal | Infeasible | Unbounded.
    x: basic (vertex) primal solution when Optimal.
    value: exact optimal value when Optimal.
    certificate: when Infeasible, a Farkas vector over the extended row
      system [rows; -x_j <= -lo_j for finite lower bounds; x_j <= hi_j for
      finite upper bounds] with nonnegative entries on <=-rows, free entries
      on ==-rows, lambda' A == 0 and lambda' b < 0.  When Unbounded, a
      primal ray d with A d <= / == 0 and c' d improving.
    duals: when Optimal, row multipliers in the sign convention of the
      original sense (for "max": >= 0 on binding <=-rows; for "min": <= 0).
    """

    status: str
    x: Optional[list] = None
    value: Optional[Rat] = None
    certificate: Optional[list] = None
    duals: Optional[list] = None
    bound_duals: Optional[list] = None  # (lower, upper) multiplier pairs


class _Tableau:
    """Dense simplex tableau for min c'x, A x = b, 0 <= x <= u.

    u[j] may be None (unbounded above).  Columns are structural variables
    followed by one artificial per row.  Nonbasic variables rest at a bound;
    the classic upper-bounded simplex rules apply.  Bland's rule (lowest
    eligible index, lowest-index leaving tie-break) guarantees termination.
    """

    MAX_PIVOTS = 2_000_000

    def __init__(self, A, b, u):
        self.m = m = len(A)
        self.n = n = len(A[0]) if m else 0
        self.u = list(u) + [ZERO] * m  # artificials capped at 0 after phase 1
        self.N = n + m
        # initial point: structurals at lower bound 0, artificial_i = |b_i|
        # normalize each row so its rhs is nonnegative; the artificial
        # columns then form an identity starting basis
        T = []
        self.sigma = []
        xB = []
        for i in range(m):
            s = ONE if b[i] >= 0 else -ONE
            self.sigma.append(s)
            T.append([v if s == ONE else -v for v in A[i]])
            xB.append(b[i] if s == ONE else -b[i])
        for i in range(m):
            for k in range(m):
                T[k].append(ONE if k == i else ZERO)
        self.T = T
        self.xB = xB
        self.basis = [n + i for i in range(m)]
        self.in_basis = [False] * self.N
        for j in self.basis:
            self.in_basis[j] = True
        self.at_upper = [False] * self.N
        # phase 1 artificials start with bound +inf
        for i in range(m):
            self.u[n + i] = None
        self.d = None  # reduced cost row
        self.obj = None

    def _set_objective(self, c):
        # c over all N columns; recompute reduced costs d = c - c_B B^-1 A
        m, N = self.m, self.N
        T = self.T
        cB = [c[j] for j in self.basis]
        d = list(c)
        for i in range(m):
            ci = cB[i]
            if ci != 0:
                Ti = T[i]
                for j in range(N):
                    tij = Ti[j]
                    if tij != 0:
                        d[j] -= ci * tij
        self.d = d
        self.c = c

    def _value(self):
        v = ZERO
        for i in range(self.m):
            v += self.c[self.basis[i]] * self.xB[i]
        for j in range(self.N):
            if (not self.in_basis[j]) and self.at_upper[j]:
                v += self.c[j] * self.u[j]
        return v

    def _pivot(self, r, j):
        """Pivot the tableau (and reduced costs) only; callers maintain xB."""
        T, m, N = self.T, self.m, self.N
        Tr = T[r]
        piv = Tr[j]
        inv = ONE / piv
        for k in range(N):
            if Tr[k] != 0:
                Tr[k] *= inv
        for i in range(m):
            if i == r:
                continue
            Ti = T[i]
            f = Ti[j]
            if f != 0:
                for k in range(N):
                    trk = Tr[k]
                    if trk != 0:
                        Ti[k] -= f * trk
        d = self.d
        f = d[j]
        if f != 0:
            for k in range(N):
                trk = Tr[k]
                if trk != 0:
                    d[k] -= f * trk
        old = self.basis[r]
        self.in_basis[old] = False
        self.basis[r] = j
        self.in_basis[j] = True
        self.at_upper[j] = False

    def optimize(self, eligible):
        """Run simplex to optimality over the eligible column set.

        Returns None on optimality or the entering column index when the
        problem is unbounded in that direction.
        """
        m = self.m
        T, d, u, xB = self.T, self.d, self.u, self.xB
        for _ in range(self.MAX_PIVOTS):
            enter = -1
            direction = 0
            for j in range(self.N):
                if self.in_basis[j] or not eligible[j]:
                    continue
                dj = d[j]
                if not self.at_upper[j]:
                    if dj < 0:
                        enter, direction = j, 1
                        break
                else:
                    if dj > 0:
                        enter, direction = j, -1
                        break
            if enter < 0:
                return None
            # ratio test
            limit = None  # (t, kind, row) kind: 0 leave-at-lower,1 leave-at-upper,2 bound flip
            ue = u[enter]
            if ue is not None:
                limit = (ue, 2, -1)
            for i in range(m):
                a = T[i][enter] * direction
                if a > 0:
                    t = xB[i] / a
                    if limit is None or t < limit[0] or (
                        t == limit[0]
                        and limit[1] != 2
                        and self.basis[i] < self.basis[limit[2]]
                    ):
                        limit = (t, 0, i)
                elif a < 0:
                    ub = u[self.basis[i]]
                    if ub is None:
                        continue
                    t = (ub - xB[i]) / (-a)
                    if limit is None or t < limit[0] or (
                        t == limit[0]
                        and limit[1] != 2
                        and self.basis[i] < self.basis[limit[2]]
                    ):
                        limit = (t, 1, i)
            if limit is None:
                return enter if direction == 1 else -enter - 1
            t, kind, row = limit
            if t != 0:
                for i in range(m):
                    a = T[i][enter]
                    if a != 0:
                        xB[i] -= a * direction * t
            if kind == 2:
                self.at_upper[enter] = not self.at_upper[enter]
                continue
            if kind == 1:
                self.at_upper[self.basis[row]] = True
            # entering variable current value becomes t (from lower) or u-t (upper)
            xB[row] = t if direction == 1 else u[enter] - t
            self._pivot(row, enter)
        raise RuntimeError("simplex pivot limit exceeded")

    def solution(self):
        x = [ZERO] * self.N
        for j in range(self.N):
            if (not self.in_basis[j]) and self.at_upper[j]:
                x[j] = self.u[j]
        for i in range(self.m):
            x[self.basis[i]] = self.xB[i]
        return x

    def duals(self):
        """y = c_B B^-1 recovered from artificial reduced costs."""
        y = []
        for i in range(self.m):
            j = self.n + i
            # d_j = c_j - y_i * sigma_i ; artificial cost is 0 in phase 2
            y.append((self.c[j] - self.d[j]) / self.sigma[i])
        return y


def _solve_standard(A, b, u, c):
    """min c'x, Ax=b, 0<=x<=u (u_j None = +inf). Exact two-phase simplex.

    Returns (status, x, value, y, d, tab) where y are equality multipliers
    and d the final reduced costs; on Infeasible, (y, d) certify Farkas; on
    Unbounded, x is a feasible point and d a ray.
    """
    m = len(A)
    tab = _Tableau(A, b, u)
    # phase 1: minimize artificial sum
    c1 = [ZERO] * tab.n + [ONE] * m
    tab._set_objective(c1)
    eligible = [True] * tab.N
    res = tab.optimize(eligible)
    assert res is None, "phase 1 cannot be unbounded"
    val1 = tab._value()
    if val1 > 0:
        y = tab.duals()
        return INFEASIBLE, None, None, y, tab.d, tab
    # pin artificials at zero so they never re-enter or grow
    for i in range(m):
        j = tab.n + i
        tab.u[j] = ZERO
        eligible[j] = False
    # drive basic artificials out where possible
    for i in range(m):
        if tab.basis[i] >= tab.n:
            Ti = tab.T[i]
            piv = next((j for j in range(tab.n) if Ti[j] != 0 and eligible[j]), None)
            if piv is not None:
                # degenerate swap: the entering column keeps its current value
                val = tab.u[piv] if tab.at_upper[piv] else ZERO
                tab._pivot(i, piv)
                tab.xB[i] = val
    c2 = list(c) + [ZERO] * m
    tab._set_objective(c2)
    res = tab.optimize(eligible)
    if res is not None:
        # unbounded: build ray
        if res >= 0:
            enter, direction = res, 1
        else:
            enter, direction = -res - 1, -1
        ray = [ZERO] * tab.N
        ray[enter] = Rat(direction)
        for i in range(m):
            a = tab.T[i][enter]
            if a != 0:
                ray[tab.basis[i]] = -a * direction
        x = tab.solution()
        return UNBOUNDED, x, None, None, ray, tab
    x = tab.solution()
    return OPTIMAL, x, tab._value(), tab.duals(), tab.d, tab


@dataclass
class _VarMap:
    """How an original variable maps into standard-form columns."""

    col: int
    shift: Rat
    scale: int  # +1 or -1
    neg_col: int = -1  # second column of a free split


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve a general-form LP exactly; see LPResult for certificates."""
    n = len(lp.c)
    minimize = lp.sense == "min"
    c_int = [v if minimize else -v for v in lp.c]

    cols = []  # per standard column: (orig var, scale)
    varmaps = []
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            varmaps.append(_VarMap(len(cols), lo, 1))
            cols.append((j, 1))
        elif hi is not None:
            # x = hi - x', x' >= 0
            varmaps.append(_VarMap(len(cols), hi, -1))
            cols.append((j, -1))
        else:
            vm = _VarMap(len(cols), ZERO, 1)
            cols.append((j, 1))
            vm.neg_col = len(cols)
            cols.append((j, -1))
            varmaps.append(vm)
    ncols = len(cols)

    u = [None] * ncols
    for j, vm in enumerate(varmaps):
        lo, hi = lp.bounds[j]
        if lo is not None and hi is not None:
            if hi < lo:
                return LPResult(status=INFEASIBLE, certificate=_bound_cert(lp, j))
            u[vm.col] = hi - lo

    A = []
    b = []
    row_slack = []  # column index of slack for <= rows, -1 for ==
    for i, row in enumerate(lp.rows):
        arow = [ZERO] * ncols
        shift_total = ZERO
        for j, vm in enumerate(varmaps):
            aij = row[j]
            if aij == 0:
                continue
            shift_total += aij * vm.shift
            arow[vm.col] += aij * vm.scale
            if vm.neg_col >= 0:
                arow[vm.neg_col] -= aij
        A.append(arow)
        b.append(lp.b[i] - shift_total)
        row_slack.append(-1)
    # slacks for <= rows
    for i, sense in enumerate(lp.senses):
        if sense == LE:
            for k in range(len(A)):
                A[k].append(ONE if k == i else ZERO)
            u.append(None)
            row_slack[i] = len(A[0]) - 1

    nstd = len(A[0]) if A else (ncols)
    if not A:
        # no rows: optimum sits at a bound or is unbounded
        return _solve_rowless(lp, minimize)

    c_std = [ZERO] * nstd
    for col, (j, s) in enumerate(cols):
        c_std[col] += c_int[j] * s

    status, x_std, value, y, d, tab = _solve_standard(A, b, u, c_std)

    if status == INFEASIBLE:
        cert = _farkas_from_duals(lp, varmaps, cols, row_slack, y, d, tab)
        return LPResult(status=INFEASIBLE, certificate=cert)
    if status == UNBOUNDED:
        ray_std = d
        ray = [ZERO] * n
        for col, (j, s) in enumerate(cols):
            if col < len(ray_std) and ray_std[col] != 0:
                ray[j] += s * ray_std[col]
        if not minimize:
            pass
        return LPResult(status=UNBOUNDED, certificate=ray)
    x = [vm.shift for vm in varmaps]
    x = list(x)
    for col, (j, s) in enumerate(cols):
        if col < ncols and x_std[col] != 0:
            x[j] += s * x_std[col]
    # correct shift for free-split second column handled via cols scan above
    val = sum((lp.c[j] * x[j] for j in range(n)), ZERO)
    duals = []
    for i in range(len(lp.rows)):
        yi = y[i]
        duals.append(-yi if not minimize else yi)
    return LPResult(status=OPTIMAL, x=x, value=val, duals=duals)


def _solve_rowless(lp: LinearProgram, minimize: bool) -> LPResult:
    x = []
    for j, (lo, hi) in enumerate(lp.bounds):
        cj = lp.c[j]
        want_low = (cj > 0) == minimize
        if cj == 0:
            pick = lo if lo is not None else (hi if hi is not None else ZERO)
        elif want_low:
            if lo is None:
                ray = [ZERO] * len(lp.c)
                ray[j] = -ONE
                return LPResult(status=UNBOUNDED, certificate=ray)
            pick = lo
        else:
            if hi is None:
                ray = [ZERO] * len(lp.c)
                ray[j] = ONE
                return LPResult(status=UNBOUNDED, certificate=ray)
            pick = hi
        if lo is not None and hi is not None and hi < lo:
            return LPResult(status=INFEASIBLE, certificate=_bound_cert(lp, j))
        x.append(pick)
    val = sum((lp.c[j] * x[j] for j in range(len(x))), ZERO)
    return LPResult(status=OPTIMAL, x=x, value=val, duals=[])


def extended_rows(lp: LinearProgram):
    """The row system [rows; finite lower bounds as -x<=-lo; finite uppers].

    Returns (matrix, rhs, senses) over the original variables; this is the
    system a Farkas certificate refers to.
    """
    n = len(lp.c)
    M = [list(r) for r in lp.rows]
    rhs = list(lp.b)
    senses = list(lp.senses)
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            row = [ZERO] * n
            row[j] = -ONE
            M.append(row)
            rhs.append(-lo)
            senses.append(LE)
    for j, (lo, hi) in enumerate(lp.bounds):
        if hi is not None:
            row = [ZERO] * n
            row[j] = ONE
            M.append(row)
            rhs.append(hi)
            senses.append(LE)
    return M, rhs, senses


def _bound_cert(lp: LinearProgram, j: int):
    """Certificate for lo_j > hi_j: one unit on each of the two bound rows."""
    M, rhs, senses = extended_rows(lp)
    cert = [ZERO] * len(M)
    lo_idx = len(lp.rows)
    for k, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            if k == j:
                cert[lo_idx] = ONE
            lo_idx += 1
    hi_idx = lo_idx
    for k, (lo, hi) in enumerate(lp.bounds):
        if hi is not None:
            if k == j:
                cert[hi_idx] = ONE
            hi_idx += 1
    return cert


def _farkas_from_duals(lp, varmaps, cols, row_slack, y, d, tab):
    """Map phase-1 duals to a certificate over the extended row system."""
    n = len(lp.c)
    nrows = len(lp.rows)
    # lambda on rows: for <= row i the slack's reduced cost is -y_i >= 0 at
    # a phase-1 optimum, so take lambda_i = -y_i (negated for sign lambda>=0
    # meaning "add up rows to get contradiction"); == rows keep y free.
    lam_rows = [-y[i] for i in range(nrows)]
    # bound multipliers come from structural reduced costs: for column j at
    # value 0 with d_j, the implied multiplier on its active bound is d_j.
    lo_mult = {}
    hi_mult = {}
    for col, (j, s) in enumerate(cols):
        dj = d[col]
        if dj == 0:
            continue
        at_up = (not tab.in_basis[col]) and tab.at_upper[col]
        if not at_up:
            # nonbasic at lower of the standard column
            if dj < 0:
                continue  # cannot happen at optimum over eligible cols
            if s == 1:
                lo_mult[j] = lo_mult.get(j, ZERO) + dj
            else:
                hi_mult[j] = hi_mult.get(j, ZERO) + dj
        else:
            if s == 1:
                # standard col at its upper bound u = hi - lo: active row x<=hi
                hi_mult[j] = hi_mult.get(j, ZERO) + (-dj)
            else:
                lo_mult[j] = lo_mult.get(j, ZERO) + (-dj)
    M, rhs, senses = extended_rows(lp)
    cert = [ZERO] * len(M)
    for i in range(nrows):
        cert[i] = lam_rows[i]
    k = nrows
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo is not None:
            cert[k] = lo_mult.get(j, ZERO)
            k += 1
    for j, (lo, hi) in enumerate(lp.bounds):
        if hi is not None:
            cert[k] = hi_mult.get(j, ZERO)
            k += 1
    ok, cert = _normalize_certificate(M, rhs, senses, cert)
    if not ok:
        raise AssertionError("internal error: invalid Farkas certificate")
    return cert


def _normalize_certificate(M, rhs, senses, cert):
    n = len(M[0]) if M else 0
    comb = [ZERO] * n
    tot = ZERO
    for lam, row, bi, sense in zip(cert, M, rhs, senses):
        if sense == LE and lam < 0:
            return False, cert
        if lam != 0:
            for j in range(n):
                if row[j] != 0:
                    comb[j] += lam * row[j]
            tot += lam * bi
    if any(v != 0 for v in comb) or tot >= 0:
        return False, cert
    return True, cert


def verify_certificate(lp: LinearProgram, cert) -> bool:
    """Exact check of the Farkas identities over the extended row system."""
    M, rhs, senses = extended_rows(lp)
    if len(cert) != len(M):
        return False
    ok, _ = _normalize_certificate(M, rhs, senses, cert)
    return ok


def strict_feasibility(A: Sequence[Sequence], b: Sequence):
    """Exact strict-feasibility test for the open system {x : Ax < b}.

    Solves max s subject to Ax + s*1 <= b, s <= 1 and reports whether the
    optimum is positive, along with the witness x.  The slack cap keeps the
    program bounded without affecting the sign of the optimum.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = [[rat(v) for v in row] + [ONE] for row in A]
    lp = LinearProgram(
        sense="max",
        c=[ZERO] * n + [ONE],
        rows=rows,
        senses=[LE] * m,
        b=[rat(v) for v in b],
        bounds=[(None, None)] * n + [(None, ONE)],
    )
    res = solve_lp(lp)
    if res.status == UNBOUNDED:  # pragma: no cover - s is capped at 1
        raise AssertionError("capped program cannot be unbounded")
    if res.status == INFEASIBLE:  # pragma: no cover - always feasible (s low)
        raise AssertionError("capped program cannot be infeasible")
    s = res.x[n]
    return {"strictly_feasible": s > 0, "witness": res.x[:n], "margin": s}


def solve_milp_feasibility(lp: LinearProgram, binary_vars):
    """Feasibility of an LP with some variables restricted to {0,1}.

    Depth-first branch and bound on the LP relaxation: branch on the most
    fractional binary variable, trying 1 before 0.  Returns a feasible point
    with exact binary entries, or certified infeasibility once the finite
    tree is exhausted.
    """
    binary_vars = sorted(set(binary_vars))
    for j in binary_vars:
        lo, hi = lp.bounds[j]
        if (lo is not None and lo < 0) or (hi is not None and hi > 1):
            raise ValueError("binary variable bounds must lie within [0,1]")
        if lo is None or hi is None:
            raise ValueError("binary variables need finite bounds in [0,1]")

    def attempt(fixed):
        bounds = list(lp.bounds)
        for j, v in fixed.items():
            bounds[j] = (Rat(v), Rat(v))
        sub = LinearProgram(
            sense="min",
            c=[ZERO] * len(lp.c),
            rows=lp.rows,
            senses=lp.senses,
            b=lp.b,
            bounds=bounds,
        )
        res = solve_lp(sub)
        if res.status != OPTIMAL:
            return None
        x = res.x
        frac = None
        best = None
        for j in binary_vars:
            v = x[j]
            if v == 0 or v == 1:
                continue
            score = min(v, 1 - v)
            if best is None or score > best:
                best = score
                frac = j
        if frac is None:
            return x
        for branch in (1, 0):
            fixed[frac] = branch
            got = attempt(fixed)
            if got is not None:
                return got
        del fixed[frac]
        return None

    point = attempt({})
    if point is None:
        return {"feasible": False, "point": None}
    return {"feasible": True, "point": point}
