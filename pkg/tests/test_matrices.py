"""Tests for discrete model construction."""

import pytest

from sharpset.discretize import (
    AR2,
    DYN_COND,
    DYN_UNCOND,
    STATIC,
    ModelSpec,
    patches_for,
    static_patches,
)
from sharpset.matrices import (
    build_P_exchangeable,
    build_ar2,
    build_dyn_cond,
    build_dyn_uncond,
    build_model,
    build_static,
)
from sharpset.ratlp import EQ, LE, OPTIMAL, LinearProgram, Rat, rat, solve_lp

from tests.test_discretize import AR2_SPEC, EX4, KPT, static_spec


def col_sums(M):
    return [sum(row[j] for row in M) for j in range(len(M[0]))]


def rank(M):
    """Exact rank by rational Gaussian elimination."""
    M = [list(row) for row in M]
    r = 0
    for c in range(len(M[0]) if M else 0):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        M[r] = [v / M[r][c] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def same_row_space(M1, M2):
    return rank(M1) == rank(M2) == rank(M1 + M2)


# the binary stationary example: four outcome rows over nine region columns,
# with patches ordered high-shock-first in the source layout
REF_A = [
    [0, 0, 0, 0, 0, 1, 0, 0, 1],
    [0, 0, 0, 1, 1, 0, 1, 1, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 0, 0, 0],
]
REF_RS = [
    [0, 1, 1, -1, 0, 0, -1, 0, 0],
    [0, -1, 0, 1, 0, 1, 0, -1, 0],
    [0, 0, -1, 0, 0, -1, 1, 1, 0],
]


class TestStaticModel:
    def setup_method(self):
        self.spec = static_spec([[0, 0], [1, 2]])
        self.model = build_static(static_patches(self.spec), self.spec)

    def perm(self, j):
        # this artifact's region (a, b) maps to source column (2-a, 2-b)
        a, b = divmod(j, 3)
        return (2 - a) * 3 + (2 - b)

    def test_A_matches_reference_up_to_column_permutation(self):
        A = self.model.A
        assert self.model.row_labels == [(0, 0), (0, 1), (1, 0), (1, 1)]
        for i in range(4):
            for j in range(9):
                assert A[i][j] == REF_A[i][self.perm(j)]

    def test_RS_spans_reference_system(self):
        mine = self.model.R
        ref = [[rat(row[self.perm(j)]) for j in range(9)] for row in REF_RS]
        assert same_row_space(mine, ref)
        assert rank(mine) == 2

    def test_column_sums_one(self):
        spec = static_spec([[0, 4], [0, 3], [0, 2], [0, 1]])
        model = build_static(static_patches(spec), spec)
        assert all(s == 1 for s in col_sums(model.A))

    def test_R_rows_sum_zero(self):
        for row in self.model.R:
            assert sum(row) == 0
        # the uniform distribution satisfies every restriction
        n = len(self.model.col_labels)
        assert all(sum(row) * Rat(1, n) == 0 for row in self.model.R)

    def test_exchangeable_rows(self):
        spec = static_spec([[0, 0], [1, 2]], restriction="Exchangeable")
        model = build_static(static_patches(spec), spec)
        # |F|(|F|-1)/2 distinct swap rows at T=2 after sign dedup
        assert len(model.R) == 3
        for row in model.R:
            assert sorted(row) == [-1] + [0] * 7 + [1]

    def test_empty_patches_rejected(self):
        with pytest.raises(ValueError):
            build_static([], self.spec)


class TestPExchangeable:
    def test_three_patches(self):
        spec = static_spec([[0, 0], [0, 1], [0, 2]])
        pts = static_patches(spec)
        P = build_P_exchangeable(pts, 2)
        n = len(pts)
        assert len(P) == n * (n + 1) // 2
        sums = sorted(sum(row) for row in P)
        assert sums == [1] * n + [2] * (n * (n - 1) // 2)

    def test_single_patch(self):
        spec = static_spec([[0, 0], [1, 1]])
        pts = static_patches(spec)[:1]
        assert build_P_exchangeable(pts, 2) == [[1]]

    def test_t3_two_patches(self):
        spec = static_spec([[0, 0], [1, 2]])
        pts = static_patches(spec)[:2]
        P = build_P_exchangeable(pts, 3)
        assert len(P) == 4
        assert sorted(sum(row) for row in P) == [1, 1, 3, 3]

    def test_rows_lie_in_exchangeable_kernel(self):
        spec = static_spec([[0, 0], [0, 1], [0, 2]], restriction="Exchangeable")
        model = build_model(spec)
        for prow in model.P_E:
            for rrow in model.R:
                assert sum(a * b for a, b in zip(rrow, prow)) == 0

    def test_kernel_points_are_conic_combinations(self):
        spec = static_spec([[0, 0], [0, 1], [0, 2]], restriction="Exchangeable")
        model = build_model(spec)
        import random

        rnd = random.Random(3)
        ncols = len(model.col_labels)
        npatch = len(model.patches)
        for _ in range(5):
            raw = [rat(rnd.randint(0, 9)) for _ in range(ncols)]
            # symmetrize: average over the transposition orbit
            q = [
                (raw[a * npatch + b] + raw[b * npatch + a]) / 2
                for a in range(npatch)
                for b in range(npatch)
            ]
            assert all(sum(r * x for r, x in zip(row, q)) == 0 for row in model.R)
            # q must be a nonnegative combination of the P_E rows
            k = len(model.P_E)
            lp = LinearProgram(
                sense="min",
                c=[Rat(0)] * k,
                rows=[[model.P_E[i][j] for i in range(k)] for j in range(ncols)],
                senses=[EQ] * ncols,
                b=q,
                bounds=[(0, None)] * k,
            )
            assert solve_lp(lp).status == OPTIMAL


class TestDynCond:
    def test_example4_shape_and_sums(self):
        model = build_dyn_cond(patches_for(EX4), EX4)
        assert len(model.A) == 16
        assert len(model.A[0]) == 48 * 48
        assert all(s == 1 for s in col_sums(model.A))
        assert len(model.R) == 48
        for row in model.R:
            assert sum(row) == 0

    def test_gamma_zero_collapse(self):
        spec = ModelSpec(
            family=DYN_COND, D=3, T=2, v=[[0, 2], [0, 1], [0, 0]], gamma=0, y0=1
        )
        dyn = build_dyn_cond(patches_for(spec), spec)
        sspec = static_spec(spec.v)
        stat = build_static(static_patches(sspec), sspec)
        # map each dynamic patch to its static image
        smap = {}
        for k, p in enumerate(dyn.patches):
            c, C = p.payload
            smap[k] = (c, C[0][0])
        sindex = {p.payload: k for k, p in enumerate(stat.patches)}
        for j, reg in enumerate(dyn.col_labels):
            sreg = tuple(
                sindex[smap[f]] if t == 0 else sindex[smap[f]]
                for t, f in enumerate(reg)
            )
            sj = stat.col_labels.index(sreg)
            assert [row[j] for row in dyn.A] == [row[sj] for row in stat.A]


class TestDynUncond:
    def test_kpt_shape_and_labels(self):
        model = build_dyn_uncond(patches_for(KPT), KPT)
        assert len(model.A) == 8
        assert model.row_labels[0] == (0, 0, 0)
        assert model.row_labels[-1] == (1, 1, 1)
        assert len(model.A[0]) == 2 * 25
        assert all(s == 1 for s in col_sums(model.A))
        assert model.col_labels[0][0] == 0 and model.col_labels[-1][0] == 1

    def test_kpt_restriction_annihilates_uniform(self):
        model = build_dyn_uncond(patches_for(KPT), KPT)
        for row in model.R:
            assert sum(row) == 0

    def test_gamma_zero_marginalizes_to_static(self):
        spec = ModelSpec(family=DYN_UNCOND, D=2, T=2, v=[[0, 0], [1, 2]], gamma=0)
        dyn = build_dyn_uncond(patches_for(spec), spec)
        sspec = static_spec(spec.v)
        stat = build_static(static_patches(sspec), sspec)
        ncols = len(stat.col_labels)
        # summing the two initial-condition rows of each block recovers static A
        for j in range(ncols):
            for r, lab in enumerate(stat.row_labels):
                got = sum(
                    dyn.A[i][g * ncols + j]
                    for g in range(2)
                    for i, dl in enumerate(dyn.row_labels)
                    if dl[1:] == lab and dl[0] == g
                )
                # each initial-condition block contributes one copy
                assert got == 2 * stat.A[r][j]


class TestAR2:
    def test_shape(self):
        model = build_ar2(patches_for(AR2_SPEC), AR2_SPEC)
        assert len(model.A) == 8
        assert len(model.A[0]) == 512
        assert all(s == 1 for s in col_sums(model.A))

    def test_restriction_rows(self):
        model = build_ar2(patches_for(AR2_SPEC), AR2_SPEC)
        assert len(model.R) == 16
        for row in model.R:
            assert sum(row) == 0


class TestInvariants:
    def test_probability_image(self):
        import random

        rnd = random.Random(11)
        spec = static_spec([[0, 0], [0, 1], [0, 3]])
        model = build_static(static_patches(spec), spec)
        n = len(model.patches)
        for _ in range(5):
            raw = [Rat(rnd.randint(0, 9), 10) for _ in range(n * n)]
            q = [
                (raw[a * n + b] + raw[b * n + a]) / 2
                for a in range(n)
                for b in range(n)
            ]
            total = sum(q)
            if total == 0:
                continue
            q = [x / total for x in q]
            assert all(sum(r * x for r, x in zip(row, q)) == 0 for row in model.R)
            p = [sum(a * x for a, x in zip(row, q)) for row in model.A]
            assert sum(p) == 1 and all(x >= 0 for x in p)

    def test_triplet_serialization(self):
        spec = static_spec([[0, 0], [1, 2]])
        model = build_static(static_patches(spec), spec)
        trip = model.to_triplets()
        assert len(trip["A"]) == 9  # one unit entry per column
        assert all(v == "1" for _, _, v in trip["A"])
