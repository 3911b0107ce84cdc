"""Fast pair statistics vs. the brute-force oracle, plus scalar fixtures."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankindep.errors import NotAPermutation, SampleSmallerThanArity
from rankindep.kernels import brute_ustat
from rankindep.paircorr import (
    MIN_N,
    CorrelationKind,
    bdy_taustar_pair,
    bkr_r_pair,
    generic_linear_rank_pair,
    hoeffding_d_pair,
    kendall_pair,
    oracle_kernel_kind,
    spearman_pair,
    stat_matrix,
)
from rankindep.ranks import RankedPair

U_KINDS = [
    CorrelationKind.KENDALL_TAU,
    CorrelationKind.HOEFFDING_D,
    CorrelationKind.BKR_R,
    CorrelationKind.BDY_TAU_STAR,
]

PAIR_FN = {
    CorrelationKind.KENDALL_TAU: kendall_pair,
    CorrelationKind.HOEFFDING_D: hoeffding_d_pair,
    CorrelationKind.BKR_R: bkr_r_pair,
    CorrelationKind.BDY_TAU_STAR: bdy_taustar_pair,
}


def random_ranked(rng, n, p, q):
    rx = np.column_stack([rng.permutation(n) + 1 for _ in range(p)])
    ry = np.column_stack([rng.permutation(n) + 1 for _ in range(q)])
    return RankedPair(
        np.ascontiguousarray(rx, dtype=np.int64),
        np.ascontiguousarray(ry, dtype=np.int64),
        np.zeros(p, dtype=bool),
        np.zeros(q, dtype=bool),
    )


# ---------------------------------------------------------------------------
# Spearman and the generic linear rank statistic


def test_spearman_concordant_and_reversed():
    assert spearman_pair([1, 2, 3]) == 1.0
    assert spearman_pair([3, 2, 1]) == -1.0


def test_spearman_hand_value():
    # 12/24 * [(-1)(0) + (0)(-1) + (1)(1)] for joint (2,1,3)
    assert spearman_pair([2, 1, 3]) == 0.5


def test_spearman_rejects_non_permutation():
    with pytest.raises(NotAPermutation):
        spearman_pair([1, 1, 3])
    with pytest.raises(NotAPermutation):
        spearman_pair([0, 1, 2])


def test_generic_identity_scores():
    n = 5
    got = generic_linear_rank_pair(np.arange(1, n + 1), lambda u: u, lambda u: u)
    want = sum(Fraction(k, n + 1) ** 2 for k in range(1, n + 1)) / n
    assert math.isclose(got, float(want), rel_tol=0, abs_tol=1e-15)


def test_generic_centered_linear_two_points():
    # hand evaluation: (1/2)[(1/3-1/2)(2/3-1/2) + (2/3-1/2)(1/3-1/2)] = -1/36,
    # which also equals spearman * (n-1)/(12(n+1)) = -1/36 at n=2
    got = generic_linear_rank_pair([2, 1], lambda u: u - 0.5, lambda u: u - 0.5)
    assert math.isclose(got, -1.0 / 36.0, rel_tol=0, abs_tol=1e-16)


def test_generic_constant_score_ignores_joint():
    f = lambda u: 2.0 * u + 1.0  # noqa: E731
    g = lambda u: 0.7  # noqa: E731
    a = generic_linear_rank_pair([1, 2, 3, 4], f, g)
    b = generic_linear_rank_pair([4, 1, 3, 2], f, g)
    assert a == b
    fbar = sum(f(k / 5) for k in range(1, 5)) / 4
    assert math.isclose(a, fbar * 0.7, rel_tol=1e-14)


def test_generic_centered_linear_matches_spearman_normalization():
    rng = np.random.default_rng(20240)
    for n in (2, 3, 5, 9, 17):
        joint = rng.permutation(n) + 1
        lin = generic_linear_rank_pair(joint, lambda u: u - 0.5, lambda u: u - 0.5)
        rho = spearman_pair(joint)
        assert math.isclose(lin * 12 * (n + 1) / (n - 1), rho, rel_tol=0, abs_tol=1e-13)


# ---------------------------------------------------------------------------
# scalar U-statistic fixtures


def test_kendall_fixtures():
    assert kendall_pair([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0
    assert kendall_pair([1, 2, 3, 4], [4, 3, 2, 1]) == -1.0
    got = kendall_pair([1, 2, 3], [3, 1, 2])
    assert math.isclose(got, -1.0 / 3.0, rel_tol=0, abs_tol=1e-15)


def test_hoeffding_identity_matches_oracle():
    r = np.arange(1, 6)
    assert hoeffding_d_pair(r, r) == brute_ustat("hoeffding", r, r) == 1.0


def test_hoeffding_seeded_matches_oracle():
    rng = np.random.default_rng(61)
    x = rng.permutation(6) + 1
    y = rng.permutation(6) + 1
    assert abs(hoeffding_d_pair(x, y) - brute_ustat("hoeffding", x, y)) <= 1e-12


def test_bkr_identity_matches_oracle():
    r = np.arange(1, 7)
    assert bkr_r_pair(r, r) == brute_ustat("bkr", r, r) == 1.0


def test_bkr_seeded_matches_oracle():
    rng = np.random.default_rng(71)
    x = rng.permutation(7) + 1
    y = rng.permutation(7) + 1
    assert abs(bkr_r_pair(x, y) - brute_ustat("bkr", x, y)) <= 1e-12


def test_taustar_identity_matches_oracle():
    r = np.arange(1, 5)
    got = bdy_taustar_pair(r, r)
    assert got == brute_ustat("taustar", r, r)
    assert math.isclose(got, 2.0 / 3.0, rel_tol=0, abs_tol=1e-15)


def test_taustar_seeded_matches_oracle():
    rng = np.random.default_rng(41)
    x = rng.permutation(6) + 1
    y = rng.permutation(6) + 1
    assert abs(bdy_taustar_pair(x, y) - brute_ustat("taustar", x, y)) <= 1e-12


@pytest.mark.parametrize(
    "fn, short",
    [(hoeffding_d_pair, 4), (bkr_r_pair, 5), (bdy_taustar_pair, 3)],
)
def test_arity_guards(fn, short):
    r = np.arange(1, short + 1)
    with pytest.raises(SampleSmallerThanArity):
        fn(r, r)


# ---------------------------------------------------------------------------
# oracle equivalence sweep (trimmed; the acceptance suite runs the full 200)


@pytest.mark.parametrize("kind", U_KINDS)
def test_oracle_equivalence_sweep(kind):
    fn = PAIR_FN[kind]
    kk = oracle_kernel_kind(kind).value
    rng = np.random.default_rng(hash(kind.value) % (2**32))
    for n in range(MIN_N[kind], 9):
        for _ in range(40):
            x = rng.permutation(n) + 1
            y = rng.permutation(n) + 1
            assert abs(fn(x, y) - brute_ustat(kk, x, y)) <= 1e-12


@pytest.mark.parametrize("kind", U_KINDS)
def test_pair_role_symmetry(kind):
    fn = PAIR_FN[kind]
    rng = np.random.default_rng(93)
    for n in (MIN_N[kind], MIN_N[kind] + 3, 12):
        x = rng.permutation(n) + 1
        y = rng.permutation(n) + 1
        assert fn(x, y) == fn(y, x)


@given(st.permutations(list(range(1, 7))), st.permutations(list(range(1, 7))))
@settings(max_examples=25, deadline=None)
def test_kendall_equals_oracle_property(x, y):
    assert abs(kendall_pair(x, y) - brute_ustat("kendall", x, y)) <= 1e-12


# ---------------------------------------------------------------------------
# exact permutation-null mean at n = arity + 1


def _all_permutation_columns(n):
    from itertools import permutations

    cols = np.array(list(permutations(range(1, n + 1))), dtype=np.int64).T
    return np.ascontiguousarray(cols)


@pytest.mark.parametrize(
    "kind, n",
    [
        (CorrelationKind.KENDALL_TAU, 3),
        (CorrelationKind.BDY_TAU_STAR, 5),
        (CorrelationKind.HOEFFDING_D, 6),
        (CorrelationKind.BKR_R, 7),
    ],
)
def test_exact_null_mean_is_zero(kind, n):
    # average over all n! relative pairings: x fixed at identity, y sweeps
    # every permutation; integer numerators must cancel exactly
    rx = np.ascontiguousarray(np.arange(1, n + 1, dtype=np.int64).reshape(-1, 1))
    ry = _all_permutation_columns(n)
    ranked = RankedPair(rx, ry, np.zeros(1, dtype=bool), np.zeros(ry.shape[1], dtype=bool))
    mat = stat_matrix(ranked, kind)
    total = math.fsum(mat.values[0])
    assert abs(total) < 1e-9 * math.factorial(n)
    # and bit-exactly: the sum of numerators over all pairings is an integer 0
    from rankindep import _engines

    if kind is CorrelationKind.KENDALL_TAU:
        inv = _engines.kendall_inversion_matrix(rx, ry)
        nn = n * (n - 1)
        assert int((nn - 4 * inv).sum()) == 0
    elif kind is CorrelationKind.HOEFFDING_D:
        assert int(_engines.hoeffding_numer_matrix(rx, ry).sum()) == 0
    elif kind is CorrelationKind.BKR_R:
        assert int(_engines.bkr_numer_matrix(rx, ry).sum()) == 0
    else:
        match = _engines.taustar_match_matrix(rx, ry)
        c4 = math.comb(n, 4)
        assert int((3 * match - c4).sum()) == 0


# ---------------------------------------------------------------------------
# stat_matrix grid behavior


def test_stat_matrix_single_pair_equals_scalar():
    rng = np.random.default_rng(7)
    ranked = random_ranked(rng, 12, 1, 1)
    for kind in U_KINDS:
        got = stat_matrix(ranked, kind).values[0, 0]
        want = PAIR_FN[kind](ranked.rx[:, 0], ranked.ry[:, 0])
        assert got == want
    rho = stat_matrix(ranked, CorrelationKind.SPEARMAN_RHO).values[0, 0]
    from rankindep.ranks import joint_rank_sequence

    assert rho == spearman_pair(joint_rank_sequence(ranked.rx[:, 0], ranked.ry[:, 0]))


def test_stat_matrix_grid_matches_scalars_bitwise():
    rng = np.random.default_rng(404)
    ranked = random_ranked(rng, 20, 3, 2)
    for kind in U_KINDS:
        mat = stat_matrix(ranked, kind)
        assert mat.values.shape == (3, 2)
        for i in range(3):
            for j in range(2):
                want = PAIR_FN[kind](ranked.rx[:, i], ranked.ry[:, j])
                assert mat.values[i, j] == want


def test_stat_matrix_self_spearman_diagonal():
    rng = np.random.default_rng(11)
    rx = np.column_stack([rng.permutation(15) + 1 for _ in range(4)])
    rx = np.ascontiguousarray(rx, dtype=np.int64)
    ranked = RankedPair(rx, rx.copy(), np.zeros(4, dtype=bool), np.zeros(4, dtype=bool))
    mat = stat_matrix(ranked, CorrelationKind.SPEARMAN_RHO)
    assert np.all(np.diag(mat.values) == 1.0)


def test_stat_matrix_hoeffding_grid_matches_oracle():
    rng = np.random.default_rng(606)
    ranked = random_ranked(rng, 6, 2, 2)
    mat = stat_matrix(ranked, CorrelationKind.HOEFFDING_D)
    for i in range(2):
        for j in range(2):
            want = brute_ustat("hoeffding", ranked.rx[:, i], ranked.ry[:, j])
            assert abs(mat.values[i, j] - want) <= 1e-12


def test_stat_matrix_bounds_for_linear_kinds():
    rng = np.random.default_rng(31)
    ranked = random_ranked(rng, 25, 5, 5)
    for kind in (CorrelationKind.SPEARMAN_RHO, CorrelationKind.KENDALL_TAU):
        v = stat_matrix(ranked, kind).values
        assert np.all(v >= -1.0) and np.all(v <= 1.0)


def test_stat_matrix_arity_guard():
    rng = np.random.default_rng(5)
    ranked = random_ranked(rng, 5, 2, 2)
    with pytest.raises(SampleSmallerThanArity):
        stat_matrix(ranked, CorrelationKind.BKR_R)


def test_stat_matrix_accepts_kind_values():
    rng = np.random.default_rng(8)
    ranked = random_ranked(rng, 8, 1, 1)
    a = stat_matrix(ranked, "kendall").values
    b = stat_matrix(ranked, CorrelationKind.KENDALL_TAU).values
    assert np.array_equal(a, b)


def test_complexity_growth_is_at_most_quadratic():
    import time

    rng = np.random.default_rng(15)
    small = random_ranked(rng, 50, 4, 4)
    big = random_ranked(rng, 100, 4, 4)
    stat_matrix(small, CorrelationKind.BDY_TAU_STAR)  # JIT warm-up
    stat_matrix(big, CorrelationKind.BDY_TAU_STAR)

    def best_of(ranked, reps=5):
        out = math.inf
        for _ in range(reps):
            t0 = time.perf_counter()
            stat_matrix(ranked, CorrelationKind.BDY_TAU_STAR)
            out = min(out, time.perf_counter() - t0)
        return out

    t_small = best_of(small)
    t_big = best_of(big)
    # doubling n should cost at most ~4x; allow generous scheduling slack
    assert t_big <= max(16 * t_small, t_small + 0.05)
