import dataclasses

import numpy as np
import pytest

from ic_extend.config import ToolkitConfig
from ic_extend.errors import ContainmentViolation, RankOutOfRange, ResourceGuardExceeded
from ic_extend.extensions import replicate_extension
from ic_extend.gf_core import GF2, FieldSpec, Mat, identity, mat_rank
from ic_extend.minrank import (
    brute_force_minrank,
    certify_rank_invariance,
    gaussian_binomial,
    is_achievable,
    iter_rref_bases,
    minrank,
    minrank_lower_bound_submatrix,
)
from ic_extend.problem import FittingMatrix, PatternEntry, random_fitting
from ic_extend.verifier import verify_code

CFG = ToolkitConfig(progress=False)


def _random_small(rng, max_stars=10):
    while True:
        K = int(rng.integers(1, 6))
        L = int(rng.integers(K, min(K + 3, 7) + 1))
        f = random_fitting(L, K, float(rng.uniform(0.2, 0.6)), rng)
        if (f.grid == PatternEntry.STAR).sum() <= max_stars:
            return f


def test_gaussian_binomial_values():
    assert gaussian_binomial(12, 1, 2) == 4095
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 0, 5) == 1
    assert gaussian_binomial(3, 4, 2) == 0


def test_rref_enumeration_counts_every_subspace_once():
    for K, r, p in [(4, 2, 2), (3, 1, 3), (3, 2, 3)]:
        bases = list(iter_rref_bases(K, r, FieldSpec(p)))
        assert len(bases) == gaussian_binomial(K, r, p)
        assert len({b for b in bases}) == len(bases)
        assert all(mat_rank(b) == r for b in bases)


def test_rref_enumeration_order():
    first, second = list(iter_rref_bases(3, 1))[:2]
    assert first == Mat.from_rows([[1, 0, 0]])
    assert second == Mat.from_rows([[1, 0, 1]])


def test_identity_pattern_needs_full_rank():
    f = FittingMatrix.from_rows(["1 0 0", "0 1 0", "0 0 1"])
    result = minrank(f, config=CFG)
    assert result.value == 3
    assert result.certificate == (True, True)
    assert result.witness == identity(3)
    assert is_achievable(f, 2, config=CFG) is None


def test_all_star_pattern_has_rank_one():
    f = FittingMatrix.from_rows(["1 X X", "X 1 X", "X X 1"])
    assert is_achievable(f, 1, config=CFG) == Mat.from_rows([[1, 1, 1]])
    assert minrank(f, config=CFG).value == 1


def test_rank_out_of_range():
    f = FittingMatrix.from_rows(["1 0", "0 1"])
    with pytest.raises(RankOutOfRange):
        is_achievable(f, 3, config=CFG)
    with pytest.raises(RankOutOfRange):
        is_achievable(f, 0, config=CFG)


def test_resource_guard():
    f = FittingMatrix.from_rows(["1 0 0", "0 1 0", "0 0 1"])
    with pytest.raises(ResourceGuardExceeded) as exc:
        minrank(f, config=dataclasses.replace(CFG, subspace_guard=5))
    assert exc.value.count == 7


def test_max_rank_cap():
    f = FittingMatrix.from_rows(["1 0 0", "0 1 0", "0 0 1"])
    assert minrank(f, config=CFG, max_rank=2) is None


def test_fallback_without_cover_table_agrees():
    rng = np.random.default_rng(17)
    small_table = dataclasses.replace(CFG, cover_table_limit=1)
    for _ in range(15):
        f = _random_small(rng)
        a = minrank(f, config=CFG)
        b = minrank(f, config=small_table)
        assert a.value == b.value
        assert a.witness == b.witness


def test_oracle_matches_brute_force():
    rng = np.random.default_rng(2023)
    for _ in range(100):
        f = _random_small(rng)
        result = minrank(f, config=CFG)
        assert result.value == brute_force_minrank(f, config=CFG)
        assert result.witness.rows == result.value
        assert verify_code(result.witness, f)


def test_oracle_matches_brute_force_over_gf3():
    rng = np.random.default_rng(5)
    gf3 = FieldSpec(3)
    for _ in range(20):
        f = _random_small(rng, max_stars=6)
        assert minrank(f, gf3, CFG).value == brute_force_minrank(f, gf3, CFG)


def test_removing_a_star_never_lowers_minrank():
    rng = np.random.default_rng(99)
    for _ in range(20):
        f = _random_small(rng)
        stars = np.argwhere(f.grid == PatternEntry.STAR)
        if not len(stars):
            continue
        i, j = stars[0]
        grid = np.array(f.grid)
        grid[i, j] = PatternEntry.ZERO
        assert minrank(FittingMatrix(grid), config=CFG).value >= minrank(f, config=CFG).value


def test_workers_give_identical_results():
    rng = np.random.default_rng(4)
    pooled = dataclasses.replace(CFG, workers=2)
    for _ in range(3):
        f = _random_small(rng)
        a = minrank(f, config=CFG)
        b = minrank(f, config=pooled)
        assert (a.value, a.witness, a.certificate) == (b.value, b.witness, b.certificate)


def test_lower_bound_containment():
    f = FittingMatrix.from_rows(["1 X", "0 1"])
    ext = replicate_extension(f, identity(2), 2)
    assert minrank_lower_bound_submatrix(ext.f_ext, f)
    other = FittingMatrix.from_rows(["1 0", "X 1"])
    with pytest.raises(ContainmentViolation):
        minrank_lower_bound_submatrix(ext.f_ext, other)
    with pytest.raises(ContainmentViolation):
        minrank_lower_bound_submatrix(f, ext.f_ext)


def test_certify_rank_invariance_of_replication():
    f = FittingMatrix.from_rows(["1 X 0", "X 1 0", "0 0 1"])
    seed = minrank(f, config=CFG)
    assert seed.value == 2
    ext = replicate_extension(f, seed.witness, 3)
    assert certify_rank_invariance(f, ext.f_ext, ext.g_ext, seed.value)
    assert not certify_rank_invariance(f, ext.f_ext, ext.g_ext, seed.value + 1)


def test_golden_example_rank_one_is_infeasible(example1_fx):
    assert is_achievable(example1_fx, 1, config=CFG) is None


@pytest.mark.slow
def test_golden_example_minrank_is_three(example1_fx, example1_code):
    result = minrank(example1_fx, GF2, CFG)
    assert result.value == 3
    assert result.certificate == (True, True)
    assert verify_code(result.witness, example1_fx)
    assert verify_code(example1_code, example1_fx)
