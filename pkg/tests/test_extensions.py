import numpy as np
import pytest

from ic_extend.config import ToolkitConfig
from ic_extend.errors import (
    CommutationViolation,
    FieldMismatch,
    FormatError,
    InvalidCode,
    LayoutMismatch,
    NotInvolutory,
    RankDeficient,
)
from ic_extend.extensions import (
    BlockLayout,
    derive_bxx,
    involutory_block_extension,
    parse_block_layout,
    recover_involution,
    replicate_extension,
    stacked_code,
    structured_bxx,
    systematic_extension,
    systematic_form,
    two_order_code,
)
from ic_extend.gf_core import GF2, FieldSpec, Mat, identity, mat_mul, mat_rank, random_mat
from ic_extend.involutions import InvolutoryPermutation, parse_involution, random_involution, to_matrix
from ic_extend.minrank import certify_rank_invariance, minrank
from ic_extend.problem import FittingMatrix, PatternEntry, XPattern, random_fitting, x_relax
from ic_extend.verifier import verify_code

CFG = ToolkitConfig(progress=False)


def _full_row_rank(r, K, field, rng):
    while True:
        g = random_mat(r, K, field, rng)
        if mat_rank(g) == r:
            return g


def test_replicate_smallest_case():
    f = FittingMatrix.from_rows(["1"])
    res = replicate_extension(f, Mat.from_rows([[1]]), 2)
    assert res.f_ext == FittingMatrix.from_rows(["1 X", "X 1"])
    assert res.g_ext == Mat.from_rows([[1, 1]])


def test_replicate_order_one_is_identity():
    f = FittingMatrix.from_rows(["1 X", "X 1"])
    g = Mat.from_rows([[1, 1]])
    res = replicate_extension(f, g, 1)
    assert res.f_ext == f and res.g_ext == g


def test_replicate_golden_example(example1_fx, example1_code):
    res = replicate_extension(example1_fx, example1_code, 2)
    assert res.f_ext.L == 24 and res.f_ext.K == 24
    assert np.array_equal(res.f_ext.grid[:12, 12:], x_relax(example1_fx).grid)
    assert verify_code(res.g_ext, res.f_ext)


def test_replicate_rejects_invalid_seed():
    f = FittingMatrix.from_rows(["1 0", "0 1"])
    with pytest.raises(InvalidCode):
        replicate_extension(f, Mat.from_rows([[1, 1]]), 2)


def test_derive_bxx_identity_c_stays_within_support():
    f = FittingMatrix.from_rows(["1 X 0", "0 1 X", "X 0 1"])
    res = derive_bxx(f, identity(3), identity(3))
    assert not (res.b.grid[f.grid == PatternEntry.ZERO] == PatternEntry.STAR).any()
    assert verify_code(res.g_ext, res.f_ext)


def test_derive_bxx_golden_example(example1_fx, example1_code):
    c = to_matrix(parse_involution("(13)(2)"))
    res = derive_bxx(example1_fx, example1_code, c)
    assert res.g_ext == two_order_code(example1_code, c)
    assert verify_code(res.g_ext, res.f_ext)


def test_derive_bxx_random_swaps():
    rng = np.random.default_rng(12)
    c = to_matrix(parse_involution("(12)(3)(4)"))
    for _ in range(20):
        f = random_fitting(5, 4, 0.4, rng)
        res = derive_bxx(f, identity(4), c)
        assert verify_code(res.g_ext, res.f_ext)


def test_derive_bxx_rejects_non_involution():
    f = FittingMatrix.from_rows(["1 0", "0 1"])
    with pytest.raises(NotInvolutory):
        derive_bxx(f, identity(2), Mat.from_rows([[1, 1], [1, 0]]))


def test_structured_bxx_golden_rows(example1_fx, example1_bxx):
    layout = BlockLayout.consecutive(12, 3, 4)
    b = structured_bxx(example1_fx, layout, parse_involution("(13)(2)"))
    assert b.row(1) == XPattern.from_rows(["0 0 X X 0 0 X 0 0 X 0 X"]).row(1)
    assert b == example1_bxx


def test_structured_bxx_degenerate_layouts():
    f = FittingMatrix.from_rows(["1 X 0", "0 1 0", "X 0 1"])
    ident = InvolutoryPermutation.identity(3)
    assert structured_bxx(f, BlockLayout(3, 3, ((1, 2, 3),)), ident) == x_relax(f)
    empty = structured_bxx(f, BlockLayout(3, 3, ()), ident)
    assert (empty.grid == PatternEntry.STAR).all()


def test_structured_bxx_size_mismatch():
    f = FittingMatrix.from_rows(["1 0", "0 1"])
    with pytest.raises(LayoutMismatch):
        structured_bxx(f, BlockLayout(2, 2, ((1, 2),)), parse_involution("(13)(2)"))


def test_involutory_block_extension_requires_commuting_blocks():
    f = FittingMatrix.from_rows(["1 X X", "X 1 X", "X X 1"])
    g = Mat.from_rows([[1, 1, 0], [0, 1, 1]])
    with pytest.raises(CommutationViolation) as exc:
        involutory_block_extension(f, g, BlockLayout(3, 2, ((1, 2),)), parse_involution("(12)"))
    assert exc.value.block == 1


def test_involutory_identity_matches_replication():
    f = FittingMatrix.from_rows(["1 X 0", "X 1 0", "0 0 1"])
    g = Mat.from_rows([[1, 1, 0], [0, 0, 1]])
    rep = replicate_extension(f, g, 2)
    inv = involutory_block_extension(f, g, BlockLayout(3, 2, ((1, 3),)), InvolutoryPermutation.identity(2))
    assert inv.g_ext == rep.g_ext
    assert verify_code(inv.g_ext, inv.f_ext)


def test_systematic_form_pivots():
    g = Mat.from_rows([[0, 1, 1, 0], [0, 1, 0, 1]])
    reduced, pivots = systematic_form(g)
    assert pivots == (1, 2)
    with pytest.raises(RankDeficient):
        systematic_form(Mat.from_rows([[1, 1], [1, 1]]))


def test_systematic_extension_identity_c_pattern():
    f = FittingMatrix.from_rows(["1 X 0", "X 1 0", "0 0 1"])
    g = Mat.from_rows([[1, 1, 0], [0, 0, 1]])
    res = systematic_extension(f, g, InvolutoryPermutation.identity(2))
    # 主元列 1、3 保留 F_X 的模式（1→X），其余列全 X
    assert res.b == XPattern.from_rows(["X X 0", "X X 0", "0 X X"])


def test_rank_invariance_sweep():
    rng = np.random.default_rng(31)
    seen_k = set()
    for _ in range(200):
        K = int(rng.integers(1, 6))
        f = random_fitting(int(rng.integers(K, min(K + 2, 7) + 1)), K, 0.4, rng)
        seen_k.add(K)
        seed = minrank(f, config=CFG)
        for m in (2, 3):
            rep = replicate_extension(f, seed.witness, m)
            assert certify_rank_invariance(f, rep.f_ext, rep.g_ext, seed.value)
        sigma = random_involution(seed.value, rng)
        sys_ext = systematic_extension(f, seed.witness, sigma)
        assert certify_rank_invariance(f, sys_ext.f_ext, sys_ext.g_ext, seed.value)
        assert sys_ext.g_ext.rows == seed.value
    assert seen_k == {1, 2, 3, 4, 5}


def test_stacked_code_keeps_rank():
    rng = np.random.default_rng(6)
    for _ in range(30):
        g = _full_row_rank(3, 6, GF2, rng)
        c = to_matrix(random_involution(3, rng))
        assert mat_rank(stacked_code(g, c)) == mat_rank(g)


def test_recover_involution_contract():
    rng = np.random.default_rng(77)
    for field in (GF2, FieldSpec(3)):
        for _ in range(50):
            r = int(rng.integers(1, 5))
            g = _full_row_rank(r, r + int(rng.integers(0, 4)), field, rng)
            c0 = to_matrix(random_involution(r, rng), field)
            a = mat_mul(c0, g)
            c = recover_involution(g, a)
            assert c is not None
            assert mat_mul(c, c) == identity(r, field)
            assert mat_mul(c, g) == a


def test_recover_involution_trivial_and_absent():
    g = Mat.from_rows([[1, 0, 1], [0, 1, 1]])
    assert recover_involution(g, g) == identity(2)
    assert recover_involution(g, Mat.from_rows([[1, 0, 0], [0, 0, 1]])) is None


def test_recover_involution_field_mismatch():
    g = Mat.from_rows([[1, 0, 1], [0, 1, 1]])
    with pytest.raises(FieldMismatch):
        recover_involution(g, Mat.from_rows([[1, 0, 1], [0, 1, 1]], FieldSpec(3)))


def test_parse_block_layout_forms():
    layout = parse_block_layout("1-3,4-6,7-9,10-12", 12)
    assert layout == BlockLayout.consecutive(12, 3, 4)
    explicit = parse_block_layout("1,3,5;2,4,6", 6)
    assert explicit.blocks == ((1, 3, 5), (2, 4, 6))
    assert explicit.residual == ()
    with pytest.raises(LayoutMismatch):
        parse_block_layout("1-3,3-5", 6)
    with pytest.raises(FormatError):
        parse_block_layout("a-b", 6)
