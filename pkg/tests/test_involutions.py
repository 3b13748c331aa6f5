import numpy as np
import pytest

from ic_extend.errors import DimensionMismatch, FormatError, InvalidPermutation, NotInvolutory
from ic_extend.gf_core import GF2, FieldSpec, Mat, identity, mat_mul, transpose, zeros
from ic_extend.involutions import (
    InvolutoryPermutation,
    Permutation,
    commutes,
    commuting_y,
    cycles,
    fixed_point_projector,
    format_cycles,
    from_matrix,
    involutions,
    is_involutory,
    is_involutory_matrix,
    parse_cycles,
    parse_involution,
    random_involution,
    random_permutation,
    to_matrix,
)

P_132_46_5 = Mat.from_rows(
    [
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 1, 0, 0],
    ]
)
C_13_2 = Mat.from_rows([[0, 0, 1], [0, 1, 0], [1, 0, 0]])


def test_to_matrix_examples():
    assert to_matrix(Permutation.identity(4)) == identity(4)
    sigma = parse_cycles("(132)(46)(5)")
    assert sigma(1) == 3
    assert to_matrix(sigma) == P_132_46_5
    assert to_matrix(parse_involution("(13)(2)")) == C_13_2


def test_cycles_are_canonical():
    assert format_cycles(Permutation.identity(3)) == "(1)(2)(3)"
    assert format_cycles(from_matrix(P_132_46_5)) == "(132)(46)(5)"
    assert cycles(from_matrix(P_132_46_5)) == [(1, 3, 2), (4, 6), (5,)]


def test_cycle_grammar_variants():
    spaced = parse_cycles("(1 4)(2 3)(5)(6)(7)")
    assert parse_cycles("(14)(23)", 7) == spaced
    assert parse_cycles("(1,4)(2,3)", 7) == spaced
    assert from_matrix(to_matrix(spaced)) == spaced
    assert format_cycles(parse_cycles("(1 10)", 10)) == "(1 10)(2)(3)(4)(5)(6)(7)(8)(9)"


@pytest.mark.parametrize("text", ["(12", "1(2)", "()", "(1a)", "(12)(2)"])
def test_cycle_grammar_errors(text):
    with pytest.raises((FormatError, InvalidPermutation)):
        parse_cycles(text)


def test_is_involutory_examples():
    assert is_involutory(parse_cycles("(13)(2)"))
    assert not is_involutory(parse_cycles("(132)(46)(5)"))
    assert is_involutory(Permutation.identity(5))
    with pytest.raises(NotInvolutory):
        parse_involution("(132)")


def test_is_involutory_matches_matrix_square():
    rng = np.random.default_rng(0)
    for r in range(1, 11):
        for _ in range(10):
            p = random_permutation(r, rng)
            assert is_involutory(p) == is_involutory_matrix(to_matrix(p))


def test_involution_enumeration_counts():
    # 对合的个数满足 a(r) = a(r-1) + (r-1) a(r-2)
    expected = [1, 2, 4, 10, 26, 76]
    for r, count in enumerate(expected, 1):
        found = list(involutions(r))
        assert len(found) == count
        assert len(set(found)) == count


def test_fixed_point_projector_examples():
    assert fixed_point_projector(parse_involution("(13)(2)")) == Mat.from_rows([[0, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert fixed_point_projector(InvolutoryPermutation.identity(3)) == identity(3)
    assert fixed_point_projector(parse_involution("(12)(34)")) == zeros(4, 4)


def test_commuting_y_examples():
    assert commuting_y(parse_involution("(13)(2)")) == Mat.from_rows([[1, 0, 1], [0, 1, 0], [1, 0, 1]])
    assert commuting_y(InvolutoryPermutation.identity(4)) == identity(4)


def test_centralizer_identities_for_random_involutions():
    rng = np.random.default_rng(8)
    for field in (GF2, FieldSpec(5)):
        for r in range(1, 9):
            for _ in range(5):
                sigma = random_involution(r, rng)
                c = to_matrix(sigma, field)
                c1 = fixed_point_projector(sigma, field)
                y = commuting_y(sigma, field)
                assert commutes(y, c)
                assert mat_mul(c, c1) == c1 and mat_mul(c1, c) == c1
                assert transpose(c) == c
                assert is_involutory_matrix(c)


def test_commutes_examples():
    c = C_13_2
    assert commutes(identity(3), c)
    assert commutes(commuting_y(parse_involution("(13)(2)")), c)
    swap = to_matrix(parse_involution("(12)"))
    assert not commutes(Mat.from_rows([[1, 1], [0, 1]]), swap)
    with pytest.raises(DimensionMismatch):
        commutes(identity(2), c)


def test_permutation_validation():
    with pytest.raises(InvalidPermutation):
        Permutation((1, 1, 2))
    with pytest.raises(InvalidPermutation):
        from_matrix(Mat.from_rows([[1, 1], [0, 0]]))
    assert parse_involution("(13)", 3).fixed_points == (2,)
    assert parse_involution("(13)(2)").swaps == ((1, 3),)
