import json

import numpy as np
import pytest

from ic_extend.errors import ColumnUncovered, DimensionMismatch, FieldMismatch, FormatError, InvalidPattern, InvalidProblem, RowOneCount
from ic_extend.gf_core import GF2, FieldSpec, Mat, identity
from ic_extend.problem import (
    FittingMatrix,
    ICProblem,
    PatternEntry,
    Receiver,
    XPattern,
    block_pattern,
    fits,
    fits_x,
    format_pattern,
    from_problem,
    is_valid,
    load_problem,
    parse_pattern,
    problem_from_json,
    problem_to_json,
    random_fitting,
    to_problem,
    validate,
    widen,
    x_relax,
)

EXAMPLE_ROW = "1 0 0 0 0 X 0 0 X X 0 X"


def test_validate_accepts_golden_example(example1_fx):
    validate(example1_fx)
    assert example1_fx.L >= example1_fx.K


def test_validate_reports_uncovered_column():
    with pytest.raises(ColumnUncovered) as exc:
        validate(FittingMatrix.from_rows(["1 0", "1 0"]))
    assert exc.value.column == 2


def test_validate_reports_row_one_count():
    with pytest.raises(RowOneCount) as exc:
        validate(FittingMatrix.from_rows(["1 1"]))
    assert exc.value.row == 1 and exc.value.count == 2
    assert not is_valid(FittingMatrix.from_rows(["0 X", "1 1"]))


def test_to_problem_reads_demand_and_side(example1_fx):
    p = to_problem(example1_fx)
    assert p.receivers[0] == Receiver(1, frozenset({6, 9, 10, 12}))
    assert p.L == 12 and p.K == 12


def test_single_message_problem():
    p = to_problem(FittingMatrix.from_rows(["1"]))
    assert p.receivers == (Receiver(1, frozenset()),)
    assert from_problem(p) == FittingMatrix.from_rows(["1"])


def test_problem_round_trip_random():
    rng = np.random.default_rng(5)
    for _ in range(30):
        f = random_fitting(5, 5, 0.4, rng)
        assert from_problem(to_problem(f)) == f


def test_from_problem_rejects_demand_in_side():
    with pytest.raises(InvalidProblem):
        from_problem(ICProblem(K=1, field=GF2, receivers=(Receiver(1, frozenset({1})),)))


def test_x_relax():
    assert x_relax(FittingMatrix.from_rows(["1"])) == XPattern.from_rows(["X"])
    relaxed = x_relax(FittingMatrix.from_rows([EXAMPLE_ROW]))
    assert format_pattern(relaxed).splitlines()[1] == "X 0 0 0 0 X 0 0 X X 0 X"
    x = XPattern.from_rows(["X 0", "0 X"])
    assert x_relax(x) == x


def test_fits_strict_semantics():
    diag = FittingMatrix.from_rows(["1 0", "0 1"])
    assert fits(identity(2), diag)
    assert not fits(Mat.from_rows([[0, 0], [0, 1]]), diag)
    all_star = FittingMatrix.from_rows(["1 X", "X 1"])
    assert fits(Mat.from_rows([[1, 1], [1, 1]]), all_star)
    # One 处必须恰为 1
    assert not fits(Mat.from_rows([[2, 0], [0, 1]], FieldSpec(3)), diag)


def test_fits_x_and_relax_implication():
    x = XPattern.from_rows(["X 0", "0 X"])
    assert fits_x(Mat.from_rows([[0, 0], [0, 0]]), x)
    assert not fits_x(Mat.from_rows([[0, 1], [0, 0]]), x)
    rng = np.random.default_rng(3)
    for field in (GF2, FieldSpec(3)):
        for _ in range(30):
            f = random_fitting(4, 3, 0.5, rng)
            # 补全：1 处取 1，0 处取 0，X 处随机
            data = np.where(f.grid == PatternEntry.ONE, 1, 0)
            stars = f.grid == PatternEntry.STAR
            data[stars] = rng.integers(0, field.p, size=int(stars.sum()))
            m = Mat(field, data)
            assert fits(m, f)
            assert fits_x(m, x_relax(f))
            zeros = np.argwhere(f.grid == PatternEntry.ZERO)
            if len(zeros):
                i, j = zeros[0]
                bad = data.copy()
                bad[i, j] = 1
                assert not fits(Mat(field, bad), f)
                assert not fits_x(Mat(field, bad), x_relax(f))


def test_fits_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        fits(identity(3), FittingMatrix.from_rows(["1 0", "0 1"]))


def test_widen_adds_stars_and_keeps_demands():
    f = FittingMatrix.from_rows(["1 0", "0 1"])
    assert widen(f, [(1, 2)]) == FittingMatrix.from_rows(["1 X", "0 1"])
    with pytest.raises(InvalidPattern):
        widen(f, [(2, 2)])
    with pytest.raises(DimensionMismatch):
        widen(f, [(3, 1)])


def test_block_pattern_assembles_replication():
    f = FittingMatrix.from_rows(["1"])
    ext = block_pattern([[f, x_relax(f)], [x_relax(f), f]])
    assert ext == FittingMatrix.from_rows(["1 X", "X 1"])


def test_parse_pattern_kinds():
    assert isinstance(parse_pattern("1 2\nX 0\n"), XPattern)
    f = parse_pattern("2 2\n1 X\n0 1\n")
    assert isinstance(f, FittingMatrix)
    assert format_pattern(f) == "2 2\n1 X\n0 1\n"
    with pytest.raises(FormatError):
        parse_pattern("2 2\n1 X\n")
    with pytest.raises(FormatError):
        parse_pattern("1 2\n1 Y\n")


def test_json_multi_demand_receivers():
    obj = {"K": 2, "p": 2, "receivers": [{"demand": [1, 2], "side": []}]}
    p = problem_from_json(obj)
    assert p.L == 2
    assert [r.demand for r in p.receivers] == [1, 2]
    assert problem_to_json(p)["receivers"][1] == {"demand": 2, "side": []}


def test_load_problem_sniffs_format(tmp_path):
    text_path = tmp_path / "p.fx"
    text_path.write_text("2 2\n1 X\nX 1\n", encoding="utf-8")
    f, field = load_problem(str(text_path))
    assert field == GF2 and f.L == 2

    json_path = tmp_path / "p.json"
    obj = {"K": 2, "p": 3, "receivers": [{"demand": 1, "side": [2]}, {"demand": 2, "side": [1]}]}
    json_path.write_text(json.dumps(obj), encoding="utf-8")
    g, field = load_problem(str(json_path))
    assert field == FieldSpec(3)
    assert g == f
    with pytest.raises(FieldMismatch):
        load_problem(str(json_path), GF2)


def test_random_fitting_is_valid():
    rng = np.random.default_rng(0)
    for L, K in [(3, 3), (7, 5), (4, 1)]:
        f = random_fitting(L, K, 0.3, rng)
        validate(f)
        assert (f.grid == PatternEntry.ONE).sum() == L
