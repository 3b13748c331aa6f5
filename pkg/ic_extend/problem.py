"""
Fitting matrix / IC 问题的数据模型，≈ 关系，以及两种表示之间的转换。

约定：消息下标对外一律 1 起始（与 [1:K] 一致）；内部 numpy 数组 0 起始。
"""
import json
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    ColumnUncovered,
    DimensionMismatch,
    FieldMismatch,
    FormatError,
    InvalidPattern,
    InvalidProblem,
    RowOneCount,
)
from .gf_core import GF2, FieldSpec, Mat
from .logger import get_logger

logger = get_logger()


class PatternEntry(IntEnum):
    ZERO = 0
    ONE = 1
    STAR = 2  # 即 X 占位符

    @property
    def token(self) -> str:
        return _TOKENS[self]


_TOKENS = {PatternEntry.ZERO: "0", PatternEntry.ONE: "1", PatternEntry.STAR: "X"}
_FROM_TOKEN = {"0": PatternEntry.ZERO, "1": PatternEntry.ONE, "X": PatternEntry.STAR, "x": PatternEntry.STAR}


def _frozen_grid(grid) -> np.ndarray:
    arr = np.array(grid, dtype=np.int8, copy=True)
    if arr.ndim != 2:
        raise DimensionMismatch(f"模式矩阵必须是二维: shape={arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() > 2):
        raise InvalidPattern("模式矩阵元素只能是 Zero / One / Star")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class _Pattern:
    grid: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", _frozen_grid(self.grid))

    @property
    def L(self) -> int:
        return int(self.grid.shape[0])

    @property
    def K(self) -> int:
        return int(self.grid.shape[1])

    def entry(self, row: int, col: int) -> PatternEntry:
        """1 起始的 (row, col)。"""
        return PatternEntry(int(self.grid[row - 1, col - 1]))

    def row(self, row: int) -> Tuple[PatternEntry, ...]:
        return tuple(PatternEntry(int(v)) for v in self.grid[row - 1])

    def stars(self) -> List[Tuple[int, int]]:
        return [(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(self.grid == PatternEntry.STAR))]

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return bool(np.array_equal(self.grid, other.grid))

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.grid.shape, self.grid.tobytes()))

    def __str__(self) -> str:
        return format_pattern(self)


class FittingMatrix(_Pattern):
    """L×K 的 {0, 1, X} 网格；合法性由 validate 检查（构造时不强制）。"""

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "FittingMatrix":
        return cls(_grid_from_token_rows(rows))

    def demand(self, row: int) -> int:
        ones = np.flatnonzero(self.grid[row - 1] == PatternEntry.ONE)
        if ones.size != 1:
            raise RowOneCount(row, int(ones.size))
        return int(ones[0]) + 1

    def side(self, row: int) -> FrozenSet[int]:
        return frozenset(int(j) + 1 for j in np.flatnonzero(self.grid[row - 1] == PatternEntry.STAR))

    def zero_columns(self, row: int) -> List[int]:
        return [int(j) + 1 for j in np.flatnonzero(self.grid[row - 1] == PatternEntry.ZERO)]


class XPattern(_Pattern):
    """只含 0 与 X 的 X-fitting 矩阵。"""

    def __post_init__(self):
        super().__post_init__()
        if (self.grid == PatternEntry.ONE).any():
            raise InvalidPattern("X-fitting 矩阵不允许出现 1")

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "XPattern":
        return cls(_grid_from_token_rows(rows))


Pattern = Union[FittingMatrix, XPattern]


@dataclass(frozen=True)
class Receiver:
    demand: int
    side: FrozenSet[int]


@dataclass(frozen=True)
class ICProblem:
    K: int
    field: FieldSpec
    receivers: Tuple[Receiver, ...]

    @property
    def L(self) -> int:
        return len(self.receivers)


# ---------------------------------------------------------------------------
# 校验与转换
# ---------------------------------------------------------------------------

def validate(f: FittingMatrix) -> None:
    """Fitting matrix 定义的两条：每行恰一个 1；每列至少一个 1。"""
    ones = f.grid == PatternEntry.ONE
    row_counts = ones.sum(axis=1)
    for i, cnt in enumerate(row_counts):
        if cnt != 1:
            raise RowOneCount(i + 1, int(cnt))
    col_counts = ones.sum(axis=0)
    for j, cnt in enumerate(col_counts):
        if cnt == 0:
            raise ColumnUncovered(j + 1)


def is_valid(f: FittingMatrix) -> bool:
    try:
        validate(f)
    except InvalidPattern:
        return False
    return True


def validate_problem(p: ICProblem) -> None:
    if p.K < 1:
        raise InvalidProblem(f"消息数必须为正: K={p.K}")
    demanded = set()
    for t, rcv in enumerate(p.receivers, 1):
        if not 1 <= rcv.demand <= p.K:
            raise InvalidProblem(f"接收者 {t} 的需求 {rcv.demand} 超出 [1, {p.K}]")
        bad = [j for j in rcv.side if not 1 <= j <= p.K]
        if bad:
            raise InvalidProblem(f"接收者 {t} 的边信息越界: {sorted(bad)}")
        if rcv.demand in rcv.side:
            raise InvalidProblem(f"接收者 {t} 的需求 {rcv.demand} 出现在边信息中")
        demanded.add(rcv.demand)
    missing = sorted(set(range(1, p.K + 1)) - demanded)
    if missing:
        raise InvalidProblem(f"消息未被任何接收者请求: {missing}")


def to_problem(f: FittingMatrix, field: FieldSpec = GF2) -> ICProblem:
    validate(f)
    receivers = tuple(Receiver(f.demand(t), f.side(t)) for t in range(1, f.L + 1))
    return ICProblem(K=f.K, field=field, receivers=receivers)


def from_problem(p: ICProblem) -> FittingMatrix:
    validate_problem(p)
    grid = np.zeros((p.L, p.K), dtype=np.int8)
    for t, rcv in enumerate(p.receivers):
        grid[t, rcv.demand - 1] = PatternEntry.ONE
        for j in rcv.side:
            grid[t, j - 1] = PatternEntry.STAR
    return FittingMatrix(grid)


def x_relax(f: Pattern) -> XPattern:
    grid = np.array(f.grid)
    grid[grid == PatternEntry.ONE] = PatternEntry.STAR
    return XPattern(grid)


def _check_dims(m: Mat, f: _Pattern) -> None:
    if m.shape != (f.L, f.K):
        raise DimensionMismatch(f"矩阵 {m.shape} 与模式 {(f.L, f.K)} 维度不一致")


def fits(m: Mat, f: FittingMatrix) -> bool:
    """严格补全语义：Zero 处为 0，One 处恰为 1，Star 不约束。"""
    _check_dims(m, f)
    zero_ok = not m.data[f.grid == PatternEntry.ZERO].any()
    one_ok = bool((m.data[f.grid == PatternEntry.ONE] == 1).all())
    return zero_ok and one_ok


def fits_x(m: Mat, x: XPattern) -> bool:
    _check_dims(m, x)
    return not m.data[x.grid == PatternEntry.ZERO].any()


def pattern_of_support(m: Mat) -> XPattern:
    """非零处为 X、其余为 0 的最小 X-fitting 矩阵。"""
    return XPattern(np.where(m.data != 0, PatternEntry.STAR, PatternEntry.ZERO))


def block_pattern(rows_of_blocks: Sequence[Sequence[Pattern]]) -> FittingMatrix:
    try:
        grid = np.block([[b.grid for b in row] for row in rows_of_blocks])
    except ValueError as e:
        raise DimensionMismatch(f"分块拼接维度不一致: {e}") from None
    f = FittingMatrix(grid)
    validate(f)
    return f


def widen(f: Pattern, stars: Iterable[Tuple[int, int]]) -> Pattern:
    """在给定 1 起始位置加 X（0→X）；已是 X 的位置不变，1 的位置报错。"""
    grid = np.array(f.grid)
    for row, col in stars:
        if not (1 <= row <= f.L and 1 <= col <= f.K):
            raise DimensionMismatch(f"位置越界: ({row}, {col})")
        if grid[row - 1, col - 1] == PatternEntry.ONE:
            raise InvalidPattern(f"不能把需求位置 ({row}, {col}) 改成 X")
        grid[row - 1, col - 1] = PatternEntry.STAR
    return type(f)(grid)


def random_fitting(L: int, K: int, star_prob: float, rng: np.random.Generator) -> FittingMatrix:
    """随机生成合法 fitting matrix：前 K 行覆盖所有列，其余行随机需求，再打乱行序。"""
    if L < K:
        raise DimensionMismatch(f"需要 L >= K: L={L}, K={K}")
    demands = np.concatenate([rng.permutation(K), rng.integers(0, K, size=L - K)])
    rng.shuffle(demands)
    grid = np.where(rng.random((L, K)) < star_prob, PatternEntry.STAR, PatternEntry.ZERO).astype(np.int8)
    grid[np.arange(L), demands] = PatternEntry.ONE
    return FittingMatrix(grid)


# ---------------------------------------------------------------------------
# 文本格式：首行 "L K"，随后 L 行，每行 K 个 {0,1,X} 记号
# ---------------------------------------------------------------------------

def _grid_from_token_rows(rows: Sequence[str], *, path: Optional[str] = None, first_line: int = 1) -> np.ndarray:
    grid = []
    for i, row in enumerate(rows):
        toks = row.split() if (" " in row.strip() or len(row.strip()) == 1) else list(row.strip())
        try:
            grid.append([_FROM_TOKEN[t] for t in toks])
        except KeyError as e:
            raise FormatError(f"非法记号 {e.args[0]!r}", path=path, line=first_line + i) from None
    if len({len(r) for r in grid}) > 1:
        raise FormatError("各行记号数不一致", path=path)
    return np.array(grid, dtype=np.int8).reshape(len(grid), len(grid[0]) if grid else 0)


def format_pattern(f: _Pattern) -> str:
    lines = [f"{f.L} {f.K}"]
    lines += [" ".join(PatternEntry(int(v)).token for v in row) for row in f.grid]
    return "\n".join(lines) + "\n"


def parse_pattern(text: str, *, path: Optional[str] = None) -> Pattern:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("模式文件为空", path=path)
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("首行应为 'L K'", path=path, line=1)
    try:
        L, K = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError("首行含非整数", path=path, line=1) from None
    body = lines[1:]
    if len(body) != L:
        raise FormatError(f"声明 {L} 行，实际 {len(body)} 行", path=path)
    rows = []
    for i, ln in enumerate(body):
        toks = ln.split()
        if len(toks) != K:
            raise FormatError(f"应有 {K} 个记号，实际 {len(toks)}", path=path, line=i + 2)
        rows.append(" ".join(toks))
    grid = _grid_from_token_rows(rows, path=path, first_line=2).reshape(L, K)
    if (grid == PatternEntry.ONE).any():
        return FittingMatrix(grid)
    return XPattern(grid)


def load_pattern(path: str) -> Pattern:
    return parse_pattern(Path(path).read_text(encoding="utf-8"), path=str(path))


def save_pattern(f: _Pattern, path: str) -> str:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_pattern(f), encoding="utf-8")
    return str(out)


# ---------------------------------------------------------------------------
# JSON 格式：{"K": int, "p": int, "receivers": [{"demand": int | [int], "side": [int]}]}
# ---------------------------------------------------------------------------

def problem_to_json(p: ICProblem) -> Dict:
    return {
        "K": p.K,
        "p": p.field.p,
        "receivers": [{"demand": r.demand, "side": sorted(r.side)} for r in p.receivers],
    }


def problem_from_json(obj: Dict, *, path: Optional[str] = None) -> ICProblem:
    try:
        K = int(obj["K"])
        field = FieldSpec(int(obj.get("p", 2)))
        receivers: List[Receiver] = []
        for item in obj["receivers"]:
            demands = item["demand"]
            demands = demands if isinstance(demands, list) else [demands]
            side = frozenset(int(j) for j in item.get("side", []))
            # 多需求接收者：每个需求各占一行，共享同一边信息集合
            for d in demands:
                receivers.append(Receiver(int(d), side))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"问题 JSON 结构错误: {e}", path=path) from None
    problem = ICProblem(K=K, field=field, receivers=tuple(receivers))
    validate_problem(problem)
    return problem


def load_problem(path: str, field: Optional[FieldSpec] = None) -> Tuple[FittingMatrix, FieldSpec]:
    """
    读取问题文件（fitting 文本或 JSON，按首个非空字符判断），
    返回 (fitting matrix, 域)。JSON 自带 p；与显式传入的 field 冲突时报错。
    """
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"JSON 解析失败: {e}", path=str(path)) from None
        problem = problem_from_json(obj, path=str(path))
        if field is not None and field != problem.field:
            raise FieldMismatch(f"问题文件声明 {problem.field}，命令行指定 {field}")
        logger.debug(f"读取问题 JSON | path={path}, K={problem.K}, L={problem.L}, p={problem.field.p}")
        return from_problem(problem), problem.field
    pattern = parse_pattern(text, path=str(path))
    if not isinstance(pattern, FittingMatrix):
        raise InvalidPattern(f"{path} 不含任何 1，不是 fitting matrix")
    logger.debug(f"读取 fitting 文本 | path={path}, L={pattern.L}, K={pattern.K}")
    return pattern, field or GF2
