"""
素域 GF(p) 上的精确算术与稠密线性代数（其余模块的底座）。

矩阵以只读 int64 numpy 数组保存，参与消元 / 乘法时转成 galois 的 FieldArray。
所有值构造后不可变，函数均为纯函数。
"""
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Type

import galois
import numpy as np

from .errors import DimensionMismatch, FieldMismatch, FormatError, InvalidField

MAX_PRIME = 251


@lru_cache(maxsize=None)
def _field_class(p: int) -> Type[galois.FieldArray]:
    return galois.GF(p)


@dataclass(frozen=True)
class FieldSpec:
    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, (int, np.integer)):
            raise InvalidField(f"模数必须是整数: {self.p!r}")
        object.__setattr__(self, "p", int(self.p))
        if not (2 <= self.p <= MAX_PRIME) or not galois.is_prime(self.p):
            raise InvalidField(f"模数必须是 [2, {MAX_PRIME}] 内的素数: {self.p}")

    @property
    def gf(self) -> Type[galois.FieldArray]:
        return _field_class(self.p)

    def __str__(self) -> str:
        return f"GF({self.p})"


GF2 = FieldSpec(2)


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.int64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Mat:
    """GF(p) 上的稠密矩阵；data 为 rows×cols 的只读 int64 数组，元素 ∈ [0, p)。"""

    field: FieldSpec
    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise DimensionMismatch(f"矩阵必须是二维: shape={arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.p):
            raise FieldMismatch(f"元素超出 [0, {self.field.p})")
        object.__setattr__(self, "data", _frozen(arr))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], field: FieldSpec = GF2) -> "Mat":
        rows = [list(r) for r in rows]
        width = len(rows[0]) if rows else 0
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("各行长度不一致")
        return cls(field, np.array(rows, dtype=np.int64).reshape(len(rows), width))

    @classmethod
    def from_gf(cls, arr: galois.FieldArray, field: FieldSpec) -> "Mat":
        return cls(field, np.asarray(arr.view(np.ndarray), dtype=np.int64))

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def cols(self) -> int:
        return int(self.data.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def gf(self) -> galois.FieldArray:
        return self.field.gf(self.data)

    def tolist(self) -> List[List[int]]:
        return self.data.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.field.p, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"Mat({self.field}, {self.tolist()})"


def _same_field(a: Mat, b: Mat) -> None:
    if a.field != b.field:
        raise FieldMismatch(f"域不一致: {a.field} vs {b.field}")


def identity(n: int, field: FieldSpec = GF2) -> Mat:
    return Mat(field, np.eye(n, dtype=np.int64))


def zeros(rows: int, cols: int, field: FieldSpec = GF2) -> Mat:
    return Mat(field, np.zeros((rows, cols), dtype=np.int64))


def transpose(a: Mat) -> Mat:
    return Mat(a.field, a.data.T)


def add(a: Mat, b: Mat) -> Mat:
    _same_field(a, b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"加法维度不一致: {a.shape} vs {b.shape}")
    return Mat(a.field, (a.data + b.data) % a.field.p)


def sub(a: Mat, b: Mat) -> Mat:
    _same_field(a, b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"减法维度不一致: {a.shape} vs {b.shape}")
    return Mat(a.field, (a.data - b.data) % a.field.p)


def mat_mul(a: Mat, b: Mat) -> Mat:
    _same_field(a, b)
    if a.cols != b.rows:
        raise DimensionMismatch(f"乘法维度不一致: {a.shape} @ {b.shape}")
    if a.rows == 0 or b.cols == 0 or a.cols == 0:
        return zeros(a.rows, b.cols, a.field)
    return Mat.from_gf(a.gf() @ b.gf(), a.field)


def mat_vec(a: Mat, x: Sequence[int]) -> np.ndarray:
    vec = np.asarray(x, dtype=np.int64)
    if vec.shape != (a.cols,):
        raise DimensionMismatch(f"向量长度 {vec.shape} 与列数 {a.cols} 不一致")
    if vec.size and (vec.min() < 0 or vec.max() >= a.field.p):
        raise FieldMismatch(f"向量元素超出 [0, {a.field.p})")
    return (a.data @ vec) % a.field.p


def hstack(blocks: Sequence[Mat]) -> Mat:
    if not blocks:
        raise DimensionMismatch("hstack 需要至少一个分块")
    for b in blocks[1:]:
        _same_field(blocks[0], b)
    if len({b.rows for b in blocks}) != 1:
        raise DimensionMismatch("hstack 各分块行数不一致")
    return Mat(blocks[0].field, np.hstack([b.data for b in blocks]))


def vstack(blocks: Sequence[Mat]) -> Mat:
    if not blocks:
        raise DimensionMismatch("vstack 需要至少一个分块")
    for b in blocks[1:]:
        _same_field(blocks[0], b)
    if len({b.cols for b in blocks}) != 1:
        raise DimensionMismatch("vstack 各分块列数不一致")
    return Mat(blocks[0].field, np.vstack([b.data for b in blocks]))


def block(rows_of_blocks: Sequence[Sequence[Mat]]) -> Mat:
    return vstack([hstack(list(row)) for row in rows_of_blocks])


def submatrix(a: Mat, rows: Optional[Iterable[int]] = None, cols: Optional[Iterable[int]] = None) -> Mat:
    """按 0 起始下标取子矩阵；None 表示全部。"""
    r = list(range(a.rows)) if rows is None else list(rows)
    c = list(range(a.cols)) if cols is None else list(cols)
    return Mat(a.field, a.data[np.ix_(r, c)] if r and c else np.zeros((len(r), len(c)), dtype=np.int64))


def rref(a: Mat) -> Tuple[Mat, Tuple[int, ...]]:
    """
    规范的简化行阶梯形。返回 (R, pivots)，pivots 为 0 起始的主元列，
    恰是从左到右贪心选出的第一组线性无关列。
    """
    if a.rows == 0 or a.cols == 0:
        return a, ()
    reduced = Mat.from_gf(a.gf().row_reduce(), a.field)
    pivots: List[int] = []
    for row in reduced.data:
        nz = np.flatnonzero(row)
        if nz.size == 0:
            break
        pivots.append(int(nz[0]))
    return reduced, tuple(pivots)


def mat_rank(a: Mat) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    return int(np.linalg.matrix_rank(a.gf()))


def solve_affine(a: Mat, b: Sequence[int]) -> Optional[np.ndarray]:
    """
    求 a·x = b 的一个解：主元取 RREF 的主元列，自由变量置 0（结果可复现）。
    不相容时返回 None。
    """
    vec = np.asarray(b, dtype=np.int64)
    if vec.shape != (a.rows,):
        raise DimensionMismatch(f"右端长度 {vec.shape} 与行数 {a.rows} 不一致")
    x = np.zeros(a.cols, dtype=np.int64)
    if a.rows == 0:
        return x
    aug = Mat(a.field, np.hstack([a.data, vec.reshape(-1, 1) % a.field.p]))
    reduced, pivots = rref(aug)
    if pivots and pivots[-1] == a.cols:
        return None
    for i, col in enumerate(pivots):
        x[col] = reduced.data[i, -1]
    return x


def random_mat(rows: int, cols: int, field: FieldSpec, rng: np.random.Generator) -> Mat:
    return Mat(field, rng.integers(0, field.p, size=(rows, cols), dtype=np.int64))


# ---------------------------------------------------------------------------
# 文本格式：首行 "rows cols p"，随后每行一个矩阵行，整数以单个空格分隔
# ---------------------------------------------------------------------------

def format_mat(m: Mat) -> str:
    lines = [f"{m.rows} {m.cols} {m.field.p}"]
    lines += [" ".join(str(int(v)) for v in row) for row in m.data]
    return "\n".join(lines) + "\n"


def parse_mat(text: str, *, path: Optional[str] = None) -> Mat:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise FormatError("矩阵文件为空", path=path)
    head = lines[0].split()
    if len(head) != 3:
        raise FormatError("首行应为 'rows cols p'", path=path, line=1)
    try:
        rows, cols, p = (int(t) for t in head)
    except ValueError:
        raise FormatError("首行含非整数", path=path, line=1) from None
    field = FieldSpec(p)
    if len(lines) - 1 != rows:
        raise FormatError(f"声明 {rows} 行，实际 {len(lines) - 1} 行", path=path)
    data = np.zeros((rows, cols), dtype=np.int64)
    for i, ln in enumerate(lines[1:]):
        toks = ln.split()
        if len(toks) != cols:
            raise FormatError(f"应有 {cols} 个元素，实际 {len(toks)}", path=path, line=i + 2)
        try:
            data[i] = [int(t) for t in toks]
        except ValueError:
            raise FormatError("含非整数元素", path=path, line=i + 2) from None
    if data.size and (data.min() < 0 or data.max() >= p):
        raise FormatError(f"元素超出 [0, {p})", path=path)
    return Mat(field, data)


def load_mat(path: str) -> Mat:
    return parse_mat(Path(path).read_text(encoding="utf-8"), path=str(path))


def save_mat(m: Mat, path: str) -> str:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(format_mat(m), encoding="utf-8")
    return str(out)
