"""
置换矩阵、轮换分解、对合判定，以及与 C 可交换的矩阵 C₁ / Y = I + C − C₁。

置换一律 1 起始：mapping[i-1] = σ(i)。作为矩阵时按行置换理解：
左乘 P 把第 i 行送到第 σ(i) 行，即 P[σ(i), i] = 1。
"""
import re
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, FormatError, InvalidPermutation, NotInvolutory
from .gf_core import GF2, FieldSpec, Mat, add, identity, mat_mul, sub

Cycle = Tuple[int, ...]


@dataclass(frozen=True)
class Permutation:
    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.mapping)
        if sorted(mapping) != list(range(1, len(mapping) + 1)):
            raise InvalidPermutation(f"不是 [1..{len(mapping)}] 上的双射: {mapping}")
        object.__setattr__(self, "mapping", mapping)

    @property
    def size(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    @classmethod
    def identity(cls, size: int):
        return cls(tuple(range(1, size + 1)))

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[int]], size: Optional[int] = None):
        seen = [v for c in cycles for v in c]
        n = size if size is not None else max(seen, default=0)
        if len(seen) != len(set(seen)):
            raise InvalidPermutation(f"轮换之间有重复元素: {cycles}")
        if any(not 1 <= v <= n for v in seen):
            raise InvalidPermutation(f"轮换元素超出 [1, {n}]: {cycles}")
        mapping = list(range(1, n + 1))
        for c in cycles:
            for k, v in enumerate(c):
                mapping[v - 1] = c[(k + 1) % len(c)]
        return cls(tuple(mapping))

    def __str__(self) -> str:
        return format_cycles(self)


@dataclass(frozen=True)
class InvolutoryPermutation(Permutation):
    def __post_init__(self):
        super().__post_init__()
        for i, v in enumerate(self.mapping, 1):
            if self.mapping[v - 1] != i:
                raise NotInvolutory(f"σ(σ({i})) != {i}: {format_cycles(self)}")

    @classmethod
    def of(cls, p: Permutation) -> "InvolutoryPermutation":
        return cls(p.mapping)

    @property
    def fixed_points(self) -> Tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.mapping, 1) if v == i)

    @property
    def swaps(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((i, v) for i, v in enumerate(self.mapping, 1) if i < v)


def cycles(p: Permutation) -> List[Cycle]:
    """不相交轮换；每个轮换以最小元素开头，轮换按最小元素排序，不动点保留。"""
    seen = set()
    out: List[Cycle] = []
    for start in range(1, p.size + 1):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        nxt = p(start)
        while nxt != start:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = p(nxt)
        out.append(tuple(cyc))
    return out


def is_involutory(p: Permutation) -> bool:
    return all(len(c) <= 2 for c in cycles(p))


def to_matrix(p: Permutation, field: FieldSpec = GF2) -> Mat:
    m = np.zeros((p.size, p.size), dtype=np.int64)
    for i, v in enumerate(p.mapping):
        m[v - 1, i] = 1
    return Mat(field, m)


def from_matrix(m: Mat) -> Permutation:
    if m.rows != m.cols:
        raise DimensionMismatch(f"置换矩阵必须是方阵: {m.shape}")
    data = m.data
    if not (np.isin(data, (0, 1)).all() and (data.sum(axis=0) == 1).all() and (data.sum(axis=1) == 1).all()):
        raise InvalidPermutation("不是置换矩阵")
    return Permutation(tuple(int(np.flatnonzero(data[:, i])[0]) + 1 for i in range(m.cols)))


def fixed_point_projector(c: InvolutoryPermutation, field: FieldSpec = GF2) -> Mat:
    diag = np.zeros(c.size, dtype=np.int64)
    for i in c.fixed_points:
        diag[i - 1] = 1
    return Mat(field, np.diag(diag))


def commuting_y(c: InvolutoryPermutation, field: FieldSpec = GF2) -> Mat:
    return sub(add(identity(c.size, field), to_matrix(c, field)), fixed_point_projector(c, field))


def commutes(a: Mat, c: Mat) -> bool:
    if a.field != c.field:
        raise FieldMismatch(f"域不一致: {a.field} vs {c.field}")
    if a.rows != a.cols or a.shape != c.shape:
        raise DimensionMismatch(f"需同阶方阵: {a.shape} vs {c.shape}")
    return mat_mul(a, c) == mat_mul(c, a)


def is_involutory_matrix(c: Mat) -> bool:
    if c.rows != c.cols:
        return False
    return mat_mul(c, c) == identity(c.rows, c.field)


# ---------------------------------------------------------------------------
# 轮换记号："(13)(2)"、"(1 4)(2 3)"、"(1,4)(2,3)"；输入可省略不动点，输出总写出
# ---------------------------------------------------------------------------

_GROUP_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, size: Optional[int] = None) -> Permutation:
    s = (text or "").strip()
    if _GROUP_RE.sub("", s).strip():
        raise FormatError(f"轮换记号只允许括号分组: {text!r}")
    groups: List[List[int]] = []
    for body in _GROUP_RE.findall(s):
        body = body.strip()
        if not body:
            raise FormatError(f"空轮换: {text!r}")
        if re.search(r"[\s,]", body):
            toks = [t for t in re.split(r"[\s,]+", body) if t]
        else:
            # 紧凑写法 "(132)"：每个字符一个元素
            toks = list(body)
        if not all(t.isdigit() for t in toks):
            raise FormatError(f"轮换中含非数字: {body!r}")
        groups.append([int(t) for t in toks])
    return Permutation.from_cycles(groups, size)


def parse_involution(text: str, size: Optional[int] = None) -> InvolutoryPermutation:
    return InvolutoryPermutation.of(parse_cycles(text, size))


def format_cycles(p: Permutation) -> str:
    sep = "" if p.size <= 9 else " "
    return "".join("(" + sep.join(str(v) for v in c) + ")" for c in cycles(p))


# ---------------------------------------------------------------------------
# 枚举与随机
# ---------------------------------------------------------------------------

def involutions(r: int) -> Iterator[InvolutoryPermutation]:
    """按确定顺序枚举 [1..r] 上全部对合：最小未定元素要么不动，要么与更大的未定元素互换。"""

    def rec(mapping: List[int], free: List[int]) -> Iterator[List[int]]:
        if not free:
            yield list(mapping)
            return
        head, rest = free[0], free[1:]
        mapping[head - 1] = head
        yield from rec(mapping, rest)
        for k, other in enumerate(rest):
            mapping[head - 1], mapping[other - 1] = other, head
            yield from rec(mapping, rest[:k] + rest[k + 1:])
        mapping[head - 1] = head

    for m in rec(list(range(1, r + 1)), list(range(1, r + 1))):
        yield InvolutoryPermutation(tuple(m))


def random_permutation(r: int, rng: np.random.Generator) -> Permutation:
    return Permutation(tuple(int(v) + 1 for v in rng.permutation(r)))


def random_involution(r: int, rng: np.random.Generator) -> InvolutoryPermutation:
    order = [int(v) + 1 for v in rng.permutation(r)]
    n_swaps = int(rng.integers(0, r // 2 + 1))
    mapping = list(range(1, r + 1))
    for k in range(n_swaps):
        a, b = order[2 * k], order[2 * k + 1]
        mapping[a - 1], mapping[b - 1] = b, a
    return InvolutoryPermutation(tuple(mapping))
