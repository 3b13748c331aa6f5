"""
扩展构造：m 阶复制、一般对合 2 阶扩展（最小 B）、结构化 B（按 σ_C 置换分块列）、
系统形式扩展，以及从 (G; A) 反解对合矩阵 C。

每个构造最后都用 verify_code 复核 (g_ext, f_ext)，保证返回值自洽。
"""
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import (
    CommutationViolation,
    DimensionMismatch,
    FieldMismatch,
    FormatError,
    InvalidCode,
    LayoutMismatch,
    NotInvolutory,
    RankDeficient,
)
from .gf_core import Mat, block, hstack, mat_mul, mat_rank, rref, solve_affine, submatrix, vstack
from .involutions import InvolutoryPermutation, commutes, is_involutory_matrix, to_matrix
from .logger import get_logger
from .problem import (
    FittingMatrix,
    PatternEntry,
    XPattern,
    block_pattern,
    pattern_of_support,
    validate,
    x_relax,
)
from .verifier import CodeMatrix, find_decoding, verify_code

logger = get_logger()


@dataclass(frozen=True)
class BlockLayout:
    """
    互不相交、大小均为 r 的列下标集合 I_1..I_T（1 起始）。
    块内顺序有意义：块内第 k 个位置对应 C 的第 k 行 / 列。
    """

    K: int
    r: int
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(int(c) for c in b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for i, b in enumerate(blocks, 1):
            if len(b) != self.r:
                raise LayoutMismatch(f"第 {i} 个分块大小 {len(b)} != r={self.r}")
            for c in b:
                if not 1 <= c <= self.K:
                    raise LayoutMismatch(f"第 {i} 个分块的列 {c} 超出 [1, {self.K}]")
                if c in seen:
                    raise LayoutMismatch(f"列 {c} 出现在多个分块中")
                seen.add(c)

    @property
    def T(self) -> int:
        return len(self.blocks)

    @property
    def residual(self) -> Tuple[int, ...]:
        used = {c for b in self.blocks for c in b}
        return tuple(c for c in range(1, self.K + 1) if c not in used)

    @classmethod
    def consecutive(cls, K: int, r: int, T: int) -> "BlockLayout":
        return cls(K, r, tuple(tuple(range(i * r + 1, (i + 1) * r + 1)) for i in range(T)))


@dataclass(frozen=True)
class ExtensionResult:
    f_ext: FittingMatrix
    g_ext: CodeMatrix
    b: Optional[XPattern] = None


def parse_block_layout(text: str, K: int, r: Optional[int] = None) -> BlockLayout:
    """
    "1-3,4-6,7-9" 或 "1,3,5;2,4,6"：分号分隔时逗号列出块内元素，
    否则逗号分隔各块、每块写成闭区间 a-b。
    """
    s = (text or "").strip()
    blocks: List[Tuple[int, ...]] = []
    if s:
        try:
            if ";" in s:
                for part in s.split(";"):
                    blocks.append(tuple(int(t) for t in re.split(r"[,\s]+", part.strip()) if t))
            else:
                for part in s.split(","):
                    part = part.strip()
                    m = re.fullmatch(r"(\d+)\s*-\s*(\d+)", part)
                    if m:
                        lo, hi = int(m.group(1)), int(m.group(2))
                        if hi < lo:
                            raise FormatError(f"区间上界小于下界: {part!r}")
                        blocks.append(tuple(range(lo, hi + 1)))
                    else:
                        blocks.append((int(part),))
        except ValueError:
            raise FormatError(f"无法解析分块描述: {text!r}") from None
    if r is None:
        if not blocks:
            raise FormatError("空分块描述需显式给出 r")
        r = len(blocks[0])
    return BlockLayout(K, r, tuple(blocks))


def _require_code(g: CodeMatrix, f: FittingMatrix) -> None:
    validate(f)
    if not verify_code(g, f):
        raise InvalidCode("种子编码矩阵不是该问题的 index code")


def _finish(kind: str, f_ext: FittingMatrix, g_ext: CodeMatrix, b: Optional[XPattern] = None) -> ExtensionResult:
    if not verify_code(g_ext, f_ext):
        raise InvalidCode(f"{kind} 扩展复核失败")
    logger.info(f"扩展完成 | kind={kind}, f_ext={f_ext.L}x{f_ext.K}, r={g_ext.rows}")
    return ExtensionResult(f_ext=f_ext, g_ext=g_ext, b=b)


def two_order_code(g: CodeMatrix, c: Mat) -> CodeMatrix:
    """(G  CG)"""
    return hstack([g, mat_mul(c, g)])


def stacked_code(g: CodeMatrix, c: Mat) -> Mat:
    """[[G, CG], [CG, G]]"""
    cg = mat_mul(c, g)
    return block([[g, cg], [cg, g]])


def replicate_extension(f: FittingMatrix, g: CodeMatrix, m: int) -> ExtensionResult:
    """对角块为 F_X、其余为 F_X^X 的 m 阶扩展，码为 (G|G|…|G)。"""
    if m < 1:
        raise DimensionMismatch(f"阶数 m 必须 >= 1: m={m}")
    _require_code(g, f)
    relaxed = x_relax(f)
    f_ext = block_pattern([[f if i == j else relaxed for j in range(m)] for i in range(m)])
    return _finish(f"replicate(m={m})", f_ext, hstack([g] * m))


def derive_bxx(f: FittingMatrix, g: CodeMatrix, c: Mat) -> ExtensionResult:
    """
    一般对合扩展：D 取 find_decoding 的确定解，B 为 DCG 的支撑（最小 X-fitting 矩阵），
    f_ext = (F_X B; B F_X)，g_ext = (G CG)。
    """
    if c.rows != c.cols or c.rows != g.rows:
        raise DimensionMismatch(f"C 必须是 {g.rows}×{g.rows} 方阵: {c.shape}")
    if not is_involutory_matrix(c):
        raise NotInvolutory("C·C != I")
    validate(f)
    d = find_decoding(g, f)
    if d is None:
        raise InvalidCode("种子编码矩阵不是该问题的 index code")
    b = pattern_of_support(mat_mul(mat_mul(d, c), g))
    f_ext = block_pattern([[f, b], [b, f]])
    return _finish("derive_bxx", f_ext, two_order_code(g, c), b)


def structured_bxx(f: FittingMatrix, layout: BlockLayout, c: InvolutoryPermutation) -> XPattern:
    """
    1) 每个 I_j 内的列按 σ_C 置换（等价于右乘 C：新位置 k 取旧位置 σ(k)）；
    2) 不在任何 I_j 的列全部置 X；
    3) 所有 1 置 X。
    """
    if layout.r != c.size:
        raise LayoutMismatch(f"分块大小 r={layout.r} 与置换大小 {c.size} 不一致")
    if layout.K != f.K:
        raise LayoutMismatch(f"分块列数 K={layout.K} 与 fitting matrix K={f.K} 不一致")
    src = f.grid
    out = np.full(src.shape, PatternEntry.STAR, dtype=np.int8)
    for cols in layout.blocks:
        for k, col in enumerate(cols, 1):
            out[:, col - 1] = src[:, cols[c(k) - 1] - 1]
    out[out == PatternEntry.ONE] = PatternEntry.STAR
    return XPattern(out)


def check_commuting_blocks(g: CodeMatrix, layout: BlockLayout, c: InvolutoryPermutation) -> None:
    if g.rows != layout.r:
        raise LayoutMismatch(f"码长 r={g.rows} 与分块大小 {layout.r} 不一致")
    cm = to_matrix(c, g.field)
    for i, cols in enumerate(layout.blocks, 1):
        a_i = submatrix(g, None, [col - 1 for col in cols])
        if not commutes(a_i, cm):
            raise CommutationViolation(i)


def involutory_block_extension(
    f: FittingMatrix,
    g: CodeMatrix,
    layout: BlockLayout,
    c: InvolutoryPermutation,
) -> ExtensionResult:
    """各分块 A_i 与 C 可交换时，用结构化 B 得到 (F_X B; B F_X) 与码 (G CG)。"""
    _require_code(g, f)
    check_commuting_blocks(g, layout, c)
    b = structured_bxx(f, layout, c)
    f_ext = block_pattern([[f, b], [b, f]])
    return _finish(f"involutory(T={layout.T})", f_ext, two_order_code(g, to_matrix(c, g.field)), b)


def systematic_form(g_any: CodeMatrix) -> Tuple[CodeMatrix, Tuple[int, ...]]:
    """行满秩码化为 RREF：字典序最小的一组无关列（主元列）变成单位阵。"""
    if mat_rank(g_any) != g_any.rows:
        raise RankDeficient(f"编码矩阵秩 {mat_rank(g_any)} < 行数 {g_any.rows}")
    reduced, pivots = rref(g_any)
    return reduced, pivots


def systematic_extension(f: FittingMatrix, g_any: CodeMatrix, c: InvolutoryPermutation) -> ExtensionResult:
    g, pivots = systematic_form(g_any)
    if c.size != g.rows:
        raise LayoutMismatch(f"置换大小 {c.size} 与码长 r={g.rows} 不一致")
    layout = BlockLayout(f.K, g.rows, (tuple(p + 1 for p in pivots),))
    logger.debug(f"系统形式主元列 | pivots={layout.blocks[0]}")
    return involutory_block_extension(f, g, layout, c)


def recover_involution(g: CodeMatrix, a: Mat) -> Optional[Mat]:
    """
    由 CG = A 与 CA = G 联立反解 C（逐行求 c_j·[G A] = [a_j g_j]）。
    G 行满秩时解唯一且必有 C² = I；秩条件不满足时返回 None。
    """
    if g.shape != a.shape:
        raise DimensionMismatch(f"G {g.shape} 与 A {a.shape} 形状不一致")
    if g.field != a.field:
        raise FieldMismatch(f"G 与 A 的域不一致: {g.field} vs {a.field}")
    r = g.rows
    if mat_rank(g) != r:
        return None
    ga = hstack([g, a])
    if mat_rank(vstack([ga, hstack([a, g])])) != r:
        return None
    system = Mat(g.field, ga.data.T)
    rows = []
    for j in range(r):
        target = np.concatenate([a.data[j], g.data[j]])
        c_j = solve_affine(system, target)
        if c_j is None:
            return None
        rows.append(c_j)
    c = Mat(g.field, np.vstack(rows))
    if not (mat_mul(c, g) == a and is_involutory_matrix(c)):
        return None
    return c
