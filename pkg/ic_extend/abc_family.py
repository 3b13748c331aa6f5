"""
Type_A / Type_B / Type_C 分块问题族：生成 fitting matrix、闭式码 (I | C | I+C−C₁ 按类型拼接)，
以及按 σ_C 置换分块列得到的 2 阶扩展。

分块连续：第 i 块 = {(i−1)r+1, …, ir}；块内第 k 条消息记作 k_i。
边信息取满足各条规则的最小集合，额外的 X 由调用方 widen 追加。
"""
import json
from dataclasses import dataclass, field as dc_field
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

import numpy as np

from .errors import FormatError, IndexCodingError, InvalidProblem
from .extensions import BlockLayout, ExtensionResult, involutory_block_extension
from .gf_core import GF2, FieldSpec, Mat, hstack, identity
from .involutions import InvolutoryPermutation, commuting_y, format_cycles, parse_involution, to_matrix
from .logger import get_logger
from .problem import FittingMatrix, PatternEntry, validate, widen
from .verifier import CodeMatrix

logger = get_logger()


class BlockType(str, Enum):
    A = "A"
    B = "B"
    C = "C"


class TypeCChoice(str, Enum):
    # 条件 1：Type_A 块取 k_j、Type_B 块取 σ(k)_j，用第 k 个发送符号译码
    COND1 = "cond1"
    # 条件 2：Type_A 块取 σ(k)_j、Type_B 块取 k_j，用第 σ(k) 个发送符号译码
    COND2 = "cond2"


@dataclass(frozen=True)
class AbcSpec:
    r: int
    types: Tuple[BlockType, ...]
    sigma: InvolutoryPermutation
    field: FieldSpec = GF2
    # (块号, k) → 选择；未列出的 Type_C 非不动点接收者默认 COND1
    typec_choice: Tuple[Tuple[Tuple[int, int], TypeCChoice], ...] = dc_field(default=())

    def __post_init__(self):
        types = tuple(BlockType(t) for t in self.types)
        object.__setattr__(self, "types", types)
        if self.r < 1:
            raise InvalidProblem(f"块大小 r 必须 >= 1: r={self.r}")
        if not types:
            raise InvalidProblem("至少需要一个分块 (T >= 1)")
        if self.sigma.size != self.r:
            raise InvalidProblem(f"σ_C 大小 {self.sigma.size} != r={self.r}")
        choices = dict(self.typec_choice)
        normalized = []
        for (blk, k), choice in sorted(choices.items()):
            if not 1 <= blk <= len(types) or types[blk - 1] != BlockType.C:
                raise InvalidProblem(f"typec_choice 只能作用于 Type_C 块: block={blk}")
            if not 1 <= k <= self.r or self.sigma(k) == k:
                raise InvalidProblem(f"typec_choice 只能作用于非不动点消息: block={blk}, k={k}")
            normalized.append(((int(blk), int(k)), TypeCChoice(choice)))
        object.__setattr__(self, "typec_choice", tuple(normalized))

    @property
    def T(self) -> int:
        return len(self.types)

    @property
    def K(self) -> int:
        return self.r * self.T

    def choice(self, block: int, k: int) -> TypeCChoice:
        return dict(self.typec_choice).get((block, k), TypeCChoice.COND1)

    def message(self, block: int, k: int) -> int:
        """k_block 的全局 1 起始下标。"""
        return (block - 1) * self.r + k

    def blocks_of(self, kind: BlockType) -> List[int]:
        return [i for i, t in enumerate(self.types, 1) if t == kind]


def receiver_side(spec: AbcSpec, block: int, k: int) -> FrozenSet[int]:
    """需求 k_block 的接收者的最小边信息集合。"""
    s = spec.sigma(k)
    fixed = s == k
    own = spec.types[block - 1]
    A, B, C = (spec.blocks_of(t) for t in (BlockType.A, BlockType.B, BlockType.C))
    side: Set[int] = set()

    if own in (BlockType.A, BlockType.B):
        # Type_B 与 Type_A 规则相同，只是 A、B 角色互换
        same, other = (A, B) if own == BlockType.A else (B, A)
        side |= {spec.message(j, k) for j in same if j != block}
        side |= {spec.message(j, s) for j in other}
        side |= {spec.message(j, k) for j in C}
        if not fixed:
            side |= {spec.message(j, s) for j in C}
    else:
        side |= {spec.message(j, k) for j in C if j != block}
        if fixed:
            side |= {spec.message(j, k) for j in A}
            side |= {spec.message(j, s) for j in B}
        else:
            side |= {spec.message(j, s) for j in C}
            if spec.choice(block, k) == TypeCChoice.COND1:
                side |= {spec.message(j, k) for j in A}
                side |= {spec.message(j, s) for j in B}
            else:
                side |= {spec.message(j, s) for j in A}
                side |= {spec.message(j, k) for j in B}
    return frozenset(side)


def abc_problem(spec: AbcSpec) -> FittingMatrix:
    K = spec.K
    grid = np.zeros((K, K), dtype=np.int8)
    for block in range(1, spec.T + 1):
        for k in range(1, spec.r + 1):
            row = spec.message(block, k) - 1
            grid[row, row] = PatternEntry.ONE
            for j in receiver_side(spec, block, k):
                grid[row, j - 1] = PatternEntry.STAR
    f = FittingMatrix(grid)
    validate(f)
    return f


def block_code(spec: AbcSpec, kind: BlockType) -> Mat:
    if kind == BlockType.A:
        return identity(spec.r, spec.field)
    if kind == BlockType.B:
        return to_matrix(spec.sigma, spec.field)
    return commuting_y(spec.sigma, spec.field)


def abc_code(spec: AbcSpec) -> CodeMatrix:
    return hstack([block_code(spec, t) for t in spec.types])


def transmission_messages(spec: AbcSpec, k: int) -> FrozenSet[int]:
    """第 k 个发送符号涉及的消息（abc_code 第 k 行的非零列）。"""
    row = abc_code(spec).data[k - 1]
    return frozenset(int(j) + 1 for j in np.flatnonzero(row))


def contains_problem(f: FittingMatrix, base: FittingMatrix) -> bool:
    """f 是否为 base 加 X 的结果：1 的位置相同，base 的 X 在 f 中仍为 X。"""
    if f.grid.shape != base.grid.shape:
        return False
    same_ones = np.array_equal(f.grid == PatternEntry.ONE, base.grid == PatternEntry.ONE)
    stars_kept = bool((f.grid[base.grid == PatternEntry.STAR] == PatternEntry.STAR).all())
    return same_ones and stars_kept


def abc_extension(spec: AbcSpec, f: Optional[FittingMatrix] = None) -> ExtensionResult:
    base = abc_problem(spec)
    f = base if f is None else f
    if not contains_problem(f, base):
        raise InvalidProblem("fitting matrix 不是该 ABC 问题（或其加 X 的放宽）")
    layout = BlockLayout.consecutive(spec.K, spec.r, spec.T)
    logger.info(f"ABC 扩展 | r={spec.r}, types={''.join(t.value for t in spec.types)}, sigma={format_cycles(spec.sigma)}")
    return involutory_block_extension(f, abc_code(spec), layout, spec.sigma)


# ---------------------------------------------------------------------------
# 序列化：{"r": 3, "types": "ABBC", "sigma": "(13)(2)", "p": 2, "typec_choice": {"4:1": "cond2"}}
# ---------------------------------------------------------------------------

def spec_to_json(spec: AbcSpec) -> Dict:
    return {
        "r": spec.r,
        "types": "".join(t.value for t in spec.types),
        "sigma": format_cycles(spec.sigma),
        "p": spec.field.p,
        "typec_choice": {f"{b}:{k}": c.value for (b, k), c in spec.typec_choice},
    }


def spec_from_json(obj: Dict, *, path: Optional[str] = None) -> AbcSpec:
    try:
        r = int(obj["r"])
        choices = {}
        for key, value in (obj.get("typec_choice") or {}).items():
            blk, k = (int(x) for x in str(key).split(":"))
            choices[(blk, k)] = TypeCChoice(str(value).lower())
        return AbcSpec(
            r=r,
            types=tuple(BlockType(t) for t in str(obj["types"]).upper()),
            sigma=parse_involution(str(obj["sigma"]), r),
            field=FieldSpec(int(obj.get("p", 2))),
            typec_choice=tuple(choices.items()),
        )
    except IndexCodingError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise FormatError(f"AbcSpec JSON 结构错误: {e}", path=path) from None


def load_spec(path: str) -> AbcSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"JSON 解析失败: {e}", path=str(path)) from None
    return spec_from_json(obj, path=str(path))


# ---------------------------------------------------------------------------
# 内置示例：σ_C = (13)(2)，块类型 A B B C；两个 Type_C 非不动点接收者走条件 2，
# 另有 6 处额外边信息（方框 X）
# ---------------------------------------------------------------------------

EXAMPLE1_STARS: Tuple[Tuple[int, int], ...] = ((2, 10), (4, 2), (5, 12), (6, 7), (8, 10), (11, 6))


def example1_spec() -> AbcSpec:
    return AbcSpec(
        r=3,
        types=(BlockType.A, BlockType.B, BlockType.B, BlockType.C),
        sigma=parse_involution("(13)(2)", 3),
        field=GF2,
        typec_choice=(((4, 1), TypeCChoice.COND2), ((4, 3), TypeCChoice.COND2)),
    )


def example1_stars() -> Tuple[Tuple[int, int], ...]:
    return EXAMPLE1_STARS


def example1_problem() -> FittingMatrix:
    return widen(abc_problem(example1_spec()), EXAMPLE1_STARS)
