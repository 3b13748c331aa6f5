"""
标量线性 index code 的验证：构造 D 使 DG ≈ F_X（逐行独立求解），
以及编码 / 译码的端到端仿真。
"""
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from tqdm import tqdm

from .errors import DimensionMismatch, FieldMismatch, InvalidCode
from .gf_core import FieldSpec, Mat, mat_mul, mat_vec, solve_affine
from .logger import get_logger
from .problem import FittingMatrix, PatternEntry, fits, validate

logger = get_logger()

# G：r×K 的编码矩阵；D：L×r 的译码矩阵。二者都是普通 Mat。
CodeMatrix = Mat
DecodingMatrix = Mat


def _check_code(g: CodeMatrix, f: FittingMatrix) -> None:
    if g.rows < 1:
        raise DimensionMismatch("编码矩阵至少一行")
    if g.cols != f.K:
        raise DimensionMismatch(f"编码矩阵列数 {g.cols} 与消息数 K={f.K} 不一致")


def solve_row(g: CodeMatrix, f: FittingMatrix, row: int) -> Optional[np.ndarray]:
    """第 row 行（1 起始）的 d_t：(d_t·G) 在需求列为 1、在 Zero 列为 0。"""
    demand = f.demand(row)
    cols = [demand - 1] + [j - 1 for j in f.zero_columns(row)]
    system = Mat(g.field, g.data[:, cols].T)
    rhs = np.zeros(len(cols), dtype=np.int64)
    rhs[0] = 1
    return solve_affine(system, rhs)


def find_decoding(g: CodeMatrix, f: FittingMatrix) -> Optional[DecodingMatrix]:
    _check_code(g, f)
    validate(f)
    rows = []
    for t in range(1, f.L + 1):
        d_t = solve_row(g, f, t)
        if d_t is None:
            logger.debug(f"译码行不可解 | row={t}, demand={f.demand(t)}")
            return None
        rows.append(d_t)
    return Mat(g.field, np.vstack(rows))


def verify_code(g: CodeMatrix, f: FittingMatrix) -> bool:
    return find_decoding(g, f) is not None


def encode(g: CodeMatrix, x: Sequence[int]) -> np.ndarray:
    return mat_vec(g, x)


def receiver_decode(
    d_row: Sequence[int],
    g: CodeMatrix,
    y: Sequence[int],
    side_values: Mapping[int, int],
    row: Sequence[PatternEntry],
) -> int:
    """
    接收者用 d_row 组合收到的 y，再减去边信息的贡献：
        d_row·y − Σ_{j ∈ side} (d_row·G)_j · x_j
    side_values 以 1 起始的消息下标为键；系数非零的边信息缺失时报错。
    """
    p = g.field.p
    d = np.asarray(d_row, dtype=np.int64)
    yv = np.asarray(y, dtype=np.int64)
    if d.shape != (g.rows,) or yv.shape != (g.rows,):
        raise DimensionMismatch(f"d_row / y 长度应为 r={g.rows}")
    if len(row) != g.cols:
        raise DimensionMismatch(f"fitting 行长度 {len(row)} 与 K={g.cols} 不一致")
    coeffs = (d @ g.data) % p
    demand = None
    for j, entry in enumerate(row):
        if entry == PatternEntry.ONE:
            demand = j
        elif entry == PatternEntry.ZERO and coeffs[j] != 0:
            raise InvalidCode(f"d_row·G 在 Zero 位置 {j + 1} 非零")
    if demand is None or coeffs[demand] != 1:
        raise InvalidCode("d_row·G 在需求位置不为 1")
    value = int(d @ yv) % p
    for j, entry in enumerate(row):
        if entry != PatternEntry.STAR or coeffs[j] == 0:
            continue
        if (j + 1) not in side_values:
            raise KeyError(f"缺少边信息 x_{j + 1}")
        value = (value - int(coeffs[j]) * int(side_values[j + 1])) % p
    return value


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    receivers: int
    failures: int
    seed: int


def simulate(
    g: CodeMatrix,
    f: FittingMatrix,
    trials: int,
    seed: int,
    *,
    progress: bool = False,
) -> SimulationReport:
    """随机消息向量（PCG64，种子固定）上做编码 / 逐接收者译码，统计失败次数。"""
    d = find_decoding(g, f)
    if d is None:
        raise InvalidCode("编码矩阵不是该问题的 index code，无法仿真")
    if not fits(mat_mul(d, g), f):
        raise InvalidCode("DG 与 F_X 不匹配")
    p = g.field.p
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = [f.row(t) for t in range(1, f.L + 1)]
    sides = [sorted(f.side(t)) for t in range(1, f.L + 1)]
    demands = [f.demand(t) for t in range(1, f.L + 1)]
    logger.info(f"开始仿真 | trials={trials}, L={f.L}, K={f.K}, r={g.rows}, p={p}, seed={seed}")

    failures = 0
    for _ in tqdm(range(trials), desc="simulate", disable=not progress):
        x = rng.integers(0, p, size=f.K, dtype=np.int64)
        y = encode(g, x)
        for t in range(f.L):
            side_values = {j: int(x[j - 1]) for j in sides[t]}
            got = receiver_decode(d.data[t], g, y, side_values, rows[t])
            if got != int(x[demands[t] - 1]):
                failures += 1
                logger.warning(f"译码失败 | row={t + 1}, demand={demands[t]}, got={got}")
    logger.info(f"仿真完成 | failures={failures}")
    return SimulationReport(trials=trials, receivers=f.L, failures=failures, seed=seed)


def check_field(g: CodeMatrix, field: FieldSpec) -> None:
    if g.field != field:
        raise FieldMismatch(f"编码矩阵域 {g.field} 与问题域 {field} 不一致")
