"""
小规模 fitting matrix 的精确 minrank（作为最优性 / 秩不变性的真值 oracle）。

做法：按规范 RREF 基枚举 GF(p)^K 的全部 r 维子空间，逐个判定能否承载 index code。
子空间 V 可行 ⇔ 对每一行 t，V 中存在向量 v 在需求列非零、在该行所有 Zero 列为 0
（按需求列系数归一即得 find_decoding 的 d_t）。为此预先构建"行覆盖表"：
GF(p)^K 中每个向量能服务哪些行（按位打包），子空间的判定就变成对其射影点
查表再按位或。p^K 超出 cover_table_limit 时退回逐基调用 find_decoding。
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .config import ToolkitConfig, load_config_from_env
from .errors import ContainmentViolation, InvalidCode, RankOutOfRange, ResourceGuardExceeded
from .gf_core import GF2, FieldSpec, Mat, mat_rank
from .logger import get_logger
from .problem import FittingMatrix, PatternEntry, validate
from .verifier import CodeMatrix, find_decoding, verify_code

logger = get_logger()


@dataclass(frozen=True)
class MinrankResult:
    value: int
    witness: CodeMatrix
    # certificate[r-1] 为 True 表示已穷举证明不存在 r 行的码（r < value）
    certificate: Tuple[bool, ...]
    subspaces_checked: int = 0


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """GF(q)^n 中 k 维子空间的个数。"""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def free_positions(pivots: Sequence[int], K: int) -> List[Tuple[int, int]]:
    """给定主元列（0 起始、递增）时 RREF 基中可自由取值的位置，按行优先排列。"""
    pivot_set = set(pivots)
    return [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, K) if j not in pivot_set]


def _bases_batch(pivots: Sequence[int], free: Sequence[Tuple[int, int]], p: int, K: int, start: int, stop: int) -> np.ndarray:
    """规范顺序中第 [start, stop) 个基（同一主元组内），形状 (N, r, K)。首个自由位为最高位。"""
    r = len(pivots)
    n = np.arange(start, stop, dtype=np.int64)
    bases = np.zeros((n.size, r, K), dtype=np.int64)
    bases[:, np.arange(r), list(pivots)] = 1
    if free:
        powers = p ** np.arange(len(free) - 1, -1, -1, dtype=np.int64)
        digits = (n[:, None] // powers[None, :]) % p
        fi = [i for i, _ in free]
        fj = [j for _, j in free]
        bases[:, fi, fj] = digits
    return bases


def iter_rref_bases(K: int, r: int, field: FieldSpec = GF2) -> Iterator[Mat]:
    """按规范顺序逐个产出 r×K 的 RREF 基：主元组字典序，组内自由位按 p 进制计数。"""
    p = field.p
    for pivots in combinations(range(K), r):
        free = free_positions(pivots, K)
        total = p ** len(free)
        for start in range(0, total, 4096):
            for b in _bases_batch(pivots, free, p, K, start, min(total, start + 4096)):
                yield Mat(field, b)


def _projective_coefficients(r: int, p: int) -> np.ndarray:
    """GF(p)^r 的射影点代表（首个非零分量为 1），形状 (S, r)。"""
    coeffs = [c for c in product(range(p), repeat=r) if any(c) and c[next(i for i, v in enumerate(c) if v)] == 1]
    return np.array(coeffs, dtype=np.int64).reshape(len(coeffs), r)


class RowCoverTable:
    """GF(p)^K 每个向量可服务的行集合，按 64 位字打包。"""

    def __init__(self, f: FittingMatrix, field: FieldSpec, chunk_cells: int = 1 << 22):
        p, K, L = field.p, f.K, f.L
        self.p = p
        self.K = K
        self.words = (L + 63) // 64
        self.weights = p ** np.arange(K - 1, -1, -1, dtype=np.int64)
        size = p ** K
        demand_cols = [f.demand(t) - 1 for t in range(1, L + 1)]
        zero_cols = [np.flatnonzero(f.grid[t] == PatternEntry.ZERO) for t in range(L)]

        table = np.zeros((size, self.words), dtype=np.uint64)
        step = max(1, chunk_cells // max(1, K))
        for start in range(0, size, step):
            stop = min(size, start + step)
            idx = np.arange(start, stop, dtype=np.int64)
            nonzero = ((idx[:, None] // self.weights[None, :]) % p) != 0
            for t in range(L):
                serves = nonzero[:, demand_cols[t]].copy()
                if zero_cols[t].size:
                    serves &= ~nonzero[:, zero_cols[t]].any(axis=1)
                table[start:stop, t // 64] |= serves.astype(np.uint64) << np.uint64(t % 64)
        self.table = table

        full = np.zeros(self.words, dtype=np.uint64)
        for t in range(L):
            full[t // 64] |= np.uint64(1) << np.uint64(t % 64)
        self.full = full

    def feasible(self, bases: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        """bases: (N, r, K) → 长度 N 的布尔数组。"""
        span = np.einsum("sr,nrk->nsk", coeffs, bases) % self.p
        codes = span @ self.weights
        cover = np.bitwise_or.reduce(self.table[codes], axis=1)
        return (cover == self.full[None, :]).all(axis=1)


# 工作进程内的覆盖表（由 initializer 构建）
_WORKER_STATE: dict = {}


def _init_worker(f: FittingMatrix, field: FieldSpec, chunk_cells: int) -> None:
    _WORKER_STATE["table"] = RowCoverTable(f, field, chunk_cells)
    _WORKER_STATE["chunk_cells"] = chunk_cells


def _scan_pivot_set(
    table: RowCoverTable,
    pivots: Tuple[int, ...],
    coeffs: np.ndarray,
    chunk_cells: int,
) -> Tuple[Optional[np.ndarray], int]:
    """扫描一个主元组，返回 (规范顺序中第一个可行基或 None, 已检查的基数)。"""
    K, p = table.K, table.p
    free = free_positions(pivots, K)
    total = p ** len(free)
    step = max(1, chunk_cells // max(1, coeffs.shape[0] * max(K, table.words)))
    checked = 0
    for start in range(0, total, step):
        stop = min(total, start + step)
        bases = _bases_batch(pivots, free, p, K, start, stop)
        ok = table.feasible(bases, coeffs)
        hits = np.flatnonzero(ok)
        if hits.size:
            return bases[hits[0]], checked + int(hits[0]) + 1
        checked += stop - start
    return None, checked


def _scan_in_worker(args) -> Tuple[Optional[np.ndarray], int]:
    pivots, coeffs = args
    return _scan_pivot_set(_WORKER_STATE["table"], pivots, coeffs, _WORKER_STATE["chunk_cells"])


def _check_rank_args(f: FittingMatrix, r: int, field: FieldSpec, cfg: ToolkitConfig) -> int:
    validate(f)
    if not 1 <= r <= f.K:
        raise RankOutOfRange(f"r 必须在 [1, K={f.K}] 内: r={r}")
    count = gaussian_binomial(f.K, r, field.p)
    if count > cfg.subspace_guard:
        raise ResourceGuardExceeded(count, cfg.subspace_guard)
    return count


def is_achievable(
    f: FittingMatrix,
    r: int,
    field: FieldSpec = GF2,
    config: Optional[ToolkitConfig] = None,
) -> Optional[CodeMatrix]:
    """规范枚举顺序中第一个可行的 r 行码；不存在时返回 None。"""
    return _search_rank(f, r, field, config or load_config_from_env())[0]


def _search_rank(f: FittingMatrix, r: int, field: FieldSpec, cfg: ToolkitConfig) -> Tuple[Optional[CodeMatrix], int]:
    count = _check_rank_args(f, r, field, cfg)
    p, K = field.p, f.K
    logger.info(f"开始子空间枚举 | K={K}, L={f.L}, r={r}, p={p}, 子空间数={count}")

    if p ** K > cfg.cover_table_limit:
        logger.warning(f"p^K 超过覆盖表上限，逐基调用 find_decoding | p^K={p ** K}, limit={cfg.cover_table_limit}")
        checked = 0
        for basis in tqdm(iter_rref_bases(K, r, field), total=count, desc=f"minrank r={r}", disable=not cfg.progress):
            checked += 1
            if find_decoding(basis, f) is not None:
                return basis, checked
        return None, checked

    coeffs = _projective_coefficients(r, p)
    pivot_sets = list(combinations(range(K), r))
    found: Optional[np.ndarray] = None
    checked = 0
    bar = tqdm(total=len(pivot_sets), desc=f"minrank r={r}", disable=not cfg.progress)
    try:
        if cfg.workers > 1 and len(pivot_sets) > 1:
            with ProcessPoolExecutor(
                max_workers=cfg.workers,
                initializer=_init_worker,
                initargs=(f, field, cfg.chunk_cells),
            ) as pool:
                # map 按提交顺序返回，第一个命中即规范顺序的第一个
                for basis, n in pool.map(_scan_in_worker, [(ps, coeffs) for ps in pivot_sets]):
                    bar.update(1)
                    checked += n
                    if basis is not None:
                        found = basis
                        pool.shutdown(wait=False, cancel_futures=True)
                        break
        else:
            table = RowCoverTable(f, field, cfg.chunk_cells)
            for ps in pivot_sets:
                basis, n = _scan_pivot_set(table, ps, coeffs, cfg.chunk_cells)
                bar.update(1)
                checked += n
                if basis is not None:
                    found = basis
                    break
    finally:
        bar.close()

    if found is None:
        logger.info(f"秩 r 不可达 | r={r}, 已检查={checked}")
        return None, checked
    witness = Mat(field, found)
    if not verify_code(witness, f):
        raise InvalidCode(f"覆盖表判定可行但 find_decoding 失败（内部不一致）: {witness}")
    logger.info(f"找到秩 r 的码 | r={r}, 已检查={checked}")
    return witness, checked


def minrank(
    f: FittingMatrix,
    field: FieldSpec = GF2,
    config: Optional[ToolkitConfig] = None,
    *,
    max_rank: Optional[int] = None,
) -> Optional[MinrankResult]:
    """
    最小的可达 r。max_rank 给定且 [1, max_rank] 内全不可达时返回 None。
    """
    cfg = config or load_config_from_env()
    validate(f)
    upper = f.K if max_rank is None else min(max_rank, f.K)
    certificate: List[bool] = []
    total_checked = 0
    for r in range(1, upper + 1):
        witness, checked = _search_rank(f, r, field, cfg)
        total_checked += checked
        if witness is not None:
            logger.info(f"minrank 完成 | value={r}, 共检查子空间={total_checked}")
            return MinrankResult(value=r, witness=witness, certificate=tuple(certificate), subspaces_checked=total_checked)
        certificate.append(True)
    logger.info(f"minrank 在上限内未找到 | max_rank={upper}")
    return None


def brute_force_minrank(f: FittingMatrix, field: FieldSpec = GF2, config: Optional[ToolkitConfig] = None) -> int:
    """对全部 X 赋值（1 固定为 1）取最小秩；仅用于交叉验证。"""
    cfg = config or load_config_from_env()
    validate(f)
    p = field.p
    star_pos = np.argwhere(f.grid == PatternEntry.STAR)
    count = p ** len(star_pos)
    if count > cfg.subspace_guard:
        raise ResourceGuardExceeded(count, cfg.subspace_guard, what="补全")
    base = (f.grid == PatternEntry.ONE).astype(np.int64)
    best = f.K
    for values in product(range(p), repeat=len(star_pos)):
        m = base.copy()
        if len(star_pos):
            m[star_pos[:, 0], star_pos[:, 1]] = values
        best = min(best, mat_rank(Mat(field, m)))
        if best == 1:
            break
    return best


def minrank_lower_bound_submatrix(f_ext: FittingMatrix, f: FittingMatrix) -> bool:
    """检查 f 恰是 f_ext 的左上 L×K 子块（minrk(F_ext) ≥ minrk(F) 的前提）。"""
    if f_ext.L < f.L or f_ext.K < f.K:
        raise ContainmentViolation(f"扩展 {f_ext.L}×{f_ext.K} 小于原问题 {f.L}×{f.K}")
    if not np.array_equal(f_ext.grid[: f.L, : f.K], f.grid):
        raise ContainmentViolation("扩展的左上子块与原 fitting matrix 不一致")
    return True


def certify_rank_invariance(f: FittingMatrix, f_ext: FittingMatrix, g_ext: CodeMatrix, seed_minrank: int) -> bool:
    """
    下界（子块包含）+ 上界（同长度已验证的码）⇒ minrk(f_ext) == seed_minrank。
    """
    try:
        minrank_lower_bound_submatrix(f_ext, f)
    except ContainmentViolation as e:
        logger.warning(f"秩不变性认证失败 | reason={e}")
        return False
    if g_ext.rows != seed_minrank:
        logger.warning(f"秩不变性认证失败 | 码长={g_ext.rows}, minrank={seed_minrank}")
        return False
    return verify_code(g_ext, f_ext)
