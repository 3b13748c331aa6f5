import os
from dataclasses import dataclass

from .logger import get_logger

logger = get_logger()


@dataclass(frozen=True)
class ToolkitConfig:
    # minrank 资源上限：单个秩 r 的子空间数（Gaussian 二项式）
    subspace_guard: int = 10**9
    # p^K 不超过该值时才构建向量化的行覆盖表
    cover_table_limit: int = 1 << 22
    # 每个 numpy 批次允许的元素数
    chunk_cells: int = 1 << 22
    workers: int = 1
    progress: bool = True


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if not raw:
        return default
    try:
        value = int(float(raw)) if "e" in raw.lower() else int(raw)
    except ValueError:
        logger.warning(f"环境变量无法解析，使用默认值 | {name}={raw!r}, default={default}")
        return default
    if value < 1:
        logger.warning(f"环境变量必须为正，使用默认值 | {name}={raw!r}, default={default}")
        return default
    return value


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    return raw.strip().lower() not in ("0", "false", "no", "off")


def load_config_from_env() -> ToolkitConfig:
    return ToolkitConfig(
        subspace_guard=_env_int("IC_EXT_GUARD", 10**9),
        cover_table_limit=_env_int("IC_EXT_TABLE_LIMIT", 1 << 22),
        chunk_cells=_env_int("IC_EXT_CHUNK", 1 << 22),
        workers=_env_int("IC_EXT_WORKERS", 1),
        progress=_env_bool("IC_EXT_PROGRESS", True),
    )
