"""
统一的日志配置
"""
import logging
import sys
from pathlib import Path
from typing import Optional

LOGGER_NAME = "ic_extend"

_FORMATTER = logging.Formatter(
    fmt="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)


def setup_logger(name: str = LOGGER_NAME, log_file: Optional[str] = None, level: int = logging.INFO) -> logging.Logger:
    """
    配置并返回 logger。

    控制台输出走 stderr：stdout 只留给命令结果，保证同输入同输出。
    可重复调用：已有 handler 时只调整级别，并按需追加文件 handler。

    Args:
        name: logger 名称
        log_file: 日志文件路径（可选）
        level: 日志级别
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)
    logger.propagate = False

    console = next((h for h in logger.handlers if getattr(h, "_ic_console", False)), None)
    if console is None:
        console = logging.StreamHandler(sys.stderr)
        console._ic_console = True
        console.setFormatter(_FORMATTER)
        logger.addHandler(console)
    console.setLevel(level)

    if log_file:
        log_path = Path(log_file).resolve()
        existing = [
            h for h in logger.handlers
            if isinstance(h, logging.FileHandler) and Path(h.baseFilename) == log_path
        ]
        if not existing:
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_path, encoding="utf-8")
            file_handler.setFormatter(_FORMATTER)
            logger.addHandler(file_handler)
            existing = [file_handler]
        for h in existing:
            h.setLevel(level)

    return logger


_default_logger: Optional[logging.Logger] = None


def get_logger() -> logging.Logger:
    """获取默认 logger"""
    global _default_logger
    if _default_logger is None:
        _default_logger = setup_logger()
    return _default_logger
