import argparse
import dataclasses
import logging
import sys
from typing import List, Optional

from ic_extend.config import load_config_from_env
from ic_extend.errors import IndexCodingError, ResourceGuardExceeded
from ic_extend.gf_core import FieldSpec
from ic_extend.logger import setup_logger
from ic_extend.runner import (
    parse_cond2,
    parse_positions,
    run_extend_general,
    run_extend_involutory,
    run_extend_replicate,
    run_extend_systematic,
    run_gen_abc,
    run_minrank,
    run_simulate,
    run_validate,
    run_verify,
)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_GUARD = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    # argparse 默认以 2 退出，和资源上限的退出码冲突
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(
        prog="run.py",
        description="index coding 工具：fitting matrix 校验、minrank、码验证、秩不变扩展与 ABC 问题族生成",
    )
    ap.add_argument("--out", default="out", help="输出目录（默认 out）")
    ap.add_argument("--workers", type=int, default=None, help="minrank 并行进程数（默认取 IC_EXT_WORKERS 或 1）")
    ap.add_argument("--no-progress", action="store_true", help="关闭 tqdm 进度条")
    ap.add_argument("--log-file", default=None, help="日志文件路径（可选）")
    ap.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="日志级别（默认INFO）")

    sub = ap.add_subparsers(dest="command", metavar="COMMAND", parser_class=_ArgumentParser)
    sub.required = True

    def with_field(p):
        p.add_argument("--field", type=int, default=None, help="素数域 GF(p)；JSON 问题自带 p")
        return p

    p = with_field(sub.add_parser("validate", help="检查 fitting matrix 是否合法"))
    p.add_argument("problem")

    p = with_field(sub.add_parser("minrank", help="精确 minrank 与见证码"))
    p.add_argument("problem")
    p.add_argument("--max-rank", type=int, default=None)
    p.add_argument("--guard", type=int, default=None, help="单个秩的子空间数上限（覆盖 IC_EXT_GUARD）")

    p = with_field(sub.add_parser("verify", help="验证 G 是否为该问题的 index code，成功时输出 D"))
    p.add_argument("problem")
    p.add_argument("--code", required=True)

    p = with_field(sub.add_parser("extend-replicate", help="m 阶复制扩展"))
    p.add_argument("problem")
    p.add_argument("--code", required=True)
    p.add_argument("-m", type=int, required=True)

    p = with_field(sub.add_parser("extend-involutory", help="按分块与对合置换的结构化 2 阶扩展"))
    p.add_argument("problem")
    p.add_argument("--code", required=True)
    p.add_argument("--perm", required=True, help='对合置换的轮换记号，例如 "(13)(2)"')
    p.add_argument("--blocks", required=True, help='分块，例如 "1-3,4-6,7-9,10-12"')

    p = with_field(sub.add_parser("extend-systematic", help="先化为系统形式再做结构化 2 阶扩展"))
    p.add_argument("problem")
    p.add_argument("--code", required=True)
    p.add_argument("--perm", required=True)

    p = with_field(sub.add_parser("extend-general", help="一般对合 2 阶扩展（B 取 DCG 的支撑）"))
    p.add_argument("problem")
    p.add_argument("--code", required=True)
    p.add_argument("--perm", required=True)

    p = with_field(sub.add_parser("gen-abc", help="生成 Type_A/B/C 分块问题及其闭式码"))
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--types", default=None, help="块类型串，例如 ABBC")
    p.add_argument("--perm", default=None)
    p.add_argument("--cond2", default="", help='走条件 2 的 Type_C 接收者，例如 "4:1,4:3"')
    p.add_argument("--widen", default="", help='额外 X 的位置，例如 "2,10;4,2"')
    p.add_argument("--example1", action="store_true", help="内置示例：ABBC、(13)(2)、条件 2 接收者及 6 处额外 X")

    p = with_field(sub.add_parser("simulate", help="随机消息上的编码 / 译码仿真"))
    p.add_argument("problem")
    p.add_argument("--code", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    return ap


def dispatch(args: argparse.Namespace) -> int:
    cfg = load_config_from_env()
    overrides = {}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.no_progress:
        overrides["progress"] = False
    if getattr(args, "guard", None) is not None:
        overrides["subspace_guard"] = args.guard
    cfg = dataclasses.replace(cfg, **overrides)

    field = FieldSpec(args.field) if getattr(args, "field", None) is not None else None
    out = args.out
    cmd = args.command

    if cmd == "validate":
        return run_validate(args.problem, field=field)
    if cmd == "minrank":
        return run_minrank(cfg, args.problem, out_dir=out, field=field, max_rank=args.max_rank)
    if cmd == "verify":
        return run_verify(args.problem, args.code, out_dir=out, field=field)
    if cmd == "extend-replicate":
        return run_extend_replicate(args.problem, args.code, args.m, out_dir=out, field=field)
    if cmd == "extend-involutory":
        return run_extend_involutory(args.problem, args.code, args.perm, args.blocks, out_dir=out, field=field)
    if cmd == "extend-systematic":
        return run_extend_systematic(args.problem, args.code, args.perm, out_dir=out, field=field)
    if cmd == "extend-general":
        return run_extend_general(args.problem, args.code, args.perm, out_dir=out, field=field)
    if cmd == "gen-abc":
        if not args.example1 and (args.r is None or not args.types or not args.perm):
            raise UsageError("gen-abc 需要 --r、--types、--perm，或使用 --example1")
        if args.example1 and field is not None and field.p != 2:
            raise UsageError(f"--example1 固定在 GF(2) 上，不能与 --field {field.p} 同用")
        return run_gen_abc(
            out_dir=out,
            r=args.r,
            types=args.types,
            perm=args.perm,
            field=field,
            cond2=parse_cond2(args.cond2),
            stars=parse_positions(args.widen),
            example1=args.example1,
        )
    if cmd == "simulate":
        return run_simulate(cfg, args.problem, args.code, args.trials, args.seed, out_dir=out, field=field)
    raise UsageError(f"未知命令: {cmd}")


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logger = setup_logger(log_file=args.log_file, level=getattr(logging, args.log_level.upper()))
    logger.info(f"命令启动 | command={args.command}, out={args.out}")

    try:
        return dispatch(args)
    except ResourceGuardExceeded as e:
        logger.error(f"超过资源上限 | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except UsageError as e:
        logger.error(f"用法错误 | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"输入不可用 | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except IndexCodingError as e:
        logger.error(f"命令失败 | {type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FALSE
    except ValueError as e:
        logger.error(f"参数无效 | {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
