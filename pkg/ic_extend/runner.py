"""
各子命令的编排：读输入、调用各模块、把矩阵文件和 summary.json 写进输出目录，
结果文本打印到 stdout。返回值即进程退出码（0 成功，1 判定为假）。
"""
import json
import os
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .abc_family import (
    AbcSpec,
    BlockType,
    TypeCChoice,
    abc_code,
    abc_problem,
    example1_spec,
    example1_stars,
    spec_to_json,
)
from .config import ToolkitConfig
from .errors import ContainmentViolation, FormatError, InvalidPattern
from .extensions import (
    ExtensionResult,
    derive_bxx,
    involutory_block_extension,
    parse_block_layout,
    replicate_extension,
    systematic_extension,
)
from .gf_core import FieldSpec, format_mat, load_mat, save_mat
from .involutions import format_cycles, parse_involution, to_matrix
from .logger import get_logger
from .minrank import minrank, minrank_lower_bound_submatrix
from .problem import FittingMatrix, format_pattern, load_problem, save_pattern, validate, widen
from .verifier import CodeMatrix, check_field, find_decoding, simulate

logger = get_logger()


def _write_summary(out_dir: str, payload: Dict) -> str:
    os.makedirs(out_dir, exist_ok=True)
    out_path = os.path.join(out_dir, "summary.json")
    with open(out_path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"写出 summary | path={out_path}")
    return out_path


def _load_pair(problem_path: str, code_path: str, field: Optional[FieldSpec]) -> Tuple[FittingMatrix, CodeMatrix, FieldSpec]:
    g = load_mat(code_path)
    f, pf = load_problem(problem_path, field or g.field)
    check_field(g, pf)
    validate(f)
    logger.info(f"读取输入 | problem={problem_path}, code={code_path}, L={f.L}, K={f.K}, r={g.rows}, p={pf.p}")
    return f, g, pf


def parse_positions(text: str) -> List[Tuple[int, int]]:
    """ "2,10;4,2" → [(2, 10), (4, 2)]，1 起始。"""
    out: List[Tuple[int, int]] = []
    for part in (text or "").split(";"):
        part = part.strip()
        if not part:
            continue
        toks = [t for t in part.replace(" ", ",").split(",") if t]
        if len(toks) != 2:
            raise FormatError(f"位置应写成 'row,col': {part!r}")
        try:
            out.append((int(toks[0]), int(toks[1])))
        except ValueError:
            raise FormatError(f"位置含非整数: {part!r}") from None
    return out


def parse_cond2(text: str) -> List[Tuple[int, int]]:
    """ "4:1,4:3" → [(4, 1), (4, 3)]：走条件 2 的 (Type_C 块号, 块内消息号)。"""
    out: List[Tuple[int, int]] = []
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        try:
            blk, k = (int(t) for t in part.split(":"))
        except ValueError:
            raise FormatError(f"--cond2 项应写成 'block:k': {part!r}") from None
        out.append((blk, k))
    return out


# ---------------------------------------------------------------------------
# 子命令
# ---------------------------------------------------------------------------

def run_validate(problem_path: str, *, field: Optional[FieldSpec] = None) -> int:
    try:
        f, pf = load_problem(problem_path, field)
        validate(f)
    except InvalidPattern as e:
        logger.warning(f"fitting matrix 不合法 | path={problem_path}, reason={e}")
        print(f"invalid: {e}")
        return 1
    print(f"valid: L={f.L}, K={f.K}, p={pf.p}")
    return 0


def run_minrank(
    cfg: ToolkitConfig,
    problem_path: str,
    *,
    out_dir: str,
    field: Optional[FieldSpec] = None,
    max_rank: Optional[int] = None,
) -> int:
    f, pf = load_problem(problem_path, field)
    result = minrank(f, pf, cfg, max_rank=max_rank)
    payload = {"command": "minrank", "problem": os.path.basename(problem_path), "L": f.L, "K": f.K, "p": pf.p}
    if result is None:
        print(f"minrank > {max_rank}")
        payload.update({"minrank": None, "max_rank": max_rank})
        _write_summary(out_dir, payload)
        return 1
    code_path = save_mat(result.witness, os.path.join(out_dir, "minrank.code"))
    print(f"minrank = {result.value}")
    print(format_mat(result.witness), end="")
    payload.update(
        {
            "minrank": result.value,
            "certificate": list(result.certificate),
            "subspaces_checked": result.subspaces_checked,
            "witness": os.path.basename(code_path),
        }
    )
    _write_summary(out_dir, payload)
    return 0


def run_verify(problem_path: str, code_path: str, *, out_dir: str, field: Optional[FieldSpec] = None) -> int:
    f, g, pf = _load_pair(problem_path, code_path, field)
    d = find_decoding(g, f)
    payload = {"command": "verify", "problem": os.path.basename(problem_path), "code": os.path.basename(code_path)}
    if d is None:
        print("verify: false")
        payload["verified"] = False
        _write_summary(out_dir, payload)
        return 1
    save_mat(d, os.path.join(out_dir, "decoding.mat"))
    print("verify: true")
    print(format_mat(d), end="")
    payload.update({"verified": True, "decoding": "decoding.mat"})
    _write_summary(out_dir, payload)
    return 0


def contains_seed(f: FittingMatrix, f_ext: FittingMatrix) -> bool:
    """f 是否为 f_ext 的左上子块（下界 minrk(f_ext) >= minrk(f) 的前提）。"""
    try:
        return minrank_lower_bound_submatrix(f_ext, f)
    except ContainmentViolation as e:
        logger.warning(f"扩展不含原问题 | reason={e}")
        return False


def _emit_extension(kind: str, f: FittingMatrix, res: ExtensionResult, out_dir: str, extra: Dict) -> int:
    save_pattern(res.f_ext, os.path.join(out_dir, "f_ext.fx"))
    save_mat(res.g_ext, os.path.join(out_dir, "g_ext.code"))
    files = ["f_ext.fx", "g_ext.code"]
    if res.b is not None:
        save_pattern(res.b, os.path.join(out_dir, "b.fx"))
        files.append("b.fx")
    invariant = contains_seed(f, res.f_ext)
    print(f"extension: {kind}, f_ext={res.f_ext.L}x{res.f_ext.K}, r={res.g_ext.rows}, verified=true")
    if res.b is not None:
        print(format_pattern(res.b), end="")
    payload = {
        "command": f"extend-{kind}",
        "L_ext": res.f_ext.L,
        "K_ext": res.f_ext.K,
        "r": res.g_ext.rows,
        "verified": True,
        "contains_seed": invariant,
        "files": files,
    }
    payload.update(extra)
    _write_summary(out_dir, payload)
    return 0


def run_extend_replicate(problem_path: str, code_path: str, m: int, *, out_dir: str, field: Optional[FieldSpec] = None) -> int:
    f, g, _ = _load_pair(problem_path, code_path, field)
    return _emit_extension("replicate", f, replicate_extension(f, g, m), out_dir, {"m": m})


def run_extend_involutory(
    problem_path: str,
    code_path: str,
    perm: str,
    blocks: str,
    *,
    out_dir: str,
    field: Optional[FieldSpec] = None,
) -> int:
    f, g, _ = _load_pair(problem_path, code_path, field)
    sigma = parse_involution(perm, g.rows)
    layout = parse_block_layout(blocks, f.K, sigma.size)
    res = involutory_block_extension(f, g, layout, sigma)
    return _emit_extension("involutory", f, res, out_dir, {"perm": format_cycles(sigma), "blocks": [list(b) for b in layout.blocks]})


def run_extend_systematic(problem_path: str, code_path: str, perm: str, *, out_dir: str, field: Optional[FieldSpec] = None) -> int:
    f, g, _ = _load_pair(problem_path, code_path, field)
    sigma = parse_involution(perm, g.rows)
    res = systematic_extension(f, g, sigma)
    return _emit_extension("systematic", f, res, out_dir, {"perm": format_cycles(sigma)})


def run_extend_general(problem_path: str, code_path: str, perm: str, *, out_dir: str, field: Optional[FieldSpec] = None) -> int:
    f, g, pf = _load_pair(problem_path, code_path, field)
    sigma = parse_involution(perm, g.rows)
    res = derive_bxx(f, g, to_matrix(sigma, pf))
    return _emit_extension("general", f, res, out_dir, {"perm": format_cycles(sigma)})


def run_gen_abc(
    *,
    out_dir: str,
    r: Optional[int] = None,
    types: Optional[str] = None,
    perm: Optional[str] = None,
    field: Optional[FieldSpec] = None,
    cond2: Iterable[Tuple[int, int]] = (),
    stars: Sequence[Tuple[int, int]] = (),
    example1: bool = False,
) -> int:
    if example1:
        spec = example1_spec()
        stars = list(example1_stars()) + list(stars)
    else:
        spec = AbcSpec(
            r=r,
            types=tuple(BlockType(t) for t in types.upper()),
            sigma=parse_involution(perm, r),
            field=field or FieldSpec(2),
            typec_choice=tuple(((blk, k), TypeCChoice.COND2) for blk, k in cond2),
        )
    f = abc_problem(spec)
    if stars:
        f = widen(f, stars)
    g = abc_code(spec)
    save_pattern(f, os.path.join(out_dir, "abc.fx"))
    save_mat(g, os.path.join(out_dir, "abc.code"))
    with open(os.path.join(out_dir, "abc.json"), "w", encoding="utf-8") as fp:
        json.dump(spec_to_json(spec), fp, ensure_ascii=False, indent=2, sort_keys=True)
        fp.write("\n")
    print(format_pattern(f), end="")
    print(format_mat(g), end="")
    _write_summary(
        out_dir,
        {
            "command": "gen-abc",
            "spec": spec_to_json(spec),
            "widened": [list(s) for s in stars],
            "files": ["abc.fx", "abc.code", "abc.json"],
        },
    )
    logger.info(f"生成 ABC 问题 | r={spec.r}, T={spec.T}, sigma={format_cycles(spec.sigma)}, stars={len(stars)}")
    return 0


def run_simulate(
    cfg: ToolkitConfig,
    problem_path: str,
    code_path: str,
    trials: int,
    seed: int,
    *,
    out_dir: str,
    field: Optional[FieldSpec] = None,
) -> int:
    f, g, _ = _load_pair(problem_path, code_path, field)
    report = simulate(g, f, trials, seed, progress=cfg.progress)
    print(f"failures: {report.failures}")
    _write_summary(
        out_dir,
        {
            "command": "simulate",
            "trials": report.trials,
            "receivers": report.receivers,
            "failures": report.failures,
            "seed": report.seed,
        },
    )
    return 0 if report.failures == 0 else 1
