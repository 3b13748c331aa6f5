"""
异常层级：所有领域错误都继承 IndexCodingError（它本身是 ValueError），
调用方按需捕获；"无解 / 不可达" 一律用 None 返回，不走异常。
"""
from typing import Optional


class IndexCodingError(ValueError):
    pass


class DimensionMismatch(IndexCodingError):
    pass


class FieldMismatch(IndexCodingError):
    pass


class InvalidField(IndexCodingError):
    pass


class InvalidPattern(IndexCodingError):
    pass


class RowOneCount(InvalidPattern):
    def __init__(self, row: int, count: int):
        super().__init__(f"第 {row} 行含 {count} 个 1（应恰好 1 个）")
        self.row = row
        self.count = count


class ColumnUncovered(InvalidPattern):
    def __init__(self, column: int):
        super().__init__(f"第 {column} 列没有任何 1（消息未被请求）")
        self.column = column


class InvalidProblem(IndexCodingError):
    pass


class InvalidCode(IndexCodingError):
    pass


class RankDeficient(IndexCodingError):
    pass


class RankOutOfRange(IndexCodingError):
    pass


class InvalidPermutation(IndexCodingError):
    pass


class NotInvolutory(IndexCodingError):
    pass


class LayoutMismatch(IndexCodingError):
    pass


class CommutationViolation(IndexCodingError):
    def __init__(self, block: int):
        super().__init__(f"第 {block} 个分块与 C 不可交换")
        self.block = block


class ContainmentViolation(IndexCodingError):
    pass


class ResourceGuardExceeded(IndexCodingError):
    def __init__(self, count: int, ceiling: int, what: str = "子空间"):
        super().__init__(f"{what}数量 {count} 超过上限 {ceiling}")
        self.count = count
        self.ceiling = ceiling


class FormatError(IndexCodingError):
    def __init__(self, message: str, *, path: Optional[str] = None, line: Optional[int] = None):
        where = ""
        if path:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())
        self.path = path
        self.line = line
