# -*- coding: UTF-8 -*-
"""ultra 的异常定义, 所有异常都继承自 UltraError, 出错的元素放在属性里方便诊断"""


class UltraError(Exception):
    """基类, code 对应命令行退出码"""

    code = 1

    def __init__(self, msg="", **witness):
        super().__init__(msg)
        self.msg = msg
        self.witness = witness

    def to_dict(self):
        return {"error": self.__class__.__name__, "msg": self.msg, **self.witness}


class InvalidStructure(UltraError):
    """JSON 输入格式不正确"""


# lattice
class LatticeError(UltraError):
    pass


class NotAPartialOrder(LatticeError):
    pass


class MeetMissing(LatticeError):
    pass


class JoinMissing(LatticeError):
    pass


class NotDistributive(LatticeError):
    pass


# space
class SpaceError(UltraError):
    pass


class TriangleViolation(SpaceError):
    pass


class NonZeroSelfDistance(SpaceError):
    pass


class ZeroDistanceDistinctPoints(SpaceError):
    pass


class MissingDistance(SpaceError):
    pass


class EquivalenceSystemError(SpaceError):
    pass


class ResultViolatesTriangle(SpaceError):
    pass


class LatticeMismatch(UltraError):
    pass


# sqo
class SqoError(UltraError):
    pass


class ComparableAcrossTop(SqoError):
    pass


class NotLinearWithinTop(SqoError):
    pass


class CycleDetected(SqoError):
    pass


class TopBottomMismatch(SqoError):
    pass


class GOutOfRange(SqoError):
    pass


class NotWellEquipped(SqoError):
    pass


class AmbiguousCover(SqoError):
    pass


# eqlift / kstruct / transfer
class StructureError(UltraError):
    pass


class NoCommonClass(StructureError):
    pass


class EmbeddingFailed(StructureError):
    pass


class FactorsNotClosed(StructureError):
    pass


class NotContaining(StructureError):
    pass


class NotClosed(StructureError):
    pass


class FormulaIllTyped(StructureError):
    pass


class ParamMismatch(StructureError):
    pass


class NotInKPrime(StructureError):
    pass


class NotALift(StructureError):
    pass


class NotMeetIrreducible(StructureError):
    pass


class ConstraintViolated(StructureError):
    """complete 的前置约束不满足, name 为约束名"""

    def __init__(self, name, msg="", **witness):
        super().__init__(msg or f"约束{name}不满足", name=name, **witness)
        self.name = name


class OrderCycle(ConstraintViolated):
    def __init__(self, msg="", **witness):
        super().__init__("OrderAcyclic", msg or "顺序关系存在环", **witness)


# 预算类异常退出码为2
class BudgetExceeded(UltraError):
    code = 2


class SaturationBudgetExceeded(BudgetExceeded):
    pass
