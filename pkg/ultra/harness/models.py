# -*- coding: UTF-8 -*-
"""检查结果集定义"""
import simplejson as json

from common.utils.extend_json_encoder import ExtendJSONEncoder


class CheckResult:
    """单条检查结果"""

    def __init__(self, name="", level=0, message="", **kwargs):
        """
        :param name: 诊断名, 如 UClosed, OrderAcyclic
        :param level: 0 通过, 1 警告, 2 错误
        :param message: 说明
        """
        self.name = name
        self.level = level
        self.message = message
        # 自定义属性, 比如出错的元素
        for key, value in kwargs.items():
            if not hasattr(self, key):
                setattr(self, key, value)


class CheckSet:
    """一组检查的结果, rows 中是 CheckResult"""

    def __init__(self, subject="", rows=None, **kwargs):
        self.subject = subject
        self.rows = rows or []
        self.warning_count = 0
        self.error_count = 0
        for r in self.rows:
            self._count(r)

    def _count(self, r):
        if r.level == 1:
            self.warning_count += 1
        elif r.level == 2:
            self.error_count += 1

    def append(self, row):
        self.rows.append(row)
        self._count(row)

    def error(self, name, message, **kwargs):
        self.append(CheckResult(name=name, level=2, message=message, **kwargs))

    def passed(self, name, message=""):
        self.append(CheckResult(name=name, level=0, message=message or "ok"))

    @property
    def is_valid(self):
        return self.error_count == 0

    def failed(self):
        """出错的诊断名, 保持顺序去重"""
        names = []
        for r in self.rows:
            if r.level == 2 and r.name not in names:
                names.append(r.name)
        return names

    def json(self):
        return json.dumps(self.to_dict(), cls=ExtendJSONEncoder, bigint_as_string=True)

    def to_dict(self):
        return {
            "subject": self.subject,
            "valid": self.is_valid,
            "error_count": self.error_count,
            "warning_count": self.warning_count,
            "rows": [r.__dict__ for r in self.rows],
        }


class Verdict:
    """ramsey_check / expansion_check 的结论"""

    def __init__(
        self,
        holds=None,
        witness=None,
        copies_a=0,
        copies_b=0,
        colorings=0,
        cost=0.0,
        inconclusive=False,
        **kwargs
    ):
        """
        :param holds: True 成立, False 有反例, inconclusive 时为 None
        :param witness: 反例着色或找到的结构
        :param copies_a: C 中 A 的拷贝数
        :param copies_b: C 中 B 的拷贝数
        :param colorings: 实际检查的着色数
        :param cost: 耗时, 秒
        """
        self.holds = holds
        self.witness = witness
        self.copies_a = copies_a
        self.copies_b = copies_b
        self.colorings = colorings
        self.cost = cost
        self.inconclusive = inconclusive
        for key, value in kwargs.items():
            if not hasattr(self, key):
                setattr(self, key, value)

    @property
    def exit_code(self):
        if self.inconclusive:
            return 2
        return 0 if self.holds else 1

    def json(self):
        return json.dumps(self.to_dict(), cls=ExtendJSONEncoder, bigint_as_string=True)

    def to_dict(self):
        return dict(self.__dict__)
