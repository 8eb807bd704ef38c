# -*- coding: UTF-8 -*-
"""扩张性质的小规模检查与见证搜索"""
import logging

from django.conf import settings

from common.utils.timer import FuncTimer
from ultra.harness.models import Verdict
from ultra.harness.ordered import expansions, ordered_embeddings
from ultra.harness.spaces import SpaceFamily

logger = logging.getLogger("default")


def enumerate_expansions(space, language):
    """空间在语言下的全部扩张, 不去同构"""
    return list(expansions(space, language))


def expansion_check(a_expanded, b_base, expander=None, report=False):
    """
    A* 嵌入 B 的每一个扩张时为真
    :param expander: 空间 -> 扩张列表, 默认按 A* 的语言穷举
    :param report: 为真时返回 Verdict, witness 为第一个不含 A* 的扩张
    """
    expander = expander or (lambda base: enumerate_expansions(base, a_expanded.language))
    with FuncTimer() as t:
        checked = 0
        failing = None
        for expanded in expander(b_base):
            checked += 1
            if not ordered_embeddings(a_expanded, expanded):
                failing = expanded
                break
    holds = failing is None
    if not report:
        return holds
    return Verdict(holds=holds, witness=failing, expansions=checked, cost=t.cost)


def expansion_search(a_expanded, lattice, language=None, max_size=None, budget=None):
    """
    按大小枚举空间 B, 返回第一个满足扩张性质的 B
    找不到时 inconclusive, 见证没有已知的有限上界
    """
    language = language or a_expanded.language
    max_size = max_size or getattr(settings, "EXPANSION_SEARCH_SIZE", 4)
    family = SpaceFamily(lattice, budget=budget)
    with FuncTimer() as t:
        for n in range(len(a_expanded), max_size + 1):
            for base in family.enumerate(n):
                if expansion_check(
                    a_expanded, base, lambda s: enumerate_expansions(s, language)
                ):
                    logger.debug(f"expansion_search 在大小 {n} 找到见证")
                    return Verdict(holds=True, witness=base, size=n, cost=t.elapsed())
    logger.warning(f"expansion_search 在大小 {max_size} 以内没有找到见证")
    return Verdict(holds=None, inconclusive=True, size=max_size, cost=t.cost)
