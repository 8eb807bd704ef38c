# -*- coding: UTF-8 -*-
"""
小规模 Ramsey 检查: 穷举 C 中 A 的拷贝的所有 r-着色, 按 Gray 码顺序每次只改一个拷贝的颜色,
增量维护单色的 B 拷贝数, 出现没有单色 B 的着色即为反例
"""
import logging

from django.conf import settings

from common.utils.timer import FuncTimer
from ultra.exceptions import BudgetExceeded
from ultra.harness.models import Verdict

logger = logging.getLogger("default")


def gray_code(m, r):
    """
    m 位 r 进制反射 Gray 码, 首个码字为全 0 (不产出),
    之后每步产出 (位置, 新值), 共 r**m - 1 步
    """
    digits = [0] * m
    direction = [1] * m
    for _ in range(r**m - 1):
        i = 0
        while True:
            moved = digits[i] + direction[i]
            if 0 <= moved < r:
                break
            direction[i] = -direction[i]
            i += 1
        digits[i] = moved
        yield i, moved


def _guard(m, r, copy_limit, coloring_budget):
    if r == 2 and m > copy_limit:
        raise BudgetExceeded(f"A 的拷贝数{m}超过上限{copy_limit}", copies=m, limit=copy_limit)
    if r**m > coloring_budget:
        raise BudgetExceeded(
            f"着色数{r}^{m}超过预算{coloring_budget}", copies=m, budget=coloring_budget
        )


def ramsey_check(family, a, b, r, c, copy_limit=None, coloring_budget=None):
    """
    C 中 A 的拷贝的每个 r-着色都有单色的 B 拷贝时成立, 否则给出第一个反例着色
    :return: Verdict
    """
    copy_limit = copy_limit or getattr(settings, "RAMSEY_COPY_LIMIT", 24)
    if coloring_budget is None:
        coloring_budget = getattr(settings, "RAMSEY_COLORING_BUDGET", 2**24)
    with FuncTimer() as t:
        a_copies = family.copies(a, c)
        b_copies = family.copies(b, c)
        m = len(a_copies)
        _guard(m, r, copy_limit, coloring_budget)
        inside = [[k for k, x in enumerate(a_copies) if x <= y] for y in b_copies]
        containing = [[] for _ in range(m)]
        for j, members in enumerate(inside):
            for k in members:
                containing[k].append(j)
        logger.debug(f"ramsey_check: A 拷贝数 {m}, B 拷贝数 {len(b_copies)}, 颜色数 {r}")

        coloring = [0] * m
        counts = [[len(members)] + [0] * (r - 1) for members in inside]
        mono = len(b_copies)
        checked = 1
        counterexample = mono == 0
        if not counterexample:
            for pos, new in gray_code(m, r):
                old = coloring[pos]
                coloring[pos] = new
                for j in containing[pos]:
                    size = len(inside[j])
                    was = counts[j][old] == size
                    counts[j][old] -= 1
                    counts[j][new] += 1
                    mono += (counts[j][new] == size) - was
                checked += 1
                if mono == 0:
                    counterexample = True
                    break
    witness = None
    if counterexample:
        witness = [
            {"copy": sorted(x, key=str), "color": color}
            for x, color in zip(a_copies, coloring)
        ]
    return Verdict(
        holds=not counterexample,
        witness=witness,
        copies_a=m,
        copies_b=len(b_copies),
        colorings=checked,
        cost=t.cost,
    )


def ramsey_search(family, a, b, r, size_bound, copy_limit=None, coloring_budget=None):
    """
    按大小从小到大找第一个通过 ramsey_check 的 C
    :return: (C 或 None, Verdict)
    """
    start = max(family.size(b), 1)
    last = None
    for n in range(start, size_bound + 1):
        for c in family.enumerate(n):
            verdict = ramsey_check(family, a, b, r, c, copy_limit, coloring_budget)
            verdict.size = n
            if verdict.holds:
                return c, verdict
            last = verdict
    if last is None:
        last = Verdict(holds=False)
    return None, last
