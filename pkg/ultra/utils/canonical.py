# -*- coding: UTF-8 -*-
"""
小结构的规范形式: 穷举重标号取字典序最小的编码, 用于同构去重
只适合 6 个点以内的结构
"""
from itertools import combinations, permutations

from ultra.exceptions import BudgetExceeded

MAX_RELABEL = 8


def _guard(n):
    if n > MAX_RELABEL:
        raise BudgetExceeded(f"规范形式只支持{MAX_RELABEL}个元素以内, 当前{n}个", size=n)


def canonical_space(space):
    points = list(space.points)
    _guard(len(points))
    best = None
    for perm in permutations(points):
        code = tuple(space.dist(perm[i], perm[j]) for i, j in combinations(range(len(perm)), 2))
        if best is None or code < best:
            best = code
    return (len(points), best or ())


def _ordered_code(ordered, perm):
    position = {p: k for k, p in enumerate(perm)}
    code = [ordered.space.dist(perm[i], perm[j]) for i, j in combinations(range(len(perm)), 2)]
    for slot in sorted(ordered.language.slots):
        o = ordered.orders[slot]
        code.append(
            tuple(
                sorted(
                    (position[x], position[y])
                    for x in perm
                    for y in perm
                    if x != y and o.less(x, y)
                )
            )
        )
    return tuple(code)


def canonical_ordered(ordered):
    points = list(ordered.points)
    _guard(len(points))
    best = None
    for perm in permutations(points):
        code = _ordered_code(ordered, perm)
        if best is None or code < best:
            best = code
    return (len(points), best or ())


def ordered_isomorphism(a, b):
    """有序空间之间的同构, 不存在时返回 None"""
    if len(a) != len(b) or a.language != b.language:
        return None
    _guard(len(a))
    target = _ordered_code(b, list(b.points))
    for perm in permutations(a.points):
        if _ordered_code(a, perm) == target:
            return dict(zip(perm, b.points))
    return None


def ordered_isomorphic(a, b):
    return ordered_isomorphism(a, b) is not None


def canonical_k0(k):
    """同一层级内的元素重标号"""
    elements = list(k.elements)
    _guard(len(elements))
    best = None
    levels = sorted(elements, key=lambda x: k.sorts[x])
    for perm in permutations(levels):
        if any(k.sorts[a] != k.sorts[b] for a, b in zip(perm, levels)):
            continue
        position = {x: n for n, x in enumerate(perm)}
        code = (
            tuple(k.sorts[x] for x in perm),
            tuple(sorted((e, f, position[x], position[y]) for e, f, x, y in k.edges)),
        )
        if best is None or code < best:
            best = code
    return (len(elements), best or ())


def canonical_k(s):
    """< 为线性序时由序确定的编码"""
    sequence = s.sequence()
    position = {x: n for n, x in enumerate(sequence)}
    return (
        tuple(s.sorts[x] for x in sequence),
        tuple(sorted((e, f, position[x], position[y]) for e, f, x, y in s.U)),
        tuple(sorted((e, i, j, position[x], position[y]) for e, i, j, x, y in s.B)),
        tuple(sorted((position[x], position[y]) for x, y in s.dex)),
        tuple(sorted((position[a], position[b], position[c]) for a, b, c in s.d)),
    )
