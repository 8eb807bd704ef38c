# -*- coding: UTF-8 -*-
"""结构之间的嵌入搜索"""
from itertools import combinations

from ultra.engine import is_embedding


def k0_embeddings(a, c):
    """保持层级与 U 的单射 a -> c, 像上的 U 必须恰好是 a 的 U 的像"""
    source = list(a.elements)
    result = []

    def related(k, x, y):
        return k.up(x, k.sorts[y]) == y

    def extend(mapping, used):
        if len(mapping) == len(source):
            result.append(dict(mapping))
            return
        x = source[len(mapping)]
        for y in c.elements:
            if y in used or c.sorts[y] != a.sorts[x]:
                continue
            if all(
                related(a, x, p) == related(c, y, q) and related(a, p, x) == related(c, q, y)
                for p, q in mapping.items()
            ):
                mapping[x] = y
                used.add(y)
                extend(mapping, used)
                del mapping[x]
                used.discard(y)

    extend({}, set())
    return result


def k_embeddings(a, c):
    """
    < 为线性序时嵌入由像集决定: 按 c 的序取子集, 与 a 的序一一对应
    """
    wanted = sorted(a.sorts[x] for x in a.elements)
    sequence_a = a.sequence()
    result = []
    for chosen in combinations(c.sequence(), len(a)):
        if sorted(c.sorts[y] for y in chosen) != wanted:
            continue
        mapping = dict(zip(sequence_a, chosen))
        if is_embedding(a, c, mapping):
            result.append(mapping)
    return result
