# -*- coding: UTF-8 -*-
"""K0 结构族: 按高度从上往下逐个加元素, 元素的上类由其覆盖层上的选择决定"""
import random

from ultra.eqlift import K0Structure, check_k0, k0_from_dict
from ultra.harness import FamilyBase
from ultra.utils.canonical import canonical_k0
from ultra.utils.structures import k0_embeddings


def _ups(lattice, elements, sorts, up, level, targets):
    """
    由覆盖层上的选择推出新元素在所有 G > E 上的上类, 不一致时返回 None
    up: (元素, G) -> 元素
    """
    result = {}
    for c, t in targets.items():
        result[c] = t
        for g in lattice.above(c):
            u = up[(t, g)]
            if result.get(g, u) != u:
                return None
            result[g] = u
    if set(result) != set(lattice.above(level)):
        return None
    return result


def _choices(lattice, elements, sorts, up, last_height):
    """下一个元素的所有 (层级, 上类) 选择, 层级高度不超过 last_height"""
    for level in lattice.descending():
        if lattice.height(level) > last_height:
            continue
        covers = lattice.covers(level)
        options = [[x for x in elements if sorts[x] == c] for c in covers]
        if any(not o for o in options):
            continue
        picks = [[]]
        for c, o in zip(covers, options):
            picks = [p + [(c, x)] for p in picks for x in o]
        for pick in picks:
            ups = _ups(lattice, elements, sorts, up, level, dict(pick))
            if ups is not None:
                yield level, ups


def _add(elements, sorts, up, label, level, ups):
    elements = elements + [label]
    sorts = {**sorts, label: level}
    up = dict(up)
    for g, u in ups.items():
        up[(label, g)] = u
    return elements, sorts, up


def _build(lattice, elements, sorts, up):
    edges = [(sorts[x], g, x, u) for (x, g), u in up.items()]
    return K0Structure(lattice, elements, sorts, edges)


def random_k0(lattice, n, seed=0, attempts=50):
    """随机生成一个合法的 n 元 K0 结构, 种子固定时结果确定"""
    rng = random.Random(seed)
    for _ in range(attempts):
        elements, sorts, up = [], {}, {}
        height = lattice.height(lattice.top)
        while len(elements) < n:
            options = list(_choices(lattice, elements, sorts, up, height))
            if not options:
                break
            level, ups = rng.choice(options)
            elements, sorts, up = _add(elements, sorts, up, f"k{len(elements)}", level, ups)
            height = lattice.height(level)
            if check_k0(_build(lattice, elements, sorts, up)):
                break
        k = _build(lattice, elements, sorts, up)
        if len(elements) == n and not check_k0(k):
            return k
    return None


class K0Family(FamilyBase):
    name = "k0"

    def candidates(self, n):
        lattice = self.lattice
        top_height = lattice.height(lattice.top)

        def grow(elements, sorts, up, height):
            self.spend()
            if len(elements) == n:
                yield _build(lattice, elements, sorts, up)
                return
            for level, ups in _choices(lattice, elements, sorts, up, height):
                state = _add(elements, sorts, up, f"k{len(elements)}", level, ups)
                if check_k0(_build(lattice, *state)):
                    continue
                yield from grow(*state, lattice.height(level))

        if n <= 0:
            return
        yield from grow([], {}, {}, top_height)

    def canonical(self, structure):
        return canonical_k0(structure)

    def copies(self, a, c):
        seen = []
        for f in k0_embeddings(a, c):
            image = frozenset(f.values())
            if image not in seen:
                seen.append(image)
        return seen

    def from_dict(self, data):
        return k0_from_dict(data, self.lattice)
