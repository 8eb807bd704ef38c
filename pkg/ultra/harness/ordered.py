# -*- coding: UTF-8 -*-
"""带子商序的有序空间族, 语言取提升参数中的语言, 默认为最小 well-equipped 语言"""
from itertools import permutations, product

from ultra.harness import FamilyBase
from ultra.harness.spaces import SpaceFamily
from ultra.sqo import (
    OrderedSpace,
    language_from_dict,
    min_language,
    order_from_sequence,
    ordered_space_from_dict,
)
from ultra.space import find_embeddings, space_from_dict
from ultra.utils.canonical import canonical_ordered


def slot_orders(space, slot):
    """某个槽位上的全部子商序: 每个 top 类内 E-类的全排列"""
    blocks = []
    for block in space.classes(slot.top):
        members = set(block)
        blocks.append([c for c in space.classes(slot.bottom) if c[0] in members])
    for choice in product(*(permutations(b) for b in blocks)):
        sequence = [p for arrangement in choice for c in arrangement for p in c]
        yield order_from_sequence(space, slot.bottom, slot.top, sequence)


def expansions(space, language):
    """空间在给定语言下的全部扩张"""
    slots = list(language.slots)
    for orders in product(*(list(slot_orders(space, s)) for s in slots)):
        yield OrderedSpace(space, language, dict(zip(slots, orders)))


def ordered_embeddings(a, c):
    result = []
    for f in find_embeddings(a.space, c.space):
        if all(
            a.orders[s].less(x, y) == c.orders[s].less(f[x], f[y])
            for s in a.language.slots
            for x in a.points
            for y in a.points
        ):
            result.append(f)
    return result


class OrderedFamily(FamilyBase):
    name = "ordered"

    def __init__(self, lattice, params=None, budget=None):
        super().__init__(lattice, params=params, budget=budget)
        self.language = params.language if params else min_language(lattice)
        self.spaces = SpaceFamily(lattice, budget=self.budget)

    def candidates(self, n):
        for space in self.spaces.enumerate(n):
            for expanded in expansions(space, self.language):
                self.spend()
                yield expanded

    def canonical(self, structure):
        return canonical_ordered(structure)

    def copies(self, a, c):
        seen = []
        for f in ordered_embeddings(a, c):
            image = frozenset(f.values())
            if image not in seen:
                seen.append(image)
        return seen

    def from_dict(self, data):
        space = space_from_dict(data["space"], self.lattice)
        language = (
            language_from_dict(self.lattice, data["language"])
            if data.get("language")
            else self.language
        )
        return ordered_space_from_dict(space, language, data.get("orders", []))
