# -*- coding: UTF-8 -*-
"""Λ-超度量空间族"""
from itertools import product

from ultra.exceptions import SpaceError
from ultra.harness import FamilyBase
from ultra.space import copies, space_from_dict, validate_space
from ultra.utils.canonical import canonical_space


def point_names(n):
    return [f"p{k}" for k in range(n)]


class SpaceFamily(FamilyBase):
    name = "space"

    def candidates(self, n):
        """由 n-1 点空间加一个点得到, 新点到旧点的距离取遍非零元素"""
        lattice = self.lattice
        if n <= 0:
            return []
        if n == 1:
            return [validate_space(lattice, ["p0"], {})]
        values = [x for x in lattice.ascending() if x != lattice.bottom]
        result = []
        for smaller in self.enumerate(n - 1):
            old = list(smaller.points)
            new = point_names(n)[-1]
            for vector in product(values, repeat=len(old)):
                self.spend()
                d = {(x, y): smaller.dist(x, y) for x in old for y in old if x != y}
                d.update({(p, new): v for p, v in zip(old, vector)})
                try:
                    result.append(validate_space(lattice, old + [new], d))
                except SpaceError:
                    continue
        return result

    def canonical(self, structure):
        return canonical_space(structure)

    def copies(self, a, c):
        return copies(a, c)

    def from_dict(self, data):
        return space_from_dict(data, self.lattice)
