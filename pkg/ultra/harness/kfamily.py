# -*- coding: UTF-8 -*-
"""K 结构族: 有序空间的 lift"""
from ultra.harness import FamilyBase
from ultra.harness.ordered import OrderedFamily
from ultra.kstruct import default_params, k_from_dict
from ultra.transfer import lift
from ultra.utils.canonical import canonical_k
from ultra.utils.structures import k_embeddings


class KFamily(FamilyBase):
    """n 为底层空间的点数"""

    name = "kstruct"

    def __init__(self, lattice, params=None, budget=None):
        super().__init__(lattice, params=params or default_params(lattice), budget=budget)
        self.ordered = OrderedFamily(lattice, params=self.params, budget=self.budget)

    def candidates(self, n):
        for ordered in self.ordered.enumerate(n):
            self.spend()
            yield lift(ordered, self.params)

    def canonical(self, structure):
        return canonical_k(structure)

    def copies(self, a, c):
        return [frozenset(f.values()) for f in k_embeddings(a, c)]

    def from_dict(self, data):
        return k_from_dict(data, self.lattice, self.params)
