"""harness 基础库, 包含一个``FamilyBase`` class, 一个get_family函数和结构枚举"""
import logging

from django.conf import settings

from ultra.exceptions import BudgetExceeded

logger = logging.getLogger("default")


class FamilyBase:
    """结构族只定义了若干方法的名字, 具体实现见 spaces.py ordered.py 等"""

    name = None

    def __init__(self, lattice, params=None, budget=None):
        self.lattice = lattice
        self.params = params
        self.budget = budget if budget is not None else getattr(settings, "ENUMERATE_BUDGET", 200000)
        self._spent = 0
        self._cache = {}

    def spend(self, n=1):
        """枚举候选计数, 超过预算时抛 BudgetExceeded"""
        self._spent += n
        if self._spent > self.budget:
            raise BudgetExceeded(f"枚举候选数超过预算{self.budget}", budget=self.budget)

    def size(self, structure):
        return len(structure)

    def candidates(self, n):
        """n 个元素的所有候选结构, 可以有同构重复"""
        raise NotImplementedError

    def canonical(self, structure):
        """规范形式, 同构的结构规范形式相同"""
        raise NotImplementedError

    def copies(self, a, c):
        """a 在 c 中的拷贝, 返回像集(frozenset)列表"""
        raise NotImplementedError

    def is_isomorphic(self, a, b):
        return self.canonical(a) == self.canonical(b)

    def enumerate(self, n):
        """去同构后的 n 元结构, 按首次出现的顺序"""
        if n in self._cache:
            return self._cache[n]
        seen = set()
        result = []
        for structure in self.candidates(n):
            key = self.canonical(structure)
            if key in seen:
                continue
            seen.add(key)
            result.append(structure)
        logger.debug(f"{self.name} 族 n={n} 共 {len(result)} 个结构, 候选数:{self._spent}")
        self._cache[n] = result
        return result

    def from_dict(self, data):
        raise NotImplementedError


def get_family(name, lattice, params=None, budget=None):
    """获取结构族"""
    if name == "space":
        from .spaces import SpaceFamily

        return SpaceFamily(lattice, params=params, budget=budget)
    elif name in ("ordered", "ordered_space"):
        from .ordered import OrderedFamily

        return OrderedFamily(lattice, params=params, budget=budget)
    elif name == "k0":
        from .k0 import K0Family

        return K0Family(lattice, params=params, budget=budget)
    elif name == "kstruct":
        from .kfamily import KFamily

        return KFamily(lattice, params=params, budget=budget)
    raise ValueError(f"未知的结构族:{name}")


def enumerate_structures(family, lattice, n, params=None, budget=None):
    """n 个元素的结构, 去同构, 顺序确定"""
    if isinstance(family, str):
        family = get_family(family, lattice, params=params, budget=budget)
    return family.enumerate(n)
