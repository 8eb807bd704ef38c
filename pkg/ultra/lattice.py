# -*- coding: UTF-8 -*-
"""有限格: 偏序, meet/join 表, meet-irreducible 元素与覆盖关系"""
import logging
from itertools import combinations, product

import networkx as nx

from ultra.exceptions import (
    NotAPartialOrder,
    MeetMissing,
    JoinMissing,
    LatticeError,
    AmbiguousCover,
)

logger = logging.getLogger("default")


class Lattice:
    """
    校验后的有限格, 创建后不再修改
    元素为字符串标签, meet/join 在构造时全部预计算
    """

    def __init__(self, elements, leq):
        self.elements = tuple(elements)
        self._leq = frozenset(leq)
        self._meet = {}
        self._join = {}
        self.bottom = None
        self.top = None
        self._covers = {}
        self._height = {}

    def leq(self, x, y):
        return (x, y) in self._leq

    def lt(self, x, y):
        return x != y and (x, y) in self._leq

    def meet(self, x, y):
        return self._meet[(x, y)]

    def join(self, x, y):
        return self._join[(x, y)]

    def meet_all(self, items):
        """空集的 meet 约定为 top"""
        result = self.top
        for x in items:
            result = self._meet[(result, x)]
        return result

    def join_all(self, items):
        result = self.bottom
        for x in items:
            result = self._join[(result, x)]
        return result

    def covers(self, x):
        return self._covers[x]

    def above(self, x, strict=True):
        return [y for y in self.elements if self.leq(x, y) and (y != x or not strict)]

    def below(self, x, strict=True):
        return [y for y in self.elements if self.leq(y, x) and (y != x or not strict)]

    def height(self, x):
        """从 bottom 出发的最长链长度"""
        return self._height[x]

    def ascending(self):
        """与偏序相容的线性排列, 高度相同时按标签排序"""
        return sorted(self.elements, key=lambda x: (self._height[x], x))

    def descending(self):
        return list(reversed(self.ascending()))

    def __contains__(self, item):
        return item in self._height

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, Lattice)
            and set(self.elements) == set(other.elements)
            and self._leq == other._leq
        )

    def __hash__(self):
        return hash((frozenset(self.elements), self._leq))

    def __repr__(self):
        return f"Lattice({list(self.elements)})"

    def to_dict(self):
        return {
            "elements": list(self.elements),
            "leq": [
                [x, y] for x in self.elements for y in self.covers(x)
            ],
        }


def _close(elements, pairs):
    """自反传递闭包"""
    graph = nx.DiGraph()
    graph.add_nodes_from(elements)
    graph.add_edges_from(pairs)
    return set(nx.transitive_closure(graph, reflexive=True).edges())


def validate_lattice(elements, leq):
    """
    校验并构造格
    :param elements: 元素标签列表
    :param leq: 序关系对, 可以只给覆盖关系, 会先做自反传递闭包
    :return: Lattice
    """
    elements = [str(x) for x in elements]
    if not elements:
        raise NotAPartialOrder("格不能为空")
    if len(set(elements)) != len(elements):
        raise NotAPartialOrder("元素标签重复")
    known = set(elements)
    pairs = set()
    for x, y in leq:
        x, y = str(x), str(y)
        if x not in known or y not in known:
            raise NotAPartialOrder(f"未知元素:{x if x not in known else y}")
        pairs.add((x, y))
    closed = _close(elements, pairs)
    for x, y in combinations(elements, 2):
        if (x, y) in closed and (y, x) in closed:
            raise NotAPartialOrder(f"{x}与{y}互相小于等于, 不满足反对称性", x=x, y=y)

    lattice = Lattice(elements, closed)
    for x, y in product(elements, repeat=2):
        lower = [z for z in elements if (z, x) in closed and (z, y) in closed]
        greatest = [g for g in lower if all((z, g) in closed for z in lower)]
        if not greatest:
            raise MeetMissing(f"{x}与{y}没有最大下界", a=x, b=y)
        upper = [z for z in elements if (x, z) in closed and (y, z) in closed]
        least = [g for g in upper if all((g, z) in closed for z in upper)]
        if not least:
            raise JoinMissing(f"{x}与{y}没有最小上界", a=x, b=y)
        lattice._meet[(x, y)] = greatest[0]
        lattice._join[(x, y)] = least[0]

    lattice.bottom = [x for x in elements if all((x, y) in closed for y in elements)][0]
    lattice.top = [x for x in elements if all((y, x) in closed for y in elements)][0]

    for x in elements:
        strictly_above = [y for y in elements if y != x and (x, y) in closed]
        lattice._covers[x] = sorted(
            y
            for y in strictly_above
            if not any(z != y and (z, y) in closed for z in strictly_above)
        )
    # 高度按拓扑序计算
    for x in sorted(elements, key=lambda e: sum((z, e) in closed for z in elements)):
        below = [z for z in elements if z != x and (z, x) in closed]
        lattice._height[x] = max((lattice._height[z] + 1 for z in below), default=0)
    logger.debug(f"格校验通过, 元素:{elements}")
    return lattice


def meet(lattice, x, y):
    return lattice.meet(x, y)


def join(lattice, x, y):
    return lattice.join(x, y)


def covers(lattice, x):
    return set(lattice.covers(x))


def is_distributive(lattice):
    """逐个三元组检查 a∧(b∨c) = (a∧b)∨(a∧c)"""
    m, j = lattice.meet, lattice.join
    for a, b, c in product(lattice.elements, repeat=3):
        if m(a, j(b, c)) != j(m(a, b), m(a, c)):
            logger.debug(f"分配律不成立: a={a}, b={b}, c={c}")
            return False
    return True


def is_meet_irreducible(lattice, x):
    if x == lattice.top:
        return False
    for a, b in product(lattice.elements, repeat=2):
        if lattice.meet(a, b) == x and a != x and b != x:
            return False
    return True


def meet_irreducibles(lattice):
    """按元素输入顺序返回, top 不计入"""
    return [x for x in lattice.elements if is_meet_irreducible(lattice, x)]


def unique_cover(lattice, x):
    cs = lattice.covers(x)
    if len(cs) != 1:
        raise AmbiguousCover(f"{x}的覆盖元素不唯一:{cs}", element=x, covers=cs)
    return cs[0]


def find_forbidden_sublattice(lattice):
    """
    搜索 M3 或 N5 子格, 返回 (名称, 五个元素) 或 None
    子格要求 meet/join 在原格中封闭
    """
    m, j = lattice.meet, lattice.join
    elements = lattice.elements
    for lo, hi in product(elements, repeat=2):
        if not lattice.lt(lo, hi):
            continue
        middle = [z for z in elements if lattice.lt(lo, z) and lattice.lt(z, hi)]
        for a, b, c in combinations(middle, 3):
            trio = (a, b, c)
            if all(m(x, y) == lo and j(x, y) == hi for x, y in combinations(trio, 2)):
                return "M3", (lo, a, b, c, hi)
        for a, b, c in product(middle, repeat=3):
            if len({a, b, c}) < 3 or not lattice.lt(a, b):
                continue
            if (
                m(b, c) == lo
                and m(a, c) == lo
                and j(a, c) == hi
                and j(b, c) == hi
            ):
                return "N5", (lo, a, b, c, hi)
    return None


def to_dot(lattice):
    lines = ["digraph lattice {", "  rankdir=BT;"]
    for x in lattice.ascending():
        lines.append(f'  "{x}";')
    for x in lattice.ascending():
        for y in lattice.covers(x):
            lines.append(f'  "{x}" -> "{y}";')
    lines.append("}")
    return "\n".join(lines)


def lattice_from_dict(data):
    try:
        return validate_lattice(data["elements"], data.get("leq", []))
    except (KeyError, TypeError, ValueError) as e:
        raise LatticeError(f"格的JSON格式不正确:{e}")


# 常用的格
def chain_lattice(n):
    """n 元链, 标签 0 < e1 < ... < 1, n=3 时中间元素为 e"""
    if n < 1:
        raise NotAPartialOrder("链长度至少为1")
    if n == 1:
        labels = ["0"]
    elif n == 3:
        labels = ["0", "e", "1"]
    else:
        labels = ["0"] + [f"e{k}" for k in range(1, n - 1)] + ["1"]
    return validate_lattice(labels, zip(labels, labels[1:]))


def boolean_square():
    """B2: 0 < a, b < 1"""
    return validate_lattice(
        ["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]
    )


def boolean_lattice(k):
    """k 个原子生成的布尔格, 标签为原子字母拼接, 空集记为 0, 全集记为 1"""
    atoms = [chr(ord("a") + i) for i in range(k)]
    subsets = [frozenset(c) for r in range(k + 1) for c in combinations(atoms, r)]

    def label(s):
        if not s:
            return "0"
        if len(s) == k:
            return "1"
        return "".join(sorted(s))

    leq = [(label(s), label(t)) for s in subsets for t in subsets if s <= t]
    return validate_lattice([label(s) for s in subsets], leq)


def diamond():
    """M3"""
    return validate_lattice(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")],
    )


def pentagon():
    """N5: 0 < a < b < 1, 0 < c < 1"""
    return validate_lattice(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
    )
