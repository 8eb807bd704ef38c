# -*- coding: UTF-8 -*-
"""
子商序(subquotient order)及其运算: 复合, 限制, meet 诱导, 可定义序的推导, 线性化
以及 well-equipped 语言与有序空间
"""
import logging
from collections import namedtuple
from functools import cmp_to_key
from itertools import combinations, permutations

import networkx as nx

from ultra.exceptions import (
    ComparableAcrossTop,
    NotLinearWithinTop,
    CycleDetected,
    TopBottomMismatch,
    GOutOfRange,
    NotWellEquipped,
    InvalidStructure,
)
from ultra.lattice import (
    is_meet_irreducible,
    meet_irreducibles,
    unique_cover,
)
from ultra.space import subspace, validate_space

logger = logging.getLogger("default")

Slot = namedtuple("Slot", ["bottom", "top", "index"])


class SubquotientOrder:
    """
    E-类上的严格偏序, 只有同一 F-类中的 E-类可比, 且同一 F-类内为线性序
    类用排好序的点元组表示, pairs 已传递闭包
    """

    def __init__(self, space, bottom, top, pairs):
        self.space = space
        self.bottom = bottom
        self.top = top
        self.pairs = frozenset(pairs)

    def less_class(self, c1, c2):
        return (c1, c2) in self.pairs

    def less(self, x, y):
        """拉回到点上的序"""
        cls = self.space.class_of
        return (cls(x, self.bottom), cls(y, self.bottom)) in self.pairs

    def blocks(self):
        """每个 top 类中 bottom 类的线性排列"""
        result = []
        for block in self.space.classes(self.top):
            inside = [
                c for c in self.space.classes(self.bottom) if c[0] in set(block)
            ]
            result.append(
                sorted(inside, key=lambda c: sum((d, c) in self.pairs for d in inside))
            )
        return result

    def __eq__(self, other):
        return (
            isinstance(other, SubquotientOrder)
            and self.bottom == other.bottom
            and self.top == other.top
            and self.pairs == other.pairs
        )

    def __hash__(self):
        return hash((self.bottom, self.top, self.pairs))

    def __repr__(self):
        return f"SubquotientOrder({self.bottom}->{self.top}, {len(self.pairs)} pairs)"

    def to_dict(self):
        return {
            "bottom": self.bottom,
            "top": self.top,
            "pairs": sorted([list(c1), list(c2)] for c1, c2 in self.pairs),
        }


def _normalize_class(space, bottom, cls):
    cls = tuple(sorted(str(p) for p in cls))
    if cls not in space.classes(bottom):
        raise InvalidStructure(f"{list(cls)}不是{bottom}-类", cls=list(cls))
    return cls


def validate_sqo(space, bottom, top, pairs):
    """
    校验候选序, pairs 可以只给覆盖关系, 会先做传递闭包
    :return: SubquotientOrder
    """
    lattice = space.lattice
    if not lattice.leq(bottom, top):
        raise TopBottomMismatch(f"bottom {bottom} 不小于等于 top {top}")
    graph = nx.DiGraph()
    graph.add_nodes_from(space.classes(bottom))
    for c1, c2 in pairs:
        graph.add_edge(
            _normalize_class(space, bottom, c1), _normalize_class(space, bottom, c2)
        )
    if not nx.is_directed_acyclic_graph(graph):
        cycle = [list(u) for u, _ in nx.find_cycle(graph)]
        raise CycleDetected(f"序关系存在环:{cycle}", cycle=cycle)
    closed = set(nx.transitive_closure_dag(graph).edges())
    top_of = lambda c: space.class_of(c[0], top)
    for c1, c2 in closed:
        if top_of(c1) != top_of(c2):
            raise ComparableAcrossTop(
                f"{list(c1)}与{list(c2)}不在同一个{top}-类中", left=list(c1), right=list(c2)
            )
    for c1, c2 in combinations(space.classes(bottom), 2):
        if top_of(c1) == top_of(c2) and (c1, c2) not in closed and (c2, c1) not in closed:
            raise NotLinearWithinTop(
                f"{list(c1)}与{list(c2)}在同一个{top}-类中但不可比",
                left=list(c1),
                right=list(c2),
            )
    return SubquotientOrder(space, bottom, top, closed)


def sqo_from_dict(space, data):
    return validate_sqo(space, str(data["bottom"]), str(data["top"]), data.get("pairs", []))


def empty_order(space, element):
    return SubquotientOrder(space, element, element, ())


def order_from_sequence(space, bottom, top, sequence):
    """E-类按其点在 sequence 中首次出现的位置排序, 只比较同一 top 类中的类"""
    position = {p: k for k, p in reversed(list(enumerate(sequence)))}
    missing = len(position)
    rank = {c: min(position.get(p, missing) for p in c) for c in space.classes(bottom)}
    pairs = [
        (c1, c2)
        for c1 in rank
        for c2 in rank
        if c1 != c2
        and rank[c1] < rank[c2]
        and space.class_of(c1[0], top) == space.class_of(c2[0], top)
    ]
    return SubquotientOrder(space, bottom, top, pairs)


def extend_partial(space, bottom, top, pairs):
    """
    把 E-类上的部分序补全成子商序
    每个 top 类内做字典序拓扑排序, 不可比时按类的标签排
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(space.classes(bottom))
    graph.add_edges_from(pairs)
    if not nx.is_directed_acyclic_graph(graph):
        raise CycleDetected("部分序存在环")
    sequence = []
    for block in space.classes(top):
        members = [c for c in space.classes(bottom) if c[0] in set(block)]
        for c in nx.lexicographical_topological_sort(graph.subgraph(members), key=str):
            sequence.extend(c)
    return order_from_sequence(space, bottom, top, sequence)


def compose(outer, inner):
    """
    outer: F -> G, inner: E -> F, 结果为 E -> G
    同一 F-类内按 inner 比较, 不同 F-类按 outer 比较 F-类
    """
    if inner.top != outer.bottom:
        raise TopBottomMismatch(
            f"inner 的 top {inner.top} 与 outer 的 bottom {outer.bottom} 不一致"
        )
    space = inner.space
    e, f, g = inner.bottom, inner.top, outer.top
    pairs = []
    for c1, c2 in permutations(space.classes(e), 2):
        if space.class_of(c1[0], g) != space.class_of(c2[0], g):
            continue
        f1, f2 = space.class_of(c1[0], f), space.class_of(c2[0], f)
        if f1 == f2:
            if inner.less_class(c1, c2):
                pairs.append((c1, c2))
        elif outer.less_class(f1, f2):
            pairs.append((c1, c2))
    return SubquotientOrder(space, e, g, pairs)


def restrict(order, g):
    space = order.space
    lattice = space.lattice
    if not (lattice.leq(order.bottom, g) and lattice.leq(g, order.top)):
        raise GOutOfRange(f"{g} 不在 {order.bottom} 与 {order.top} 之间", element=g)
    pairs = [
        (c1, c2)
        for c1, c2 in order.pairs
        if space.class_of(c1[0], g) == space.class_of(c2[0], g)
    ]
    return SubquotientOrder(space, order.bottom, g, pairs)


def induce_meet(order, f2):
    """order: F1 -> F1∨F2, 结果为 F1∧F2 -> F2: 同一 F2-类中按 F1-类的顺序比较"""
    space = order.space
    lattice = space.lattice
    f1 = order.bottom
    if order.top != lattice.join(f1, f2):
        raise TopBottomMismatch(f"order 的 top 应为 {lattice.join(f1, f2)}")
    e = lattice.meet(f1, f2)
    pairs = []
    for c1, c2 in permutations(space.classes(e), 2):
        if space.class_of(c1[0], f2) != space.class_of(c2[0], f2):
            continue
        if order.less_class(space.class_of(c1[0], f1), space.class_of(c2[0], f1)):
            pairs.append((c1, c2))
    return SubquotientOrder(space, e, f2, pairs)


def reverse_order(order):
    return SubquotientOrder(
        order.space, order.bottom, order.top, [(c2, c1) for c1, c2 in order.pairs]
    )


class LanguageDescriptor:
    """子商序的槽位: (bottom, top, index), 同一 bottom 的 index 从 1 开始"""

    def __init__(self, lattice, slots):
        self.lattice = lattice
        self.slots = tuple(Slot(str(b), str(t), int(i)) for b, t, i in slots)
        for slot in self.slots:
            if not lattice.leq(slot.bottom, slot.top):
                raise TopBottomMismatch(f"槽位{tuple(slot)}的 bottom 不小于等于 top")

    def with_bottom(self, e):
        return sorted((s for s in self.slots if s.bottom == e), key=lambda s: s.index)

    def slot(self, e, index):
        for s in self.slots:
            if s.bottom == e and s.index == index:
                return s
        raise KeyError((e, index))

    def __eq__(self, other):
        return (
            isinstance(other, LanguageDescriptor)
            and self.lattice == other.lattice
            and set(self.slots) == set(other.slots)
        )

    def __hash__(self):
        return hash(frozenset(self.slots))

    def to_dict(self):
        return {"slots": [list(s) for s in self.slots]}


def language_from_dict(lattice, data):
    slots = data["slots"] if isinstance(data, dict) else data
    return LanguageDescriptor(lattice, slots)


def is_well_equipped(language):
    lattice = language.lattice
    for e in lattice.elements:
        nontrivial = any(s.top != e for s in language.with_bottom(e))
        if nontrivial != is_meet_irreducible(lattice, e):
            return False
    return True


def min_language(lattice):
    """每个 meet-irreducible 元素 E 一个槽位 E -> E+"""
    return LanguageDescriptor(
        lattice, [(e, unique_cover(lattice, e), 1) for e in meet_irreducibles(lattice)]
    )


class OrderedSpace:
    """带子商序的超度量空间, orders 以槽位为键"""

    def __init__(self, space, language, orders):
        self.space = space
        self.language = language
        self.orders = dict(orders)

    @property
    def lattice(self):
        return self.space.lattice

    @property
    def points(self):
        return self.space.points

    def __len__(self):
        return len(self.space)

    def __eq__(self, other):
        return (
            isinstance(other, OrderedSpace)
            and self.space == other.space
            and self.language == other.language
            and all(self.orders[s] == other.orders[s] for s in self.language.slots)
        )

    def __hash__(self):
        return hash(self.space)

    def __repr__(self):
        return f"OrderedSpace({list(self.points)}, {len(self.orders)} orders)"

    def to_dict(self):
        return {
            "space": self.space.to_dict(),
            "language": self.language.to_dict(),
            "orders": [
                {**self.orders[s].to_dict(), "index": s.index}
                for s in self.language.slots
            ],
        }


def validate_ordered_space(space, language, orders):
    """orders 为 槽位 -> SubquotientOrder 或 槽位 -> pairs"""
    result = {}
    for slot in language.slots:
        if slot not in orders:
            raise InvalidStructure(f"缺少槽位{tuple(slot)}的序")
        o = orders[slot]
        pairs = o.pairs if isinstance(o, SubquotientOrder) else o
        result[slot] = validate_sqo(space, slot.bottom, slot.top, pairs)
    return OrderedSpace(space, language, result)


def ordered_space_from_dict(space, language, data):
    orders = {}
    for item in data:
        slot = Slot(str(item["bottom"]), str(item["top"]), int(item.get("index", 1)))
        orders[slot] = item.get("pairs", [])
    return validate_ordered_space(space, language, orders)


def restrict_ordered(ordered, points):
    """诱导子结构"""
    sub = subspace(ordered.space, points)
    orders = {}
    for slot, o in ordered.orders.items():
        pairs = []
        for c1, c2 in permutations(sub.classes(slot.bottom), 2):
            if o.less(c1[0], c2[0]):
                pairs.append((c1, c2))
        orders[slot] = SubquotientOrder(sub, slot.bottom, slot.top, pairs)
    return OrderedSpace(sub, ordered.language, orders)


class DerivationChoice:
    """
    推导可定义序时的确定性选择
    cover[E]: E 的一个覆盖 F'_E; partner[E]: 满足 F'_E ∧ F''_E = E 的 F''_E
    默认都取标签最小者
    """

    def __init__(self, lattice, cover=None, partner=None):
        self.lattice = lattice
        self.cover = dict(cover or {})
        self.partner = dict(partner or {})
        for e in lattice.elements:
            if e == lattice.top:
                continue
            self.cover.setdefault(e, min(lattice.covers(e)))
            if not is_meet_irreducible(lattice, e):
                self.partner.setdefault(e, self.partner_for(e, self.cover[e]))

    def cover_below(self, e, f):
        c = self.cover.get(e)
        if c is not None and self.lattice.leq(c, f):
            return c
        return min(x for x in self.lattice.covers(e) if self.lattice.leq(x, f))

    def partner_for(self, e, c):
        if self.partner.get(e) is not None and self.lattice.meet(c, self.partner[e]) == e:
            return self.partner[e]
        lattice = self.lattice
        return min(x for x in lattice.above(e) if lattice.meet(c, x) == e)

    def to_dict(self):
        return {"cover": dict(self.cover), "partner": dict(self.partner)}


def _language_order(ordered, e):
    """meet-irreducible E 的 index 最小的非平凡语言序"""
    for slot in ordered.language.with_bottom(e):
        if slot.top != e:
            return ordered.orders[slot]
    raise NotWellEquipped(f"{e} 没有非平凡的子商序", element=e)


def derive_definable(ordered, e, f, choice=None, _memo=None):
    """
    按下行归纳构造 E -> F 的可定义子商序:
    meet-irreducible E 取语言序在覆盖上的限制, meet-reducible E 由 F''_E 上的序诱导,
    再逐层复合到 F
    """
    lattice = ordered.lattice
    if _memo is None:
        if not is_well_equipped(ordered.language):
            raise NotWellEquipped("语言不是 well-equipped")
        _memo = {}
    choice = choice or DerivationChoice(lattice)
    if not lattice.leq(e, f):
        raise GOutOfRange(f"{e} 不小于等于 {f}")
    if (e, f) in _memo:
        return _memo[(e, f)]
    if e == f:
        result = empty_order(ordered.space, e)
    else:
        c = choice.cover_below(e, f)
        if is_meet_irreducible(lattice, e):
            to_cover = restrict(_language_order(ordered, e), c)
        else:
            p = choice.partner_for(e, c)
            outer = derive_definable(ordered, p, lattice.join(p, c), choice, _memo)
            to_cover = induce_meet(outer, c)
        if c == f:
            result = to_cover
        else:
            result = compose(derive_definable(ordered, c, f, choice, _memo), to_cover)
    _memo[(e, f)] = result
    return result


def extend_to_top(ordered, order, choice=None):
    """复合上 F -> 1 的可定义序, 结果在 F 上的限制等于 order"""
    top = ordered.lattice.top
    if order.top == top:
        return order
    return compose(derive_definable(ordered, order.top, top, choice), order)


def _sequence(order):
    """0 -> 1 的序在连通空间上是点的线性序"""
    points = sorted(order.space.points)

    def cmp(x, y):
        if x == y:
            return 0
        return -1 if order.less(x, y) else 1

    return sorted(points, key=cmp_to_key(cmp))


def linearize(ordered, choice=None):
    """
    每个语言序给出一个线性序 <''_{E,i}, 每个 E 给出一个 <*_E
    返回 [{"label": ..., "order": [点...]}]
    """
    if not is_well_equipped(ordered.language):
        raise NotWellEquipped("语言不是 well-equipped")
    lattice = ordered.lattice
    bottom, top = lattice.bottom, lattice.top
    result = []
    for slot in ordered.language.slots:
        extended = extend_to_top(ordered, ordered.orders[slot], choice)
        lin = compose(extended, derive_definable(ordered, bottom, slot.bottom, choice))
        result.append(
            {"label": ("slot", slot.bottom, slot.top, slot.index), "order": _sequence(lin)}
        )
    for e in lattice.elements:
        convex = compose(
            derive_definable(ordered, e, top, choice),
            derive_definable(ordered, bottom, e, choice),
        )
        cls = ordered.space.class_of

        def star(x, y, convex=convex, e=e):
            if x == y:
                return 0
            inside = cls(x, e) == cls(y, e)
            return -1 if convex.less(x, y) == inside else 1

        result.append(
            {
                "label": ("star", e),
                "order": sorted(sorted(ordered.points), key=cmp_to_key(star)),
            }
        )
    return result


def lexicographic_grid(lattice, rows, cols, row_sequence=None, col_sequence=None):
    """
    B2 上的 rows x cols 网格, 同行 a 等价, 同列 b 等价
    语言为 a -> 1 (行序), b -> 1 (列序)
    """
    a, b = [x for x in lattice.elements if x not in (lattice.bottom, lattice.top)]
    points = [f"x{i}{j}" for i in range(rows) for j in range(cols)]
    d = {}
    for p, q in combinations(points, 2):
        same_row, same_col = p[1] == q[1], p[2] == q[2]
        d[(p, q)] = a if same_row else b if same_col else lattice.top
    space = validate_space(lattice, points, d)
    row_sequence = row_sequence or list(range(rows))
    col_sequence = col_sequence or list(range(cols))
    language = LanguageDescriptor(lattice, [(a, lattice.top, 1), (b, lattice.top, 1)])
    orders = {
        Slot(a, lattice.top, 1): order_from_sequence(
            space, a, lattice.top, [f"x{i}0" for i in row_sequence]
        ),
        Slot(b, lattice.top, 1): order_from_sequence(
            space, b, lattice.top, [f"x0{j}" for j in col_sequence]
        ),
    }
    return OrderedSpace(space, language, orders)


def crossed_squares(space, order, e1, e2):
    """
    找出 x1 E1 x2, y1 E1 y2, x1 E2 y1, x2 E2 y2 且 x1 < x2, y2 < y1 的四元组
    order 为 0 -> 1 的线性序
    """
    found = []
    rel = lambda x, y, e: space.lattice.leq(space.dist(x, y), e)
    for x1, x2, y1, y2 in permutations(space.points, 4):
        if not (rel(x1, x2, e1) and rel(y1, y2, e1) and not rel(x1, y1, e1)):
            continue
        if not (rel(x1, y1, e2) and rel(x2, y2, e2) and not rel(x1, x2, e2)):
            continue
        if order.less(x1, x2) and order.less(y2, y1):
            found.append((x1, x2, y1, y2))
    return found


def to_dot(order):
    lines = ["digraph sqo {"]
    for k, block in enumerate(order.blocks()):
        lines.append(f"  subgraph cluster_{k} {{")
        for c in block:
            lines.append(f'    "{",".join(c)}";')
        for c1, c2 in zip(block, block[1:]):
            lines.append(f'    "{",".join(c1)}" -> "{",".join(c2)}";')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)
