# -*- coding: UTF-8 -*-
"""K 结构的强融合与局部有限补全"""
import logging
from itertools import combinations

import networkx as nx

from ultra.eqlift import StructureAmalgam
from ultra.exceptions import (
    BudgetExceeded,
    ConstraintViolated,
    FactorsNotClosed,
    InvalidStructure,
    OrderCycle,
)
from ultra.kstruct import (
    KStructure,
    RelationalStructure,
    cl,
    is_k_closed,
    k_diagnostics,
    less_from_sequence,
    metric_part,
    metric_relations,
    substructure,
)

logger = logging.getLogger("default")

# complete 的输入约束, 顺序即检查顺序
COMPLETION_CONSTRAINTS = [
    "Partition",
    "UClosed",
    "Coherent",
    "OrderAcyclic",
    "TypeOrderRespected",
    "UTyped",
    "DexTyped",
    "DTyped",
    "DUnique",
    "BBijective",
    "BCoherent",
    "DownSemiClosed",
]


def is_embedding(s, t, mapping):
    """mapping: s -> t 单射, 且 s 与其像上的诱导子结构一致"""
    if len(set(mapping.values())) != len(mapping) or set(mapping) != set(s.elements):
        return False
    image = substructure(t, mapping.values())
    f = mapping.get
    return (
        all(t.sorts.get(f(x)) == s.sorts[x] for x in s.elements)
        and {(e, g, f(x), f(y)) for e, g, x, y in s.U} == set(image.U)
        and {(e, i, j, f(x), f(y)) for e, i, j, x, y in s.B} == set(image.B)
        and {(f(x), f(y)) for x, y in s.dex} == set(image.dex)
        and {(f(x1), f(x2), f(y)) for x1, x2, y in s.d} == set(image.d)
        and {(f(x), f(y)) for x, y in s.less} == set(image.less)
    )


def _linear_extension(elements, pairs, params, sorts):
    """以 <_{1-types} 为第一关键字, 创建顺序为第二关键字的拓扑排序"""
    graph = nx.DiGraph()
    graph.add_nodes_from(elements)
    graph.add_edges_from(pairs)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = [u for u, _ in nx.find_cycle(graph)]
        raise OrderCycle(f"顺序关系存在环:{cycle}", cycle=cycle)
    created = {x: k for k, x in enumerate(elements)}
    return list(
        nx.lexicographical_topological_sort(
            graph, key=lambda x: (params.rank(sorts[x]), created[x])
        )
    )


def _relabel(label, taken):
    while label in taken:
        label = f"{label}'"
    return label


def amalgamate_k(base, k1, f1, k2, f2, params=None, budget=None):
    """
    自由融合, D∃ 按 δ 补齐, < 线性补全后取 cl
    :param f1: base 元素 -> k1 元素
    :param f2: base 元素 -> k2 元素
    :return: StructureAmalgam
    """
    params = params or base.params or k1.params
    for name, k in (("base", base), ("K1", k1), ("K2", k2)):
        if not is_k_closed(k, params):
            raise FactorsNotClosed(f"{name} 不是 U_K-闭的", factor=name)
    for name, k, f in (("K1", k1, f1), ("K2", k2, f2)):
        if not is_embedding(base, k, f):
            raise InvalidStructure(f"base 到 {name} 的映射不是嵌入", factor=name)

    right = {f2[b]: f1[b] for b in base.elements}
    taken = set(k1.elements)
    for x in k2.elements:
        if x not in right:
            right[x] = _relabel(x, taken)
            taken.add(right[x])
    r = right.get
    added = [r(x) for x in k2.elements if r(x) not in k1.sorts]
    elements = list(k1.elements) + added
    sorts = {**k1.sorts, **{r(x): k2.sorts[x] for x in k2.elements}}
    U = set(k1.U) | {(e, g, r(x), r(y)) for e, g, x, y in k2.U}
    B = set(k1.B) | {(e, i, j, r(x), r(y)) for e, i, j, x, y in k2.B}
    pairs = set(k1.less) | {(r(x), r(y)) for x, y in k2.less}
    sequence = _linear_extension(elements, pairs, params, sorts)

    free = KStructure(k1.lattice, elements, sorts, U, B, (), (), less_from_sequence(sequence), params)
    dex, d = metric_relations(metric_part(free))
    free = KStructure(k1.lattice, elements, sorts, U, B, dex, d, free.less, params)
    closed = cl(free, params, budget)
    logger.debug(f"amalgamate_k 完成, 元素数:{len(closed)}")
    return StructureAmalgam(closed, {x: x for x in k1.elements}, right)


def completion_diagnostics(c, params):
    """complete 的前置约束检查, < 只要求无环"""
    return k_diagnostics(c, params, order="acyclic")


def complete(c, b, cover, params=None, budget=None):
    """
    把 B 的拷贝之并 C 补全为 K 结构
    :param c: U_K-半闭的 KStructure, < 可以只是偏序
    :param b: U_K-闭的 KStructure
    :param cover: B -> C 的映射列表, 每个都必须是嵌入
    :return: U_K-闭的 KStructure, C 的元素原样保留
    """
    params = params or b.params
    if not is_k_closed(b, params):
        raise ConstraintViolated("UClosed", "B 不是 U_K-闭的")
    diagnostics = completion_diagnostics(c, params)
    failed = diagnostics.failed()
    if "OrderAcyclic" in failed:
        raise OrderCycle("C 上的 < 存在环")
    for name in COMPLETION_CONSTRAINTS + failed:
        if name in failed:
            row = [r for r in diagnostics.rows if r.name == name and r.level == 2][0]
            raise ConstraintViolated(name, row.message)
    for k, f in enumerate(cover):
        if not is_embedding(b, c, f):
            raise ConstraintViolated("CopyEmbedded", f"第{k}个拷贝不是嵌入", copy=k)
    covered = set().union(*(set(f.values()) for f in cover)) if cover else set()
    if covered != set(c.elements):
        raise ConstraintViolated("CopyEmbedded", "C 不是给定拷贝的并")

    sequence = _linear_extension(list(c.elements), c.less, params, c.sorts)
    dex, d = metric_relations(metric_part(c))
    completed = KStructure(
        c.lattice, c.elements, c.sorts, c.U, c.B, dex, d, less_from_sequence(sequence), params
    )
    result = cl(completed, params, budget)
    logger.debug(f"complete 完成, 拷贝数:{len(cover)}, 元素数:{len(result)}")
    return result


def _relational(s):
    return s.to_relational() if isinstance(s, KStructure) else s


def _covered_pairs(structure):
    pairs = set()
    for name, tuples in structure.relations.items():
        for t in tuples:
            for x, y in combinations(set(t), 2):
                pairs.add(frozenset((x, y)))
    return pairs


def check_irreducible(s):
    """任意两个不同元素都出现在某个关系元组中"""
    structure = _relational(s)
    covered = _covered_pairs(structure)
    return all(frozenset((x, y)) in covered for x, y in combinations(structure.universe, 2))


def check_hom_embedding(f, a, b, limit=16):
    """f: a -> b 在 a 的每个不可约子结构上都是嵌入"""
    a, b = _relational(a), _relational(b)
    universe = list(a.universe)
    if len(universe) > limit:
        raise BudgetExceeded(f"元素数{len(universe)}超过{limit}", limit=limit)
    for size in range(1, len(universe) + 1):
        for sub in combinations(universe, size):
            part = a.restrict(sub)
            if not check_irreducible(part):
                continue
            image = [f[x] for x in sub]
            if len(set(image)) != len(image):
                return False
            back = {f[x]: x for x in sub}
            for name, tuples in part.relations.items():
                if any(tuple(f[v] for v in t) not in b.relations.get(name, ()) for t in tuples):
                    return False
            for name, tuples in b.relations.items():
                for t in tuples:
                    if all(v in back for v in t) and tuple(back[v] for v in t) not in part.relations.get(name, ()):
                        return False
    return True
