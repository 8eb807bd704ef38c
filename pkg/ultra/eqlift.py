# -*- coding: UTF-8 -*-
"""
K0 类: 虚元素结构 A^eq, 拟距离 δ, 实现空间 A_K, 向下闭包 cl0 及强融合
≤_U 取 U 边的自反传递闭包
"""
import logging
from itertools import combinations

from django.conf import settings

from ultra.exceptions import (
    InvalidStructure,
    NoCommonClass,
    EmbeddingFailed,
    FactorsNotClosed,
    SaturationBudgetExceeded,
    StructureError,
)
from ultra.lattice import is_meet_irreducible, lattice_from_dict
from ultra.space import validate_space

logger = logging.getLogger("default")


class K0Structure:
    """
    元素带层级 E (即 P_{E,1}), edges 为 (E, E', x, y) 四元组, 表示 U_{E,E'}(x, y)
    origin 记录 a_eq 生成的元素对应的 (λ, 类)
    """

    def __init__(self, lattice, elements, sorts, edges, origin=None):
        self.lattice = lattice
        self.elements = tuple(elements)
        self.sorts = dict(sorts)
        self.edges = frozenset(edges)
        self.origin = dict(origin or {})
        self._up = {}
        for e, f, x, y in self.edges:
            self._up.setdefault((x, f), []).append(y)

    def level(self, x):
        return self.sorts[x]

    def up(self, x, g):
        """x/G, G 等于 x 的层级时为 x 自身, 不存在时返回 None"""
        if g == self.sorts[x]:
            return x
        targets = self._up.get((x, g))
        return targets[0] if targets else None

    def at_level(self, e):
        return [x for x in self.elements if self.sorts[x] == e]

    def below_eq(self, z, x):
        """z ≤_U x"""
        return self.up(z, self.sorts[x]) == x

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, K0Structure)
            and self.lattice == other.lattice
            and set(self.elements) == set(other.elements)
            and self.sorts == other.sorts
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((frozenset(self.elements), self.edges))

    def __repr__(self):
        return f"K0Structure({len(self.elements)} elements)"

    def to_dict(self):
        return {
            "lattice": self.lattice.to_dict(),
            "sorts": {x: self.sorts[x] for x in self.elements},
            "U": sorted(list(edge) for edge in self.edges),
        }


def check_k0(k):
    """返回 [(诊断名, 信息)], 为空表示合法且 U_U-闭"""
    lattice = k.lattice
    problems = []
    for x in k.elements:
        if k.sorts.get(x) not in lattice:
            problems.append(("Partition", f"{x} 的层级不合法"))
    if problems:
        return problems
    for e, f, x, y in k.edges:
        if x not in k.sorts or y not in k.sorts:
            problems.append(("UTyped", f"U 边 {x}->{y} 引用了未知元素"))
        elif not (lattice.lt(e, f) and k.sorts[x] == e and k.sorts[y] == f):
            problems.append(("UTyped", f"U_{{{e},{f}}}({x},{y}) 的类型不正确"))
    if problems:
        return problems
    for x in k.elements:
        for g in lattice.above(k.sorts[x]):
            targets = k._up.get((x, g), [])
            if len(targets) != 1:
                problems.append(("UClosed", f"{x} 在 {g} 上有 {len(targets)} 个上类"))
    if problems:
        return problems
    for x in k.elements:
        for g in lattice.above(k.sorts[x]):
            y = k.up(x, g)
            for h in lattice.above(g):
                if k.up(y, h) != k.up(x, h):
                    problems.append(("Coherent", f"{x}/{g}/{h} 与 {x}/{h} 不一致"))
    if problems:
        return problems
    for x, y in combinations(k.elements, 2):
        e, f = k.sorts[x], k.sorts[y]
        m = lattice.meet(e, f)
        lower = [z for z in k.at_level(m) if k.below_eq(z, x) and k.below_eq(z, y)]
        if len(lower) > 1:
            problems.append(("DownSemiClosed", f"{x},{y} 有多个公共下类:{lower}"))
    return problems


def validate_k0(lattice, elements, sorts, edges, origin=None):
    k = K0Structure(lattice, elements, sorts, edges, origin)
    problems = check_k0(k)
    if problems:
        name, msg = problems[0]
        raise InvalidStructure(msg, diagnostic=name)
    return k


def _parse_sort(value):
    """兼容 "E" 和 "(E,1)" 两种写法"""
    value = str(value).strip()
    if value.startswith("(") and value.endswith(")"):
        value = value[1:-1].split(",")[0].strip()
    return value


def k0_from_dict(data, lattice=None):
    try:
        lattice = lattice or lattice_from_dict(data["lattice"])
        sorts = {str(x): _parse_sort(v) for x, v in data["sorts"].items()}
        edges = [tuple(str(v) for v in edge) for edge in data.get("U", [])]
        return validate_k0(lattice, list(sorts), sorts, edges)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidStructure(f"K0 结构的JSON格式不正确:{e}")


def delta(k, x, y):
    """最小的 E 使 x/E = y/E"""
    lattice = k.lattice
    floor = lattice.join(k.sorts[x], k.sorts[y])
    candidates = [
        g
        for g in lattice.above(floor, strict=False)
        if k.up(x, g) is not None and k.up(x, g) == k.up(y, g)
    ]
    for g in candidates:
        if all(lattice.leq(g, h) for h in candidates):
            return g
    raise NoCommonClass(f"{x} 与 {y} 没有公共类", x=x, y=y)


def class_label(lam, cls):
    return f"{lam}[{'|'.join(cls)}]"


def a_eq(space):
    """每个 (λ, λ-类) 一个元素, U 边按类包含关系"""
    lattice = space.lattice
    elements, sorts, origin = [], {}, {}
    for lam in lattice.ascending():
        for cls in space.classes(lam):
            label = class_label(lam, cls)
            elements.append(label)
            sorts[label] = lam
            origin[label] = (lam, cls)
    edges = []
    for x in elements:
        lam, cls = origin[x]
        for g in lattice.above(lam):
            target = space.class_of(cls[0], g)
            edges.append((lam, g, x, class_label(g, target)))
    return K0Structure(lattice, elements, sorts, edges, origin)


def a_k(k):
    """每个元素取一个点, 距离为 δ"""
    d = {}
    for x, y in combinations(k.elements, 2):
        d[(x, y)] = delta(k, x, y)
    return validate_space(k.lattice, list(k.elements), d)


def embed_check_eqsub(k):
    """x -> x_A/E 为保持层级与 δ 的嵌入 K -> a_eq(a_k(K))"""
    space = a_k(k)
    target = a_eq(space)
    mapping = {
        x: class_label(k.sorts[x], space.class_of(x, k.sorts[x])) for x in k.elements
    }
    if len(set(mapping.values())) != len(mapping):
        raise EmbeddingFailed("映射不是单射")
    for x in k.elements:
        if target.sorts[mapping[x]] != k.sorts[x]:
            raise EmbeddingFailed(f"{x} 的层级没有保持", x=x)
    for x in k.elements:
        for y in k.elements:
            if delta(k, x, y) != delta(target, mapping[x], mapping[y]):
                raise EmbeddingFailed(f"δ({x},{y}) 没有保持", x=x, y=y)
    return mapping


def _common_class(k, x, y):
    try:
        return delta(k, x, y)
    except NoCommonClass:
        return None


def _unwitnessed(k):
    """第一对 δ = E∨F 但缺少 E∧F 层公共下类的元素"""
    lattice = k.lattice
    for x, y in combinations(k.elements, 2):
        e, f = k.sorts[x], k.sorts[y]
        if lattice.leq(e, f) or lattice.leq(f, e):
            continue
        if _common_class(k, x, y) != lattice.join(e, f):
            continue
        m = lattice.meet(e, f)
        if not any(
            k.up(z, e) == x and k.up(z, f) == y for z in k.at_level(m)
        ):
            return x, y
    return None


def is_downward_closed(k):
    return _unwitnessed(k) is None


def _fresh(taken, level):
    n = len(taken)
    while f"w{n}@{level}" in taken:
        n += 1
    return f"w{n}@{level}"


def _forced_class(k, g, targets, fresh):
    """meet-reducible 的 G = H1∧H2 时, G-类由 H1-类和 H2-类唯一确定"""
    lattice = k.lattice
    above = lattice.above(g)
    for h1, h2 in combinations(above, 2):
        if lattice.meet(h1, h2) != g or targets[h1] in fresh or targets[h2] in fresh:
            continue
        for u in k.at_level(g):
            if all(k.up(u, h) == targets[h] for h in above):
                return u
    return None


def _add_witness(k, x, y, taken):
    """为 x, y 加一个 E∧F 层的公共下类 z 及其上链"""
    lattice = k.lattice
    e, f = k.sorts[x], k.sorts[y]
    m = lattice.meet(e, f)
    targets, fresh = {}, set()
    new_sorts = {}
    for g in lattice.descending():
        if not lattice.lt(m, g):
            continue
        if lattice.leq(e, g):
            targets[g] = k.up(x, g)
        elif lattice.leq(f, g):
            targets[g] = k.up(y, g)
        else:
            u = None
            if not is_meet_irreducible(lattice, g):
                u = _forced_class(k, g, targets, fresh)
            if u is None:
                u = _fresh(taken, g)
                taken.add(u)
                fresh.add(u)
                new_sorts[u] = g
            targets[g] = u
    z = _fresh(taken, m)
    taken.add(z)
    new_sorts[z] = m
    edges = set(k.edges)
    for w, level in new_sorts.items():
        for h in lattice.above(level):
            edges.add((level, h, w, targets[h]))
    elements = list(k.elements) + sorted(new_sorts, key=lambda w: lattice.height(new_sorts[w]))
    sorts = {**k.sorts, **new_sorts}
    return K0Structure(lattice, elements, sorts, edges, k.origin)


def saturation_budget(k):
    """settings.SATURATION_BUDGET 为 0 时取 2^(|Λ|·|K|)"""
    configured = getattr(settings, "SATURATION_BUDGET", 0)
    return configured or 2 ** (len(k.lattice) * len(k))


def cl0(k, budget=None):
    """
    不动点饱和: 反复为缺少见证的对加 E∧F 层元素, 直到向下闭
    :param budget: 最多新增的元素数, 默认见 saturation_budget
    """
    budget = budget if budget is not None else saturation_budget(k)
    taken = set(k.elements)
    added = 0
    current = k
    while True:
        pair = _unwitnessed(current)
        if pair is None:
            break
        before = len(current)
        current = _add_witness(current, pair[0], pair[1], taken)
        added += len(current) - before
        logger.debug(f"cl0 为 {pair} 增加见证, 当前元素数:{len(current)}")
        if added > budget:
            raise SaturationBudgetExceeded(f"cl0 新增元素超过预算{budget}", budget=budget)
    problems = check_k0(current)
    if problems:
        raise StructureError(f"cl0 结果不合法:{problems[0][1]}", diagnostic=problems[0][0])
    return current


class StructureAmalgam:
    """结构融合结果, left/right 为因子到结果的元素映射"""

    def __init__(self, structure, left, right):
        self.structure = structure
        self.left = left
        self.right = right

    def is_strong(self, base_size):
        common = set(self.left.values()) & set(self.right.values())
        return len(common) == base_size


def _check_k0_embedding(base, k, f):
    for b in base.elements:
        if k.sorts.get(f.get(b)) != base.sorts[b]:
            raise InvalidStructure(f"{b} 的映射不保持层级")
        for g in base.lattice.above(base.sorts[b]):
            if f[base.up(b, g)] != k.up(f[b], g):
                raise InvalidStructure(f"{b}/{g} 的映射不保持 U")


def _relabel(label, taken):
    while label in taken:
        label = f"{label}'"
    return label


def free_amalgam_k0(base, k1, f1, k2, f2):
    """不做闭包的自由融合, 返回 (结构, right 映射)"""
    _check_k0_embedding(base, k1, f1)
    _check_k0_embedding(base, k2, f2)
    right = {f2[b]: f1[b] for b in base.elements}
    taken = set(k1.elements)
    for x in k2.elements:
        if x not in right:
            right[x] = _relabel(x, taken)
            taken.add(right[x])
    elements = list(k1.elements) + [right[x] for x in k2.elements if right[x] not in k1.sorts]
    sorts = dict(k1.sorts)
    for x in k2.elements:
        sorts[right[x]] = k2.sorts[x]
    edges = set(k1.edges) | {(e, f, right[x], right[y]) for e, f, x, y in k2.edges}
    return K0Structure(k1.lattice, elements, sorts, edges), right


def amalgamate_k0(base, k1, f1, k2, f2, budget=None):
    """自由融合后取 cl0, 因子与 base 都必须向下闭"""
    for name, k in (("base", base), ("K1", k1), ("K2", k2)):
        if not is_downward_closed(k):
            raise FactorsNotClosed(f"{name} 不是向下闭的", factor=name)
    free, right = free_amalgam_k0(base, k1, f1, k2, f2)
    closed = cl0(free, budget)
    return StructureAmalgam(closed, {x: x for x in k1.elements}, right)
