# -*- coding: UTF-8 -*-
"""Λ-超度量空间, 等价关系系统, 嵌入与空间层面的融合(amalgamation)"""
import logging
import random
from itertools import combinations, product

from ultra.exceptions import (
    TriangleViolation,
    NonZeroSelfDistance,
    ZeroDistanceDistinctPoints,
    MissingDistance,
    EquivalenceSystemError,
    ResultViolatesTriangle,
    LatticeMismatch,
    NotDistributive,
    InvalidStructure,
)
from ultra.lattice import is_distributive, lattice_from_dict

logger = logging.getLogger("default")


class UltrametricSpace:
    """取值于格的距离空间, 距离表对称且包含自身距离"""

    def __init__(self, lattice, points, d):
        self.lattice = lattice
        self.points = tuple(points)
        self._d = d
        self._classes = {}

    def dist(self, x, y):
        return self._d[(x, y)]

    def classes(self, lam):
        """按 d ≤ λ 划分, 类内排序, 类之间按首元素排序"""
        if lam not in self._classes:
            leq = self.lattice.leq
            seen = set()
            parts = []
            for x in sorted(self.points):
                if x in seen:
                    continue
                part = tuple(
                    sorted(y for y in self.points if leq(self._d[(x, y)], lam))
                )
                seen.update(part)
                parts.append(part)
            self._classes[lam] = tuple(parts)
        return self._classes[lam]

    def class_of(self, x, lam):
        for part in self.classes(lam):
            if x in part:
                return part
        raise KeyError(x)

    def distances(self):
        return {self._d[(x, y)] for x, y in combinations(self.points, 2)}

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, UltrametricSpace):
            return False
        if self.lattice != other.lattice or set(self.points) != set(other.points):
            return False
        return all(
            self._d[(x, y)] == other._d[(x, y)]
            for x, y in combinations(self.points, 2)
        )

    def __hash__(self):
        return hash(frozenset(self.points))

    def __repr__(self):
        return f"UltrametricSpace({list(self.points)})"

    def to_dict(self):
        return {
            "lattice": self.lattice.to_dict(),
            "points": list(self.points),
            "d": {
                f"{x},{y}": self._d[(x, y)] for x, y in combinations(self.points, 2)
            },
        }


class EquivalenceSystem:
    """λ -> 点集划分, 与超度量空间一一对应"""

    def __init__(self, lattice, points, partitions):
        self.lattice = lattice
        self.points = tuple(points)
        self.partitions = partitions

    def related(self, lam, x, y):
        return any(x in part and y in part for part in self.partitions[lam])

    def __eq__(self, other):
        if not isinstance(other, EquivalenceSystem):
            return False
        if self.lattice != other.lattice or set(self.points) != set(other.points):
            return False
        normalize = lambda parts: {frozenset(p) for p in parts}
        return all(
            normalize(self.partitions[lam]) == normalize(other.partitions[lam])
            for lam in self.lattice.elements
        )


def _parse_distances(points, d):
    """d 的 key 可以是 (x, y) 或 "x,y" 字符串"""
    table = {}
    for key, value in d.items():
        if isinstance(key, str):
            try:
                x, y = key.split(",")
            except ValueError:
                raise InvalidStructure(f"距离键格式不正确:{key}")
        else:
            x, y = key
        table[(x.strip(), y.strip())] = str(value)
    return table


def validate_space(lattice, points, d):
    """
    校验超度量空间
    :param lattice: Lattice
    :param points: 点标签列表
    :param d: 距离表, 缺失的自身距离补 0, 只给一个方向时对称补全
    :return: UltrametricSpace
    """
    points = [str(p) for p in points]
    if len(set(points)) != len(points):
        raise InvalidStructure("点标签重复")
    raw = _parse_distances(points, d)
    zero = lattice.bottom
    table = {}
    for x in points:
        value = raw.get((x, x), zero)
        if value != zero:
            raise NonZeroSelfDistance(f"{x}到自身的距离为{value}", x=x)
        table[(x, x)] = zero
    for x, y in combinations(points, 2):
        forward, backward = raw.get((x, y)), raw.get((y, x))
        if forward is None and backward is None:
            raise MissingDistance(f"缺少{x}与{y}的距离", x=x, y=y)
        if forward is not None and backward is not None and forward != backward:
            raise InvalidStructure(f"{x}与{y}的距离不对称", x=x, y=y)
        value = forward if forward is not None else backward
        if value not in lattice:
            raise InvalidStructure(f"距离{value}不是格中元素", x=x, y=y)
        if value == zero:
            raise ZeroDistanceDistinctPoints(f"{x}与{y}距离为0", x=x, y=y)
        table[(x, y)] = table[(y, x)] = value
    for x, y, z in product(points, repeat=3):
        if len({x, y, z}) < 3:
            continue
        if not lattice.leq(table[(x, z)], lattice.join(table[(x, y)], table[(y, z)])):
            raise TriangleViolation(
                f"d({x},{z}) ≰ d({x},{y}) ∨ d({y},{z})", x=x, y=y, z=z
            )
    return UltrametricSpace(lattice, points, table)


def space_from_dict(data, lattice=None):
    try:
        lattice = lattice or lattice_from_dict(data["lattice"])
        return validate_space(lattice, data["points"], data.get("d", {}))
    except (KeyError, TypeError) as e:
        raise InvalidStructure(f"空间的JSON格式不正确:{e}")


def classes(space, lam):
    return space.classes(lam)


def to_equivalence_system(space):
    return EquivalenceSystem(
        space.lattice,
        space.points,
        {lam: space.classes(lam) for lam in space.lattice.elements},
    )


def from_equivalence_system(system):
    """
    d(x, y) 取所有使 x E_λ y 成立的 λ 的 meet
    先检查 E_0 为相等关系, E_1 为全关系, 单调且保 meet
    """
    lattice = system.lattice
    points = system.points
    for lam in lattice.elements:
        if lam not in system.partitions:
            raise EquivalenceSystemError(f"缺少{lam}对应的划分", element=lam)
        covered = sorted(p for part in system.partitions[lam] for p in part)
        if covered != sorted(points):
            raise EquivalenceSystemError(f"{lam}对应的划分不是点集的划分", element=lam)
    if any(len(part) > 1 for part in system.partitions[lattice.bottom]):
        raise EquivalenceSystemError("E_0 必须是相等关系")
    if len(points) > 1 and len(system.partitions[lattice.top]) != 1:
        raise EquivalenceSystemError("E_1 必须只有一个类")
    for lam, mu in product(lattice.elements, repeat=2):
        m = lattice.meet(lam, mu)
        for x, y in combinations(points, 2):
            both = system.related(lam, x, y) and system.related(mu, x, y)
            if both != system.related(m, x, y):
                raise EquivalenceSystemError(
                    f"E_{m} 不等于 E_{lam} ∩ E_{mu}", x=x, y=y, element=m
                )
    d = {}
    for x, y in combinations(points, 2):
        d[(x, y)] = lattice.meet_all(
            lam for lam in lattice.elements if system.related(lam, x, y)
        )
    try:
        return validate_space(lattice, points, d)
    except TriangleViolation as e:
        raise ResultViolatesTriangle(e.msg, **e.witness)


def find_embeddings(a, b):
    """所有保距单射 a -> b, 按 a 的点序回溯, 结果顺序确定"""
    if a.lattice != b.lattice:
        raise LatticeMismatch("两个空间的格不同")
    source = list(a.points)
    result = []

    def extend(mapping, used):
        if len(mapping) == len(source):
            result.append(dict(mapping))
            return
        x = source[len(mapping)]
        for y in b.points:
            if y in used:
                continue
            if all(a.dist(x, p) == b.dist(y, q) for p, q in mapping.items()):
                mapping[x] = y
                used.add(y)
                extend(mapping, used)
                del mapping[x]
                used.discard(y)

    extend({}, set())
    return result


def copies(a, b):
    """a 在 b 中的拷贝, 即嵌入像集去重"""
    seen = []
    for f in find_embeddings(a, b):
        image = frozenset(f.values())
        if image not in seen:
            seen.append(image)
    return seen


def is_isomorphic(a, b):
    return len(a) == len(b) and bool(find_embeddings(a, b))


def subspace(space, points):
    points = [p for p in space.points if p in set(points)]
    d = {(x, y): space.dist(x, y) for x in points for y in points}
    return UltrametricSpace(space.lattice, points, d)


class Amalgam:
    """融合结果, left/right 为两个因子到结果的嵌入"""

    def __init__(self, space, left, right, identified=None):
        self.space = space
        self.left = left
        self.right = right
        self.identified = identified or []

    @property
    def is_strong(self):
        return not self.identified


def _fresh_label(label, taken):
    while label in taken:
        label = f"{label}'"
    return label


def amalgamate_spaces(base, a1, f1, a2, f2):
    """
    在 base 上融合 a1, a2
    跨因子距离 d(x, y) = ⋀_c (d(x, c) ∨ d(c, y)), base 为空时为 1
    公式给出 0 时两点必须重合(0 可约时会发生), 这时融合不是强融合
    :param f1: base 的点 -> a1 的点
    :param f2: base 的点 -> a2 的点
    """
    lattice = base.lattice
    if a1.lattice != lattice or a2.lattice != lattice:
        raise LatticeMismatch("融合的空间必须在同一个格上")
    if not is_distributive(lattice):
        raise NotDistributive("只有分配格上的空间才能用此公式融合")
    for f, target in ((f1, a1), (f2, a2)):
        for x, y in combinations(base.points, 2):
            if target.dist(f[x], f[y]) != base.dist(x, y):
                raise InvalidStructure(f"{x},{y} 的映射不保距")

    join = lattice.join
    base_images = [(f1[c], f2[c]) for c in base.points]
    taken = set(a1.points)
    right = {f2[c]: f1[c] for c in base.points}
    extra = [y for y in a2.points if y not in right]
    cross = {}
    identified = []
    for y in extra:
        for x in a1.points:
            if x in right.values():
                continue
            cross[(x, y)] = lattice.meet_all(
                join(a1.dist(x, c1), a2.dist(c2, y)) for c1, c2 in base_images
            )
    for y in extra:
        twin = [x for x in a1.points if cross.get((x, y)) == lattice.bottom]
        if twin:
            right[y] = twin[0]
            identified.append((twin[0], y))
            continue
        right[y] = _fresh_label(y, taken)
        taken.add(right[y])

    points = list(a1.points) + [right[y] for y in extra if (right[y], y) not in identified]
    d = {}
    for x, y in combinations(a1.points, 2):
        d[(x, y)] = a1.dist(x, y)
    for y1, y2 in combinations(a2.points, 2):
        p, q = right[y1], right[y2]
        if p != q:
            d[(p, q)] = a2.dist(y1, y2)
    for (x, y), value in cross.items():
        if right[y] != x and (x, right[y]) not in d and (right[y], x) not in d:
            d[(x, right[y])] = value
    try:
        space = validate_space(lattice, points, d)
    except TriangleViolation as e:
        raise ResultViolatesTriangle(e.msg, **e.witness)
    left = {x: x for x in a1.points}
    if identified:
        logger.debug(f"融合时合并了点:{identified}")
    return Amalgam(space, left, right, identified)


def one_point_types(space, support):
    """support 上所有可实现的单点扩张类型, 每个类型为 support 点 -> 距离"""
    lattice = space.lattice
    values = [x for x in lattice.elements if x != lattice.bottom]
    result = []
    for assignment in product(values, repeat=len(support)):
        t = dict(zip(support, assignment))
        ok = all(
            lattice.leq(t[p], lattice.join(space.dist(p, q), t[q]))
            and lattice.leq(space.dist(p, q), lattice.join(t[p], t[q]))
            for p, q in product(support, repeat=2)
            if p != q
        )
        if ok:
            result.append(t)
    return result


def _realized(space, support, t):
    return any(
        all(space.dist(z, s) == v for s, v in t.items())
        for z in space.points
        if z not in t
    )


def saturation_level(space):
    """所有 ≤ k 点子集的单点扩张都已实现的最大 k"""
    for k in range(len(space) + 1):
        for support in combinations(space.points, k):
            if not all(_realized(space, support, t) for t in one_point_types(space, support)):
                return k - 1
    return len(space)


def generic_space(lattice, n, seed=0):
    """
    逐点饱和构造: 依次对 k = 0, 1, ... 的子集补齐所有未实现的单点扩张
    新点到其他点的距离取融合公式给出的最远距离
    """
    if not is_distributive(lattice):
        raise NotDistributive("只有分配格才能构造 generic 空间")
    if n <= 0:
        return UltrametricSpace(lattice, [], {})
    rng = random.Random(seed)
    points = ["p0"]
    d = {("p0", "p0"): lattice.bottom}
    space = UltrametricSpace(lattice, points, d)
    k = 0
    while k <= len(points) and len(points) < n:
        supports = list(combinations(list(points), k))
        rng.shuffle(supports)
        for support in supports:
            for t in one_point_types(space, support):
                if len(points) >= n:
                    break
                if _realized(space, support, t):
                    continue
                new = f"p{len(points)}"
                for w in points:
                    if w in t:
                        value = t[w]
                    else:
                        value = lattice.meet_all(
                            lattice.join(t[s], space.dist(s, w)) for s in support
                        )
                    d[(new, w)] = d[(w, new)] = value
                d[(new, new)] = lattice.bottom
                points.append(new)
                space = UltrametricSpace(lattice, points, d)
        k += 1
    result = validate_space(lattice, points, d)
    level = saturation_level(result)
    if level < len(points) - 1:
        logger.warning(f"generic 空间点数达到上限{n}, 单点扩张只饱和到 k={level}")
    logger.debug(f"generic 空间构造完成, 点数:{len(points)}")
    return result
