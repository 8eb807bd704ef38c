# -*- coding: UTF-8 -*-
"""
提升类 K: P_{E,i} 分层, U/B/D∃/D 关系与线性序 <
闭包描述 U_U / U_K, 闭性检查, 度量部分, 扩张与闭包, ψ 递归与无量词重解释
"""
import logging
from itertools import combinations, product

import networkx as nx

from ultra.eqlift import K0Structure, check_k0, cl0, delta
from ultra.exceptions import (
    ConstraintViolated,
    FormulaIllTyped,
    InvalidStructure,
    NoCommonClass,
    NotClosed,
    NotContaining,
    NotWellEquipped,
    ParamMismatch,
)
from ultra.harness.models import CheckSet
from ultra.lattice import is_meet_irreducible, lattice_from_dict
from ultra.sqo import DerivationChoice, is_well_equipped, language_from_dict, min_language

logger = logging.getLogger("default")


class LiftParams:
    """
    提升参数
    counts: 每个 E 的拷贝数 N_E, meet-reducible 的 E 只有 1 份
    type_order: 所有 (E, i) 的线性序 <_{1-types}
    choice: F'_E (cover) 与 F''_E (partner) 的选择
    """

    def __init__(self, lattice, language, counts=None, type_order=None, cover=None, partner=None):
        self.lattice = lattice
        self.language = language
        self.choice = DerivationChoice(lattice, cover, partner)
        default_counts = {
            e: max(len(language.with_bottom(e)), 1) for e in lattice.elements
        }
        self.counts = {**default_counts, **(counts or {})}
        default_order = [
            (e, i) for e in lattice.ascending() for i in range(1, self.counts[e] + 1)
        ]
        self.type_order = [tuple(s) for s in (type_order or default_order)]
        self._rank = {s: k for k, s in enumerate(self.type_order)}
        self._check()

    def _check(self):
        lattice = self.lattice
        if not is_well_equipped(self.language):
            raise NotWellEquipped("提升参数的语言不是 well-equipped")
        for e in lattice.elements:
            n = self.counts.get(e, 0)
            if n < 1:
                raise ParamMismatch(f"N_{e} 至少为1", element=e)
            if not is_meet_irreducible(lattice, e) and n != 1:
                raise ParamMismatch(f"meet-reducible 的 {e} 只能有一份", element=e)
            if is_meet_irreducible(lattice, e) and n != len(self.language.with_bottom(e)):
                raise ParamMismatch(f"N_{e} 与语言中 {e} 的槽位数不一致", element=e)
        if set(self.type_order) != set(self.sorts()) or len(self.type_order) != len(
            self.sorts()
        ):
            raise ParamMismatch("type_order 必须是所有 (E, i) 的线性排列")
        for e, c in self.choice.cover.items():
            if c not in lattice.covers(e):
                raise ParamMismatch(f"{c} 不是 {e} 的覆盖元素", element=e)
        for e, p in self.choice.partner.items():
            if lattice.meet(self.choice.cover[e], p) != e:
                raise ParamMismatch(f"F'_{e} ∧ F''_{e} 不等于 {e}", element=e)

    def sorts(self):
        return [(e, i) for e in self.lattice.elements for i in range(1, self.counts[e] + 1)]

    def rank(self, sort):
        return self._rank[tuple(sort)]

    def cover(self, e):
        return self.choice.cover.get(e)

    def partner(self, e):
        return self.choice.partner.get(e)

    def slot_top(self, e, i):
        return self.language.slot(e, i).top

    def __eq__(self, other):
        return (
            isinstance(other, LiftParams)
            and self.language == other.language
            and self.counts == other.counts
            and self.type_order == other.type_order
            and self.choice.cover == other.choice.cover
            and self.choice.partner == other.choice.partner
        )

    def __hash__(self):
        return hash((self.language, tuple(self.type_order)))

    def to_dict(self):
        return {
            "language": self.language.to_dict(),
            "counts": dict(self.counts),
            "type_order": [list(s) for s in self.type_order],
            **self.choice.to_dict(),
        }


def default_params(lattice, language=None):
    return LiftParams(lattice, language or min_language(lattice))


def params_from_dict(lattice, data):
    data = data or {}
    language = (
        language_from_dict(lattice, data["language"])
        if data.get("language")
        else min_language(lattice)
    )
    type_order = [(str(e), int(i)) for e, i in data["type_order"]] if data.get("type_order") else None
    return LiftParams(
        lattice,
        language,
        counts={str(k): int(v) for k, v in (data.get("counts") or {}).items()},
        type_order=type_order,
        cover=data.get("cover"),
        partner=data.get("partner"),
    )


def _sym(pairs):
    return frozenset(pairs) | frozenset((y, x) for x, y in pairs)


def _sym_d(triples):
    return frozenset(triples) | frozenset((x2, x1, y) for x1, x2, y in triples)


class KStructure:
    """
    sorts: 元素 -> (E, i)
    U: (E, F, x, y), 只在 i=1 的部分上
    B: (E, i, j, x, y), 对所有 i ≠ j 给出
    dex: (x, y) 对称; d: (x1, x2, y) 对 x1, x2 对称
    less: 严格序关系的 (x, y) 对
    """

    def __init__(self, lattice, elements, sorts, U=(), B=(), dex=(), d=(), less=(), params=None):
        self.lattice = lattice
        self.elements = tuple(elements)
        self.sorts = {x: tuple(s) for x, s in sorts.items()}
        self.U = frozenset(U)
        self.B = frozenset(B)
        self.dex = _sym(dex)
        self.d = _sym_d(d)
        self.less = frozenset(less)
        self.params = params
        self._metric = None
        self._transport = {}
        for e, i, j, x, y in self.B:
            self._transport.setdefault((x, j), []).append(y)

    def level(self, x):
        return self.sorts[x][0]

    def index(self, x):
        return self.sorts[x][1]

    def metric(self):
        if self._metric is None:
            self._metric = metric_part(self)
        return self._metric

    def transport(self, x, j):
        """B_{E,i,j}(x)"""
        if self.sorts[x][1] == j:
            return x
        targets = self._transport.get((x, j))
        return targets[0] if targets else None

    def home(self, x):
        return self.transport(x, 1)

    def up(self, x, g):
        """i=1 部分上的 x/G"""
        return self.metric().up(self.home(x), g)

    def delta(self, x, y):
        """经 B 搬运到 i=1 后的拟距离"""
        return delta(self.metric(), self.home(x), self.home(y))

    def less_than(self, x, y):
        return (x, y) in self.less

    def sort_members(self, sort):
        members = [x for x in self.elements if self.sorts[x] == tuple(sort)]
        return sorted(members, key=lambda x: sum((y, x) in self.less for y in members))

    def sequence(self):
        """less 为线性序时的元素排列"""
        return sorted(self.elements, key=lambda x: sum((y, x) in self.less for y in self.elements))

    def witnesses(self, x1, x2):
        return [y for a, b, y in self.d if a == x1 and b == x2]

    def with_less(self, less):
        return KStructure(
            self.lattice, self.elements, self.sorts, self.U, self.B, self.dex, self.d, less, self.params
        )

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (
            isinstance(other, KStructure)
            and self.lattice == other.lattice
            and set(self.elements) == set(other.elements)
            and self.sorts == other.sorts
            and self.U == other.U
            and self.B == other.B
            and self.dex == other.dex
            and self.d == other.d
            and self.less == other.less
        )

    def __hash__(self):
        return hash((frozenset(self.elements), self.U, self.less))

    def __repr__(self):
        return f"KStructure({len(self.elements)} elements)"

    def to_relational(self):
        relations = {}
        arities = {}

        def add(name, arity, t):
            arities[name] = arity
            relations.setdefault(name, set()).add(t)

        for x, (e, i) in self.sorts.items():
            add(f"P:{e}:{i}", 1, (x,))
        for e, f, x, y in self.U:
            add(f"U:{e}:{f}", 2, (x, y))
        for e, i, j, x, y in self.B:
            add(f"B:{e}:{i}:{j}", 2, (x, y))
        for x, y in self.dex:
            add(f"Dex:{self.level(x)}:{self.level(y)}", 2, (x, y))
        for x1, x2, y in self.d:
            add(f"D:{self.level(x1)}:{self.level(x2)}", 3, (x1, x2, y))
        arities["<"] = 2
        relations["<"] = set(self.less)
        return RelationalStructure(self.elements, relations, arities)

    def to_dict(self):
        return {
            "lattice": self.lattice.to_dict(),
            "sorts": {x: f"({e},{i})" for x, (e, i) in self.sorts.items()},
            "U": sorted(list(t) for t in self.U),
            "B": sorted([e, i, j, x, y] for e, i, j, x, y in self.B),
            "Dex": sorted([x, y] for x, y in self.dex if x < y),
            "D": sorted([x1, x2, y] for x1, x2, y in self.d if x1 < x2),
            "less": self.sequence() if _is_linear(self) else sorted(list(p) for p in self.less),
        }


def from_relational(structure, lattice, params=None):
    """按关系名还原 KStructure"""
    sorts, U, B, dex, d = {}, set(), set(), set(), set()
    for name, tuples in structure.relations.items():
        head, *args = name.split(":")
        for t in tuples:
            if head == "P":
                sorts[t[0]] = (args[0], int(args[1]))
            elif head == "U":
                U.add((args[0], args[1], t[0], t[1]))
            elif head == "B":
                B.add((args[0], int(args[1]), int(args[2]), t[0], t[1]))
            elif head == "Dex":
                dex.add(t)
            elif head == "D":
                d.add(t)
    less = structure.relations.get("<", ())
    return KStructure(lattice, structure.universe, sorts, U, B, dex, d, less, params)


def _parse_sort(value):
    value = str(value).strip().strip("()")
    e, _, i = value.partition(",")
    return e.strip(), int(i or 1)


def k_from_dict(data, lattice=None, params=None):
    try:
        lattice = lattice or lattice_from_dict(data["lattice"])
        sorts = {str(x): _parse_sort(v) for x, v in data["sorts"].items()}
        U = [tuple(str(v) for v in t) for t in data.get("U", [])]
        B = [(str(e), int(i), int(j), str(x), str(y)) for e, i, j, x, y in data.get("B", [])]
        dex = [tuple(str(v) for v in t) for t in data.get("Dex", [])]
        d = [tuple(str(v) for v in t) for t in data.get("D", [])]
        raw = data.get("less", [])
        if raw and all(isinstance(v, str) for v in raw):
            less = [(x, y) for x, y in combinations(raw, 2)]
        else:
            less = [tuple(str(v) for v in p) for p in raw]
        return KStructure(lattice, list(sorts), sorts, U, B, dex, d, less, params)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidStructure(f"K 结构的JSON格式不正确:{e}")


def metric_part(s):
    """i=1 部分归约到 K0 的语言"""
    elements = [x for x in s.elements if s.sorts[x][1] == 1]
    sorts = {x: s.sorts[x][0] for x in elements}
    return K0Structure(s.lattice, elements, sorts, s.U)


def _is_linear(s):
    return all(
        (x, y) in s.less or (y, x) in s.less for x, y in combinations(s.elements, 2)
    ) and not any((x, x) in s.less for x in s.elements) and _is_acyclic(s.less)


def _is_acyclic(pairs):
    graph = nx.DiGraph()
    graph.add_edges_from(pairs)
    return nx.is_directed_acyclic_graph(graph)


def k_diagnostics(s, params, order="linear"):
    """
    按约束逐条检查, 返回 CheckSet
    order="linear" 要求 < 为线性序且 D∃ 与 δ 完全一致,
    "acyclic" 只要求 < 无环, D∃ 只要求类型正确 (用于 complete 的输入, 不同拷贝之间可以缺少 D∃)
    """
    result = CheckSet(subject="K")
    lattice = s.lattice
    counts = params.counts

    bad = [x for x in s.elements if x not in s.sorts or s.sorts[x][0] not in lattice
           or not 1 <= s.sorts[x][1] <= counts[s.sorts[x][0]]]
    if bad:
        result.error("Partition", f"元素的分层不合法:{bad}", elements=bad)
        return result
    result.passed("Partition")

    sizes = {}
    for x in s.elements:
        sizes.setdefault(s.sorts[x][0], {}).setdefault(s.sorts[x][1], 0)
        sizes[s.sorts[x][0]][s.sorts[x][1]] += 1
    unequal = [
        e for e, per in sizes.items()
        if len(set(per.values())) > 1 or len(per) != counts[e]
    ]
    if unequal:
        result.error("SortCardinality", f"同一 E 的各份大小不同:{unequal}", elements=unequal)
    else:
        result.passed("SortCardinality")

    k0 = metric_part(s)
    stray = [t for t in s.U if s.sorts.get(t[2], (None, 0))[1] != 1 or s.sorts.get(t[3], (None, 0))[1] != 1]
    if stray:
        result.error("UTyped", f"U 边必须在 i=1 的部分上:{sorted(stray)[:3]}")
    # check_k0 在第一组失败处停止, 之后的约束没有检查
    k0_problems = check_k0(k0)
    failed = bool(stray)
    for name in ("UTyped", "UClosed", "Coherent", "DownSemiClosed"):
        messages = [msg for n, msg in k0_problems if n == name]
        if messages:
            result.error(name, messages[0])
            failed = True
        elif not failed:
            result.passed(name)

    b_errors = []
    for e, i, j, x, y in s.B:
        if s.sorts.get(x) != (e, i) or s.sorts.get(y) != (e, j) or i == j:
            b_errors.append(f"B_{{{e},{i},{j}}}({x},{y}) 类型不正确")
    for x in s.elements:
        e, i = s.sorts[x]
        for j in range(1, counts[e] + 1):
            if j != i and len(s._transport.get((x, j), [])) != 1:
                b_errors.append(f"{x} 在 B_{{{e},{i},{j}}} 下的像不唯一")
    if b_errors:
        result.error("BBijective", b_errors[0])
    else:
        result.passed("BBijective")
        coherent = all(
            s.transport(s.transport(x, j), k) == s.transport(x, k)
            for x in s.elements
            for j in range(1, counts[s.sorts[x][0]] + 1)
            for k in range(1, counts[s.sorts[x][0]] + 1)
        )
        if coherent:
            result.passed("BCoherent")
        else:
            result.error("BCoherent", "B 的复合不一致")

    if result.is_valid:
        dex_errors = []
        for x, y in s.dex:
            if s.sorts[x][1] != 1 or s.sorts[y][1] != 1 or x == y:
                dex_errors.append(f"D∃({x},{y}) 类型不正确")
        fragment = k0.elements
        for x, y in combinations(fragment, 2):
            try:
                expected = delta(k0, x, y) == lattice.join(k0.sorts[x], k0.sorts[y])
            except NoCommonClass:
                expected = False
            present = (x, y) in s.dex
            if present and not expected or expected and not present and order == "linear":
                dex_errors.append(f"D∃({x},{y}) 与 δ 不一致")
        if dex_errors:
            result.error("DexTyped", dex_errors[0])
        else:
            result.passed("DexTyped")
        d_errors = []
        for x1, x2, y in s.d:
            m = lattice.meet(s.level(x1), s.level(x2))
            if (
                (x1, x2) not in s.dex
                or s.sorts.get(y) != (m, 1)
                or not (k0.below_eq(y, x1) and k0.below_eq(y, x2))
            ):
                d_errors.append(f"D({x1},{x2},{y}) 类型不正确")
        if d_errors:
            result.error("DTyped", d_errors[0])
        else:
            result.passed("DTyped")
        multi = [(x1, x2) for x1, x2 in s.dex if len(s.witnesses(x1, x2)) > 1]
        if multi:
            result.error("DUnique", f"D∃ 对有多个 D 见证:{multi[0]}")
        else:
            result.passed("DUnique")

    if not _is_acyclic(s.less) or any((x, x) in s.less for x in s.elements):
        result.error("OrderAcyclic", "< 存在环")
    else:
        result.passed("OrderAcyclic")
        if order == "linear":
            if _is_linear(s):
                result.passed("OrderLinear")
            else:
                result.error("OrderLinear", "< 不是线性序")
    wrong = [
        (x, y)
        for x, y in s.less
        if x in s.sorts and y in s.sorts
        and params.rank(s.sorts[x]) > params.rank(s.sorts[y])
    ]
    if wrong:
        result.error("TypeOrderRespected", f"< 与 <_{{1-types}} 不一致:{wrong[0]}")
    else:
        result.passed("TypeOrderRespected")
    return result


def check_k(s, params=None):
    return k_diagnostics(s, params or s.params)


def validate_k(s, params=None):
    """合法时返回带参数的结构, 否则抛出第一个失败的约束"""
    params = params or s.params
    if params is None:
        raise ParamMismatch("缺少提升参数")
    diagnostics = k_diagnostics(s, params)
    if not diagnostics.is_valid:
        row = [r for r in diagnostics.rows if r.level == 2][0]
        raise ConstraintViolated(row.name, row.message)
    if s.params is params:
        return s
    return KStructure(s.lattice, s.elements, s.sorts, s.U, s.B, s.dex, s.d, s.less, params)


class ClosureEntry:
    """
    一个闭包关系及其根
    roots(S): 根元组的集合; tuples(S): (根, 其余分量) 列表
    """

    def __init__(self, name, roots, tuples):
        self.name = name
        self.roots = roots
        self.tuples = tuples

    def out_degrees(self, s):
        degrees = {root: 0 for root in self.roots(s)}
        stray = 0
        for root, _ in self.tuples(s):
            if root in degrees:
                degrees[root] += 1
            else:
                stray += 1
        return degrees, stray


class ClosureDescription:
    def __init__(self, name, entries):
        self.name = name
        self.entries = list(entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self):
        return f"ClosureDescription({self.name}, {[e.name for e in self.entries]})"


def _k0_view(s):
    return s if isinstance(s, K0Structure) else s.metric()


def _u_entries(lattice):
    entries = []
    for e in lattice.elements:
        for f in lattice.above(e):

            def roots(s, e=e):
                k0 = _k0_view(s)
                return {(x,) for x in k0.elements if k0.sorts[x] == e}

            def tuples(s, e=e, f=f):
                k0 = _k0_view(s)
                return [((x,), (y,)) for a, b, x, y in k0.edges if (a, b) == (e, f)]

            entries.append(ClosureEntry(f"U:{e}:{f}", roots, tuples))
    return entries


def closure_u(lattice):
    """U_U: 每个 P_E 元素在每个 F > E 上恰有一个 U 像"""
    return ClosureDescription("U_U", _u_entries(lattice))


def closure_k(lattice, params):
    """U_K: U_U 加上 B_{E,i,j} (根 P_{E,i}) 与 D_{E,E'} (根 D∃_{E,E'})"""
    entries = _u_entries(lattice)
    for e in lattice.elements:
        n = params.counts[e]
        for i, j in product(range(1, n + 1), repeat=2):
            if i == j:
                continue

            def roots(s, e=e, i=i):
                return {(x,) for x in s.elements if s.sorts[x] == (e, i)}

            def tuples(s, e=e, i=i, j=j):
                return [((x,), (y,)) for a, b, c, x, y in s.B if (a, b, c) == (e, i, j)]

            entries.append(ClosureEntry(f"B:{e}:{i}:{j}", roots, tuples))
    for e, f in product(lattice.elements, repeat=2):

        def roots(s, e=e, f=f):
            return {(x, y) for x, y in s.dex if s.level(x) == e and s.level(y) == f}

        def tuples(s, e=e, f=f):
            return [
                ((x1, x2), (y,))
                for x1, x2, y in s.d
                if s.level(x1) == e and s.level(x2) == f
            ]

        entries.append(ClosureEntry(f"D:{e}:{f}", roots, tuples))
    return ClosureDescription("U_K", entries)


def is_closed(s, description):
    """根上出度恰为1, 非根上出度为0"""
    for entry in description:
        degrees, stray = entry.out_degrees(s)
        if stray or any(n != 1 for n in degrees.values()):
            return False
    return True


def is_semi_closed(s, description):
    for entry in description:
        degrees, stray = entry.out_degrees(s)
        if stray or any(n > 1 for n in degrees.values()):
            return False
    return True


def is_k_closed(s, params=None):
    params = params or s.params
    return is_closed(s, closure_k(s.lattice, params))


def metric_relations(k0):
    """由 U 计算 D∃ 与 D"""
    lattice = k0.lattice
    dex, d = set(), set()
    for x, y in combinations(k0.elements, 2):
        e, f = k0.sorts[x], k0.sorts[y]
        try:
            if delta(k0, x, y) != lattice.join(e, f):
                continue
        except NoCommonClass:
            continue
        dex.add((x, y))
        m = lattice.meet(e, f)
        for z in k0.elements:
            if k0.sorts[z] == m and k0.below_eq(z, x) and k0.below_eq(z, y):
                d.add((x, y, z))
    return dex, d


def copy_label(x, i):
    return x if i == 1 else f"{x}#{i}"


def lift_sorts(k0, params, elements=None):
    """
    为 K0 的元素加上 P_{E,i} 拷贝与 B 双射
    :param elements: 只处理这些元素, 默认全部
    :return: (新元素列表, sorts, B)
    """
    new, sorts, B = [], {}, set()
    for x in elements if elements is not None else k0.elements:
        e = k0.sorts[x]
        n = params.counts[e]
        for i in range(1, n + 1):
            new.append(copy_label(x, i))
            sorts[copy_label(x, i)] = (e, i)
        for i, j in product(range(1, n + 1), repeat=2):
            if i != j:
                B.add((e, i, j, copy_label(x, i), copy_label(x, j)))
    return new, sorts, B


def less_from_sequence(sequence):
    return [(x, y) for x, y in combinations(sequence, 2)]


def _insert(sequence, x, sorts, homes, params, k0):
    """
    新元素放在同一分层中与它 F'_E-类相同的最后一个元素之后,
    没有时放在该分层的末尾
    """
    e, i = sorts[x]
    c = params.cover(e)
    home = homes.get(x, x)
    anchor = None
    for k, y in enumerate(sequence):
        if sorts[y] != (e, i):
            continue
        if c is not None and k0.up(homes.get(y, y), c) == k0.up(home, c):
            anchor = k
    if anchor is None:
        rank = params.rank((e, i))
        anchor = -1
        for k, y in enumerate(sequence):
            if params.rank(sorts[y]) <= rank:
                anchor = k
    sequence.insert(anchor + 1, x)


def extend_k(s, k0prime, params=None):
    """
    把度量部分扩张到 k0prime: 增加拷贝与 B, 重算 D∃/D, 新元素按插入规则放入 <
    """
    params = params or s.params
    old = metric_part(s)
    missing = [x for x in old.elements if k0prime.sorts.get(x) != old.sorts[x]]
    if missing or not old.edges <= k0prime.edges:
        raise NotContaining("k0prime 不包含原结构的度量部分", elements=missing)
    added = [x for x in k0prime.elements if x not in old.sorts]
    new_elements, new_sorts, new_b = lift_sorts(k0prime, params, added)
    sorts = {**s.sorts, **new_sorts}
    homes = {copy_label(x, i): x for x in added for i in range(2, params.counts[k0prime.sorts[x]] + 1)}
    for y in s.elements:
        homes[y] = s.home(y)
    sequence = s.sequence()
    for x in new_elements:
        _insert(sequence, x, sorts, homes, params, k0prime)
    dex, d = metric_relations(k0prime)
    result = KStructure(
        s.lattice,
        list(s.elements) + new_elements,
        sorts,
        k0prime.edges,
        set(s.B) | new_b,
        dex,
        d,
        less_from_sequence(sequence),
        params,
    )
    logger.debug(f"extend_k 新增元素数:{len(new_elements)}")
    return result


def cl(s, params=None, budget=None):
    """U_K-闭包: 度量部分取 cl0 后扩张"""
    params = params or s.params
    closed = cl0(metric_part(s), budget)
    return extend_k(s, closed, params)


def substructure(s, elements):
    keep = set(elements)
    inside = lambda *xs: all(x in keep for x in xs)
    return KStructure(
        s.lattice,
        [x for x in s.elements if x in keep],
        {x: s.sorts[x] for x in s.elements if x in keep},
        [t for t in s.U if inside(t[2], t[3])],
        [t for t in s.B if inside(t[3], t[4])],
        [t for t in s.dex if inside(*t)],
        [t for t in s.d if inside(*t)],
        [t for t in s.less if inside(*t)],
        s.params,
    )


def closed_substructure(s, seeds):
    """包含 seeds 的最小 U_K-闭子结构"""
    keep = set(seeds)
    changed = True
    while changed:
        changed = False
        grown = set(keep)
        for e, f, x, y in s.U:
            if x in keep:
                grown.add(y)
        for e, i, j, x, y in s.B:
            if x in keep:
                grown.add(y)
        for x1, x2, y in s.d:
            if x1 in keep and x2 in keep:
                grown.add(y)
        if grown != keep:
            keep = grown
            changed = True
    return substructure(s, keep)


def _psi(s, params, x, y):
    if x == y:
        return False
    e, i = s.sorts[x]
    lattice = s.lattice
    if e == lattice.top:
        return s.less_than(x, y)
    k0 = s.metric()
    x1, y1 = s.home(x), s.home(y)
    if is_meet_irreducible(lattice, e):
        t = params.slot_top(e, i)
        xt, yt = k0.up(x1, t), k0.up(y1, t)
        if xt == yt:
            return s.less_than(x, y)
        return _psi(s, params, xt, yt)
    c, p = params.cover(e), params.partner(e)
    xc, yc = k0.up(x1, c), k0.up(y1, c)
    if xc == yc:
        return _psi(s, params, k0.up(x1, p), k0.up(y1, p))
    return _psi(s, params, xc, yc)


def psi_less(s, e, i, x, y, params=None):
    """
    ψ_{E,i}(x, y):
    meet-irreducible 的 E 在同一槽位 top 类中比较原始 <, 否则在 top 层递归;
    meet-reducible 的 E 在同一 F'_E 类中到 F''_E 层递归, 否则到 F'_E 层递归
    """
    params = params or s.params
    if not is_k_closed(s, params):
        raise NotClosed("ψ 只对 U_K-闭结构有定义")
    if s.sorts[x] != (e, i) or s.sorts[y] != (e, i):
        raise FormulaIllTyped(f"{x}, {y} 不都在 P_{{{e},{i}}} 中", x=x, y=y)
    return _psi(s, params, x, y)


class RelationalStructure:
    """论域加命名关系, arities 记录每个关系的元数 (关系为空时也需要)"""

    def __init__(self, universe, relations, arities=None):
        self.universe = tuple(universe)
        self.relations = {name: frozenset(map(tuple, ts)) for name, ts in relations.items()}
        self.arities = dict(arities or {})
        for name, ts in self.relations.items():
            if name not in self.arities:
                self.arities[name] = len(next(iter(ts))) if ts else 0

    def holds(self, name, *args):
        return tuple(args) in self.relations.get(name, ())

    def restrict(self, elements):
        keep = set(elements)
        return RelationalStructure(
            [x for x in self.universe if x in keep],
            {
                name: [t for t in ts if all(v in keep for v in t)]
                for name, ts in self.relations.items()
            },
            self.arities,
        )

    def __eq__(self, other):
        mine = {n: ts for n, ts in self.relations.items() if ts}
        theirs = {n: ts for n, ts in other.relations.items() if ts}
        return set(self.universe) == set(other.universe) and mine == theirs

    def __hash__(self):
        return hash(frozenset(self.universe))

    def __len__(self):
        return len(self.universe)

    def to_dict(self):
        return {
            "universe": list(self.universe),
            "relations": {n: sorted(list(t) for t in ts) for n, ts in self.relations.items()},
        }


def relational_from_dict(data):
    try:
        return RelationalStructure(
            [str(x) for x in data["universe"]],
            {n: [tuple(str(v) for v in t) for t in ts] for n, ts in data["relations"].items()},
            {n: int(a) for n, a in (data.get("arities") or {}).items()},
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidStructure(f"关系结构的JSON格式不正确:{e}")


# 无量词公式
class Formula:
    def variables(self):
        raise NotImplementedError

    def check(self, structure):
        pass

    def evaluate(self, structure, env, context):
        raise NotImplementedError


class Truth(Formula):
    def variables(self):
        return set()

    def evaluate(self, structure, env, context):
        return True


class Atom(Formula):
    def __init__(self, name, args):
        self.name = name
        self.args = tuple(args)

    def variables(self):
        return set(self.args)

    def check(self, structure):
        if self.name not in structure.arities:
            raise FormulaIllTyped(f"未知关系:{self.name}", relation=self.name)
        if structure.arities[self.name] not in (len(self.args), 0):
            raise FormulaIllTyped(
                f"{self.name} 的元数为{structure.arities[self.name]}, 给了{len(self.args)}个变量",
                relation=self.name,
            )

    def evaluate(self, structure, env, context):
        return structure.holds(self.name, *(env[v] for v in self.args))


class Equals(Formula):
    def __init__(self, left, right):
        self.left, self.right = left, right

    def variables(self):
        return {self.left, self.right}

    def evaluate(self, structure, env, context):
        return env[self.left] == env[self.right]


class Not(Formula):
    def __init__(self, inner):
        self.inner = inner

    def variables(self):
        return self.inner.variables()

    def check(self, structure):
        self.inner.check(structure)

    def evaluate(self, structure, env, context):
        return not self.inner.evaluate(structure, env, context)


class And(Formula):
    def __init__(self, *parts):
        self.parts = parts

    def variables(self):
        return set().union(*(p.variables() for p in self.parts))

    def check(self, structure):
        for p in self.parts:
            p.check(structure)

    def evaluate(self, structure, env, context):
        return all(p.evaluate(structure, env, context) for p in self.parts)


class Or(And):
    def evaluate(self, structure, env, context):
        return any(p.evaluate(structure, env, context) for p in self.parts)


class Predicate(Formula):
    """由 x/F 与 B 搬运组成的导出项, fn(context, *值)"""

    def __init__(self, name, fn, args):
        self.name = name
        self.fn = fn
        self.args = tuple(args)

    def variables(self):
        return set(self.args)

    def evaluate(self, structure, env, context):
        return self.fn(context, *(env[v] for v in self.args))


def formula_from_list(data):
    """["atom", R, [x, y]] / ["eq", x, y] / ["not", f] / ["and", f...] / ["or", f...] / ["true"]"""
    try:
        head = data[0]
        if head == "atom":
            return Atom(str(data[1]), [str(v) for v in data[2]])
        if head == "eq":
            return Equals(str(data[1]), str(data[2]))
        if head == "not":
            return Not(formula_from_list(data[1]))
        if head == "and":
            return And(*(formula_from_list(f) for f in data[1:]))
        if head == "or":
            return Or(*(formula_from_list(f) for f in data[1:]))
        if head == "true":
            return Truth()
    except (IndexError, TypeError) as e:
        raise FormulaIllTyped(f"公式格式不正确:{e}")
    raise FormulaIllTyped(f"未知的公式构造:{head}")


class ReinterpretationScheme:
    """关系名 -> (变量列表, 公式), 未列出的关系保持不变"""

    def __init__(self, formulas):
        self.formulas = {name: (tuple(v), f) for name, (v, f) in formulas.items()}

    def check(self, structure):
        for name, (variables, formula) in self.formulas.items():
            if name in structure.arities and structure.arities[name] not in (len(variables), 0):
                raise FormulaIllTyped(
                    f"{name} 的元数为{structure.arities[name]}, 公式有{len(variables)}个变量",
                    relation=name,
                )
            extra = formula.variables() - set(variables)
            if extra:
                raise FormulaIllTyped(f"{name} 的公式有自由变量:{sorted(extra)}", relation=name)
            formula.check(structure)


def scheme_from_dict(data):
    return ReinterpretationScheme(
        {
            name: ([str(v) for v in item["vars"]], formula_from_list(item["formula"]))
            for name, item in data.items()
        }
    )


def identity_scheme(structure):
    return ReinterpretationScheme(
        {
            name: (
                [f"x{k}" for k in range(arity)],
                Atom(name, [f"x{k}" for k in range(arity)]),
            )
            for name, arity in structure.arities.items()
        }
    )


def two_order_scheme():
    """<2 重解释为 <1, <1 不变"""
    return ReinterpretationScheme(
        {
            "<1": (("x1", "x2"), Atom("<1", ("x1", "x2"))),
            "<2": (("x1", "x2"), Atom("<1", ("x1", "x2"))),
        }
    )


def _phi_less(s, x, y):
    params = s.params
    if x == y:
        return False
    rx, ry = params.rank(s.sorts[x]), params.rank(s.sorts[y])
    if rx != ry:
        return rx < ry
    return _psi(s, params, x, y)


def phi_less_scheme():
    """Φ_<: 不同分层按 <_{1-types}, 同一分层按 ψ_{E,i}"""
    return ReinterpretationScheme(
        {"<": (("x1", "x2"), Predicate("psi", _phi_less, ("x1", "x2")))}
    )


def _apply(structure, scheme, context):
    scheme.check(structure)
    relations = dict(structure.relations)
    arities = dict(structure.arities)
    for name, (variables, formula) in scheme.formulas.items():
        tuples = set()
        for values in product(structure.universe, repeat=len(variables)):
            env = dict(zip(variables, values))
            if formula.evaluate(structure, env, context):
                tuples.add(values)
        relations[name] = tuples
        arities[name] = len(variables)
    return RelationalStructure(structure.universe, relations, arities)


def reinterpret(s, scheme):
    """每个关系按公式在同一论域上重算; KStructure 输入返回 KStructure"""
    if isinstance(s, KStructure):
        if any(isinstance(f, Predicate) for _, f in scheme.formulas.values()):
            if s.params is None:
                raise ParamMismatch("Φ_< 需要提升参数")
            if not is_k_closed(s):
                raise NotClosed("Φ_< 只对 U_K-闭结构有定义")
        result = _apply(s.to_relational(), scheme, s)
        return from_relational(result, s.lattice, s.params)
    return _apply(s, scheme, s)


def in_k_prime(s, params=None):
    """U_K-闭且为 Φ_< 的不动点"""
    params = params or s.params
    if params is None:
        raise ParamMismatch("缺少提升参数")
    if s.params is not params:
        s = KStructure(s.lattice, s.elements, s.sorts, s.U, s.B, s.dex, s.d, s.less, params)
    if not is_k_closed(s, params):
        return False
    return reinterpret(s, phi_less_scheme()).less == s.less
