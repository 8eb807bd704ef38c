# -*- coding: UTF-8 -*-
"""
有序空间与 K 结构之间的转换: L_K, Lift, 逆向表示, 核, 着色的搬运
"""
import logging
from itertools import combinations

from ultra.eqlift import a_eq, a_k, class_label
from ultra.exceptions import NotALift, NotInKPrime, ParamMismatch
from ultra.kstruct import (
    KStructure,
    cl,
    closed_substructure,
    copy_label,
    in_k_prime,
    less_from_sequence,
    lift_sorts,
    metric_relations,
    phi_less_scheme,
    reinterpret,
    substructure,
)
from ultra.lattice import is_meet_irreducible
from ultra.sqo import (
    compose,
    empty_order,
    extend_partial,
    induce_meet,
    restrict,
    validate_ordered_space,
)

logger = logging.getLogger("default")


def sort_order(ordered, e, i, params, _memo=None):
    """
    P_{E,i} 上的可定义序 φ_{E,i}, 为 E -> 1 的子商序
    meet-irreducible: 同一槽位 top 类中按语言序, 否则按 φ_{T,1}
    meet-reducible: 同一 F'_E 类中按 φ_{F''_E,1}, 否则按 φ_{F'_E,1}
    """
    _memo = {} if _memo is None else _memo
    if (e, i) in _memo:
        return _memo[(e, i)]
    lattice = ordered.lattice
    top = lattice.top
    if e == top:
        result = empty_order(ordered.space, top)
    elif is_meet_irreducible(lattice, e):
        slot = params.language.slot(e, i)
        lower = ordered.orders[slot]
        result = compose(sort_order(ordered, slot.top, 1, params, _memo), lower)
    else:
        c, p = params.cover(e), params.partner(e)
        outer = restrict(sort_order(ordered, p, 1, params, _memo), lattice.join(p, c))
        result = compose(sort_order(ordered, c, 1, params, _memo), induce_meet(outer, c))
    _memo[(e, i)] = result
    return result


def point_label(ordered, x):
    """点 x 在 L_K 中对应的 P_{0,1} 元素"""
    return class_label(ordered.lattice.bottom, (x,))


def _check_params(ordered, params):
    if params.lattice != ordered.lattice:
        raise ParamMismatch("提升参数与空间的格不同")
    if params.language != ordered.language:
        raise ParamMismatch("提升参数与空间的语言不同")


def l_k(ordered, params):
    """a_eq 核心加拷贝, 分层内按 φ_{E,i}, 分层之间按 <_{1-types}"""
    _check_params(ordered, params)
    core = a_eq(ordered.space)
    elements, sorts, B = lift_sorts(core, params)
    dex, d = metric_relations(core)
    memo = {}
    sequence = []
    for e, i in params.type_order:
        order = sort_order(ordered, e, i, params, memo)
        level = core.at_level(e)
        classes = {x: core.origin[x][1] for x in level}
        members = sorted(
            level,
            key=lambda x: sum(order.less_class(classes[y], classes[x]) for y in level),
        )
        sequence.extend(copy_label(x, i) for x in members)
    return KStructure(
        ordered.lattice,
        elements,
        sorts,
        core.edges,
        B,
        dex,
        d,
        less_from_sequence(sequence),
        params,
    )


def lift(ordered, params, budget=None):
    """L_K 的闭包, 新元素的顺序由 ψ 决定, ψ 取原始 < 时按插入规则"""
    closed = cl(l_k(ordered, params), params, budget)
    result = reinterpret(closed, phi_less_scheme())
    logger.debug(f"lift 完成, 元素数:{len(result)}")
    return result


def represent(s):
    """
    从 K' 中的结构读出有序空间: 点为 a_k(度量部分),
    每个语言序取 P_{E,i} 上 δ ≤ T 的 < 对, 再确定性地补全
    """
    params = s.params
    if params is None or not in_k_prime(s):
        raise NotInKPrime("结构不在 K' 中")
    k0 = s.metric()
    space = a_k(k0)
    orders = {}
    for slot in params.language.slots:
        e, t, i = slot
        members = [x for x in s.elements if s.sorts[x] == (e, i)]
        pairs = []
        for x, y in combinations(members, 2):
            hx, hy = s.home(x), s.home(y)
            if k0.up(hx, t) != k0.up(hy, t):
                continue
            first, second = (x, y) if s.less_than(x, y) else (y, x)
            pairs.append(
                (space.class_of(s.home(first), e), space.class_of(s.home(second), e))
            )
        orders[slot] = extend_partial(space, e, t, pairs)
    return validate_ordered_space(space, params.language, orders)


def _relations_match(s, t, mapping):
    f = mapping.get
    return (
        all(t.sorts[f(x)] == s.sorts[x] for x in s.elements)
        and {(e, g, f(x), f(y)) for e, g, x, y in s.U} == set(t.U)
        and {(e, i, j, f(x), f(y)) for e, i, j, x, y in s.B} == set(t.B)
        and {(f(x), f(y)) for x, y in s.dex} == set(t.dex)
        and {(f(x1), f(x2), f(y)) for x1, x2, y in s.d} == set(t.d)
    )


def order_isomorphism(s, t):
    """两个线性序结构之间唯一可能的同构, 不存在时返回 None"""
    if len(s) != len(t):
        return None
    mapping = dict(zip(s.sequence(), t.sequence()))
    return mapping if _relations_match(s, t, mapping) else None


def kernel(s, ordered, params):
    """s 与 lift(X) 同构时, 取 l_k(X) 在 s 中的原像"""
    target = lift(ordered, params)
    mapping = order_isomorphism(target, s)
    if mapping is None:
        raise NotALift("结构与 lift(X) 不同构")
    core = l_k(ordered, params)
    return substructure(s, [mapping[x] for x in core.elements])


def lift_copies(c, ordered, params):
    """C 中 lift(X) 的拷贝: 由 |X| 个 P_{0,1} 元素生成的闭子结构中与 lift(X) 同构者"""
    target = lift(ordered, params)
    bottom = (c.lattice.bottom, 1)
    seeds = [x for x in c.sequence() if c.sorts[x] == bottom]
    found = []
    for chosen in combinations(seeds, len(ordered)):
        sub = closed_substructure(c, chosen)
        if order_isomorphism(target, sub) is not None:
            found.append((frozenset(sub.elements), frozenset(chosen)))
    return found


def transfer_coloring(c, ordered, params, chi):
    """
    把 represent 空间中 X 的拷贝上的着色搬到 C 中 lift(X) 的拷贝上
    :param chi: 点集(frozenset) -> 颜色, 可以是 dict 或函数
    :return: {拷贝的元素集: 颜色}
    """
    color = chi.get if isinstance(chi, dict) else chi
    return {elements: color(points) for elements, points in lift_copies(c, ordered, params)}
