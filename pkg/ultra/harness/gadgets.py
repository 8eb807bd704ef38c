# -*- coding: UTF-8 -*-
"""证明扩张性质用到的小结构: 两个 E-类的 gadget 与子商序的反转"""
from ultra.eqlift import K0Structure
from ultra.exceptions import NotMeetIrreducible
from ultra.kstruct import (
    KStructure,
    cl,
    copy_label,
    less_from_sequence,
    lift_sorts,
    metric_relations,
)
from ultra.lattice import is_meet_irreducible, unique_cover
from ultra.sqo import Slot, reverse_order, validate_ordered_space


def gadget_pi(lattice, e, params):
    """
    同一个 E+ 类下的两个 E-类 x1 < x2, 连同上方的类链, 取 U_K-闭包
    其余元素的顺序由 <_{1-types} 决定
    """
    if not is_meet_irreducible(lattice, e):
        raise NotMeetIrreducible(f"{e} 不是 meet-irreducible", element=e)
    cover = unique_cover(lattice, e)
    chain = {g: f"u[{g}]" for g in lattice.above(cover, strict=False)}
    elements = ["x1", "x2"] + [chain[g] for g in lattice.ascending() if g in chain]
    sorts = {"x1": e, "x2": e, **{label: g for g, label in chain.items()}}
    edges = []
    for g, label in chain.items():
        edges.append((e, g, "x1", label))
        edges.append((e, g, "x2", label))
        for h in lattice.above(g):
            edges.append((g, h, label, chain[h]))
    k0 = K0Structure(lattice, elements, sorts, edges)
    all_elements, all_sorts, B = lift_sorts(k0, params)
    sequence = []
    for s in params.type_order:
        level, i = s
        if level == e:
            sequence += [copy_label("x1", i), copy_label("x2", i)]
        elif level in chain:
            sequence.append(copy_label(chain[level], i))
    dex, d = metric_relations(k0)
    seed = KStructure(
        lattice, all_elements, all_sorts, k0.edges, B, dex, d, less_from_sequence(sequence), params
    )
    return cl(seed, params)


def order_reversal(ordered, slots):
    """把指定槽位的子商序逐类反转"""
    chosen = {Slot(str(b), str(t), int(i)) for b, t, i in slots}
    orders = {
        slot: reverse_order(o) if slot in chosen else o for slot, o in ordered.orders.items()
    }
    return validate_ordered_space(ordered.space, ordered.language, orders)
