import datetime
import os
import tempfile
from io import StringIO
from itertools import combinations, permutations
from unittest.mock import Mock, patch

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from ultra.engine import (
    amalgamate_k,
    check_hom_embedding,
    check_irreducible,
    complete,
    is_embedding,
)
from ultra.eqlift import (
    K0Structure,
    a_eq,
    a_k,
    amalgamate_k0,
    check_k0,
    cl0,
    class_label,
    delta,
    embed_check_eqsub,
    is_downward_closed,
    k0_from_dict,
    saturation_budget,
    validate_k0,
)
from ultra.exceptions import (
    AmbiguousCover,
    ComparableAcrossTop,
    ConstraintViolated,
    CycleDetected,
    EquivalenceSystemError,
    FactorsNotClosed,
    FormulaIllTyped,
    GOutOfRange,
    InvalidStructure,
    MeetMissing,
    MissingDistance,
    NoCommonClass,
    NonZeroSelfDistance,
    NotALift,
    NotAPartialOrder,
    NotClosed,
    NotContaining,
    NotDistributive,
    NotLinearWithinTop,
    OrderCycle,
    SaturationBudgetExceeded,
    TopBottomMismatch,
    TriangleViolation,
    ZeroDistanceDistinctPoints,
)
from ultra.harness.k0 import random_k0
from ultra.harness.kfamily import KFamily
from ultra.harness.ordered import OrderedFamily, ordered_embeddings
from ultra.harness.spaces import SpaceFamily
from ultra.kstruct import (
    Atom,
    KStructure,
    ReinterpretationScheme,
    RelationalStructure,
    check_k,
    cl,
    closed_substructure,
    default_params,
    extend_k,
    formula_from_list,
    identity_scheme,
    in_k_prime,
    is_k_closed,
    less_from_sequence,
    lift_sorts,
    metric_relations,
    psi_less,
    reinterpret,
    scheme_from_dict,
    substructure,
    two_order_scheme,
    validate_k,
)
from ultra.lattice import (
    boolean_lattice,
    boolean_square,
    chain_lattice,
    diamond,
    find_forbidden_sublattice,
    is_distributive,
    meet_irreducibles,
    pentagon,
    to_dot,
    unique_cover,
    validate_lattice,
)
from ultra.models import VerificationJob
from ultra.space import (
    EquivalenceSystem,
    amalgamate_spaces,
    copies,
    find_embeddings,
    from_equivalence_system,
    generic_space,
    saturation_level,
    to_equivalence_system,
    validate_space,
)
from ultra.sqo import (
    LanguageDescriptor,
    OrderedSpace,
    Slot,
    compose,
    crossed_squares,
    derive_definable,
    is_well_equipped,
    lexicographic_grid,
    linearize,
    min_language,
    order_from_sequence,
    restrict,
    restrict_ordered,
    validate_sqo,
)
from ultra.sqo import to_dot as sqo_to_dot
from ultra.transfer import (
    kernel,
    l_k,
    lift,
    order_isomorphism,
    point_label,
    represent,
    transfer_coloring,
)
from ultra.utils.canonical import ordered_isomorphic
from ultra.utils.structures import k_embeddings
from ultra.utils.tasks import run_verification, run_verification_callback


def flat_space(lattice, points, value="1"):
    """所有点两两距离相同"""
    return validate_space(
        lattice, points, {(x, y): value for x, y in combinations(points, 2)}
    )


def chain_ordered(points):
    """CH2 上按给定顺序线性排列的点"""
    lattice = chain_lattice(2)
    space = flat_space(lattice, points)
    language = min_language(lattice)
    return OrderedSpace(
        space, language, {language.slots[0]: order_from_sequence(space, "0", "1", points)}
    )


def ch3_blocks():
    """CH3 上的 p,q 与 r,s 两个 e-类"""
    lattice = chain_lattice(3)
    d = {("p", "q"): "e", ("r", "s"): "e"}
    for x in ("p", "q"):
        for y in ("r", "s"):
            d[(x, y)] = "1"
    return validate_space(lattice, ["p", "q", "r", "s"], d)


class TestLattice(TestCase):
    def test_distributive_chains(self):
        for n in range(1, 6):
            self.assertTrue(is_distributive(chain_lattice(n)))
            self.assertIsNone(find_forbidden_sublattice(chain_lattice(n)))

    def test_distributive_boolean(self):
        self.assertTrue(is_distributive(boolean_square()))

    def test_forbidden(self):
        self.assertFalse(is_distributive(diamond()))
        self.assertFalse(is_distributive(pentagon()))
        self.assertEqual(find_forbidden_sublattice(diamond())[0], "M3")
        self.assertEqual(find_forbidden_sublattice(pentagon())[0], "N5")

    def test_not_partial_order(self):
        with self.assertRaises(NotAPartialOrder):
            validate_lattice(["a", "b"], [("a", "b"), ("b", "a")])

    def test_meet_missing(self):
        with self.assertRaises(MeetMissing):
            validate_lattice(["a", "b", "c"], [("a", "c"), ("b", "c")])

    def test_meet_irreducibles(self):
        self.assertListEqual(meet_irreducibles(boolean_square()), ["a", "b"])
        self.assertListEqual(meet_irreducibles(chain_lattice(3)), ["0", "e"])

    def test_meet_irreducible_unique_cover(self):
        """top 以外的元素 meet-irreducible 当且仅当只有一个覆盖元素"""
        for lattice in (diamond(), pentagon(), boolean_lattice(3), boolean_square(), chain_lattice(4)):
            irreducible = set(meet_irreducibles(lattice))
            for x in lattice.elements:
                if x == lattice.top:
                    continue
                self.assertEqual(x in irreducible, len(lattice.covers(x)) == 1)

    def test_unique_cover(self):
        self.assertEqual(unique_cover(chain_lattice(3), "0"), "e")
        with self.assertRaises(AmbiguousCover):
            unique_cover(boolean_square(), "0")

    def test_to_dot(self):
        self.assertIn('"0" -> "a";', to_dot(boolean_square()))


class TestSpace(TestCase):
    def setUp(self):
        self.ch3 = chain_lattice(3)

    def test_triangle(self):
        with self.assertRaises(TriangleViolation):
            validate_space(
                self.ch3, ["x", "y", "z"], {"x,y": "e", "x,z": "e", "y,z": "1"}
            )

    def test_self_distance(self):
        with self.assertRaises(NonZeroSelfDistance):
            validate_space(self.ch3, ["x"], {"x,x": "e"})

    def test_zero_distance(self):
        with self.assertRaises(ZeroDistanceDistinctPoints):
            validate_space(self.ch3, ["x", "y"], {"x,y": "0"})

    def test_missing_distance(self):
        with self.assertRaises(MissingDistance):
            validate_space(self.ch3, ["x", "y"], {})

    def test_classes(self):
        space = ch3_blocks()
        self.assertEqual(space.classes("e"), (("p", "q"), ("r", "s")))
        self.assertEqual(len(space.classes("0")), 4)
        self.assertEqual(len(space.classes("1")), 1)

    def test_equivalence_round_trip(self):
        """≤4 个点的全部空间上 from∘to 与 to∘from 都是恒等"""
        for lattice in (chain_lattice(3), boolean_square()):
            family = SpaceFamily(lattice)
            for n in range(1, 5):
                for space in family.enumerate(n):
                    system = to_equivalence_system(space)
                    back = from_equivalence_system(system)
                    self.assertEqual(back, space)
                    self.assertEqual(to_equivalence_system(back), system)

    def test_equivalence_system_error(self):
        lattice = chain_lattice(2)
        system = EquivalenceSystem(
            lattice, ["x", "y"], {"0": [("x", "y")], "1": [("x", "y")]}
        )
        with self.assertRaises(EquivalenceSystemError):
            from_equivalence_system(system)

    def test_embeddings(self):
        lattice = chain_lattice(2)
        one = flat_space(lattice, ["a"])
        three = flat_space(lattice, ["x", "y", "z"])
        self.assertEqual(len(find_embeddings(one, three)), 3)
        two = flat_space(lattice, ["a", "b"])
        self.assertEqual(len(find_embeddings(two, two)), 2)
        self.assertEqual(len(copies(two, two)), 1)

    def test_amalgamate(self):
        base = flat_space(self.ch3, ["c"])
        a1 = flat_space(self.ch3, ["c", "x"], "e")
        a2 = flat_space(self.ch3, ["c", "y"], "e")
        amalgam = amalgamate_spaces(base, a1, {"c": "c"}, a2, {"c": "c"})
        self.assertTrue(amalgam.is_strong)
        self.assertEqual(len(amalgam.space), 3)
        self.assertEqual(amalgam.space.dist("x", amalgam.right["y"]), "e")

    def test_amalgamate_not_distributive(self):
        m3 = diamond()
        point = flat_space(m3, ["c"])
        with self.assertRaises(NotDistributive):
            amalgamate_spaces(point, point, {"c": "c"}, point, {"c": "c"})

    def test_generic_space(self):
        space = generic_space(chain_lattice(2), 3)
        self.assertEqual(len(space), 3)
        self.assertSetEqual(space.distances(), {"1"})
        self.assertEqual(saturation_level(space), 2)

    def test_generic_space_partial(self):
        with self.assertLogs("default", level="WARNING"):
            space = generic_space(self.ch3, 6)
        self.assertEqual(len(space), 6)
        self.assertLess(saturation_level(space), 5)


class TestSqo(TestCase):
    def setUp(self):
        self.space = ch3_blocks()

    def test_restrict(self):
        order = order_from_sequence(self.space, "0", "1", ["p", "q", "r", "s"])
        restricted = restrict(order, "e")
        self.assertTrue(restricted.less("p", "q"))
        self.assertTrue(restricted.less("r", "s"))
        self.assertFalse(restricted.less("q", "r"))
        self.assertEqual(restrict(order, "1"), order)

    def test_restrict_out_of_range(self):
        order = validate_sqo(self.space, "0", "e", [(["p"], ["q"]), (["r"], ["s"])])
        with self.assertRaises(GOutOfRange):
            restrict(order, "1")

    def test_validate_errors(self):
        with self.assertRaises(ComparableAcrossTop):
            validate_sqo(self.space, "0", "e", [(["p"], ["r"])])
        with self.assertRaises(NotLinearWithinTop):
            validate_sqo(self.space, "0", "e", [])
        with self.assertRaises(CycleDetected):
            validate_sqo(self.space, "0", "e", [(["p"], ["q"]), (["q"], ["p"])])
        with self.assertRaises(TopBottomMismatch):
            validate_sqo(self.space, "e", "0", [])

    def test_compose(self):
        inner = validate_sqo(self.space, "0", "e", [(["p"], ["q"]), (["r"], ["s"])])
        outer = validate_sqo(self.space, "e", "1", [(["r", "s"], ["p", "q"])])
        composed = compose(outer, inner)
        self.assertEqual(composed.bottom, "0")
        self.assertEqual(composed.top, "1")
        self.assertTrue(composed.less("r", "s"))
        self.assertTrue(composed.less("s", "p"))
        self.assertTrue(composed.less("p", "q"))
        self.assertFalse(composed.less("p", "r"))
        with self.assertRaises(TopBottomMismatch):
            compose(inner, inner)

    def _ordered(self):
        lattice = self.space.lattice
        language = min_language(lattice)
        inner = validate_sqo(self.space, "0", "e", [(["p"], ["q"]), (["r"], ["s"])])
        outer = validate_sqo(self.space, "e", "1", [(["r", "s"], ["p", "q"])])
        return OrderedSpace(
            self.space,
            language,
            {Slot("0", "e", 1): inner, Slot("e", "1", 1): outer},
        )

    def test_min_language(self):
        self.assertSetEqual(
            set(min_language(chain_lattice(3)).slots),
            {Slot("0", "e", 1), Slot("e", "1", 1)},
        )
        self.assertSetEqual(
            set(min_language(boolean_square()).slots),
            {Slot("a", "1", 1), Slot("b", "1", 1)},
        )

    def test_well_equipped(self):
        b2 = boolean_square()
        self.assertTrue(is_well_equipped(min_language(b2)))
        language = LanguageDescriptor(b2, [("0", "1", 1), ("a", "1", 1), ("b", "1", 1)])
        self.assertFalse(is_well_equipped(language))

    def test_derive(self):
        ordered = self._ordered()
        derived = derive_definable(ordered, "0", "1")
        expected = compose(ordered.orders[Slot("e", "1", 1)], ordered.orders[Slot("0", "e", 1)])
        self.assertEqual(derived, expected)
        self.assertEqual(len(derive_definable(ordered, "e", "e").pairs), 0)

    def test_linearize(self):
        ordered = self._ordered()
        result = linearize(ordered)
        self.assertEqual(len(result), 2 + 3)
        self.assertEqual(len([r for r in result if r["label"][0] == "slot"]), 2)

    def test_linearize_recovers_orders(self):
        """同一 top 类中不同 bottom 类的点, 语言序可以从线性序读回"""
        corpus = [self._ordered(), lexicographic_grid(boolean_square(), 3, 2, [2, 0, 1], [1, 0])]
        corpus += OrderedFamily(chain_lattice(3)).enumerate(3)
        for ordered in corpus:
            cls = ordered.space.class_of
            for row in linearize(ordered):
                if row["label"][0] != "slot":
                    continue
                _, bottom, top, index = row["label"]
                order = ordered.orders[Slot(bottom, top, index)]
                position = {p: k for k, p in enumerate(row["order"])}
                for x, y in permutations(ordered.points, 2):
                    if cls(x, top) != cls(y, top) or cls(x, bottom) == cls(y, bottom):
                        continue
                    self.assertEqual(order.less(x, y), position[x] < position[y])

    def test_blocks(self):
        order = validate_sqo(self.space, "0", "e", [(["q"], ["p"]), (["s"], ["r"])])
        self.assertListEqual(order.blocks(), [[("q",), ("p",)], [("s",), ("r",)]])
        self.assertIn('"q" -> "p";', sqo_to_dot(order))
        order = order_from_sequence(self.space, "0", "1", ["s", "r", "q", "p"])
        self.assertListEqual(order.blocks(), [[("s",), ("r",), ("q",), ("p",)]])

    def test_restrict_ordered(self):
        sub = restrict_ordered(self._ordered(), ["p", "r"])
        self.assertEqual(len(sub), 2)
        self.assertTrue(sub.orders[Slot("e", "1", 1)].less("r", "p"))

    def test_grid_has_no_crossed_square(self):
        b2 = boolean_square()
        for rows, cols, row_sequence, col_sequence in (
            (2, 2, None, None),
            (3, 3, [2, 0, 1], [1, 2, 0]),
        ):
            grid = lexicographic_grid(b2, rows, cols, row_sequence, col_sequence)
            order = derive_definable(grid, "0", "1")
            self.assertListEqual(crossed_squares(grid.space, order, "a", "b"), [])

    def test_grid_lexicographic(self):
        grid = lexicographic_grid(boolean_square(), 2, 2)
        order = derive_definable(grid, "0", "1")
        self.assertTrue(order.less("x00", "x01"))
        self.assertTrue(order.less("x01", "x10"))
        self.assertTrue(order.less("x10", "x11"))


class TestEqlift(TestCase):
    def setUp(self):
        self.b2 = boolean_square()

    def test_a_eq_grid(self):
        grid = lexicographic_grid(self.b2, 2, 2)
        k = a_eq(grid.space)
        self.assertEqual(len(k), 9)
        self.assertListEqual(check_k0(k), [])
        self.assertTrue(is_downward_closed(k))

    def test_a_eq_not_downward_closed(self):
        space = flat_space(self.b2, ["x", "y"])
        k = a_eq(space)
        self.assertEqual(len(k), 7)
        self.assertFalse(is_downward_closed(k))
        closed = cl0(k)
        self.assertEqual(len(closed), 9)
        self.assertTrue(is_downward_closed(closed))
        self.assertEqual(len(cl0(closed)), 9)

    def test_cl0_budget(self):
        k = a_eq(flat_space(self.b2, ["x", "y"]))
        with self.assertRaises(SaturationBudgetExceeded):
            cl0(k, budget=1)

    def test_cl0_zero_budget(self):
        with self.assertRaises(SaturationBudgetExceeded):
            cl0(self._two_classes(), budget=0)

    @override_settings(SATURATION_BUDGET=0)
    def test_saturation_budget(self):
        k = self._two_classes()
        self.assertEqual(saturation_budget(k), 2 ** (4 * 3))
        with self.settings(SATURATION_BUDGET=5):
            self.assertEqual(saturation_budget(k), 5)

    def _two_classes(self):
        return K0Structure(
            self.b2,
            ["t", "x", "y"],
            {"t": "1", "x": "a", "y": "b"},
            [("a", "1", "x", "t"), ("b", "1", "y", "t")],
        )

    def test_cl0_adds_witness(self):
        k = self._two_classes()
        closed = cl0(k)
        self.assertEqual(len(closed), 4)
        (z,) = [w for w in closed.elements if w not in k.elements]
        self.assertEqual(closed.sorts[z], "0")
        self.assertEqual(closed.up(z, "a"), "x")
        self.assertEqual(closed.up(z, "b"), "y")

    def test_cl0_contract(self):
        """结果向下闭, 合法, 包含输入, 再做一次不变"""
        for lattice, sizes in ((chain_lattice(3), range(1, 6)), (self.b2, range(1, 5))):
            family = get_k0_family(lattice)
            for n in sizes:
                for k in family.enumerate(n):
                    closed = cl0(k)
                    self.assertTrue(is_downward_closed(closed))
                    self.assertListEqual(check_k0(closed), [])
                    self.assertTrue(set(k.elements) <= set(closed.elements))
                    self.assertTrue(k.edges <= closed.edges)
                    self.assertEqual(len(cl0(closed)), len(closed))

    def test_cl0_realized(self):
        """cl0 的结果可以在 a_eq(A_K) 中实现, 也能嵌入同样大小的某个枚举出的空间"""
        for lattice, sizes in ((chain_lattice(3), range(1, 6)), (self.b2, range(1, 5))):
            family = get_k0_family(lattice)
            spaces = SpaceFamily(lattice)
            for n in sizes:
                for k in family.enumerate(n):
                    closed = cl0(k)
                    if len(closed.at_level(lattice.top)) > 1:
                        continue
                    mapping = embed_check_eqsub(closed)
                    self.assertIn(mapping, k0_embeddings(closed, a_eq(a_k(closed))))
                    if len(closed) <= 4:
                        self.assertTrue(
                            any(
                                k0_embeddings(closed, a_eq(x))
                                for x in spaces.enumerate(len(closed))
                            )
                        )

    def test_delta(self):
        space = ch3_blocks()
        k = a_eq(space)
        for x, y in combinations(space.points, 2):
            self.assertEqual(
                delta(k, class_label("0", (x,)), class_label("0", (y,))), space.dist(x, y)
            )

    def test_delta_triangle(self):
        lattices = (chain_lattice(3), self.b2)
        corpus = []
        for lattice in lattices:
            for n in range(1, 4):
                corpus += [a_eq(s) for s in SpaceFamily(lattice).enumerate(n)]
            for seed in range(1000):
                k = random_k0(lattice, 4, seed=seed)
                if k is not None:
                    corpus.append(k)
        for k in corpus:
            join, leq = k.lattice.join, k.lattice.leq
            for x in k.elements:
                for y in k.elements:
                    for z in k.elements:
                        try:
                            xz = delta(k, x, z)
                            bound = join(delta(k, x, y), delta(k, y, z))
                        except NoCommonClass:
                            continue
                        self.assertTrue(leq(xz, bound))

    def test_no_common_class(self):
        k = K0Structure(chain_lattice(2), ["t1", "t2"], {"t1": "1", "t2": "1"}, [])
        with self.assertRaises(NoCommonClass):
            delta(k, "t1", "t2")

    def test_embed_check(self):
        k = a_eq(ch3_blocks())
        mapping = embed_check_eqsub(k)
        self.assertEqual(len(mapping), len(k))
        self.assertEqual(len(a_k(k)), len(k))

    def test_k0_from_dict(self):
        data = {
            "lattice": {"elements": ["0", "1"], "leq": [["0", "1"]]},
            "sorts": {"x": "(0,1)", "t": "1"},
            "U": [["0", "1", "x", "t"]],
        }
        k = k0_from_dict(data)
        self.assertEqual(k.sorts["x"], "0")
        self.assertEqual(k.up("x", "1"), "t")

    def test_validate_not_closed(self):
        with self.assertRaises(InvalidStructure) as cm:
            validate_k0(chain_lattice(2), ["x"], {"x": "0"}, [])
        self.assertEqual(cm.exception.witness["diagnostic"], "UClosed")

    def test_amalgamate_strong(self):
        base = K0Structure(self.b2, ["t"], {"t": "1"}, [])
        k1 = K0Structure(self.b2, ["t", "x"], {"t": "1", "x": "a"}, [("a", "1", "x", "t")])
        k2 = K0Structure(self.b2, ["t", "y"], {"t": "1", "y": "b"}, [("b", "1", "y", "t")])
        amalgam = amalgamate_k0(base, k1, {"t": "t"}, k2, {"t": "t"})
        self.assertEqual(len(amalgam.structure), 4)
        self.assertTrue(amalgam.is_strong(1))
        self.assertListEqual(check_k0(amalgam.structure), [])

    def test_amalgamate_chain_corpus(self):
        """base ≤ 2 个类, 因子 ≤ 3 个类, 两个因子的像只交于 base"""
        for lattice in (chain_lattice(2), chain_lattice(3)):
            family = get_k0_family(lattice)
            factors = [k for n in (1, 2, 3) for k in family.enumerate(n)]
            for base in [k for n in (1, 2) for k in family.enumerate(n)]:
                embedded = []
                for k in factors:
                    for f in k0_embeddings(base, k):
                        embedded.append((k, f))
                for (k1, f1), (k2, f2) in combinations(embedded, 2):
                    amalgam = amalgamate_k0(base, k1, f1, k2, f2)
                    self.assertListEqual(check_k0(amalgam.structure), [])
                    self.assertTrue(amalgam.is_strong(len(base)))

    def test_amalgamate_not_closed(self):
        k = a_eq(flat_space(self.b2, ["x", "y"]))
        base = K0Structure(self.b2, ["1[x|y]"], {"1[x|y]": "1"}, [])
        with self.assertRaises(FactorsNotClosed):
            amalgamate_k0(base, k, {"1[x|y]": "1[x|y]"}, k, {"1[x|y]": "1[x|y]"})


def get_k0_family(lattice):
    from ultra.harness import get_family

    return get_family("k0", lattice)


def k0_embeddings(a, c):
    from ultra.utils.structures import k0_embeddings as embeddings

    return embeddings(a, c)


class TestKStructure(TestCase):
    def setUp(self):
        self.ch2 = chain_lattice(2)
        self.b2 = boolean_square()
        self.x2 = chain_ordered(["x", "y"])
        self.params = default_params(self.ch2)
        self.s = lift(self.x2, self.params)

    def test_lift_two_points(self):
        self.assertEqual(len(self.s), 3)
        self.assertListEqual(self.s.sequence(), ["0[x]", "0[y]", "1[x|y]"])
        self.assertTrue(check_k(self.s).is_valid)
        self.assertTrue(is_k_closed(self.s))
        self.assertTrue(in_k_prime(self.s))
        self.assertIs(validate_k(self.s), self.s)

    def test_type_order_violation(self):
        reversed_less = less_from_sequence(list(reversed(self.s.sequence())))
        with self.assertRaises(ConstraintViolated) as cm:
            validate_k(self.s.with_less(reversed_less))
        self.assertEqual(cm.exception.name, "TypeOrderRespected")

    def test_partition_violation(self):
        s = self.s
        sorts = {**s.sorts, "0[x]": ("0", 2)}
        broken = KStructure(s.lattice, s.elements, sorts, s.U, s.B, s.dex, s.d, s.less, s.params)
        diagnostics = check_k(broken)
        self.assertFalse(diagnostics.is_valid)
        self.assertIn("Partition", diagnostics.failed())

    def test_missing_u_edge(self):
        s = self.s
        edge = sorted(s.U)[0]
        broken = KStructure(
            s.lattice, s.elements, s.sorts, s.U - {edge}, s.B, s.dex, s.d, s.less, s.params
        )
        self.assertFalse(is_k_closed(broken))
        with self.assertRaises(NotClosed):
            psi_less(broken, "0", 1, "0[x]", "0[y]")

    def test_psi(self):
        self.assertTrue(psi_less(self.s, "0", 1, "0[x]", "0[y]"))
        self.assertFalse(psi_less(self.s, "0", 1, "0[y]", "0[x]"))
        with self.assertRaises(FormulaIllTyped):
            psi_less(self.s, "0", 1, "0[x]", "1[x|y]")

    def test_extend_not_containing(self):
        with self.assertRaises(NotContaining):
            extend_k(self.s, K0Structure(self.ch2, [], {}, []))

    def test_cl_adds_witness(self):
        params = default_params(self.b2)
        k0 = K0Structure(
            self.b2,
            ["t", "x", "y"],
            {"t": "1", "x": "a", "y": "b"},
            [("a", "1", "x", "t"), ("b", "1", "y", "t")],
        )
        elements, sorts, B = lift_sorts(k0, params)
        dex, d = metric_relations(k0)
        s = KStructure(
            self.b2, elements, sorts, k0.edges, B, dex, d, less_from_sequence(["x", "y", "t"]), params
        )
        self.assertFalse(is_k_closed(s))
        closed = cl(s)
        self.assertEqual(len(closed), 4)
        self.assertTrue(is_k_closed(closed))
        self.assertEqual(closed.sequence()[0], "w3@0")
        self.assertEqual(cl(closed), closed)

    def test_grid_lift(self):
        grid = lexicographic_grid(self.b2, 2, 2)
        params = default_params(self.b2, grid.language)
        s = lift(grid, params)
        self.assertEqual(len(s), 9)
        self.assertTrue(in_k_prime(s))
        self.assertListEqual(
            s.sort_members(("0", 1)),
            [class_label("0", (p,)) for p in ("x00", "x01", "x10", "x11")],
        )
        # 打乱 meet-reducible 分层内的顺序后不再是 Φ_< 的不动点
        sequence = s.sequence()
        first, second = [x for x in sequence if s.sorts[x] == ("0", 1)][:2]
        i, j = sequence.index(first), sequence.index(second)
        sequence[i], sequence[j] = sequence[j], sequence[i]
        self.assertFalse(in_k_prime(s.with_less(less_from_sequence(sequence))))

    def test_identity_scheme(self):
        r = self.s.to_relational()
        self.assertEqual(reinterpret(r, identity_scheme(r)), r)

    def test_two_order_scheme(self):
        r = RelationalStructure(["a", "b"], {"<1": [("a", "b")], "<2": [("b", "a")]})
        result = reinterpret(r, two_order_scheme())
        self.assertTrue(result.holds("<2", "a", "b"))
        self.assertFalse(result.holds("<2", "b", "a"))

    def test_scheme_from_dict(self):
        scheme = scheme_from_dict(
            {
                "<": {
                    "vars": ["x", "y"],
                    "formula": ["and", ["atom", "<", ["x", "y"]], ["not", ["eq", "x", "y"]]],
                }
            }
        )
        r = self.s.to_relational()
        self.assertEqual(reinterpret(r, scheme).relations["<"], r.relations["<"])

    def test_ill_typed_scheme(self):
        r = self.s.to_relational()
        scheme = ReinterpretationScheme({"<": (("x",), Atom("<", ("x", "y")))})
        with self.assertRaises(FormulaIllTyped):
            reinterpret(r, scheme)
        with self.assertRaises(FormulaIllTyped):
            formula_from_list(["xor", ["true"]])

    def test_phi_idempotent(self):
        for ordered in OrderedFamily(chain_lattice(3)).enumerate(3):
            params = default_params(ordered.lattice, ordered.language)
            s = lift(ordered, params)
            once = reinterpret(s, phi_less())
            self.assertEqual(once.less, s.less)
            self.assertEqual(reinterpret(once, phi_less()).less, once.less)

    def test_phi_idempotent_reordered(self):
        """打乱 < 之后仍是 U_K-闭的, Φ_< 一次就到不动点"""
        for lattice in (chain_lattice(2), chain_lattice(3)):
            family = OrderedFamily(lattice)
            for n in (1, 2, 3):
                for ordered in family.enumerate(n):
                    s = lift(ordered, default_params(lattice, ordered.language))
                    sequence = s.sequence()
                    for shuffled in (sequence[::-1], sequence[1:] + sequence[:1]):
                        t = s.with_less(less_from_sequence(shuffled))
                        self.assertTrue(is_k_closed(t))
                        once = reinterpret(t, phi_less())
                        self.assertTrue(in_k_prime(once))
                        self.assertEqual(reinterpret(once, phi_less()).less, once.less)
                    self.assertFalse(in_k_prime(s.with_less(less_from_sequence(sequence[::-1]))))

    def test_slot_top_is_unique_cover(self):
        """最小语言下 ψ 比较用的槽位 top 就是唯一覆盖元素"""
        for lattice in (chain_lattice(3), self.b2, boolean_lattice(3)):
            params = default_params(lattice)
            for e in meet_irreducibles(lattice):
                self.assertEqual(params.slot_top(e, 1), unique_cover(lattice, e))


def phi_less():
    from ultra.kstruct import phi_less_scheme

    return phi_less_scheme()


class TestTransfer(TestCase):
    def setUp(self):
        self.ch2 = chain_lattice(2)
        self.params = default_params(self.ch2)

    def _round_trip(self, ordered):
        params = default_params(ordered.lattice, ordered.language)
        s = lift(ordered, params)
        self.assertTrue(in_k_prime(s))
        rep = represent(s)
        sub = restrict_ordered(rep, [point_label(ordered, p) for p in ordered.points])
        self.assertTrue(ordered_isomorphic(sub, ordered))

    def test_round_trip_corpus(self):
        for lattice, sizes in (
            (self.ch2, (1, 2, 3)),
            (chain_lattice(3), (1, 2, 3)),
            (boolean_square(), (1, 2, 3)),
        ):
            family = OrderedFamily(lattice)
            for n in sizes:
                for ordered in family.enumerate(n):
                    self._round_trip(ordered)

    def test_round_trip_grid(self):
        self._round_trip(lexicographic_grid(boolean_square(), 2, 2))

    def test_lift_follows_order(self):
        x = chain_ordered(["y", "x"])
        s = lift(x, self.params)
        self.assertListEqual(s.sequence(), ["0[y]", "0[x]", "1[x|y]"])
        self.assertTrue(psi_less(s, "0", 1, "0[y]", "0[x]"))
        rep = represent(s)
        self.assertTrue(rep.orders[rep.language.slots[0]].less("0[y]", "0[x]"))
        self._round_trip(x)

    def test_round_trip_reordered_ch3(self):
        space = ch3_blocks()
        language = min_language(space.lattice)
        inner = validate_sqo(space, "0", "e", [(["q"], ["p"]), (["s"], ["r"])])
        outer = validate_sqo(space, "e", "1", [(["r", "s"], ["p", "q"])])
        ordered = OrderedSpace(
            space, language, {Slot("0", "e", 1): inner, Slot("e", "1", 1): outer}
        )
        s = lift(ordered, default_params(space.lattice, language))
        self.assertListEqual(s.sort_members(("0", 1)), ["0[s]", "0[r]", "0[q]", "0[p]"])
        self._round_trip(ordered)

    def test_lift_functorial(self):
        """有序空间的嵌入诱导 lift 之间的嵌入, 点映到对应的点"""
        for lattice in (self.ch2, chain_lattice(3)):
            family = OrderedFamily(lattice)
            targets = [y for n in (2, 3) for y in family.enumerate(n)]
            for n in (1, 2):
                for x in family.enumerate(n):
                    params = default_params(lattice, x.language)
                    lx = lift(x, params)
                    for y in targets:
                        ly = lift(y, params)
                        for f in ordered_embeddings(x, y):
                            seeds = [point_label(y, f[p]) for p in x.points]
                            mapping = order_isomorphism(lx, closed_substructure(ly, seeds))
                            self.assertIsNotNone(mapping)
                            for p in x.points:
                                self.assertEqual(mapping[point_label(x, p)], point_label(y, f[p]))

    def test_kernel(self):
        x = chain_ordered(["x", "y"])
        s = lift(x, self.params)
        self.assertEqual(kernel(s, x, self.params), l_k(x, self.params))
        with self.assertRaises(NotALift):
            kernel(s, chain_ordered(["p", "q", "r"]), self.params)

    def test_transfer_constant(self):
        c = lift(chain_ordered(["x", "y", "z"]), self.params)
        lifted = transfer_coloring(c, chain_ordered(["p"]), self.params, lambda points: 0)
        self.assertEqual(len(lifted), 3)
        self.assertSetEqual(set(lifted.values()), {0})

    def test_transfer_points(self):
        c = lift(chain_ordered(["x", "y", "z"]), self.params)
        chi = {frozenset([class_label("0", (p,))]): k % 2 for k, p in enumerate("xyz")}
        lifted = transfer_coloring(c, chain_ordered(["p"]), self.params, chi)
        self.assertListEqual(sorted(lifted.values()), [0, 0, 1])


class TestEngine(TestCase):
    def setUp(self):
        self.ch2 = chain_lattice(2)
        self.params = default_params(self.ch2)
        self.b = lift(chain_ordered(["x", "y"]), self.params)
        self.whole = lift(chain_ordered(["p", "q", "r"]), self.params)
        p, q, r = (class_label("0", (v,)) for v in "pqr")
        top = class_label("1", ("p", "q", "r"))
        self.labels = p, q, r, top
        self.c = self.whole.with_less(set(self.whole.less) - {(p, r)})
        b0x, b0y, b1 = "0[x]", "0[y]", "1[x|y]"
        self.cover = [{b0x: p, b0y: q, b1: top}, {b0x: q, b0y: r, b1: top}]

    def test_complete(self):
        for f in self.cover:
            self.assertTrue(is_embedding(self.b, self.c, f))
        result = complete(self.c, self.b, self.cover, self.params)
        self.assertEqual(result, self.whole)
        for f in self.cover:
            self.assertTrue(is_embedding(self.b, result, f))

    def test_complete_chain_unions(self):
        """n 个点的链上, 用相邻点对或全部点对的拷贝覆盖, < 只保留拷贝内部的比较"""
        for n in range(3, 8):
            points = [f"p{k}" for k in range(n)]
            whole = lift(chain_ordered(points), self.params)
            top = class_label("1", tuple(sorted(points)))
            for pairs in (list(zip(points, points[1:])), list(combinations(points, 2))):
                cover = [
                    {"0[x]": class_label("0", (u,)), "0[y]": class_label("0", (v,)), "1[x|y]": top}
                    for u, v in pairs
                ]
                less = {(f[a], f[b]) for f in cover for a, b in self.b.less}
                c = whole.with_less(less)
                result = complete(c, self.b, cover, self.params)
                self.assertEqual(result, whole)
                for f in cover:
                    self.assertTrue(is_embedding(self.b, result, f))

    def test_complete_single_copy(self):
        identity = {x: x for x in self.b.elements}
        self.assertEqual(complete(self.b, self.b, [identity], self.params), self.b)

    def test_complete_order_cycle(self):
        p, q, r, top = self.labels
        cyclic = self.whole.with_less(set(self.c.less) | {(r, p)})
        with self.assertRaises(OrderCycle) as cm:
            complete(cyclic, self.b, self.cover, self.params)
        self.assertEqual(cm.exception.name, "OrderAcyclic")

    def test_complete_bad_copy(self):
        p, q, r, top = self.labels
        bad = {"0[x]": q, "0[y]": p, "1[x|y]": top}
        with self.assertRaises(ConstraintViolated) as cm:
            complete(self.c, self.b, [bad, self.cover[1]], self.params)
        self.assertEqual(cm.exception.name, "CopyEmbedded")

    def test_amalgamate(self):
        k1 = lift(chain_ordered(["p"]), self.params)
        k2 = lift(chain_ordered(["q"]), self.params)
        base = substructure(k1, ["1[p]"])
        amalgam = amalgamate_k(base, k1, {"1[p]": "1[p]"}, k2, {"1[p]": "1[q]"}, self.params)
        s = amalgam.structure
        self.assertEqual(len(s), 3)
        self.assertTrue(amalgam.is_strong(1))
        self.assertTrue(check_k(s).is_valid)
        self.assertListEqual(s.sequence(), ["0[p]", "0[q]", "1[p]"])

    def test_amalgamate_corpus(self):
        """1 个点的 lift 作 base, 因子为 ≤ 2 个点的 lift"""
        for lattice in (self.ch2, chain_lattice(3)):
            family = KFamily(lattice)
            factors = [s for n in (1, 2) for s in family.enumerate(n)]
            for base in family.enumerate(1):
                embedded = [(k, f) for k in factors for f in k_embeddings(base, k)]
                for (k1, f1), (k2, f2) in combinations(embedded, 2):
                    amalgam = amalgamate_k(base, k1, f1, k2, f2, family.params)
                    s = amalgam.structure
                    self.assertTrue(is_k_closed(s))
                    self.assertTrue(check_k(s).is_valid)
                    self.assertTrue(is_embedding(k1, s, amalgam.left))
                    self.assertTrue(is_embedding(k2, s, amalgam.right))
                    self.assertTrue(amalgam.is_strong(len(base)))

    def test_amalgamate_not_closed(self):
        k1 = lift(chain_ordered(["p"]), self.params)
        broken = KStructure(k1.lattice, k1.elements, k1.sorts, (), k1.B, k1.dex, k1.d, k1.less, k1.params)
        base = substructure(k1, ["1[p]"])
        with self.assertRaises(FactorsNotClosed):
            amalgamate_k(base, broken, {"1[p]": "1[p]"}, k1, {"1[p]": "1[p]"}, self.params)

    def test_irreducible(self):
        self.assertTrue(check_irreducible(self.b))
        self.assertFalse(check_irreducible(RelationalStructure(["a", "b"], {})))
        self.assertTrue(check_irreducible(RelationalStructure(["a"], {})))

    def test_hom_embedding(self):
        identity = {x: x for x in self.b.elements}
        self.assertTrue(check_hom_embedding(identity, self.b, self.b))
        target = RelationalStructure(["c"], {"<": []}, {"<": 2})
        related = RelationalStructure(["a", "b"], {"<": [("a", "b")]})
        self.assertFalse(check_hom_embedding({"a": "c", "b": "c"}, related, target))
        unrelated = RelationalStructure(["a", "b"], {}, {"<": 2})
        self.assertTrue(check_hom_embedding({"a": "c", "b": "c"}, unrelated, target))


class TestCommand(TestCase):
    def _call(self, *args, data):
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
            f.write(data)
        out = StringIO()
        try:
            call_command("ultra", *args, json=f.name, stdout=out)
        finally:
            os.unlink(f.name)
        return out.getvalue()

    def test_lattice_check(self):
        out = self._call("lattice", "check", data='{"lattice": "CH3"}')
        self.assertIn('"distributive": true', out)

    def test_lattice_check_not_distributive(self):
        with self.assertRaises(CommandError) as cm:
            self._call("lattice", "check", data='{"lattice": "M3"}')
        self.assertEqual(cm.exception.returncode, 1)

    def test_space_check_invalid(self):
        data = '{"lattice": "CH3", "points": ["x", "y"], "d": {"x,y": "0"}}'
        with self.assertRaises(CommandError) as cm:
            self._call("space", "check", data=data)
        self.assertEqual(cm.exception.returncode, 1)

    def test_bad_action(self):
        with self.assertRaises(CommandError):
            self._call("sqo", "rotate", data="{}")

    def test_ramsey_check(self):
        data = '{"family": "ordered", "lattice": "CH2", "A": 1, "B": 2, "C": 3, "r": 2}'
        out = self._call("ramsey-check", data=data)
        self.assertIn('"holds": true', out)
        with self.assertRaises(CommandError) as cm:
            self._call("ramsey-check", data=data.replace('"C": 3', '"C": 2'))
        self.assertEqual(cm.exception.returncode, 1)


class TestVerificationTask(TestCase):
    def setUp(self):
        self.job = VerificationJob.objects.create(
            kind="ramsey-check",
            payload={"family": "ordered", "lattice": "CH2", "A": 1, "B": 2, "C": 3},
        )

    def tearDown(self):
        VerificationJob.objects.all().delete()

    def test_run_and_callback(self):
        result = run_verification(self.job.id)
        self.assertEqual(result["verdict"], "holds")
        self.assertEqual(VerificationJob.objects.get(id=self.job.id).status, "running")
        task = Mock(args=[self.job.id], success=True, result=result, stopped=datetime.datetime.now())
        run_verification_callback(task)
        job = VerificationJob.objects.get(id=self.job.id)
        self.assertEqual(job.status, "finished")
        self.assertEqual(job.verdict, "holds")
        self.assertEqual(job.result["copies_a"], 3)

    def test_run_twice(self):
        run_verification(self.job.id)
        with self.assertRaises(Exception):
            run_verification(self.job.id)

    def test_callback_failure(self):
        task = Mock(args=[self.job.id], success=False, result="Traceback", stopped=datetime.datetime.now())
        run_verification_callback(task)
        job = VerificationJob.objects.get(id=self.job.id)
        self.assertEqual(job.status, "exception")
        self.assertEqual(job.result["error"], "Traceback")

    @patch("ultra.utils.tasks.async_task")
    def test_submit(self, _async_task):
        from ultra.utils.tasks import submit_verification

        _async_task.return_value = "task-2"
        submit_verification(self.job)
        self.assertEqual(VerificationJob.objects.get(id=self.job.id).task_id, "task-2")
        self.assertEqual(_async_task.call_args.kwargs["task_name"], f"ramsey-{self.job.id}")
