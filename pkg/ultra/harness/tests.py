from itertools import combinations

from django.test import TestCase

from ultra.exceptions import BudgetExceeded, NotMeetIrreducible
from ultra.harness import enumerate_structures, get_family
from ultra.harness.expansion import expansion_check, expansion_search
from ultra.harness.gadgets import gadget_pi, order_reversal
from ultra.harness.models import CheckSet, Verdict
from ultra.harness.ordered import OrderedFamily, ordered_embeddings
from ultra.harness.ramsey import gray_code, ramsey_check, ramsey_search
from ultra.kstruct import check_k, default_params
from ultra.lattice import boolean_square, chain_lattice
from ultra.space import validate_space
from ultra.sqo import OrderedSpace, Slot, min_language, order_from_sequence


def chain(n, lattice=None, value="1"):
    """n 个点两两距离相同, 每个槽位都按 p0 < p1 < ... 排"""
    lattice = lattice or chain_lattice(2)
    points = [f"p{k}" for k in range(n)]
    space = validate_space(
        lattice, points, {(x, y): value for x, y in combinations(points, 2)}
    )
    language = min_language(lattice)
    orders = {
        s: order_from_sequence(space, s.bottom, s.top, points) for s in language.slots
    }
    return OrderedSpace(space, language, orders)


class TestGrayCode(TestCase):
    def test_visits_every_word(self):
        for m, r in ((3, 2), (2, 3), (4, 2)):
            digits = [0] * m
            seen = {tuple(digits)}
            steps = 0
            for pos, value in gray_code(m, r):
                self.assertEqual(abs(digits[pos] - value), 1)
                digits[pos] = value
                seen.add(tuple(digits))
                steps += 1
            self.assertEqual(steps, r**m - 1)
            self.assertEqual(len(seen), r**m)


class TestRamseyCheck(TestCase):
    def setUp(self):
        self.family = OrderedFamily(chain_lattice(2))

    def test_r33(self):
        """边着两种颜色: 6 个点必有单色三角形, 5 个点不一定"""
        a, b = chain(2), chain(3)
        verdict = ramsey_check(self.family, a, b, 2, chain(6))
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.copies_a, 15)
        self.assertEqual(verdict.copies_b, 20)
        self.assertEqual(verdict.colorings, 2**15)
        verdict = ramsey_check(self.family, a, b, 2, chain(5))
        self.assertFalse(verdict.holds)
        self.assertEqual(len(verdict.witness), 10)
        self.assertEqual(verdict.exit_code, 1)

    def test_counterexample_has_no_mono_triangle(self):
        verdict = ramsey_check(self.family, chain(2), chain(3), 2, chain(5))
        color = {frozenset(w["copy"]): w["color"] for w in verdict.witness}
        for triangle in combinations([f"p{k}" for k in range(5)], 3):
            colors = {color[frozenset(e)] for e in combinations(triangle, 2)}
            self.assertEqual(len(colors), 2)

    def test_pigeonhole(self):
        a = chain(1)
        for k in (2, 3):
            for r in (2, 3):
                b = chain(k)
                self.assertTrue(ramsey_check(self.family, a, b, r, chain(r * (k - 1) + 1)).holds)
                self.assertFalse(ramsey_check(self.family, a, b, r, chain(r * (k - 1))).holds)

    def test_no_copy_of_b(self):
        verdict = ramsey_check(self.family, chain(1), chain(3), 2, chain(2))
        self.assertFalse(verdict.holds)

    def test_budget(self):
        with self.assertRaises(BudgetExceeded):
            ramsey_check(self.family, chain(2), chain(3), 2, chain(5), copy_limit=5)
        with self.assertRaises(BudgetExceeded):
            ramsey_check(self.family, chain(1), chain(2), 3, chain(5), coloring_budget=100)

    def test_search(self):
        c, verdict = ramsey_search(self.family, chain(1), chain(2), 2, 4)
        self.assertEqual(len(c), 3)
        self.assertEqual(verdict.size, 3)
        self.assertEqual(verdict.exit_code, 0)

    def test_search_not_found(self):
        c, verdict = ramsey_search(self.family, chain(1), chain(3), 3, 5)
        self.assertIsNone(c)
        self.assertFalse(verdict.holds)


class TestEnumerate(TestCase):
    def test_counts(self):
        self.assertEqual(len(enumerate_structures("space", chain_lattice(3), 2)), 2)
        self.assertEqual(len(enumerate_structures("space", chain_lattice(3), 3)), 3)
        self.assertEqual(len(enumerate_structures("space", chain_lattice(2), 2)), 1)
        self.assertEqual(len(enumerate_structures("ordered", chain_lattice(2), 3)), 1)

    def test_cached(self):
        family = get_family("space", chain_lattice(3))
        self.assertIs(family.enumerate(3), family.enumerate(3))

    def test_budget(self):
        family = get_family("space", boolean_square(), budget=5)
        with self.assertRaises(BudgetExceeded):
            family.enumerate(4)

    def test_unknown_family(self):
        with self.assertRaises(ValueError):
            get_family("graph", chain_lattice(2))

    def test_kstruct_family(self):
        family = get_family("kstruct", chain_lattice(2))
        for s in family.enumerate(2):
            self.assertTrue(check_k(s).is_valid)


class TestExpansion(TestCase):
    def test_two_points(self):
        lattice = chain_lattice(2)
        a = chain(2)
        two = validate_space(lattice, ["x", "y"], {"x,y": "1"})
        one = validate_space(lattice, ["x"], {})
        self.assertTrue(expansion_check(a, two))
        self.assertFalse(expansion_check(a, one))
        verdict = expansion_check(a, one, report=True)
        self.assertFalse(verdict.holds)
        self.assertIsNotNone(verdict.witness)

    def test_search_ch3(self):
        a = chain(2, chain_lattice(3), "e")
        verdict = expansion_search(a, chain_lattice(3), max_size=4)
        self.assertTrue(verdict.holds)
        self.assertLessEqual(verdict.size, 4)
        self.assertTrue(expansion_check(a, verdict.witness))

    def test_search_inconclusive(self):
        a = chain(3)
        verdict = expansion_search(a, chain_lattice(2), max_size=2)
        self.assertTrue(verdict.inconclusive)
        self.assertEqual(verdict.exit_code, 2)


class TestGadgets(TestCase):
    def test_gadget_pi(self):
        lattice = chain_lattice(2)
        params = default_params(lattice)
        s = gadget_pi(lattice, "0", params)
        self.assertEqual(len(s), 3)
        self.assertTrue(check_k(s).is_valid)
        self.assertEqual(s.sequence()[:2], ["x1", "x2"])

    def test_gadget_reducible(self):
        lattice = boolean_square()
        with self.assertRaises(NotMeetIrreducible):
            gadget_pi(lattice, "0", default_params(lattice))

    def test_order_reversal(self):
        ordered = chain(3)
        slot = ordered.language.slots[0]
        reversed_once = order_reversal(ordered, [tuple(slot)])
        self.assertTrue(reversed_once.orders[slot].less("p2", "p0"))
        self.assertNotEqual(reversed_once, ordered)
        self.assertEqual(order_reversal(reversed_once, [tuple(slot)]), ordered)

    def test_reversal_keeps_embeddings(self):
        ordered = chain(3)
        slot = Slot("0", "1", 1)
        reversed_once = order_reversal(ordered, [slot])
        self.assertEqual(len(ordered_embeddings(chain(2), reversed_once)), 3)


class TestModels(TestCase):
    def test_check_set(self):
        check = CheckSet(subject="K")
        check.passed("Partition")
        check.error("UTyped", "bad edge")
        check.error("UTyped", "another")
        self.assertFalse(check.is_valid)
        self.assertEqual(check.error_count, 2)
        self.assertListEqual(check.failed(), ["UTyped"])
        self.assertEqual(check.to_dict()["rows"][1]["name"], "UTyped")

    def test_verdict_exit_code(self):
        self.assertEqual(Verdict(holds=True).exit_code, 0)
        self.assertEqual(Verdict(holds=False).exit_code, 1)
        self.assertEqual(Verdict(inconclusive=True).exit_code, 2)
        self.assertEqual(Verdict(holds=True, size=3).to_dict()["size"], 3)
