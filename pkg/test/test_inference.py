import unittest
import sys
import os
import random
import itertools
from unittest import mock

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import config
from support import c, load_metrology, ontology_from_text
from errors import NominalUnsupported, PreconditionViolated, UnknownSymbol
from services.concepts import TOP, Atom, Existential, conjoin, conjuncts, syntactic_length
from services.inference import lcs, miss, reduce, rest, rest_and_miss, semantic_difference
from services.reasoner import equivalent, subsumes

MATERIALS = ["Steel", "Iron", "Metal", "Oak", "Wood", "Material"]
MODES = ["Analogic", "Numeric", "ReadingMode"]

# pure name hierarchy: no axiom introduces an existential
LATTICE = """
sub B A
sub C A
sub D B
sub E B
sub F C
component r A
component s A
"""
LATTICE_NAMES = ["A", "B", "C", "D", "E", "F"]


def random_description(rng: random.Random, depth: int = 2):
    """Nominal-free description over the metrology signature"""
    members = []
    for _ in range(rng.randint(1, 3)):
        pick = rng.random()
        if depth > 0 and pick < 0.4:
            role, names = rng.choice([("hasMat", MATERIALS), ("hasRM", MODES)])
            filler = Atom(rng.choice(names)) if depth == 1 or rng.random() < 0.6 else random_description(rng, depth - 1)
            members.append(Existential(role, filler))
        else:
            members.append(Atom(rng.choice(MATERIALS + MODES)))
    return conjoin(*members)


def lattice_description(rng: random.Random, depth: int = 2):
    members = []
    for _ in range(rng.randint(1, 3)):
        if depth > 0 and rng.random() < 0.5:
            members.append(Existential(rng.choice("rs"), lattice_description(rng, depth - 1)))
        else:
            members.append(Atom(rng.choice(LATTICE_NAMES)))
    return conjoin(*members)


LATTICE_ANCESTORS = {
    "A": {"A"}, "B": {"A", "B"}, "C": {"A", "C"},
    "D": {"A", "B", "D"}, "E": {"A", "B", "E"}, "F": {"A", "C", "F"},
}


def lattice_subsumes(c, d) -> bool:
    """Structural subsumption, exact for the name-only LATTICE ontology"""
    have = conjuncts(c)
    for goal in conjuncts(d):
        if isinstance(goal, Atom):
            found = any(isinstance(x, Atom) and goal.name in LATTICE_ANCESTORS[x.name] for x in have)
        else:
            found = any(isinstance(x, Existential) and x.role == goal.role and lattice_subsumes(x.filler, goal.filler)
                        for x in have)
        if not found:
            return False
    return True


def lattice_filler_conjuncts():
    """Every possible conjunct of a role-depth-1 filler: names, and existentials over name antichains"""
    fillers = [TOP]
    for size in (1, 2, 3):
        for group in itertools.combinations(LATTICE_NAMES, size):
            if all(a not in LATTICE_ANCESTORS[b] and b not in LATTICE_ANCESTORS[a]
                   for a, b in itertools.combinations(group, 2)):
                fillers.append(conjoin(*(Atom(n) for n in group)))
    space = [Atom(n) for n in LATTICE_NAMES] + [Existential(role, f) for role in "rs" for f in fillers]
    # most specific first: a conjunct never comes after one it implies
    return sorted(space, key=lambda a: (-sum(lattice_subsumes(a, b) for b in space), a.text))


LATTICE_FILLER_CONJUNCTS = lattice_filler_conjuncts()


def exhaustive_common_subsumer(left, right):
    """Conjunction of every common subsumer of role depth <= 2, by exhaustive search"""
    def common(expr):
        return lattice_subsumes(left, expr) and lattice_subsumes(right, expr)

    parts = [Atom(n) for n in LATTICE_NAMES if common(Atom(n))]

    def search(role, chosen, start):
        extended = False
        for index in range(start, len(LATTICE_FILLER_CONJUNCTS)):
            candidate = LATTICE_FILLER_CONJUNCTS[index]
            if lattice_subsumes(conjoin(*chosen), candidate):
                continue
            grown = chosen + [candidate]
            if common(Existential(role, conjoin(*grown))):
                extended = True
                search(role, grown, index + 1)
        if not extended:
            parts.append(Existential(role, conjoin(*chosen)))

    for role in "rs":
        if common(Existential(role, TOP)):
            search(role, [], 0)
    return conjoin(*parts)


class TestReduce(unittest.TestCase):
    """Test cases for reduce function"""

    @classmethod
    def setUpClass(cls):
        cls.ont = load_metrology()

    def test_dominated_conjunct_dropped(self):
        self.assertEqual(reduce(c("and(Steel, Metal)"), self.ont), Atom("Steel"))

    def test_recurses_into_fillers(self):
        expr = c("and(some(hasMat, and(Steel, Material)), some(hasMat, Metal))")
        self.assertEqual(reduce(expr, self.ont), c("some(hasMat, Steel)"))

    def test_incomparable_kept(self):
        expr = c("and(Steel, Analogic)")
        self.assertEqual(reduce(expr, self.ont), expr)

    def test_equivalent_conjuncts_keep_smallest(self):
        ont = ontology_from_text("equiv Beta Alpha\nsub Gamma Delta\n")
        self.assertEqual(reduce(c("and(Beta, Alpha)"), ont), Atom("Alpha"))

    def test_top(self):
        self.assertEqual(reduce(TOP, self.ont), TOP)


class TestSubsumptionLaws(unittest.TestCase):
    """Order laws of subsumption over random descriptions"""

    @classmethod
    def setUpClass(cls):
        cls.ont = load_metrology()
        rng = random.Random(5)
        cls.triples = [(random_description(rng), random_description(rng), random_description(rng))
                       for _ in range(200)]

    def test_reflexive_and_bounded(self):
        for index, (x, y, _) in enumerate(self.triples):
            with self.subTest(case=index):
                self.assertTrue(subsumes(x, x, self.ont))
                self.assertTrue(subsumes(x, TOP, self.ont))
                self.assertTrue(subsumes(conjoin(x, y), x, self.ont))
                self.assertTrue(subsumes(conjoin(x, y), y, self.ont))

    def test_conjunction_is_greatest_lower_bound(self):
        for index, (x, y, z) in enumerate(self.triples):
            with self.subTest(case=index):
                below_both = subsumes(z, x, self.ont) and subsumes(z, y, self.ont)
                self.assertEqual(subsumes(z, conjoin(x, y), self.ont), below_both)

    def test_transitive(self):
        for index, (x, y, z) in enumerate(self.triples):
            with self.subTest(case=index):
                if subsumes(x, y, self.ont) and subsumes(y, z, self.ont):
                    self.assertTrue(subsumes(x, z, self.ont))
                self.assertTrue(subsumes(conjoin(x, y, z), conjoin(x, y), self.ont))

    def test_existential_monotone(self):
        for index, (x, y, _) in enumerate(self.triples):
            with self.subTest(case=index):
                if subsumes(x, y, self.ont):
                    self.assertTrue(subsumes(Existential("hasMat", x), Existential("hasMat", y), self.ont))
                self.assertTrue(subsumes(Existential("hasMat", conjoin(x, y)), Existential("hasMat", x), self.ont))


class TestLcs(unittest.TestCase):
    """Test cases for lcs function"""

    @classmethod
    def setUpClass(cls):
        cls.ont = load_metrology()

    def test_named_part(self):
        result = lcs(c("and(Steel, Analogic)"), c("and(Iron, Numeric)"), self.ont)
        self.assertEqual(result, c("and(Metal, ReadingMode)"))
        self.assertEqual(lcs(c("and(Steel, Analogic)"), Atom("Oak"), self.ont), Atom("Material"))
        self.assertEqual(lcs(c("and(Iron, Numeric)"), Atom("Oak"), self.ont), Atom("Material"))

    def test_identical_arguments(self):
        expr = c("and(Steel, Metal, some(hasRM, Analogic))")
        self.assertEqual(lcs(expr, expr, self.ont), reduce(expr, self.ont))

    def test_existential_pairs(self):
        self.assertEqual(lcs(c("some(hasMat, Steel)"), c("some(hasMat, Oak)"), self.ont),
                         c("some(hasMat, Material)"))

    def test_component_projection(self):
        demand = c("and(some(hasMat, Metal), some(hasIT, Ruler), some(hasRM, Analogic))")
        offer = c("and(some(hasMat, Wood), some(hasIT, Ruler), some(hasRM, Top))")
        self.assertEqual(lcs(demand, offer, self.ont),
                         c("and(some(hasIT, Ruler), some(hasMat, Material), some(hasRM, Top))"))

    def test_unrelated_gives_top(self):
        self.assertEqual(lcs(Atom("Steel"), Atom("Centimeter"), self.ont), TOP)
        self.assertEqual(lcs(c("some(hasMat, Steel)"), c("some(hasRM, Analogic)"), self.ont), TOP)

    def test_nominal_rejected(self):
        ont = ontology_from_text("sub {ruler1} Ruler\nsub Ruler Tool\n")
        with self.assertRaises(NominalUnsupported):
            lcs(c("{ruler1}"), Atom("Ruler"), ont)

    def test_unknown_symbol(self):
        with self.assertRaises(UnknownSymbol):
            lcs(Atom("Steel"), Atom("Gold"), self.ont)

    def test_common_subsumer_and_commutative(self):
        rng = random.Random(5)
        for case in range(200):
            left, right = random_description(rng), random_description(rng)
            with self.subTest(case=case, left=left.text, right=right.text):
                result = lcs(left, right, self.ont)
                self.assertTrue(subsumes(left, result, self.ont))
                self.assertTrue(subsumes(right, result, self.ont))
                self.assertEqual(result, lcs(right, left, self.ont))

    def test_structural_oracle_matches_reasoner(self):
        ont = ontology_from_text(LATTICE)
        rng = random.Random(23)
        for case in range(100):
            left, right = lattice_description(rng), lattice_description(rng, depth=1)
            with self.subTest(case=case, left=left.text, right=right.text):
                self.assertEqual(lattice_subsumes(left, right), subsumes(left, right, ont))

    def test_equivalent_to_exhaustive_minimum(self):
        ont = ontology_from_text(LATTICE)
        rng = random.Random(17)
        for case in range(50):
            left, right = lattice_description(rng), lattice_description(rng)
            result = lcs(left, right, ont)
            with self.subTest(case=case, left=left.text, right=right.text):
                self.assertTrue(subsumes(left, result, ont))
                self.assertTrue(subsumes(right, result, ont))
                self.assertTrue(equivalent(result, exhaustive_common_subsumer(left, right), ont))


class TestSemanticDifference(unittest.TestCase):
    """Test cases for semantic_difference function"""

    @classmethod
    def setUpClass(cls):
        cls.ont = load_metrology()

    def test_nothing_implied(self):
        result = semantic_difference(c("and(Steel, Analogic)"), c("and(Metal, ReadingMode)"), self.ont)
        self.assertEqual(result, c("and(Steel, Analogic)"))

    def test_implied_conjunct_removed(self):
        result = semantic_difference(c("and(Metal, Numeric)"), c("and(Metal, ReadingMode)"), self.ont)
        self.assertEqual(result, Atom("Numeric"))

    def test_self_difference_is_top(self):
        expr = c("and(Steel, some(hasRM, Analogic))")
        self.assertEqual(semantic_difference(expr, expr, self.ont), TOP)

    def test_existential_kept_whole(self):
        demand = c("and(some(hasMat, Metal), some(hasIT, Ruler), some(hasRM, Analogic))")
        common = c("and(some(hasIT, Ruler), some(hasMat, Material), some(hasRM, Analogic))")
        self.assertEqual(semantic_difference(demand, common, self.ont), c("some(hasMat, Metal)"))

    def test_precondition(self):
        with self.assertRaises(PreconditionViolated) as caught:
            semantic_difference(Atom("Metal"), Atom("Steel"), self.ont)
        self.assertEqual(caught.exception.details["minuend"], "Metal")

    def test_reconstruction_check_can_be_disabled(self):
        with mock.patch.object(config, "CHECK_RECONSTRUCTION", False):
            result = semantic_difference(c("and(Metal, Numeric)"), c("and(Metal, ReadingMode)"), self.ont)
        self.assertEqual(result, Atom("Numeric"))

    def test_reconstruction_and_length(self):
        rng = random.Random(9)
        for case in range(200):
            minuend, other = random_description(rng), random_description(rng)
            subtrahend = lcs(minuend, other, self.ont)
            with self.subTest(case=case, minuend=minuend.text, subtrahend=subtrahend.text):
                result = semantic_difference(minuend, subtrahend, self.ont)
                self.assertTrue(equivalent(conjoin(result, subtrahend), minuend, self.ont))
                self.assertLessEqual(syntactic_length(result), syntactic_length(minuend))


class TestRestAndMiss(unittest.TestCase):
    """Test cases for rest and miss functions"""

    @classmethod
    def setUpClass(cls):
        cls.ont = load_metrology()
        cls.demand = c("and(some(hasMat, Metal), some(hasIT, Ruler), some(hasRM, Analogic))")

    def test_named_descriptions(self):
        common, demand_side, offer_side = rest_and_miss(c("and(Steel, Analogic)"), c("and(Metal, Numeric)"),
                                                        self.ont)
        self.assertEqual(common, c("and(Metal, ReadingMode)"))
        self.assertEqual(demand_side, c("and(Steel, Analogic)"))
        self.assertEqual(offer_side, Atom("Numeric"))

    def test_identical_projections(self):
        self.assertEqual(rest(self.demand, self.demand, self.ont), TOP)
        self.assertEqual(miss(self.demand, self.demand, self.ont), TOP)

    def test_distant_offers(self):
        oak = c("and(some(hasMat, Oak), some(hasIT, Ruler), some(hasRM, Analogic))")
        wood = c("and(some(hasMat, Wood), some(hasIT, Ruler), some(hasRM, Top))")
        self.assertEqual(rest(self.demand, oak, self.ont), c("some(hasMat, Metal)"))
        self.assertEqual(rest(self.demand, wood, self.ont), c("and(some(hasMat, Metal), some(hasRM, Analogic))"))
        self.assertEqual(miss(self.demand, oak, self.ont), c("some(hasMat, Oak)"))

    def test_more_precise_offer_has_no_rest(self):
        steel = c("and(some(hasMat, Steel), some(hasIT, Ruler), some(hasRM, Analogic))")
        self.assertEqual(rest(self.demand, steel, self.ont), TOP)
        self.assertEqual(miss(self.demand, steel, self.ont), c("some(hasMat, Steel)"))

    def test_rest_top_iff_offer_below_demand(self):
        rng = random.Random(3)
        for case in range(200):
            demand, offer = random_description(rng), random_description(rng)
            with self.subTest(case=case, demand=demand.text, offer=offer.text):
                self.assertEqual(rest(demand, offer, self.ont) == TOP, subsumes(offer, demand, self.ont))


if __name__ == '__main__':
    unittest.main()
