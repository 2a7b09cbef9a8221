import unittest
import sys
import os
import random
import itertools

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from support import c, load_metrology, ontology_from_text
from errors import UnknownSymbol
from services.concepts import TOP, Atom, BOTTOM, GCI, Ontology, RoleAssertion, ConceptAssertion
from services.normalizer import (
    TOP_KEY, AtomicInclusion, ConjunctionInclusion, ExistentialElim, ExistentialIntro,
    RoleComposition, normalize,
)
from services.reasoner import (
    Reasoner, equivalent, hierarchy, is_consistent, min_common_named_subsumers, named_subsumers,
    reasoner_registry, satisfiable, strictly_subsumed, subsumes,
)
from services.saturation import saturate

NAMES = ["A", "B", "C", "D", "E", "F"]


def closure_oracle(names, edges):
    """Reflexive-transitive closure of an inclusion graph, computed by Warshall"""
    reach = {(a, b): a == b or (a, b) in edges for a in names for b in names}
    for k in names:
        for i in names:
            for j in names:
                if reach[(i, k)] and reach[(k, j)]:
                    reach[(i, j)] = True
    return reach


class TestNormalize(unittest.TestCase):
    """Test cases for normalize function"""

    def test_conjunctive_right_side_is_split(self):
        ont = ontology_from_text("sub Measure and(some(hasUnit, Unit), some(hasDim, Dimension))\n")
        nset = normalize(ont)
        self.assertEqual(sorted(nset.existential_intro), [
            ExistentialIntro("Measure", "hasDim", "Dimension"),
            ExistentialIntro("Measure", "hasUnit", "Unit"),
        ])
        self.assertEqual(nset.fresh_names, {})

    def test_normal_axiom_unchanged(self):
        nset = normalize(ontology_from_text("sub A B\n"))
        self.assertEqual(nset.atomic, [AtomicInclusion("A", "B")])
        self.assertEqual(len(nset), 1)

    def test_existential_left_side_gets_fresh_name(self):
        nset = normalize(ontology_from_text("sub some(r, and(C, D)) E\n"))
        self.assertEqual(nset.existential_elim, [ExistentialElim("r", "_N1", "E")])
        self.assertEqual(nset.conjunctions, [ConjunctionInclusion("C", "D", "_N1")])

    def test_long_role_chain_binarized(self):
        nset = normalize(ontology_from_text("rchain r s t -> u\n"))
        self.assertEqual(nset.role_chains, [RoleComposition("r", "s", "_r1"), RoleComposition("_r1", "t", "u")])

    def test_long_left_conjunction_binarized(self):
        nset = normalize(ontology_from_text("sub and(A, B, C) D\n"))
        self.assertEqual(len(nset.conjunctions), 2)
        self.assertEqual(nset.conjunctions[-1].sup, "D")

    def test_abox_ignored_with_warning(self):
        ont = Ontology.build([GCI(Atom("A"), Atom("B")), ConceptAssertion(Atom("A"), "a"),
                              RoleAssertion("r", "a", "b")])
        with self.assertLogs("services.normalizer", level="WARNING") as logs:
            nset = normalize(ont)
        self.assertIn("2 ABox assertion(s) ignored", logs.output[0])
        self.assertEqual(nset.atomic, [AtomicInclusion("A", "B")])

    def test_extra_axioms_checked(self):
        ont = ontology_from_text("sub A B\n")
        with self.assertRaises(UnknownSymbol):
            normalize(ont, extra=[GCI(Atom("A"), Atom("Z"))])
        nset = normalize(ont, extra=[GCI(Atom("_Q1"), Atom("A"))])
        self.assertIn(AtomicInclusion("_Q1", "A"), nset.atomic)

    def test_deterministic(self):
        text = "sub some(r, and(A, B)) C\nsub C some(s, and(A, some(r, B)))\n"
        first = normalize(ontology_from_text(text))
        second = normalize(ontology_from_text(text))
        self.assertEqual(first.existential_elim, second.existential_elim)
        self.assertEqual(first.existential_intro, second.existential_intro)
        self.assertEqual(first.conjunctions, second.conjunctions)


class TestSaturate(unittest.TestCase):
    """Test cases for saturate function"""

    def test_example_hierarchy(self):
        index = saturate(normalize(load_metrology()))
        self.assertTrue({"Steel", "Metal", "Material", TOP_KEY} <= index.subsumers("Steel"))

    def test_reflexivity_and_top_only(self):
        index = saturate(normalize(Ontology(concept_names=frozenset({"A"}))))
        self.assertEqual(index.subsumers("A"), {"A", TOP_KEY})

    def test_existential_introduction_then_elimination(self):
        index = saturate(normalize(ontology_from_text("sub A some(r, B)\nsub some(r, B) C\n")))
        self.assertIn("C", index.subsumers("A"))
        self.assertIn(("A", "B"), index.edges("r"))

    def test_bottom_propagates_backwards(self):
        index = saturate(normalize(ontology_from_text("sub A some(r, B)\nsub B Bottom\n")))
        self.assertTrue(index.is_unsatisfiable("A"))
        self.assertTrue(index.is_consistent)

    def test_role_hierarchy(self):
        index = saturate(normalize(ontology_from_text("sub A some(r, B)\nrsub r s\nsub some(s, B) C\n")))
        self.assertIn("C", index.subsumers("A"))

    def test_role_chain(self):
        text = "sub A some(r, B)\nsub B some(s, C)\nrchain r s -> t\nsub some(t, C) D\n"
        index = saturate(normalize(ontology_from_text(text)))
        self.assertIn("D", index.subsumers("A"))
        self.assertIn(("A", "C"), index.edges("t"))

    def test_idempotent(self):
        nset = normalize(load_metrology())
        index = saturate(nset)
        before = {key: set(values) for key, values in index.S.items()}
        edges = index.edge_count
        index.extend(nset)
        self.assertEqual({key: set(values) for key, values in index.S.items()}, before)
        self.assertEqual(index.edge_count, edges)


class TestNominals(unittest.TestCase):
    """Extended coverage: nominals in subsumption"""

    def test_merge_along_reachable_nodes(self):
        ont = ontology_from_text("sub B {a}\nsub B some(s, E)\nsub E {a}\nsub E F\n")
        self.assertTrue(subsumes(Atom("B"), Atom("F"), ont))

    def test_no_merge_without_path(self):
        ont = ontology_from_text("sub B {a}\nsub E {a}\nsub E F\n")
        self.assertFalse(subsumes(Atom("B"), Atom("F"), ont))

    def test_nominal_query(self):
        ont = ontology_from_text("sub {a} A\nsub A B\n")
        self.assertTrue(subsumes(c("{a}"), Atom("B"), ont))
        self.assertTrue(subsumes(c("some(r, {a})"), c("some(r, B)"), ontology_from_text(
            "sub {a} A\nsub A B\nsub X some(r, Y)\n")))

    def test_inconsistent_ontology(self):
        ont = ontology_from_text("sub {a} Bottom\nsub A B\n")
        self.assertFalse(is_consistent(ont))
        self.assertTrue(subsumes(Atom("B"), Atom("A"), ont))
        self.assertFalse(satisfiable(Atom("A"), ont))


class TestSubsumption(unittest.TestCase):
    """Test cases for subsumption queries over the metrology CBox"""

    @classmethod
    def setUpClass(cls):
        cls.ont = load_metrology()

    def test_told_and_inferred(self):
        self.assertTrue(subsumes(Atom("Steel"), Atom("Material"), self.ont))
        self.assertFalse(subsumes(Atom("Material"), Atom("Steel"), self.ont))
        self.assertTrue(subsumes(Atom("Instrument"), c("some(hasMat, Material)"), self.ont))

    def test_top_and_bottom(self):
        self.assertTrue(subsumes(c("some(hasMat, Oak)"), TOP, self.ont))
        self.assertTrue(subsumes(BOTTOM, Atom("Steel"), self.ont))
        self.assertFalse(subsumes(TOP, Atom("Steel"), self.ont))

    def test_existential_monotonicity(self):
        self.assertTrue(subsumes(c("some(hasMat, Steel)"), c("some(hasMat, Metal)"), self.ont))
        self.assertFalse(subsumes(c("some(hasMat, Metal)"), c("some(hasMat, Steel)"), self.ont))

    def test_equivalence(self):
        self.assertTrue(equivalent(c("and(Steel, Analogic)"), c("and(Analogic, Steel)"), self.ont))
        self.assertTrue(strictly_subsumed(Atom("Steel"), Atom("Metal"), self.ont))
        self.assertFalse(strictly_subsumed(Atom("Metal"), Atom("Metal"), self.ont))
        self.assertTrue(equivalent(c("some(hasMat, Steel)"),
                                   c("and(some(hasMat, Steel), some(hasMat, Metal))"), self.ont))

    def test_unknown_symbol(self):
        with self.assertRaises(UnknownSymbol):
            subsumes(Atom("Unobtainium"), Atom("Metal"), self.ont)
        with self.assertRaises(UnknownSymbol):
            subsumes(c("some(hasColour, Metal)"), Atom("Metal"), self.ont)

    def test_named_subsumers(self):
        self.assertEqual(named_subsumers(Atom("Steel"), self.ont), ["Material", "Metal", "Steel"])
        self.assertEqual(named_subsumers(c("and(Oak, Numeric)"), self.ont),
                         ["Material", "Numeric", "Oak", "ReadingMode", "Wood"])

    def test_min_common_named_subsumers(self):
        index = reasoner_registry.get(self.ont).index
        self.assertEqual(min_common_named_subsumers({"Steel", "Iron"}, index), ["Metal"])
        self.assertEqual(min_common_named_subsumers({"Oak", "Steel"}, index), ["Material"])
        self.assertEqual(min_common_named_subsumers({"Steel"}, index), ["Steel"])
        self.assertEqual(min_common_named_subsumers({"Steel", "Centimeter"}, index), [])
        with self.assertRaises(UnknownSymbol):
            min_common_named_subsumers({"Steel", "Gold"}, index)

    def test_fresh_reasoner_agrees_with_cached(self):
        queries = [(c("some(hasMat, Iron)"), c("some(hasMat, Material)")),
                   (c("and(Steel, Analogic)"), c("and(Metal, ReadingMode)")),
                   (c("some(hasRM, Numeric)"), c("some(hasRM, Analogic)"))]
        fresh = Reasoner(self.ont)
        for left, right in reversed(queries):
            fresh.subsumes(right, left)
        for left, right in queries:
            with self.subTest(left=left.text, right=right.text):
                self.assertEqual(fresh.subsumes(left, right), subsumes(left, right, self.ont))


class TestReasonerRegistry(unittest.TestCase):
    """Test cases for the shared reasoner cache"""

    def test_one_reasoner_per_ontology(self):
        ont = ontology_from_text("sub A B\n")
        self.assertIs(reasoner_registry.get(ont), reasoner_registry.get(ont))
        self.assertIsNot(reasoner_registry.get(ont), reasoner_registry.get(ontology_from_text("sub A B\n")))

    def test_discard_drops_registered_queries(self):
        ont = ontology_from_text("sub A some(r, B)\n")
        first = reasoner_registry.get(ont)
        self.assertTrue(subsumes(c("and(A, B)"), c("some(r, B)"), ont))
        self.assertEqual(first.query_count, 2)
        reasoner_registry.discard(ont)
        second = reasoner_registry.get(ont)
        self.assertIsNot(second, first)
        self.assertEqual(second.query_count, 0)
        self.assertTrue(subsumes(c("and(A, B)"), c("some(r, B)"), ont))
        reasoner_registry.discard(ontology_from_text("sub A B\n"))

    def test_clear(self):
        ont = ontology_from_text("sub A B\n")
        first = reasoner_registry.get(ont)
        reasoner_registry.clear()
        self.assertIsNot(reasoner_registry.get(ont), first)


class TestHierarchy(unittest.TestCase):
    """Test cases for hierarchy function"""

    def test_transitively_reduced(self):
        pairs = hierarchy(load_metrology())
        self.assertIn(("Steel", "Metal"), pairs)
        self.assertIn(("Metal", "Material"), pairs)
        self.assertNotIn(("Steel", "Material"), pairs)
        self.assertEqual(pairs, sorted(pairs))

    def test_equivalent_and_unsatisfiable(self):
        ont = ontology_from_text("equiv A B\nsub B C\nsub D Bottom\n")
        pairs = hierarchy(ont)
        self.assertIn(("A", "B"), pairs)
        self.assertIn(("B", "A"), pairs)
        self.assertIn(("A", "C"), pairs)
        self.assertIn(("D", "Bottom"), pairs)
        self.assertNotIn(("D", "A"), pairs)

    def test_stable_under_queries(self):
        ont = load_metrology()
        before = hierarchy(ont)
        subsumes(c("and(some(hasMat, Steel), some(hasIT, Ruler))"), Atom("Instrument"), ont)
        subsumes(c("some(hasMat, and(Oak, Iron))"), c("some(hasMat, Wood)"), ont)
        self.assertEqual(hierarchy(ont), before)


class TestGraphOracle(unittest.TestCase):
    """Subsumption between names agrees with plain graph reachability on atomic ontologies"""

    def test_random_atomic_ontologies(self):
        rng = random.Random(2024)
        for case in range(200):
            names = NAMES[:rng.randint(2, 6)]
            edges = {(a, b) for a, b in itertools.permutations(names, 2) if rng.random() < 0.25}
            text = "".join(f"sub {a} {b}\n" for a, b in sorted(edges))
            text += "".join(f"sub {a} {a}\n" for a in names)
            ont = ontology_from_text(text)
            expected = closure_oracle(names, edges)
            reasoner = Reasoner(ont)
            for a, b in itertools.product(names, names):
                with self.subTest(case=case, sub=a, sup=b):
                    self.assertEqual(reasoner.subsumes(Atom(a), Atom(b)), expected[(a, b)])

    def test_conservative_on_five_names(self):
        """A fresh name for ∃r.(C ⊓ D) adds no subsumption beyond the entailed one"""
        ont = ontology_from_text("sub A some(r, B)\nsub B C\nsub B D\nsub some(r, and(C, D)) E\n")
        names = ["A", "B", "C", "D", "E"]
        expected = {(n, n) for n in names} | {("B", "C"), ("B", "D"), ("A", "E")}
        actual = {(a, b) for a, b in itertools.product(names, names) if subsumes(Atom(a), Atom(b), ont)}
        self.assertEqual(actual, expected)


if __name__ == '__main__':
    unittest.main()
