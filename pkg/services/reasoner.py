"""
Subsumption reasoning service

One Reasoner per Ontology: the CBox is saturated once, and every complex
query expression C is registered as a fresh name Q with Q ≡ C, extending the
same index incrementally. A registered expression keeps its name for the
lifetime of the reasoner, so the index of a long-lived Ontology grows with
every distinct query. `reasoner_registry.discard(ont)` or
`reasoner_registry.clear()` drops that state; the next query re-saturates.
"""

import logging
import threading
import weakref
from typing import Dict, Iterable, List, Set, Tuple

from errors import UnknownSymbol
from services.concepts import GCI, Atom, Bottom, ConceptExpr, Ontology, Top, canonicalize, is_basic
from services.normalizer import (
    BOTTOM_KEY, TOP_KEY, Normalizer, concept_key, is_fresh_key, is_nominal_key, normalize,
)
from services.saturation import ClassificationIndex, saturate

logger = logging.getLogger(__name__)

QUERY_PREFIX = "_Q"


def is_user_key(key: str) -> bool:
    """True for keys of user concept names (not ⊤, ⊥, nominals or fresh names)"""
    return key not in (TOP_KEY, BOTTOM_KEY) and not is_fresh_key(key) and not is_nominal_key(key)


class Reasoner:
    def __init__(self, ontology: Ontology):
        self.ontology = ontology
        self._lock = threading.RLock()
        self._normalizer = Normalizer()
        self.index: ClassificationIndex = saturate(normalize(ontology, normalizer=self._normalizer))
        self._query_keys: Dict[ConceptExpr, str] = {}

    @property
    def query_count(self) -> int:
        return len(self._query_keys)

    # ---------- registration ----------

    def key_of(self, expr: ConceptExpr) -> str:
        """Index key of an expression, registering a query name if needed"""
        expr = canonicalize(expr)
        if isinstance(expr, Bottom):
            return BOTTOM_KEY
        if isinstance(expr, Top):
            return TOP_KEY
        self.ontology.check_symbols(expr)
        if is_basic(expr):
            return concept_key(expr)

        with self._lock:
            key = self._query_keys.get(expr)
            if key is None:
                key = f"{QUERY_PREFIX}{len(self._query_keys) + 1}"
                nset = self._normalizer.normalize_axioms([GCI(Atom(key), expr), GCI(expr, Atom(key))])
                nset.concepts.add(key)
                self.index.extend(nset)
                self._query_keys[expr] = key
                logger.debug(f"Registered {key} ≡ {expr}")
            return key

    def _subsumers(self, key: str) -> Set[str]:
        if key == BOTTOM_KEY:
            return {BOTTOM_KEY}
        return self.index.subsumers(key)

    # ---------- standard reasoning ----------

    def is_consistent(self) -> bool:
        with self._lock:
            return self.index.is_consistent

    def subsumes(self, c: ConceptExpr, d: ConceptExpr) -> bool:
        """True iff the ontology entails c ⊑ d"""
        c_key, d_key = self.key_of(c), self.key_of(d)
        if c_key == BOTTOM_KEY or d_key == TOP_KEY or c_key == d_key:
            return True
        with self._lock:
            if not self.index.is_consistent:
                return True
            found = self._subsumers(c_key)
            return d_key in found or BOTTOM_KEY in found

    def equivalent(self, c: ConceptExpr, d: ConceptExpr) -> bool:
        return self.subsumes(c, d) and self.subsumes(d, c)

    def strictly_subsumed(self, c: ConceptExpr, d: ConceptExpr) -> bool:
        return self.subsumes(c, d) and not self.subsumes(d, c)

    def satisfiable(self, c: ConceptExpr) -> bool:
        key = self.key_of(c)
        if key == BOTTOM_KEY:
            return False
        with self._lock:
            return self.index.is_consistent and not self.index.is_unsatisfiable(key)

    # ---------- named hierarchy ----------

    def named_subsumers(self, c: ConceptExpr) -> List[str]:
        """Sorted user concept names subsuming c"""
        if not self.satisfiable(c):
            return sorted(self.ontology.concept_names)
        key = self.key_of(c)
        with self._lock:
            return sorted(k for k in self._subsumers(key) if is_user_key(k))

    def min_common_named_subsumers(self, names: Iterable[str]) -> List[str]:
        with self._lock:
            return min_common_named_subsumers(names, self.index)

    def minimal_names(self, names: Iterable[str]) -> List[str]:
        """⊑-minimal members of a set of user names, sorted"""
        with self._lock:
            return sorted(_minimal(set(names), self.index))

    def hierarchy(self) -> List[Tuple[str, str]]:
        """Direct (sub, sup) pairs between user names.

        Equivalent names are listed both ways; unsatisfiable names are
        listed once, as (name, "Bottom").
        """
        pairs: List[Tuple[str, str]] = []
        with self._lock:
            index = self.index
            consistent = index.is_consistent
            for name in sorted(self.ontology.concept_names):
                if not consistent or index.is_unsatisfiable(name):
                    pairs.append((name, "Bottom"))
                    continue
                above = {k for k in index.subsumers(name) if is_user_key(k) and k != name}
                equivalents = {k for k in above if name in index.subsumers(k)}
                strict = above - equivalents
                parents = _minimal(strict, index)
                pairs.extend((name, other) for other in sorted(equivalents | parents))
        return pairs


def _minimal(names: Set[str], index: ClassificationIndex) -> Set[str]:
    """Elements of names with no strictly smaller element in names"""
    result = set()
    for candidate in names:
        dominated = False
        for other in names:
            if other == candidate:
                continue
            other_sups = index.subsumers(other)
            if candidate in other_sups and other not in index.subsumers(candidate):
                dominated = True
                break
        if not dominated:
            result.add(candidate)
    return result


def min_common_named_subsumers(names: Iterable[str], index: ClassificationIndex) -> List[str]:
    """⊑-minimal named concepts subsuming every name; [] means only ⊤ does.

    Unsatisfiable names are subsumed by everything and drop out; among
    equivalent minimal names all are returned, sorted.
    """
    names = sorted(set(names))
    if not names:
        raise ValueError("min_common_named_subsumers needs at least one name")
    unknown = [n for n in names if not index.has_node(n)]
    if unknown:
        raise UnknownSymbol(f"unclassified concept name(s): {', '.join(unknown)}",
                            details={"concepts": unknown})

    satisfiable = [n for n in names if not index.is_unsatisfiable(n)]
    if not satisfiable:
        return names

    common = {k for k in index.subsumers(satisfiable[0]) if is_user_key(k)}
    for name in satisfiable[1:]:
        common &= index.subsumers(name)
    return sorted(_minimal(common, index))


class ReasonerRegistry:
    """Caches one Reasoner per live Ontology object"""

    def __init__(self):
        self._reasoners: "weakref.WeakKeyDictionary[Ontology, Reasoner]" = weakref.WeakKeyDictionary()
        self._lock = threading.Lock()

    def get(self, ontology: Ontology) -> Reasoner:
        with self._lock:
            reasoner = self._reasoners.get(ontology)
            if reasoner is None:
                reasoner = Reasoner(ontology)
                self._reasoners[ontology] = reasoner
            return reasoner

    def discard(self, ontology: Ontology) -> None:
        """Forget the reasoner of one ontology, with its registered queries"""
        with self._lock:
            reasoner = self._reasoners.pop(ontology, None)
        if reasoner is not None:
            logger.debug(f"Discarded reasoner with {reasoner.query_count} registered queries")

    def clear(self) -> None:
        with self._lock:
            self._reasoners.clear()


# Singleton instance
reasoner_registry = ReasonerRegistry()


def classify(ont: Ontology) -> ClassificationIndex:
    return reasoner_registry.get(ont).index


def subsumes(c: ConceptExpr, d: ConceptExpr, ont: Ontology) -> bool:
    return reasoner_registry.get(ont).subsumes(c, d)


def equivalent(c: ConceptExpr, d: ConceptExpr, ont: Ontology) -> bool:
    return reasoner_registry.get(ont).equivalent(c, d)


def strictly_subsumed(c: ConceptExpr, d: ConceptExpr, ont: Ontology) -> bool:
    return reasoner_registry.get(ont).strictly_subsumed(c, d)


def satisfiable(c: ConceptExpr, ont: Ontology) -> bool:
    return reasoner_registry.get(ont).satisfiable(c)


def is_consistent(ont: Ontology) -> bool:
    return reasoner_registry.get(ont).is_consistent()


def named_subsumers(c: ConceptExpr, ont: Ontology) -> List[str]:
    return reasoner_registry.get(ont).named_subsumers(c)


def hierarchy(ont: Ontology) -> List[Tuple[str, str]]:
    return reasoner_registry.get(ont).hierarchy()
