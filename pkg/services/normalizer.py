"""
EL++ normalization

Rewrites GCIs and role inclusions into the normal forms consumed by the
completion rules:

    A ⊑ B        A1 ⊓ A2 ⊑ B        A ⊑ ∃r.B        ∃r.A ⊑ B
    r ⊑ s        r1 ∘ r2 ⊑ s

A, Ai range over basic concepts (concept names, ⊤, nominals); B may also be ⊥.
Complex subexpressions are replaced by fresh names, which start with an
underscore and therefore never clash with user identifiers.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, Iterable, List, NamedTuple, Optional, Set, Tuple

from errors import UnknownSymbol
from services.concepts import (
    TOP, Atom, Axiom, Bottom, ConceptExpr, Conjunction, Existential, GCI,
    Nominal, Ontology, RoleInclusion, Top, canonicalize, is_basic,
)

logger = logging.getLogger(__name__)

TOP_KEY = "⊤"
BOTTOM_KEY = "⊥"

FRESH_CONCEPT_PREFIX = "_N"
FRESH_ROLE_PREFIX = "_r"


def concept_key(expr: ConceptExpr) -> str:
    """Node key of a basic concept (or ⊥) inside the completion structure"""
    if isinstance(expr, Top):
        return TOP_KEY
    if isinstance(expr, Bottom):
        return BOTTOM_KEY
    if isinstance(expr, Nominal):
        return expr.text
    return expr.name


def is_nominal_key(key: str) -> bool:
    return key.startswith("{")


def is_fresh_key(key: str) -> bool:
    return key.startswith("_")


# ---------- Normal forms ----------

class AtomicInclusion(NamedTuple):
    sub: str
    sup: str


class ConjunctionInclusion(NamedTuple):
    left: str
    right: str
    sup: str


class ExistentialIntro(NamedTuple):
    sub: str
    role: str
    filler: str


class ExistentialElim(NamedTuple):
    role: str
    filler: str
    sup: str


class RoleSub(NamedTuple):
    sub: str
    sup: str


class RoleComposition(NamedTuple):
    first: str
    second: str
    sup: str


@dataclass
class NormalizedAxiomSet:
    atomic: List[AtomicInclusion] = field(default_factory=list)
    conjunctions: List[ConjunctionInclusion] = field(default_factory=list)
    existential_intro: List[ExistentialIntro] = field(default_factory=list)
    existential_elim: List[ExistentialElim] = field(default_factory=list)
    role_subs: List[RoleSub] = field(default_factory=list)
    role_chains: List[RoleComposition] = field(default_factory=list)
    # basic concepts mentioned, node keys
    concepts: Set[str] = field(default_factory=set)
    roles: Set[str] = field(default_factory=set)
    fresh_names: Dict[ConceptExpr, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return (len(self.atomic) + len(self.conjunctions) + len(self.existential_intro)
                + len(self.existential_elim) + len(self.role_subs) + len(self.role_chains))

    @property
    def has_role_axioms(self) -> bool:
        return bool(self.role_subs or self.role_chains)

    def merge(self, other: "NormalizedAxiomSet") -> None:
        self.atomic.extend(other.atomic)
        self.conjunctions.extend(other.conjunctions)
        self.existential_intro.extend(other.existential_intro)
        self.existential_elim.extend(other.existential_elim)
        self.role_subs.extend(other.role_subs)
        self.role_chains.extend(other.role_chains)
        self.concepts |= other.concepts
        self.roles |= other.roles
        self.fresh_names.update(other.fresh_names)


# ---------- Normalizer ----------

class Normalizer:
    """Stateful normalizer; fresh names persist across calls so an index can
    be extended incrementally with further axioms."""

    def __init__(self):
        self._concept_counter = 0
        self._role_counter = 0
        self._names: Dict[ConceptExpr, str] = {}
        # directions already emitted per fresh name: "left" = C ⊑ N, "right" = N ⊑ C
        self._emitted: Set[Tuple[str, str]] = set()
        self._chain_names: Dict[Tuple[str, ...], str] = {}

    def fresh_concept(self) -> str:
        self._concept_counter += 1
        return f"{FRESH_CONCEPT_PREFIX}{self._concept_counter}"

    def _fresh_role(self) -> str:
        self._role_counter += 1
        return f"{FRESH_ROLE_PREFIX}{self._role_counter}"

    def normalize_axioms(self, axioms: Iterable[Axiom]) -> NormalizedAxiomSet:
        out = NormalizedAxiomSet()
        queue: Deque[Tuple[ConceptExpr, ConceptExpr]] = deque()
        for axiom in axioms:
            if isinstance(axiom, GCI):
                queue.append((canonicalize(axiom.lhs), canonicalize(axiom.rhs)))
            elif isinstance(axiom, RoleInclusion):
                self._normalize_role_inclusion(axiom, out)

        while queue:
            lhs, rhs = queue.popleft()
            self._normalize_gci(lhs, rhs, out, queue)
        return out

    # -- role axioms --

    def _normalize_role_inclusion(self, axiom: RoleInclusion, out: NormalizedAxiomSet) -> None:
        roles = list(axiom.chain.roles)
        out.roles.update(roles)
        out.roles.add(axiom.sup)
        if len(roles) == 1:
            out.role_subs.append(RoleSub(roles[0], axiom.sup))
            return
        # r1 ∘ r2 ∘ ... ∘ rn ⊑ s  →  r1 ∘ r2 ⊑ u1, u1 ∘ r3 ⊑ u2, ..., u(n-2) ∘ rn ⊑ s
        current = roles[0]
        for index, role in enumerate(roles[1:], start=1):
            if index == len(roles) - 1:
                out.role_chains.append(RoleComposition(current, role, axiom.sup))
            else:
                prefix = tuple(roles[:index + 1])
                name = self._chain_names.get(prefix)
                if name is None:
                    name = self._fresh_role()
                    self._chain_names[prefix] = name
                    out.role_chains.append(RoleComposition(current, role, name))
                    out.roles.add(name)
                current = name

    # -- concept axioms --

    def _name_for(self, expr: ConceptExpr, direction: str,
                  out: NormalizedAxiomSet, queue: Deque) -> str:
        """Fresh name N for a complex expression; schedules C ⊑ N (left) or N ⊑ C (right)"""
        name = self._names.get(expr)
        if name is None:
            name = self.fresh_concept()
            self._names[expr] = name
            out.fresh_names[expr] = name
        if (name, direction) not in self._emitted:
            self._emitted.add((name, direction))
            if direction == "left":
                queue.append((expr, Atom(name)))
            else:
                queue.append((Atom(name), expr))
        return name

    def _basic(self, expr: ConceptExpr, out: NormalizedAxiomSet) -> str:
        key = concept_key(expr)
        if not isinstance(expr, Bottom):
            out.concepts.add(key)
        return key

    def _normalize_gci(self, lhs: ConceptExpr, rhs: ConceptExpr,
                       out: NormalizedAxiomSet, queue: Deque) -> None:
        if isinstance(lhs, Bottom) or isinstance(rhs, Top):
            return

        # B ⊑ C ⊓ D  →  B ⊑ C, B ⊑ D
        if isinstance(rhs, Conjunction):
            for member in rhs.members:
                queue.append((lhs, member))
            return

        rhs_simple = is_basic(rhs) or isinstance(rhs, Bottom)

        if is_basic(lhs):
            if rhs_simple:
                out.atomic.append(AtomicInclusion(self._basic(lhs, out), self._basic(rhs, out)))
                return
            # rhs is an existential here
            filler = rhs.filler
            if isinstance(filler, Bottom):
                out.atomic.append(AtomicInclusion(self._basic(lhs, out), BOTTOM_KEY))
                return
            if is_basic(filler):
                filler_key = self._basic(filler, out)
            else:
                filler_key = self._name_for(filler, "right", out, queue)
                out.concepts.add(filler_key)
            out.roles.add(rhs.role)
            out.existential_intro.append(ExistentialIntro(self._basic(lhs, out), rhs.role, filler_key))
            return

        # complex left side: make the right side basic first
        if rhs_simple:
            sup = self._basic(rhs, out)
        else:
            sup = self._name_for(rhs, "right", out, queue)
            out.concepts.add(sup)

        if isinstance(lhs, Existential):
            filler = lhs.filler
            if isinstance(filler, Bottom):
                return
            if is_basic(filler):
                filler_key = self._basic(filler, out)
            else:
                filler_key = self._name_for(filler, "left", out, queue)
                out.concepts.add(filler_key)
            out.roles.add(lhs.role)
            out.existential_elim.append(ExistentialElim(lhs.role, filler_key, sup))
            return

        # conjunction on the left
        keys = []
        for member in lhs.members:
            if is_basic(member):
                keys.append(self._basic(member, out))
            else:
                key = self._name_for(member, "left", out, queue)
                out.concepts.add(key)
                keys.append(key)
        # binarize A1 ⊓ A2 ⊓ ... ⊓ An ⊑ B
        while len(keys) > 2:
            pair = (keys[0], keys[1])
            joined = self._pair_name(pair, out)
            keys = [joined] + keys[2:]
        out.conjunctions.append(ConjunctionInclusion(keys[0], keys[1], sup))

    def _pair_name(self, pair: Tuple[str, str], out: NormalizedAxiomSet) -> str:
        expr = canonicalize(Conjunction((_key_expr(pair[0]), _key_expr(pair[1]))))
        name = self._names.get(expr)
        if name is None:
            name = self.fresh_concept()
            self._names[expr] = name
            out.fresh_names[expr] = name
        if (name, "left") not in self._emitted:
            self._emitted.add((name, "left"))
            out.conjunctions.append(ConjunctionInclusion(pair[0], pair[1], name))
        out.concepts.add(name)
        return name


def _key_expr(key: str) -> ConceptExpr:
    if key == TOP_KEY:
        return TOP
    if is_nominal_key(key):
        return Nominal(key[1:-1])
    return Atom(key)


def normalize(ont: Ontology, extra: Optional[List[Axiom]] = None,
              normalizer: Optional[Normalizer] = None) -> NormalizedAxiomSet:
    """Normalize the ontology's CBox plus extra axioms"""
    extra = list(extra or [])
    for axiom in extra:
        if isinstance(axiom, GCI):
            for side in (axiom.lhs, axiom.rhs):
                fresh = frozenset(n for n in side.concept_names if is_fresh_key(n))
                ont.check_symbols(side, extra_concepts=fresh)
        elif isinstance(axiom, RoleInclusion):
            unknown = [r for r in (*axiom.chain.roles, axiom.sup) if r not in ont.role_names]
            if unknown:
                raise UnknownSymbol(f"undeclared role(s): {', '.join(unknown)}",
                                    details={"roles": unknown})

    normalizer = normalizer or Normalizer()
    if ont.assertions:
        logger.warning(f"{len(ont.assertions)} ABox assertion(s) ignored by saturation")
    nset = normalizer.normalize_axioms(ont.gcis + ont.role_axioms + extra)
    nset.concepts.add(TOP_KEY)
    nset.concepts.update(ont.concept_names)
    nset.concepts.update("{" + i + "}" for i in ont.individual_names)
    nset.roles.update(ont.role_names)
    logger.debug(f"Normalized {len(ont.axioms) + len(extra)} axioms into {len(nset)} normal-form axioms")
    return nset
