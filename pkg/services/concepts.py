"""
Concept and axiom abstract syntax

EL++ concept descriptions (no concrete domains), CBox/ABox axioms, component
declarations and the Ontology container. Purely syntactic: no reasoning here.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Tuple, Union

from errors import DuplicateComponent, UnknownSymbol

logger = logging.getLogger(__name__)


# ---------- Concept expressions ----------

class ConceptExpr:
    """Base class of concept descriptions.

    Equality and hashing go through the rendered concrete syntax, which is
    injective for this grammar. The same text is the canonical ordering key.
    """

    __slots__ = ()

    @cached_property
    def text(self) -> str:
        return self._render()

    def _render(self) -> str:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.text == other.text

    def __hash__(self) -> int:
        return hash(self.text)

    def __lt__(self, other: "ConceptExpr") -> bool:
        return self.text < other.text

    def __str__(self) -> str:
        return self.text

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.text}>"

    @cached_property
    def concept_names(self) -> FrozenSet[str]:
        return frozenset(n for n, kind in self._symbols() if kind == "concept")

    @cached_property
    def role_names(self) -> FrozenSet[str]:
        return frozenset(n for n, kind in self._symbols() if kind == "role")

    @cached_property
    def individual_names(self) -> FrozenSet[str]:
        return frozenset(n for n, kind in self._symbols() if kind == "individual")

    def _symbols(self) -> Iterator[Tuple[str, str]]:
        return iter(())

    @property
    def has_nominal(self) -> bool:
        return bool(self.individual_names)


@dataclass(frozen=True, eq=False)
class Top(ConceptExpr):
    def _render(self) -> str:
        return "Top"


@dataclass(frozen=True, eq=False)
class Bottom(ConceptExpr):
    def _render(self) -> str:
        return "Bottom"


@dataclass(frozen=True, eq=False)
class Atom(ConceptExpr):
    name: str

    def _render(self) -> str:
        return self.name

    def _symbols(self):
        yield self.name, "concept"


@dataclass(frozen=True, eq=False)
class Nominal(ConceptExpr):
    individual: str

    def _render(self) -> str:
        return "{" + self.individual + "}"

    def _symbols(self):
        yield self.individual, "individual"


@dataclass(frozen=True, eq=False)
class Conjunction(ConceptExpr):
    members: Tuple[ConceptExpr, ...]

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("a conjunction needs at least two members")
        object.__setattr__(self, "members", tuple(self.members))

    def _render(self) -> str:
        return "and(" + ", ".join(m.text for m in self.members) + ")"

    def _symbols(self):
        for member in self.members:
            yield from member._symbols()


@dataclass(frozen=True, eq=False)
class Existential(ConceptExpr):
    role: str
    filler: ConceptExpr

    def _render(self) -> str:
        return f"some({self.role}, {self.filler.text})"

    def _symbols(self):
        yield self.role, "role"
        yield from self.filler._symbols()


TOP = Top()
BOTTOM = Bottom()

BASIC_TYPES = (Top, Atom, Nominal)


def is_basic(expr: ConceptExpr) -> bool:
    """Top, concept name or nominal"""
    return isinstance(expr, BASIC_TYPES)


# ---------- Axioms ----------

@dataclass(frozen=True)
class RoleChain:
    roles: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "roles", tuple(self.roles))
        if not self.roles:
            raise ValueError("a role chain needs at least one role")

    def __str__(self) -> str:
        return " o ".join(self.roles)


@dataclass(frozen=True)
class GCI:
    lhs: ConceptExpr
    rhs: ConceptExpr


@dataclass(frozen=True)
class RoleInclusion:
    chain: RoleChain
    sup: str


@dataclass(frozen=True)
class ConceptAssertion:
    concept: ConceptExpr
    individual: str


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    subject: str
    object: str


Axiom = Union[GCI, RoleInclusion, ConceptAssertion, RoleAssertion]


@dataclass(frozen=True)
class ComponentDecl:
    role: str
    top_concept: str


# ---------- Ontology ----------

@dataclass(eq=False)
class Ontology:
    """The reasoning context CB: CBox axioms, ABox assertions (kept, not
    reasoned over), component declarations and symbol tables.

    Identity-hashed so reasoner state can be cached per ontology object.
    """

    axioms: List[Axiom] = field(default_factory=list)
    components: List[ComponentDecl] = field(default_factory=list)
    concept_names: FrozenSet[str] = frozenset()
    role_names: FrozenSet[str] = frozenset()
    individual_names: FrozenSet[str] = frozenset()
    # warnings attached by the loader
    diagnostics: list = field(default_factory=list)

    @classmethod
    def build(cls, axioms: Iterable[Axiom], components: Iterable[ComponentDecl] = ()) -> "Ontology":
        """Create an ontology whose symbol tables are collected from use"""
        axioms = list(axioms)
        components = list(components)

        concepts, roles, individuals = set(), set(), set()

        def collect(expr: ConceptExpr):
            concepts.update(expr.concept_names)
            roles.update(expr.role_names)
            individuals.update(expr.individual_names)

        for axiom in axioms:
            if isinstance(axiom, GCI):
                collect(axiom.lhs)
                collect(axiom.rhs)
            elif isinstance(axiom, RoleInclusion):
                roles.update(axiom.chain.roles)
                roles.add(axiom.sup)
            elif isinstance(axiom, ConceptAssertion):
                collect(axiom.concept)
                individuals.add(axiom.individual)
            elif isinstance(axiom, RoleAssertion):
                roles.add(axiom.role)
                individuals.update((axiom.subject, axiom.object))

        seen_roles = set()
        for decl in components:
            if decl.role in seen_roles:
                raise DuplicateComponent(
                    f"component role '{decl.role}' declared twice",
                    details={"role": decl.role},
                )
            seen_roles.add(decl.role)
            roles.add(decl.role)
            concepts.add(decl.top_concept)

        ontology = cls(
            axioms=axioms,
            components=components,
            concept_names=frozenset(concepts),
            role_names=frozenset(roles),
            individual_names=frozenset(individuals),
        )
        logger.info(
            f"Ontology built: {len(axioms)} axioms, {len(components)} components, "
            f"{len(concepts)} concept names, {len(roles)} role names"
        )
        return ontology

    @property
    def gcis(self) -> List[GCI]:
        return [a for a in self.axioms if isinstance(a, GCI)]

    @property
    def role_axioms(self) -> List[RoleInclusion]:
        return [a for a in self.axioms if isinstance(a, RoleInclusion)]

    @property
    def assertions(self) -> List[Axiom]:
        return [a for a in self.axioms if isinstance(a, (ConceptAssertion, RoleAssertion))]

    @property
    def component_roles(self) -> List[str]:
        return [decl.role for decl in self.components]

    def component(self, role: str) -> ComponentDecl:
        for decl in self.components:
            if decl.role == role:
                return decl
        raise UnknownSymbol(f"'{role}' is not a declared component role", details={"role": role})

    def is_component_role(self, role: str) -> bool:
        return any(decl.role == role for decl in self.components)

    def check_symbols(self, expr: ConceptExpr, extra_concepts: FrozenSet[str] = frozenset()) -> None:
        """Raise UnknownSymbol if expr mentions an undeclared identifier"""
        missing: Dict[str, List[str]] = {}
        unknown_concepts = expr.concept_names - self.concept_names - extra_concepts
        unknown_roles = expr.role_names - self.role_names
        unknown_individuals = expr.individual_names - self.individual_names
        if unknown_concepts:
            missing["concepts"] = sorted(unknown_concepts)
        if unknown_roles:
            missing["roles"] = sorted(unknown_roles)
        if unknown_individuals:
            missing["individuals"] = sorted(unknown_individuals)
        if missing:
            names = ", ".join(n for group in missing.values() for n in group)
            raise UnknownSymbol(f"undeclared identifier(s): {names}", details=missing)


# ---------- Canonical form and measures ----------

def canonicalize(expr: ConceptExpr) -> ConceptExpr:
    """Flatten, deduplicate and sort conjunctions; ⊥ absorbs, ⊤ drops out"""
    if isinstance(expr, Existential):
        filler = canonicalize(expr.filler)
        if filler is expr.filler:
            return expr
        return Existential(expr.role, filler)
    if not isinstance(expr, Conjunction):
        return expr

    members: Dict[str, ConceptExpr] = {}
    for member in expr.members:
        member = canonicalize(member)
        if isinstance(member, Bottom):
            return BOTTOM
        if isinstance(member, Top):
            continue
        flat = member.members if isinstance(member, Conjunction) else (member,)
        for m in flat:
            members.setdefault(m.text, m)

    if not members:
        return TOP
    if len(members) == 1:
        return next(iter(members.values()))
    return Conjunction(tuple(members[key] for key in sorted(members)))


def conjoin(*exprs: ConceptExpr) -> ConceptExpr:
    """Canonical conjunction of the arguments (⊤ for none)"""
    if not exprs:
        return TOP
    if len(exprs) == 1:
        return canonicalize(exprs[0])
    return canonicalize(Conjunction(tuple(exprs)))


def conjuncts(expr: ConceptExpr) -> Tuple[ConceptExpr, ...]:
    """Top-level conjuncts; ⊤ has none"""
    if isinstance(expr, Top):
        return ()
    if isinstance(expr, Conjunction):
        return expr.members
    return (expr,)


def syntactic_length(expr: ConceptExpr) -> int:
    """Number of atomic concept occurrences; a nominal counts as one"""
    if isinstance(expr, (Atom, Nominal)):
        return 1
    if isinstance(expr, Conjunction):
        return sum(syntactic_length(m) for m in expr.members)
    if isinstance(expr, Existential):
        return syntactic_length(expr.filler)
    return 0
