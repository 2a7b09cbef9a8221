"""
Line-oriented concrete syntax

    # comment
    sub C D                  C ⊑ D
    equiv C D                C ⊑ D and D ⊑ C
    rsub r s                 r ⊑ s
    rchain r1 r2 ... -> s    r1 ∘ r2 ∘ ... ⊑ s
    component r E            component role r with top concept E
    instance C a             C(a), kept but not reasoned over
    related r a b            r(a, b), kept but not reasoned over

    offer NAME = C           parties files
    demand NAME = C

    ROLE WEIGHT              weights files

Concept expressions: Top | Bottom | NAME | {IND} | and(C, C, ...) | some(r, C)
"""

import logging
import re
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional

from errors import DuplicateComponent, DuplicateOfferName, InvalidWeight, MatchmakerError, ParseError, UnknownSymbol
from schemas import Diagnostic, PartyRecord, SourceDocument, WeightTable
from services.concepts import (
    BOTTOM, TOP, Atom, Axiom, ComponentDecl, ConceptAssertion, ConceptExpr, Conjunction, Existential, GCI,
    Nominal, Ontology, RoleAssertion, RoleChain, RoleInclusion,
)
from services.matchmaker import build_party
from utils import parse_weight

logger = logging.getLogger(__name__)

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

_TOKEN = re.compile(r"\s*(?:(?P<arrow>->)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<punct>[(),{}=]))")


class Token(NamedTuple):
    kind: str
    value: str
    column: int


def tokenize(text: str, line: int = 1) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    end = len(text.rstrip())
    while position < end:
        match = _TOKEN.match(text, position)
        if not match or match.end() == position:
            column = position + len(text[position:]) - len(text[position:].lstrip()) + 1
            raise ParseError(f"unexpected character '{text[column - 1]}'", line=line, column=column)
        kind = match.lastgroup
        value = match.group(kind)
        tokens.append(Token(kind, value, match.start(kind) + 1))
        position = match.end()
    return tokens


class _LineParser:
    """Recursive-descent parser over the tokens of one statement"""

    def __init__(self, tokens: List[Token], line: int, length: int):
        self.tokens = tokens
        self.line = line
        self.index = 0
        self.end_column = length + 1

    def peek(self, offset: int = 0) -> Optional[Token]:
        position = self.index + offset
        return self.tokens[position] if position < len(self.tokens) else None

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        column = token.column if token else self.end_column
        return ParseError(message, line=self.line, column=column)

    def next(self, what: str) -> Token:
        token = self.peek()
        if token is None:
            raise self.error(f"expected {what}, found end of line")
        self.index += 1
        return token

    def expect(self, value: str) -> Token:
        token = self.next(f"'{value}'")
        if token.value != value:
            raise self.error(f"expected '{value}', found '{token.value}'", token)
        return token

    def identifier(self, what: str) -> str:
        token = self.next(what)
        if token.kind != "ident":
            raise self.error(f"expected {what}, found '{token.value}'", token)
        return token.value

    def at_end(self) -> bool:
        return self.index >= len(self.tokens)

    def finish(self) -> None:
        if not self.at_end():
            token = self.peek()
            raise self.error(f"unexpected '{token.value}' after statement", token)

    def concept(self) -> ConceptExpr:
        token = self.next("a concept expression")
        if token.kind == "punct" and token.value == "{":
            individual = self.identifier("an individual name")
            self.expect("}")
            return Nominal(individual)
        if token.kind != "ident":
            raise self.error(f"expected a concept expression, found '{token.value}'", token)

        following = self.peek()
        opens = following is not None and following.value == "("
        if token.value == "and" and opens:
            self.index += 1
            members = [self.concept()]
            while self.peek() is not None and self.peek().value == ",":
                self.index += 1
                members.append(self.concept())
            self.expect(")")
            if len(members) < 2:
                raise self.error("and(...) needs at least two members", token)
            return Conjunction(tuple(members))
        if token.value == "some" and opens:
            self.index += 1
            role = self.identifier("a role name")
            self.expect(",")
            filler = self.concept()
            self.expect(")")
            return Existential(role, filler)
        if token.value == "Top":
            return TOP
        if token.value == "Bottom":
            return BOTTOM
        return Atom(token.value)


def _statements(doc: SourceDocument):
    """(line number, text, tokens) of every non-blank, non-comment line"""
    for number, text in enumerate(doc.lines(), start=1):
        stripped = text.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, text, tokenize(text, number)


def parse_concept(text: str, ont: Optional[Ontology] = None, line: int = 1) -> ConceptExpr:
    """Parse one concept expression; with an ontology, its symbols must be declared"""
    parser = _LineParser(tokenize(text, line), line, len(text))
    expr = parser.concept()
    parser.finish()
    if ont is not None:
        try:
            ont.check_symbols(expr)
        except MatchmakerError as e:
            raise e.at(line, 1)
    return expr


def parse_ontology(doc: SourceDocument) -> Ontology:
    axioms: List[Axiom] = []
    components: List[ComponentDecl] = []
    component_lines: Dict[str, int] = {}
    warnings: List[Diagnostic] = []

    for line, text, tokens in _statements(doc):
        parser = _LineParser(tokens, line, len(text))
        keyword = parser.identifier("a statement keyword")

        if keyword == "sub":
            axioms.append(GCI(parser.concept(), parser.concept()))
        elif keyword == "equiv":
            left, right = parser.concept(), parser.concept()
            axioms.extend((GCI(left, right), GCI(right, left)))
        elif keyword == "rsub":
            axioms.append(RoleInclusion(RoleChain((parser.identifier("a role name"),)),
                                        parser.identifier("a role name")))
        elif keyword == "rchain":
            roles = [parser.identifier("a role name"), parser.identifier("a role name")]
            while parser.peek() is not None and parser.peek().kind == "ident":
                roles.append(parser.identifier("a role name"))
            parser.expect("->")
            axioms.append(RoleInclusion(RoleChain(tuple(roles)), parser.identifier("a role name")))
        elif keyword == "component":
            role_token = parser.peek()
            role = parser.identifier("a role name")
            top_concept = parser.identifier("a concept name")
            if role in component_lines:
                raise DuplicateComponent(
                    f"component role '{role}' already declared on line {component_lines[role]}",
                    details={"role": role}, line=line, column=role_token.column,
                )
            component_lines[role] = line
            components.append(ComponentDecl(role, top_concept))
        elif keyword == "instance":
            axioms.append(ConceptAssertion(parser.concept(), parser.identifier("an individual name")))
            warnings.append(_abox_warning(line, "instance"))
        elif keyword == "related":
            axioms.append(RoleAssertion(parser.identifier("a role name"),
                                        parser.identifier("an individual name"),
                                        parser.identifier("an individual name")))
            warnings.append(_abox_warning(line, "related"))
        else:
            raise ParseError(f"unknown statement '{keyword}'", line=line, column=tokens[0].column)
        parser.finish()

    ontology = Ontology.build(axioms, components)
    ontology.diagnostics.extend(warnings)
    logger.info(f"Parsed ontology {doc.path or '<text>'}")
    return ontology


def _abox_warning(line: int, keyword: str) -> Diagnostic:
    return Diagnostic(severity="warning", line=line, column=1, code="ABOX_IGNORED",
                      message=f"'{keyword}' assertion kept but ignored by reasoning")


def parse_parties(doc: SourceDocument, ont: Ontology) -> List[PartyRecord]:
    parties: List[PartyRecord] = []
    seen: Dict[str, int] = {}

    for line, text, tokens in _statements(doc):
        parser = _LineParser(tokens, line, len(text))
        keyword_token = parser.peek()
        kind = parser.identifier("'offer' or 'demand'")
        if kind not in ("offer", "demand"):
            raise ParseError(f"expected 'offer' or 'demand', found '{kind}'",
                             line=line, column=keyword_token.column)
        name_token = parser.peek()
        name = parser.identifier("a party name")
        parser.expect("=")
        expr_token = parser.peek()
        description = parser.concept()
        parser.finish()

        if name in seen:
            raise DuplicateOfferName(f"'{name}' already defined on line {seen[name]}",
                                     details={"name": name}, line=line, column=name_token.column)
        seen[name] = line
        try:
            parties.append(build_party(name, kind, description, ont, line=line))
        except MatchmakerError as e:
            raise e.at(line, expr_token.column)

    logger.info(f"Parsed {len(parties)} parties from {doc.path or '<text>'}")
    return parties


def parse_weights(doc: SourceDocument, ont: Ontology) -> WeightTable:
    weights: Dict[str, Fraction] = {}
    for number, text in enumerate(doc.lines(), start=1):
        stripped = text.strip()
        if not stripped or stripped.startswith("#"):
            continue
        column = len(text) - len(text.lstrip()) + 1
        parts = stripped.split()
        if len(parts) != 2:
            raise ParseError("expected 'ROLE WEIGHT'", line=number, column=column)
        role, raw = parts
        if not IDENTIFIER.match(role):
            raise ParseError(f"invalid role name '{role}'", line=number, column=column)
        if not ont.is_component_role(role):
            raise UnknownSymbol(f"'{role}' is not a declared component role",
                                details={"role": role}, line=number, column=column)
        if role in weights:
            raise InvalidWeight(f"weight for '{role}' given twice",
                                details={"role": role}, line=number, column=column)
        weight_column = text.index(raw, column - 1 + len(role)) + 1
        try:
            weights[role] = parse_weight(raw)
        except MatchmakerError as e:
            raise e.at(number, weight_column)
    return WeightTable(weights=weights)

