"""
Non-standard inferences: reduction, least common subsumer, semantic difference,
Rest and Miss.

All services work on the nominal-free fragment built from Top, concept names,
existential restrictions and conjunctions, relative to an ontology whose
reasoner is taken from the registry.
"""

import logging
from typing import List, Tuple

import config
from errors import NominalUnsupported, PreconditionViolated, ReconstructionFailed
from services.concepts import (
    Atom, Bottom, ConceptExpr, Conjunction, Existential, Ontology, canonicalize, conjoin, conjuncts,
)
from services.reasoner import Reasoner, reasoner_registry

logger = logging.getLogger(__name__)


def _require_simple(*exprs: ConceptExpr) -> None:
    for expr in exprs:
        if expr.has_nominal:
            raise NominalUnsupported(
                f"nominals are not supported by non-standard inferences: {expr}",
                details={"expression": expr.text},
            )


def _reduce(expr: ConceptExpr, reasoner: Reasoner) -> ConceptExpr:
    expr = canonicalize(expr)
    if isinstance(expr, Existential):
        return Existential(expr.role, _reduce(expr.filler, reasoner))
    if not isinstance(expr, Conjunction):
        return expr

    members = conjuncts(conjoin(*(_reduce(m, reasoner) for m in expr.members)))
    if len(members) < 2:
        return conjoin(*members)

    survivors = [
        x for x in members
        if not any(y is not x and reasoner.strictly_subsumed(y, x) for y in members)
    ]
    # members arrive sorted by text, so the first of an equivalence class is the smallest
    kept: List[ConceptExpr] = []
    for x in survivors:
        if not any(reasoner.equivalent(x, k) for k in kept):
            kept.append(x)
    return conjoin(*kept)


def reduce(c: ConceptExpr, ont: Ontology) -> ConceptExpr:
    """Drop conjuncts entailed by a sibling conjunct, recursively"""
    return _reduce(c, reasoner_registry.get(ont))


def _lcs(c: ConceptExpr, d: ConceptExpr, reasoner: Reasoner) -> ConceptExpr:
    if isinstance(c, Bottom):
        return d
    if isinstance(d, Bottom) or c == d:
        return c

    common = set(reasoner.named_subsumers(c)) & set(reasoner.named_subsumers(d))
    parts: List[ConceptExpr] = [Atom(name) for name in reasoner.minimal_names(common)]

    c_exists = [x for x in conjuncts(c) if isinstance(x, Existential)]
    d_exists = [x for x in conjuncts(d) if isinstance(x, Existential)]
    for left in c_exists:
        for right in d_exists:
            if left.role == right.role:
                filler = _lcs(_reduce(left.filler, reasoner), _reduce(right.filler, reasoner), reasoner)
                parts.append(Existential(left.role, filler))
    return _reduce(conjoin(*parts), reasoner)


def lcs(c: ConceptExpr, d: ConceptExpr, ont: Ontology) -> ConceptExpr:
    """Structural least common subsumer of c and d.

    Atom part: minimal named common subsumers of the two descriptions.
    Existential part: ∃r.lcs(c', d') for every pair of r-restrictions.
    """
    _require_simple(c, d)
    reasoner = reasoner_registry.get(ont)
    return _lcs(_reduce(c, reasoner), _reduce(d, reasoner), reasoner)


def _difference(c: ConceptExpr, d: ConceptExpr, reasoner: Reasoner) -> ConceptExpr:
    if not reasoner.subsumes(c, d):
        raise PreconditionViolated(
            f"semantic difference needs {c} ⊑ {d}",
            details={"minuend": c.text, "subtrahend": d.text},
        )
    kept = [x for x in conjuncts(c) if not reasoner.subsumes(d, x)]
    result = conjoin(*kept)
    if config.CHECK_RECONSTRUCTION and not reasoner.equivalent(conjoin(result, d), c):
        raise ReconstructionFailed(
            f"({result}) ⊓ ({d}) is not equivalent to {c}",
            details={"minuend": c.text, "subtrahend": d.text, "difference": result.text},
        )
    return result


def semantic_difference(c: ConceptExpr, d: ConceptExpr, ont: Ontology) -> ConceptExpr:
    """c ⊖ d: the conjuncts of c not already implied by d (⊤ if none)"""
    _require_simple(c, d)
    reasoner = reasoner_registry.get(ont)
    return _difference(_reduce(c, reasoner), _reduce(d, reasoner), reasoner)


def rest_and_miss(d_proj: ConceptExpr, o_proj: ConceptExpr,
                  ont: Ontology) -> Tuple[ConceptExpr, ConceptExpr, ConceptExpr]:
    """(lcs, rest, miss) of an offer projection against a demand projection"""
    _require_simple(d_proj, o_proj)
    reasoner = reasoner_registry.get(ont)
    d_proj, o_proj = _reduce(d_proj, reasoner), _reduce(o_proj, reasoner)
    common = _lcs(d_proj, o_proj, reasoner)
    return common, _difference(d_proj, common, reasoner), _difference(o_proj, common, reasoner)


def rest(d_proj: ConceptExpr, o_proj: ConceptExpr, ont: Ontology) -> ConceptExpr:
    """Demand-side residue: D ⊖ lcs(D, O)"""
    return rest_and_miss(d_proj, o_proj, ont)[1]


def miss(d_proj: ConceptExpr, o_proj: ConceptExpr, ont: Ontology) -> ConceptExpr:
    """Offer-side residue: O ⊖ lcs(D, O)"""
    return rest_and_miss(d_proj, o_proj, ont)[2]
