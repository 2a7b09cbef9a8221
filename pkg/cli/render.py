"""
Output rendering

Everything printed is a pure function of its input: fixed field order, sorted
where the model has no inherent order, no timestamps.
"""

import json
from typing import Iterable, List, Sequence, Tuple

from schemas import ComponentEvaluation, PartyRecord, RankingResult
from services.concepts import (
    ConceptAssertion, ConceptExpr, Existential, GCI, Ontology, RoleAssertion, RoleInclusion, Top, conjoin,
)
from utils import format_rational

RANKING_HEADER = "rank\tname\tscore"
EVALUATION_HEADER = "component\tzone\tlcs\trest\tmiss\trest_length\tmiss_length"


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def render_expr(expr: ConceptExpr) -> str:
    return expr.text


def render_ranking(result: RankingResult, format: str = "tsv", explain: bool = False) -> str:
    if format == "json":
        include = {"demand", "ranked", "excluded"}
        if explain:
            include |= {"trace", "component_scores", "pairwise"}
        return _dump(result.model_dump(mode="json", include=include, exclude_none=True))

    lines = [RANKING_HEADER]
    lines.extend(f"{entry.rank}\t{entry.name}\t{format_rational(entry.score)}" for entry in result.ranked)
    lines.extend(f"# excluded: {name}" for name in result.excluded)
    if explain:
        for step in result.trace:
            evidence = ""
            if step.first_zone is not None:
                evidence = (f"\t{step.first_zone}/{step.second_zone}"
                            f"\trest={step.first_rest}/{step.second_rest}"
                            f"\tmiss={step.first_miss}/{step.second_miss}")
            lines.append(f"# phi\t{step.role}\t{step.first}\t{step.second}\t{step.phi}{evidence}")
    return "\n".join(lines) + "\n"


def render_evaluations(evaluations: Sequence[ComponentEvaluation], format: str = "tsv") -> str:
    if format == "json":
        return _dump([evaluation.model_dump(mode="json") for evaluation in evaluations])
    lines = [EVALUATION_HEADER]
    for e in evaluations:
        lines.append(f"{e.role}\t{e.zone}\t{e.lcs}\t{e.rest}\t{e.miss}\t{e.rest_length}\t{e.miss_length}")
    return "\n".join(lines) + "\n"


def render_hierarchy(pairs: Iterable[Tuple[str, str]]) -> str:
    return "".join(f"sub {sub} {sup}\n" for sub, sup in pairs)


def render_ontology(ont: Ontology) -> str:
    """Concrete syntax that parses back to the same axioms and components"""
    lines: List[str] = []
    for axiom in ont.axioms:
        if isinstance(axiom, GCI):
            lines.append(f"sub {axiom.lhs} {axiom.rhs}")
        elif isinstance(axiom, RoleInclusion):
            if len(axiom.chain.roles) == 1:
                lines.append(f"rsub {axiom.chain.roles[0]} {axiom.sup}")
            else:
                lines.append(f"rchain {' '.join(axiom.chain.roles)} -> {axiom.sup}")
        elif isinstance(axiom, ConceptAssertion):
            lines.append(f"instance {axiom.concept} {axiom.individual}")
        elif isinstance(axiom, RoleAssertion):
            lines.append(f"related {axiom.role} {axiom.subject} {axiom.object}")
    lines.extend(f"component {decl.role} {decl.top_concept}" for decl in ont.components)
    return "\n".join(lines) + "\n"


def render_party(party: PartyRecord, ont: Ontology) -> str:
    parts = [Existential(role, party.filler(role)) for role in ont.component_roles
             if not isinstance(party.filler(role), Top)]
    if not parts and ont.component_roles:
        parts = [Existential(ont.component_roles[0], party.filler(ont.component_roles[0]))]
    return f"{party.kind} {party.name} = {conjoin(*parts)}"


def render_parties(parties: Iterable[PartyRecord], ont: Ontology) -> str:
    return "".join(render_party(party, ont) + "\n" for party in parties)
