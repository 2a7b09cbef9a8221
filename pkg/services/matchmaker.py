"""
Semantic matchmaking

Offers and demands are conjunctions ∃R1.C1 ⊓ ... ⊓ ∃Rn.Cn over the declared
component roles. Per component, two offers are ordered by the zone of their
projection relative to the demand projection, then by their Rest and Miss
(φ). Offers are ranked by relative concordance: every unordered pair votes
±v_k on every component k, and the votes are summed per offer.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import config
from errors import (
    ComponentRangeViolated, DuplicateComponent, DuplicateOfferName, NominalUnsupported,
    NonComponentConjunct,
)
from schemas import (
    ZONE_PRECEDENCE, ComponentEvaluation, ComponentTrace, PairwiseScore, PartyRecord,
    RankedOffer, RankingResult, WeightTable, Zone,
)
from services.concepts import (
    TOP, Atom, ConceptExpr, Existential, Ontology, canonicalize, conjoin, conjuncts, syntactic_length,
)
from services.inference import rest_and_miss, reduce
from services.reasoner import reasoner_registry

logger = logging.getLogger(__name__)

# comparator(role, first, second) -> -1 | 0 | 1
Comparator = Callable[[str, PartyRecord, PartyRecord], int]


# ---------- Component form ----------

def to_component_form(c: ConceptExpr, ont: Ontology) -> Dict[str, ConceptExpr]:
    """Split a description into one reduced filler per declared component.

    Components the description does not mention get Top. A filler is out of
    range only when it cannot belong to its component at all, that is when
    filler ⊓ E is unsatisfiable for the component's top concept E.
    """
    c = canonicalize(c)
    ont.check_symbols(c)
    reasoner = reasoner_registry.get(ont)

    found: Dict[str, ConceptExpr] = {}
    for conjunct in conjuncts(c):
        if not isinstance(conjunct, Existential) or not ont.is_component_role(conjunct.role):
            raise NonComponentConjunct(
                f"'{conjunct}' is not an existential restriction over a component role",
                details={"conjunct": conjunct.text},
            )
        if conjunct.role in found:
            raise DuplicateComponent(
                f"component role '{conjunct.role}' used twice in one description",
                details={"role": conjunct.role},
            )
        found[conjunct.role] = conjunct.filler

    fillers: Dict[str, ConceptExpr] = {}
    for decl in ont.components:
        filler = found.get(decl.role, TOP)
        if filler.has_nominal:
            raise NominalUnsupported(
                f"nominal in the '{decl.role}' component: {filler}",
                details={"role": decl.role, "filler": filler.text},
            )
        filler = reduce(filler, ont)
        if filler != TOP and not reasoner.satisfiable(conjoin(filler, Atom(decl.top_concept))):
            raise ComponentRangeViolated(
                f"'{filler}' cannot belong to component {decl.top_concept}",
                details={"role": decl.role, "filler": filler.text, "top_concept": decl.top_concept},
            )
        fillers[decl.role] = filler
    return fillers


def build_party(name: str, kind: str, description: ConceptExpr, ont: Ontology,
                line: Optional[int] = None) -> PartyRecord:
    return PartyRecord(name=name, kind=kind, fillers=to_component_form(description, ont), line=line)


def component_existing(party: PartyRecord, role: str, ont: Ontology) -> bool:
    """True iff the projection on role is not equivalent to Top"""
    ont.component(role)
    return not reasoner_registry.get(ont).equivalent(party.filler(role), TOP)


def is_recommendation(offer: PartyRecord, demand: PartyRecord, ont: Ontology) -> bool:
    """The offer shares at least one existing component with the demand"""
    return any(
        component_existing(offer, role, ont) and component_existing(demand, role, ont)
        for role in ont.component_roles
    )


# ---------- Per-component comparison ----------

def zone_of(o_proj: ConceptExpr, d_proj: ConceptExpr, ont: Ontology) -> Zone:
    reasoner = reasoner_registry.get(ont)
    below = reasoner.subsumes(o_proj, d_proj)
    above = reasoner.subsumes(d_proj, o_proj)
    if below and above:
        return "Equivalent"
    if below:
        return "MorePrecise"
    if above:
        return "LessPrecise"
    return "Distant"


def evaluate_component(role: str, ont: Ontology, demand: PartyRecord, offer: PartyRecord) -> ComponentEvaluation:
    ont.component(role)
    d_proj, o_proj = demand.filler(role), offer.filler(role)
    common, rest, miss = rest_and_miss(d_proj, o_proj, ont)
    return ComponentEvaluation(
        role=role,
        offer=offer.name,
        zone=zone_of(o_proj, d_proj, ont),
        demand_projection=d_proj,
        offer_projection=o_proj,
        lcs=common,
        rest=rest,
        miss=miss,
        rest_length=syntactic_length(rest),
        miss_length=syntactic_length(miss),
        demand_existing=component_existing(demand, role, ont),
        offer_existing=component_existing(offer, role, ont),
    )


def _more_general(a: ConceptExpr, b: ConceptExpr, ont: Ontology) -> int:
    reasoner = reasoner_registry.get(ont)
    if reasoner.strictly_subsumed(a, b):
        return -1
    if reasoner.strictly_subsumed(b, a):
        return 1
    return 0


def _shorter(a_length: int, b_length: int) -> int:
    if a_length > b_length:
        return -1
    if a_length < b_length:
        return 1
    return 0


def _residue_order(a: ConceptExpr, a_length: int, b: ConceptExpr, b_length: int, ont: Ontology) -> int:
    """A more general residue wins; among comparable-equal or incomparable ones, the shorter"""
    return _more_general(a, b, ont) or _shorter(a_length, b_length)


def compare_evaluations(first: ComponentEvaluation, second: ComponentEvaluation, ont: Ontology) -> int:
    """φ over two precomputed evaluations of the same component"""
    if first.zone != second.zone:
        return 1 if ZONE_PRECEDENCE[first.zone] > ZONE_PRECEDENCE[second.zone] else -1

    if first.zone == "Equivalent":
        return 0
    if first.zone == "MorePrecise":
        return _residue_order(first.miss, first.miss_length, second.miss, second.miss_length, ont)
    if first.zone == "LessPrecise":
        return _residue_order(first.rest, first.rest_length, second.rest, second.rest_length, ont)
    return (_residue_order(first.rest, first.rest_length, second.rest, second.rest_length, ont)
            or _residue_order(first.miss, first.miss_length, second.miss, second.miss_length, ont))


def phi(role: str, ont: Ontology, demand: PartyRecord, o1: PartyRecord, o2: PartyRecord) -> int:
    """+1 if o1 serves the demand better than o2 on role, -1 if worse, 0 if tied"""
    return compare_evaluations(
        evaluate_component(role, ont, demand, o1),
        evaluate_component(role, ont, demand, o2),
        ont,
    )


def numeric_comparator(values: Mapping[str, Mapping[str, float]]) -> Comparator:
    """Comparator over plain per-component values: greater is better"""

    def compare(role: str, first: PartyRecord, second: PartyRecord) -> int:
        x, y = values[first.name][role], values[second.name][role]
        if x > y:
            return 1
        if x < y:
            return -1
        return 0

    return compare


# ---------- Concordance ----------

@dataclass
class ConcordanceTable:
    scores: Dict[str, Fraction] = field(default_factory=dict)
    # (first, second, role) → φ, first < second by name
    votes: Dict[Tuple[str, str, str], int] = field(default_factory=dict)
    evaluations: Dict[str, Dict[str, ComponentEvaluation]] = field(default_factory=dict)

    def component_scores(self, roles: Sequence[str]) -> Dict[str, Dict[str, int]]:
        table = {name: {role: 0 for role in roles} for name in sorted(self.scores)}
        for (first, second, role), value in self.votes.items():
            table[first][role] += value
            table[second][role] -= value
        return table

    def pairwise(self, roles: Sequence[str], weights: WeightTable) -> List[PairwiseScore]:
        names = sorted(self.scores)
        result = []
        for first in names:
            for second in names:
                if first == second:
                    continue
                lo, hi, sign = (first, second, 1) if first < second else (second, first, -1)
                value = sum((weights.weight(role) * self.votes[(lo, hi, role)] for role in roles), Fraction(0))
                result.append(PairwiseScore(first=first, second=second, value=sign * value))
        return result


def _check_names(offers: Iterable[PartyRecord]) -> None:
    seen = set()
    for offer in offers:
        if offer.name in seen:
            raise DuplicateOfferName(f"offer '{offer.name}' defined twice",
                                     details={"name": offer.name}, line=offer.line)
        seen.add(offer.name)


def _concordance(demand: PartyRecord, offers: Sequence[PartyRecord], weights: WeightTable,
                 ont: Ontology, comparator: Optional[Comparator] = None) -> ConcordanceTable:
    _check_names(offers)
    ordered = sorted(offers, key=lambda o: o.name)
    roles = ont.component_roles
    table = ConcordanceTable(scores={o.name: Fraction(0) for o in ordered})

    if comparator is None:
        for offer in ordered:
            table.evaluations[offer.name] = {
                role: evaluate_component(role, ont, demand, offer) for role in roles
            }

        def comparator(role: str, first: PartyRecord, second: PartyRecord) -> int:
            return compare_evaluations(table.evaluations[first.name][role],
                                       table.evaluations[second.name][role], ont)

    jobs = [(ordered[i], ordered[j], role)
            for i in range(len(ordered)) for j in range(i + 1, len(ordered)) for role in roles]

    def vote(job: Tuple[PartyRecord, PartyRecord, str]) -> int:
        first, second, role = job
        return comparator(role, first, second)

    if config.WORKERS > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=config.WORKERS) as executor:
            values = list(executor.map(vote, jobs))
    else:
        values = [vote(job) for job in jobs]

    for (first, second, role), value in zip(jobs, values):
        table.votes[(first.name, second.name, role)] = value
        weighted = weights.weight(role) * value
        table.scores[first.name] += weighted
        table.scores[second.name] -= weighted
    return table


def concordance_scores(demand: PartyRecord, offers: Sequence[PartyRecord], weights: WeightTable,
                       ont: Ontology, comparator: Optional[Comparator] = None) -> Dict[str, Fraction]:
    """score(x) = Σ_{y≠x} Σ_k v_k·φ_k(x, y), exact"""
    return _concordance(demand, offers, weights, ont, comparator).scores


def competition_ranks(scores: Mapping[str, Fraction]) -> List[RankedOffer]:
    """Score descending, name ascending; equal scores share a rank"""
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    ranked: List[RankedOffer] = []
    for position, (name, score) in enumerate(ordered, start=1):
        rank = ranked[-1].rank if ranked and ranked[-1].score == score else position
        ranked.append(RankedOffer(rank=rank, name=name, score=score))
    return ranked


def rank(demand: PartyRecord, offers: Sequence[PartyRecord], weights: WeightTable, ont: Ontology,
         comparator: Optional[Comparator] = None) -> RankingResult:
    started = time.perf_counter()
    _check_names(offers)

    recommendations, excluded = [], []
    for offer in offers:
        if is_recommendation(offer, demand, ont):
            recommendations.append(offer)
        else:
            excluded.append(offer.name)
    if excluded:
        logger.info(f"Excluded {len(excluded)} offer(s) sharing no existing component with {demand.name}: "
                    f"{', '.join(sorted(excluded))}")

    roles = ont.component_roles
    table = _concordance(demand, recommendations, weights, ont, comparator)

    trace: List[ComponentTrace] = []
    for (first, second, role), value in sorted(table.votes.items()):
        entry = ComponentTrace(first=first, second=second, role=role, phi=value)
        if table.evaluations:
            a, b = table.evaluations[first][role], table.evaluations[second][role]
            entry = entry.model_copy(update={
                "first_zone": a.zone, "second_zone": b.zone,
                "first_rest": a.rest.text, "first_miss": a.miss.text,
                "second_rest": b.rest.text, "second_miss": b.miss.text,
            })
        trace.append(entry)

    result = RankingResult(
        demand=demand.name,
        ranked=competition_ranks(table.scores),
        excluded=sorted(excluded),
        trace=trace,
        component_scores=table.component_scores(roles),
        pairwise=table.pairwise(roles, weights),
    )
    logger.info(f"Ranked {len(recommendations)} offer(s) against {demand.name} "
                f"in {time.perf_counter() - started:.3f}s")
    return result
