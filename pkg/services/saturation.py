"""
Completion-rule saturation for normalized EL++ axiom sets

S(X) holds the basic concepts subsuming X, R(r) the (X, Y) pairs linked by r.
Rules applied to fixpoint:

    CR1  A ∈ S(X), A ⊑ B                      → B ∈ S(X)
    CR2  A1, A2 ∈ S(X), A1 ⊓ A2 ⊑ B           → B ∈ S(X)
    CR3  A ∈ S(X), A ⊑ ∃r.B                   → (X, B) ∈ R(r)
    CR4  (X, Y) ∈ R(r), A ∈ S(Y), ∃r.A ⊑ B    → B ∈ S(X)
    CR5  (X, Y) ∈ R(r), ⊥ ∈ S(Y)              → ⊥ ∈ S(X)
    CR6  {a} ∈ S(X) ∩ S(Y), X ⇝ Y             → S(Y) ⊆ S(X)
    CR10 (X, Y) ∈ R(r), r ⊑ s                 → (X, Y) ∈ R(s)
    CR11 (X, Y) ∈ R(r1), (Y, Z) ∈ R(r2), r1 ∘ r2 ⊑ s → (X, Z) ∈ R(s)
"""

import logging
import time
from collections import defaultdict, deque
from typing import DefaultDict, Deque, Dict, FrozenSet, Iterable, List, Set, Tuple

from services.normalizer import BOTTOM_KEY, TOP_KEY, NormalizedAxiomSet, is_nominal_key

logger = logging.getLogger(__name__)


class IndexNotFrozen(RuntimeError):
    pass


class ClassificationIndex:
    """Saturated subsumption structure; queries require a frozen index"""

    def __init__(self):
        self.S: Dict[str, Set[str]] = {}
        # inverse of S: subsumees[A] = {X | A ∈ S(X)}
        self.subsumees: DefaultDict[str, Set[str]] = defaultdict(set)
        # R(r) as successor / predecessor maps
        self.succ: DefaultDict[str, DefaultDict[str, Set[str]]] = defaultdict(lambda: defaultdict(set))
        self.pred: DefaultDict[str, DefaultDict[str, Set[str]]] = defaultdict(lambda: defaultdict(set))
        self.frozen = False

        # axiom indexes
        self._told: DefaultDict[str, List[str]] = defaultdict(list)
        self._conj: DefaultDict[str, List[Tuple[str, str]]] = defaultdict(list)
        self._ex_intro: DefaultDict[str, List[Tuple[str, str]]] = defaultdict(list)
        self._ex_elim: DefaultDict[str, List[Tuple[str, str]]] = defaultdict(list)
        self._ex_elim_by_role: DefaultDict[str, DefaultDict[str, List[str]]] = defaultdict(lambda: defaultdict(list))
        self._role_sups: Dict[str, FrozenSet[str]] = {}
        self._chains_first: DefaultDict[str, List[Tuple[str, str]]] = defaultdict(list)
        self._chains_second: DefaultDict[str, List[Tuple[str, str]]] = defaultdict(list)
        self._role_subs: List[Tuple[str, str]] = []
        self._roles: Set[str] = set()
        self._nominals: Set[str] = set()

        self._queue: Deque[tuple] = deque()
        self.axiom_count = 0

    # ---------- loading ----------

    def _load(self, nset: NormalizedAxiomSet) -> None:
        """Index the axioms and create their nodes"""
        for sub, sup in nset.atomic:
            self._told[sub].append(sup)
        for left, right, sup in nset.conjunctions:
            self._conj[left].append((right, sup))
            self._conj[right].append((left, sup))
        for sub, role, filler in nset.existential_intro:
            self._ex_intro[sub].append((role, filler))
        for role, filler, sup in nset.existential_elim:
            self._ex_elim[filler].append((role, sup))
            self._ex_elim_by_role[role][filler].append(sup)

        self._roles |= nset.roles
        self._role_subs.extend(nset.role_subs)
        for first, second, sup in nset.role_chains:
            self._chains_first[first].append((second, sup))
            self._chains_second[second].append((first, sup))
        self._roles |= {r for chain in nset.role_chains for r in chain}
        self._close_role_hierarchy()

        for key in sorted(nset.concepts):
            self._add_node(key)
        self.axiom_count += len(nset)

    def _close_role_hierarchy(self) -> None:
        """Reflexive-transitive closure of r ⊑ s over all known roles"""
        direct: DefaultDict[str, Set[str]] = defaultdict(set)
        for sub, sup in self._role_subs:
            direct[sub].add(sup)
        closure: Dict[str, FrozenSet[str]] = {}
        for role in self._roles | set(direct):
            seen = {role}
            stack = [role]
            while stack:
                for sup in direct.get(stack.pop(), ()):
                    if sup not in seen:
                        seen.add(sup)
                        stack.append(sup)
            closure[role] = frozenset(seen)
        self._role_sups = closure

    def _add_node(self, key: str) -> None:
        if key == BOTTOM_KEY or key in self.S:
            return
        self.S[key] = set()
        if is_nominal_key(key):
            self._nominals.add(key)
        self._add_s(key, key)
        self._add_s(key, TOP_KEY)

    # ---------- rule application ----------

    def _add_s(self, node: str, concept: str) -> None:
        members = self.S[node]
        if concept not in members:
            members.add(concept)
            self.subsumees[concept].add(node)
            self._queue.append((node, concept))

    def _add_r(self, role: str, source: str, target: str) -> None:
        targets = self.succ[role][source]
        if target in targets:
            return
        self._add_node(target)
        targets.add(target)
        self.pred[role][target].add(source)
        self._queue.append((role, source, target))

    def _process_concept(self, node: str, concept: str) -> None:
        members = self.S[node]
        for sup in self._told.get(concept, ()):
            self._add_s(node, sup)
        for other, sup in self._conj.get(concept, ()):
            if other in members:
                self._add_s(node, sup)
        for role, filler in self._ex_intro.get(concept, ()):
            self._add_r(role, node, filler)
        for role, sup in self._ex_elim.get(concept, ()):
            for source in tuple(self.pred[role].get(node, ())):
                self._add_s(source, sup)
        if concept == BOTTOM_KEY:
            for role in tuple(self.pred):
                for source in tuple(self.pred[role].get(node, ())):
                    self._add_s(source, BOTTOM_KEY)

    def _process_edge(self, role: str, source: str, target: str) -> None:
        target_members = self.S[target]
        by_filler = self._ex_elim_by_role.get(role)
        if by_filler:
            for filler in tuple(target_members):
                for sup in by_filler.get(filler, ()):
                    self._add_s(source, sup)
        if BOTTOM_KEY in target_members:
            self._add_s(source, BOTTOM_KEY)
        for sup_role in self._role_sups.get(role, ()):
            if sup_role != role:
                self._add_r(sup_role, source, target)
        for second, sup in self._chains_first.get(role, ()):
            for end in tuple(self.succ[second].get(target, ())):
                self._add_r(sup, source, end)
        for first, sup in self._chains_second.get(role, ()):
            for start in tuple(self.pred[first].get(source, ())):
                self._add_r(sup, start, target)

    def _drain(self) -> None:
        queue = self._queue
        while queue:
            item = queue.popleft()
            if len(item) == 2:
                self._process_concept(*item)
            else:
                self._process_edge(*item)

    def _apply_nominal_rule(self) -> bool:
        """One CR6 pass; True if anything was added"""
        if not self._nominals:
            return False
        changed = False
        from_nominals = self._reachable(self._nominals)
        for nominal in sorted(self._nominals):
            holders = sorted(self.subsumees.get(nominal, ()))
            if len(holders) < 2:
                continue
            for node in holders:
                reach = self._reachable({node}) | from_nominals
                for other in holders:
                    if other == node or other not in reach:
                        continue
                    for concept in tuple(self.S[other]):
                        if concept not in self.S[node]:
                            self._add_s(node, concept)
                            changed = True
        return changed

    def _reachable(self, starts: Iterable[str]) -> Set[str]:
        seen = set(starts)
        stack = list(seen)
        while stack:
            node = stack.pop()
            for role in self.succ:
                for target in self.succ[role].get(node, ()):
                    if target not in seen:
                        seen.add(target)
                        stack.append(target)
        return seen

    def _run(self) -> None:
        while True:
            self._drain()
            if not self._apply_nominal_rule():
                break

    # ---------- public ----------

    def extend(self, nset: NormalizedAxiomSet) -> "ClassificationIndex":
        """Add further normalized axioms and re-saturate from the current fixpoint.

        Role axioms change edge propagation globally, so they trigger a full
        replay of every known edge.
        """
        self.frozen = False
        started = time.perf_counter()
        self._load(nset)
        self._catch_up(nset)
        if nset.has_role_axioms:
            for role in tuple(self.succ):
                for source, targets in tuple(self.succ[role].items()):
                    for target in tuple(targets):
                        self._queue.append((role, source, target))
        self._run()
        self.frozen = True
        logger.debug(
            f"Index extended with {len(nset)} axioms in {time.perf_counter() - started:.4f}s"
        )
        return self

    def _catch_up(self, nset: NormalizedAxiomSet) -> None:
        """Apply only the new axioms to nodes already saturated"""
        for sub, sup in nset.atomic:
            for node in tuple(self.subsumees.get(sub, ())):
                self._add_s(node, sup)
        for left, right, sup in nset.conjunctions:
            for node in tuple(self.subsumees.get(left, ())):
                if right in self.S[node]:
                    self._add_s(node, sup)
        for sub, role, filler in nset.existential_intro:
            for node in tuple(self.subsumees.get(sub, ())):
                self._add_r(role, node, filler)
        for role, filler, sup in nset.existential_elim:
            holders = self.pred.get(role)
            if not holders:
                continue
            for node in tuple(self.subsumees.get(filler, ())):
                for source in tuple(holders.get(node, ())):
                    self._add_s(source, sup)

    def _require_frozen(self) -> None:
        if not self.frozen:
            raise IndexNotFrozen("classification index queried before saturation finished")

    def subsumers(self, key: str) -> Set[str]:
        self._require_frozen()
        return self.S.get(key, {key, TOP_KEY})

    def has_node(self, key: str) -> bool:
        return key in self.S

    def is_unsatisfiable(self, key: str) -> bool:
        return BOTTOM_KEY in self.subsumers(key)

    @property
    def is_consistent(self) -> bool:
        self._require_frozen()
        if BOTTOM_KEY in self.S.get(TOP_KEY, ()):
            return False
        return not any(BOTTOM_KEY in self.S[n] for n in self._nominals)

    def edges(self, role: str) -> Set[Tuple[str, str]]:
        self._require_frozen()
        return {(s, t) for s, targets in self.succ.get(role, {}).items() for t in targets}

    @property
    def node_count(self) -> int:
        return len(self.S)

    @property
    def edge_count(self) -> int:
        return sum(len(self.edges(role)) for role in self.succ)


def saturate(nset: NormalizedAxiomSet) -> ClassificationIndex:
    """Build and saturate a fresh index; the result is frozen"""
    started = time.perf_counter()
    index = ClassificationIndex()
    index._load(nset)
    index._run()
    index.frozen = True
    logger.info(
        f"Saturation finished: {index.node_count} nodes, {index.edge_count} edges, "
        f"{len(nset)} axioms in {time.perf_counter() - started:.3f}s"
    )
    return index
