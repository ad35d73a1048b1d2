"""
Tableau service: satisfiability and subsumption for ALCO with general TBoxes.

Concepts are interned to integers after negation normal form. Inclusions
become global constraints ¬C ⊔ D; a constraint with a negated atom or
negated nominal disjunct is absorbed into a lazy rule on that name. Each
individual owns a root node; a node whose label gains {a} is merged with
the owner of a. Tree nodes use subset anywhere-blocking. Label entries
record the branch points they depend on so that a clash backjumps past
unrelated choices.
"""

import logging
import os
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from dotenv import load_dotenv

from app.exceptions import TableauBudgetExceededError, UnsupportedConstructError
from app.schemas.concepts import (
    And,
    Atom,
    Bottom,
    Exists,
    Forall,
    NamedRole,
    Nominals,
    Not,
    Or,
    Top,
    canonical_order,
    negation,
)
from app.schemas.knowledge_base import ConceptEquality, ConceptInclusion
from app.schemas.oracle import TableauOutcome
from app.services.normal_form_service import NormalFormService

logger = logging.getLogger(__name__)
load_dotenv()

_TOP, _BOT, _ATOM, _NOM, _NOT_ATOM, _NOT_NOM, _AND, _OR, _SOME, _ALL = range(10)


def in_alco(concept) -> bool:
    """True when the expression uses only ALCO constructors over named roles."""
    if isinstance(concept, (Top, Bottom, Atom, Nominals)):
        return True
    if isinstance(concept, Not):
        return in_alco(concept.child)
    if isinstance(concept, (And, Or)):
        return all(in_alco(child) for child in concept.children)
    if isinstance(concept, (Exists, Forall)):
        return isinstance(concept.role, NamedRole) and in_alco(concept.child)
    return False


def tbox_in_alco(tbox: Iterable) -> bool:
    return all(
        isinstance(axiom, (ConceptInclusion, ConceptEquality)) and in_alco(axiom.lhs) and in_alco(axiom.rhs)
        for axiom in tbox
    )


class _Interner:
    """Hash-conses NNF concepts into integer ids with structural complements."""

    def __init__(self):
        self.ids: Dict[tuple, int] = {}
        self.keys: List[tuple] = []
        self.complements: Dict[int, int] = {}

    def intern(self, key: tuple) -> int:
        found = self.ids.get(key)
        if found is None:
            found = len(self.keys)
            self.ids[key] = found
            self.keys.append(key)
        return found

    def tag(self, cid: int) -> int:
        return self.keys[cid][0]

    def _junction(self, tag: int, children: Iterable[int], empty: int) -> int:
        unique = sorted(set(children))
        if not unique:
            return self.intern((empty,))
        if len(unique) == 1:
            return unique[0]
        return self.intern((tag, tuple(unique)))

    def convert(self, concept) -> int:
        """Intern an NNF concept; multi-individual nominals become (dis)junctions."""
        if isinstance(concept, Top):
            return self.intern((_TOP,))
        if isinstance(concept, Bottom):
            return self.intern((_BOT,))
        if isinstance(concept, Atom):
            return self.intern((_ATOM, concept.name))
        if isinstance(concept, Nominals):
            return self._junction(_OR, (self.intern((_NOM, name)) for name in concept.individuals), _BOT)
        if isinstance(concept, Not):
            child = concept.child
            if isinstance(child, Atom):
                return self.intern((_NOT_ATOM, child.name))
            if isinstance(child, Nominals):
                return self._junction(
                    _AND, (self.intern((_NOT_NOM, name)) for name in child.individuals), _TOP
                )
        if isinstance(concept, And):
            return self._junction(_AND, (self.convert(child) for child in concept.children), _TOP)
        if isinstance(concept, Or):
            return self._junction(_OR, (self.convert(child) for child in concept.children), _BOT)
        if isinstance(concept, (Exists, Forall)) and isinstance(concept.role, NamedRole):
            tag = _SOME if isinstance(concept, Exists) else _ALL
            return self.intern((tag, concept.role.name, self.convert(concept.child)))
        raise UnsupportedConstructError(f"'{concept.render()}' is outside ALCO")

    def complement(self, cid: int) -> int:
        found = self.complements.get(cid)
        if found is not None:
            return found
        key = self.keys[cid]
        tag = key[0]
        if tag == _TOP:
            result = self.intern((_BOT,))
        elif tag == _BOT:
            result = self.intern((_TOP,))
        elif tag in (_ATOM, _NOT_ATOM, _NOM, _NOT_NOM):
            flipped = {_ATOM: _NOT_ATOM, _NOT_ATOM: _ATOM, _NOM: _NOT_NOM, _NOT_NOM: _NOM}[tag]
            result = self.intern((flipped, key[1]))
        elif tag in (_AND, _OR):
            dual = _OR if tag == _AND else _AND
            result = self._junction(dual, (self.complement(child) for child in key[1]), _BOT)
        else:
            dual = _ALL if tag == _SOME else _SOME
            result = self.intern((dual, key[1], self.complement(key[2])))
        self.complements[cid] = result
        self.complements[result] = cid
        return result

    def flatten(self, cid: int, tag: int) -> List[int]:
        if self.tag(cid) != tag:
            return [cid]
        parts = []
        for child in self.keys[cid][1]:
            parts.extend(self.flatten(child, tag))
        return parts


Deps = FrozenSet[int]
_NO_DEPS: Deps = frozenset()


class _Graph:
    """Completion graph; copied wholesale at every branching point.

    Every label entry and every edge maps to the branch points it depends on.
    """

    def __init__(self):
        self.labels: Dict[int, Dict[int, Deps]] = {}
        self.successors: Dict[int, Dict[str, Dict[int, Deps]]] = {}
        self.owner: Dict[str, int] = {}
        self.next_id = 0

    def copy(self) -> "_Graph":
        other = _Graph()
        other.labels = {node: dict(label) for node, label in self.labels.items()}
        other.successors = {
            node: {role: dict(targets) for role, targets in roles.items()}
            for node, roles in self.successors.items()
        }
        other.owner = dict(self.owner)
        other.next_id = self.next_id
        return other

    def new_node(self, label: Iterable[int], deps: Deps = _NO_DEPS) -> int:
        node = self.next_id
        self.next_id += 1
        self.labels[node] = {cid: deps for cid in label}
        self.successors[node] = {}
        return node


class _Run:
    """Scratch state of one satisfiability test.

    Clashes are reported as the set of branch points they depend on, and a
    branch whose clash does not mention it is skipped (backjumping).
    """

    def __init__(self, interner: _Interner, globals_: List[int], lazy: Dict[int, List[int]], max_steps: int):
        self.interner = interner
        self.globals = globals_
        self.lazy = lazy
        self.max_steps = max_steps
        self.steps = 0
        self.nodes = 0
        self.branches = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise TableauBudgetExceededError(f"tableau exceeded {self.max_steps} steps")

    def add(self, graph: _Graph, node: int, cid: int, deps: Deps) -> bool:
        label = graph.labels[node]
        if cid in label:
            return False
        self.tick()
        label[cid] = deps
        return True

    def satisfiable(self, graph: _Graph) -> Optional[Deps]:
        """None when a complete clash-free graph is reached, else the clash dependencies."""
        while True:
            clash = self.saturate(graph)
            if clash is not None:
                return clash
            choice = self.pick_disjunct(graph)
            if choice is not None:
                node, disjunct, deps = choice
                self.branches += 1
                point = self.branches
                left = graph.copy()
                self.add(left, node, disjunct, deps | {point})
                clash = self.satisfiable(left)
                if clash is None:
                    return None
                if point not in clash:
                    return clash
                # semantic branching: the other branch knows the first disjunct fails
                self.add(graph, node, self.interner.complement(disjunct), (clash - {point}) | deps)
                continue
            if not self.generate(graph):
                self.nodes = max(self.nodes, len(graph.labels))
                return None

    def saturate(self, graph: _Graph) -> Optional[Deps]:
        """Apply deterministic rules to a fixpoint; the clash dependencies on failure."""
        while True:
            changed, clash = self.sweep(graph)
            if clash is not None:
                return clash
            if not changed:
                return None

    def _closed(self, label: Dict[int, Deps], disjuncts) -> Tuple[List[int], Deps]:
        """Open disjuncts of a disjunction and the dependencies of the refuted ones."""
        open_, deps = [], _NO_DEPS
        for child in disjuncts:
            refuted = label.get(self.interner.complement(child))
            if refuted is None:
                open_.append(child)
            else:
                deps = deps | refuted
        return open_, deps

    def sweep(self, graph: _Graph) -> Tuple[bool, Optional[Deps]]:
        keys = self.interner.keys
        changed = False
        for node in sorted(graph.labels):
            label = graph.labels[node]
            for cid in sorted(label):
                deps = label[cid]
                key = keys[cid]
                tag = key[0]
                if tag == _AND:
                    for child in key[1]:
                        changed |= self.add(graph, node, child, deps)
                elif tag == _ATOM or tag == _NOM:
                    for consequence in self.lazy.get(cid, ()):
                        changed |= self.add(graph, node, consequence, deps)
                    if tag == _NOM and graph.owner[key[1]] != node:
                        self.merge(graph, node, graph.owner[key[1]], deps)
                        return True, None
                elif tag == _ALL:
                    for target, edge in graph.successors[node].get(key[1], {}).items():
                        changed |= self.add(graph, target, key[2], deps | edge)
                elif tag == _OR:
                    if any(child in label for child in key[1]):
                        continue
                    open_, refuted = self._closed(label, key[1])
                    if not open_:
                        return changed, deps | refuted
                    if len(open_) == 1:
                        changed |= self.add(graph, node, open_[0], deps | refuted)
            clash = self.clashes(label)
            if clash is not None:
                return changed, clash
        return changed, None

    def clashes(self, label: Dict[int, Deps]) -> Optional[Deps]:
        keys = self.interner.keys
        for cid, deps in label.items():
            tag = keys[cid][0]
            if tag == _BOT:
                return deps
            if tag == _NOT_ATOM or tag == _NOT_NOM:
                other = label.get(self.interner.complement(cid))
                if other is not None:
                    return deps | other
        return None

    def merge(self, graph: _Graph, first: int, second: int, deps: Deps) -> None:
        """Merge two nodes that share a nominal; moved facts also depend on `deps`."""
        target, source = min(first, second), max(first, second)
        self.tick()
        logger.debug(f"Merging tableau node {source} into {target}")
        label = graph.labels[target]
        for cid, entry in graph.labels.pop(source).items():
            label.setdefault(cid, entry | deps)
        moved = graph.successors.pop(source)
        for role, targets in moved.items():
            bucket = graph.successors[target].setdefault(role, {})
            for node, edge in targets.items():
                bucket.setdefault(target if node == source else node, edge | deps)
        for roles in graph.successors.values():
            for targets in roles.values():
                if source in targets:
                    targets.setdefault(target, targets.pop(source) | deps)
        for name, node in graph.owner.items():
            if node == source:
                graph.owner[name] = target

    def pick_disjunct(self, graph: _Graph) -> Optional[Tuple[int, int, Deps]]:
        keys = self.interner.keys
        for node in sorted(graph.labels):
            label = graph.labels[node]
            for cid in sorted(label):
                key = keys[cid]
                if key[0] != _OR or any(child in label for child in key[1]):
                    continue
                open_, refuted = self._closed(label, key[1])
                if open_:
                    return node, open_[0], label[cid] | refuted
        return None

    def blocked(self, graph: _Graph) -> Set[int]:
        roots = set(graph.owner.values())
        witnesses: List[int] = []
        blocked = set()
        for node in sorted(graph.labels):
            label = graph.labels[node].keys()
            if node not in roots and any(label <= graph.labels[other].keys() for other in witnesses):
                blocked.add(node)
            else:
                witnesses.append(node)
        return blocked

    def generate(self, graph: _Graph) -> bool:
        """Create one successor for an unsatisfied existential; False when none is left."""
        keys = self.interner.keys
        blocked = self.blocked(graph)
        for node in sorted(graph.labels):
            if node in blocked:
                continue
            label = graph.labels[node]
            for cid in sorted(label):
                key = keys[cid]
                if key[0] != _SOME:
                    continue
                role, child = key[1], key[2]
                if any(child in graph.labels[target] for target in graph.successors[node].get(role, {})):
                    continue
                self.tick()
                deps = label[cid]
                successor = graph.new_node([child, *self.globals], deps)
                graph.successors[node].setdefault(role, {})[successor] = deps
                return True
        return False


class TableauService:
    """
    Internal ALCO reasoner.

    Raises UnsupportedConstructError for anything outside ALCO, and
    TableauBudgetExceededError when a single test exceeds the step budget
    (DDL_TABLEAU_MAX_STEPS, default 200000).
    """

    def __init__(self, max_steps: Optional[int] = None):
        self.max_steps = max_steps or int(os.getenv("DDL_TABLEAU_MAX_STEPS", 200000))

    def decide(self, tbox: Iterable, concept) -> TableauOutcome:
        """
        Decide satisfiability of `concept` w.r.t. `tbox` and report the effort.

        Args:
            tbox: ConceptInclusion / ConceptEquality axioms in ALCO
            concept: ALCO concept

        Returns:
            TableauOutcome with the verdict and the number of rule applications
        """
        tbox = list(tbox)
        if not tbox_in_alco(tbox) or not in_alco(concept):
            raise UnsupportedConstructError("query leaves the ALCO fragment")
        interner = _Interner()
        globals_: List[int] = []
        lazy: Dict[int, List[int]] = {}
        for axiom in canonical_order(NormalFormService.expand_tbox(tbox)):
            constraint = NormalFormService.nnf(Or(children=(negation(axiom.lhs), axiom.rhs)))
            self._absorb(interner, interner.convert(constraint), globals_, lazy)
        start = interner.convert(NormalFormService.nnf(concept))

        graph = _Graph()
        for name in sorted({key[1] for key in interner.keys if key[0] in (_NOM, _NOT_NOM)}):
            nominal = interner.intern((_NOM, name))
            graph.owner[name] = graph.new_node([nominal, *globals_])
        graph.new_node([start, *globals_])

        run = _Run(interner, globals_, lazy, self.max_steps)
        satisfiable = run.satisfiable(graph) is None
        logger.debug(
            f"Tableau: {concept.render()} {'satisfiable' if satisfiable else 'unsatisfiable'} "
            f"w.r.t. {len(tbox)} axioms in {run.steps} steps, {run.branches} branch points"
        )
        return TableauOutcome(satisfiable=satisfiable, steps=run.steps, nodes=run.nodes or None)

    @staticmethod
    def _absorb(interner: _Interner, constraint: int, globals_: List[int], lazy: Dict[int, List[int]]) -> None:
        for conjunct in interner.flatten(constraint, _AND):
            tag = interner.tag(conjunct)
            if tag == _TOP:
                continue
            disjuncts = interner.flatten(conjunct, _OR)
            triggers = sorted(
                (d for d in disjuncts if interner.tag(d) in (_NOT_ATOM, _NOT_NOM)),
                key=lambda d: (interner.tag(d) != _NOT_ATOM, interner.keys[d][1]),
            )
            if not triggers:
                if conjunct not in globals_:
                    globals_.append(conjunct)
                continue
            trigger = triggers[0]
            rest = [d for d in disjuncts if d != trigger]
            consequence = interner._junction(_OR, rest, _BOT)
            lazy.setdefault(interner.complement(trigger), []).append(consequence)

    def is_satisfiable(self, tbox: Iterable, concept) -> bool:
        """True iff some model of `tbox` gives `concept` a non-empty extension."""
        return self.decide(tbox, concept).satisfiable

    def entails(self, tbox: Iterable, lhs, rhs) -> bool:
        """tbox ⊨ lhs ⊑ rhs, decided as unsatisfiability of lhs ⊓ ¬rhs."""
        return not self.is_satisfiable(tbox, And(children=(lhs, negation(rhs))))
