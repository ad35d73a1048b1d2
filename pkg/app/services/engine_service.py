"""
Engine service: evaluation of dl-programs ⟨L, P⟩ under the strong answer-set semantics.

Grounding, dl-atom satisfaction with ⊎-updates, the Gelfond-Lifschitz and
strong dl-transforms, least models, answer-set search, cautious/brave
consequence and entailment of the DL base augmented by an answer set.
"""

import itertools
import logging
import threading
from typing import Dict, FrozenSet, Iterable, List, Optional, Union

from app.exceptions import (
    DlAtomPresentError,
    EmptyUniverseError,
    MissingLambdaPairingError,
    NoAnswerSetError,
    NotAnAnswerSetError,
    UnknownLiteralError,
)
from app.schemas.concepts import Atom, Exists, Not, nominal
from app.schemas.knowledge_base import KnowledgeBase, assertion
from app.schemas.program import (
    ConceptQuery,
    ConceptUpdate,
    DlAtom,
    DlProgram,
    DlRule,
    GroundProgram,
    Interpretation,
    PredicateLiteral,
    RoleUpdate,
    const,
)
from app.services.normal_form_service import NormalFormService
from app.services.oracle_service import OracleService

logger = logging.getLogger(__name__)

Program = Union[DlProgram, GroundProgram]


def _condition_key(element) -> tuple:
    return (*element.sort_key(), element.render())


def _feeds(update, item: PredicateLiteral) -> bool:
    if item.predicate != update.predicate:
        return False
    if isinstance(update, ConceptUpdate):
        return len(item.terms) == 1 and item.negated == update.negated
    return len(item.terms) == 2 and not item.negated


def _consistent(literals: Iterable[PredicateLiteral]) -> bool:
    literals = set(literals)
    return not any(item.negated and item.complement() in literals for item in literals)


class EngineService:
    """
    Strong answer-set engine over a DL base reached through OracleService.
    """

    def __init__(self, oracle: OracleService):
        self.oracle = oracle
        self._lock = threading.Lock()
        self._dl_memo: Dict[tuple, bool] = {}

    # --- grounding -------------------------------------------------------

    def ground(self, program: DlProgram) -> GroundProgram:
        """
        Instantiate every rule with every combination of constants.

        Args:
            program: dl-program; its constants plus those occurring in rules form HU

        Returns:
            GroundProgram with HU and the Herbrand base closed under negation

        Raises:
            EmptyUniverseError: When a rule has variables and HU is empty
        """
        universe = set(program.constants)
        for rule in program.rules:
            for element in (rule.head, *rule.positive_body, *rule.negative_body):
                universe.update(term.name for term in element.terms if not term.variable)
        constants = sorted(universe)

        grounded: Dict[DlRule, None] = {}
        for rule in program.rules:
            variables = rule.variables()
            if variables and not constants:
                logger.error(f"Cannot ground '{rule.render()}': empty Herbrand universe")
                raise EmptyUniverseError(f"rule '{rule.render()}' has variables but there are no constants")
            for values in itertools.product(constants, repeat=len(variables)):
                grounded.setdefault(rule.substitute(dict(zip(variables, values))), None)

        base = set()
        for predicate, arity in program.predicates().items():
            for values in itertools.product(constants, repeat=arity):
                atom = PredicateLiteral(predicate=predicate, terms=tuple(const(v) for v in values))
                base.update((atom, atom.complement()))
        logger.debug(f"Grounded {len(program.rules)} rules into {len(grounded)} over {len(constants)} constants")
        return GroundProgram(rules=tuple(grounded), universe=frozenset(universe), base=frozenset(base))

    def _grounded(self, program: Program) -> GroundProgram:
        return program if isinstance(program, GroundProgram) else self.ground(program)

    # --- satisfaction ----------------------------------------------------

    def eval_dl_atom(self, kb: KnowledgeBase, interp: Interpretation, atom: DlAtom) -> bool:
        """
        I ⊨_L DL[λ; Q](c): does L extended by the λ-images of I entail Q(c)?

        Args:
            kb: DL base L; only its TBox and RBox are consulted
            interp: Interpretation supplying the update extensions
            atom: Ground dl-atom

        Returns:
            The entailment verdict
        """
        return self._eval(kb, interp.literals, atom)

    def _eval(self, kb: KnowledgeBase, literals: FrozenSet[PredicateLiteral], atom: DlAtom) -> bool:
        relevant = frozenset(item for item in literals if any(_feeds(u, item) for u in atom.updates))
        key = (kb.tbox, kb.rbox, relevant, atom)
        with self._lock:
            cached = self._dl_memo.get(key)
        if cached is not None:
            return cached

        extra = set()
        for update in atom.updates:
            for item in relevant:
                if not _feeds(update, item):
                    continue
                names = [term.name for term in item.terms]
                if isinstance(update, ConceptUpdate):
                    extra.add(assertion(update.concept, names[0]))
                else:
                    extra.add(NormalFormService.abox_to_tbox(update.role, *names))
        subject = nominal(atom.terms[0].name)
        if isinstance(atom.query, ConceptQuery):
            goal = atom.query.concept
        else:
            goal = Exists(role=atom.query.role, child=nominal(atom.terms[1].name))
        answer = self.oracle.entails(kb.tbox | extra, kb.rbox, subject, goal)
        with self._lock:
            self._dl_memo[key] = answer
        return answer

    def _holds(self, kb: KnowledgeBase, literals: FrozenSet[PredicateLiteral], element) -> bool:
        if isinstance(element, DlAtom):
            return self._eval(kb, literals, element)
        return element in literals

    # --- transforms ------------------------------------------------------

    @staticmethod
    def gelfond_lifschitz(ground_p: GroundProgram, interp: Interpretation) -> GroundProgram:
        """
        P^I for a ground normal program.

        Raises:
            DlAtomPresentError: If any rule contains a dl-atom
        """
        kept = []
        for rule in ground_p.rules:
            if rule.dl_atoms():
                raise DlAtomPresentError(f"'{rule.render()}' has dl-atoms; use the strong dl-transform")
            if any(element in interp for element in rule.negative_body):
                continue
            kept.append(rule.model_copy(update={"negative_body": ()}))
        return ground_p.with_rules(kept)

    def strong_dl_transform(self, kb: KnowledgeBase, ground_p: GroundProgram, interp: Interpretation) -> GroundProgram:
        """sP^I_L: drop rules with a negative body member true under ⊨_L, strip the rest."""
        kept = [
            rule.model_copy(update={"negative_body": ()})
            for rule in ground_p.rules
            if not any(self._holds(kb, interp.literals, element) for element in rule.negative_body)
        ]
        return ground_p.with_rules(kept)

    # --- least models ----------------------------------------------------

    def _stages(self, kb: KnowledgeBase, rules: Iterable[DlRule]) -> List[List[DlRule]]:
        """Immediate-consequence iteration; each stage lists the rules deriving a new literal."""
        derived = set()
        pending = list(rules)
        stages = []
        while True:
            snapshot = frozenset(derived)
            fired = [
                rule
                for rule in pending
                if rule.head not in snapshot
                and all(self._holds(kb, snapshot, element) for element in rule.positive_body)
            ]
            if not fired:
                return stages
            stages.append(fired)
            derived.update(rule.head for rule in fired)
            pending = [rule for rule in pending if rule.head not in derived]

    def _closure(self, kb: KnowledgeBase, rules: Iterable[DlRule]) -> FrozenSet[PredicateLiteral]:
        return frozenset(rule.head for stage in self._stages(kb, rules) for rule in stage)

    def least_model(self, kb: KnowledgeBase, positive_p: GroundProgram) -> Optional[Interpretation]:
        """
        Least model of a positive ground dl-program.

        Args:
            kb: DL base
            positive_p: Ground program without negative bodies

        Returns:
            The least model, or None when the fixpoint is inconsistent
        """
        if any(rule.negative_body for rule in positive_p.rules):
            raise ValueError("least_model needs a program without negation as failure")
        literals = self._closure(kb, positive_p.rules)
        if not _consistent(literals):
            return None
        return Interpretation(literals=literals)

    def active_rules(self, kb: KnowledgeBase, positive_p: GroundProgram) -> GroundProgram:
        """Rules of a positive program that derive a new literal while computing its least model."""
        if any(rule.negative_body for rule in positive_p.rules):
            raise ValueError("active_rules needs a program without negation as failure")
        return positive_p.with_rules(rule for stage in self._stages(kb, positive_p.rules) for rule in stage)

    # --- answer sets -----------------------------------------------------

    def is_strong_answer_set(self, kb: KnowledgeBase, program: Program, interp: Interpretation) -> bool:
        """I is the least model of ⟨L, sP^I_L⟩."""
        ground_p = self._grounded(program)
        model = self.least_model(kb, self.strong_dl_transform(kb, ground_p, interp))
        return model is not None and model.literals == interp.literals

    def strong_answer_sets(self, kb: KnowledgeBase, program: Program) -> List[Interpretation]:
        """
        Every strong answer set, in canonical order.

        Branches over the truth of the ground negation-as-failure conditions,
        pruning with lower and upper bounds on the answer set, and checks each
        fully decided branch against the definition.

        Args:
            kb: DL base
            program: dl-program or its grounding

        Returns:
            Sorted list of strong answer sets
        """
        ground_p = self._grounded(program)
        conditions = sorted({e for rule in ground_p.rules for e in rule.negative_body}, key=_condition_key)
        found: Dict[FrozenSet, Interpretation] = {}
        self._search(kb, ground_p, conditions, {}, found)
        answer_sets = sorted(found.values(), key=lambda item: item.sort_key())
        logger.info(f"Found {len(answer_sets)} strong answer sets over {len(conditions)} NAF conditions")
        return answer_sets

    def _search(self, kb: KnowledgeBase, ground_p: GroundProgram, conditions: list, assignment: dict, found: dict) -> None:
        assignment = dict(assignment)
        while True:
            lower = self._closure(
                kb, (r for r in ground_p.rules if all(assignment.get(c) is False for c in r.negative_body))
            )
            if not _consistent(lower):
                return
            upper = self._closure(
                kb, (r for r in ground_p.rules if not any(assignment.get(c) is True for c in r.negative_body))
            )
            changed = False
            for condition in conditions:
                value = assignment.get(condition)
                in_lower = self._holds(kb, lower, condition)
                in_upper = in_lower or self._holds(kb, upper, condition)
                if (value is True and not in_upper) or (value is False and in_lower):
                    return
                if value is None and (in_lower or not in_upper):
                    assignment[condition] = in_lower
                    changed = True
            if not changed:
                break

        undecided = [c for c in conditions if c not in assignment]
        if not undecided:
            candidate = Interpretation(literals=lower)
            if self.is_strong_answer_set(kb, ground_p, candidate):
                found.setdefault(candidate.literals, candidate)
            return
        logger.debug(f"Branching on {undecided[0].render()} ({len(undecided)} undecided)")
        for value in (True, False):
            self._search(kb, ground_p, conditions, {**assignment, undecided[0]: value}, found)

    def brute_force_answer_sets(self, kb: KnowledgeBase, program: Program) -> List[Interpretation]:
        """Exhaustive check of every consistent subset of the Herbrand base."""
        ground_p = self._grounded(program)
        atoms = sorted((item for item in ground_p.base if not item.negated), key=lambda item: item.sort_key())
        answer_sets = []
        for choice in itertools.product((None, False, True), repeat=len(atoms)):
            literals = frozenset(
                atom if value else atom.complement() for atom, value in zip(atoms, choice) if value is not None
            )
            candidate = Interpretation(literals=literals)
            if self.is_strong_answer_set(kb, ground_p, candidate):
                answer_sets.append(candidate)
        return sorted(answer_sets, key=lambda item: item.sort_key())

    # --- consequence -----------------------------------------------------

    def consequence(self, kb: KnowledgeBase, program: Program, query: PredicateLiteral, mode: str) -> bool:
        """
        Cautious or brave consequence of a ground literal.

        Raises:
            NoAnswerSetError: When the program has no strong answer sets
            UnknownLiteralError: When `query` is not in a non-empty Herbrand base
            ValueError: For a mode other than cautious or brave
        """
        if mode not in ("cautious", "brave"):
            raise ValueError(f"mode must be 'cautious' or 'brave', got '{mode}'")
        ground_p = self._grounded(program)
        if ground_p.base and query not in ground_p.base:
            logger.error(f"{query.render()} is not in the Herbrand base")
            raise UnknownLiteralError(f"{query.render()} is not in the Herbrand base of the program")
        answer_sets = self.strong_answer_sets(kb, ground_p)
        if not answer_sets:
            logger.error(f"No strong answer sets; {mode} consequence of {query.render()} is undefined")
            raise NoAnswerSetError(f"no strong answer sets: {mode} consequence of {query.render()} is undefined")
        if mode == "cautious":
            return all(query in answer_set for answer_set in answer_sets)
        return any(query in answer_set for answer_set in answer_sets)

    def translate(self, kb: KnowledgeBase, program: DlProgram, answer_set: Interpretation) -> FrozenSet:
        """
        I^DL: the TBox-ized DL counterparts of the literals of an answer set.

        Raises:
            MissingLambdaPairingError: For a literal with neither a λ pairing nor a concept of that name
        """
        axioms = set()
        for item in answer_set.sorted_literals():
            names = [term.name for term in item.terms]
            update = next((u for u in program.lambda_ if _feeds(u, item)), None)
            if isinstance(update, ConceptUpdate):
                axioms.add(assertion(update.concept, names[0]))
            elif isinstance(update, RoleUpdate):
                axioms.add(NormalFormService.abox_to_tbox(update.role, *names))
            else:
                concept = item.predicate[:1].upper() + item.predicate[1:]
                if len(names) != 1 or concept not in kb.concepts:
                    raise MissingLambdaPairingError(f"'{item.render()}' has no DL counterpart")
                target = Atom(name=concept)
                axioms.add(assertion(Not(child=target) if item.negated else target, names[0]))
        return frozenset(axioms)

    def entails_under_answer_set(
        self, kb: KnowledgeBase, program: DlProgram, answer_set: Interpretation, concept, individual: str
    ) -> bool:
        """
        ⟨L, P⟩ ⊨_{P^I} C(a): L augmented with the answer set entails C(a).

        Args:
            kb: DL base L
            program: dl-program P carrying λ
            answer_set: A strong answer set of ⟨L, P⟩
            concept: C
            individual: a

        Raises:
            NotAnAnswerSetError: If `answer_set` is not a strong answer set of ⟨L, P⟩
        """
        if not self.is_strong_answer_set(kb, program, answer_set):
            raise NotAnAnswerSetError(f"{answer_set.render()} is not a strong answer set")
        extra = self.translate(kb, program, answer_set)
        return self.oracle.entails(kb.tbox | extra, kb.rbox, nominal(individual), concept)
