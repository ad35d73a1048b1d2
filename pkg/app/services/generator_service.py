"""
Generator service: seeded random knowledge bases and ground programs.

Generated KBs stay at desk scale (at most six concept names, four
individuals, five defeasible axioms) and inside ALCO, so every check runs on
the internal tableau. Identical seeds give identical output.
"""

import logging
import random
from typing import List, Tuple

from app.schemas.concepts import (
    TOP,
    And,
    Atom,
    Exists,
    NamedRole,
    Not,
    Or,
    nominal,
)
from app.schemas.knowledge_base import (
    ConceptEquality,
    ConceptInclusion,
    DefeasibleAxiom,
    KnowledgeBase,
    assertion,
)
from app.schemas.program import (
    ConceptQuery,
    ConceptUpdate,
    DlAtom,
    DlProgram,
    DlRule,
    PredicateLiteral,
    const,
)

logger = logging.getLogger(__name__)

CONCEPT_POOL = ("A", "B", "C", "D", "E", "F")
INDIVIDUAL_POOL = ("a", "b", "c", "d")
PREDICATE_POOL = ("p", "q", "r", "s")
LINK_PROBABILITY = 0.3


class GeneratorService:
    """
    Random test-case factory driven by one `random.Random(seed)`.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self.random = random.Random(seed)

    # --- knowledge bases -------------------------------------------------

    def literal_concept(self, names) -> object:
        name = self.random.choice(list(names))
        return Not(child=Atom(name=name)) if self.random.random() < 0.3 else Atom(name=name)

    def query_concept(self, kb: KnowledgeBase):
        """A literal, or now and then a conjunction of two literals."""
        names = sorted(kb.concepts)
        if self.random.random() < 0.25:
            return And(children=(self.literal_concept(names), self.literal_concept(names)))
        return self.literal_concept(names)

    def equivalent_variant(self, concept, kb: KnowledgeBase):
        """(C ⊓ X) ⊔ (C ⊓ ¬X): classically equal to C, syntactically different."""
        pivot = Atom(name=self.random.choice(sorted(kb.concepts)))
        return Or(children=(And(children=(concept, pivot)), And(children=(concept, Not(child=pivot)))))

    def random_kb(self) -> KnowledgeBase:
        """
        A random defeasible ALCO knowledge base.

        Returns:
            KnowledgeBase with definitional TBox links, a few assertions and
            one to five defeasible axioms over (negated) atoms
        """
        rng = self.random
        concepts = CONCEPT_POOL[: rng.randint(2, len(CONCEPT_POOL))]
        individuals = INDIVIDUAL_POOL[: rng.randint(1, len(INDIVIDUAL_POOL))]
        with_role = rng.random() < LINK_PROBABILITY
        role = NamedRole(name="R")

        tbox = set()
        for name in concepts:
            if rng.random() >= LINK_PROBABILITY:
                continue
            others = [other for other in concepts if other != name]
            target = Atom(name=rng.choice(others))
            shape = rng.choice(("sub", "disjoint", "definition", "exists" if with_role else "sub"))
            if shape == "sub":
                tbox.add(ConceptInclusion(lhs=Atom(name=name), rhs=target))
            elif shape == "disjoint":
                tbox.add(ConceptInclusion(lhs=Atom(name=name), rhs=Not(child=target)))
            elif shape == "definition":
                second = self.literal_concept(others)
                tbox.add(ConceptEquality(lhs=Atom(name=name), rhs=And(children=(target, second))))
            else:
                tbox.add(ConceptInclusion(lhs=Atom(name=name), rhs=Exists(role=role, child=target)))
        for individual in individuals:
            if rng.random() < LINK_PROBABILITY:
                tbox.add(assertion(self.literal_concept(concepts), individual))
        if with_role and len(individuals) > 1 and rng.random() < 0.5:
            subject, target = rng.sample(individuals, 2)
            tbox.add(ConceptInclusion(lhs=nominal(subject), rhs=Exists(role=role, child=nominal(target))))

        dbox = set()
        for _ in range(rng.randint(1, 5)):
            antecedent = TOP if rng.random() < 0.1 else self.literal_concept(concepts)
            candidates = [n for n in concepts if not isinstance(antecedent, (Atom, Not)) or n != _name(antecedent)]
            dbox.add(DefeasibleAxiom(antecedent=antecedent, consequent=self.literal_concept(candidates)))

        kb = KnowledgeBase(
            concepts=frozenset(concepts),
            roles=frozenset({"R"} if with_role else set()),
            individuals=frozenset(individuals),
            tbox=frozenset(tbox),
            dbox=frozenset(dbox),
        )
        logger.debug(f"Generated KB (seed {self.seed}): {len(tbox)} strict, {len(dbox)} defeasible axioms")
        return kb

    # --- ground programs -------------------------------------------------

    def random_program(self, max_base: int = 14) -> Tuple[KnowledgeBase, DlProgram]:
        """
        A random variable-free dl-program and its DL base.

        Args:
            max_base: Upper bound on the size of the Herbrand base

        Returns:
            (KnowledgeBase over P, Q, R, S; DlProgram over p, q, r, s) where
            dl-atoms update concept X with predicate x
        """
        rng = self.random
        constants = INDIVIDUAL_POOL[: rng.randint(1, 2)]
        budget = max(1, max_base // (2 * len(constants)))
        predicates = PREDICATE_POOL[: rng.randint(1, min(budget, len(PREDICATE_POOL)))]
        concepts = [name.upper() for name in predicates]

        tbox = set()
        for name in concepts:
            if len(concepts) > 1 and rng.random() < LINK_PROBABILITY:
                other = Atom(name=rng.choice([c for c in concepts if c != name]))
                rhs = other if rng.random() < 0.5 else Not(child=other)
                tbox.add(ConceptInclusion(lhs=Atom(name=name), rhs=rhs))
        for individual in constants:
            if rng.random() < 0.2:
                tbox.add(assertion(self.literal_concept(concepts), individual))
        kb = KnowledgeBase(
            concepts=frozenset(concepts), individuals=frozenset(constants), tbox=frozenset(tbox)
        )

        rules: List[DlRule] = []
        for _ in range(rng.randint(1, 6)):
            rules.append(
                DlRule(
                    head=self._program_literal(predicates, constants),
                    positive_body=tuple(self._body_element(predicates, constants) for _ in range(rng.randint(0, 2))),
                    negative_body=tuple(self._body_element(predicates, constants) for _ in range(rng.randint(0, 2))),
                )
            )
        return kb, DlProgram(rules=tuple(rules), constants=frozenset(constants))

    def _program_literal(self, predicates, constants) -> PredicateLiteral:
        return PredicateLiteral(
            predicate=self.random.choice(predicates),
            terms=(const(self.random.choice(constants)),),
            negated=self.random.random() < 0.3,
        )

    def _body_element(self, predicates, constants):
        if self.random.random() >= 0.25:
            return self._program_literal(predicates, constants)
        updates = []
        for predicate in self.random.sample(list(predicates), self.random.randint(0, len(predicates))):
            concept = Atom(name=predicate.upper())
            updates.append(ConceptUpdate(concept=concept, predicate=predicate))
            if self.random.random() < 0.5:
                updates.append(ConceptUpdate(concept=Not(child=concept), predicate=predicate, negated=True))
        query = self.literal_concept([p.upper() for p in predicates])
        return DlAtom(
            updates=tuple(updates), query=ConceptQuery(concept=query), terms=(const(self.random.choice(constants)),)
        )


def _name(concept) -> str:
    return concept.child.name if isinstance(concept, Not) else concept.name
