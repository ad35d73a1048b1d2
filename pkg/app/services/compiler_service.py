"""
Compiler service: turns a ranked defeasible KB into a dl-program.

Per defeasible axiom C ⊏̃ D of rank k:

    (1)  d(X) :- DL[λ; C](X), not DL[λ; ⊔ higher-rank antecedents](X), not -d(X).
    (2) -d(X) :- DL[λ; ¬D](X).

and per antecedent C of rank ≥ 1:

    (3) -c(X) :- not DL[λ; C](X).

λ pairs every consequent atom E with E ⊎ e and ¬E ⊎ ¬e.
"""

import logging
from typing import FrozenSet, List, Tuple

from app.exceptions import CompilationError
from app.schemas.concepts import Atom, Bottom, Not, Top, disjunction
from app.schemas.knowledge_base import DefeasibleAxiom
from app.schemas.program import (
    ConceptQuery,
    ConceptUpdate,
    DlAtom,
    DlProgram,
    DlRule,
    PredicateLiteral,
    RuleProvenance,
    var,
)
from app.schemas.ranking import RankedKB
from app.services.normal_form_service import NormalFormService

logger = logging.getLogger(__name__)

_X = var("X")


class CompilerService:
    """
    Ranked KB → dl-program compilation and the compiled-program text format.
    """

    @staticmethod
    def predicate_name(concept_name: str) -> str:
        """Male ↦ male: the concept name with its initial lower-cased."""
        return concept_name[:1].lower() + concept_name[1:]

    @staticmethod
    def antecedents_by_rank(rkb: RankedKB, rank: int) -> FrozenSet:
        return frozenset(entry.axiom.antecedent for entry in rkb.ranks if entry.rank == rank)

    @staticmethod
    def consequents(rkb: RankedKB) -> FrozenSet:
        return frozenset(axiom.consequent for axiom in rkb.dbox_star)

    @staticmethod
    def build_lambda(rkb: RankedKB) -> Tuple[ConceptUpdate, ...]:
        """
        The shared update list λ.

        Args:
            rkb: Ranked knowledge base

        Returns:
            E ⊎ e, ¬E ⊎ ¬e for every consequent atom E, ordered by name
        """
        names = set()
        for consequent in CompilerService.consequents(rkb):
            if isinstance(consequent, Not):
                consequent = consequent.child
            if isinstance(consequent, Atom):
                names.add(consequent.name)
        updates: List[ConceptUpdate] = []
        for name in sorted(names):
            predicate = CompilerService.predicate_name(name)
            updates.append(ConceptUpdate(concept=Atom(name=name), predicate=predicate))
            updates.append(ConceptUpdate(concept=Not(child=Atom(name=name)), predicate=predicate, negated=True))
        return tuple(updates)

    @staticmethod
    def literal_of(concept) -> PredicateLiteral:
        """F ↦ f(X), ¬F ↦ -f(X)."""
        negated = isinstance(concept, Not)
        base = concept.child if negated else concept
        if not isinstance(base, Atom):
            raise CompilationError(f"'{concept.render()}' has no predicate counterpart")
        return PredicateLiteral(
            predicate=CompilerService.predicate_name(base.name), terms=(_X,), negated=negated
        )

    def compile(self, rkb: RankedKB) -> DlProgram:
        """
        Compile `rkb` into a dl-program over the KB's individuals.

        Args:
            rkb: Output of RankingService.compute_ranking

        Returns:
            DlProgram with rules (1) and (2) per compiled axiom, then rules (3)

        Raises:
            CompilationError: For a consequent that is neither a literal nor TOP
        """
        shared = self.build_lambda(rkb)
        rules: List[DlRule] = []
        for entry in sorted(rkb.ranks, key=lambda e: (e.rank, e.axiom.render())):
            axiom = entry.axiom
            if isinstance(axiom.consequent, Top):
                logger.warning(f"Skipping '{axiom.render()}': a TOP consequent carries no information")
                continue
            if isinstance(axiom.consequent, Bottom):
                raise CompilationError(f"'{axiom.render()}' should have been promoted to the TBox")
            rules.extend(self._axiom_rules(rkb, axiom, entry.rank, shared))

        exceptional = set()
        for rank in range(1, rkb.max_rank + 1):
            exceptional |= self.antecedents_by_rank(rkb, rank)
        for antecedent in sorted(exceptional, key=lambda c: c.render()):
            if isinstance(antecedent, Top):
                continue
            head = self.literal_of(NormalFormService.nnf(Not(child=antecedent)))
            rules.append(
                DlRule(
                    head=head,
                    negative_body=(self._dl_atom(shared, antecedent),),
                    provenance=RuleProvenance(schema_tag="3", antecedent=antecedent),
                )
            )

        program = DlProgram(rules=tuple(rules), lambda_=shared, constants=rkb.individuals)
        logger.info(f"Compiled {len(rules)} rules with |lambda| = {len(shared)}")
        return program

    def _axiom_rules(self, rkb: RankedKB, axiom: DefeasibleAxiom, rank: int, shared) -> List[DlRule]:
        head = self.literal_of(axiom.consequent)
        higher = set()
        for other in range(rank + 1, rkb.max_rank + 1):
            higher |= self.antecedents_by_rank(rkb, other)
        negative = [head.complement()]
        if higher:
            negative.append(self._dl_atom(shared, disjunction(higher)))
        typical = DlRule(
            head=head,
            positive_body=(self._dl_atom(shared, axiom.antecedent),),
            negative_body=tuple(negative),
            provenance=RuleProvenance(schema_tag="1", source=axiom),
        )
        blocking = DlRule(
            head=head.complement(),
            positive_body=(self._dl_atom(shared, NormalFormService.nnf(Not(child=axiom.consequent))),),
            provenance=RuleProvenance(schema_tag="2", source=axiom),
        )
        return [typical, blocking]

    @staticmethod
    def _dl_atom(shared, concept) -> DlAtom:
        return DlAtom(updates=shared, query=ConceptQuery(concept=concept), terms=(_X,))

    @staticmethod
    def render_program(program: DlProgram) -> str:
        """
        Compiled-program text: a `lambda = {...}` header, then one rule per line.

        Args:
            program: Compiled program

        Returns:
            Text ending with a newline
        """
        header = "lambda = {" + ", ".join(update.render() for update in program.lambda_) + "}"
        lines = [header, *(rule.render(program.lambda_) for rule in program.rules)]
        return "\n".join(lines) + "\n"
