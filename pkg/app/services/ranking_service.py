"""
Ranking service: rational closure over ⟨T, R, D⟩.

Materialization, exceptionality, the iterated ranking that promotes
infinite-rank axioms into the strict TBox, concept ranks and the rational
closure query procedure. Every classical check goes through OracleService.
"""

import logging
import math
from typing import Dict, FrozenSet, Iterable, Union

from app.schemas.concepts import And, Or, conjunction, negation
from app.schemas.knowledge_base import ConceptInclusion, DefeasibleAxiom, DefeasibleQuery, KnowledgeBase
from app.schemas.ranking import RankedAxiom, RankedKB
from app.services.normal_form_service import NormalFormService
from app.services.oracle_service import OracleService

logger = logging.getLogger(__name__)

INFINITE_RANK = math.inf

Rank = Union[int, float]


class RankingService:
    """
    Rational-closure procedures parameterised by an entailment oracle.
    """

    def __init__(self, oracle: OracleService):
        self.oracle = oracle
        self._ranked: Dict[KnowledgeBase, RankedKB] = {}

    @staticmethod
    def materialize(dbox: Iterable[DefeasibleAxiom]) -> FrozenSet:
        """
        Classical counterparts of defeasible axioms.

        Args:
            dbox: Defeasible axioms C ⊏̃ D

        Returns:
            {nnf(¬C ⊔ D)}; the conjunction of the empty set is TOP
        """
        return frozenset(
            NormalFormService.nnf(Or(children=(negation(axiom.antecedent), axiom.consequent)))
            for axiom in dbox
        )

    def exceptional(self, tbox: Iterable, rbox: Iterable, dbox: Iterable[DefeasibleAxiom]) -> FrozenSet:
        """The axioms of `dbox` whose antecedent ⟨tbox, rbox⟩ ∪ materialized dbox forces empty."""
        dbox = frozenset(dbox)
        if not dbox:
            return frozenset()
        tbox, rbox = frozenset(tbox), frozenset(rbox)
        materialized = conjunction(self.materialize(dbox))
        return frozenset(
            axiom
            for axiom in dbox
            if self.oracle.entails(tbox, rbox, materialized, negation(axiom.antecedent))
        )

    def compute_ranking(self, kb: KnowledgeBase) -> RankedKB:
        """
        Rank the DBox of `kb`.

        Repeats: iterate exceptionality from the current DBox to a fixpoint,
        move that fixpoint into the TBox as strict inclusions; until the
        fixpoint is empty.

        Args:
            kb: Knowledge base ⟨T, R, D⟩

        Returns:
            RankedKB with the final round's exceptionality sequence

        Raises:
            OracleError, UnsupportedConstructError, TableauBudgetExceededError
        """
        if kb in self._ranked:
            return self._ranked[kb]
        tbox_star = set(kb.tbox)
        dbox_star = frozenset(kb.dbox)
        promoted = set()
        rounds = 0
        while True:
            rounds += 1
            sequence = [dbox_star]
            following = self.exceptional(tbox_star, kb.rbox, sequence[-1])
            while following != sequence[-1]:
                sequence.append(following)
                following = self.exceptional(tbox_star, kb.rbox, sequence[-1])
            infinite = sequence.pop()
            if not infinite:
                break
            logger.info(f"Promoting {len(infinite)} defeasible axioms of infinite rank")
            tbox_star |= {ConceptInclusion(lhs=a.antecedent, rhs=a.consequent) for a in infinite}
            dbox_star = dbox_star - infinite
            promoted |= infinite

        ranks = tuple(
            RankedAxiom(axiom=axiom, rank=max(j for j, level in enumerate(sequence) if axiom in level))
            for axiom in sorted(dbox_star, key=lambda a: a.render())
        )
        ranked = RankedKB(
            concepts=kb.concepts,
            roles=kb.roles,
            individuals=kb.individuals,
            tbox_star=frozenset(tbox_star),
            rbox=kb.rbox,
            dbox_star=dbox_star,
            ranks=ranks,
            exceptionality_seq=tuple(sequence),
            promoted=frozenset(promoted),
        )
        logger.info(
            f"Ranking done in {rounds} rounds: {len(ranks)} ranked axioms, "
            f"max rank {ranked.max_rank}, {len(promoted)} promoted"
        )
        self._ranked[kb] = ranked
        return ranked

    def rank_of_concept(self, rkb: RankedKB, concept) -> Rank:
        """
        Rank of a concept: the first level whose materialization leaves it satisfiable.

        Args:
            rkb: Ranked knowledge base
            concept: Any concept over the signature

        Returns:
            0..n+1, or INFINITE_RANK when T* ∪ R makes it unsatisfiable
        """
        levels = [*rkb.exceptionality_seq, frozenset()]
        for j, level in enumerate(levels):
            materialized = conjunction(self.materialize(level))
            if not self.oracle.entails(rkb.tbox_star, rkb.rbox, materialized, negation(concept)):
                return j
        return INFINITE_RANK

    def rank_of_axiom(self, rkb: RankedKB, axiom: DefeasibleAxiom) -> Rank:
        """Recorded rank of a ranked axiom, infinity for promoted ones, else the antecedent's rank."""
        rank = rkb.rank_of(axiom)
        if rank is not None:
            return rank
        if axiom in rkb.promoted:
            return INFINITE_RANK
        return self.rank_of_concept(rkb, axiom.antecedent)

    def rational_closure_entails(self, kb: KnowledgeBase, query: DefeasibleQuery) -> bool:
        """
        Decide C ⊏̃ D under the rational closure of `kb`.

        Args:
            kb: Knowledge base, ranked on first use
            query: Defeasible query over arbitrary concepts

        Returns:
            True iff the query is in the rational closure
        """
        return self.entails_ranked(self.compute_ranking(kb), query)

    def entails_ranked(self, rkb: RankedKB, query: DefeasibleQuery) -> bool:
        """Rational closure query against an already ranked KB."""
        antecedent, consequent = query.antecedent, query.consequent
        levels = rkb.exceptionality_seq
        i = 0
        while i < len(levels) and not self.oracle.is_satisfiable(
            rkb.tbox_star, rkb.rbox, self._with_defaults(levels[i], antecedent)
        ):
            i += 1
        if i < len(levels):
            answer = self.oracle.entails(
                rkb.tbox_star, rkb.rbox, self._with_defaults(levels[i], antecedent), consequent
            )
        else:
            answer = self.oracle.entails(rkb.tbox_star, rkb.rbox, antecedent, consequent)
        logger.debug(f"Rational closure: {query.render()} -> {answer} (level {i})")
        return answer

    def _with_defaults(self, level: FrozenSet, concept):
        return conjunction({*self.materialize(level), concept})

    def characterizes(self, rkb: RankedKB, query: DefeasibleQuery) -> bool:
        """r(C) = ∞ or r(C) < r(C ⊓ ¬D)."""
        rank = self.rank_of_concept(rkb, query.antecedent)
        if rank == INFINITE_RANK:
            return True
        exception = And(children=(query.antecedent, negation(query.consequent)))
        return rank < self.rank_of_concept(rkb, exception)
