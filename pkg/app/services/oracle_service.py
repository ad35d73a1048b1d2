"""
Oracle service: the single entry point for classical DL entailment.

Queries inside ALCO with an empty RBox go to the internal tableau; anything
else goes to the configured external oracle. Verdicts are memoized in the
verdict repository under the SHA-256 of the canonical query text.
"""

import logging
from functools import lru_cache
from typing import Iterable, Optional

from app.exceptions import UnsupportedConstructError
from app.repositories.verdict_repository import VerdictRepository
from app.schemas.concepts import TOP
from app.schemas.knowledge_base import KnowledgeBase
from app.schemas.oracle import ConceptSatisfiable, OracleEndpoint, OracleQuery, OracleVerdict, Subsumption
from app.services.external_oracle_service import ExternalOracleService
from app.services.hashing_service import HashingService
from app.services.normal_form_service import NormalFormService
from app.services.tableau_service import TableauService, in_alco, tbox_in_alco

logger = logging.getLogger(__name__)


@lru_cache(maxsize=1024)
def _expanded(tbox: frozenset) -> frozenset:
    return NormalFormService.expand_tbox(tbox)


class OracleService:
    """
    Memoizing dispatcher between the internal tableau and an external reasoner.
    """

    def __init__(
        self,
        endpoint: Optional[OracleEndpoint] = None,
        repository: Optional[VerdictRepository] = None,
        tableau: Optional[TableauService] = None,
    ):
        self.endpoint = endpoint
        self.repository = repository if repository is not None else VerdictRepository()
        self.tableau = tableau or TableauService()
        self.external = ExternalOracleService(endpoint) if endpoint else None
        self.internal_calls = 0
        self.external_calls = 0

    def ask(self, query: OracleQuery) -> OracleVerdict:
        """
        Answer one query, from the memo table when possible.

        Args:
            query: Oracle query; equalities in its TBox are expanded first

        Returns:
            The verdict

        Raises:
            UnsupportedConstructError: Outside ALCO (or with RBox axioms) and no external oracle
            OracleError: From the external oracle
            TableauBudgetExceededError: From the internal tableau
        """
        query = query.model_copy(update={"tbox": _expanded(query.tbox)})
        key = HashingService.query_key(query)
        verdict = self.repository.get(key)
        if verdict is not None:
            return verdict

        if self._internal(query):
            self.internal_calls += 1
            goal = query.goal
            if isinstance(goal, ConceptSatisfiable):
                answer = self.tableau.is_satisfiable(query.tbox, goal.concept)
            else:
                answer = self.tableau.entails(query.tbox, goal.lhs, goal.rhs)
            verdict = OracleVerdict(answer=answer, source="internal")
        elif self.external is not None:
            self.external_calls += 1
            verdict = self.external.external_entails(query)
        else:
            raise UnsupportedConstructError(
                f"'{query.goal.render()}' needs a reasoner beyond ALCO; configure --oracle"
            )
        self.repository.save(key, verdict)
        return verdict

    @staticmethod
    def _internal(query: OracleQuery) -> bool:
        goal = query.goal
        concepts = (goal.concept,) if isinstance(goal, ConceptSatisfiable) else (goal.lhs, goal.rhs)
        return not query.rbox and tbox_in_alco(query.tbox) and all(in_alco(c) for c in concepts)

    def entails(self, tbox: Iterable, rbox: Iterable, lhs, rhs) -> bool:
        """⟨tbox, rbox⟩ ⊨ lhs ⊑ rhs."""
        goal = Subsumption(lhs=lhs, rhs=rhs)
        return self.ask(OracleQuery(tbox=frozenset(tbox), rbox=frozenset(rbox), goal=goal)).answer

    def is_satisfiable(self, tbox: Iterable, rbox: Iterable, concept) -> bool:
        """Some model of ⟨tbox, rbox⟩ gives `concept` a non-empty extension."""
        goal = ConceptSatisfiable(concept=concept)
        return self.ask(OracleQuery(tbox=frozenset(tbox), rbox=frozenset(rbox), goal=goal)).answer

    def is_consistent(self, kb: KnowledgeBase) -> bool:
        """The classical part of `kb` has a model."""
        return self.is_satisfiable(kb.tbox, kb.rbox, TOP)

    def kb_entails(self, kb: KnowledgeBase, lhs, rhs) -> bool:
        return self.entails(kb.tbox, kb.rbox, lhs, rhs)

    def stats(self) -> dict:
        return {
            "internal": self.internal_calls,
            "external": self.external_calls,
            "cache_hits": self.repository.hits,
            "cache_misses": self.repository.misses,
        }
