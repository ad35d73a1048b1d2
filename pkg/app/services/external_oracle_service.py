"""
External oracle service: delegates classical entailment to a reasoner process.

Line protocol over the child's standard streams:

    QUERY
    <canonical KB serialization>
    ASK <C> [= <D>
    END

The child answers exactly one line, `yes` or `no`. Satisfiability of C is
asked as `C [= BOT` and negated.
"""

import logging
import shlex
import subprocess
import threading

from app.exceptions import OracleProtocolError, OracleSpawnError, OracleTimeoutError
from app.schemas.concepts import BOTTOM
from app.schemas.knowledge_base import ConceptInclusion, KnowledgeBase, axiom_signature
from app.schemas.oracle import ConceptSatisfiable, OracleEndpoint, OracleQuery, OracleVerdict, Subsumption
from app.services.syntax_service import SyntaxService

logger = logging.getLogger(__name__)


class ExternalOracleService:
    """
    Client for one external oracle endpoint; calls are serialized per endpoint.
    """

    def __init__(self, endpoint: OracleEndpoint):
        self.endpoint = endpoint
        self.syntax_service = SyntaxService()
        self._lock = threading.Lock()

    def render_request(self, query: OracleQuery) -> str:
        """Protocol text for one query."""
        goal = query.goal
        if isinstance(goal, ConceptSatisfiable):
            goal = Subsumption(lhs=goal.concept, rhs=BOTTOM)
        concepts, roles, individuals = set(), set(), set()
        for axiom in (*query.tbox, *query.rbox, ConceptInclusion(lhs=goal.lhs, rhs=goal.rhs)):
            found = axiom_signature(axiom)
            concepts |= found[0]
            roles |= found[1]
            individuals |= found[2]
        kb = KnowledgeBase(
            concepts=frozenset(concepts),
            roles=frozenset(roles),
            individuals=frozenset(individuals),
            tbox=query.tbox,
            rbox=query.rbox,
        )
        return f"QUERY\n{self.syntax_service.serialize_kb(kb)}ASK {goal.render()}\nEND\n"

    def external_entails(self, query: OracleQuery) -> OracleVerdict:
        """
        Ask the external reasoner.

        Args:
            query: Oracle query

        Returns:
            OracleVerdict with source `external`; for satisfiability goals the
            answer is already negated back

        Raises:
            OracleSpawnError: If the command cannot be started
            OracleTimeoutError: If no answer arrives within the timeout
            OracleProtocolError: If the reply is not `yes` or `no`
        """
        request = self.render_request(query)
        with self._lock:
            try:
                process = subprocess.Popen(
                    shlex.split(self.endpoint.command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.PIPE,
                    text=True,
                )
            except (OSError, ValueError) as e:
                logger.error(f"Failed to start oracle '{self.endpoint.command}': {e}")
                raise OracleSpawnError(f"Failed to start oracle '{self.endpoint.command}': {e}")
            try:
                output, errors = process.communicate(request, timeout=self.endpoint.timeout)
            except subprocess.TimeoutExpired:
                process.kill()
                process.communicate()
                logger.error(f"Oracle timed out after {self.endpoint.timeout}s")
                raise OracleTimeoutError(f"Oracle did not answer within {self.endpoint.timeout}s")

        reply = output.strip().splitlines()
        if len(reply) != 1 or reply[0].strip() not in ("yes", "no"):
            logger.error(f"Oracle protocol violation: {output!r} (stderr: {errors.strip()!r})")
            raise OracleProtocolError(f"Oracle must answer 'yes' or 'no', got {output.strip()!r}")
        entailed = reply[0].strip() == "yes"
        answer = not entailed if isinstance(query.goal, ConceptSatisfiable) else entailed
        logger.debug(f"External oracle: {query.goal.render()} -> {answer}")
        return OracleVerdict(answer=answer, source="external")

