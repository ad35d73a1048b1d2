"""
Controller for the `ddl` commands.

Composes the services into the rank / compile / solve / entail /
check-postulates pipelines and turns failures into exit codes: 0 for
success or `yes`, 1 for `no` or postulate failures, 2 for errors.
"""

import logging
from typing import Callable, Optional, Tuple

from pydantic import BaseModel, ValidationError

from app.exceptions import DdlError
from app.repositories.verdict_repository import VerdictRepository
from app.schemas.config import RunConfig
from app.schemas.knowledge_base import DefeasibleQuery, KnowledgeBase
from app.schemas.oracle import OracleEndpoint
from app.schemas.reports import (
    CompileReport,
    EntailReport,
    ErrorReport,
    PostulateReport,
    RankEntry,
    RankReport,
    SolveReport,
)
from app.services.compiler_service import CompilerService
from app.services.engine_service import EngineService
from app.services.oracle_service import OracleService
from app.services.postulate_service import PostulateService
from app.services.ranking_service import RankingService
from app.services.syntax_service import SyntaxService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO = 1
EXIT_ERROR = 2

Outcome = Tuple[int, BaseModel]


class ReasoningController:
    """
    Controller for defeasible reasoning commands.
    """

    def __init__(self, cfg: RunConfig, oracle: Optional[OracleService] = None):
        """Initialize controller with the services one run needs."""
        self.cfg = cfg
        endpoint = OracleEndpoint(command=cfg.oracle, timeout=cfg.timeout) if cfg.oracle else None
        self.oracle = oracle or OracleService(endpoint=endpoint, repository=VerdictRepository())
        self.syntax_service = SyntaxService()
        self.ranking_service = RankingService(self.oracle)
        self.compiler_service = CompilerService()
        self.engine_service = EngineService(self.oracle)
        self.postulate_service = PostulateService(
            self.oracle, self.ranking_service, self.compiler_service, self.engine_service, self.syntax_service
        )
        logger.debug(f"ReasoningController initialized (external oracle: {bool(endpoint)})")

    def _guarded(self, action: Callable[[], Outcome]) -> Outcome:
        try:
            return action()
        except (DdlError, ValidationError, ValueError, OSError) as e:
            logger.error(f"{type(e).__name__}: {e}")
            return EXIT_ERROR, ErrorReport(error=type(e).__name__, message=str(e))

    def _load_kb(self) -> KnowledgeBase:
        if self.cfg.input_path is None:
            raise ValueError("an input KB file is required")
        return self.syntax_service.parse_kb(self.cfg.input_path.read_text(encoding="utf-8"))

    def cmd_rank(self) -> Outcome:
        """
        Rank the defeasible axioms of the input KB.

        Returns:
            (exit code, RankReport or ErrorReport)
        """

        def run() -> Outcome:
            rkb = self.ranking_service.compute_ranking(self._load_kb())
            report = RankReport(
                axioms=[
                    RankEntry(axiom=entry.axiom.render(), rank=entry.rank)
                    for entry in sorted(rkb.ranks, key=lambda e: (e.rank, e.axiom.render()))
                ],
                promoted=sorted(axiom.render() for axiom in rkb.promoted),
                exceptionality_sizes=[len(level) for level in rkb.exceptionality_seq],
            )
            return EXIT_OK, report

        return self._guarded(run)

    def cmd_compile(self) -> Outcome:
        """Compile the ranked input KB into the dl-program text format."""

        def run() -> Outcome:
            rkb = self.ranking_service.compute_ranking(self._load_kb())
            program = self.compiler_service.compile(rkb)
            report = CompileReport(
                program=self.compiler_service.render_program(program),
                rule_count=len(program.rules),
                lambda_size=len(program.lambda_),
            )
            return EXIT_OK, report

        return self._guarded(run)

    def cmd_solve(self) -> Outcome:
        """
        Strong answer sets of the compiled program, or a consequence query.

        With `--query` the mode decides cautious or brave consequence (`all`
        counts as cautious); the exit code is 0 for yes and 1 for no.
        """

        def run() -> Outcome:
            rkb = self.ranking_service.compute_ranking(self._load_kb())
            program = self.compiler_service.compile(rkb)
            base = rkb.strict_kb()
            if self.cfg.query is None:
                answer_sets = self.engine_service.strong_answer_sets(base, program)
                return EXIT_OK, SolveReport.from_answer_sets(self.cfg.mode, answer_sets)
            query = self.syntax_service.parse_literal(self.cfg.query)
            mode = "cautious" if self.cfg.mode == "all" else self.cfg.mode
            answer = self.engine_service.consequence(base, program, query, mode)
            report = SolveReport(mode=mode, query=query.render(), answer=answer)
            return (EXIT_OK if answer else EXIT_NO), report

        return self._guarded(run)

    def cmd_entail(self) -> Outcome:
        """Answer `C ~[= D` by rational closure or `C [= D` classically over T* ∪ R."""

        def run() -> Outcome:
            if not self.cfg.query:
                raise ValueError("entail needs --query")
            kb = self._load_kb()
            query = self.syntax_service.parse_query(self.cfg.query, kb)
            if isinstance(query, DefeasibleQuery):
                answer = self.ranking_service.rational_closure_entails(kb, query)
                kind = "defeasible"
            else:
                rkb = self.ranking_service.compute_ranking(kb)
                answer = self.oracle.entails(rkb.tbox_star, rkb.rbox, query.lhs, query.rhs)
                kind = "strict"
            logger.info(f"{query.render()}: {'yes' if answer else 'no'}")
            return (EXIT_OK if answer else EXIT_NO), EntailReport(query=query.render(), kind=kind, answer=answer)

        return self._guarded(run)

    def cmd_check_postulates(self) -> Outcome:
        """Run the postulate harness; exit 1 when any postulate fails."""

        def run() -> Outcome:
            report: PostulateReport = self.postulate_service.check(
                self.cfg.seed, self.cfg.cases, self.cfg.artifacts_dir
            )
            return (EXIT_NO if report.failures else EXIT_OK), report

        return self._guarded(run)
