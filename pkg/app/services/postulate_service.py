"""
Postulate service: randomized property checks of both entailment relations.

Rational closure is checked against the KLM rational postulates (REF, LLE,
RW, CT, OR, RM). Entailment under an answer set is checked against their
assertional counterparts; a case only counts when the answer set in use is
an answer set of every augmented base the postulate mentions, otherwise it
is skipped.
"""

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional

from app.schemas.concepts import And, Atom, Not, Or, nominal
from app.schemas.knowledge_base import ConceptInclusion, DefeasibleQuery, KnowledgeBase, assertion
from app.schemas.program import DlProgram, Interpretation
from app.schemas.reports import PostulateOutcome, PostulateReport
from app.services.compiler_service import CompilerService
from app.services.engine_service import EngineService
from app.services.generator_service import GeneratorService
from app.services.oracle_service import OracleService
from app.services.ranking_service import RankingService
from app.services.syntax_service import SyntaxService

logger = logging.getLogger(__name__)

RATIONAL_POSTULATES = ("REF", "LLE", "RW", "CT", "OR", "RM")
ANSWER_SET_POSTULATES = ("REF_DL", "LLE_DL", "RW_DL", "CT_DL", "OR_DL", "RM_DL")

# None = premises not met (skipped), True = held, False = violated
Verdict = Optional[bool]


def _rule(premise: bool, conclusion: Callable[[], bool]) -> Verdict:
    return conclusion() if premise else None


class _AnswerSetContext:
    """⟨L, P⟩ with one fixed answer set I, and ⊨_{P^I} over augmented bases."""

    def __init__(self, engine: EngineService, oracle: OracleService, base: KnowledgeBase, program: DlProgram, answer_set: Interpretation):
        self.engine = engine
        self.oracle = oracle
        self.base = base
        self.program = program
        self.answer_set = answer_set
        self._valid: Dict[KnowledgeBase, bool] = {base: True}

    def augmented(self, concept, individual: str) -> KnowledgeBase:
        return self.base.with_tbox([assertion(concept, individual)])

    def valid(self, kb: KnowledgeBase) -> bool:
        if kb not in self._valid:
            self._valid[kb] = self.engine.is_strong_answer_set(kb, self.program, self.answer_set)
        return self._valid[kb]

    def entails(self, kb: KnowledgeBase, concept, individual: str) -> bool:
        extra = self.engine.translate(kb, self.program, self.answer_set)
        return self.oracle.entails(kb.tbox | extra, kb.rbox, nominal(individual), concept)


class PostulateService:
    """
    Seeded harness over generated knowledge bases.
    """

    def __init__(
        self,
        oracle: OracleService,
        ranking: RankingService,
        compiler: CompilerService,
        engine: EngineService,
        syntax: Optional[SyntaxService] = None,
    ):
        self.oracle = oracle
        self.ranking = ranking
        self.compiler = compiler
        self.engine = engine
        self.syntax = syntax or SyntaxService()

    @staticmethod
    def case_seed(seed: int, index: int) -> int:
        """Reproduction seed of case `index` in a run seeded with `seed`."""
        return seed * 10_000 + index

    def check(self, seed: int, cases: int, artifacts_dir: Optional[Path] = None) -> PostulateReport:
        """
        Run every postulate on `cases` generated knowledge bases.

        Args:
            seed: Run seed; case i uses case_seed(seed, i)
            cases: Number of generated knowledge bases
            artifacts_dir: Directory receiving one KB file per failing case

        Returns:
            PostulateReport with pass/fail/skip counts per postulate
        """
        outcomes = {name: PostulateOutcome(name=name, family="rational_closure") for name in RATIONAL_POSTULATES}
        outcomes.update({name: PostulateOutcome(name=name, family="answer_set") for name in ANSWER_SET_POSTULATES})
        artifacts: List[str] = []

        for index in range(cases):
            case_seed = self.case_seed(seed, index)
            generator = GeneratorService(case_seed)
            kb = generator.random_kb()
            verdicts = {**self.check_rational_closure(kb, generator), **self.check_answer_set(kb, generator)}
            for name, verdict in verdicts.items():
                outcome = outcomes[name]
                if verdict is None:
                    outcome.skipped += 1
                elif verdict:
                    outcome.passed += 1
                else:
                    outcome.failed += 1
                    outcome.failing_seeds.append(case_seed)
                    logger.error(f"{name} violated on case seed {case_seed}")
                    if artifacts_dir is not None:
                        artifacts.append(str(self._dump(kb, artifacts_dir, name, case_seed)))

        report = PostulateReport(seed=seed, cases=cases, outcomes=list(outcomes.values()), artifacts=artifacts)
        logger.info(f"Postulate check: {cases} cases, {report.failures} failures")
        return report

    def _dump(self, kb: KnowledgeBase, directory: Path, name: str, case_seed: int) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{name.lower()}-{case_seed}.kb"
        path.write_text(self.syntax.serialize_kb(kb), encoding="utf-8")
        return path

    # --- rational closure ------------------------------------------------

    def check_rational_closure(self, kb: KnowledgeBase, generator: GeneratorService) -> Dict[str, Verdict]:
        """One verdict per KLM postulate on queries drawn from `generator`."""
        rkb = self.ranking.compute_ranking(kb)

        def rat(antecedent, consequent) -> bool:
            return self.ranking.entails_ranked(rkb, DefeasibleQuery(antecedent=antecedent, consequent=consequent))

        def classical(lhs, rhs) -> bool:
            return self.oracle.entails(kb.tbox, kb.rbox, lhs, rhs)

        c, d, f = (self._premise_concept(kb, generator) for _ in range(3))
        pivot = Atom(name=generator.random.choice(sorted(kb.concepts)))
        variant = generator.equivalent_variant(c, kb)
        weaker = Or(children=(d, pivot))

        return {
            "REF": rat(c, c),
            "LLE": _rule(rat(c, f) and classical(c, variant) and classical(variant, c), lambda: rat(variant, f)),
            "RW": _rule(rat(c, d) and classical(d, weaker), lambda: rat(c, weaker)),
            "CT": _rule(rat(c, d) and rat(And(children=(c, d)), f), lambda: rat(c, f)),
            "OR": _rule(rat(c, f) and rat(d, f), lambda: rat(Or(children=(c, d)), f)),
            "RM": _rule(rat(c, f) and not rat(c, Not(child=d)), lambda: rat(And(children=(c, d)), f)),
        }

    @staticmethod
    def _premise_concept(kb: KnowledgeBase, generator: GeneratorService):
        """Mostly sides of defeasible axioms, so premises hold often enough."""
        if kb.dbox and generator.random.random() < 0.6:
            axiom = generator.random.choice(kb.sorted_dbox())
            return generator.random.choice((axiom.antecedent, axiom.consequent))
        return generator.query_concept(kb)

    # --- entailment under an answer set ----------------------------------

    def check_answer_set(self, kb: KnowledgeBase, generator: GeneratorService) -> Dict[str, Verdict]:
        """One verdict per assertional postulate; all skipped when there is no answer set."""
        rkb = self.ranking.compute_ranking(kb)
        program = self.compiler.compile(rkb)
        base = rkb.strict_kb()
        answer_sets = self.engine.strong_answer_sets(base, program)
        if not answer_sets:
            return {name: None for name in ANSWER_SET_POSTULATES}
        ctx = _AnswerSetContext(self.engine, self.oracle, base, program, generator.random.choice(answer_sets))

        individuals = sorted(kb.individuals)
        a, b = generator.random.choice(individuals), generator.random.choice(individuals)
        c, d, e = (self._premise_concept(kb, generator) for _ in range(3))
        variant = generator.equivalent_variant(d, kb)
        weaker = Or(children=(c, Atom(name=generator.random.choice(sorted(kb.concepts)))))
        with_d = ctx.augmented(d, b)
        with_e = ctx.augmented(e, b)

        def classical(lhs, rhs) -> bool:
            return self.oracle.entails(base.tbox, base.rbox, lhs, rhs)

        return {
            "REF_DL": self._reflexivity(ctx),
            "LLE_DL": _rule(
                ctx.valid(with_d)
                and ctx.valid(ctx.augmented(variant, b))
                and ctx.entails(with_d, c, a)
                and classical(d, variant)
                and classical(variant, d),
                lambda: ctx.entails(ctx.augmented(variant, b), c, a),
            ),
            "RW_DL": _rule(ctx.entails(base, c, a) and classical(c, weaker), lambda: ctx.entails(base, weaker, a)),
            "CT_DL": _rule(
                ctx.valid(with_d) and ctx.entails(with_d, c, a) and ctx.entails(base, d, b),
                lambda: ctx.entails(base, c, a),
            ),
            "OR_DL": _rule(
                ctx.valid(with_d)
                and ctx.valid(with_e)
                and ctx.valid(ctx.augmented(Or(children=(d, e)), b))
                and ctx.entails(with_d, c, a)
                and ctx.entails(with_e, c, a),
                lambda: ctx.entails(ctx.augmented(Or(children=(d, e)), b), c, a),
            ),
            "RM_DL": _rule(
                ctx.valid(with_d) and ctx.entails(base, c, a) and not ctx.entails(base, Not(child=d), b),
                lambda: ctx.entails(with_d, c, a),
            ),
        }

    @staticmethod
    def _reflexivity(ctx: _AnswerSetContext) -> Verdict:
        asserted = [
            axiom
            for axiom in ctx.base.sorted_tbox()
            if isinstance(axiom, ConceptInclusion) and axiom.lhs.kind == "nominals" and len(axiom.lhs.individuals) == 1
        ]
        if not asserted:
            return None
        return all(ctx.entails(ctx.base, axiom.rhs, axiom.lhs.individuals[0]) for axiom in asserted)
