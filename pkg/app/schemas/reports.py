"""
Pydantic report models returned by the reasoning controller.

Each report renders to text with `to_text()`; the JSON form is
`model_dump_json()`, so both formats carry the same fields.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field

from app.schemas.program import Interpretation, PredicateLiteral


class RankEntry(BaseModel):
    axiom: str
    rank: int


class RankReport(BaseModel):
    axioms: List[RankEntry] = Field(default_factory=list)
    promoted: List[str] = Field(default_factory=list, description="Axioms of infinite rank, now strict")
    exceptionality_sizes: List[int] = Field(default_factory=list)

    def to_text(self) -> str:
        if not self.axioms and not self.promoted:
            return "no defeasible axioms"
        lines = [f"rank {entry.rank}: {entry.axiom}" for entry in self.axioms]
        lines += [f"rank inf: {axiom}" for axiom in self.promoted]
        sizes = ", ".join(f"E_{index}={size}" for index, size in enumerate(self.exceptionality_sizes))
        lines.append(f"exceptionality: {sizes}" if sizes else "exceptionality: (empty)")
        return "\n".join(lines)


class CompileReport(BaseModel):
    program: str
    rule_count: int
    lambda_size: int

    def to_text(self) -> str:
        return self.program


class LiteralRecord(BaseModel):
    predicate: str
    args: List[str]
    negated: bool

    @classmethod
    def from_literal(cls, item: PredicateLiteral) -> "LiteralRecord":
        return cls(
            predicate=item.predicate,
            args=[term.name for term in item.terms],
            negated=item.negated,
        )

    def render(self) -> str:
        return f"{'-' if self.negated else ''}{self.predicate}({', '.join(self.args)})"


class SolveReport(BaseModel):
    mode: Literal["all", "cautious", "brave"]
    answer_sets: List[List[LiteralRecord]] = Field(default_factory=list)
    query: Optional[str] = None
    answer: Optional[bool] = None

    @classmethod
    def from_answer_sets(cls, mode: str, answer_sets: List[Interpretation], **extra) -> "SolveReport":
        records = [
            [LiteralRecord.from_literal(item) for item in answer_set.sorted_literals()]
            for answer_set in answer_sets
        ]
        return cls(mode=mode, answer_sets=records, **extra)

    def to_text(self) -> str:
        if self.query is not None:
            return "yes" if self.answer else "no"
        if not self.answer_sets:
            return "no answer sets"
        return "\n".join(
            "{" + ", ".join(record.render() for record in answer_set) + "}"
            for answer_set in self.answer_sets
        )


class EntailReport(BaseModel):
    query: str
    kind: Literal["defeasible", "strict"]
    answer: bool

    def to_text(self) -> str:
        return "yes" if self.answer else "no"


class PostulateOutcome(BaseModel):
    name: str
    family: Literal["rational_closure", "answer_set"]
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    failing_seeds: List[int] = Field(default_factory=list)


class PostulateReport(BaseModel):
    seed: int
    cases: int
    outcomes: List[PostulateOutcome] = Field(default_factory=list)
    artifacts: List[str] = Field(default_factory=list)

    @property
    def failures(self) -> int:
        return sum(outcome.failed for outcome in self.outcomes)

    def to_text(self) -> str:
        lines = [f"seed {self.seed}, {self.cases} cases"]
        for outcome in self.outcomes:
            line = (
                f"{outcome.family:<16} {outcome.name:<4} "
                f"pass {outcome.passed} fail {outcome.failed} skip {outcome.skipped}"
            )
            if outcome.failing_seeds:
                line += f" (seeds: {', '.join(str(seed) for seed in outcome.failing_seeds)})"
            lines.append(line)
        lines.append("all postulates hold" if not self.failures else f"{self.failures} failures")
        return "\n".join(lines)


class ErrorReport(BaseModel):
    error: str
    message: str

    def to_text(self) -> str:
        return f"error: {self.message}"
