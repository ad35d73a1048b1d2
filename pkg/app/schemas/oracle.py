"""
Pydantic schemas for classical entailment queries and their verdicts.
"""

from typing import Annotated, FrozenSet, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.concepts import ConceptExpr
from app.schemas.knowledge_base import ConceptAxiom, RoleAxiom


class Subsumption(BaseModel):
    """Goal `lhs ⊑ rhs`."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["subsumption"] = "subsumption"
    lhs: ConceptExpr
    rhs: ConceptExpr

    def render(self, neg: str = "!") -> str:
        return f"{self.lhs.render(neg)} [= {self.rhs.render(neg)}"


class ConceptSatisfiable(BaseModel):
    """Goal `concept` has a non-empty extension in some model."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["satisfiable"] = "satisfiable"
    concept: ConceptExpr

    def render(self, neg: str = "!") -> str:
        return f"sat {self.concept.render(neg)}"


OracleGoal = Annotated[Union[Subsumption, ConceptSatisfiable], Field(discriminator="kind")]


class OracleQuery(BaseModel):
    """A classical question over ⟨T, R⟩; the TBox holds no ConceptEquality."""

    model_config = ConfigDict(frozen=True)

    tbox: FrozenSet[ConceptAxiom] = frozenset()
    rbox: FrozenSet[RoleAxiom] = frozenset()
    goal: OracleGoal


class OracleVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    answer: bool = Field(description="Entailed (subsumption) or satisfiable (satisfiability)")
    source: Literal["internal", "external"]


class OracleEndpoint(BaseModel):
    """External reasoner command and its per-query timeout."""

    model_config = ConfigDict(frozen=True)

    command: str = Field(min_length=1)
    timeout: float = Field(default=30.0, gt=0)


class TableauOutcome(BaseModel):
    """Result of one tableau run with the number of rule applications it took."""

    model_config = ConfigDict(frozen=True)

    satisfiable: bool
    steps: int = Field(ge=0)
    nodes: Optional[int] = None
