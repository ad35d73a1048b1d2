"""
Pydantic schemas for ranked defeasible knowledge bases.
"""

from typing import FrozenSet, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.schemas.knowledge_base import (
    ConceptAxiom,
    DefeasibleAxiom,
    KnowledgeBase,
    RoleAxiom,
)


class RankedAxiom(BaseModel):
    model_config = ConfigDict(frozen=True)

    axiom: DefeasibleAxiom
    rank: int = Field(ge=0)


class RankedKB(BaseModel):
    """
    Output of the ranking procedure: ⟨T*, R, D*⟩ plus the exceptionality sequence.

    `exceptionality_seq` is the (E_0, ..., E_n) of the last ranking round and
    `promoted` the defeasible axioms of infinite rank, now strict in T*.
    """

    model_config = ConfigDict(frozen=True)

    concepts: FrozenSet[str] = frozenset()
    roles: FrozenSet[str] = frozenset()
    individuals: FrozenSet[str] = frozenset()
    tbox_star: FrozenSet[ConceptAxiom] = frozenset()
    rbox: FrozenSet[RoleAxiom] = frozenset()
    dbox_star: FrozenSet[DefeasibleAxiom] = frozenset()
    ranks: Tuple[RankedAxiom, ...] = ()
    exceptionality_seq: Tuple[FrozenSet[DefeasibleAxiom], ...] = ()
    promoted: FrozenSet[DefeasibleAxiom] = frozenset()

    @model_validator(mode="after")
    def _consistent_sequence(self) -> "RankedKB":
        if self.exceptionality_seq and self.exceptionality_seq[0] != self.dbox_star:
            raise ValueError("E_0 must equal the ranked DBox")
        for outer, inner in zip(self.exceptionality_seq, self.exceptionality_seq[1:]):
            if not inner <= outer:
                raise ValueError("exceptionality sequence must be decreasing")
        if {entry.axiom for entry in self.ranks} != set(self.dbox_star):
            raise ValueError("every ranked axiom needs exactly one rank")
        return self

    @property
    def max_rank(self) -> int:
        """Highest index n of the exceptionality sequence, -1 when it is empty."""
        return len(self.exceptionality_seq) - 1

    def rank_of(self, axiom: DefeasibleAxiom) -> Optional[int]:
        """Finite rank of a ranked axiom; None for promoted or unknown axioms."""
        for entry in self.ranks:
            if entry.axiom == axiom:
                return entry.rank
        return None

    def axioms_of_rank(self, rank: int) -> list:
        return sorted(
            (entry.axiom for entry in self.ranks if entry.rank == rank),
            key=lambda axiom: axiom.render(),
        )

    def strict_kb(self) -> KnowledgeBase:
        """⟨T*, R⟩ as a classical knowledge base over the same signature."""
        return KnowledgeBase(
            concepts=self.concepts,
            roles=self.roles,
            individuals=self.individuals,
            tbox=self.tbox_star,
            rbox=self.rbox,
        )
