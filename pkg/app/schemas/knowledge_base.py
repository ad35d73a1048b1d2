"""
Pydantic schemas for axioms and defeasible knowledge bases.
"""

from typing import Annotated, FrozenSet, Iterable, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.schemas.concepts import (
    ConceptExpr,
    ExpressionModel,
    Nominals,
    RoleExpr,
    SimpleRole,
    canonical_order,
    is_literal,
    role_names,
    signature_of,
)


class ConceptInclusion(ExpressionModel):
    kind: Literal["inclusion"] = "inclusion"
    lhs: ConceptExpr
    rhs: ConceptExpr

    def render(self, neg: str = "!") -> str:
        return f"{self.lhs.render(neg)} [= {self.rhs.render(neg)}"


class ConceptEquality(ExpressionModel):
    """C = D; kept as its own node and expanded only inside the reasoner."""

    kind: Literal["equality"] = "equality"
    lhs: ConceptExpr
    rhs: ConceptExpr

    def render(self, neg: str = "!") -> str:
        return f"{self.lhs.render(neg)} == {self.rhs.render(neg)}"


class RoleInclusion(ExpressionModel):
    kind: Literal["role_inclusion"] = "role_inclusion"
    lhs: RoleExpr
    rhs: SimpleRole

    def render(self, neg: str = "!") -> str:
        return f"{self.lhs.render(neg)} [= {self.rhs.render(neg)}"


class RoleProperty(ExpressionModel):
    kind: Literal["role_property"] = "role_property"
    property: Literal["trans", "fun", "ref", "irr", "sym", "asy"]
    role: SimpleRole

    def render(self, neg: str = "!") -> str:
        return f"{self.property}({self.role.render(neg)})"


class RoleDisjointness(ExpressionModel):
    kind: Literal["role_disjointness"] = "role_disjointness"
    first: SimpleRole
    second: SimpleRole

    def render(self, neg: str = "!") -> str:
        return f"disjoint({self.first.render(neg)}, {self.second.render(neg)})"


ConceptAxiom = Annotated[Union[ConceptInclusion, ConceptEquality], Field(discriminator="kind")]
RoleAxiom = Annotated[
    Union[RoleInclusion, RoleProperty, RoleDisjointness], Field(discriminator="kind")
]
Axiom = Annotated[
    Union[ConceptInclusion, ConceptEquality, RoleInclusion, RoleProperty, RoleDisjointness],
    Field(discriminator="kind"),
]


class DefeasibleQuery(BaseModel):
    """C ⊏̃ D over arbitrary concepts, as asked of the rational closure."""

    model_config = ConfigDict(frozen=True)

    antecedent: ConceptExpr
    consequent: ConceptExpr

    def render(self, neg: str = "!") -> str:
        return f"{self.antecedent.render(neg)} ~[= {self.consequent.render(neg)}"

    def __str__(self) -> str:
        return self.render()


class DefeasibleAxiom(DefeasibleQuery):
    """C ⊏̃ D stored in a DBox; both sides are atoms, negated atoms, TOP or BOT."""

    @field_validator("antecedent", "consequent")
    @classmethod
    def _literal_side(cls, value):
        if not is_literal(value):
            raise ValueError(
                f"defeasible axiom sides must be atoms, negated atoms, TOP or BOT, got '{value.render()}'"
            )
        return value


def axiom_signature(axiom) -> tuple:
    """(concept names, role names, individuals) mentioned by an axiom."""
    concepts, roles, individuals = set(), set(), set()
    if isinstance(axiom, (ConceptInclusion, ConceptEquality, DefeasibleQuery)):
        sides = (
            (axiom.antecedent, axiom.consequent)
            if isinstance(axiom, DefeasibleQuery)
            else (axiom.lhs, axiom.rhs)
        )
        for side in sides:
            found = signature_of(side)
            concepts |= found[0]
            roles |= found[1]
            individuals |= found[2]
    elif isinstance(axiom, RoleInclusion):
        roles = role_names(axiom.lhs) | role_names(axiom.rhs)
    elif isinstance(axiom, RoleProperty):
        roles = role_names(axiom.role)
    elif isinstance(axiom, RoleDisjointness):
        roles = role_names(axiom.first) | role_names(axiom.second)
    return concepts, roles, individuals


class KnowledgeBase(BaseModel):
    """L = ⟨T, R, D⟩ together with its signature ⟨𝒜t, 𝒮, 𝒪⟩."""

    model_config = ConfigDict(frozen=True)

    concepts: FrozenSet[str] = frozenset()
    roles: FrozenSet[str] = frozenset()
    individuals: FrozenSet[str] = frozenset()
    tbox: FrozenSet[ConceptAxiom] = frozenset()
    rbox: FrozenSet[RoleAxiom] = frozenset()
    dbox: FrozenSet[DefeasibleAxiom] = frozenset()

    @field_validator("concepts", "roles")
    @classmethod
    def _upper_initial(cls, value: FrozenSet[str]) -> FrozenSet[str]:
        for name in value:
            if not name[:1].isupper():
                raise ValueError(f"concept and role names start with an upper-case letter: '{name}'")
        return value

    @model_validator(mode="after")
    def _declared(self) -> "KnowledgeBase":
        for axiom in (*self.tbox, *self.rbox, *self.dbox):
            concepts, roles, individuals = axiom_signature(axiom)
            for kind, used, declared in (
                ("concept", concepts, self.concepts),
                ("role", roles, self.roles),
                ("individual", individuals, self.individuals),
            ):
                missing = used - declared
                if missing:
                    raise ValueError(f"undeclared {kind} '{sorted(missing)[0]}' in '{axiom.render()}'")
        return self

    def strict(self) -> "KnowledgeBase":
        """The classical part ⟨T, R⟩ with the same signature."""
        return self.model_copy(update={"dbox": frozenset()})

    def with_tbox(self, extra: Iterable) -> "KnowledgeBase":
        """A copy with additional concept axioms (no re-validation)."""
        return self.model_copy(update={"tbox": self.tbox | frozenset(extra)})

    def sorted_tbox(self) -> list:
        return canonical_order(self.tbox)

    def sorted_rbox(self) -> list:
        return canonical_order(self.rbox)

    def sorted_dbox(self) -> list:
        return sorted(self.dbox, key=lambda axiom: axiom.render())


def assertion(concept, individual: str) -> ConceptInclusion:
    """C(a) in its TBox form {a} ⊑ C."""
    return ConceptInclusion(lhs=Nominals(individuals=(individual,)), rhs=concept)
