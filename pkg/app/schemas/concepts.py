"""
Pydantic schemas for concept and role expressions.

Every node is a frozen model, so expressions are hashable values that can sit
in sets and serve as dictionary keys. Variants are told apart by the `kind`
discriminator.
"""

from typing import Annotated, ClassVar, Iterable, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

# Rendering precedence: | binds loosest, then &, then prefix operators.
_OR_LEVEL = 1
_AND_LEVEL = 2
_UNARY_LEVEL = 3


class ExpressionModel(BaseModel):
    """Base for immutable expression nodes."""

    model_config = ConfigDict(frozen=True)

    level: ClassVar[int] = _UNARY_LEVEL

    def render(self, neg: str = "!") -> str:
        raise NotImplementedError

    def _wrapped(self, min_level: int, neg: str) -> str:
        text = self.render(neg)
        return f"({text})" if self.level < min_level else text

    def __str__(self) -> str:
        return self.render()


# --- roles ------------------------------------------------------------------


class NamedRole(ExpressionModel):
    kind: Literal["named"] = "named"
    name: str

    def render(self, neg: str = "!") -> str:
        return self.name


class InverseRole(ExpressionModel):
    """R⁻ over a role name; the inverse of an inverse is the named role."""

    kind: Literal["inverse"] = "inverse"
    name: str

    def render(self, neg: str = "!") -> str:
        return f"inv({self.name})"


class UniversalRole(ExpressionModel):
    kind: Literal["universal"] = "universal"

    def render(self, neg: str = "!") -> str:
        return "UNIVERSAL"


SimpleRole = Annotated[Union[NamedRole, InverseRole, UniversalRole], Field(discriminator="kind")]


class RoleChain(ExpressionModel):
    """R₁∘…∘Rₙ; only valid on the left of a role inclusion."""

    kind: Literal["chain"] = "chain"
    roles: Tuple[Annotated[Union[NamedRole, InverseRole], Field(discriminator="kind")], ...] = Field(
        min_length=2
    )

    def render(self, neg: str = "!") -> str:
        return " o ".join(role.render(neg) for role in self.roles)


RoleExpr = Annotated[
    Union[NamedRole, InverseRole, UniversalRole, RoleChain], Field(discriminator="kind")
]


def inverse_of(role: Union[NamedRole, InverseRole]) -> Union[NamedRole, InverseRole]:
    """Return R⁻ for R and R for R⁻."""
    if isinstance(role, InverseRole):
        return NamedRole(name=role.name)
    return InverseRole(name=role.name)


# --- concepts ---------------------------------------------------------------


class Top(ExpressionModel):
    kind: Literal["top"] = "top"

    def render(self, neg: str = "!") -> str:
        return "TOP"


class Bottom(ExpressionModel):
    kind: Literal["bottom"] = "bottom"

    def render(self, neg: str = "!") -> str:
        return "BOT"


class Atom(ExpressionModel):
    kind: Literal["atom"] = "atom"
    name: str

    def render(self, neg: str = "!") -> str:
        return self.name


class Nominals(ExpressionModel):
    kind: Literal["nominals"] = "nominals"
    individuals: Tuple[str, ...] = Field(min_length=1)

    @field_validator("individuals")
    @classmethod
    def _duplicate_free(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if len(set(value)) != len(value):
            raise ValueError(f"nominal set has duplicate individuals: {value}")
        return value

    def render(self, neg: str = "!") -> str:
        return "{" + ", ".join(self.individuals) + "}"


class Not(ExpressionModel):
    kind: Literal["not"] = "not"
    child: "ConceptExpr"

    def render(self, neg: str = "!") -> str:
        return neg + self.child._wrapped(_UNARY_LEVEL, neg)


class And(ExpressionModel):
    kind: Literal["and"] = "and"
    level: ClassVar[int] = _AND_LEVEL
    children: Tuple["ConceptExpr", ...] = Field(min_length=2)

    def render(self, neg: str = "!") -> str:
        return " & ".join(child._wrapped(_UNARY_LEVEL, neg) for child in self.children)


class Or(ExpressionModel):
    kind: Literal["or"] = "or"
    level: ClassVar[int] = _OR_LEVEL
    children: Tuple["ConceptExpr", ...] = Field(min_length=2)

    def render(self, neg: str = "!") -> str:
        return " | ".join(child._wrapped(_AND_LEVEL, neg) for child in self.children)


class Exists(ExpressionModel):
    kind: Literal["exists"] = "exists"
    role: SimpleRole
    child: "ConceptExpr"

    def render(self, neg: str = "!") -> str:
        return f"exists {self.role.render(neg)} . {self.child._wrapped(_UNARY_LEVEL, neg)}"


class Forall(ExpressionModel):
    kind: Literal["forall"] = "forall"
    role: SimpleRole
    child: "ConceptExpr"

    def render(self, neg: str = "!") -> str:
        return f"forall {self.role.render(neg)} . {self.child._wrapped(_UNARY_LEVEL, neg)}"


class AtLeast(ExpressionModel):
    kind: Literal["at_least"] = "at_least"
    n: int = Field(ge=0)
    role: SimpleRole
    child: "ConceptExpr"

    def render(self, neg: str = "!") -> str:
        return f">= {self.n} {self.role.render(neg)} . {self.child._wrapped(_UNARY_LEVEL, neg)}"


class AtMost(ExpressionModel):
    kind: Literal["at_most"] = "at_most"
    n: int = Field(ge=0)
    role: SimpleRole
    child: "ConceptExpr"

    def render(self, neg: str = "!") -> str:
        return f"<= {self.n} {self.role.render(neg)} . {self.child._wrapped(_UNARY_LEVEL, neg)}"


class SelfRestriction(ExpressionModel):
    kind: Literal["self"] = "self"
    role: SimpleRole

    def render(self, neg: str = "!") -> str:
        return f"self {self.role.render(neg)}"


ConceptExpr = Annotated[
    Union[
        Top,
        Bottom,
        Atom,
        Nominals,
        Not,
        And,
        Or,
        Exists,
        Forall,
        AtLeast,
        AtMost,
        SelfRestriction,
    ],
    Field(discriminator="kind"),
]

for _model in (Not, And, Or, Exists, Forall, AtLeast, AtMost):
    _model.model_rebuild()


# --- builders ---------------------------------------------------------------

TOP = Top()
BOTTOM = Bottom()


def atom(name: str) -> Atom:
    return Atom(name=name)


def nominal(*individuals: str) -> Nominals:
    return Nominals(individuals=tuple(individuals))


def negation(concept) -> Not:
    return Not(child=concept)


def some(role: str, concept) -> Exists:
    return Exists(role=NamedRole(name=role), child=concept)


def only(role: str, concept) -> Forall:
    return Forall(role=NamedRole(name=role), child=concept)


def canonical_order(concepts: Iterable) -> list:
    """Sort expressions lexicographically by their rendering."""
    return sorted(set(concepts), key=lambda expr: expr.render())


def conjunction(concepts: Iterable):
    """⊓ over a collection in canonical order; ⊤ when empty."""
    ordered = canonical_order(concepts)
    if not ordered:
        return TOP
    if len(ordered) == 1:
        return ordered[0]
    return And(children=tuple(ordered))


def disjunction(concepts: Iterable):
    """⊔ over a collection in canonical order; ⊥ when empty."""
    ordered = canonical_order(concepts)
    if not ordered:
        return BOTTOM
    if len(ordered) == 1:
        return ordered[0]
    return Or(children=tuple(ordered))


def is_literal(concept) -> bool:
    """True for Atom, Not(Atom), Top and Bottom."""
    if isinstance(concept, (Atom, Top, Bottom)):
        return True
    return isinstance(concept, Not) and isinstance(concept.child, Atom)


def concept_names(concept) -> set:
    """Concept names occurring in an expression."""
    found = set()
    _collect(concept, found, set(), set())
    return found


def signature_of(concept) -> Tuple[set, set, set]:
    """(concept names, role names, individuals) occurring in an expression."""
    concepts, roles, individuals = set(), set(), set()
    _collect(concept, concepts, roles, individuals)
    return concepts, roles, individuals


def role_names(role) -> set:
    if isinstance(role, (NamedRole, InverseRole)):
        return {role.name}
    if isinstance(role, RoleChain):
        return {part.name for part in role.roles}
    return set()


def _collect(concept, concepts: set, roles: set, individuals: set) -> None:
    if isinstance(concept, Atom):
        concepts.add(concept.name)
    elif isinstance(concept, Nominals):
        individuals.update(concept.individuals)
    elif isinstance(concept, Not):
        _collect(concept.child, concepts, roles, individuals)
    elif isinstance(concept, (And, Or)):
        for child in concept.children:
            _collect(child, concepts, roles, individuals)
    elif isinstance(concept, (Exists, Forall, AtLeast, AtMost)):
        roles.update(role_names(concept.role))
        _collect(concept.child, concepts, roles, individuals)
    elif isinstance(concept, SelfRestriction):
        roles.update(role_names(concept.role))
