"""
Pydantic schemas for dl-programs: literals, dl-atoms, rules, programs and interpretations.

Rendering follows the compiled-program text format: `-` for classical
negation, `not` for negation as failure, variables in upper case.
"""

from typing import Annotated, FrozenSet, Iterable, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.schemas.concepts import ConceptExpr, NamedRole
from app.schemas.knowledge_base import DefeasibleAxiom


class Term(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    variable: bool = False

    def __str__(self) -> str:
        return self.name


def var(name: str = "X") -> Term:
    return Term(name=name, variable=True)


def const(name: str) -> Term:
    return Term(name=name)


class PredicateLiteral(BaseModel):
    """p(t1, ..., tn) or its classical negation -p(t1, ..., tn)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["literal"] = "literal"
    predicate: str = Field(min_length=1)
    terms: Tuple[Term, ...] = Field(min_length=1, max_length=2)
    negated: bool = False

    @field_validator("predicate")
    @classmethod
    def _lower_initial(cls, value: str) -> str:
        if not value[:1].islower():
            raise ValueError(f"predicate names start with a lower-case letter: '{value}'")
        return value

    @property
    def is_ground(self) -> bool:
        return not any(term.variable for term in self.terms)

    @property
    def atom(self) -> "PredicateLiteral":
        return self if not self.negated else self.model_copy(update={"negated": False})

    def complement(self) -> "PredicateLiteral":
        return self.model_copy(update={"negated": not self.negated})

    def substitute(self, binding: dict) -> "PredicateLiteral":
        return self.model_copy(update={"terms": _substitute(self.terms, binding)})

    def sort_key(self) -> tuple:
        return (tuple(term.name for term in self.terms), self.predicate, self.negated)

    def render(self) -> str:
        args = ", ".join(str(term) for term in self.terms)
        return f"{'-' if self.negated else ''}{self.predicate}({args})"

    def __str__(self) -> str:
        return self.render()


def literal(predicate: str, *individuals: str, negated: bool = False) -> PredicateLiteral:
    """Ground literal over constants."""
    return PredicateLiteral(
        predicate=predicate, terms=tuple(const(name) for name in individuals), negated=negated
    )


class ConceptUpdate(BaseModel):
    """S ⊎ p for a concept S, possibly ¬E ⊎ ¬e."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["concept"] = "concept"
    concept: ConceptExpr
    predicate: str
    negated: bool = False

    def render(self) -> str:
        return f"{self.concept.render('-')} + {'-' if self.negated else ''}{self.predicate}"


class RoleUpdate(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["role"] = "role"
    role: NamedRole
    predicate: str

    def render(self) -> str:
        return f"{self.role.render()} + {self.predicate}"


UpdateElement = Annotated[Union[ConceptUpdate, RoleUpdate], Field(discriminator="kind")]


class ConceptQuery(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["concept"] = "concept"
    concept: ConceptExpr

    @property
    def arity(self) -> int:
        return 1

    def render(self) -> str:
        return self.concept.render("-")


class RoleQuery(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["role"] = "role"
    role: NamedRole

    @property
    def arity(self) -> int:
        return 2

    def render(self) -> str:
        return self.role.render()


DlQuery = Annotated[Union[ConceptQuery, RoleQuery], Field(discriminator="kind")]


class DlAtom(BaseModel):
    """DL[S1 ⊎ p1, ..., Sm ⊎ pm; Q](t)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["dl_atom"] = "dl_atom"
    updates: Tuple[UpdateElement, ...] = ()
    query: DlQuery
    terms: Tuple[Term, ...] = Field(min_length=1, max_length=2)

    @model_validator(mode="after")
    def _arity(self) -> "DlAtom":
        if len(self.terms) != self.query.arity:
            raise ValueError(
                f"dl-query '{self.query.render()}' takes {self.query.arity} terms, got {len(self.terms)}"
            )
        return self

    @property
    def is_ground(self) -> bool:
        return not any(term.variable for term in self.terms)

    def substitute(self, binding: dict) -> "DlAtom":
        return self.model_copy(update={"terms": _substitute(self.terms, binding)})

    def sort_key(self) -> tuple:
        return (tuple(term.name for term in self.terms), "DL", self.query.render())

    def render(self, shared: Optional[Tuple] = None) -> str:
        """`DL[lambda; Q](t)` when the updates are the program's shared list."""
        if shared is not None and self.updates == shared and self.updates:
            head = "lambda; "
        elif self.updates:
            head = ", ".join(update.render() for update in self.updates) + "; "
        else:
            head = ""
        args = ", ".join(str(term) for term in self.terms)
        return f"DL[{head}{self.query.render()}]({args})"

    def __str__(self) -> str:
        return self.render()


BodyElement = Annotated[Union[PredicateLiteral, DlAtom], Field(discriminator="kind")]


class RuleProvenance(BaseModel):
    """Which compilation schema produced a rule and from what."""

    model_config = ConfigDict(frozen=True)

    schema_tag: Literal["1", "2", "3"]
    source: Optional[DefeasibleAxiom] = None
    antecedent: Optional[ConceptExpr] = None


def _element_key(element) -> tuple:
    return element.sort_key()


class DlRule(BaseModel):
    """head ← B⁺, not B⁻; bodies are kept duplicate-free in canonical order."""

    model_config = ConfigDict(frozen=True)

    head: PredicateLiteral
    positive_body: Tuple[BodyElement, ...] = ()
    negative_body: Tuple[BodyElement, ...] = ()
    provenance: Optional[RuleProvenance] = Field(default=None, exclude=True)

    @field_validator("positive_body", "negative_body")
    @classmethod
    def _canonical(cls, value: Tuple) -> Tuple:
        return tuple(sorted(set(value), key=_element_key))

    @property
    def is_positive(self) -> bool:
        return not self.negative_body

    @property
    def is_ground(self) -> bool:
        return self.head.is_ground and all(
            element.is_ground for element in (*self.positive_body, *self.negative_body)
        )

    def variables(self) -> list:
        found = {
            term.name
            for element in (self.head, *self.positive_body, *self.negative_body)
            for term in element.terms
            if term.variable
        }
        return sorted(found)

    def dl_atoms(self) -> list:
        return [e for e in (*self.positive_body, *self.negative_body) if isinstance(e, DlAtom)]

    def substitute(self, binding: dict) -> "DlRule":
        return DlRule(
            head=self.head.substitute(binding),
            positive_body=tuple(element.substitute(binding) for element in self.positive_body),
            negative_body=tuple(element.substitute(binding) for element in self.negative_body),
            provenance=self.provenance,
        )

    def render(self, shared: Optional[Tuple] = None) -> str:
        parts = [_render_element(element, shared) for element in self.positive_body]
        parts += [f"not {_render_element(element, shared)}" for element in self.negative_body]
        if not parts:
            return f"{self.head.render()}."
        return f"{self.head.render()} :- {', '.join(parts)}."

    def __str__(self) -> str:
        return self.render()


def _render_element(element, shared: Optional[Tuple]) -> str:
    if isinstance(element, DlAtom):
        return element.render(shared)
    return element.render()


class DlProgram(BaseModel):
    """A set of dl-rules over constants C with the shared update list λ."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    rules: Tuple[DlRule, ...] = ()
    lambda_: Tuple[UpdateElement, ...] = Field(default=(), alias="lambda")
    constants: FrozenSet[str] = frozenset()

    def predicates(self) -> dict:
        """Predicate name → arity over rule literals and update targets."""
        found = {}
        for rule in self.rules:
            for element in (rule.head, *rule.positive_body, *rule.negative_body):
                if isinstance(element, PredicateLiteral):
                    found[element.predicate] = len(element.terms)
        for update in self.lambda_:
            found.setdefault(update.predicate, 1 if isinstance(update, ConceptUpdate) else 2)
        return found


class GroundProgram(BaseModel):
    """ground(P) with its Herbrand universe and base."""

    model_config = ConfigDict(frozen=True)

    rules: Tuple[DlRule, ...] = ()
    universe: FrozenSet[str] = frozenset()
    base: FrozenSet[PredicateLiteral] = frozenset()

    @model_validator(mode="after")
    def _ground(self) -> "GroundProgram":
        for rule in self.rules:
            if not rule.is_ground:
                raise ValueError(f"rule '{rule.render()}' is not ground")
        return self

    def with_rules(self, rules: Iterable[DlRule]) -> "GroundProgram":
        return self.model_copy(update={"rules": tuple(rules)})


class Interpretation(BaseModel):
    """A consistent set of ground literals."""

    model_config = ConfigDict(frozen=True)

    literals: FrozenSet[PredicateLiteral] = frozenset()

    @field_validator("literals")
    @classmethod
    def _consistent(cls, value: FrozenSet[PredicateLiteral]) -> FrozenSet[PredicateLiteral]:
        for item in value:
            if not item.is_ground:
                raise ValueError(f"interpretations hold ground literals only, got '{item.render()}'")
            if item.negated and item.complement() in value:
                raise ValueError(f"inconsistent interpretation: both {item.atom} and {item}")
        return value

    def __contains__(self, item) -> bool:
        return item in self.literals

    def __len__(self) -> int:
        return len(self.literals)

    def sorted_literals(self) -> list:
        return sorted(self.literals, key=lambda item: item.sort_key())

    def sort_key(self) -> tuple:
        return tuple(item.sort_key() for item in self.sorted_literals())

    def render(self) -> str:
        return "{" + ", ".join(item.render() for item in self.sorted_literals()) + "}"

    def __str__(self) -> str:
        return self.render()


def interpretation(*items: PredicateLiteral) -> Interpretation:
    return Interpretation(literals=frozenset(items))


def _substitute(terms: Tuple[Term, ...], binding: dict) -> Tuple[Term, ...]:
    return tuple(const(binding[term.name]) if term.variable else term for term in terms)
