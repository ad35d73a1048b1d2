"""
Normal-form service: negation normal form, ABox rewriting and equality expansion.
"""

import logging
from functools import lru_cache
from typing import List, Union

from app.exceptions import UnsupportedConstructError
from app.schemas.concepts import (
    BOTTOM,
    TOP,
    And,
    AtLeast,
    AtMost,
    Bottom,
    Exists,
    Forall,
    InverseRole,
    NamedRole,
    Nominals,
    Not,
    Or,
    Top,
    negation,
)
from app.schemas.knowledge_base import ConceptEquality, ConceptInclusion

logger = logging.getLogger(__name__)


@lru_cache(maxsize=65536)
def _nnf(concept):
    if isinstance(concept, Not):
        return _negated(concept.child)
    if isinstance(concept, And):
        children = [_nnf(child) for child in concept.children]
        if any(isinstance(child, Bottom) for child in children):
            return BOTTOM
        return _rebuild(And, [child for child in children if not isinstance(child, Top)], TOP)
    if isinstance(concept, Or):
        children = [_nnf(child) for child in concept.children]
        if any(isinstance(child, Top) for child in children):
            return TOP
        return _rebuild(Or, [child for child in children if not isinstance(child, Bottom)], BOTTOM)
    if isinstance(concept, (Exists, Forall, AtLeast, AtMost)):
        return concept.model_copy(update={"child": _nnf(concept.child)})
    return concept


def _negated(child):
    """nnf(¬child)."""
    if isinstance(child, Top):
        return BOTTOM
    if isinstance(child, Bottom):
        return TOP
    if isinstance(child, Not):
        return _nnf(child.child)
    if isinstance(child, And):
        return _nnf(Or(children=tuple(negation(part) for part in child.children)))
    if isinstance(child, Or):
        return _nnf(And(children=tuple(negation(part) for part in child.children)))
    if isinstance(child, Exists):
        return Forall(role=child.role, child=_negated(child.child))
    if isinstance(child, Forall):
        return Exists(role=child.role, child=_negated(child.child))
    if isinstance(child, AtLeast):
        if child.n == 0:
            return BOTTOM
        return AtMost(n=child.n - 1, role=child.role, child=_nnf(child.child))
    if isinstance(child, AtMost):
        return AtLeast(n=child.n + 1, role=child.role, child=_nnf(child.child))
    # Atom, Nominals, SelfRestriction
    return Not(child=child)


def _rebuild(model, children: list, empty):
    if not children:
        return empty
    if len(children) == 1:
        return children[0]
    return model(children=tuple(children))


class NormalFormService:
    """
    Stateless rewritings over concept expressions and axioms.
    """

    @staticmethod
    def nnf(concept):
        """
        Negation normal form with ⊤/⊥ unit simplification.

        Not ends up only directly above Atom, Nominals or SelfRestriction;
        ¬¬C becomes C. Nested conjunctions and disjunctions are not flattened.
        """
        return _nnf(concept)

    @staticmethod
    def abox_to_tbox(predicate, *individuals: str) -> ConceptInclusion:
        """
        Rewrite an assertion into its TBox form.

        Args:
            predicate: A concept for C(a), or a role for R(a, b)
            individuals: The asserted individual(s)

        Returns:
            {a} ⊑ C, or {a} ⊑ ∃R.{b}

        Raises:
            UnsupportedConstructError: For chains, the universal role or a wrong arity
        """
        if isinstance(predicate, (NamedRole, InverseRole)):
            if len(individuals) != 2:
                raise UnsupportedConstructError(f"role assertion needs two individuals, got {individuals}")
            subject, target = individuals
            if isinstance(predicate, InverseRole):
                subject, target = target, subject
                predicate = NamedRole(name=predicate.name)
            return ConceptInclusion(
                lhs=Nominals(individuals=(subject,)),
                rhs=Exists(role=predicate, child=Nominals(individuals=(target,))),
            )
        if predicate.kind in ("universal", "chain"):
            raise UnsupportedConstructError(
                f"assertions over '{predicate.render()}' have no TBox form"
            )
        if len(individuals) != 1:
            raise UnsupportedConstructError(f"concept assertion needs one individual, got {individuals}")
        return ConceptInclusion(lhs=Nominals(individuals=(individuals[0],)), rhs=predicate)

    @staticmethod
    def expand_equality(axiom: Union[ConceptInclusion, ConceptEquality]) -> List[ConceptInclusion]:
        """C = D as ⊤ ⊑ (¬C ⊔ D) ⊓ (¬D ⊔ C); inclusions pass through unchanged."""
        if isinstance(axiom, ConceptInclusion):
            return [axiom]
        both_ways = And(
            children=(
                Or(children=(negation(axiom.lhs), axiom.rhs)),
                Or(children=(negation(axiom.rhs), axiom.lhs)),
            )
        )
        return [ConceptInclusion(lhs=TOP, rhs=both_ways)]

    @staticmethod
    def expand_tbox(tbox) -> frozenset:
        """Every ConceptEquality in `tbox` replaced by its inclusion form."""
        expanded = set()
        for axiom in tbox:
            expanded.update(NormalFormService.expand_equality(axiom))
        return frozenset(expanded)
