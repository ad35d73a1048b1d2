"""
Unit tests for NormalFormService.

Tests negation normal form, ABox rewriting and equality expansion.
"""

import random

import pytest

from app.exceptions import UnsupportedConstructError
from app.schemas.concepts import (
    BOTTOM,
    TOP,
    And,
    AtLeast,
    AtMost,
    Atom,
    InverseRole,
    NamedRole,
    Not,
    Or,
    UniversalRole,
    negation,
    nominal,
    only,
    some,
)
from app.schemas.knowledge_base import ConceptEquality, ConceptInclusion
from app.services.normal_form_service import NormalFormService
from app.services.tableau_service import TableauService
from tests.conftest import extension, make_concept, make_model

A = Atom(name="A")
B = Atom(name="B")


def test_nnf_double_negation():
    """Test that double negation cancels."""
    assert NormalFormService.nnf(negation(negation(A))) == A


def test_nnf_de_morgan():
    """Test that negation is pushed through conjunctions."""
    result = NormalFormService.nnf(negation(And(children=(A, B))))
    assert result == Or(children=(Not(child=A), Not(child=B)))


def test_nnf_quantifier_duality():
    """Test that negated quantifiers swap."""
    assert NormalFormService.nnf(negation(some("R", A))) == only("R", Not(child=A))
    assert NormalFormService.nnf(negation(only("R", negation(A)))) == some("R", A)


def test_nnf_number_restrictions():
    """Test negated number restrictions."""
    role = NamedRole(name="R")
    assert NormalFormService.nnf(negation(AtLeast(n=2, role=role, child=A))) == AtMost(n=1, role=role, child=A)
    assert NormalFormService.nnf(negation(AtLeast(n=0, role=role, child=A))) == BOTTOM
    assert NormalFormService.nnf(negation(AtMost(n=1, role=role, child=A))) == AtLeast(n=2, role=role, child=A)


def test_nnf_unit_simplification():
    """Test that TOP and BOT are simplified away."""
    assert NormalFormService.nnf(Or(children=(negation(TOP), A))) == A
    assert NormalFormService.nnf(And(children=(A, BOTTOM))) == BOTTOM
    assert NormalFormService.nnf(Or(children=(A, TOP))) == TOP


def test_nnf_negated_nominal_stays():
    """Test that negation stays directly above nominals."""
    assert NormalFormService.nnf(negation(nominal("a"))) == Not(child=nominal("a"))


def test_abox_concept_assertion():
    """Test C(a) as {a} [= C."""
    assert NormalFormService.abox_to_tbox(A, "a") == ConceptInclusion(lhs=nominal("a"), rhs=A)


def test_abox_role_assertion():
    """Test R(a, b) as {a} [= exists R . {b}."""
    axiom = NormalFormService.abox_to_tbox(NamedRole(name="R"), "a", "b")
    assert axiom == ConceptInclusion(lhs=nominal("a"), rhs=some("R", nominal("b")))


def test_abox_inverse_role_assertion():
    """Test that inv(R)(a, b) is stored as R(b, a)."""
    axiom = NormalFormService.abox_to_tbox(InverseRole(name="R"), "a", "b")
    assert axiom == ConceptInclusion(lhs=nominal("b"), rhs=some("R", nominal("a")))


def test_abox_universal_role_rejected():
    """Test that the universal role has no TBox form."""
    with pytest.raises(UnsupportedConstructError):
        NormalFormService.abox_to_tbox(UniversalRole(), "a", "b")


def test_expand_equality():
    """Test that an equality becomes one global inclusion."""
    expanded = NormalFormService.expand_equality(ConceptEquality(lhs=A, rhs=B))
    assert len(expanded) == 1
    assert expanded[0].lhs == TOP


def test_expand_tbox_keeps_inclusions():
    """Test that inclusions pass through unchanged."""
    inclusion = ConceptInclusion(lhs=A, rhs=B)
    tbox = NormalFormService.expand_tbox({inclusion, ConceptEquality(lhs=A, rhs=B)})
    assert inclusion in tbox
    assert not any(isinstance(axiom, ConceptEquality) for axiom in tbox)


def negations_on_atoms(concept) -> bool:
    if isinstance(concept, Not):
        return isinstance(concept.child, Atom)
    if isinstance(concept, (And, Or)):
        return all(negations_on_atoms(child) for child in concept.children)
    child = getattr(concept, "child", None)
    return child is None or negations_on_atoms(child)


def test_nnf_random_idempotent_and_shaped():
    """Test that nnf is idempotent and leaves negation only on atoms."""
    for seed in range(200):
        concept = make_concept(random.Random(seed), depth=4)
        normal = NormalFormService.nnf(concept)
        assert NormalFormService.nnf(normal) == normal
        assert negations_on_atoms(normal)


def test_nnf_random_preserves_extension():
    """Test that nnf has the same extension as its input in random finite models."""
    for seed in range(200):
        rng = random.Random(seed)
        concept = make_concept(rng, depth=4)
        normal = NormalFormService.nnf(concept)
        for _ in range(5):
            model = make_model(rng)
            assert extension(normal, model) == extension(concept, model)


def test_nnf_random_preserves_satisfiability():
    """Test that a concept and its nnf get the same tableau verdict and agree as subsumptions."""
    tableau = TableauService()
    for seed in range(50):
        concept = make_concept(random.Random(seed), depth=3)
        normal = NormalFormService.nnf(concept)
        assert tableau.is_satisfiable([], concept) == tableau.is_satisfiable([], normal)
        assert tableau.entails([], concept, normal) is True
        assert tableau.entails([], normal, concept) is True
