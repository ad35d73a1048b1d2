"""
Unit tests for GeneratorService.

Tests that generated knowledge bases and programs are reproducible and stay
within their size bounds.
"""

from app.schemas.concepts import Atom
from app.services.generator_service import CONCEPT_POOL, INDIVIDUAL_POOL, GeneratorService
from app.services.tableau_service import in_alco, tbox_in_alco


def test_random_kb_deterministic():
    """Test that one seed always yields the same KB."""
    assert GeneratorService(42).random_kb() == GeneratorService(42).random_kb()


def test_random_kb_seeds_differ():
    """Test that different seeds explore different KBs."""
    kbs = {GeneratorService(seed).random_kb() for seed in range(20)}
    assert len(kbs) > 1


def test_random_kb_bounds():
    """Test the desk-scale bounds and the ALCO fragment."""
    for seed in range(50):
        kb = GeneratorService(seed).random_kb()
        assert 2 <= len(kb.concepts) <= len(CONCEPT_POOL)
        assert 1 <= len(kb.individuals) <= len(INDIVIDUAL_POOL) == 4
        assert 1 <= len(kb.dbox) <= 5
        assert not kb.rbox
        assert tbox_in_alco(kb.tbox)


def test_random_program_bounds():
    """Test that programs are variable-free and their Herbrand base is small."""
    for seed in range(50):
        kb, program = GeneratorService(seed).random_program(max_base=14)
        assert all(rule.is_ground for rule in program.rules)
        size = 2 * len(program.predicates()) * len(program.constants)
        assert size <= 14
        assert program.constants == kb.individuals


def test_random_program_deterministic():
    """Test that one seed always yields the same program."""
    assert GeneratorService(7).random_program() == GeneratorService(7).random_program()


def test_equivalent_variant(oracle):
    """Test that the variant is classically equal to the original."""
    generator = GeneratorService(3)
    kb = generator.random_kb()
    concept = Atom(name=sorted(kb.concepts)[0])
    variant = generator.equivalent_variant(concept, kb)

    assert variant != concept
    assert in_alco(variant)
    assert oracle.entails(kb.tbox, kb.rbox, concept, variant)
    assert oracle.entails(kb.tbox, kb.rbox, variant, concept)


def test_random_kb_uses_all_individuals():
    """Test that the full individual pool is reachable."""
    sizes = {len(GeneratorService(seed).random_kb().individuals) for seed in range(50)}
    assert max(sizes) == len(INDIVIDUAL_POOL)
