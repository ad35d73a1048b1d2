"""
Unit tests for RankingService.

Tests materialization, exceptionality, ranking, concept ranks and rational
closure queries on the feline and bird/penguin KBs.
"""

import random

import pytest

from app.repositories.verdict_repository import VerdictRepository
from app.schemas.concepts import BOTTOM, TOP, And, Atom, Not, Or
from app.schemas.knowledge_base import ConceptInclusion, DefeasibleAxiom, DefeasibleQuery, KnowledgeBase
from app.services.generator_service import GeneratorService
from app.services.oracle_service import OracleService
from app.services.ranking_service import INFINITE_RANK, RankingService
from app.services.syntax_service import SyntaxService


def axiom(antecedent, consequent):
    return DefeasibleAxiom(antecedent=antecedent, consequent=consequent)


def atom(name):
    return Atom(name=name)


def neg(name):
    return Not(child=Atom(name=name))


def query(kb, text):
    return SyntaxService().parse_query(text, kb)


def test_materialize_exa(ranking, exa):
    """Test that each axiom becomes not C or D."""
    assert ranking.materialize(exa.dbox) == frozenset(
        {
            Or(children=(neg("Feline"), atom("Agile"))),
            Or(children=(neg("Feline"), atom("Docile"))),
            Or(children=(neg("BigFeline"), neg("Docile"))),
        }
    )


def test_materialize_top_antecedent(ranking):
    """Test that TOP ~[= C materializes to C."""
    assert ranking.materialize([axiom(TOP, atom("C"))]) == frozenset({atom("C")})


def test_materialize_empty(ranking):
    """Test the empty DBox."""
    assert ranking.materialize([]) == frozenset()


def test_exceptional_exa(ranking, exa):
    """Test that only the BigFeline default is exceptional."""
    exceptional = ranking.exceptional(exa.tbox, exa.rbox, exa.dbox)
    assert exceptional == frozenset({axiom(atom("BigFeline"), neg("Docile"))})


def test_exceptional_empty(ranking, exa):
    """Test that nothing is exceptional in an empty DBox."""
    assert ranking.exceptional(exa.tbox, exa.rbox, []) == frozenset()


def test_compute_ranking_exa(ranking, exa):
    """Test the ranks of the feline KB."""
    rkb = ranking.compute_ranking(exa)

    assert rkb.rank_of(axiom(atom("Feline"), atom("Agile"))) == 0
    assert rkb.rank_of(axiom(atom("Feline"), atom("Docile"))) == 0
    assert rkb.rank_of(axiom(atom("BigFeline"), neg("Docile"))) == 1
    assert rkb.tbox_star == exa.tbox
    assert rkb.promoted == frozenset()
    assert rkb.max_rank == 1


def test_compute_ranking_exb(ranking, exb):
    """Test the two ranks of the bird/penguin KB."""
    rkb = ranking.compute_ranking(exb)

    assert set(rkb.axioms_of_rank(0)) == {
        axiom(atom("B"), atom("F")),
        axiom(atom("B"), atom("Preyins")),
        axiom(atom("B"), atom("W")),
    }
    assert set(rkb.axioms_of_rank(1)) == {
        axiom(atom("P"), neg("F")),
        axiom(atom("P"), atom("Preyfish")),
    }
    assert [len(level) for level in rkb.exceptionality_seq] == [5, 2]


def test_compute_ranking_memoized(ranking, exa):
    """Test that ranking the same KB twice returns the same object."""
    assert ranking.compute_ranking(exa) is ranking.compute_ranking(exa)


def test_compute_ranking_promotes_infinite(ranking):
    """Test that a default with an unsatisfiable antecedent becomes strict."""
    kb = KnowledgeBase(
        concepts=frozenset({"A", "B"}),
        tbox=frozenset({ConceptInclusion(lhs=atom("A"), rhs=BOTTOM)}),
        dbox=frozenset({axiom(atom("A"), atom("B")), axiom(TOP, atom("B"))}),
    )
    rkb = ranking.compute_ranking(kb)

    assert rkb.promoted == frozenset({axiom(atom("A"), atom("B"))})
    assert ConceptInclusion(lhs=atom("A"), rhs=atom("B")) in rkb.tbox_star
    assert rkb.dbox_star == frozenset({axiom(TOP, atom("B"))})
    assert ranking.rank_of_axiom(rkb, axiom(atom("A"), atom("B"))) == INFINITE_RANK


def test_compute_ranking_empty_dbox(ranking):
    """Test that an empty DBox ranks to an empty sequence."""
    kb = KnowledgeBase(concepts=frozenset({"A"}))
    rkb = ranking.compute_ranking(kb)
    assert rkb.exceptionality_seq == ()
    assert rkb.max_rank == -1


def test_rank_of_concept_exa(ranking, exa):
    """Test concept ranks of the feline KB."""
    rkb = ranking.compute_ranking(exa)

    assert ranking.rank_of_concept(rkb, atom("Cat")) == 0
    assert ranking.rank_of_concept(rkb, atom("Feline")) == 0
    assert ranking.rank_of_concept(rkb, atom("Tiger")) == 1
    assert ranking.rank_of_concept(rkb, And(children=(atom("Feline"), atom("Big")))) == 1


def test_rank_of_concept_infinite(ranking, exa):
    """Test that an unsatisfiable concept has infinite rank."""
    rkb = ranking.compute_ranking(exa)
    assert ranking.rank_of_concept(rkb, And(children=(atom("Cat"), neg("Feline")))) == INFINITE_RANK


def test_rank_of_axiom_unranked(ranking, exa):
    """Test that an axiom outside the DBox gets the rank of its antecedent."""
    rkb = ranking.compute_ranking(exa)
    assert ranking.rank_of_axiom(rkb, axiom(atom("Tiger"), atom("Big"))) == 1


@pytest.mark.parametrize("text, expected", [
    ("Cat ~[= Docile", True),
    ("Cat ~[= Agile", True),
    ("Cat ~[= !Big", True),
    ("Cat ~[= !Tiger", True),
    ("Tiger ~[= !Docile", True),
    ("Feline & Big ~[= !Docile", True),
    ("Tiger ~[= Docile", False),
    ("Feline ~[= Big", False),
])
def test_rational_closure_exa(ranking, exa, text, expected):
    """Test rational closure conclusions of the feline KB."""
    assert ranking.rational_closure_entails(exa, query(exa, text)) is expected


@pytest.mark.parametrize("text, expected", [
    ("B ~[= F", True),
    ("P ~[= !F", True),
    ("P ~[= Preyfish", True),
    ("B ~[= W", True),
    ("P ~[= F", False),
    ("P ~[= Preyins", False),
])
def test_rational_closure_exb(ranking, exb, text, expected):
    """Test rational closure conclusions of the bird/penguin KB."""
    assert ranking.rational_closure_entails(exb, query(exb, text)) is expected


def test_rational_closure_reflexive(ranking, exa):
    """Test that every concept defeasibly implies itself."""
    assert ranking.rational_closure_entails(exa, DefeasibleQuery(antecedent=atom("Tiger"), consequent=atom("Tiger")))


def test_infinite_rank_query_is_classical(ranking, exa):
    """Test that an unsatisfiable antecedent entails everything."""
    impossible = And(children=(atom("Cat"), neg("Feline")))
    assert ranking.rational_closure_entails(exa, DefeasibleQuery(antecedent=impossible, consequent=atom("Big")))


@pytest.mark.parametrize("text", [
    "Cat ~[= Docile",
    "Tiger ~[= !Docile",
    "Tiger ~[= Docile",
    "Feline ~[= Agile",
    "BigFeline ~[= Agile",
    "Feline ~[= Big",
])
def test_characterization_matches_procedure(ranking, exa, text):
    """Test that the rank characterization agrees with the query procedure."""
    rkb = ranking.compute_ranking(exa)
    q = query(exa, text)
    assert ranking.characterizes(rkb, q) == ranking.entails_ranked(rkb, q)


def shuffled_source(kb, rng) -> str:
    """The KB's source with its axiom lines in random order after the declarations."""
    lines = SyntaxService().serialize_kb(kb).splitlines()
    declarations = [line for line in lines if not line.startswith(("tbox:", "rbox:", "dbox:"))]
    axioms = [line for line in lines if line not in declarations]
    rng.shuffle(axioms)
    return "\n".join([*declarations, *axioms]) + "\n"


def fresh_ranking() -> RankingService:
    return RankingService(OracleService(repository=VerdictRepository(backend="memory")))


@pytest.mark.parametrize("seed", range(5))
def test_ranking_independent_of_axiom_order(ranking, exb, seed):
    """Test that the bird/penguin ranking does not depend on the order of the source lines."""
    rng = random.Random(seed)
    shuffled = SyntaxService().parse_kb(shuffled_source(exb, rng))
    assert fresh_ranking().compute_ranking(shuffled) == ranking.compute_ranking(exb)


def test_random_ranking_independent_of_axiom_order(ranking):
    """Test order independence of ranking on generated KBs."""
    for seed in range(30):
        kb = GeneratorService(seed).random_kb()
        shuffled = SyntaxService().parse_kb(shuffled_source(kb, random.Random(seed)))
        assert fresh_ranking().compute_ranking(shuffled) == ranking.compute_ranking(kb)


def test_random_characterization_matches_procedure(ranking):
    """Test the rank characterization against the query procedure over 600 generated queries."""
    mismatches = []
    for seed in range(60):
        generator = GeneratorService(seed)
        kb = generator.random_kb()
        rkb = ranking.compute_ranking(kb)
        for _ in range(10):
            q = DefeasibleQuery(antecedent=generator.query_concept(kb), consequent=generator.query_concept(kb))
            if ranking.characterizes(rkb, q) != ranking.entails_ranked(rkb, q):
                mismatches.append((seed, q.render()))
    assert mismatches == []
