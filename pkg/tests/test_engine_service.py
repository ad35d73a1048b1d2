"""
Unit tests for EngineService.

Tests grounding, dl-atom evaluation, the reducts, least models, strong
answer sets and the consequence relations on the worked programs.
"""

import itertools

import pytest

from app.exceptions import (
    DlAtomPresentError,
    EmptyUniverseError,
    MissingLambdaPairingError,
    NoAnswerSetError,
    NotAnAnswerSetError,
    UnknownLiteralError,
)
from app.schemas.concepts import BOTTOM, Atom, Not
from app.schemas.knowledge_base import KnowledgeBase, assertion
from app.schemas.program import (
    ConceptQuery,
    ConceptUpdate,
    DlAtom,
    DlProgram,
    DlRule,
    GroundProgram,
    PredicateLiteral,
    const,
    interpretation,
    literal,
    var,
)
from app.services.generator_service import GeneratorService

X = var("X")
EMPTY_KB = KnowledgeBase()

EXB_ANSWER_SET = interpretation(
    literal("f", "a"),
    literal("preyins", "a"),
    literal("w", "a"),
    literal("p", "a", negated=True),
    literal("f", "b", negated=True),
    literal("preyfish", "b"),
    literal("preyins", "b", negated=True),
    literal("preyfish", "a", negated=True),
)


def pred(name, *terms, negated=False):
    return PredicateLiteral(predicate=name, terms=tuple(terms), negated=negated)


def dl(concept, *terms, updates=()):
    return DlAtom(updates=tuple(updates), query=ConceptQuery(concept=concept), terms=tuple(terms))


@pytest.fixture
def feline_program():
    """Normal program: felines are docile unless big."""
    return DlProgram(
        rules=(
            DlRule(head=literal("feline", "a")),
            DlRule(head=literal("feline", "b")),
            DlRule(head=literal("big", "b")),
            DlRule(
                head=pred("docile", X),
                positive_body=(pred("feline", X),),
                negative_body=(pred("big", X),),
            ),
        )
    )


@pytest.fixture
def cat_program(cat_base):
    """dl-program over the cat base: felines are docile unless big."""
    feline = Atom(name="Feline")
    return DlProgram(
        rules=(
            DlRule(head=pred("feline", X), positive_body=(dl(Atom(name="Cat"), X),)),
            DlRule(
                head=pred("docile", X),
                positive_body=(dl(feline, X, updates=(ConceptUpdate(concept=feline, predicate="feline"),)),),
                negative_body=(dl(Atom(name="Big"), X),),
            ),
        ),
        constants=cat_base.individuals,
    )


@pytest.fixture
def exb_program(ranking, compiler, exb):
    rkb = ranking.compute_ranking(exb)
    return rkb.strict_kb(), compiler.compile(rkb)


@pytest.fixture
def two_program(ranking, compiler, two_answer_sets):
    rkb = ranking.compute_ranking(two_answer_sets)
    return rkb.strict_kb(), compiler.compile(rkb)


def rendered(ground_p, shared=None):
    return {rule.render(shared) for rule in ground_p.rules}


# --- grounding ----------------------------------------------------------


def test_ground_exb(engine, exb_program):
    """Test eleven rules over two constants."""
    _, program = exb_program
    ground_p = engine.ground(program)
    assert len(ground_p.rules) == 22
    assert ground_p.universe == frozenset({"a", "b"})
    assert all(rule.is_ground for rule in ground_p.rules)


def test_ground_two_answer_sets(engine, two_program):
    """Test two rules over two constants."""
    _, program = two_program
    assert len(engine.ground(program).rules) == 4


def test_ground_herbrand_base(engine, feline_program):
    """Test that the Herbrand base holds both polarities."""
    ground_p = engine.ground(feline_program)
    assert len(ground_p.base) == 3 * 2 * 2
    assert literal("docile", "b", negated=True) in ground_p.base


def test_ground_variable_free(engine):
    """Test that a variable-free program is its own grounding."""
    rule = DlRule(head=literal("p", "a"), negative_body=(literal("q", "a"),))
    assert engine.ground(DlProgram(rules=(rule,))).rules == (rule,)


def test_ground_empty_universe(engine):
    """Test that variables need constants."""
    program = DlProgram(rules=(DlRule(head=pred("p", X)),))
    with pytest.raises(EmptyUniverseError):
        engine.ground(program)


# --- dl-atoms -----------------------------------------------------------


def test_eval_dl_atom_with_update(engine, cat_base):
    """Test that updates extend the DL base before the query."""
    feline = Atom(name="Feline")
    atom = dl(feline, const("a"), updates=(ConceptUpdate(concept=feline, predicate="feline"),))
    assert engine.eval_dl_atom(cat_base, interpretation(literal("feline", "a")), atom) is True
    assert engine.eval_dl_atom(cat_base, interpretation(), atom) is False


def test_eval_dl_atom_plain(engine, cat_base):
    """Test queries answered by the base alone."""
    assert engine.eval_dl_atom(cat_base, interpretation(), dl(Atom(name="Cat"), const("a"))) is True
    assert engine.eval_dl_atom(cat_base, interpretation(), dl(BOTTOM, const("a"))) is False


def test_eval_dl_atom_negative_update(engine, cat_base):
    """Test that a negated update asserts the complement concept."""
    big = Atom(name="Big")
    atom = dl(Not(child=big), const("a"), updates=(ConceptUpdate(concept=Not(child=big), predicate="big", negated=True),))
    assert engine.eval_dl_atom(cat_base, interpretation(literal("big", "a", negated=True)), atom) is True
    assert engine.eval_dl_atom(cat_base, interpretation(literal("big", "a")), atom) is False


# --- transforms ---------------------------------------------------------


def test_gelfond_lifschitz_feline(engine, feline_program):
    """Test the reduct of the feline program."""
    interp = interpretation(
        literal("feline", "a"), literal("feline", "b"), literal("big", "b"), literal("docile", "a")
    )
    reduct = engine.gelfond_lifschitz(engine.ground(feline_program), interp)
    assert rendered(reduct) == {"feline(a).", "feline(b).", "big(b).", "docile(a) :- feline(a)."}


def test_gelfond_lifschitz_self_blocking(engine):
    """Test that `p :- not p` disappears when p is assumed."""
    ground_p = GroundProgram(rules=(DlRule(head=literal("p", "a"), negative_body=(literal("p", "a"),)),))
    assert engine.gelfond_lifschitz(ground_p, interpretation(literal("p", "a"))).rules == ()


def test_gelfond_lifschitz_rejects_dl_atoms(engine, exb_program):
    """Test that the plain reduct refuses dl-atoms."""
    _, program = exb_program
    with pytest.raises(DlAtomPresentError):
        engine.gelfond_lifschitz(engine.ground(program), interpretation())


def test_strong_dl_transform_cat(engine, cat_base, cat_program):
    """Test the three-rule transform of the cat program."""
    interp = interpretation(literal("feline", "a"), literal("docile", "a"))
    positive = engine.strong_dl_transform(cat_base, engine.ground(cat_program), interp)
    assert rendered(positive) == {
        "feline(a) :- DL[Cat](a).",
        "feline(b) :- DL[Cat](b).",
        "docile(a) :- DL[Feline + feline; Feline](a).",
    }


def test_strong_dl_transform_exb_active_rules(engine, exb_program):
    """Test the rules that fire while rebuilding the bird/penguin answer set."""
    kb, program = exb_program
    positive = engine.strong_dl_transform(kb, engine.ground(program), EXB_ANSWER_SET)
    active = rendered(engine.active_rules(kb, positive), program.lambda_)
    assert active == {
        "f(a) :- DL[lambda; B](a).",
        "preyins(a) :- DL[lambda; B](a).",
        "w(a) :- DL[lambda; B](a).",
        "-f(b) :- DL[lambda; P](b).",
        "preyfish(b) :- DL[lambda; P](b).",
        "-p(a).",
        "-preyins(b) :- DL[lambda; -Preyins](b).",
        "-preyfish(a) :- DL[lambda; -Preyfish](a).",
    }


def test_strong_dl_transform_positive_program(engine, cat_base):
    """Test that a program without negation is left intact."""
    ground_p = GroundProgram(rules=(DlRule(head=literal("p", "a"), positive_body=(literal("q", "a"),)),))
    assert engine.strong_dl_transform(cat_base, ground_p, interpretation()) == ground_p


# --- least models -------------------------------------------------------


def test_least_model_feline(engine, feline_program):
    """Test the least model of the feline reduct."""
    interp = interpretation(
        literal("feline", "a"), literal("feline", "b"), literal("big", "b"), literal("docile", "a")
    )
    reduct = engine.gelfond_lifschitz(engine.ground(feline_program), interp)
    assert engine.least_model(EMPTY_KB, reduct) == interp


def test_least_model_cat(engine, cat_base, cat_program):
    """Test the least model of the cat transform."""
    interp = interpretation(literal("feline", "a"), literal("docile", "a"))
    positive = engine.strong_dl_transform(cat_base, engine.ground(cat_program), interp)
    assert engine.least_model(cat_base, positive) == interp


def test_least_model_empty(engine):
    """Test that the empty program has the empty model."""
    assert engine.least_model(EMPTY_KB, GroundProgram()) == interpretation()


def test_least_model_inconsistent(engine):
    """Test that complementary facts have no model."""
    ground_p = GroundProgram(rules=(DlRule(head=literal("p", "a")), DlRule(head=literal("p", "a", negated=True))))
    assert engine.least_model(EMPTY_KB, ground_p) is None


def test_least_model_rejects_naf(engine):
    """Test that least models need positive programs."""
    ground_p = GroundProgram(rules=(DlRule(head=literal("p", "a"), negative_body=(literal("q", "a"),)),))
    with pytest.raises(ValueError):
        engine.least_model(EMPTY_KB, ground_p)


# --- answer sets --------------------------------------------------------


def test_answer_sets_feline(engine, feline_program):
    """Test the unique answer set of the feline program."""
    expected = interpretation(
        literal("feline", "a"), literal("feline", "b"), literal("big", "b"), literal("docile", "a")
    )
    assert engine.strong_answer_sets(EMPTY_KB, feline_program) == [expected]


def test_answer_sets_cat(engine, cat_base, cat_program):
    """Test the unique strong answer set of the cat program."""
    expected = interpretation(literal("feline", "a"), literal("docile", "a"))
    assert engine.strong_answer_sets(cat_base, cat_program) == [expected]


def test_answer_sets_exb(engine, exb_program):
    """Test the unique strong answer set of the bird/penguin program."""
    kb, program = exb_program
    assert engine.strong_answer_sets(kb, program) == [EXB_ANSWER_SET]


def test_answer_sets_two(engine, two_program):
    """Test that the nominal example has two answer sets."""
    kb, program = two_program
    assert engine.strong_answer_sets(kb, program) == [
        interpretation(literal("c", "a"), literal("c", "b", negated=True)),
        interpretation(literal("c", "a", negated=True), literal("c", "b")),
    ]


def test_answer_sets_empty_program(engine):
    """Test that the empty program has the empty answer set."""
    assert engine.strong_answer_sets(EMPTY_KB, DlProgram()) == [interpretation()]


def test_answer_sets_none(engine):
    """Test that `p :- not p` has no answer set."""
    program = DlProgram(rules=(DlRule(head=literal("p", "a"), negative_body=(literal("p", "a"),)),))
    assert engine.strong_answer_sets(EMPTY_KB, program) == []


def test_is_strong_answer_set(engine, exb_program):
    """Test the definition check on a non-minimal candidate."""
    kb, program = exb_program
    assert engine.is_strong_answer_set(kb, program, EXB_ANSWER_SET) is True
    bigger = interpretation(*EXB_ANSWER_SET.literals, literal("w", "b"))
    assert engine.is_strong_answer_set(kb, program, bigger) is False


def test_search_matches_brute_force(engine):
    """Test the branching search against exhaustive enumeration."""
    for seed in range(200):
        kb, program = GeneratorService(seed).random_program()
        assert engine.strong_answer_sets(kb, program) == engine.brute_force_answer_sets(kb, program), seed


def holds(engine, kb, interp, element) -> bool:
    if isinstance(element, DlAtom):
        return engine.eval_dl_atom(kb, interp, element)
    return element in interp


def is_model(engine, kb, ground_p, interp) -> bool:
    """Every ground rule whose body holds under the DL base has its head in `interp`."""
    for rule in ground_p.rules:
        body = all(holds(engine, kb, interp, e) for e in rule.positive_body) and not any(
            holds(engine, kb, interp, e) for e in rule.negative_body
        )
        if body and rule.head not in interp:
            return False
    return True


def test_answer_sets_are_minimal_models(engine):
    """Test that every strong answer set is a model with no smaller model inside it."""
    for seed in range(60):
        kb, program = GeneratorService(seed).random_program()
        ground_p = engine.ground(program)
        for answer_set in engine.strong_answer_sets(kb, ground_p):
            assert is_model(engine, kb, ground_p, answer_set), seed
            literals = answer_set.sorted_literals()
            for size in range(len(literals)):
                for subset in itertools.combinations(literals, size):
                    assert not is_model(engine, kb, ground_p, interpretation(*subset)), (seed, subset)


def test_cautious_within_brave(engine):
    """Test that every cautious consequence is also a brave one."""
    for seed in range(60):
        kb, program = GeneratorService(seed).random_program()
        ground_p = engine.ground(program)
        if not engine.strong_answer_sets(kb, ground_p):
            continue
        for item in ground_p.base:
            if engine.consequence(kb, ground_p, item, "cautious"):
                assert engine.consequence(kb, ground_p, item, "brave"), (seed, item.render())


# --- consequence --------------------------------------------------------


def test_consequence_exb(engine, exb_program):
    """Test cautious consequence with a unique answer set."""
    kb, program = exb_program
    assert engine.consequence(kb, program, literal("f", "a"), "cautious") is True
    assert engine.consequence(kb, program, literal("f", "b"), "brave") is False


def test_consequence_two(engine, two_program):
    """Test that brave and cautious differ with two answer sets."""
    kb, program = two_program
    assert engine.consequence(kb, program, literal("c", "a"), "brave") is True
    assert engine.consequence(kb, program, literal("c", "a"), "cautious") is False


def test_consequence_empty_program(engine):
    """Test that nothing follows bravely from the empty program."""
    assert engine.consequence(EMPTY_KB, DlProgram(), literal("p", "a"), "brave") is False


def test_consequence_no_answer_set(engine):
    """Test that consequence is undefined without answer sets."""
    program = DlProgram(rules=(DlRule(head=literal("p", "a"), negative_body=(literal("p", "a"),)),))
    with pytest.raises(NoAnswerSetError):
        engine.consequence(EMPTY_KB, program, literal("p", "a"), "cautious")


def test_consequence_unknown_literal(engine, two_program):
    """Test that a literal outside the Herbrand base is rejected."""
    kb, program = two_program
    with pytest.raises(UnknownLiteralError):
        engine.consequence(kb, program, literal("d", "a"), "brave")
    with pytest.raises(UnknownLiteralError):
        engine.consequence(kb, program, literal("c", "z"), "cautious")


def test_consequence_bad_mode(engine):
    """Test that only cautious and brave are accepted."""
    with pytest.raises(ValueError):
        engine.consequence(EMPTY_KB, DlProgram(), literal("p", "a"), "all")


# --- entailment under an answer set -------------------------------------


def test_translate_exb(engine, exb_program):
    """Test paired and case-convention translation of literals."""
    kb, program = exb_program
    axioms = engine.translate(kb, program, EXB_ANSWER_SET)
    assert assertion(Atom(name="Preyfish"), "b") in axioms
    assert assertion(Not(child=Atom(name="F")), "b") in axioms
    assert assertion(Not(child=Atom(name="P")), "a") in axioms


def test_translate_missing_pairing(engine, exb_program):
    """Test that a literal without any DL counterpart is rejected."""
    kb, program = exb_program
    with pytest.raises(MissingLambdaPairingError):
        engine.translate(kb, program, interpretation(literal("q", "a")))


@pytest.mark.parametrize("concept, individual, expected", [
    ("Preyfish", "b", True),
    ("B", "a", True),
    ("F", "a", True),
    ("F", "b", False),
])
def test_entails_under_answer_set(engine, exb_program, concept, individual, expected):
    """Test assertions entailed by the base plus the answer set."""
    kb, program = exb_program
    result = engine.entails_under_answer_set(kb, program, EXB_ANSWER_SET, Atom(name=concept), individual)
    assert result is expected


def test_entails_under_non_answer_set(engine, exb_program):
    """Test that the interpretation must be a strong answer set."""
    kb, program = exb_program
    with pytest.raises(NotAnAnswerSetError):
        engine.entails_under_answer_set(kb, program, interpretation(literal("f", "a")), Atom(name="F"), "a")
