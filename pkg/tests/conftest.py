"""
Shared fixtures: services wired to an in-memory verdict cache and the example KBs.
"""

from pathlib import Path

import pytest

from app.repositories.verdict_repository import VerdictRepository
from app.schemas.concepts import TOP, And, Atom, Bottom, Exists, Forall, Nominals, Not, Or, Top, only, some
from app.services.compiler_service import CompilerService
from app.services.engine_service import EngineService
from app.services.oracle_service import OracleService
from app.services.ranking_service import RankingService
from app.services.syntax_service import SyntaxService

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
CONCEPT_NAMES = tuple("ABCDEFGH")
FIXTURE_FILES = ("exa.kb", "exb.kb", "two_answer_sets.kb", "cat_program.kb")


def load_kb(name: str):
    return SyntaxService().parse_kb((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def oracle():
    """Oracle on the internal tableau with a private in-memory cache."""
    return OracleService(repository=VerdictRepository(backend="memory"))


@pytest.fixture
def ranking(oracle):
    return RankingService(oracle)


@pytest.fixture
def compiler():
    return CompilerService()


@pytest.fixture
def engine(oracle):
    return EngineService(oracle)


@pytest.fixture
def exa():
    return load_kb("exa.kb")


@pytest.fixture
def exb():
    return load_kb("exb.kb")


@pytest.fixture
def two_answer_sets():
    return load_kb("two_answer_sets.kb")


@pytest.fixture
def cat_base():
    return load_kb("cat_program.kb")


def make_concept(rng, names=CONCEPT_NAMES, depth=3):
    """Random ALC concept over `names` and the role R."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.05:
            return TOP
        concept = Atom(name=rng.choice(names))
        return Not(child=concept) if rng.random() < 0.4 else concept
    shape = rng.choice(("and", "or", "not", "some", "only"))
    if shape == "and":
        return And(children=(make_concept(rng, names, depth - 1), make_concept(rng, names, depth - 1)))
    if shape == "or":
        return Or(children=(make_concept(rng, names, depth - 1), make_concept(rng, names, depth - 1)))
    if shape == "not":
        return Not(child=make_concept(rng, names, depth - 1))
    role_builder = some if shape == "some" else only
    return role_builder("R", make_concept(rng, names, depth - 1))


def make_model(rng, names=CONCEPT_NAMES, size=3):
    """Random finite interpretation: domain, atom extensions and the R relation."""
    domain = frozenset(range(size))
    return {
        "domain": domain,
        "atoms": {name: frozenset(x for x in domain if rng.random() < 0.5) for name in names},
        "R": frozenset((x, y) for x in domain for y in domain if rng.random() < 0.4),
    }


def extension(concept, model) -> frozenset:
    """Extension of a concept in a model built by make_model."""
    domain = model["domain"]
    if isinstance(concept, Top):
        return domain
    if isinstance(concept, Bottom):
        return frozenset()
    if isinstance(concept, Atom):
        return model["atoms"].get(concept.name, frozenset())
    if isinstance(concept, Not):
        return domain - extension(concept.child, model)
    if isinstance(concept, And):
        return frozenset.intersection(*(extension(child, model) for child in concept.children))
    if isinstance(concept, Or):
        return frozenset.union(*(extension(child, model) for child in concept.children))
    if isinstance(concept, (Exists, Forall)):
        inner = extension(concept.child, model)
        successors = {x: {y for (s, y) in model[concept.role.name] if s == x} for x in domain}
        if isinstance(concept, Exists):
            return frozenset(x for x in domain if successors[x] & inner)
        return frozenset(x for x in domain if successors[x] <= inner)
    if isinstance(concept, Nominals):
        raise ValueError("models built by make_model carry no individuals")
    raise ValueError(f"no extension for {concept.render()}")
