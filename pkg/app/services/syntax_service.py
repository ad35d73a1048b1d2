"""
Syntax service for the line-based KB file format.

Parses KB source text into a KnowledgeBase and serializes it back in
canonical form. One statement per line, `#` starts a comment, every
statement ends with a full stop:

    concept Cat, Feline.
    role Prey.
    individual a, b.
    tbox: Cat [= Feline.
    tbox: BigFeline == Feline & Big.
    rbox: Prey o Prey [= Prey.
    abox: Cat(a).
    dbox: Feline ~[= Docile.
"""

import logging
import re
from typing import List, NamedTuple, Optional, Tuple, Union

from app.exceptions import KbSyntaxError, MalformedDefeasibleAxiomError, UndeclaredNameError
from app.schemas.concepts import (
    BOTTOM,
    TOP,
    And,
    Atom,
    AtLeast,
    AtMost,
    Exists,
    Forall,
    InverseRole,
    NamedRole,
    Nominals,
    Not,
    Or,
    RoleChain,
    SelfRestriction,
    UniversalRole,
    is_literal,
)
from app.schemas.knowledge_base import (
    ConceptEquality,
    ConceptInclusion,
    DefeasibleAxiom,
    DefeasibleQuery,
    KnowledgeBase,
    RoleDisjointness,
    RoleInclusion,
    RoleProperty,
)
from app.schemas.oracle import Subsumption
from app.schemas.program import PredicateLiteral, literal
from app.services.normal_form_service import NormalFormService

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
    |(?P<op>~\[=|~<=|\[=|==|>=|<=|[&|!\-(){},.:])
    |(?P<number>\d+)
    |(?P<name>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_DECLARATIONS = ("concept", "role", "individual")
_SECTIONS = ("tbox", "rbox", "dbox", "abox")
_ROLE_PROPERTIES = ("trans", "fun", "ref", "irr", "sym", "asy")
_DEFEASIBLE_ARROWS = ("~[=", "~<=")
_LITERAL = re.compile(
    r"^\s*(-?)\s*([a-z][A-Za-z0-9_]*)\s*\(\s*([A-Za-z0-9_]+)\s*(?:,\s*([A-Za-z0-9_]+)\s*)?\)\s*\.?\s*$"
)


class _Token(NamedTuple):
    kind: str
    text: str
    column: int


class _Signature(NamedTuple):
    concepts: frozenset
    roles: frozenset
    individuals: frozenset


def _tokenize(text: str, line: int) -> List[_Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if not match:
            raise KbSyntaxError(f"unexpected character '{text[position]}'", line, position + 1)
        if match.lastgroup != "space":
            tokens.append(_Token(match.lastgroup, match.group(), position + 1))
        position = match.end()
    tokens.append(_Token("end", "", len(text) + 1))
    return tokens


class _Parser:
    """Recursive-descent parser over the tokens of one statement."""

    def __init__(self, tokens: List[_Token], line: int, signature: _Signature):
        self.tokens = tokens
        self.line = line
        self.signature = signature
        self.position = 0

    # --- token helpers -----------------------------------------------------

    def peek(self, offset: int = 0) -> _Token:
        index = min(self.position + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> _Token:
        token = self.peek()
        if token.kind != "end":
            self.position += 1
        return token

    def accept(self, text: str) -> bool:
        if self.peek().text == text and self.peek().kind != "end":
            self.position += 1
            return True
        return False

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.text != text or token.kind == "end":
            self.fail(f"expected '{text}'", token)
        return self.advance()

    def expect_name(self, what: str) -> _Token:
        token = self.peek()
        if token.kind != "name":
            self.fail(f"expected {what}", token)
        return self.advance()

    def expect_end(self) -> None:
        self.accept(".")
        token = self.peek()
        if token.kind != "end":
            self.fail(f"unexpected '{token.text}'", token)

    def fail(self, message: str, token: Optional[_Token] = None):
        token = token or self.peek()
        found = f", found '{token.text}'" if token.text else ", found end of line"
        raise KbSyntaxError(f"{message}{found}", self.line, token.column)

    # --- concepts ----------------------------------------------------------

    def concept(self):
        children = [self.conjunction()]
        while self.accept("|"):
            children.append(self.conjunction())
        return children[0] if len(children) == 1 else Or(children=tuple(children))

    def conjunction(self):
        children = [self.unary()]
        while self.accept("&"):
            children.append(self.unary())
        return children[0] if len(children) == 1 else And(children=tuple(children))

    def unary(self):
        token = self.peek()
        if self.accept("!") or self.accept("-"):
            return Not(child=self.unary())
        if token.kind == "name" and token.text in ("exists", "forall"):
            self.advance()
            role = self.role()
            self.expect(".")
            child = self.unary()
            model = Exists if token.text == "exists" else Forall
            return model(role=role, child=child)
        if token.text in (">=", "<="):
            self.advance()
            number = self.peek()
            if number.kind != "number":
                self.fail("expected a number", number)
            self.advance()
            role = self.role()
            self.expect(".")
            child = self.unary()
            model = AtLeast if token.text == ">=" else AtMost
            return model(n=int(number.text), role=role, child=child)
        if token.kind == "name" and token.text == "self":
            self.advance()
            return SelfRestriction(role=self.role())
        return self.primary()

    def primary(self):
        token = self.peek()
        if self.accept("("):
            inner = self.concept()
            self.expect(")")
            return inner
        if self.accept("{"):
            individuals = [self.individual()]
            while self.accept(","):
                individuals.append(self.individual())
            self.expect("}")
            if len(set(individuals)) != len(individuals):
                self.fail("duplicate individual in nominal set", token)
            return Nominals(individuals=tuple(individuals))
        if token.kind == "name":
            self.advance()
            if token.text == "TOP":
                return TOP
            if token.text == "BOT":
                return BOTTOM
            if token.text not in self.signature.concepts:
                raise UndeclaredNameError(token.text, "concept", self.line, token.column)
            return Atom(name=token.text)
        self.fail("expected a concept", token)

    def individual(self) -> str:
        token = self.expect_name("an individual")
        if token.text not in self.signature.individuals:
            raise UndeclaredNameError(token.text, "individual", self.line, token.column)
        return token.text

    # --- roles -------------------------------------------------------------

    def role(self) -> Union[NamedRole, InverseRole, UniversalRole]:
        token = self.expect_name("a role")
        if token.text == "UNIVERSAL":
            return UniversalRole()
        if token.text == "inv":
            self.expect("(")
            inner = self.role_name()
            self.expect(")")
            return InverseRole(name=inner)
        if token.text not in self.signature.roles:
            raise UndeclaredNameError(token.text, "role", self.line, token.column)
        return NamedRole(name=token.text)

    def role_name(self) -> str:
        token = self.expect_name("a role name")
        if token.text not in self.signature.roles:
            raise UndeclaredNameError(token.text, "role", self.line, token.column)
        return token.text

    def role_expression(self):
        start = self.peek()
        roles = [self.role()]
        while self.peek().kind == "name" and self.peek().text == "o":
            self.advance()
            roles.append(self.role())
        if len(roles) == 1:
            return roles[0]
        if any(isinstance(role, UniversalRole) for role in roles):
            self.fail("the universal role cannot appear in a role chain", start)
        return RoleChain(roles=tuple(roles))

    # --- statements --------------------------------------------------------

    def tbox_axiom(self):
        lhs = self.concept()
        operator = self.peek()
        if self.accept("[="):
            model = ConceptInclusion
        elif self.accept("=="):
            model = ConceptEquality
        else:
            self.fail("expected '[=' or '=='", operator)
        rhs = self.concept()
        self.expect_end()
        return model(lhs=lhs, rhs=rhs)

    def rbox_axiom(self):
        token = self.peek()
        if token.kind == "name" and token.text in _ROLE_PROPERTIES and self.peek(1).text == "(":
            self.advance()
            self.expect("(")
            role = self.role()
            self.expect(")")
            self.expect_end()
            return RoleProperty(property=token.text, role=role)
        if token.kind == "name" and token.text == "disjoint" and self.peek(1).text == "(":
            self.advance()
            self.expect("(")
            first = self.role()
            self.expect(",")
            second = self.role()
            self.expect(")")
            self.expect_end()
            return RoleDisjointness(first=first, second=second)
        lhs = self.role_expression()
        self.expect("[=")
        rhs = self.role()
        self.expect_end()
        return RoleInclusion(lhs=lhs, rhs=rhs)

    def dbox_axiom(self) -> DefeasibleAxiom:
        antecedent = self.defeasible_side()
        arrow = self.peek()
        if arrow.text not in _DEFEASIBLE_ARROWS:
            self.fail("expected '~[='", arrow)
        self.advance()
        consequent = self.defeasible_side()
        self.expect_end()
        return DefeasibleAxiom(antecedent=antecedent, consequent=consequent)

    def defeasible_side(self):
        start = self.peek()
        side = self.concept()
        if not is_literal(side):
            raise MalformedDefeasibleAxiomError(
                f"line {self.line}, column {start.column}: defeasible axiom sides must be atoms, "
                f"negated atoms, TOP or BOT, got '{side.render()}'"
            )
        return side

    def abox_axiom(self) -> ConceptInclusion:
        token = self.peek()
        if token.kind == "name" and token.text in self.signature.roles and self.peek(1).text == "(":
            self.advance()
            self.expect("(")
            subject = self.individual()
            self.expect(",")
            target = self.individual()
            self.expect(")")
            self.expect_end()
            return NormalFormService.abox_to_tbox(NamedRole(name=token.text), subject, target)
        concept = self.unary()
        self.expect("(")
        subject = self.individual()
        self.expect(")")
        self.expect_end()
        return NormalFormService.abox_to_tbox(concept, subject)

    def query(self) -> Union[Subsumption, DefeasibleQuery]:
        lhs = self.concept()
        operator = self.peek()
        if operator.text in _DEFEASIBLE_ARROWS:
            self.advance()
            rhs = self.concept()
            self.expect_end()
            return DefeasibleQuery(antecedent=lhs, consequent=rhs)
        if self.accept("[="):
            rhs = self.concept()
            self.expect_end()
            return Subsumption(lhs=lhs, rhs=rhs)
        self.fail("expected '~[=' or '[='", operator)


def _statements(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if content.strip():
            yield number, content


def _signature_of(kb: KnowledgeBase) -> _Signature:
    return _Signature(kb.concepts, kb.roles, kb.individuals)


class SyntaxService:
    """
    Service for reading and writing knowledge bases in the KB file format.
    """

    def parse_kb(self, text: str) -> KnowledgeBase:
        """
        Parse KB source text.

        Args:
            text: Full source, one statement per line

        Returns:
            The parsed KnowledgeBase; ABox lines are already in TBox form

        Raises:
            KbSyntaxError: If a line does not follow the grammar
            UndeclaredNameError: If a name is used without declaration
            MalformedDefeasibleAxiomError: If a defeasible side is not a literal
        """
        declared = {kind: set() for kind in _DECLARATIONS}
        body = []
        for number, content in _statements(text):
            tokens = _tokenize(content, number)
            head = tokens[0]
            if head.kind == "name" and head.text in _DECLARATIONS and tokens[1].text != ":":
                declared[head.text].update(self._declaration(tokens, number))
            elif head.kind == "name" and head.text in _SECTIONS:
                body.append((number, tokens))
            else:
                raise KbSyntaxError(f"unknown statement '{head.text}'", number, head.column)

        signature = _Signature(
            frozenset(declared["concept"]), frozenset(declared["role"]), frozenset(declared["individual"])
        )
        tbox, rbox, dbox = set(), set(), set()
        for number, tokens in body:
            parser = _Parser(tokens, number, signature)
            section = parser.advance().text
            parser.expect(":")
            if section == "tbox":
                tbox.add(parser.tbox_axiom())
            elif section == "abox":
                tbox.add(parser.abox_axiom())
            elif section == "rbox":
                rbox.add(parser.rbox_axiom())
            else:
                dbox.add(parser.dbox_axiom())

        kb = KnowledgeBase(
            concepts=signature.concepts,
            roles=signature.roles,
            individuals=signature.individuals,
            tbox=frozenset(tbox),
            rbox=frozenset(rbox),
            dbox=frozenset(dbox),
        )
        logger.info(
            f"Parsed KB: {len(kb.concepts)} concepts, {len(kb.tbox)} tbox, "
            f"{len(kb.rbox)} rbox, {len(kb.dbox)} dbox axioms"
        )
        return kb

    @staticmethod
    def _declaration(tokens: List[_Token], line: int) -> List[str]:
        kind = tokens[0].text
        names = []
        position = 1
        while True:
            token = tokens[position]
            if token.kind != "name":
                raise KbSyntaxError(f"expected a {kind} name", line, token.column)
            if kind != "individual" and not token.text[:1].isupper():
                raise KbSyntaxError(
                    f"{kind} names start with an upper-case letter: '{token.text}'", line, token.column
                )
            names.append(token.text)
            separator = tokens[position + 1]
            position += 2
            if separator.text == ",":
                continue
            if separator.text == "." and tokens[position].kind == "end":
                return names
            raise KbSyntaxError(f"expected ',' or '.' after '{token.text}'", line, separator.column)

    def serialize_kb(self, kb: KnowledgeBase) -> str:
        """
        Render a KnowledgeBase in canonical source form.

        Declarations come first, then tbox, rbox and dbox lines, each block
        sorted lexicographically.
        """
        lines = []
        for kind, names in (
            ("concept", kb.concepts),
            ("role", kb.roles),
            ("individual", kb.individuals),
        ):
            if names:
                lines.append(f"{kind} {', '.join(sorted(names))}.")
        lines += [f"tbox: {axiom.render()}." for axiom in kb.sorted_tbox()]
        lines += [f"rbox: {axiom.render()}." for axiom in kb.sorted_rbox()]
        lines += [f"dbox: {axiom.render()}." for axiom in kb.sorted_dbox()]
        return "\n".join(lines) + "\n"

    def parse_concept(self, text: str, kb: KnowledgeBase):
        """Parse one concept expression over the signature of `kb`."""
        parser = _Parser(_tokenize(text, 1), 1, _signature_of(kb))
        concept = parser.concept()
        parser.expect_end()
        return concept

    def parse_query(self, text: str, kb: KnowledgeBase) -> Union[Subsumption, DefeasibleQuery]:
        """Parse `C ~[= D` into a DefeasibleQuery or `C [= D` into a Subsumption."""
        parser = _Parser(_tokenize(text, 1), 1, _signature_of(kb))
        return parser.query()

    def parse_literal(self, text: str) -> PredicateLiteral:
        """Parse a ground program literal such as `f(a)`, `-f(b)` or `prey(a, b)`."""
        match = _LITERAL.match(text)
        if not match:
            raise KbSyntaxError(f"not a ground literal: '{text.strip()}'", 1, 1)
        negated, predicate, first, second = match.groups()
        individuals: Tuple[str, ...] = (first,) if second is None else (first, second)
        return literal(predicate, *individuals, negated=bool(negated))
