"""
Module comprising the readers and writer of the language and rule files.

Language files declare the symbols, one statement per line::

    type player.
    const player1:player.
    pred on_ladder/2 state (player,ladder).

Rule files hold weighted definite clauses::

    # comment
    0.73 up(X):-on_ladder(Player,Ladder),same_floor(Player,Ladder).

@date: Oct 2026
"""

__all__ = [
    "parse_language",
    "parse_rules",
    "format_atom",
    "format_rule",
    "format_rules",
    "DEFAULT_WEIGHT",
]

import ply.lex as lex

from ..common.errors import ParseError
from .language import BLEND_ALIASES
from .language import BLEND_PREDICATES
from .language import KINDS
from .language import STATE_VARIABLE
from .language import Atom
from .language import Constant
from .language import Language
from .language import Predicate
from .language import Rule
from .language import RuleSet
from .language import Term

DEFAULT_WEIGHT = 0.5


class _Lexer:
    """ply token rules shared by both file formats."""

    tokens = (
        "NUMBER",
        "UPPER",
        "LOWER",
        "LPAREN",
        "RPAREN",
        "COMMA",
        "PERIOD",
        "IMPLY",
        "COLON",
        "SLASH",
    )

    t_LPAREN = r"\("
    t_RPAREN = r"\)"
    t_COMMA = r","
    t_PERIOD = r"\."
    t_IMPLY = r":-"
    t_COLON = r":"
    t_SLASH = r"/"
    t_ignore = " \t\r"
    t_ignore_COMMENT = r"\#.*"

    def t_NUMBER(self, t):
        r"-?\d+(\.\d+)?"
        return t

    def t_UPPER(self, t):
        r"[A-Z_][A-Za-z0-9_]*"
        return t

    def t_LOWER(self, t):
        r"[a-z][A-Za-z0-9_]*"
        return t

    def t_newline(self, t):
        r"\n+"
        t.lexer.lineno += len(t.value)

    def t_error(self, t):
        raise ParseError(f"illegal character {t.value[0]!r}", t.lexer.lineno)

    def tokenize(self, text):
        lexer = lex.lex(object=self, errorlog=lex.NullLogger())
        lexer.input(text)
        return list(iter(lexer.token, None))


class _TokenStream:
    """Cursor over a token list with line-aware diagnostics."""

    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset=0):
        idx = self.pos + offset
        return self.tokens[idx] if idx < len(self.tokens) else None

    def at_end(self):
        return self.pos >= len(self.tokens)

    def next(self, expected, what=None):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {what or expected}")
        if tok.type != expected:
            raise ParseError(f"expected {what or expected}, found {tok.value!r}", tok.lineno)
        self.pos += 1
        return tok

    def accept(self, expected):
        tok = self.peek()
        if tok is not None and tok.type == expected:
            self.pos += 1
            return tok
        return None

    @property
    def line(self):
        tok = self.peek()
        if tok is None and self.tokens:
            return self.tokens[-1].lineno
        return tok.lineno if tok is not None else None


def _canonical(name):
    return BLEND_ALIASES.get(name, name)


def parse_language(text):
    """
    Parse a language declaration source.

    Parameters
    ----------
    text : str
        Lines of ``type``, ``const`` and ``pred`` statements.

    Returns
    -------
    Language
        Symbols in declaration order.

    Raises
    ------
    ParseError
        On malformed statements, duplicate names or unknown types.
    """
    stream = _TokenStream(_Lexer().tokenize(text))
    types, constants, predicates = [], [], []

    while not stream.at_end():
        keyword = stream.next("LOWER", "a 'type', 'const' or 'pred' statement")
        line = keyword.lineno

        if keyword.value == "type":
            name = stream.next("LOWER", "type name").value
            if name in types:
                raise ParseError(f"duplicate type {name!r}", line)
            types.append(name)

        elif keyword.value == "const":
            name = stream.next("LOWER", "constant name").value
            stream.next("COLON", "':'")
            type_name = stream.next("LOWER", "constant type").value
            if any(c.name == name for c in constants):
                raise ParseError(f"duplicate constant {name!r}", line)
            if type_name not in types:
                raise ParseError(f"unknown type {type_name!r} for constant {name!r}", line)
            constants.append(Constant(name, type_name))

        elif keyword.value == "pred":
            name = _canonical(stream.next("LOWER", "predicate name").value)
            stream.next("SLASH", "'/'")
            arity_tok = stream.next("NUMBER", "arity")
            if not arity_tok.value.isdigit() or int(arity_tok.value) < 1:
                raise ParseError(f"arity of {name!r} must be a positive integer", line)
            arity = int(arity_tok.value)
            kind = stream.next("LOWER", "predicate kind").value
            if kind not in KINDS:
                raise ParseError(f"unknown predicate kind {kind!r}, expected one of {KINDS}", line)
            stream.next("LPAREN", "'('")
            signature = [stream.next("LOWER", "argument type").value]
            while stream.accept("COMMA"):
                signature.append(stream.next("LOWER", "argument type").value)
            stream.next("RPAREN", "')'")

            if any(p.name == name for p in predicates):
                raise ParseError(f"duplicate predicate {name!r}", line)
            if len(signature) != arity:
                raise ParseError(f"{name}/{arity} declares {len(signature)} argument types", line)
            for type_name in signature:
                if type_name not in types:
                    raise ParseError(f"unknown type {type_name!r} in signature of {name}/{arity}", line)
            if kind == "blend" and (name not in BLEND_PREDICATES or arity != 1):
                raise ParseError(f"blend predicates are neural/1 and logic/1, got {name}/{arity}", line)
            if kind != "blend" and name in BLEND_PREDICATES:
                raise ParseError(f"{name!r} is reserved for blend predicates", line)
            predicates.append(Predicate(name, arity, tuple(signature), kind))

        else:
            raise ParseError(f"unknown statement {keyword.value!r}", line)

        stream.next("PERIOD", "'.'")

    return Language(tuple(types), tuple(constants), tuple(predicates))


def _parse_atom(stream, lang):
    name_tok = stream.next("LOWER", "predicate name")
    name = _canonical(name_tok.value)
    if not lang.has_predicate(name):
        raise ParseError(f"undeclared predicate {name!r}", name_tok.lineno)
    pred = lang.predicate(name)

    stream.next("LPAREN", f"'(' after {name!r}")
    args, lines = [], []
    while True:
        tok = stream.peek()
        if tok is None:
            raise ParseError(f"unterminated atom {name!r}")
        lines.append(tok.lineno)
        if tok.type == "UPPER":
            args.append(Term(stream.next("UPPER").value))
        elif tok.type == "LOWER":
            stream.pos += 1
            nxt = stream.peek()
            if nxt is not None and nxt.type == "LPAREN":
                raise ParseError(
                    f"function symbol {tok.value!r} in argument of {name!r}: function symbols are not supported",
                    tok.lineno,
                )
            args.append(Term(tok.value))
        else:
            raise ParseError(f"expected a term in {name!r}, found {tok.value!r}", tok.lineno)
        if not stream.accept("COMMA"):
            break
    stream.next("RPAREN", f"')' closing {name!r}")

    if len(args) != pred.arity:
        raise ParseError(f"{pred} applied to {len(args)} arguments", name_tok.lineno)
    for term, type_name, line in zip(args, pred.arg_types, lines):
        if term.is_var:
            continue
        if not lang.has_constant(term.name):
            raise ParseError(f"undeclared constant {term.name!r}", line)
        if lang.constant(term.name).type != type_name:
            raise ParseError(f"constant {term.name!r} is not of type {type_name!r} in {pred}", line)
    return Atom(pred, tuple(args))


def _check_rule(rule, lang, line):
    if rule.head.predicate.kind not in ("action", "blend"):
        raise ParseError(f"head {rule.head.predicate} must be an action or blend predicate", line)
    for atom in rule.body:
        if atom.predicate.kind != "state":
            raise ParseError(f"body atom {atom.predicate} must be a state predicate", line)

    body_vars = {v for atom in rule.body for v in atom.variables}
    for var in rule.head.variables:
        if var not in body_vars and var != STATE_VARIABLE:
            raise ParseError(f"head variable {var!r} does not appear in the body", line)

    seen = {}
    for atom in (rule.head, ) + rule.body:
        for term, type_name in zip(atom.args, atom.predicate.arg_types):
            if term.is_var and seen.setdefault(term.name, type_name) != type_name:
                raise ParseError(
                    f"variable {term.name!r} used as both {seen[term.name]!r} and {type_name!r}",
                    line,
                )

    if rule.kind == "blend":
        missing = [b for b in BLEND_PREDICATES if not lang.has_predicate(b)]
        if missing:
            raise ParseError(f"blending rules need both neural/1 and logic/1; missing {missing}", line)


def parse_rules(text, lang):
    """
    Parse weighted clauses ``W head :- b1,...,bn.`` against a language.

    The leading weight is optional and defaults to ``DEFAULT_WEIGHT``.
    """
    stream = _TokenStream(_Lexer().tokenize(text))
    rules = []

    while not stream.at_end():
        line = stream.line
        weight = DEFAULT_WEIGHT
        num = stream.accept("NUMBER")
        if num is not None:
            weight = float(num.value)
            if not 0.0 <= weight <= 1.0:
                raise ParseError(f"weight {num.value} outside [0,1]", num.lineno)

        head = _parse_atom(stream, lang)
        stream.next("IMPLY", "':-' (rule bodies are required)")
        body = [_parse_atom(stream, lang)]
        while stream.accept("COMMA"):
            body.append(_parse_atom(stream, lang))
        stream.next("PERIOD", "'.' terminating the clause")

        rule = Rule(weight, head, tuple(body))
        _check_rule(rule, lang, line)
        rules.append(rule)

    return RuleSet(lang, tuple(rules))


def format_atom(atom):
    return str(atom)


def format_rule(rule):
    """Render a rule in the DSL with a 4-decimal weight."""
    body = ",".join(format_atom(a) for a in rule.body)
    return f"{rule.weight:.4f} {format_atom(rule.head)}:-{body}."


def format_rules(rules):
    return "\n".join(format_rule(r) for r in rules.rules) + "\n"
