"""InqML syntax: core AST, parser, printer and syntactic measures.

Surface grammar (loosest binding first)::

    imp   := disj ('->' imp)?                 right associative
    disj  := conj (('\\/' | '|') conj)*        left associative
    conj  := unary ('&' unary)*                left associative
    unary := '!' unary | '?' unary | '[a]' unary | '[+a]' unary
           | atom | '_|_' | 'T' | '(' imp ')'

``\\/`` is inquisitive disjunction, ``|`` classical disjunction. ``!``, ``?``,
``|`` and ``T`` are sugar expanded at parse time, so they never appear in the
AST. ``[]`` and ``[+]`` stand for the only agent of the signature.
"""
import re
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import FormulaSyntaxError

DEFAULT_AGENT = "a"
PRINT_WARN_SIZE = 100_000

_IMP, _DISJ, _CONJ, _UNARY = range(4)


class Formula:
    """Base class. Nodes are immutable, hash once, and cache depth and size."""

    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"{type(self).__name__}({to_text(self, warn=False)!r})"


def _finish(node, key):
    kids = node.children()
    object.__setattr__(node, "_hash", hash(key))
    object.__setattr__(node, "depth", max((c.depth for c in kids), default=0)
                       + (1 if isinstance(node, (Box, BoxPlus)) else 0))
    object.__setattr__(node, "tree_size", 1 + sum(c.tree_size for c in kids))


def _eq(a, b):
    return a is b or (type(a) is type(b) and a._hash == b._hash and a._key() == b._key())


@dataclass(frozen=True, eq=False, repr=False)
class Atom(Formula):
    name: str
    _hash: int = field(init=False, compare=False)
    depth: int = field(init=False, compare=False)
    tree_size: int = field(init=False, compare=False)

    def __post_init__(self):
        _finish(self, ("atom", self.name))

    def _key(self):
        return (self.name,)

    __eq__ = _eq

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, eq=False, repr=False)
class Bottom(Formula):
    _hash: int = field(init=False, compare=False)
    depth: int = field(init=False, compare=False)
    tree_size: int = field(init=False, compare=False)

    def __post_init__(self):
        _finish(self, ("bot",))

    def _key(self):
        return ()

    __eq__ = _eq

    def __hash__(self):
        return self._hash


def _binary(kind):
    @dataclass(frozen=True, eq=False, repr=False)
    class Binary(Formula):
        left: Formula
        right: Formula
        _hash: int = field(init=False, compare=False)
        depth: int = field(init=False, compare=False)
        tree_size: int = field(init=False, compare=False)

        def __post_init__(self):
            _finish(self, (kind, self.left._hash, self.right._hash))

        def children(self):
            return (self.left, self.right)

        def _key(self):
            return (self.left, self.right)

        __eq__ = _eq

        def __hash__(self):
            return self._hash

    return Binary


def _modal(kind):
    @dataclass(frozen=True, eq=False, repr=False)
    class Modal(Formula):
        agent: str
        body: Formula
        _hash: int = field(init=False, compare=False)
        depth: int = field(init=False, compare=False)
        tree_size: int = field(init=False, compare=False)

        def __post_init__(self):
            _finish(self, (kind, self.agent, self.body._hash))

        def children(self):
            return (self.body,)

        def _key(self):
            return (self.agent, self.body)

        __eq__ = _eq

        def __hash__(self):
            return self._hash

    return Modal


class And(_binary("and")):
    __slots__ = ()


class Implies(_binary("imp")):
    __slots__ = ()


class IDisj(_binary("idisj")):
    """Inquisitive disjunction."""

    __slots__ = ()


class Box(_modal("box")):
    __slots__ = ()


class BoxPlus(_modal("boxplus")):
    __slots__ = ()


BOT = Bottom()
TOP = Implies(BOT, BOT)


def Not(phi: Formula) -> Formula:
    return Implies(phi, BOT)


def Or(phi: Formula, psi: Formula) -> Formula:
    """Classical (tensor-free) disjunction, defined as !(!phi & !psi)."""
    return Not(And(Not(phi), Not(psi)))


def Question(phi: Formula) -> Formula:
    return IDisj(phi, Not(phi))


def conj(items: Iterable[Formula]) -> Formula:
    """Left-associated conjunction; the empty conjunction is ``T``."""
    out = None
    for f in items:
        out = f if out is None else And(out, f)
    return TOP if out is None else out


def disj(items: Iterable[Formula]) -> Formula:
    """Left-associated classical disjunction; empty gives bottom."""
    out = None
    for f in items:
        out = f if out is None else Or(out, f)
    return BOT if out is None else out


def idisj(items: Iterable[Formula]) -> Formula:
    """Left-associated inquisitive disjunction; empty gives bottom."""
    out = None
    for f in items:
        out = f if out is None else IDisj(out, f)
    return BOT if out is None else out


def modal_depth(phi: Formula) -> int:
    return phi.depth


def _walk(phi: Formula):
    seen = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        yield f
        stack.extend(f.children())


def subformulas(phi: Formula) -> set:
    return set(_walk(phi))


def dag_size(phi: Formula) -> int:
    """Number of distinct subformulas (size with sharing)."""
    return len(subformulas(phi))


def atoms_of(phi: Formula) -> set:
    return {f.name for f in _walk(phi) if isinstance(f, Atom)}


def agents_of(phi: Formula) -> set:
    return {f.agent for f in _walk(phi) if isinstance(f, (Box, BoxPlus))}


def has_kind(phi: Formula, *kinds) -> bool:
    return any(isinstance(f, kinds) for f in _walk(phi))


def is_flat_syntax(phi: Formula, _memo=None) -> bool:
    """Sufficient syntactic test for truth-conditionality.

    Atoms, bottom and modal formulae are flat; conjunction preserves
    flatness and an implication is flat whenever its consequent is.
    """
    if _memo is None:
        _memo = {}
    hit = _memo.get(phi)
    if hit is not None:
        return hit
    if isinstance(phi, (Atom, Bottom, Box, BoxPlus)):
        out = True
    elif isinstance(phi, And):
        out = is_flat_syntax(phi.left, _memo) and is_flat_syntax(phi.right, _memo)
    elif isinstance(phi, Implies):
        out = is_flat_syntax(phi.right, _memo)
    else:
        out = False
    _memo[phi] = out
    return out


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<bot>_\|_)
  | (?P<box>\[\+?[A-Za-z0-9_']*\])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>->|\\/|[&|!?()])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError("unexpected character", text, pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, agents):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.agents = None if agents is None else tuple(agents)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(msg, self.text, tok[2])

    def parse(self):
        f = self.imp()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return f

    def imp(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] in ("\\/", "|"):
            op = self.take()[1]
            right = self.conj()
            left = IDisj(left, right) if op == "\\/" else Or(left, right)
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def agent(self, tok):
        label = tok[1].strip("[+]")
        if not label:
            if self.agents is None:
                return DEFAULT_AGENT
            if len(self.agents) != 1:
                self.fail("agent shorthand needs exactly one declared agent", tok)
            return self.agents[0]
        if self.agents is not None and label not in self.agents:
            self.fail(f"unknown agent {label!r}", tok)
        return label

    def unary(self):
        tok = self.take()
        kind, val = tok[0], tok[1]
        if val == "!":
            return Not(self.unary())
        if val == "?":
            return Question(self.unary())
        if kind == "box":
            agent = self.agent(tok)
            body = self.unary()
            return BoxPlus(agent, body) if val.startswith("[+") else Box(agent, body)
        if kind == "bot":
            return BOT
        if kind == "ident":
            return TOP if val == "T" else Atom(val)
        if val == "(":
            f = self.imp()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return f
        self.fail("expected a formula", tok)


def parse(text: str, agents: Optional[Sequence[str]] = None) -> Formula:
    """Parse surface syntax into the core AST.

    With ``agents`` given, modal tags are checked against it and ``[]``
    resolves to its single member; otherwise ``[]`` means agent ``a``.
    """
    return _Parser(text, agents).parse()


# --- printing ----------------------------------------------------------------

def _neg_body(f):
    if isinstance(f, Implies) and f.right == BOT:
        return f.left
    return None


def _or_parts(f):
    inner = _neg_body(f)
    if isinstance(inner, And):
        a, b = _neg_body(inner.left), _neg_body(inner.right)
        if a is not None and b is not None:
            return a, b
    return None


def _render(f, memo):
    """Return (text, level) for f; level is the loosest operator at top."""
    hit = memo.get(f)
    if hit is not None:
        return hit
    if isinstance(f, Atom):
        out = (f.name, _UNARY)
    elif isinstance(f, Bottom):
        out = ("_|_", _UNARY)
    elif f == TOP:
        out = ("T", _UNARY)
    elif _or_parts(f) is not None:
        a, b = _or_parts(f)
        out = (f"{_wrap(a, _DISJ, memo)} | {_wrap(b, _CONJ, memo)}", _DISJ)
    elif _neg_body(f) is not None:
        out = ("!" + _wrap(f.left, _UNARY, memo), _UNARY)
    elif isinstance(f, IDisj) and f.right == Not(f.left):
        out = ("?" + _wrap(f.left, _UNARY, memo), _UNARY)
    elif isinstance(f, IDisj):
        out = (f"{_wrap(f.left, _DISJ, memo)} \\/ {_wrap(f.right, _CONJ, memo)}", _DISJ)
    elif isinstance(f, And):
        out = (f"{_wrap(f.left, _CONJ, memo)} & {_wrap(f.right, _UNARY, memo)}", _CONJ)
    elif isinstance(f, Implies):
        out = (f"{_wrap(f.left, _DISJ, memo)} -> {_wrap(f.right, _IMP, memo)}", _IMP)
    elif isinstance(f, Box):
        out = (f"[{f.agent}]" + _wrap(f.body, _UNARY, memo), _UNARY)
    elif isinstance(f, BoxPlus):
        out = (f"[+{f.agent}]" + _wrap(f.body, _UNARY, memo), _UNARY)
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def _wrap(f, need, memo):
    text, level = _render(f, memo)
    return text if level >= need else f"({text})"


def to_text(phi: Formula, warn: bool = True) -> str:
    """Print ``phi`` in surface syntax; ``parse(to_text(phi)) == phi``."""
    if warn and phi.tree_size > PRINT_WARN_SIZE:
        warnings.warn(f"printing a formula with {phi.tree_size} tree nodes", stacklevel=2)
    return _render(phi, {})[0]


class Interner:
    """Hash-consing store: structurally equal nodes become one object."""

    def __init__(self):
        self._table = {}

    def __call__(self, node: Formula) -> Formula:
        return self._table.setdefault(node, node)

    def __len__(self):
        return len(self._table)
