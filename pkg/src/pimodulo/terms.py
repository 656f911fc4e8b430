"""Core term language: syntax trees, binding, substitution, positions.

Bound variables are nameless de Bruijn indices; free variables and signature
constants are referenced by name.  Binders keep a display hint that is ignored
by equality and hashing, so ``==`` on terms is exactly alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator, Union

Term = Union["Var", "FVar", "Const", "SortType", "SortKind", "Pi", "Lam", "App"]
Position = tuple[int, ...]


@dataclass(frozen=True)
class Var:
    """Bound variable: index counts binders outward from the use site."""

    index: int
    span: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class FVar:
    """Free variable, named by a context or pattern-context entry."""

    name: str
    span: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    """Constant declared in a theory signature."""

    name: str
    span: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SortType:
    span: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SortKind:
    span: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pi:
    hint: str = field(compare=False)
    domain: Term
    codomain: Term
    span: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Lam:
    hint: str = field(compare=False)
    annotation: Term
    body: Term
    span: Any = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term
    span: Any = field(default=None, compare=False, repr=False)


TYPE = SortType()
KIND = SortKind()


def alpha_eq(t: Term, u: Term) -> bool:
    """Equality up to bound-variable renaming (structural on this encoding)."""
    return t == u


def term_size(t: Term) -> int:
    match t:
        case Pi(_, a, b) | Lam(_, a, b):
            return 1 + term_size(a) + term_size(b)
        case App(f, a):
            return 1 + term_size(f) + term_size(a)
        case _:
            return 1


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add `by` to every bound index >= cutoff (indices escaping the term)."""
    match t:
        case Var(i):
            return Var(i + by) if i >= cutoff else t
        case Pi(h, a, b):
            return Pi(h, shift(a, by, cutoff), shift(b, by, cutoff + 1))
        case Lam(h, a, b):
            return Lam(h, shift(a, by, cutoff), shift(b, by, cutoff + 1))
        case App(f, a):
            return App(shift(f, by, cutoff), shift(a, by, cutoff))
        case _:
            return t


def instantiate(body: Term, u: Term) -> Term:
    """Replace the binder variable of an opened body (index 0) by u."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case Var(i):
                if i == depth:
                    return shift(u, depth)
                return Var(i - 1) if i > depth else t
            case Pi(h, a, b):
                return Pi(h, go(a, depth), go(b, depth + 1))
            case Lam(h, a, b):
                return Lam(h, go(a, depth), go(b, depth + 1))
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case _:
                return t

    return go(body, 0)


def open_binder(body: Term, name: str) -> Term:
    """Instantiate a binder body with a fresh free variable."""
    return instantiate(body, FVar(name))


def close_binder(t: Term, name: str) -> Term:
    """Abstract the free variable `name` back into binder index 0."""

    def go(u: Term, depth: int) -> Term:
        match u:
            case FVar(n):
                return Var(depth) if n == name else u
            case Var(i):
                return Var(i + 1) if i >= depth else u
            case Pi(h, a, b):
                return Pi(h, go(a, depth), go(b, depth + 1))
            case Lam(h, a, b):
                return Lam(h, go(a, depth), go(b, depth + 1))
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case _:
                return u

    return go(t, 0)


def substitute(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding (u/x)t for the free variable x."""
    return substitute_many(t, {x: u})


def substitute_many(t: Term, subst: dict[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution of free variables."""

    def go(term: Term, depth: int) -> Term:
        match term:
            case FVar(n):
                if n in subst:
                    return shift(subst[n], depth)
                return term
            case Pi(h, a, b):
                return Pi(h, go(a, depth), go(b, depth + 1))
            case Lam(h, a, b):
                return Lam(h, go(a, depth), go(b, depth + 1))
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case _:
                return term

    return go(t, 0)


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()

    def go(term: Term) -> None:
        match term:
            case FVar(n):
                out.add(n)
            case Pi(_, a, b) | Lam(_, a, b):
                go(a)
                go(b)
            case App(f, a):
                go(f)
                go(a)
            case _:
                pass

    go(t)
    return out


def const_names(t: Term) -> set[str]:
    out: set[str] = set()

    def go(term: Term) -> None:
        match term:
            case Const(n):
                out.add(n)
            case Pi(_, a, b) | Lam(_, a, b):
                go(a)
                go(b)
            case App(f, a):
                go(f)
                go(a)
            case _:
                pass

    go(t)
    return out


def uses_bound(t: Term, index: int = 0) -> bool:
    """Does t mention the bound variable with the given outward index?"""
    match t:
        case Var(i):
            return i == index
        case Pi(_, a, b) | Lam(_, a, b):
            return uses_bound(a, index) or uses_bound(b, index + 1)
        case App(f, a):
            return uses_bound(f, index) or uses_bound(a, index)
        case _:
            return False


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Pi(_, a, b) | Lam(_, a, b):
            return (a, b)
        case App(f, a):
            return (f, a)
        case _:
            return ()


def subterm_positions(t: Term) -> list[tuple[Position, Term]]:
    """Preorder enumeration of all subterm occurrences with their paths."""
    out: list[tuple[Position, Term]] = []

    def go(term: Term, pos: Position) -> None:
        out.append((pos, term))
        for i, child in enumerate(children(term)):
            go(child, pos + (i,))

    go(t, ())
    return out


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        t = children(t)[i]
    return t


def replace_at(t: Term, pos: Position, sub: Term) -> Term:
    if not pos:
        return sub
    i, rest = pos[0], pos[1:]
    match t:
        case Pi(h, a, b):
            return Pi(h, replace_at(a, rest, sub), b) if i == 0 else Pi(h, a, replace_at(b, rest, sub))
        case Lam(h, a, b):
            return Lam(h, replace_at(a, rest, sub), b) if i == 0 else Lam(h, a, replace_at(b, rest, sub))
        case App(f, a):
            return App(replace_at(f, rest, sub), a) if i == 0 else App(f, replace_at(a, rest, sub))
        case _:
            raise IndexError(f"position {pos} goes below a leaf")


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Unwind applications: returns (head, [arg1, ..., argk])."""
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def apply_spine(head: Term, args: Iterator[Term] | list[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def arrow(a: Term, b: Term) -> Term:
    """Non-dependent function type: Pi with an unused binder."""
    return Pi("_", a, shift(b, 1))


# -- contexts, rules, theories -----------------------------------------------

Binding = tuple[str, Term]
Context = tuple[Binding, ...]


@dataclass(frozen=True)
class RewriteRule:
    ctx: Context
    lhs: Term
    rhs: Term
    rtype: Term
    label: str = field(default="rule", compare=False)


@dataclass(frozen=True)
class Theory:
    signature: Context = ()
    rules: tuple[RewriteRule, ...] = ()

    def const_type(self, name: str) -> Term | None:
        for n, ty in self.signature:
            if n == name:
                return ty
        return None

    def without_rules(self) -> "Theory":
        return Theory(self.signature, ())


def ctx_lookup(ctx: Context, name: str) -> Term | None:
    for n, ty in ctx:
        if n == name:
            return ty
    return None
