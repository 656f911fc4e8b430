"""Beta and rewrite steps, normalization, and beta-R convertibility.

Rewriting is fuel-bounded throughout: the rewrite relation of a user theory
need not terminate, so exhaustion is a reported value, never a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    App,
    Const,
    FVar,
    Lam,
    Pi,
    Position,
    RewriteRule,
    SortKind,
    SortType,
    Term,
    Theory,
    Var,
    children,
    instantiate,
    replace_at,
    spine,
    substitute_many,
    subterm_positions,
)

BETA = "beta"
BETA_R = "beta-R"

DEFAULT_FUEL = 1_000_000


@dataclass
class FuelExhausted:
    """Outcome value for a reduction that ran out of budget."""

    last: Term

    def __bool__(self):
        # Tri-state results (True | False | FuelExhausted) must not silently
        # collapse into truthiness.
        raise TypeError("FuelExhausted has no boolean value; test with isinstance")


class Fuel:
    """Mutable step budget shared across one logical operation."""

    def __init__(self, steps: int = DEFAULT_FUEL):
        self.remaining = steps

    def spend(self) -> bool:
        if self.remaining <= 0:
            return False
        self.remaining -= 1
        return True


def beta_root(t: Term) -> Term | None:
    match t:
        case App(Lam(_, _, body), arg):
            return instantiate(body, arg)
        case _:
            return None


def match_pattern(lhs: Term, t: Term) -> dict[str, Term] | None:
    """First-order match of an algebraic pattern against a subject term.

    Pattern variables are the free variables of lhs; left-linearity makes the
    binding unique when it exists.
    """
    binding: dict[str, Term] = {}

    def go(pat: Term, sub: Term) -> bool:
        match pat:
            case FVar(x):
                binding[x] = sub
                return True
            case Const(c):
                return isinstance(sub, Const) and sub.name == c
            case App(pf, pa):
                return isinstance(sub, App) and go(pf, sub.fn) and go(pa, sub.arg)
            case SortType() | SortKind():
                return pat == sub
            case _:
                # binders never occur in an algebraic pattern
                return False

    return binding if go(lhs, t) else None


def r_root(t: Term, theory: Theory) -> tuple[Term, str] | None:
    """First rule in declaration order whose lhs matches at the root."""
    for rule in theory.rules:
        binding = match_pattern(rule.lhs, t)
        if binding is not None:
            return substitute_many(rule.rhs, binding), rule.label
    return None


def root_steps(t: Term, theory: Theory, mode: str) -> list[tuple[Term, str]]:
    out = []
    reduct = beta_root(t)
    if reduct is not None:
        out.append((reduct, "beta"))
    if mode == BETA_R:
        hit = r_root(t, theory)
        if hit is not None:
            out.append(hit)
    return out


def one_step_reducts(t: Term, theory: Theory, mode: str = BETA_R) -> list[Term]:
    """All one-step reducts at any position, deduplicated up to alpha."""
    out: list[Term] = []
    for pos, sub in subterm_positions(t):
        for reduct, _ in root_steps(sub, theory, mode):
            out.append(replace_at(t, pos, reduct))
    return list(dict.fromkeys(out))


def leftmost_outermost(t: Term, theory: Theory, mode: str) -> tuple[Position, Term, str] | None:
    """First preorder position carrying a root step, with its reduct."""

    def go(sub: Term, pos: Position):
        steps = root_steps(sub, theory, mode)
        if steps:
            reduct, label = steps[0]
            return pos, reduct, label
        for i, child in enumerate(children(sub)):
            hit = go(child, pos + (i,))
            if hit is not None:
                return hit
        return None

    return go(t, ())


def normalize(
    t: Term,
    theory: Theory,
    mode: str = BETA_R,
    fuel: Fuel | None = None,
    trace: list[tuple[Position, str, Term]] | None = None,
) -> Term | FuelExhausted:
    """Leftmost-outermost normalization; exhaustion returns the last term."""
    if fuel is None:
        fuel = Fuel()
    while True:
        hit = leftmost_outermost(t, theory, mode)
        if hit is None:
            return t
        if not fuel.spend():
            return FuelExhausted(t)
        pos, reduct, label = hit
        t = replace_at(t, pos, reduct)
        if trace is not None:
            trace.append((pos, label, t))


def whnf(t: Term, theory: Theory, mode: str = BETA_R, fuel: Fuel | None = None) -> Term | FuelExhausted:
    """Reduce until the root shape is stable (non-application or normal).

    Rule patterns can require inner structure, so when the root is still an
    application this keeps taking leftmost-outermost steps; it stops as soon
    as the root is a binder, sort, or atom, leaving subterms untouched.
    """
    if fuel is None:
        fuel = Fuel()
    while True:
        if not isinstance(t, App):
            return t
        hit = leftmost_outermost(t, theory, mode)
        if hit is None:
            return t
        if not fuel.spend():
            return FuelExhausted(t)
        pos, reduct, _ = hit
        t = replace_at(t, pos, reduct)


def convertible(
    t: Term,
    u: Term,
    theory: Theory,
    fuel: Fuel | None = None,
    mode: str = BETA_R,
) -> bool | FuelExhausted:
    """Beta-R convertibility, decided by weak-head comparison with fallback
    to full normal forms.  Sound and complete when the theory's rewrite
    relation is confluent and terminating (both shipped theories are)."""
    if fuel is None:
        fuel = Fuel()
    if t == u:
        return True
    wt = whnf(t, theory, mode, fuel)
    if isinstance(wt, FuelExhausted):
        return wt
    wu = whnf(u, theory, mode, fuel)
    if isinstance(wu, FuelExhausted):
        return wu
    match (wt, wu):
        case (Pi(_, a1, b1), Pi(_, a2, b2)) | (Lam(_, a1, b1), Lam(_, a2, b2)):
            sub = convertible(a1, a2, theory, fuel, mode)
            if sub is not True:
                return sub
            return convertible(b1, b2, theory, fuel, mode)
        case (App(), App()):
            # whnf only leaves an application root when the whole term is
            # normal, so a plain alpha comparison decides it.
            return wt == wu
        case _:
            return wt == wu


def is_normal(t: Term, theory: Theory, mode: str = BETA_R) -> bool:
    return leftmost_outermost(t, theory, mode) is None


def pattern_variables(lhs: Term) -> list[str]:
    """Pattern variables of an algebraic lhs in left-to-right order.

    Raises ValueError when lhs is not algebraic: it must be a constant applied
    to a spine of pattern variables or nested algebraic patterns, linear, with
    no binders.
    """
    seen: list[str] = []

    def arg_ok(t: Term) -> bool:
        match t:
            case FVar(x):
                if x in seen:
                    return False
                seen.append(x)
                return True
            case _:
                return const_headed(t)

    def const_headed(t: Term) -> bool:
        head, args = spine(t)
        return isinstance(head, Const) and all(arg_ok(a) for a in args)

    if not const_headed(lhs):
        raise ValueError("lhs is not an algebraic pattern")
    return seen


def patterns_overlap(l1: Term, l2: Term, skip_root: bool = False) -> bool:
    """Can some term match l1 at the root and l2 at a non-variable position?

    Patterns are linear with disjoint variable namespaces assumed, so plain
    structural unification without an occurs check decides it.
    """

    def unify(a: Term, b: Term) -> bool:
        if isinstance(a, FVar) or isinstance(b, FVar):
            return True
        match (a, b):
            case (Const(x), Const(y)):
                return x == y
            case (App(f1, a1), App(f2, a2)):
                return unify(f1, f2) and unify(a1, a2)
            case _:
                return a == b

    for pos, sub in subterm_positions(l2):
        if isinstance(sub, FVar):
            continue
        if pos == () and skip_root:
            continue
        if unify(l1, sub):
            return True
    return False


def rule_overlap_warnings(theory: Theory) -> list[str]:
    warnings = []
    for i, r1 in enumerate(theory.rules):
        l1 = r1.lhs
        if patterns_overlap(l1, _freshen_lhs(r1), skip_root=True):
            warnings.append(f"rule {r1.label} overlaps itself at a proper position")
        for r2 in theory.rules[i + 1 :]:
            l2 = _freshen_lhs(r2)
            if patterns_overlap(l1, l2) or patterns_overlap(l2, l1, skip_root=True):
                warnings.append(f"rules {r1.label} and {r2.label} overlap")
    return warnings


def _freshen_lhs(rule: RewriteRule) -> Term:
    renaming = {x: FVar(x + "'") for x, _ in rule.ctx}
    return substitute_many(rule.lhs, renaming)
