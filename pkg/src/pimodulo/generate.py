"""Term generators for tests and scans.

Exhaustive enumeration is by node count, memoized on size and binder
depth so subterms are shared.  The well-typed enumerators filter raw
terms through the checker; the normal-inhabitant enumerator is instead
type-directed and, for a confluent terminating theory, produces every
normal inhabitant within the size bound, which is what lets an empty
scan double as a non-inhabitation certificate.
"""

from __future__ import annotations

import random
from functools import cache

from .errors import PiModuloError
from .reduction import BETA_R, FuelExhausted, is_normal, normalize, one_step_reducts
from .terms import (
    App,
    Const,
    Context,
    FVar,
    KIND,
    Lam,
    Pi,
    TYPE,
    Term,
    Theory,
    Var,
    close_binder,
    instantiate,
    term_size,
)
from .typecheck import infer


def enumerate_raw_terms(max_size: int, atoms: tuple[Term, ...] = (TYPE,)):
    """Yield every term of size up to max_size built from the given atoms,
    applications, and both binders (annotated with enumerated terms)."""

    @cache
    def exact(size: int, depth: int) -> tuple[Term, ...]:
        if size < 1:
            return ()
        if size == 1:
            here = list(atoms) + [Var(i) for i in range(depth)]
            return tuple(here)
        out: list[Term] = []
        for left in range(1, size - 1):
            right = size - 1 - left
            for a in exact(left, depth):
                for b in exact(right, depth):
                    out.append(App(a, b))
            for ann in exact(left, depth):
                for body in exact(right, depth + 1):
                    out.append(Lam("x", ann, body))
                    out.append(Pi("x", ann, body))
        return tuple(out)

    for size in range(1, max_size + 1):
        yield from exact(size, 0)


def enumerate_well_typed(
    theory: Theory,
    max_size: int = 5,
    ctx: Context = (),
    mode: str = BETA_R,
):
    """Raw terms over the theory's constants and the context's variables
    that the checker accepts, with their inferred types."""
    atoms: list[Term] = [TYPE]
    atoms.extend(Const(name) for name, _ in theory.signature)
    atoms.extend(FVar(name) for name, _ in ctx)
    for t in enumerate_raw_terms(max_size, tuple(atoms)):
        try:
            yield t, infer(theory, ctx, t, mode=mode)
        except PiModuloError:
            continue


def sample_well_typed(
    theory: Theory,
    count: int,
    seed: int = 0,
    ctx: Context = (),
    max_size: int = 30,
    mode: str = BETA_R,
):
    """Randomly grown well-typed terms, deterministic in the seed.

    The pool starts at the atoms and grows by application and by binding;
    candidates that fail the checker are dropped, so the yield is always
    checker-approved.  Heads are biased toward the signature to reach the
    rewrite rules often.
    """
    rng = random.Random(seed)
    atoms: list[Term] = [TYPE]
    atoms.extend(Const(name) for name, _ in theory.signature)
    atoms.extend(FVar(name) for name, _ in ctx)
    pool: list[tuple[Term, Term]] = []
    # Indexes into the pool, kept in insertion order so the draws below
    # see exactly the lists a scan over the pool would build.
    fns: list[tuple[Term, Term]] = []
    anns: list[Term] = []
    by_type: dict[Term, list[Term]] = {}

    def admit(t: Term, ty: Term) -> None:
        pool.append((t, ty))
        if isinstance(ty, Pi):
            fns.append((t, ty))
        if ty == TYPE:
            anns.append(t)
        by_type.setdefault(ty, []).append(t)

    for a in atoms:
        try:
            admit(a, infer(theory, ctx, a, mode=mode))
        except PiModuloError:
            continue
    produced = 0
    attempts = 0
    limit = max(500, count * 400)
    seen: set[Term] = set()
    while produced < count and attempts < limit:
        attempts += 1
        r = rng.random()
        if r < 0.55:
            if not fns:
                continue
            f, fty = rng.choice(fns)
            fitting = by_type.get(fty.domain, ())
            if fitting and rng.random() < 0.8:
                t = App(f, rng.choice(fitting))
            else:
                t = App(f, rng.choice(pool)[0])
        elif r < 0.8:
            if not anns:
                continue
            ann = rng.choice(anns)
            body, _ = rng.choice(pool)
            bindable = sorted(_names(body) & {n for n, _ in ctx})
            if bindable and rng.random() < 0.5:
                body = close_binder(body, rng.choice(bindable))
            t = (Lam if rng.random() < 0.7 else Pi)("x", ann, body)
        else:
            t = rng.choice(atoms)
        if term_size(t) > max_size or t in seen:
            continue
        try:
            ty = infer(theory, ctx, t, mode=mode)
        except PiModuloError:
            continue
        admit(t, ty)
        seen.add(t)
        produced += 1
        yield t, ty


def _names(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        match stack.pop():
            case FVar(name):
                out.add(name)
            case Pi(_, a, b) | Lam(_, a, b) | App(a, b):
                stack.extend((a, b))
    return out


def convertible_pairs(
    theory: Theory,
    seeds,
    max_size: int = 8,
    mode: str = BETA_R,
    ctx: Context = (),
):
    """Pairs of convertible terms: each seed against every prefix of its
    normalization trace, against its one-step reducts, and under a typed
    identity redex.  Well-typed seeds give well-typed pairs, which is what
    the model sweeps need."""
    seen: set[tuple[Term, Term]] = set()
    for seed in seeds:
        trace: list = []
        result = normalize(seed, theory, mode, trace=trace)
        if isinstance(result, FuelExhausted):
            continue
        chain = [seed] + [step for _, _, step in trace]
        for i, a in enumerate(chain):
            for b in chain[i:]:
                if term_size(a) <= max_size and term_size(b) <= max_size:
                    if (a, b) not in seen:
                        seen.add((a, b))
                        yield a, b
        for r in one_step_reducts(seed, theory, mode):
            if term_size(seed) <= max_size and term_size(r) <= max_size:
                if (seed, r) not in seen:
                    seen.add((seed, r))
                    yield seed, r
        try:
            seed_ty = infer(theory, ctx, seed, mode=mode)
            expanded = App(Lam("x", seed_ty, Var(0)), seed)
            infer(theory, ctx, expanded, mode=mode)
        except PiModuloError:
            continue
        if term_size(expanded) <= max_size and (expanded, seed) not in seen:
            seen.add((expanded, seed))
            yield expanded, seed


def enumerate_normal_inhabitants(
    theory: Theory,
    target: Term,
    max_size: int,
    ctx: Context = (),
    mode: str = BETA_R,
):
    """Every normal term of size up to max_size whose type converts to the
    target, assuming the theory rewrites confluently and terminates.

    Normal terms are abstractions (only against a product type, and then
    the annotation is forced to the product's normal domain), products and
    the sort Type (only against a sort), or spines headed by a variable or
    constant.  Spine arguments are enumerated left to right so dependent
    domains see earlier arguments.
    """

    def norm(t: Term) -> Term:
        out = normalize(t, theory, mode)
        if isinstance(out, FuelExhausted):
            raise PiModuloError("normalization budget exhausted during enumeration")
        return out

    heads: list[tuple[Term, Term]] = []
    heads.extend((FVar(n), norm(ty)) for n, ty in ctx)
    heads.extend((Const(n), norm(ty)) for n, ty in theory.signature)

    fresh_counter = [0]

    def fresh(hint: str) -> str:
        fresh_counter[0] += 1
        return f"{hint}?{fresh_counter[0]}"

    def inhabit(goal: Term, size: int, local: list[tuple[str, Term]]):
        """Normal terms of size <= size whose type converts to goal, which
        must arrive normalized."""
        if size < 1:
            return
        match goal:
            case Pi(hint, dom, cod):
                x = fresh(hint if hint != "_" else "z")
                opened = norm(instantiate(cod, FVar(x)))
                for body in inhabit(opened, size - 1 - term_size(dom), local + [(x, dom)]):
                    yield Lam(hint, dom, close_binder(body, x))
        if goal == KIND:
            yield TYPE
        if goal in (TYPE, KIND):
            for left in range(1, size - 1):
                x = fresh("z")
                for dom in inhabit(TYPE, left, local):
                    for cod in inhabit(goal, size - 1 - left, local + [(x, dom)]):
                        yield Pi("z", dom, close_binder(cod, x))
        for head, hty in list(heads) + [(FVar(n), ty) for n, ty in local]:
            yield from spines(head, hty, goal, size, local)

    def spines(spine: Term, sty: Term, goal: Term, size: int, local):
        used = term_size(spine)
        if used > size:
            return
        if sty == goal:
            yield spine
        match sty:
            case Pi(_, dom, cod):
                for arg_size in range(1, size - used):
                    for arg in inhabit(dom, arg_size, local):
                        ext = norm(instantiate(cod, arg))
                        yield from spines(App(spine, arg), ext, goal, size, local)

    goal_n = norm(target)
    seen: set[Term] = set()
    for t in inhabit(goal_n, max_size, []):
        if t in seen:
            continue
        seen.add(t)
        if not is_normal(t, theory, mode):
            continue
        try:
            infer(theory, ctx, t, mode=mode)
        except PiModuloError:
            continue
        yield t


def gen_raw_term(rng: random.Random, max_size: int, names: tuple[str, ...] = ("x", "y'", "f")) -> Term:
    """A random raw term for printer round-trips; no typing discipline."""
    if max_size <= 1:
        return rng.choice([TYPE, KIND, FVar(rng.choice(names)), Const(rng.choice(("c", "d'")))])
    shape = rng.randrange(3)
    left = rng.randrange(1, max_size)
    right = max_size - left
    if shape == 0:
        return App(gen_raw_term(rng, left, names), gen_raw_term(rng, right, names))
    hint = rng.choice(names)
    ann = gen_raw_term(rng, left, names)
    body = gen_raw_term(rng, right, names + (hint,))
    body = close_binder(body, hint)
    ctor = Lam if shape == 1 else Pi
    return ctor(hint, ann, body)
