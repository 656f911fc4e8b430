import pytest

from pimodulo.algebra import FiniteAlgebra, enumerate_full_algebras
from pimodulo.errors import PiModuloError
from pimodulo.model_stt import (
    AlgElem,
    CARRIER,
    EPoint,
    FiniteFun,
    SINGLETON_E,
    apply_elem,
    check_conversion_stt,
    check_lemma1_stt,
    check_substitution_stt,
    domain_stt,
    enumerate_set,
    enumerate_valuations,
    finite_fun,
    fun_space,
    interp_stt,
)
from pimodulo.reduction import BETA_R, one_step_reducts
from pimodulo.syntax import parse_term
from pimodulo.terms import FVar, KIND, Lam, TYPE, Var
from pimodulo.theories import builtin_theory

STT = builtin_theory("stt").theory
ALGS = list(enumerate_full_algebras(2))
SOME_ALGS = ALGS[:: len(ALGS) // 16]


def stt(text: str, *names: str):
    return parse_term(text, var_names=frozenset(names))


# ------------- set values -------------


def test_function_space_collapses_on_a_singleton_codomain() -> None:
    assert fun_space(CARRIER, SINGLETON_E) == SINGLETON_E
    assert fun_space(SINGLETON_E, SINGLETON_E) == SINGLETON_E
    assert fun_space(SINGLETON_E, CARRIER) != SINGLETON_E


def test_finite_fun_equality_is_extensional() -> None:
    f = finite_fun([(AlgElem(0), AlgElem(1)), (AlgElem(1), AlgElem(0))])
    g = finite_fun([(AlgElem(1), AlgElem(0)), (AlgElem(0), AlgElem(1))])
    assert f == g


def test_apply_elem_reads_the_graph() -> None:
    f = finite_fun([(AlgElem(0), AlgElem(1))])
    assert apply_elem(f, AlgElem(0)) == AlgElem(1)


def test_apply_elem_outside_the_domain_fails() -> None:
    f = finite_fun([(AlgElem(0), AlgElem(1))])
    with pytest.raises(PiModuloError):
        apply_elem(f, AlgElem(7))


def test_enumerate_set_sizes() -> None:
    alg = ALGS[0]
    assert len(enumerate_set(SINGLETON_E, alg)) == 1
    assert len(enumerate_set(CARRIER, alg)) == 2
    assert len(enumerate_set(fun_space(CARRIER, CARRIER), alg)) == 4


def test_enumerate_set_honors_the_cap() -> None:
    alg = ALGS[0]
    big = fun_space(fun_space(CARRIER, CARRIER), CARRIER)
    with pytest.raises(PiModuloError):
        enumerate_set(big, alg, cap=3)


# ------------- domains -------------


def test_sorts_and_o_live_in_the_carrier() -> None:
    for t in (TYPE, KIND, stt("o")):
        assert domain_stt(t) == CARRIER


def test_objects_live_in_the_singleton() -> None:
    for t in (stt("iota"), FVar("x"), stt("imp")):
        assert domain_stt(t) == SINGLETON_E


def test_domain_looks_through_binders_and_spines() -> None:
    assert domain_stt(stt("eps (imp p q)", "p", "q")) == SINGLETON_E
    assert domain_stt(Lam("x", stt("o"), stt("o"))) == CARRIER


def test_products_take_function_spaces_with_collapse() -> None:
    assert domain_stt(stt("o -> o")) == fun_space(CARRIER, CARRIER)
    assert domain_stt(stt("Pi x : o. eps x")) == SINGLETON_E


def test_lemma1_isolates_sort_free_terms() -> None:
    assert check_lemma1_stt(stt("eps (imp p q)", "p", "q"))
    assert not check_lemma1_stt(stt("o"))


# ------------- interpretation -------------


def test_sorts_and_base_types_evaluate_to_top() -> None:
    for alg in SOME_ALGS:
        assert interp_stt(TYPE, {}, alg) == AlgElem(alg.top)
        assert interp_stt(stt("iota"), {}, alg) == AlgElem(alg.top)


def test_eps_is_the_identity_on_the_carrier() -> None:
    alg = ALGS[3]
    for w in range(alg.n):
        assert interp_stt(stt("eps X", "X"), {"X": AlgElem(w)}, alg) == AlgElem(w)


def test_imp_follows_the_arrow_table() -> None:
    for alg in SOME_ALGS:
        for w1 in range(alg.n):
            for w2 in range(alg.n):
                phi = {"X": AlgElem(w1), "Y": AlgElem(w2)}
                got = interp_stt(stt("imp X Y", "X", "Y"), phi, alg)
                assert got == AlgElem(alg.arrow(w1, w2))


def test_universal_quantifier_collects_the_body_image() -> None:
    # all[o] (\z : o. z) ranges the body over the whole carrier
    for alg in SOME_ALGS:
        got = interp_stt(stt("all[o] (\\z : o. z)"), {}, alg)
        assert got == AlgElem(alg.pi(alg.top, alg.mask_of(range(alg.n))))


def test_unknown_constants_are_rejected() -> None:
    with pytest.raises(PiModuloError):
        interp_stt(stt("mystery"), {}, ALGS[0])


def test_missing_valuation_entries_are_rejected() -> None:
    with pytest.raises(PiModuloError):
        interp_stt(FVar("x"), {}, ALGS[0])


# ------------- the conversion lemma -------------


def test_implication_rule_holds_under_all_valuations() -> None:
    lhs = stt("eps (imp X Y)", "X", "Y")
    rhs = stt("eps X -> eps Y", "X", "Y")
    ctx = (("X", stt("o")), ("Y", stt("o")))
    for alg in SOME_ALGS:
        for phi in enumerate_valuations(ctx, alg):
            assert check_conversion_stt(lhs, rhs, phi, alg)


def test_quantifier_rule_holds_under_all_valuations() -> None:
    rule = STT.rules[1]
    for alg in SOME_ALGS:
        for phi in enumerate_valuations(rule.ctx, alg):
            assert check_conversion_stt(rule.lhs, rule.rhs, phi, alg)


def test_beta_steps_preserve_the_interpretation() -> None:
    t = stt("eps ((\\x : o. imp x x) P)", "P")
    ctx = (("P", stt("o")),)
    for alg in SOME_ALGS:
        for phi in enumerate_valuations(ctx, alg):
            for u in one_step_reducts(t, STT, BETA_R):
                assert check_conversion_stt(t, u, phi, alg)


def test_conversion_check_distinguishes_unequal_values() -> None:
    alg = ALGS[5]
    phi = {"X": AlgElem(0), "Y": AlgElem(1)}
    assert not check_conversion_stt(stt("eps X", "X"), stt("eps Y", "Y"), phi, alg)


# ------------- the substitution lemma -------------


def test_substitution_lemma_on_rule_bodies() -> None:
    t = stt("eps (imp X Y)", "X", "Y")
    for alg in SOME_ALGS:
        phi = {"Y": AlgElem(1)}
        assert check_substitution_stt(t, "X", stt("imp Y Y", "Y"), phi, alg)


def test_substitution_lemma_trivial_cases() -> None:
    alg = ALGS[9]
    phi = {"Y": AlgElem(0)}
    # t = x and x not free in t
    assert check_substitution_stt(FVar("x"), "x", stt("imp Y Y", "Y"), phi, alg)
    assert check_substitution_stt(stt("eps Y", "Y"), "x", stt("o"), phi, alg)


# ------------- valuations -------------


def test_valuations_enumerate_the_full_product() -> None:
    ctx = (("x", stt("o")), ("y", stt("o")))
    alg = ALGS[0]
    vals = enumerate_valuations(ctx, alg)
    assert len(vals) == 4
    assert len({(v["x"], v["y"]) for v in vals}) == 4


def test_valuations_cover_function_domains() -> None:
    ctx = (("f", stt("o -> o")),)
    vals = enumerate_valuations(ctx, ALGS[0])
    assert len(vals) == 4
    assert all(isinstance(v["f"], FiniteFun) for v in vals)


def test_valuations_fall_back_to_seeded_samples() -> None:
    # each pool fits the cap but their product does not, so the
    # enumeration degrades to a seeded sample of cap many valuations
    ctx = tuple((name, stt("o -> o")) for name in "fgh")
    a = enumerate_valuations(ctx, ALGS[0], cap=5, seed=3)
    b = enumerate_valuations(ctx, ALGS[0], cap=5, seed=3)
    assert len(a) == 5
    assert a == b


def test_proof_variables_get_the_e_point() -> None:
    ctx = (("h", stt("eps P", "P")),)
    vals = enumerate_valuations(ctx, ALGS[0])
    assert vals == [{"h": EPoint()}]
