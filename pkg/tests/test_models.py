import itertools

import pytest

from gradealg.catalog import (
    catalog_models,
    exception_theory,
    module_model,
    module_theory,
    single_state_model,
    state_theory,
)
from gradealg.errors import MonoidMismatchError, SupportError
from gradealg.freemodel import (
    free_finite_model,
    free_model,
    universal_extension,
)
from gradealg.models import (
    FiniteModel,
    ModelHom,
    check_model,
    hom_check,
    identity_hom,
    interpret,
    satisfies,
    terminal_model,
)
from gradealg.terms import App, Coerce, Equation, Var, rename

EX = exception_theory()
ST = state_theory()
UNIT = EX.monoid.unit()


@pytest.fixture(scope="module")
def ex_free():
    return free_model(EX, ("g1", "g2"), EX.monoid.elements(), depth=2)


@pytest.fixture(scope="module")
def ex_model(ex_free):
    return free_finite_model(ex_free)


def test_interpret_variable_is_projection(ex_model):
    out = interpret(ex_model, ("x1", "x2"), Var("x2"))
    for stage, table in out.items():
        for args, val in table.items():
            assert val == args[1]


def test_interpret_raise_is_constant(ex_model, ex_free):
    out = interpret(ex_model, ("x1",), App("raise_e1", (), UNIT))
    e1 = EX.monoid.grade(("e1",))
    er = ex_free.classes(e1)[0]
    for stage, table in out.items():
        for args, val in table.items():
            # constant at the Er(e1) class coerced to {e1} (x) stage
            expected_grade = EX.monoid.tensor(e1, stage)
            assert val == ex_free.act(expected_grade, er)


def test_interpret_identity_coercion(ex_model):
    t = Var("x1")
    c = Coerce(UNIT, Var("x1"))
    assert interpret(ex_model, ("x1",), t) == interpret(ex_model, ("x1",), c)


def test_interpret_unsupported_grade_raises(ex_model):
    small = FiniteModel(
        ex_model.theory,
        (UNIT,),
        {UNIT: ex_model.carriers[UNIT]},
        {},
        ex_model.interps,
    )
    with pytest.raises(SupportError):
        interpret(small, ("x1",), App("raise_e1", (), UNIT))


def test_satisfies_trivial_and_free(ex_model):
    eq = Equation(("x",), Var("x"), Var("x"), UNIT)
    assert satisfies(ex_model, eq)


def test_state_model_satisfies_axioms():
    model = single_state_model()
    for eq in ST.axioms:
        assert satisfies(model, eq), str(eq)


def test_free_state_model_satisfies_axioms():
    fm = free_model(ST, ("a",), ST.monoid.elements(), depth=2)
    model = free_finite_model(fm)
    for eq in ST.axioms:
        assert satisfies(model, eq), str(eq)


def test_terminal_model_satisfies_everything():
    for theory in (EX, ST, module_theory()):
        support = (
            theory.monoid.elements()
            if theory.monoid.is_finite()
            else tuple(theory.monoid.grade(n) for n in range(5))
        )
        tm = terminal_model(theory, support)
        assert check_model(tm) == []


def test_check_model_reports_corruption(ex_model):
    # redirect the Er(e1) class to the Er(e2) class in one action component
    e1 = EX.monoid.grade(("e1",))
    e12 = EX.monoid.grade(("e1", "e2"))
    actions = {k: dict(v) for k, v in ex_model.actions.items()}
    (er1,) = ex_model.carrier(e1)
    wrong = [v for v in ex_model.carrier(e12) if v != actions[(e1, e12)][er1]][0]
    actions[(e1, e12)][er1] = wrong
    mutant = FiniteModel(
        ex_model.theory, ex_model.support, ex_model.carriers, actions, ex_model.interps
    )
    report = check_model(mutant)
    assert any("natural" in r or "compose" in r for r in report)


def test_check_model_reports_broken_action(ex_model):
    actions = {k: dict(v) for k, v in ex_model.actions.items()}
    key = next(iter(actions))
    victim = next(iter(actions[key]))
    del actions[key][victim]
    mutant = FiniteModel(
        ex_model.theory, ex_model.support, ex_model.carriers, actions, ex_model.interps
    )
    report = check_model(mutant)
    assert any("undefined" in r for r in report)


def test_hom_check_identity_and_terminal(ex_model):
    assert hom_check(identity_hom(ex_model))
    tm = terminal_model(EX, ex_model.support)
    comps = {m: {e: "*" for e in ex_model.carrier(m)} for m in ex_model.support}
    assert hom_check(ModelHom(ex_model, tm, comps))


def test_hom_check_rejects_non_hom(ex_model, ex_free):
    # permute the carrier at grade {e1,e2}: breaks the operation law
    g = EX.monoid.grade(("e1", "e2"))
    comps = {m: {e: e for e in ex_model.carrier(m)} for m in ex_model.support}
    a, b = ex_model.carrier(g)[:2]
    comps[g][a], comps[g][b] = b, a
    assert not hom_check(ModelHom(ex_model, ex_model, comps))


def test_hom_check_mismatched_theories(ex_model):
    other = terminal_model(ST, ST.monoid.elements())
    with pytest.raises(MonoidMismatchError):
        hom_check(ModelHom(ex_model, other, {}))


def test_renaming_stability(ex_model):
    # |rename(t)| equals |t| composed with the argument permutation
    t = Coerce(EX.monoid.grade(("Ok", "e1")), App("raise_e1", (), UNIT))
    body = App("raise_e2", (), UNIT)
    term = Var("x1")
    for term in (Var("x1"), Coerce(EX.monoid.grade(("Ok", "e2")), Var("x2"))):
        renamed = rename(term, {"x1": "y2", "x2": "y1"})
        out1 = interpret(ex_model, ("x1", "x2"), term)
        out2 = interpret(ex_model, ("y1", "y2"), renamed)
        for stage in out1:
            for args in out1[stage]:
                # context (y1, y2) receives the permuted tuple
                permuted = (args[1], args[0])
                assert out1[stage][args] == out2[stage][permuted]


@pytest.mark.parametrize("nvars", [1, 2])
def test_universal_extension_is_unique_hom(nvars):
    """Exhaustive search over all grade-indexed families: exactly one is a
    homomorphism extending the generator assignment."""
    theory = EX
    gm = theory.monoid
    support = gm.elements()
    xs = tuple(f"g{i + 1}" for i in range(nvars))
    ex_free = free_model(theory, xs, support, depth=2)
    # two-point target model with a constant raise interpretation
    carriers = {m: ("p", "q") for m in support}
    actions = {
        (m, m2): {e: e for e in ("p", "q")}
        for m in support
        for m2 in support
        if m != m2 and gm.leq(m, m2)
    }
    interps = {}
    for op in theory.signature.ops:
        for stage in support:
            interps[(op.name, stage)] = {(): "p"}
    target = FiniteModel(theory, support, carriers, actions, interps, name="flat")
    assert check_model(target) == []

    v = {x: ("p" if i % 2 == 0 else "q") for i, x in enumerate(ex_free.variables)}
    h = universal_extension(ex_free, target, v)
    assert hom_check(h)
    unit = gm.unit()
    assert all(h.components[unit][ex_free.eta(x)] == v[x] for x in ex_free.variables)

    source = free_finite_model(ex_free)
    slots = [(m, rep) for m in support for rep in source.carrier(m)]
    total = 0
    matches = 0
    for assignment in itertools.product(("p", "q"), repeat=len(slots)):
        comps = {m: {} for m in support}
        for (m, rep), val in zip(slots, assignment):
            comps[m][rep] = val
        cand = ModelHom(source, target, comps)
        unit_ok = all(comps[unit][ex_free.eta(x)] == v[x] for x in ex_free.variables)
        if unit_ok and hom_check(cand):
            matches += 1
            found = comps
        total += 1
    assert matches == 1
    assert all(found[m] == h.components[m] for m in support)


def test_module_model_is_a_model():
    assert check_model(module_model()) == []


def test_catalog_models_all_pass():
    for theory in (EX, ST, module_theory()):
        for model in catalog_models(theory):
            report = [
                r for r in check_model(model, tuple_cap=200_000)
                if not r.startswith("skipped")
            ]
            assert report == [], (theory.name, model.name, report[:3])
