import itertools

import pytest

from gradealg.catalog import (
    build_normalizer,
    exception_theory,
    lifted_constant_theory,
    state_theory,
)
from gradealg.errors import TermError
from gradealg.freemodel import (
    check_monad_laws,
    free_model,
    induced_monad,
    kleisli_compose,
    kleisli_eta,
    kleisli_hom,
)
from gradealg.grade import powerset_monoid
from gradealg.terms import App, Coerce, Var, substitute

EX = exception_theory()
ST = state_theory()


def ex_grade(*items):
    return EX.monoid.grade(items)


@pytest.fixture(scope="module")
def ex_monad():
    return induced_monad(EX, EX.monoid.elements(), depth=2)


@pytest.fixture(scope="module")
def st_monad():
    return induced_monad(ST, ST.monoid.elements(), depth=2)


@pytest.mark.parametrize("nvars", [0, 1, 2])
def test_exception_counts_match_closed_form(nvars):
    xs = tuple(f"v{i}" for i in range(nvars))
    fm = free_model(EX, xs, EX.monoid.elements(), depth=2)
    for m in EX.monoid.elements():
        errs = len([e for e in ("e1", "e2") if e in m.value])
        oks = nvars if "Ok" in m.value else 0
        assert fm.size(m) == errs + oks, str(m)


def test_empty_generators_unit_grade_is_empty():
    fm = free_model(EX, (), EX.monoid.elements(), depth=2)
    assert fm.size(EX.monoid.unit()) == 0


def test_state_counts():
    gm = ST.monoid
    fm = free_model(ST, ("a", "b"), gm.elements(), depth=2)
    assert fm.size(gm.unit()) == 2
    assert fm.size(gm.grade(("*",))) == 16


def test_state_normal_form_bijection():
    # f |-> t_f from (V x X)^V onto the classes at the stateful grade
    gm = ST.monoid
    top = gm.grade(("*",))
    for xs in (("a",), ("a", "b")):
        fm = free_model(ST, xs, gm.elements(), depth=2)
        nz = build_normalizer(ST)
        terms = {}
        for fv in itertools.product((0, 1), repeat=2):
            for fx in itertools.product(xs, repeat=2):
                t = App(
                    "lookup",
                    tuple(App(f"update_{fv[v]}", (Var(fx[v]),)) for v in (0, 1)),
                )
                terms[(fv, fx)] = nz.normalize(t)
        assert len(set(terms.values())) == (2 * len(xs)) ** 2
        assert set(terms.values()) == set(fm.classes(top))


def test_monad_unit_and_mult_examples(ex_monad):
    xs = ("v0",)
    unit_cls = ex_monad.unit(xs, "v0")
    assert unit_cls == Var("v0")
    # mult on an Er class keeps the error; on an Ok class substitutes
    m1 = ex_grade("Ok", "e1")
    m2 = ex_grade("Ok", "e2")
    inner = ex_monad.apply(m2, xs)
    kb = ex_monad.kvars(m2, xs)
    outer_ok = Coerce(m1, Var(kb[0]))
    flattened = ex_monad.mult(m1, m2, xs, outer_ok)
    expected = ex_monad.normal(xs, Coerce(EX.monoid.tensor(m1, m2), inner[0]))
    assert flattened == expected
    outer_er = Coerce(m1, App("raise_e1", (), EX.monoid.unit()))
    flattened2 = ex_monad.mult(m1, m2, xs, outer_er)
    assert flattened2 == ex_monad.normal(
        xs, Coerce(EX.monoid.tensor(m1, m2), App("raise_e1", (), EX.monoid.unit()))
    )


def test_exception_monad_laws_exhaustive(ex_monad):
    report = check_monad_laws(ex_monad, [(), ("a",), ("a", "b")])
    assert report == []


def test_state_monad_laws_random(st_monad):
    report = check_monad_laws(st_monad, [("a",)], trials=50)
    assert report == []


def test_broken_mult_is_detected(ex_monad):
    # dropping the grade shift in flattening breaks associativity/units
    class Broken:
        def __init__(self, inner):
            self.inner = inner
            self.theory = inner.theory
            self.support = inner.support

        @property
        def monoid(self):
            return self.inner.monoid

        def apply(self, m, xs):
            return self.inner.apply(m, xs)

        def kvars(self, m, xs, prefix="k"):
            return self.inner.kvars(m, xs, prefix)

        def unit(self, xs, x):
            return self.inner.unit(xs, x)

        def normal(self, xs, t):
            return self.inner.normal(xs, t)

        def mult(self, m1, m2, xs, t, prefix="k"):
            # wrong: reuses the outer grade instead of the product
            binding = self.inner.kvar_binding(m2, xs, prefix)
            flat = substitute(self.theory.signature, t, binding, binding_grade=m2)
            out = self.inner.normal(xs, flat)
            bad = self.inner.normal(xs, Coerce(self.monoid.grade(("Ok", "e1", "e2")), out))
            return bad

    report = check_monad_laws(Broken(ex_monad), [("a",)])
    assert report


def test_kleisli_unit_laws(ex_monad):
    xs = ("a", "b")
    f = kleisli_hom(
        ex_monad, xs, xs, ex_grade("e1"),
        {x: App("raise_e1", (), EX.monoid.unit()) for x in xs},
    )
    eta = kleisli_eta(ex_monad, xs)
    assert kleisli_compose(f, eta).mapping == f.mapping
    assert kleisli_compose(eta, f).mapping == f.mapping


def test_kleisli_example_const_error(ex_monad):
    a, b, c = ("a",), ("b",), ("c",)
    f = kleisli_hom(ex_monad, a, b, ex_grade("e1"),
                    {"a": App("raise_e1", (), EX.monoid.unit())})
    g = kleisli_hom(ex_monad, b, c, EX.monoid.unit(), {"b": Var("c")})
    out = kleisli_compose(f, g)
    assert out.grade == ex_grade("e1")
    assert out("a") == App("raise_e1", (), EX.monoid.unit())


def test_kleisli_grade_bookkeeping():
    gm = powerset_monoid(("1", "2"))
    # two one-location stateful theories do not exist here; check the grade
    # arithmetic through the state monad with promoted homs
    st = induced_monad(ST, ST.monoid.elements(), depth=2)
    top = ST.monoid.grade(("*",))
    f = kleisli_hom(st, ("a",), ("b",), top, {"a": Coerce(top, Var("b"))})
    g = kleisli_hom(st, ("b",), ("c",), top, {"b": Coerce(top, Var("c"))})
    out = kleisli_compose(f, g)
    assert out.grade == top
    h = kleisli_eta(st, ("c",))
    assert kleisli_compose(out, h).grade == top


def test_kleisli_associativity_exhaustive(ex_monad):
    xs = ("a",)
    grades = [EX.monoid.unit(), ex_grade("e1"), ex_grade("Ok", "e2")]
    homs = []
    for m in grades:
        for cls in ex_monad.apply(m, xs):
            homs.append(kleisli_hom(ex_monad, xs, xs, m, {"a": cls}))
    for f in homs:
        for g in homs:
            for h in homs:
                lhs = kleisli_compose(kleisli_compose(f, g), h)
                rhs = kleisli_compose(f, kleisli_compose(g, h))
                assert lhs.grade == rhs.grade
                assert lhs.mapping == rhs.mapping


def test_kleisli_compose_mismatch(ex_monad):
    f = kleisli_hom(ex_monad, ("a",), ("b",), EX.monoid.unit(), {"a": Var("b")})
    g = kleisli_hom(ex_monad, ("c",), ("d",), EX.monoid.unit(), {"c": Var("d")})
    with pytest.raises(TermError):
        kleisli_compose(f, g)


def test_lifted_monad_counts():
    th = lifted_constant_theory()
    gm = th.monoid
    for nvars in (0, 1, 2):
        xs = tuple(f"v{i}" for i in range(nvars))
        fm = free_model(th, xs, gm.elements(), depth=2)
        for m in gm.elements():
            assert fm.size(m) == nvars + 1, (nvars, str(m))


def test_monad_functorial_in_generators(ex_monad):
    # naturality of unit and mult under renaming
    xs, ys = ("a", "b"), ("u", "v")
    ren = {"a": "u", "b": "v"}
    for x, y in zip(xs, ys):
        assert ex_monad.map_vars(ren, ys, ex_monad.unit(xs, x)) == ex_monad.unit(ys, y)
    m1, m2 = ex_grade("Ok", "e1"), ex_grade("Ok", "e2")
    kb = ex_monad.kvars(m2, xs)
    kb_y = ex_monad.kvars(m2, ys)
    for outer in ex_monad.apply(m1, kb):
        flat_x = ex_monad.mult(m1, m2, xs, outer)
        # transport the outer element along the renaming of inner classes
        inner_map = {}
        for i, cls in enumerate(ex_monad.apply(m2, xs)):
            target = ex_monad.map_vars(ren, ys, cls)
            inner_map[kb[i]] = kb_y[ex_monad.apply(m2, ys).index(target)]
        outer_y = ex_monad.map_vars(inner_map, kb_y, outer)
        flat_y = ex_monad.mult(m1, m2, ys, outer_y)
        assert flat_y == ex_monad.map_vars(ren, ys, flat_x)


def test_kleisli_two_location_grade_union():
    # composing single-location homs of grades ({*},{}) and ({},{*})
    # lands at the union grade ({*},{*})
    from gradealg.catalog import two_location_state_theory

    tt = two_location_state_theory()
    gm = tt.monoid
    monad = induced_monad(tt, gm.elements(), depth=3)
    g1 = gm.pair(gm.factors[0].grade(("*",)), gm.factors[1].unit())
    g2 = gm.pair(gm.factors[0].unit(), gm.factors[1].grade(("*",)))
    f = kleisli_hom(monad, ("a",), ("b",), g1, {"a": Coerce(g1, Var("b"))})
    g = kleisli_hom(monad, ("b",), ("c",), g2, {"b": Coerce(g2, Var("c"))})
    assert kleisli_compose(f, g).grade == gm.tensor(g1, g2)
    assert kleisli_compose(f, g).grade.value == (("*",), ("*",))
