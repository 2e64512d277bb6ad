import pytest

from gradealg.catalog import (
    build_normalizer,
    constant_theory,
    exception_theory,
    lifted_constant_theory,
    state_theory,
)
from gradealg.combine import extend_theory
from gradealg.grade import lift_map
from gradealg.combine import sum_with_injections
from gradealg.errors import TermError
from gradealg.freemodel import free_model, induced_monad
from gradealg.lawvere import (
    LawMorph,
    apply_morphism,
    check_lawvere,
    compose_morphisms,
    generator_term,
    identity_morphism,
    l_of,
    morphism_preserves_equations,
    roundtrip_check,
    th_of,
    theory_morphism,
)
from gradealg.logic import PROVED, entails
from gradealg.terms import App, Coerce, Var

EX = exception_theory()
ST = state_theory()


@pytest.fixture(scope="module")
def ex_law():
    return th_of(EX, 3, EX.monoid.elements(), depth=2)


@pytest.fixture(scope="module")
def ex_law_monad():
    monad = induced_monad(EX, EX.monoid.elements(), depth=2)
    return l_of(monad, 3)


def test_hom_counts_examples(ex_law):
    ok = EX.monoid.unit()
    e1 = EX.monoid.grade(("e1",))
    # only the variable class inhabits (1,1) at the unit grade
    assert len(ex_law.hom(1, 1, ok)) == 1
    # only the raise class inhabits (0,1) at {e1}
    assert len(ex_law.hom(0, 1, e1)) == 1
    # no closed unit-grade terms
    assert len(ex_law.hom(0, 1, ok)) == 0


def test_identity_law_holds_everywhere(ex_law):
    for (n, n2, m), morphs in ex_law.homs.items():
        for f in morphs[:6]:
            assert ex_law.compose(ex_law.identity(n2), f) == f
            assert ex_law.compose(f, ex_law.identity(n)) == f


def test_composition_grade(ex_law):
    e1 = EX.monoid.grade(("e1",))
    oke2 = EX.monoid.grade(("Ok", "e2"))
    for f in ex_law.hom(2, 1, e1)[:3]:
        for g in ex_law.hom(1, 2, oke2)[:3]:
            out = ex_law.compose(f, g)
            assert out.grade == EX.monoid.tensor(e1, oke2)


def test_check_lawvere_clean(ex_law, ex_law_monad):
    assert check_lawvere(ex_law) == []
    assert check_lawvere(ex_law_monad) == []


def test_roundtrip_clean(ex_law, ex_law_monad):
    assert roundtrip_check(ex_law) == []
    assert roundtrip_check(ex_law_monad) == []


def test_state_window_roundtrip():
    L = th_of(ST, 2, ST.monoid.elements(), depth=2)
    assert check_lawvere(L) == []
    assert roundtrip_check(L) == []
    top = ST.monoid.grade(("*",))
    # |hom(1,1,top)| = |(V x 1)^V| = 4
    assert len(L.hom(1, 1, top)) == 4


def test_mutant_duplicate_projection_detected(ex_law):
    broken = dict(ex_law.homs)
    ok = EX.monoid.unit()
    cell = (2, 2, ok)
    morphs = list(broken[cell])
    # duplicate one morphism over another: tupling stops being injective
    morphs[0] = morphs[1]
    broken[cell] = tuple(morphs)
    from gradealg.lawvere import GradedLawvere

    mutant = GradedLawvere(
        ex_law.signature, ex_law.arity_bound, ex_law.support, broken,
        ex_law.normal_fns, source_desc="mutant",
    )
    report = check_lawvere(mutant)
    assert any("injective" in r or "surjective" in r for r in report)
    assert roundtrip_check(mutant)


def test_l_of_cotensor_cells(ex_law_monad):
    # tupling bijective on every cell with small arities, exhaustively
    for (n, n2, m), morphs in ex_law_monad.homs.items():
        singles = ex_law_monad.hom(n, 1, m)
        image = set()
        for f in morphs:
            proj = tuple(
                ex_law_monad.compose(ex_law_monad.projection(n2, i), f)
                for i in range(n2)
            )
            assert proj == tuple(LawMorph(n, 1, m, (c,)) for c in f.comps)
            image.add(proj)
        assert len(image) == len(morphs) == len(singles) ** n2


def test_th_and_l_windows_coincide(ex_law, ex_law_monad):
    for cell, morphs in ex_law.homs.items():
        assert {f.comps for f in morphs} == {
            f.comps for f in ex_law_monad.homs[cell]
        }


def test_apply_identity_morphism():
    ident = identity_morphism(EX)
    t = Coerce(EX.monoid.grade(("Ok", "e1")), App("raise_e1", (), EX.monoid.unit()))
    assert apply_morphism(ident, t) == build_normalizer(EX).normalize(t)
    gen = generator_term(EX, "raise_e1")
    assert apply_morphism(ident, gen) == build_normalizer(EX).normalize(gen)


def test_compose_morphisms_agrees_with_interpretation():
    lifted = extend_theory(lift_map(EX.monoid), constant_theory())
    summed, inj1, _ = sum_with_injections(EX, lifted, prefixes=("l_", "r_"))
    ident = identity_morphism(summed)
    closed = compose_morphisms(ident, inj1)
    for op in EX.signature.ops:
        lhs = closed.image(op.name)
        rhs = apply_morphism(ident, inj1.image(op.name))
        assert lhs == rhs


def test_sum_injection_is_injective_on_classes():
    lifted = extend_theory(lift_map(EX.monoid), constant_theory())
    summed, inj1, inj2 = sum_with_injections(EX, lifted, prefixes=("l_", "r_"))
    assert morphism_preserves_equations(inj1) == []
    gm = EX.monoid
    support = gm.elements()
    src = free_model(EX, ("v",), support, depth=2)
    images = {}
    for m in support:
        for cls in src.classes(m):
            img = apply_morphism(inj1, cls)
            key = (m, img)
            assert key not in images, "injection collapsed two classes"
            images[key] = cls


def test_morphism_preserves_provable_equality():
    # provably equal source terms map to equal target classes
    summed, inj1, _ = sum_with_injections(ST, lifted_constant_theory(),
                                          prefixes=("l_", "r_"))
    lhs = App("lookup", (Var("x"), Var("x")))
    rhs = Coerce(ST.monoid.grade(("*",)), Var("x"))
    assert entails(ST, lhs, rhs, 3) == PROVED
    il = apply_morphism(inj1, lhs)
    ir = apply_morphism(inj1, rhs)
    assert entails(summed, il, ir, 3) == PROVED


def test_theory_morphism_validation():
    with pytest.raises(TermError):
        theory_morphism(EX, EX, {"raise_e1": Var("x1")})  # wrong grade
    with pytest.raises(TermError):
        theory_morphism(EX, EX, {})  # missing op


def test_l_of_hom_count_example(ex_law_monad):
    # |hom(1,1,{e1,Ok})| = |{Er(e1), Ok(x1)}| = 2
    m = EX.monoid.grade(("Ok", "e1"))
    assert len(ex_law_monad.hom(1, 1, m)) == 2
    # the empty target always gives exactly one hom
    for n in range(4):
        for g in EX.monoid.elements():
            assert len(ex_law_monad.hom(n, 0, g)) == 1
