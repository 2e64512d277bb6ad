"""Graded Lawvere data on arities 0..bound, translations, and checks.

A hom from n to n' at grade m is an n'-tuple of classes of n-variable
grade-m terms; composition substitutes componentwise.  `th_of` builds the
data from a theory's free models, `l_of` from a graded monad through its
Kleisli homs.  Both are materialized only on a finite window of arities
and grades, where the enriched-category laws, the tupling bijection, and
the roundtrip isomorphism are checked exhaustively or on deterministic
samples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .errors import MonoidMismatchError, TermError
from .grade import Grade, grade_key
from .freemodel import (
    FreeModel,
    GradedMonad,
    KleisliHom,
    free_model,
    kleisli_compose,
    kleisli_hom,
    resolve_normalizer,
)
from .logic import PROVED, entails
from .terms import (
    Coerce,
    Signature,
    Term,
    Theory,
    Var,
    context_vars,
    infer_grade,
    normalize_coercions,
    substitute,
)


@dataclass(frozen=True)
class TheoryMorphism:
    """Assignment of target-theory term classes to source operations."""

    source: Theory
    target: Theory
    assignment: tuple[tuple[str, Term], ...]
    name: str = ""

    def image(self, op: str) -> Term:
        for k, v in self.assignment:
            if k == op:
                return v
        raise TermError(f"morphism has no assignment for operation {op!r}")


def theory_morphism(source: Theory, target: Theory, mapping: Mapping[str, Term],
                    name: str = "") -> TheoryMorphism:
    if source.monoid != target.monoid:
        raise MonoidMismatchError("theory morphism across grade monoids")
    items = []
    for op in source.signature.ops:
        if op.name not in mapping:
            raise TermError(f"morphism missing operation {op.name!r}")
        t = mapping[op.name]
        g = infer_grade(target.signature, t)
        if g != op.grade:
            raise TermError(
                f"image of {op.name!r} grades to {g}, expected {op.grade}"
            )
        items.append((op.name, t))
    return TheoryMorphism(source, target, tuple(items), name)


def generator_term(theory: Theory, op_name: str) -> Term:
    """The term f(x1, ..., xn) naming the class of a generator."""
    from .terms import App

    op = theory.signature.op(op_name)
    if op.arity == 0:
        return App(op.name, (), theory.monoid.unit())
    return App(op.name, tuple(Var(x) for x in context_vars(op.arity)))


def identity_morphism(theory: Theory) -> TheoryMorphism:
    mapping = {op.name: generator_term(theory, op.name) for op in theory.signature.ops}
    return theory_morphism(theory, theory, mapping, name="id")


def apply_morphism(alpha: TheoryMorphism, t: Term,
                   normal: Optional[Callable[[Term], Term]] = None) -> Term:
    """Interpret a source term in the target free model equipped with the
    morphism's operation assignments; the result names a class there."""
    src = alpha.source.signature
    tgt = alpha.target.signature
    gm = alpha.target.monoid
    if normal is None:
        nz = resolve_normalizer(alpha.target)
        normal = nz.normalize if nz else (lambda u: normalize_coercions(tgt, u))

    def go(u: Term) -> Term:
        if isinstance(u, Var):
            return u
        if isinstance(u, Coerce):
            return Coerce(u.target, go(u.body))
        op = src.op(u.op)
        image = alpha.image(u.op)
        if op.arity == 0:
            amb = u.ambient if u.ambient is not None else gm.unit()
            return substitute(tgt, image, {}, binding_grade=amb)
        children = [go(a) for a in u.args]
        xs = context_vars(op.arity)
        return substitute(tgt, image, dict(zip(xs, children)))

    infer_grade(src, t)
    return normal(go(t))


def compose_morphisms(beta: TheoryMorphism, alpha: TheoryMorphism) -> TheoryMorphism:
    """beta after alpha: each generator's alpha-image interpreted along beta."""
    if alpha.target != beta.source:
        raise TermError("morphisms do not compose")
    mapping = {op: apply_morphism(beta, img) for op, img in alpha.assignment}
    return theory_morphism(alpha.source, beta.target, mapping,
                           name=f"{beta.name}.{alpha.name}")


def morphism_preserves_equations(alpha: TheoryMorphism, depth: int = 3) -> list[str]:
    """Check that every source axiom maps to a provable target equality."""
    report = []
    nz = resolve_normalizer(alpha.target)
    for eq in alpha.source.axioms:
        lhs = apply_morphism(alpha, eq.lhs)
        rhs = apply_morphism(alpha, eq.rhs)
        if nz is not None:
            ok = nz.normalize(lhs) == nz.normalize(rhs)
        else:
            ok = entails(alpha.target, lhs, rhs, depth) == PROVED
        if not ok:
            report.append(f"axiom not preserved: {eq}")
    return report


@dataclass(frozen=True)
class LawMorph:
    dom: int
    cod: int
    grade: Grade
    comps: tuple[Term, ...]

    def __str__(self):
        inner = "; ".join(str(c) for c in self.comps)
        return f"<{self.dom}->{self.cod}@{self.grade}: {inner}>"


@dataclass
class GradedLawvere:
    signature: Signature
    arity_bound: int
    support: tuple[Grade, ...]
    homs: dict[tuple[int, int, Grade], tuple[LawMorph, ...]]
    normal_fns: dict[int, Callable[[Term], Term]]
    compose_fn: Optional[Callable[[LawMorph, "GradedLawvere", LawMorph], LawMorph]] = None
    source_desc: str = ""

    @property
    def monoid(self):
        return self.signature.monoid

    def hom(self, n: int, n2: int, m: Grade) -> tuple[LawMorph, ...]:
        return self.homs[(n, n2, m)]

    def compose(self, f: LawMorph, g: LawMorph) -> LawMorph:
        """f in hom(n', n'', m1) after g in hom(n, n', m2)."""
        if f.dom != g.cod:
            raise TermError("morphisms do not compose: arity mismatch")
        if self.compose_fn is not None:
            return self.compose_fn(f, self, g)
        return substitution_compose(self, f, g)

    def identity(self, n: int) -> LawMorph:
        unit = self.monoid.unit()
        normal = self.normal_fns[n]
        return LawMorph(n, n, unit, tuple(normal(Var(x)) for x in context_vars(n)))

    def projection(self, n: int, i: int) -> LawMorph:
        unit = self.monoid.unit()
        normal = self.normal_fns[n]
        return LawMorph(n, 1, unit, (normal(Var(context_vars(n)[i])),))

    def act(self, target: Grade, f: LawMorph) -> LawMorph:
        normal = self.normal_fns[f.dom]
        return LawMorph(
            f.dom, f.cod, target, tuple(normal(Coerce(target, c)) for c in f.comps)
        )


def substitution_compose(L: GradedLawvere, f: LawMorph, g: LawMorph) -> LawMorph:
    sig = L.signature
    normal = L.normal_fns[g.dom]
    binding = dict(zip(context_vars(f.dom), g.comps))
    comps = tuple(
        normal(substitute(sig, c, binding, binding_grade=g.grade)) for c in f.comps
    )
    return LawMorph(g.dom, f.cod, sig.monoid.tensor(f.grade, g.grade), comps)


def _build_homs(bound, support, classes_at):
    homs = {}
    for n in range(bound + 1):
        for m in support:
            singles = classes_at(n, m)
            for n2 in range(bound + 1):
                tuples = itertools.product(singles, repeat=n2)
                homs[(n, n2, m)] = tuple(
                    LawMorph(n, n2, m, combo) for combo in tuples
                )
    return homs


def th_of(theory: Theory, arity_bound: int, support: Iterable[Grade],
          depth: int) -> GradedLawvere:
    """Lawvere data of a theory: homs are tuples of free-model classes and
    composition is substitution."""
    support = tuple(sorted(set(support), key=grade_key))
    models: dict[int, FreeModel] = {
        n: free_model(theory, context_vars(n), support, depth)
        for n in range(arity_bound + 1)
    }
    homs = _build_homs(arity_bound, support, lambda n, m: models[n].classes(m))
    normal_fns = {n: models[n].class_of for n in models}
    return GradedLawvere(
        theory.signature, arity_bound, support, homs, normal_fns,
        source_desc=f"th_of({theory.name or 'theory'})",
    )


def l_of(monad: GradedMonad, arity_bound: int) -> GradedLawvere:
    """Lawvere data of a graded monad: hom(n, n', m) is every function from
    n' to T(m, n), composed through Kleisli substitution."""
    support = monad.support
    homs = _build_homs(
        arity_bound, support, lambda n, m: monad.apply(m, context_vars(n))
    )
    normal_fns = {
        n: (lambda n_: (lambda t: monad.normal(context_vars(n_), t)))(n)
        for n in range(arity_bound + 1)
    }

    def compose_fn(f: LawMorph, L: GradedLawvere, g: LawMorph) -> LawMorph:
        fk = _as_kleisli(monad, f)
        gk = _as_kleisli(monad, g)
        out = kleisli_compose(fk, gk)
        comps = tuple(out(x) for x in context_vars(f.cod))
        return LawMorph(g.dom, f.cod, out.grade, comps)

    return GradedLawvere(
        monad.theory.signature, arity_bound, support, homs, normal_fns,
        compose_fn=compose_fn, source_desc="l_of(monad)",
    )


def _as_kleisli(monad: GradedMonad, f: LawMorph) -> KleisliHom:
    names = context_vars(f.cod)
    return kleisli_hom(
        monad, names, context_vars(f.dom), f.grade,
        {names[j]: f.comps[j] for j in range(f.cod)},
    )


def _sample(morphs, cap):
    return morphs[:cap]


def _arity_chains(bound: int):
    chains = {(n, n, n, n) for n in range(bound + 1)}
    chains.add((bound, max(bound - 1, 0), 1, bound))
    chains.add((1, bound, max(bound - 1, 0), 1))
    chains.add((0, 1, bound, 1))
    chains.add((2 if bound >= 2 else bound, 1, 2 if bound >= 2 else bound, 1))
    return sorted(chains)


def check_lawvere(L: GradedLawvere, sample_cap: int = 4) -> list[str]:
    """Identity, associativity, grade naturality, and tupling bijections.

    Tupling bijections and grade coherence run over whole cells; the
    identity, associativity, and naturality laws take the first
    `sample_cap` morphisms of each hom in canonical order (deterministic),
    with associativity over all grade triples on a fixed family of arity
    chains.
    """
    report: list[str] = []
    gm = L.monoid
    cells = sorted(L.homs.keys(), key=lambda c: (c[0], c[1], grade_key(c[2])))

    for (n, n2, m) in cells:
        for f in _sample(L.hom(n, n2, m), sample_cap):
            for c in f.comps:
                if infer_grade(L.signature, c) != m:
                    report.append(f"({n},{n2},{m}): component off-grade in {f}")
            left = L.compose(L.identity(n2), f)
            if left != f:
                report.append(f"({n},{n2},{m}): left identity fails on {f}")
            right = L.compose(f, L.identity(n))
            if right != f:
                report.append(f"({n},{n2},{m}): right identity fails on {f}")

    # associativity f . (g . h) = (f . g) . h over all grade triples
    for (n0, n1, n2_, n3) in _arity_chains(L.arity_bound):
        for m1 in L.support:
            for m2 in L.support:
                for m3 in L.support:
                    fs = _sample(L.hom(n2_, n3, m1), 2)
                    gs = _sample(L.hom(n1, n2_, m2), 2)
                    hs = _sample(L.hom(n0, n1, m3), 1)
                    for f, g, h in itertools.product(fs, gs, hs):
                        a = L.compose(L.compose(f, g), h)
                        b = L.compose(f, L.compose(g, h))
                        if a != b:
                            report.append(
                                f"({n0},{n1},{m3}): associativity fails with "
                                f"grades ({m1},{m2},{m3})"
                            )

    # naturality of composition in both grades
    ups = [(m, m2) for m in L.support for m2 in L.support
           if m != m2 and gm.leq(m, m2)]
    for (mlow, mhigh) in ups:
        for n in range(L.arity_bound + 1):
            for n2 in range(L.arity_bound + 1):
                for n3 in (1, L.arity_bound):
                    for m2 in L.support:
                        for f in _sample(L.hom(n2, n3, m2), 2):
                            for g in _sample(L.hom(n, n2, mlow), 2):
                                lifted = L.compose(f, L.act(mhigh, g))
                                other = L.act(gm.tensor(m2, mhigh), L.compose(f, g))
                                if lifted != other:
                                    report.append(
                                        f"({n},{n2},{mlow}): composition not "
                                        f"natural along {mlow} <= {mhigh}"
                                    )

    # tupling bijection per cell: exhaustive on components, sampled on
    # actual projection composites
    for (n, n2, m) in cells:
        morphs = L.hom(n, n2, m)
        singles = L.hom(n, 1, m)
        seen = {f.comps for f in morphs}
        if len(seen) != len(morphs):
            report.append(f"({n},{n2},{m}): tupling map not injective")
        if len(morphs) != len(singles) ** n2:
            report.append(f"({n},{n2},{m}): tupling map not surjective")
        for f in _sample(morphs, sample_cap):
            projected = tuple(L.compose(L.projection(n2, i), f) for i in range(n2))
            expected = tuple(LawMorph(n, 1, m, (c,)) for c in f.comps)
            if projected != expected:
                report.append(f"({n},{n2},{m}): projections disagree on {f}")
    return report


def roundtrip_check(L: GradedLawvere, sample_cap: int = 4) -> list[str]:
    """Verify hom(n, n', m) <-> (hom(n, 1, m))^n' is a bijection commuting
    with composition and projections, exhaustively within the window."""
    report: list[str] = []
    cells = sorted(L.homs.keys(), key=lambda c: (c[0], c[1], grade_key(c[2])))
    for (n, n2, m) in cells:
        morphs = L.hom(n, n2, m)
        singles = L.hom(n, 1, m)
        image = {tuple((c,) for c in f.comps) for f in morphs}
        full = {
            tuple(s.comps for s in combo)
            for combo in itertools.product(singles, repeat=n2)
        }
        if image != full:
            report.append(f"({n},{n2},{m}): tupling is not a bijection")
    for (n, n2, m) in cells:
        ident = L.identity(n2)
        projs = tuple(L.projection(n2, i) for i in range(n2))
        via = tuple(L.compose(projs[i], ident) for i in range(n2))
        if via != projs:
            report.append(f"({n2},{n2},I): identity does not tuple to projections")
    # composition commutes with the tupling decomposition
    for (n, n2, m) in cells:
        for m2 in L.support:
            for n3 in range(L.arity_bound + 1):
                for f in _sample(L.hom(n2, n3, m2), sample_cap):
                    for g in _sample(L.hom(n, n2, m), sample_cap):
                        whole = L.compose(f, g)
                        split = tuple(
                            L.compose(L.compose(L.projection(n3, i), f), g)
                            for i in range(n3)
                        )
                        expected = tuple(
                            LawMorph(n, 1, whole.grade, (c,)) for c in whole.comps
                        )
                        if split != expected:
                            report.append(
                                f"({n},{n3},{whole.grade}): composition does not "
                                f"commute with tupling"
                            )
    return report
