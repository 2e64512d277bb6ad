"""Free models, the induced graded monad, and Kleisli-style homs.

A free model enumerates, per supported grade, the provable-equality
classes of depth-bounded terms over a finite variable set.  Classes are
named by canonical representative terms: a registered normalizer when the
theory has one, the closure oracle otherwise.  The induced monad treats
T(m, X) as those classes; its unit is the variable class and its
multiplication substitutes representatives and renormalizes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .errors import MonoidMismatchError, SupportError, TermError
from .grade import Grade, grade_key
from .logic import (
    DEFAULT_UNIVERSE_CAP,
    derive_closure,
    enumerate_terms,
    reachable_grades,
)
from .models import FiniteModel, ModelHom, interpret
from .terms import (
    App,
    Coerce,
    Term,
    Theory,
    Var,
    canon_ambients,
    infer_grade,
    rename,
    sort_terms,
    substitute,
)


def resolve_normalizer(theory: Theory):
    if not theory.normalizer:
        return None
    from .catalog import build_normalizer

    return build_normalizer(theory)


@dataclass
class FreeModel:
    """Grade-indexed class enumeration of terms over a fixed variable set."""

    theory: Theory
    variables: tuple[str, ...]
    support: tuple[Grade, ...]
    depth: int
    classes_by_grade: dict[Grade, tuple[Term, ...]]
    _normal: Callable[[Term], Term]

    def classes(self, m: Grade) -> tuple[Term, ...]:
        if m not in self.classes_by_grade:
            raise SupportError(f"grade {m} outside free-model support")
        return self.classes_by_grade[m]

    def size(self, m: Grade) -> int:
        return len(self.classes(m))

    def class_of(self, t: Term) -> Term:
        return self._normal(t)

    def eta(self, x: str) -> Term:
        if x not in self.variables:
            raise TermError(f"{x!r} is not a generator of this free model")
        return self._normal(Var(x))

    def act(self, target: Grade, t: Term) -> Term:
        return self._normal(Coerce(target, t))

    def apply_op(self, op: str, args: tuple[Term, ...], ambient: Optional[Grade] = None) -> Term:
        decl = self.theory.signature.op(op)
        if decl.arity == 0:
            amb = ambient if ambient is not None else self.theory.monoid.unit()
            return self._normal(App(op, (), amb))
        return self._normal(App(op, tuple(args)))


def _closure_normal(theory: Theory, universe, depth: int, support) -> Callable[[Term], Term]:
    sig = theory.signature

    def normal(t: Term) -> Term:
        t = canon_ambients(sig, t)
        if t in universe:
            return universe.rep(t)
        g = infer_grade(sig, t)
        seeded = derive_closure(
            theory,
            universe.context,
            depth,
            extra_grades=support,
            seeds=(t,),
        )
        return seeded.rep(t)

    return normal


def free_model(
    theory: Theory,
    variables: Iterable[str],
    support: Iterable[Grade],
    depth: int,
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> FreeModel:
    """Enumerate T(m, X) classes for each m in the support.

    Classes are the distinct canonical forms of all terms of depth <=
    depth at that grade; the bound must be large enough to reach every
    class (checked against closed forms in the test suite for the catalog
    theories)."""
    variables = tuple(variables)
    support = tuple(sorted(set(support), key=grade_key))
    nz = resolve_normalizer(theory)
    if nz is not None:
        pool = reachable_grades(theory, depth, support)
        grade_of = enumerate_terms(theory, variables, depth, pool, cap)
        normal = nz.normalize
    else:
        universe = derive_closure(theory, variables, depth, extra_grades=support, cap=cap)
        grade_of = {t: universe.grades[t] for t in universe.terms}
        normal = _closure_normal(theory, universe, depth, support)

    classes: dict[Grade, tuple[Term, ...]] = {}
    for m in support:
        reps = {normal(t) for t, g in grade_of.items() if g == m}
        classes[m] = tuple(sort_terms(reps))
    return FreeModel(theory, variables, support, depth, classes, normal)


class GradedMonad:
    """The finitary graded monad induced by a theory's free models,
    materialized on demand for finite variable sets."""

    def __init__(self, theory: Theory, support: Iterable[Grade], depth: int,
                 cap: int = DEFAULT_UNIVERSE_CAP):
        self.theory = theory
        self.support = tuple(sorted(set(support), key=grade_key))
        self.depth = depth
        self.cap = cap
        self._models: dict[tuple[str, ...], FreeModel] = {}

    @property
    def monoid(self):
        return self.theory.monoid

    def model(self, xs: tuple[str, ...]) -> FreeModel:
        xs = tuple(xs)
        if xs not in self._models:
            self._models[xs] = free_model(self.theory, xs, self.support, self.depth, self.cap)
        return self._models[xs]

    def apply(self, m: Grade, xs: tuple[str, ...]) -> tuple[Term, ...]:
        return self.model(xs).classes(m)

    def normal(self, xs: tuple[str, ...], t: Term) -> Term:
        return self.model(xs).class_of(t)

    def unit(self, xs: tuple[str, ...], x: str) -> Term:
        return self.model(xs).eta(x)

    def act(self, target: Grade, xs: tuple[str, ...], t: Term) -> Term:
        return self.model(xs).act(target, t)

    def map_vars(self, mapping: Mapping[str, str], xs_to: tuple[str, ...], t: Term) -> Term:
        """Functorial action on a function between variable sets."""
        return self.normal(xs_to, rename(t, mapping))

    def kvars(self, m: Grade, xs: tuple[str, ...], prefix: str = "k") -> tuple[str, ...]:
        """Variable names standing for the classes of T(m, xs), in
        enumeration order."""
        return tuple(f"{prefix}{i}" for i in range(len(self.apply(m, xs))))

    def kvar_binding(self, m: Grade, xs: tuple[str, ...], prefix: str = "k") -> dict[str, Term]:
        return {f"{prefix}{i}": c for i, c in enumerate(self.apply(m, xs))}

    def mult(self, m1: Grade, m2: Grade, xs: tuple[str, ...], t: Term,
             prefix: str = "k") -> Term:
        """Flatten an element of T(m1, T(m2, xs)) to T(m1 (X) m2, xs)."""
        binding = self.kvar_binding(m2, xs, prefix)
        flat = substitute(self.theory.signature, t, binding, binding_grade=m2)
        return self.normal(xs, flat)


def induced_monad(theory: Theory, support: Iterable[Grade], depth: int,
                  cap: int = DEFAULT_UNIVERSE_CAP) -> GradedMonad:
    return GradedMonad(theory, support, depth, cap)


@dataclass(frozen=True)
class KleisliHom:
    """A grade-m hom: a function from source elements to classes over the
    target variable set."""

    monad: GradedMonad = field(compare=False)
    source: tuple[str, ...]
    target: tuple[str, ...]
    grade: Grade
    mapping: tuple[tuple[str, Term], ...]

    def __call__(self, x: str) -> Term:
        for k, v in self.mapping:
            if k == x:
                return v
        raise TermError(f"{x!r} outside the hom's source set")


def kleisli_hom(monad: GradedMonad, source, target, grade: Grade,
                mapping: Mapping[str, Term]) -> KleisliHom:
    source, target = tuple(source), tuple(target)
    items = []
    for x in source:
        if x not in dict(mapping.items()) and x not in mapping:
            raise TermError(f"hom mapping missing {x!r}")
        c = monad.normal(target, mapping[x])
        if infer_grade(monad.theory.signature, c) != grade:
            raise TermError(f"hom component at {x!r} has the wrong grade")
        items.append((x, c))
    return KleisliHom(monad, source, target, grade, tuple(items))


def kleisli_eta(monad: GradedMonad, xs) -> KleisliHom:
    xs = tuple(xs)
    return kleisli_hom(
        monad, xs, xs, monad.monoid.unit(), {x: Var(x) for x in xs}
    )


def kleisli_compose(f: KleisliHom, g: KleisliHom) -> KleisliHom:
    """Substitution composite: each component of f is flattened along g.

    Grades multiply as f.grade (X) g.grade.
    """
    if f.monad is not g.monad:
        raise MonoidMismatchError("kleisli homs over different monads")
    if f.target != g.source:
        raise TermError("kleisli homs do not compose: target/source mismatch")
    monad = f.monad
    sig = monad.theory.signature
    out = {}
    for x, t in f.mapping:
        flat = substitute(sig, t, dict(g.mapping), binding_grade=g.grade)
        out[x] = monad.normal(g.target, flat)
    grade = monad.monoid.tensor(f.grade, g.grade)
    return kleisli_hom(monad, f.source, g.target, grade, out)


def check_monad_laws(
    monad: GradedMonad,
    sample_sets: Iterable[tuple[str, ...]],
    trials: int = 0,
    rng: Optional[random.Random] = None,
    exhaustive_cap: int = 4096,
) -> list[str]:
    """Empty report iff the unit and associativity squares commute on
    every checked instance.

    All instances are checked exhaustively when the nested class counts
    stay under `exhaustive_cap`; otherwise `trials` random elements are
    drawn per grade combination.
    """
    gm = monad.monoid
    rng = rng or random.Random(0)
    report: list[str] = []
    for xs in sample_sets:
        xs = tuple(xs)
        unit_classes = monad.apply(gm.unit(), xs)
        kb2 = monad.kvars(gm.unit(), xs, "w")
        eta_rename = {}
        for x in xs:
            ux = monad.unit(xs, x)
            eta_rename[x] = kb2[unit_classes.index(ux)]
        for m in monad.support:
            classes = monad.apply(m, xs)
            kb = monad.kvars(m, xs, "u")
            for idx, t in enumerate(classes):
                # left unit: eta at the T(m, xs) level, then mult at (I, m)
                got = monad.mult(gm.unit(), m, xs, Var(kb[idx]), "u")
                if got != t:
                    report.append(f"left unit fails at {m} on {t}")
                # right unit: map eta inside, then mult at (m, I)
                got = monad.mult(m, gm.unit(), xs, rename(t, eta_rename), "w")
                if got != t:
                    report.append(f"right unit fails at {m} on {t}")
        for m1, m2, m3 in itertools.product(monad.support, repeat=3):
            k3 = monad.kvars(m3, xs, "a")
            k2 = monad.kvars(m2, k3, "b")
            if len(k2) <= 8 and len(monad.apply(m1, k2)) <= exhaustive_cap:
                elems = monad.apply(m1, k2)
            else:
                elems = tuple(
                    random_term(monad.theory, k2, 3, rng, target_grade=m1)
                    for _ in range(max(trials, 1))
                )
            m23 = gm.tensor(m2, m3)
            k23 = monad.kvars(m23, xs, "d")
            flat_classes = monad.apply(m23, xs)
            inner_flat = {}
            broken = False
            for i, c in enumerate(monad.apply(m2, k3)):
                fc = monad.mult(m2, m3, xs, c, "a")
                if fc not in flat_classes:
                    report.append(
                        f"mult lands outside T({m23}) at ({m2},{m3}) on {c}"
                    )
                    broken = True
                    break
                inner_flat[f"b{i}"] = k23[flat_classes.index(fc)]
            if broken:
                continue
            for w in elems:
                # path A: mult at (m1, m2) over k3, then at (m1m2, m3)
                first = monad.mult(m1, m2, k3, w, "b")
                path_a = monad.mult(gm.tensor(m1, m2), m3, xs, first, "a")
                # path B: flatten each inner class, then mult at (m1, m2m3)
                mapped = rename(w, inner_flat)
                path_b = monad.mult(m1, m23, xs, mapped, "d")
                if path_a != path_b:
                    report.append(
                        f"associativity fails at ({m1},{m2},{m3}) on {w}"
                    )
    return report


def random_term(
    theory: Theory,
    context: tuple[str, ...],
    depth: int,
    rng: random.Random,
    target_grade: Optional[Grade] = None,
    max_tries: int = 2000,
) -> Term:
    """Random well-formed term; resamples until the target grade is hit."""
    sig = theory.signature
    gm = theory.monoid
    if gm.is_finite():
        pool = list(gm.elements())
    else:
        pool = reachable_grades(theory, depth)

    def gen(budget: int) -> Term:
        choices = []
        if context:
            choices.append("var")
        if budget >= 1:
            choices.extend(op.name for op in sig.ops)
            choices.append("coerce")
        if not choices:
            raise TermError("empty context and zero budget")
        pick = rng.choice(choices)
        if pick == "var":
            return Var(rng.choice(context))
        if pick == "coerce":
            body = gen(budget - 1)
            g = infer_grade(sig, body)
            ups = [p for p in pool if gm.leq(g, p)]
            return Coerce(rng.choice(ups), body)
        op = sig.op(pick)
        if op.arity == 0:
            return App(pick, (), rng.choice(pool))
        first = gen(budget - 1)
        g = infer_grade(sig, first)
        args = [first]
        for _ in range(op.arity - 1):
            for _ in range(50):
                cand = gen(budget - 1)
                if infer_grade(sig, cand) == g:
                    args.append(cand)
                    break
            else:
                args.append(first)
        return App(pick, tuple(args))

    for _ in range(max_tries):
        t = gen(depth)
        try:
            g = infer_grade(sig, t)
        except TermError:
            continue
        if target_grade is None or g == target_grade:
            return canon_ambients(sig, t)
    raise TermError(f"could not sample a term at grade {target_grade}")


def free_finite_model(fm: FreeModel, name: str = "") -> FiniteModel:
    """Package a free model's classes as a concrete finite model."""
    theory = fm.theory
    gm = theory.monoid
    support = fm.support
    carriers = {m: fm.classes(m) for m in support}
    actions = {}
    for m in support:
        for m2 in support:
            if m != m2 and gm.leq(m, m2):
                actions[(m, m2)] = {t: fm.act(m2, t) for t in fm.classes(m)}
    interps = {}
    for op in theory.signature.ops:
        for stage in support:
            shifted = gm.tensor(op.grade, stage)
            if shifted not in carriers:
                continue
            table = {}
            if op.arity == 0:
                table[()] = fm.apply_op(op.name, (), ambient=stage)
            else:
                for args in itertools.product(fm.classes(stage), repeat=op.arity):
                    table[args] = fm.apply_op(op.name, args)
            interps[(op.name, stage)] = table
    return FiniteModel(theory, support, carriers, actions, interps,
                       name=name or f"free({','.join(fm.variables)})")


def universal_extension(fm: FreeModel, model: FiniteModel, v: Mapping[str, object]) -> ModelHom:
    """The unique homomorphism from the free model extending the generator
    assignment v: evaluate each representative in the target model."""
    unit = fm.theory.monoid.unit()
    args = tuple(v[x] for x in fm.variables)
    comps: dict[Grade, dict] = {}
    for m in fm.support:
        table = {}
        for rep in fm.classes(m):
            table[rep] = interpret(model, fm.variables, rep, stages=(unit,))[unit][args]
        comps[m] = table
    return ModelHom(free_finite_model(fm), model, comps)
