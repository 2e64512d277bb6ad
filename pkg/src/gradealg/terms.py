"""Graded signatures, terms, grade inference, substitution, coercions.

A term is a variable, a coercion node `Coerce(target, body)` promoting the
body's grade to `target`, or an operation application.  Nullary
applications carry an ambient grade (the shared grade of the missing
child list), so grade inference is a function; substitution rewrites the
ambient by the binding grade.  Term depth counts operation and coercion
nodes; variables have depth 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .errors import MonoidMismatchError, TermError
from .grade import Grade, GradeMonoid


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Coerce:
    target: Grade
    body: "Term"

    def __str__(self):
        return f"c[{self.target}]({self.body})"


@dataclass(frozen=True, slots=True)
class App:
    op: str
    args: tuple["Term", ...] = ()
    ambient: Optional[Grade] = None  # only meaningful for nullary applications

    def __str__(self):
        if not self.args:
            amb = self.ambient
            if amb is not None and amb != amb.monoid.unit():
                return f"{self.op}@{amb}()"
            return f"{self.op}()"
        return f"{self.op}({','.join(str(a) for a in self.args)})"


Term = Union[Var, Coerce, App]


@dataclass(frozen=True, slots=True)
class OpDecl:
    name: str
    arity: int
    grade: Grade


@dataclass(frozen=True, slots=True)
class Signature:
    monoid: GradeMonoid
    ops: tuple[OpDecl, ...]

    def __post_init__(self):
        seen = set()
        for op in self.ops:
            if op.name in seen:
                raise TermError(f"duplicate operation name {op.name!r}")
            seen.add(op.name)
            if op.grade.monoid != self.monoid:
                raise MonoidMismatchError(f"operation {op.name!r} graded in a different monoid")

    def op(self, name: str) -> OpDecl:
        for op in self.ops:
            if op.name == name:
                return op
        raise TermError(f"unknown operation {name!r}")

    def has_op(self, name: str) -> bool:
        return any(op.name == name for op in self.ops)


@dataclass(frozen=True, slots=True)
class Equation:
    context: tuple[str, ...]
    lhs: Term
    rhs: Term
    grade: Grade

    def __str__(self):
        ctx = " ".join(self.context)
        return f"eq forall {ctx} : {self.lhs} = {self.rhs}".replace("forall  :", "forall :")


@dataclass(frozen=True, slots=True)
class Theory:
    signature: Signature
    axioms: tuple[Equation, ...] = ()
    name: str = ""
    normalizer: str = ""

    @property
    def monoid(self) -> GradeMonoid:
        return self.signature.monoid

    def validate(self) -> None:
        """Raise unless every axiom is well-formed at its declared grade."""
        for eq in self.axioms:
            fv = free_vars(eq.lhs) | free_vars(eq.rhs)
            if not fv <= set(eq.context):
                raise TermError(f"axiom uses variables outside its context: {eq}")
            gl = infer_grade(self.signature, eq.lhs)
            gr = infer_grade(self.signature, eq.rhs)
            if gl != eq.grade or gr != eq.grade:
                raise TermError(
                    f"axiom sides grade to {gl} and {gr}, declared {eq.grade}: {eq}"
                )


def free_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Coerce):
        return free_vars(t.body)
    out: set[str] = set()
    for a in t.args:
        out |= free_vars(a)
    return out


def term_depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    if isinstance(t, Coerce):
        return 1 + term_depth(t.body)
    return 1 + max((term_depth(a) for a in t.args), default=0)


def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, Coerce):
        return 1 + term_size(t.body)
    return 1 + sum(term_size(a) for a in t.args)


def term_key(t: Term):
    """Deterministic total order; smallest term is the class representative."""
    return (term_size(t), term_depth(t), str(t))


def subterms(t: Term):
    yield t
    if isinstance(t, Coerce):
        yield from subterms(t.body)
    elif isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def infer_grade(sig: Signature, t: Term) -> Grade:
    gm = sig.monoid
    if isinstance(t, Var):
        return gm.unit()
    if isinstance(t, Coerce):
        if t.target.monoid != gm:
            raise MonoidMismatchError("coercion target in a different monoid")
        body = infer_grade(sig, t.body)
        if not gm.leq(body, t.target):
            raise TermError(f"coercion from {body} to non-larger grade {t.target}")
        return t.target
    op = sig.op(t.op)
    if len(t.args) != op.arity:
        raise TermError(f"{t.op!r} expects {op.arity} arguments, got {len(t.args)}")
    if op.arity == 0:
        ambient = t.ambient if t.ambient is not None else gm.unit()
        if ambient.monoid != gm:
            raise MonoidMismatchError("ambient grade in a different monoid")
        return gm.tensor(op.grade, ambient)
    if t.ambient is not None:
        raise TermError(f"ambient grade on non-nullary application of {t.op!r}")
    child = infer_grade(sig, t.args[0])
    for a in t.args[1:]:
        g = infer_grade(sig, a)
        if g != child:
            raise TermError(f"children of {t.op!r} have unequal grades {child} and {g}")
    return gm.tensor(op.grade, child)


def rename(t: Term, mapping: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        if t.name not in mapping:
            raise TermError(f"renaming missing variable {t.name!r}")
        return Var(mapping[t.name])
    if isinstance(t, Coerce):
        return Coerce(t.target, rename(t.body, mapping))
    return App(t.op, tuple(rename(a, mapping) for a in t.args), t.ambient)


def substitute(
    sig: Signature,
    s: Term,
    binding: Mapping[str, Term],
    binding_grade: Optional[Grade] = None,
) -> Term:
    """Capture-free substitution; the result grades to grade(s) (X) m'.

    All bound terms must share one inferred grade m'.  For a closed s the
    binding may be empty, in which case m' must be passed explicitly (it
    still shifts ambient grades of nullary applications).
    """
    gm = sig.monoid
    grades = {name: infer_grade(sig, t) for name, t in binding.items()}
    distinct = set(grades.values())
    if len(distinct) > 1:
        raise TermError(f"binding terms have unequal grades: {sorted(map(str, distinct))}")
    if distinct:
        m = distinct.pop()
        if binding_grade is not None and binding_grade != m:
            raise TermError(f"binding grade {binding_grade} != inferred {m}")
    elif binding_grade is not None:
        m = binding_grade
    else:
        m = gm.unit()

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            if t.name not in binding:
                raise TermError(f"unbound free variable {t.name!r}")
            return binding[t.name]
        if isinstance(t, Coerce):
            return Coerce(gm.tensor(t.target, m), go(t.body))
        if not t.args:
            ambient = t.ambient if t.ambient is not None else gm.unit()
            return App(t.op, (), gm.tensor(ambient, m))
        return App(t.op, tuple(go(a) for a in t.args))

    return go(s)


def canon_ambients(sig: Signature, t: Term) -> Term:
    """Rewrite every nullary ambient to its canonical same-product form."""
    gm = sig.monoid
    if isinstance(t, Var):
        return t
    if isinstance(t, Coerce):
        return Coerce(t.target, canon_ambients(sig, t.body))
    if not t.args:
        op = sig.op(t.op)
        ambient = t.ambient if t.ambient is not None else gm.unit()
        return App(t.op, (), gm.minimal_ambient(op.grade, ambient))
    return App(t.op, tuple(canon_ambients(sig, a) for a in t.args))


def normalize_coercions(sig: Signature, t: Term) -> Term:
    """Coercion-rule normal form; provably equal to t and idempotent.

    Removes identity coercions, collapses nested coercions, hoists a
    common coercion out of an application's children, and canonicalizes
    nullary ambient grades.  Purely syntactic: no theory axioms involved.
    """
    gm = sig.monoid
    t = canon_ambients(sig, t)

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        if isinstance(t, Coerce):
            body = go(t.body)
            if isinstance(body, Coerce):
                body = body.body
            if infer_grade(sig, body) == t.target:
                return body
            return Coerce(t.target, body)
        args = tuple(go(a) for a in t.args)
        if args and all(isinstance(a, Coerce) for a in args):
            targets = {a.target for a in args}
            if len(targets) == 1:
                bodies = tuple(a.body for a in args)
                body_grades = {infer_grade(sig, b) for b in bodies}
                if len(body_grades) == 1:
                    op = sig.op(t.op)
                    hoisted = gm.tensor(op.grade, targets.pop())
                    return go(Coerce(hoisted, App(t.op, bodies)))
        return App(t.op, args, t.ambient)

    out = go(t)
    infer_grade(sig, out)
    return out


def coerce_to(sig: Signature, t: Term, target: Grade) -> Term:
    """Wrap t so it grades to target, then normalize the coercions."""
    return normalize_coercions(sig, Coerce(target, t))


def sort_terms(terms) -> list[Term]:
    return sorted(terms, key=term_key)


def context_vars(n: int) -> tuple[str, ...]:
    """The standard ordered context x1..xn."""
    return tuple(f"x{i + 1}" for i in range(n))
