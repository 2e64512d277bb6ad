"""Bounded entailment oracle and pluggable normalizers.

`derive_closure` materializes every well-formed term over a context up to
a depth bound (operation/coercion nodes counted, variables depth 0) and
closes an equivalence relation under axiom instances, congruence, the
coercion rules, and substitution instances that stay inside the universe.
`entails` is the induced semi-decision: Proved answers are genuine
derivations, Unknown is never a disproof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .errors import ResourceLimitError, TermError
from .grade import Grade, grade_key
from .terms import (
    App,
    Coerce,
    Term,
    Theory,
    Var,
    canon_ambients,
    free_vars,
    infer_grade,
    subterms,
    substitute,
    term_depth,
    term_key,
)

PROVED = "Proved"
UNKNOWN = "Unknown"

DEFAULT_UNIVERSE_CAP = 200_000


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def reachable_grades(theory: Theory, depth: int, extra: Iterable[Grade] = ()) -> list[Grade]:
    """Grades reachable by depth-bounded tensoring from units, operation
    grades, and any extra grades of interest."""
    gm = theory.monoid
    pool = {gm.unit()}
    pool.update(op.grade for op in theory.signature.ops)
    pool.update(extra)
    rounds = None if gm.is_finite() else max(depth, 1)
    i = 0
    while True:
        new = {gm.tensor(a, b) for a in pool for b in pool} - pool
        if not new:
            break
        pool |= new
        i += 1
        if rounds is not None and i >= rounds:
            break
    return sorted(pool, key=grade_key)


def enumerate_terms(
    theory: Theory,
    context: tuple[str, ...],
    depth: int,
    pool: Iterable[Grade],
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> dict[Term, Grade]:
    """All well-formed terms over the context with depth <= depth, coercion
    targets and nullary ambients drawn from the grade pool."""
    sig = theory.signature
    gm = theory.monoid
    pool = sorted(set(pool), key=grade_key)
    grade_of: dict[Term, Grade] = {}

    def add(t: Term, g: Grade) -> bool:
        if t in grade_of:
            return False
        grade_of[t] = g
        if len(grade_of) > cap:
            raise ResourceLimitError("closure universe size", cap)
        return True

    for x in context:
        add(Var(x), gm.unit())

    nullary_ambients = {}
    for op in sig.ops:
        if op.arity == 0:
            ambients = sorted({gm.minimal_ambient(op.grade, a) for a in pool}, key=grade_key)
            nullary_ambients[op.name] = ambients

    for _ in range(depth):
        by_grade: dict[Grade, list[Term]] = {}
        for t, g in grade_of.items():
            by_grade.setdefault(g, []).append(t)
        for op in sig.ops:
            if op.arity == 0:
                for a in nullary_ambients[op.name]:
                    add(App(op.name, (), a), gm.tensor(op.grade, a))
                continue
            for child_grade, terms in by_grade.items():
                result = gm.tensor(op.grade, child_grade)
                for args in itertools.product(terms, repeat=op.arity):
                    add(App(op.name, args), result)
        for g, terms in by_grade.items():
            for target in pool:
                if gm.leq(g, target):
                    for body in terms:
                        add(Coerce(target, body), target)
    return grade_of


@dataclass
class ClosureUniverse:
    """Frozen result of `derive_closure`: a term universe with an
    equivalence relation given by deterministic class representatives."""

    theory: Theory
    context: tuple[str, ...]
    depth: int
    terms: tuple[Term, ...]
    grades: dict[Term, Grade]
    _rep: dict[Term, Term]

    def __contains__(self, t: Term) -> bool:
        return t in self._rep

    def rep(self, t: Term) -> Term:
        t = canon_ambients(self.theory.signature, t)
        if t not in self._rep:
            raise TermError(f"term not in the bounded universe: {t}")
        return self._rep[t]

    def same_class(self, s: Term, t: Term) -> bool:
        return self.rep(s) == self.rep(t)

    def classes(self) -> list[list[Term]]:
        groups: dict[Term, list[Term]] = {}
        for t in self.terms:
            groups.setdefault(self._rep[t], []).append(t)
        out = [sorted(g, key=term_key) for g in groups.values()]
        out.sort(key=lambda g: term_key(g[0]))
        return out

    def classes_at(self, g: Grade) -> list[Term]:
        reps = sorted(
            {self._rep[t] for t in self.terms if self.grades[t] == g}, key=term_key
        )
        return reps


def _max_var_offsets(terms: Iterable[Term]) -> dict[str, int]:
    offsets: dict[str, int] = {}

    def walk(t: Term, d: int):
        if isinstance(t, Var):
            offsets[t.name] = max(offsets.get(t.name, 0), d)
        elif isinstance(t, Coerce):
            walk(t.body, d + 1)
        else:
            for a in t.args:
                walk(a, d + 1)

    for t in terms:
        walk(t, 0)
    return offsets


def derive_closure(
    theory: Theory,
    context: tuple[str, ...],
    depth: int,
    *,
    extra_grades: Iterable[Grade] = (),
    seeds: Iterable[Term] = (),
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> ClosureUniverse:
    """Build the bounded universe and close it under the equational rules.

    `extra_grades` widens the coercion-target pool (free-model supports);
    `seeds` are admitted into the universe together with their subterms
    even when deeper than the bound.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    sig = theory.signature
    gm = theory.monoid
    seeds = [canon_ambients(sig, s) for s in seeds]
    seed_grades = []
    for s in seeds:
        for sub in subterms(s):
            seed_grades.append(infer_grade(sig, sub))
    pool = reachable_grades(theory, depth, list(extra_grades) + seed_grades)

    grade_of = enumerate_terms(theory, context, depth, pool, cap)
    for s in seeds:
        for sub in subterms(s):
            if sub not in grade_of:
                grade_of[sub] = infer_grade(sig, sub)
                if len(grade_of) > cap:
                    raise ResourceLimitError("closure universe size", cap)

    terms = tuple(grade_of.keys())
    index = {t: i for i, t in enumerate(terms)}
    uf = _UnionFind(len(terms))

    def union_terms(a: Term, b: Term) -> bool:
        return uf.union(index[a], index[b])

    # Structural rules: fixed pairs, one sweep each.
    _coercion_sweep(theory, terms, grade_of, index, pool, union_terms)
    _axiom_sweep(theory, terms, grade_of, index, depth, pool, union_terms)

    # Congruence and substitution interact with evolving classes.
    while True:
        _congruence_fixpoint(terms, index, uf)
        if not _substitution_sweep(theory, terms, grade_of, index, depth, pool, uf):
            break

    groups: dict[int, list[Term]] = {}
    for i, t in enumerate(terms):
        groups.setdefault(uf.find(i), []).append(t)
    rep_map: dict[Term, Term] = {}
    for members in groups.values():
        rep = min(members, key=term_key)
        for t in members:
            rep_map[t] = rep
    for members in groups.values():
        gs = {grade_of[t] for t in members}
        if len(gs) > 1:
            raise AssertionError(f"closure merged terms of unequal grades: {sorted(map(str, gs))}")
    return ClosureUniverse(theory, tuple(context), depth, terms, grade_of, rep_map)


def _coercion_sweep(theory, terms, grade_of, index, pool, union_terms):
    sig = theory.signature
    gm = theory.monoid
    for t in terms:
        if isinstance(t, Coerce):
            if grade_of[t.body] == t.target:
                union_terms(t, t.body)
            if isinstance(t.body, Coerce):
                flat = Coerce(t.target, t.body.body)
                if flat in index:
                    union_terms(t, flat)
        elif isinstance(t, App) and t.args:
            if all(isinstance(a, Coerce) for a in t.args):
                targets = {a.target for a in t.args}
                if len(targets) == 1:
                    bodies = tuple(a.body for a in t.args)
                    body_grades = {grade_of[b] for b in bodies}
                    if len(body_grades) == 1:
                        op = sig.op(t.op)
                        hoisted = Coerce(gm.tensor(op.grade, targets.pop()), App(t.op, bodies))
                        if hoisted in index:
                            union_terms(t, hoisted)
        elif isinstance(t, App):
            op = sig.op(t.op)
            outer = t.ambient if t.ambient is not None else gm.unit()
            result = gm.tensor(op.grade, outer)
            for inner in pool:
                if not gm.leq(inner, outer):
                    continue
                inner_app = App(t.op, (), gm.minimal_ambient(op.grade, inner))
                other = Coerce(result, inner_app)
                if other in index:
                    union_terms(t, other)


def _candidate_lists(terms, grade_of):
    by_grade: dict[Grade, list[tuple[int, Term]]] = {}
    for t in terms:
        by_grade.setdefault(grade_of[t], []).append((term_depth(t), t))
    for lst in by_grade.values():
        lst.sort(key=lambda p: (p[0], term_key(p[1])))
    return by_grade


def _instances(theory, sides, variables, pool, by_grade, max_depth, emit):
    """Enumerate uniform-grade bindings shallow enough that the
    instantiated sides can still fit in the universe, and emit each
    instance pair."""
    sig = theory.signature
    offsets = _max_var_offsets(sides)
    names = [v for v in variables if v in offsets]
    if set().union(*(free_vars(s) for s in sides)) - set(names):
        return
    for m in pool:
        cands = by_grade.get(m, [])
        if not cands:
            continue
        per_var = []
        for v in names:
            allow = max_depth - offsets[v]
            usable = [t for d, t in cands if d <= allow]
            per_var.append(usable)
        if any(not u for u in per_var):
            continue
        for combo in itertools.product(*per_var):
            binding = dict(zip(names, combo))
            if all(isinstance(t, Var) and t.name == v for v, t in binding.items()):
                continue
            try:
                inst = [
                    canon_ambients(sig, substitute(sig, s, binding, binding_grade=m))
                    for s in sides
                ]
            except TermError:
                continue
            emit(inst)


def _axiom_sweep(theory, terms, grade_of, index, depth, pool, union_terms):
    by_grade = _candidate_lists(terms, grade_of)
    sig = theory.signature

    def try_union(pair):
        a, b = pair
        if a in index and b in index:
            union_terms(a, b)

    for eq in theory.axioms:
        lhs = canon_ambients(sig, eq.lhs)
        rhs = canon_ambients(sig, eq.rhs)
        if lhs in index and rhs in index:
            union_terms(lhs, rhs)
        _instances(theory, (lhs, rhs), eq.context, pool, by_grade, depth, try_union)


def _congruence_fixpoint(terms, index, uf):
    while True:
        changed = False
        table: dict[tuple, int] = {}
        for i, t in enumerate(terms):
            if isinstance(t, Var):
                key = ("v", t.name)
            elif isinstance(t, Coerce):
                key = ("c", t.target, uf.find(index[t.body]))
            elif t.args:
                key = ("a", t.op, tuple(uf.find(index[a]) for a in t.args))
            else:
                key = ("a0", t.op, t.ambient)
            j = table.get(key)
            if j is None:
                table[key] = i
            elif uf.union(i, j):
                changed = True
        if not changed:
            return


def _substitution_sweep(theory, terms, grade_of, index, depth, pool, uf) -> bool:
    by_grade = _candidate_lists(terms, grade_of)
    groups: dict[int, list[Term]] = {}
    for i, t in enumerate(terms):
        groups.setdefault(uf.find(i), []).append(t)
    changed = False

    def try_union(pair):
        nonlocal changed
        a, b = pair
        if a in index and b in index:
            if uf.union(index[a], index[b]):
                changed = True

    for members in groups.values():
        if len(members) < 2:
            continue
        members = sorted(members, key=term_key)
        rep = members[0]
        for other in members[1:]:
            fv = free_vars(rep) | free_vars(other)
            if not fv:
                continue
            _instances(theory, (rep, other), sorted(fv), pool, by_grade, depth, try_union)
    return changed


def entails(
    theory: Theory,
    s: Term,
    t: Term,
    depth: int,
    *,
    context: Optional[tuple[str, ...]] = None,
    extra_grades: Iterable[Grade] = (),
    cap: int = DEFAULT_UNIVERSE_CAP,
) -> str:
    """Semi-decide T |- s = t inside the depth-bounded universe."""
    sig = theory.signature
    gs, gt = infer_grade(sig, s), infer_grade(sig, t)
    if gs != gt:
        raise TermError(f"entailment query across grades {gs} and {gt}")
    if context is None:
        context = tuple(sorted(free_vars(s) | free_vars(t)))
    s = canon_ambients(sig, s)
    t = canon_ambients(sig, t)
    if s == t:
        return PROVED
    uni = derive_closure(
        theory, context, depth, extra_grades=extra_grades, seeds=(s, t), cap=cap
    )
    return PROVED if uni.same_class(s, t) else UNKNOWN


@dataclass(frozen=True)
class Normalizer:
    """Decision procedure for a catalog theory with known normal forms.

    The rewrite must be idempotent and sound: equal normal forms only for
    provably equal terms (validated against the closure oracle in tests).
    """

    theory: Theory
    rewrite: Callable[[Term], Term]
    name: str = ""

    def normalize(self, t: Term) -> Term:
        return self.rewrite(t)


def normalize(nz: Normalizer, t: Term) -> Term:
    return nz.normalize(t)
