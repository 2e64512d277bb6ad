"""Theory combinators: sums, coequalizers, tensor products, extension
along a lax monoidal map, and the factored-state oracle used to validate
tensors of stateful theories."""

from __future__ import annotations

import itertools
from typing import Mapping

from .errors import MonoidMismatchError, ResourceLimitError, TermError
from .grade import (
    LaxMonoidalMap,
    left_embedding,
    product_monoid,
    right_embedding,
)
from .lawvere import TheoryMorphism, generator_term, theory_morphism
from .terms import (
    App,
    Coerce,
    Equation,
    OpDecl,
    Signature,
    Term,
    Theory,
    Var,
    infer_grade,
    normalize_coercions,
)


def rename_ops_in_term(t: Term, mapping: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, Coerce):
        return Coerce(t.target, rename_ops_in_term(t.body, mapping))
    return App(
        mapping.get(t.op, t.op),
        tuple(rename_ops_in_term(a, mapping) for a in t.args),
        t.ambient,
    )


def rename_ops(theory: Theory, mapping: Mapping[str, str]) -> Theory:
    ops = tuple(
        OpDecl(mapping.get(op.name, op.name), op.arity, op.grade)
        for op in theory.signature.ops
    )
    sig = Signature(theory.monoid, ops)
    axioms = tuple(
        Equation(
            eq.context,
            rename_ops_in_term(eq.lhs, mapping),
            rename_ops_in_term(eq.rhs, mapping),
            eq.grade,
        )
        for eq in theory.axioms
    )
    return Theory(sig, axioms, name=theory.name, normalizer=theory.normalizer)


def _disjoint_renamings(t1: Theory, t2: Theory, prefixes=("t1_", "t2_")):
    names1 = {op.name for op in t1.signature.ops}
    names2 = {op.name for op in t2.signature.ops}
    clash = names1 & names2
    ren1 = {n: prefixes[0] + n for n in names1 if n in clash}
    ren2 = {n: prefixes[1] + n for n in names2 if n in clash}
    return ren1, ren2


def sum_theories(t1: Theory, t2: Theory, prefixes=("t1_", "t2_")) -> Theory:
    """Disjoint union of operations and equations over a shared monoid;
    clashing names are renamed with the given prefixes."""
    theory, _, _ = sum_with_injections(t1, t2, prefixes)
    return theory


def sum_with_injections(
    t1: Theory, t2: Theory, prefixes=("t1_", "t2_")
) -> tuple[Theory, TheoryMorphism, TheoryMorphism]:
    if t1.monoid != t2.monoid:
        raise MonoidMismatchError("sum of theories over different grade monoids")
    ren1, ren2 = _disjoint_renamings(t1, t2, prefixes)
    r1, r2 = rename_ops(t1, ren1), rename_ops(t2, ren2)
    sig = Signature(t1.monoid, r1.signature.ops + r2.signature.ops)
    out = Theory(
        sig,
        r1.axioms + r2.axioms,
        name=f"sum({t1.name or 't1'},{t2.name or 't2'})",
    )
    out.validate()
    inj1 = theory_morphism(
        t1, out,
        {op.name: generator_term(out, ren1.get(op.name, op.name))
         for op in t1.signature.ops},
        name="inl",
    )
    inj2 = theory_morphism(
        t2, out,
        {op.name: generator_term(out, ren2.get(op.name, op.name))
         for op in t2.signature.ops},
        name="inr",
    )
    return out, inj1, inj2


def coequalize(alpha: TheoryMorphism, beta: TheoryMorphism) -> Theory:
    """Quotient the shared target by the equations induced by the two
    morphisms on each source generator."""
    if alpha.source != beta.source or alpha.target != beta.target:
        raise TermError("coequalizer needs a parallel pair of morphisms")
    target = alpha.target
    extra = []
    for op in alpha.source.signature.ops:
        s = alpha.image(op.name)
        t = beta.image(op.name)
        if s == t:
            continue
        extra.append(
            Equation(tuple(f"x{i + 1}" for i in range(op.arity)), s, t, op.grade)
        )
    out = Theory(
        target.signature,
        target.axioms + tuple(extra),
        name=f"coeq({target.name or 'target'})",
    )
    out.validate()
    return out


def extend_theory(G: LaxMonoidalMap, t: Theory) -> Theory:
    """Regrade a theory along a lax monoidal map.

    Operations keep their arity with grade G(m); terms are translated by
    coercing variables along the lax unit and applications along the lax
    tensor, which in a preordered codomain are just promotions."""
    bad = G.validate()
    if bad:
        raise TermError("invalid lax monoidal map: " + "; ".join(bad))
    if t.monoid != G.source:
        raise MonoidMismatchError("theory not graded by the map's source monoid")
    src_sig = t.signature
    tgt = G.target
    ops = tuple(OpDecl(op.name, op.arity, G.apply(op.grade)) for op in src_sig.ops)
    sig = Signature(tgt, ops)

    def translate(u: Term) -> Term:
        if isinstance(u, Var):
            return Coerce(G.apply(t.monoid.unit()), Var(u.name))
        if isinstance(u, Coerce):
            return Coerce(G.apply(u.target), translate(u.body))
        op = src_sig.op(u.op)
        if op.arity == 0:
            amb = u.ambient if u.ambient is not None else t.monoid.unit()
            inner = App(u.op, (), G.apply(amb))
            return Coerce(G.apply(t.monoid.tensor(op.grade, amb)), inner)
        child = infer_grade(src_sig, u.args[0])
        inner = App(u.op, tuple(translate(a) for a in u.args))
        return Coerce(G.apply(t.monoid.tensor(op.grade, child)), inner)

    axioms = []
    for eq in t.axioms:
        lhs = normalize_coercions(sig, translate(eq.lhs))
        rhs = normalize_coercions(sig, translate(eq.rhs))
        axioms.append(Equation(eq.context, lhs, rhs, G.apply(eq.grade)))
    out = Theory(sig, tuple(axioms), name=f"extend({t.name or 't'})")
    out.validate()
    return out


def tensor_theories(t1: Theory, t2: Theory, prefixes=("t1_", "t2_")) -> Theory:
    """Tensor product over the product monoid: both theories embedded with
    padded grades, plus one commutation equation per operation pair."""
    prod = product_monoid(t1.monoid, t2.monoid)
    e1 = extend_theory(left_embedding(t1.monoid, t2.monoid), t1)
    e2 = extend_theory(right_embedding(t1.monoid, t2.monoid), t2)
    ren1, ren2 = _disjoint_renamings(e1, e2, prefixes)
    e1, e2 = rename_ops(e1, ren1), rename_ops(e2, ren2)
    sig = Signature(prod, e1.signature.ops + e2.signature.ops)

    commutation = []
    for f in e1.signature.ops:
        for g in e2.signature.ops:
            commutation.append(_commutation_equation(sig, f, g))
    out = Theory(
        sig,
        e1.axioms + e2.axioms + tuple(commutation),
        name=f"tensor({t1.name or 't1'},{t2.name or 't2'})",
    )
    out.validate()
    return out


def _commutation_equation(sig: Signature, f: OpDecl, g: OpDecl) -> Equation:
    """f(i. g(j. x_ij)) = g(j. f(i. x_ij)) with nullary sides carried by
    ambient grades."""
    gm = sig.monoid
    n, k = f.arity, g.arity
    names = [[f"x{i + 1}_{j + 1}" for j in range(k)] for i in range(n)]
    context = tuple(names[i][j] for i in range(n) for j in range(k))

    if n == 0:
        lhs: Term = App(f.name, (), g.grade)
    else:
        rows = []
        for i in range(n):
            if k == 0:
                rows.append(App(g.name, (), gm.unit()))
            else:
                rows.append(App(g.name, tuple(Var(x) for x in names[i])))
        lhs = App(f.name, tuple(rows))
    if k == 0:
        rhs: Term = App(g.name, (), f.grade)
    else:
        cols = []
        for j in range(k):
            if n == 0:
                cols.append(App(f.name, (), gm.unit()))
            else:
                cols.append(App(f.name, tuple(Var(names[i][j]) for i in range(n))))
        rhs = App(g.name, tuple(cols))

    gl, gr = infer_grade(sig, lhs), infer_grade(sig, rhs)
    if gl != gr:
        raise TermError(
            f"commutation of {f.name!r} and {g.name!r} grades to {gl} vs {gr}"
        )
    return Equation(context, lhs, rhs, gl)


# -- factored-state oracle -----------------------------------------------------


def state_functions(locations, values, results) -> tuple:
    """All functions from states to (state, result) pairs, canonically
    encoded as sorted tuples of entries."""
    locations = tuple(locations)
    values = tuple(values)
    states = tuple(itertools.product(values, repeat=len(locations)))
    outputs = tuple((s, x) for s in states for x in results)
    fns = []
    for choice in itertools.product(outputs, repeat=len(states)):
        fns.append(tuple(zip(states, choice)))
    return tuple(fns)


def reads_only(locations, touched, fn) -> bool:
    """The touched part of the output state and the result depend only on
    the touched part of the input state."""
    locations = tuple(locations)
    idx = [i for i, l in enumerate(locations) if l in touched]
    table = dict(fn)
    for s1 in table:
        for s2 in table:
            if all(s1[i] == s2[i] for i in idx):
                (o1, x1), (o2, x2) = table[s1], table[s2]
                if x1 != x2 or any(o1[i] != o2[i] for i in idx):
                    return False
    return True


def writes_only(locations, touched, fn) -> bool:
    """Values at locations outside the touched set pass through unchanged."""
    locations = tuple(locations)
    out_idx = [i for i, l in enumerate(locations) if l not in touched]
    for s, (o, _x) in fn:
        if any(o[i] != s[i] for i in out_idx):
            return False
    return True


def lfold_state_oracle(
    locations, values, results, touched, cap: int = 2_000_000
) -> tuple:
    """Exact enumeration of the state functions that read and write only
    the touched locations: the independent oracle for tensors of the
    stateful theory."""
    locations = tuple(locations)
    values = tuple(values)
    results = tuple(results)
    touched = set(touched)
    if not touched <= set(locations):
        raise TermError(f"touched set {sorted(touched)} not within locations")
    n_states = len(values) ** len(locations)
    total = (n_states * len(results)) ** n_states
    if total > cap:
        raise ResourceLimitError("state-function enumeration", cap)
    out = [
        fn
        for fn in state_functions(locations, values, results)
        if reads_only(locations, touched, fn) and writes_only(locations, touched, fn)
    ]
    return tuple(sorted(out))


def lfold_state_counts(locations, values, results, cap: int = 2_000_000) -> dict:
    """Oracle cardinalities for every subset of locations."""
    locations = tuple(locations)
    counts = {}
    for r in range(len(locations) + 1):
        for combo in itertools.combinations(locations, r):
            counts[combo] = len(lfold_state_oracle(locations, values, results, combo, cap))
    return counts
