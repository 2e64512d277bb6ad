"""Built-in theories, their normalizers, and reference finite models.

The catalog fixes concrete presentations for the worked theories: graded
exceptions (nullary raises, no equations), single-cell state over the
two-point join semilattice (four equation families instantiated at the
value set), a lifted one-constant theory, a graded-module demo over the
naturals with a degree-truncated scalar ring, and the two-location state
theory obtained as a tensor square.
"""

from __future__ import annotations

import dataclasses
import itertools

from .combine import lfold_state_oracle, tensor_theories
from .errors import TermError
from .grade import (
    Grade,
    LaxMonoidalMap,
    exception_monoid,
    grade_key,
    lift_map,
    nat_monoid,
    powerset_monoid,
    product_monoid,
    trivial_monoid,
)
from .logic import Normalizer
from .models import FiniteModel, terminal_model
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
)

STATE_VALUES = (0, 1)


def exception_theory(exceptions=("e1", "e2")) -> Theory:
    gm = exception_monoid(exceptions)
    ops = tuple(
        OpDecl(f"raise_{e}", 0, gm.grade((e,))) for e in gm.atoms
    )
    return Theory(Signature(gm, ops), (), name="exception", normalizer="exception")


def state_theory(values=STATE_VALUES) -> Theory:
    gm = powerset_monoid(("*",))
    top = gm.grade(("*",))
    values = tuple(values)
    ops = [OpDecl("lookup", len(values), top)]
    ops += [OpDecl(f"update_{v}", 1, top) for v in values]
    sig = Signature(gm, tuple(ops))

    def upd(v, t):
        return App(f"update_{v}", (t,))

    def look(*ts):
        return App("lookup", tuple(ts))

    x = Var("x")
    axioms = [
        # write back what was read
        Equation(("x",), look(*[upd(v, x) for v in values]), Coerce(top, x), top),
    ]
    # read right after a write sees the written value
    names = tuple(f"x{i + 1}" for i in range(len(values)))
    for v in values:
        axioms.append(
            Equation(
                names,
                upd(v, look(*[Var(n) for n in names])),
                upd(v, Var(names[values.index(v)])),
                top,
            )
        )
    # a second write wins
    for v in values:
        for w in values:
            axioms.append(Equation(("x",), upd(v, upd(w, x)), upd(w, x), top))
    # reading twice equals reading once
    grid = {
        (v, w): Var(f"x{values.index(v) + 1}{values.index(w) + 1}")
        for v in values
        for w in values
    }
    diag_ctx = tuple(grid[(v, w)].name for v in values for w in values)
    axioms.append(
        Equation(
            diag_ctx,
            look(*[look(*[grid[(v, w)] for w in values]) for v in values]),
            look(*[grid[(v, v)] for v in values]),
            top,
        )
    )
    theory = Theory(sig, tuple(axioms), name="state", normalizer="state")
    theory.validate()
    return theory


def constant_theory() -> Theory:
    gm = trivial_monoid()
    sig = Signature(gm, (OpDecl("point", 0, gm.unit()),))
    return Theory(sig, (), name="constant", normalizer="pointed")


def lifted_constant_theory() -> Theory:
    """The one-constant theory regarded with unit grade over the
    two-point join semilattice."""
    from .combine import extend_theory

    target = powerset_monoid(("*",))
    out = extend_theory(lift_map(target), constant_theory())
    return dataclasses.replace(out, name="lifted_constant", normalizer="pointed")


def module_theory() -> Theory:
    """Graded modules over a degree-truncated scalar ring: scalars 1, s,
    s*s with degrees 0, 1, 2 and s^3 = 0."""
    gm = nat_monoid()
    g = gm.grade
    ops = (
        OpDecl("add", 2, g(0)),
        OpDecl("neg", 1, g(0)),
        OpDecl("zero", 0, g(0)),
        OpDecl("smul_one", 1, g(0)),
        OpDecl("smul_s", 1, g(1)),
        OpDecl("smul_s2", 1, g(2)),
    )
    sig = Signature(gm, ops)
    x, y, z = Var("x"), Var("y"), Var("z")

    def add(a, b):
        return App("add", (a, b))

    def zero_at(n):
        return App("zero", (), g(n))

    axioms = (
        Equation(("x", "y", "z"), add(add(x, y), z), add(x, add(y, z)), g(0)),
        Equation(("x", "y"), add(x, y), add(y, x), g(0)),
        Equation(("x",), add(x, zero_at(0)), x, g(0)),
        Equation(("x",), App("neg", (x,)), x, g(0)),
        Equation(("x",), add(x, App("neg", (x,))), zero_at(0), g(0)),
        Equation(("x",), App("smul_one", (x,)), x, g(0)),
        Equation(
            ("x", "y"),
            App("smul_s", (add(x, y),)),
            add(App("smul_s", (x,)), App("smul_s", (y,))),
            g(1),
        ),
        Equation(
            ("x", "y"),
            App("smul_s2", (add(x, y),)),
            add(App("smul_s2", (x,)), App("smul_s2", (y,))),
            g(2),
        ),
        Equation(("x",), App("smul_s", (App("smul_s", (x,)),)), App("smul_s2", (x,)), g(2)),
        Equation(("x",), App("smul_s", (App("smul_s2", (x,)),)), zero_at(3), g(3)),
        Equation(("x",), App("smul_s2", (App("smul_s", (x,)),)), zero_at(3), g(3)),
        Equation(("x",), App("smul_s2", (App("smul_s2", (x,)),)), zero_at(4), g(4)),
    )
    theory = Theory(sig, axioms, name="module")
    theory.validate()
    return theory


def two_location_state_theory(values=STATE_VALUES) -> Theory:
    base = state_theory(values)
    out = tensor_theories(base, base, prefixes=("loc1_", "loc2_"))
    return dataclasses.replace(out, name="state2", normalizer="state2")


def product22_to_powerset() -> LaxMonoidalMap:
    """Read product grades of the two-location tensor in subset form."""
    src = product_monoid(powerset_monoid(("*",)), powerset_monoid(("*",)))
    tgt = powerset_monoid(("1", "2"))

    def fn(g: Grade) -> Grade:
        a, b = g.value
        out = []
        if a:
            out.append("1")
        if b:
            out.append("2")
        return tgt.grade(out)

    return LaxMonoidalMap(src, tgt, fn, name="locations")


def catalog() -> dict[str, Theory]:
    return {
        "exception": exception_theory(),
        "state": state_theory(),
        "constant": constant_theory(),
        "lifted_constant": lifted_constant_theory(),
        "module": module_theory(),
        "state2": two_location_state_theory(),
    }


# -- normalizers ---------------------------------------------------------------


def _exception_normalizer(theory: Theory) -> Normalizer:
    sig = theory.signature
    gm = theory.monoid
    exc_of = {}
    for op in sig.ops:
        if not (op.arity == 0 and op.name.startswith("raise_")):
            raise TermError(f"unexpected operation {op.name!r} in an exception theory")
        exc_of[op.name] = op.name[len("raise_"):]

    def payload(t: Term):
        if isinstance(t, Var):
            return ("ok", t.name)
        if isinstance(t, Coerce):
            return payload(t.body)
        return ("er", exc_of[t.op])

    def rewrite(t: Term) -> Term:
        g = infer_grade(sig, t)
        kind, val = payload(t)
        inner: Term
        if kind == "ok":
            inner = Var(val)
        else:
            inner = App(f"raise_{val}", (), gm.unit())
        if infer_grade(sig, inner) == g:
            return inner
        return Coerce(g, inner)

    return Normalizer(theory, rewrite, name="exception")


def _pointed_normalizer(theory: Theory) -> Normalizer:
    sig = theory.signature
    gm = theory.monoid
    (op,) = sig.ops

    def payload(t: Term):
        if isinstance(t, Var):
            return ("var", t.name)
        if isinstance(t, Coerce):
            return payload(t.body)
        return ("const", None)

    def rewrite(t: Term) -> Term:
        g = infer_grade(sig, t)
        kind, val = payload(t)
        inner: Term = Var(val) if kind == "var" else App(op.name, (), gm.unit())
        if infer_grade(sig, inner) == g:
            return inner
        return Coerce(g, inner)

    return Normalizer(theory, rewrite, name="pointed")


def _state_meaning(theory: Theory, prefix: str, location: str) -> dict:
    meaning = {}
    for op in theory.signature.ops:
        name = op.name
        if not name.startswith(prefix):
            continue
        stem = name[len(prefix):]
        if stem == "lookup":
            meaning[name] = ("lookup", location)
        elif stem.startswith("update_"):
            meaning[name] = ("update", location, int(stem[len("update_"):]))
    return meaning


def _generic_state_normalizer(theory, locations, values, meaning, grade_touched,
                              name) -> Normalizer:
    sig = theory.signature
    states = tuple(itertools.product(values, repeat=len(locations)))
    loc_index = {l: i for i, l in enumerate(locations)}
    lookup_of = {kind[1]: op for op, kind in meaning.items() if kind[0] == "lookup"}
    update_of = {(kind[1], kind[2]): op for op, kind in meaning.items()
                 if kind[0] == "update"}

    def den(t: Term):
        if isinstance(t, Var):
            return ("pure", t.name)
        if isinstance(t, Coerce):
            return den(t.body)
        kind = meaning[t.op]
        if kind[0] == "lookup":
            li = loc_index[kind[1]]
            branches = [den(a) for a in t.args]
            out = {}
            for s in states:
                b = branches[values.index(s[li])]
                out[s] = (s, b[1]) if b[0] == "pure" else b[1][s]
            return ("fun", out)
        _, loc, v = kind
        li = loc_index[loc]
        b = den(t.args[0])
        out = {}
        for s in states:
            s2 = s[:li] + (v,) + s[li + 1:]
            out[s] = (s2, b[1]) if b[0] == "pure" else b[1][s2]
        return ("fun", out)

    def rep(touched, d) -> Term:
        order = [l for l in locations if l in touched]

        def build(assign: dict) -> Term:
            pending = [l for l in order if l not in assign]
            if pending:
                l = pending[0]
                return App(
                    lookup_of[l],
                    tuple(build({**assign, l: v}) for v in values),
                )
            full = tuple(assign.get(l, values[0]) for l in locations)
            if d[0] == "pure":
                s_out, x = full, d[1]
            else:
                s_out, x = d[1][full]
            term: Term = Var(x)
            for l in reversed(order):
                term = App(update_of[(l, s_out[loc_index[l]])], (term,))
            return term

        return build({})

    def rewrite(t: Term) -> Term:
        g = infer_grade(sig, t)
        touched = grade_touched(g)
        d = den(t)
        if not touched:
            if d[0] != "pure":
                raise TermError(f"stateful denotation at pure grade: {t}")
            return Var(d[1])
        return rep(touched, d)

    return Normalizer(theory, rewrite, name=name)


def _state_normalizer(theory: Theory) -> Normalizer:
    values = tuple(
        sorted(
            int(op.name[len("update_"):])
            for op in theory.signature.ops
            if op.name.startswith("update_")
        )
    )
    meaning = _state_meaning(theory, "", "*")

    def grade_touched(g: Grade):
        return {"*"} if g.value else set()

    return _generic_state_normalizer(
        theory, ("*",), values, meaning, grade_touched, "state"
    )


def _state2_normalizer(theory: Theory) -> Normalizer:
    values = tuple(
        sorted(
            {
                int(op.name.split("update_")[1])
                for op in theory.signature.ops
                if "update_" in op.name
            }
        )
    )
    meaning = {}
    meaning.update(_state_meaning(theory, "loc1_", "loc1"))
    meaning.update(_state_meaning(theory, "loc2_", "loc2"))

    def grade_touched(g: Grade):
        a, b = g.value
        out = set()
        if a:
            out.add("loc1")
        if b:
            out.add("loc2")
        return out

    return _generic_state_normalizer(
        theory, ("loc1", "loc2"), values, meaning, grade_touched, "state2"
    )


_NORMALIZER_BUILDERS = {
    "exception": _exception_normalizer,
    "state": _state_normalizer,
    "state2": _state2_normalizer,
    "pointed": _pointed_normalizer,
}


def build_normalizer(theory: Theory) -> Normalizer:
    if theory.normalizer not in _NORMALIZER_BUILDERS:
        raise TermError(f"unknown normalizer tag {theory.normalizer!r}")
    return _NORMALIZER_BUILDERS[theory.normalizer](theory)


def normalizer_tags() -> tuple[str, ...]:
    return tuple(sorted(_NORMALIZER_BUILDERS))


# -- reference finite models -----------------------------------------------


def state_functions_model(theory: Theory, locations, values, results,
                          meaning, grade_touched, name="state-functions") -> FiniteModel:
    """Carriers are the factored state functions at each grade's touched
    set; operations act by reading and writing the state."""
    gm = theory.monoid
    support = tuple(sorted(gm.elements(), key=grade_key))
    carriers = {}
    for m in support:
        carriers[m] = lfold_state_oracle(locations, values, results,
                                         grade_touched(m))
    actions = {}
    for m in support:
        for m2 in support:
            if m != m2 and gm.leq(m, m2):
                actions[(m, m2)] = {e: e for e in carriers[m]}
    loc_index = {l: i for i, l in enumerate(locations)}
    interps = {}
    for op in theory.signature.ops:
        kind = meaning[op.name]
        for stage in support:
            shifted = gm.tensor(op.grade, stage)
            table = {}
            for args in itertools.product(carriers[stage], repeat=op.arity):
                if kind[0] == "lookup":
                    li = loc_index[kind[1]]
                    branches = [dict(a) for a in args]
                    out = {
                        s: branches[values.index(s[li])][s]
                        for s in dict(args[0]).keys()
                    } if args else {}
                    states = list(dict(args[0]).keys()) if args else []
                else:
                    _, loc, v = kind
                    li = loc_index[loc]
                    body = dict(args[0])
                    states = list(body.keys())
                    out = {}
                    for s in states:
                        s2 = s[:li] + (v,) + s[li + 1:]
                        out[s] = body[s2]
                table[args] = tuple(sorted(out.items()))
            interps[(op.name, stage)] = table
    return FiniteModel(theory, support, carriers, actions, interps, name=name)


def single_state_model(results=("r0", "r1")) -> FiniteModel:
    theory = state_theory()
    meaning = _state_meaning(theory, "", "*")
    return state_functions_model(
        theory, ("*",), STATE_VALUES, results, meaning,
        lambda g: {"*"} if g.value else set(), name="state-functions",
    )


def two_location_state_model(results=("r0",)) -> FiniteModel:
    theory = two_location_state_theory()
    meaning = {}
    meaning.update(_state_meaning(theory, "loc1_", "loc1"))
    meaning.update(_state_meaning(theory, "loc2_", "loc2"))

    def grade_touched(g):
        a, b = g.value
        return {l for l, part in (("loc1", a), ("loc2", b)) if part}

    return state_functions_model(
        theory, ("loc1", "loc2"), STATE_VALUES, results, meaning, grade_touched,
        name="state2-functions",
    )


def module_model() -> FiniteModel:
    """The truncated scalar ring acting on itself, one degree per grade."""
    theory = module_theory()
    gm = theory.monoid
    support = tuple(gm.grade(n) for n in range(5))
    carriers = {
        m: ((0, 1) if m.value <= 2 else (0,)) for m in support
    }
    interps = {}
    for m in support:
        n = m.value
        stage_elems = carriers[m]
        if n in range(5):
            interps[("add", m)] = {
                (a, b): (a + b) % 2 for a in stage_elems for b in stage_elems
            }
            interps[("neg", m)] = {(a,): a for a in stage_elems}
            interps[("zero", m)] = {(): 0}
            interps[("smul_one", m)] = {(a,): a for a in stage_elems}
        if n + 1 <= 4:
            interps[("smul_s", m)] = {
                (a,): (a if n + 1 <= 2 else 0) for a in stage_elems
            }
        if n + 2 <= 4:
            interps[("smul_s2", m)] = {
                (a,): (a if n + 2 <= 2 else 0) for a in stage_elems
            }
    return FiniteModel(theory, support, carriers, {}, interps, name="truncated-ring")


def catalog_models(theory: Theory) -> list[FiniteModel]:
    """Reference models used by the soundness cross-checks."""
    from .freemodel import free_finite_model, free_model

    gm = theory.monoid
    if theory.name == "exception":
        support = gm.elements()
        fm = free_model(theory, ("g1", "g2"), support, depth=2)
        return [free_finite_model(fm), terminal_model(theory, support)]
    if theory.name == "state":
        return [single_state_model(), terminal_model(theory, gm.elements())]
    if theory.name == "state2":
        return [two_location_state_model(), terminal_model(theory, gm.elements())]
    if theory.name == "module":
        mm = module_model()
        return [mm, terminal_model(theory, mm.support)]
    if theory.name in ("constant", "lifted_constant"):
        support = gm.elements()
        fm = free_model(theory, ("g1",), support, depth=2)
        return [free_finite_model(fm), terminal_model(theory, support)]
    from .logic import reachable_grades

    return [terminal_model(theory, reachable_grades(theory, 2))]
