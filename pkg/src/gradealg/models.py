"""Finite models in grade-indexed sets, term interpretation, satisfaction.

A model assigns to every supported grade m a finite carrier A(m), to every
comparable pair m <= m' a function A(m) -> A(m'), and to every operation f
(arity n, grade m) a family of maps A(m')^n -> A(m (X) m') indexed by the
stage m'.  The grade action is strict index shifting, so the unit and
multiplication of the action are identities and interpretation follows
the inductive clauses directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Optional

from .errors import MonoidMismatchError, SupportError
from .grade import Grade, grade_key
from .terms import Coerce, Equation, Term, Theory, Var, infer_grade


@dataclass
class FiniteModel:
    theory: Theory
    support: tuple[Grade, ...]
    carriers: Mapping[Grade, tuple]
    actions: Mapping[tuple[Grade, Grade], Mapping]
    interps: Mapping[tuple[str, Grade], Mapping[tuple, Any]]
    name: str = ""

    def carrier(self, m: Grade) -> tuple:
        if m not in self.carriers:
            raise SupportError(f"model {self.name!r} has no carrier at grade {m}")
        return self.carriers[m]

    def act(self, m: Grade, m2: Grade, elem):
        if m == m2:
            return elem
        key = (m, m2)
        if key not in self.actions:
            raise SupportError(f"model {self.name!r} has no action for {m} <= {m2}")
        try:
            return self.actions[key][elem]
        except KeyError:
            raise SupportError(
                f"model {self.name!r} action {m} <= {m2} undefined on {elem!r}"
            ) from None

    def interp(self, op: str, stage: Grade) -> Mapping[tuple, Any]:
        key = (op, stage)
        if key not in self.interps:
            raise SupportError(f"model {self.name!r} has no table for {op} at stage {stage}")
        return self.interps[key]


@dataclass
class ModelHom:
    source: FiniteModel
    target: FiniteModel
    components: Mapping[Grade, Mapping]


def interpret(
    model: FiniteModel,
    context: tuple[str, ...],
    t: Term,
    stages: Optional[Iterable[Grade]] = None,
) -> dict[Grade, dict[tuple, Any]]:
    """The interpretation |t| as a family of functions A(m')^n -> A(g (X) m').

    Variables are projections, coercions apply the order action, and an
    application evaluates its children at the current stage and feeds the
    operation's table at the shifted stage.
    """
    sig = model.theory.signature
    gm = model.theory.monoid
    if stages is None:
        stages = model.support
    g = infer_grade(sig, t)

    def ev(t: Term, stage: Grade, args_domain) -> dict[tuple, Any]:
        if isinstance(t, Var):
            i = context.index(t.name)
            return {args: args[i] for args in args_domain}
        if isinstance(t, Coerce):
            gb = infer_grade(sig, t.body)
            inner = ev(t.body, stage, args_domain)
            src = gm.tensor(gb, stage)
            dst = gm.tensor(t.target, stage)
            return {args: model.act(src, dst, v) for args, v in inner.items()}
        op = sig.op(t.op)
        if op.arity == 0:
            ambient = t.ambient if t.ambient is not None else gm.unit()
            table = model.interp(t.op, gm.tensor(ambient, stage))
            const = table[()]
            return {args: const for args in args_domain}
        child_grade = infer_grade(sig, t.args[0])
        children = [ev(a, stage, args_domain) for a in t.args]
        table = model.interp(t.op, gm.tensor(child_grade, stage))
        return {args: table[tuple(c[args] for c in children)] for args in args_domain}

    out: dict[Grade, dict[tuple, Any]] = {}
    for stage in stages:
        result_grade = gm.tensor(g, stage)
        if result_grade not in model.carriers:
            raise SupportError(
                f"interpretation at stage {stage} lands at unsupported grade {result_grade}"
            )
        domain = list(itertools.product(model.carrier(stage), repeat=len(context)))
        out[stage] = ev(t, stage, domain)
    return out


def satisfies(
    model: FiniteModel, eq: Equation, stages: Optional[Iterable[Grade]] = None
) -> bool:
    """Exhaustive satisfaction: interpretations agree at every stage and
    argument tuple."""
    lhs = interpret(model, eq.context, eq.lhs, stages)
    rhs = interpret(model, eq.context, eq.rhs, stages)
    return lhs == rhs


def _ordered_pairs(model: FiniteModel):
    gm = model.theory.monoid
    for m in model.support:
        for m2 in model.support:
            if m != m2 and gm.leq(m, m2):
                yield m, m2


def check_model(model: FiniteModel, tuple_cap: Optional[int] = None) -> list[str]:
    """Empty report iff functoriality, naturality, and all axioms hold.

    `tuple_cap` skips any exhaustive check whose argument-tuple count
    exceeds the cap (reported as skipped), for models with large stages.
    """
    report: list[str] = []
    gm = model.theory.monoid
    sig = model.theory.signature

    for m, m2 in _ordered_pairs(model):
        key = (m, m2)
        if key not in model.actions:
            report.append(f"missing action table for {m} <= {m2}")
            continue
        table = model.actions[key]
        for e in model.carrier(m):
            if e not in table:
                report.append(f"action {m} <= {m2} undefined on {e!r}")
            elif table[e] not in set(model.carrier(m2)):
                report.append(f"action {m} <= {m2} leaves the carrier on {e!r}")
    for m, m2 in _ordered_pairs(model):
        for m3 in model.support:
            if m3 == m2 or m3 == m or not gm.leq(m2, m3):
                continue
            try:
                for e in model.carrier(m):
                    direct = model.act(m, m3, e)
                    composed = model.act(m2, m3, model.act(m, m2, e))
                    if direct != composed:
                        report.append(
                            f"actions do not compose along {m} <= {m2} <= {m3} at {e!r}"
                        )
                        break
            except SupportError as exc:
                report.append(str(exc))

    for op in sig.ops:
        for stage in model.support:
            shifted = gm.tensor(op.grade, stage)
            if shifted not in model.carriers:
                continue
            try:
                table = model.interp(op.name, stage)
            except SupportError as exc:
                report.append(str(exc))
                continue
            domain = list(itertools.product(model.carrier(stage), repeat=op.arity))
            if tuple_cap is not None and len(domain) > tuple_cap:
                report.append(f"skipped: {op.name} totality at stage {stage} (cap)")
                continue
            target = set(model.carrier(shifted))
            for args in domain:
                if args not in table:
                    report.append(f"{op.name} at stage {stage} undefined on {args!r}")
                elif table[args] not in target:
                    report.append(f"{op.name} at stage {stage} leaves the carrier")

    # Naturality of each operation in the stage.
    for op in sig.ops:
        for m, m2 in _ordered_pairs(model):
            s1, s2 = gm.tensor(op.grade, m), gm.tensor(op.grade, m2)
            if s1 not in model.carriers or s2 not in model.carriers:
                continue
            try:
                low = model.interp(op.name, m)
                high = model.interp(op.name, m2)
                domain = list(itertools.product(model.carrier(m), repeat=op.arity))
                if tuple_cap is not None and len(domain) > tuple_cap:
                    report.append(f"skipped: {op.name} naturality {m} <= {m2} (cap)")
                    continue
                for args in domain:
                    lifted = tuple(model.act(m, m2, a) for a in args)
                    if model.act(s1, s2, low[args]) != high[lifted]:
                        report.append(
                            f"{op.name} not natural along {m} <= {m2} at {args!r}"
                        )
                        break
            except (SupportError, KeyError) as exc:
                report.append(f"{op.name} naturality {m} <= {m2}: {exc}")

    for eq in model.theory.axioms:
        stages = []
        skipped = False
        for stage in model.support:
            if gm.tensor(eq.grade, stage) not in model.carriers:
                continue
            n_tuples = len(model.carrier(stage)) ** len(eq.context)
            if tuple_cap is not None and n_tuples > tuple_cap:
                skipped = True
                continue
            stages.append(stage)
        if skipped:
            report.append(f"skipped: axiom {eq} at large stages (cap)")
        try:
            if stages and not satisfies(model, eq, stages):
                report.append(f"axiom fails: {eq}")
        except SupportError as exc:
            report.append(f"axiom {eq}: {exc}")
    return report


def hom_check(h: ModelHom) -> bool:
    """True iff the components are natural and obey the homomorphism law."""
    a, b = h.source, h.target
    if a.theory != b.theory:
        raise MonoidMismatchError("homomorphism between models of different theories")
    gm = a.theory.monoid
    sig = a.theory.signature
    for m in a.support:
        if m not in h.components:
            return False
        comp = h.components[m]
        target = set(b.carrier(m))
        for e in a.carrier(m):
            if e not in comp or comp[e] not in target:
                return False
    for m, m2 in _ordered_pairs(a):
        for e in a.carrier(m):
            if h.components[m2][a.act(m, m2, e)] != b.act(m, m2, h.components[m][e]):
                return False
    for op in sig.ops:
        for stage in a.support:
            shifted = gm.tensor(op.grade, stage)
            if shifted not in a.carriers:
                continue
            ta, tb = a.interp(op.name, stage), b.interp(op.name, stage)
            for args in itertools.product(a.carrier(stage), repeat=op.arity):
                mapped = tuple(h.components[stage][x] for x in args)
                if h.components[shifted][ta[args]] != tb[mapped]:
                    return False
    return True


def identity_hom(model: FiniteModel) -> ModelHom:
    comps = {m: {e: e for e in model.carrier(m)} for m in model.support}
    return ModelHom(model, model, comps)


def terminal_model(theory: Theory, support: Iterable[Grade]) -> FiniteModel:
    """The one-point model: every carrier is a singleton."""
    support = tuple(sorted(set(support), key=grade_key))
    gm = theory.monoid
    star = "*"
    carriers = {m: (star,) for m in support}
    actions = {}
    for m in support:
        for m2 in support:
            if m != m2 and gm.leq(m, m2):
                actions[(m, m2)] = {star: star}
    interps = {}
    for op in theory.signature.ops:
        for stage in support:
            if gm.tensor(op.grade, stage) in carriers:
                interps[(op.name, stage)] = {
                    args: star for args in itertools.product((star,), repeat=op.arity)
                }
    return FiniteModel(theory, support, carriers, actions, interps, name="terminal")
