"""Text format for grade monoids, theories, terms, models, and morphisms.

Theory files (`.gat`) are line oriented:

    # comment
    monoid exception {e1,e2}
    op raise_e1 : 0 @ {e1}
    eq forall x y : f(x,y) = f(y,x)
    normalizer exception

Grade literals are monoid-directed: `I` (unit), `{a,b}` (set kinds),
`top`/`bot` (powerset full/empty), `nat:K`, `(g1,g2)` (products).  Terms
use `f(t1,...,tn)`, coercion `c[<grade>](t)`, and `f@<grade>()` for a
nullary application at a non-unit ambient grade.
"""

from __future__ import annotations

import re
from typing import Optional

from .errors import ParseError
from .grade import (
    Grade,
    GradeMonoid,
    exception_monoid,
    nat_monoid,
    powerset_monoid,
    product_monoid,
    trivial_monoid,
)
from .models import FiniteModel
from .terms import (
    App,
    Coerce,
    Equation,
    OpDecl,
    Signature,
    Term,
    Theory,
    Var,
    free_vars,
    infer_grade,
)

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|\d+|->|<=|[(){}\[\]@,:=;*])")

RESERVED = {"c", "I", "top", "bot", "nat", "monoid", "op", "eq", "forall",
            "normalizer", "model", "morphism"}


class _Tokens:
    def __init__(self, text: str, line: int):
        self.line = line
        self.toks: list[tuple[str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise ParseError(f"bad character {text[pos:].strip()[0]!r}",
                                     line, pos + 1)
                break
            self.toks.append((m.group(1), m.start(1) + 1))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self) -> str:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of line", self.line)
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.peek()
        if got != tok:
            raise ParseError(f"expected {tok!r}, found {got!r}", self.line, self.col())
        self.next()

    def col(self) -> int:
        if self.i < len(self.toks):
            return self.toks[self.i][1]
        return self.toks[-1][1] if self.toks else 1

    def done(self) -> bool:
        return self.i >= len(self.toks)


def parse_monoid(text: str) -> GradeMonoid:
    """Parse a standalone monoid declaration, e.g. 'powerset {*}'."""
    ts = _Tokens(text, 1)
    gm = _parse_monoid(ts)
    if not ts.done():
        raise ParseError(f"trailing input after monoid declaration: {ts.peek()!r}", 1)
    return gm


def _parse_monoid(ts: _Tokens) -> GradeMonoid:
    kind = ts.next()
    if kind == "trivial":
        return trivial_monoid()
    if kind == "nat":
        return nat_monoid()
    if kind in ("powerset", "exception"):
        ts.expect("{")
        atoms = []
        while ts.peek() != "}":
            atoms.append(ts.next())
            if ts.peek() == ",":
                ts.next()
        ts.expect("}")
        try:
            return powerset_monoid(atoms) if kind == "powerset" else exception_monoid(atoms)
        except ValueError as exc:
            raise ParseError(str(exc), ts.line) from None
    if kind == "product":
        ts.expect("(")
        m1 = _parse_monoid(ts)
        ts.expect(",")
        m2 = _parse_monoid(ts)
        ts.expect(")")
        return product_monoid(m1, m2)
    raise ParseError(f"unknown monoid kind {kind!r}", ts.line)


def _parse_grade(ts: _Tokens, gm: GradeMonoid) -> Grade:
    tok = ts.peek()
    if tok is None:
        raise ParseError("expected a grade literal", ts.line)
    try:
        if tok == "I":
            ts.next()
            return gm.unit()
        if tok == "top":
            ts.next()
            if gm.kind != "powerset":
                raise ParseError(f"'top' not valid for {gm.describe()}", ts.line)
            return gm.grade(gm.atoms)
        if tok == "bot":
            ts.next()
            if gm.kind != "powerset":
                raise ParseError(f"'bot' not valid for {gm.describe()}", ts.line)
            return gm.unit()
        if tok == "nat":
            ts.next()
            ts.expect(":")
            n = ts.next()
            if not n.isdigit():
                raise ParseError(f"malformed grade literal 'nat:{n}'", ts.line)
            return gm.grade(int(n))
        if tok == "{":
            ts.next()
            items = []
            while ts.peek() != "}":
                items.append(ts.next())
                if ts.peek() == ",":
                    ts.next()
            ts.expect("}")
            return gm.grade(items)
        if tok == "(":
            if gm.kind != "product":
                raise ParseError(f"pair literal not valid for {gm.describe()}", ts.line)
            ts.next()
            g1 = _parse_grade(ts, gm.factors[0])
            ts.expect(",")
            g2 = _parse_grade(ts, gm.factors[1])
            ts.expect(")")
            return gm.pair(g1, g2)
    except ValueError as exc:
        raise ParseError(f"malformed grade literal: {exc}", ts.line) from None
    raise ParseError(f"malformed grade literal {tok!r}", ts.line, ts.col())


def _parse_term(ts: _Tokens, sig: Signature) -> Term:
    gm = sig.monoid
    tok = ts.next()
    if tok == "c":
        ts.expect("[")
        g = _parse_grade(ts, gm)
        ts.expect("]")
        ts.expect("(")
        body = _parse_term(ts, sig)
        ts.expect(")")
        return Coerce(g, body)
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
        raise ParseError(f"expected a term, found {tok!r}", ts.line)
    if ts.peek() == "@":
        ts.next()
        g = _parse_grade(ts, gm)
        ts.expect("(")
        ts.expect(")")
        if not sig.has_op(tok):
            raise ParseError(f"unknown operation {tok!r}", ts.line)
        return App(tok, (), g)
    if ts.peek() == "(":
        ts.next()
        args = []
        while ts.peek() != ")":
            args.append(_parse_term(ts, sig))
            if ts.peek() == ",":
                ts.next()
        ts.expect(")")
        if not sig.has_op(tok):
            raise ParseError(f"unknown operation {tok!r}", ts.line)
        if not args:
            return App(tok, (), gm.unit())
        return App(tok, tuple(args))
    if sig.has_op(tok):
        raise ParseError(f"operation {tok!r} used without arguments", ts.line)
    return Var(tok)


def parse_term(text: str, sig: Signature) -> Term:
    ts = _Tokens(text, 1)
    t = _parse_term(ts, sig)
    if not ts.done():
        raise ParseError(f"trailing input after term: {ts.peek()!r}", 1, ts.col())
    return t


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_theory(text: str, name: str = "") -> Theory:
    gm: Optional[GradeMonoid] = None
    ops: list[OpDecl] = []
    eqs: list[tuple[_Tokens, int]] = []
    normalizer = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        ts = _Tokens(line, lineno)
        head = ts.next()
        if head == "monoid":
            if gm is not None:
                raise ParseError("duplicate monoid declaration", lineno)
            gm = _parse_monoid(ts)
        elif head == "op":
            if gm is None:
                raise ParseError("operation declared before the monoid", lineno)
            op_name = ts.next()
            ts.expect(":")
            arity = ts.next()
            if not arity.isdigit():
                raise ParseError(f"arity must be a natural number, got {arity!r}", lineno)
            ts.expect("@")
            g = _parse_grade(ts, gm)
            if not ts.done():
                raise ParseError("trailing input after operation declaration", lineno)
            ops.append(OpDecl(op_name, int(arity), g))
        elif head == "eq":
            if gm is None:
                raise ParseError("equation declared before the monoid", lineno)
            eqs.append((ts, lineno))
        elif head == "normalizer":
            normalizer = ts.next()
        else:
            raise ParseError(f"unknown declaration {head!r}", lineno)
    if gm is None:
        raise ParseError("missing monoid declaration", 1)
    try:
        sig = Signature(gm, tuple(ops))
    except Exception as exc:
        raise ParseError(str(exc), 1) from None

    axioms = []
    for ts, lineno in eqs:
        ts.expect("forall")
        ctx = []
        while ts.peek() != ":":
            v = ts.next()
            if sig.has_op(v) or v in RESERVED:
                raise ParseError(f"bad context variable {v!r}", lineno)
            ctx.append(v)
        ts.expect(":")
        lhs = _parse_term(ts, sig)
        ts.expect("=")
        rhs = _parse_term(ts, sig)
        if not ts.done():
            raise ParseError("trailing input after equation", lineno)
        fv = free_vars(lhs) | free_vars(rhs)
        if not fv <= set(ctx):
            raise ParseError(
                f"equation uses variables outside its context: {sorted(fv - set(ctx))}",
                lineno,
            )
        try:
            gl = infer_grade(sig, lhs)
            gr = infer_grade(sig, rhs)
        except Exception as exc:
            raise ParseError(str(exc), lineno) from None
        if gl != gr:
            raise ParseError(f"equation sides grade to {gl} and {gr}", lineno)
        axioms.append(Equation(tuple(ctx), lhs, rhs, gl))

    if normalizer:
        from .catalog import normalizer_tags

        if normalizer not in normalizer_tags():
            raise ParseError(f"unknown normalizer tag {normalizer!r}", 1)
    theory = Theory(sig, tuple(axioms), name=name, normalizer=normalizer)
    theory.validate()
    return theory


def print_theory(theory: Theory) -> str:
    lines = [f"monoid {theory.monoid.describe()}"]
    for op in theory.signature.ops:
        lines.append(f"op {op.name} : {op.arity} @ {op.grade}")
    for eq in theory.axioms:
        ctx = " ".join(eq.context)
        head = f"eq forall {ctx}".rstrip()
        lines.append(f"{head} : {eq.lhs} = {eq.rhs}")
    if theory.normalizer:
        lines.append(f"normalizer {theory.normalizer}")
    return "\n".join(lines) + "\n"


def parse_model(text: str, theory: Theory, name: str = "") -> FiniteModel:
    """Model description: support, carrier, action, and interp lines.

        model
        support I, {e1}
        carrier I : a, b
        action I <= {e1} : a -> x, b -> y
        interp raise_e1 @ I : () -> x
        interp lookup @ {*} : (a,b) -> f1 ; (b,a) -> f2
    """
    gm = theory.monoid
    support: list[Grade] = []
    carriers: dict[Grade, tuple] = {}
    actions: dict = {}
    interps: dict = {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        ts = _Tokens(line, lineno)
        head = ts.next()
        if head == "model":
            seen_header = True
            continue
        if not seen_header:
            raise ParseError("model files start with a 'model' line", lineno)
        if head == "support":
            while not ts.done():
                support.append(_parse_grade(ts, gm))
                if ts.peek() == ",":
                    ts.next()
        elif head == "carrier":
            g = _parse_grade(ts, gm)
            ts.expect(":")
            elems = []
            while not ts.done():
                elems.append(ts.next())
                if ts.peek() == ",":
                    ts.next()
            carriers[g] = tuple(elems)
        elif head == "action":
            g1 = _parse_grade(ts, gm)
            ts.expect("<=")
            g2 = _parse_grade(ts, gm)
            ts.expect(":")
            table = {}
            while not ts.done():
                src = ts.next()
                ts.expect("->")
                dst = ts.next()
                table[src] = dst
                if ts.peek() == ",":
                    ts.next()
            actions[(g1, g2)] = table
        elif head == "interp":
            op = ts.next()
            if not theory.signature.has_op(op):
                raise ParseError(f"unknown operation {op!r}", lineno)
            ts.expect("@")
            stage = _parse_grade(ts, gm)
            ts.expect(":")
            table = interps.setdefault((op, stage), {})
            while not ts.done():
                ts.expect("(")
                args = []
                while ts.peek() != ")":
                    args.append(ts.next())
                    if ts.peek() == ",":
                        ts.next()
                ts.expect(")")
                ts.expect("->")
                table[tuple(args)] = ts.next()
                if ts.peek() == ";":
                    ts.next()
        else:
            raise ParseError(f"unknown model declaration {head!r}", lineno)
    return FiniteModel(theory, tuple(support), carriers, actions, interps,
                       name=name or "model")


def parse_morphism_file(text: str) -> dict:
    """Morphism description: source/target theory paths plus generator
    assignments (terms over the target signature, parsed later)."""
    out = {"source": None, "target": None, "map": {}}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped == "morphism":
            seen_header = True
            continue
        if not seen_header:
            raise ParseError("morphism files start with a 'morphism' line", lineno)
        if stripped.startswith("source "):
            out["source"] = stripped[len("source "):].strip()
        elif stripped.startswith("target "):
            out["target"] = stripped[len("target "):].strip()
        elif stripped.startswith("map "):
            body = stripped[len("map "):]
            if "=" not in body:
                raise ParseError("map lines read 'map op = term'", lineno)
            op, term_text = body.split("=", 1)
            out["map"][op.strip()] = term_text.strip()
        else:
            raise ParseError(f"unknown morphism declaration {stripped!r}", lineno)
    if not out["source"] or not out["target"]:
        raise ParseError("morphism file needs source and target lines", 1)
    return out
