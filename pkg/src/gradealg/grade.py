"""Preordered grade monoids and their elements.

Five monoid kinds are built in: the one-point monoid, the naturals under
addition with the discrete order, the join-semilattice of subsets of a
finite location set, the exception monoid on nonempty subsets of
Ex + {Ok} (not commutative), and binary products.  Every grade is kept in
a canonical form (sorted tuples), so grade equality is plain equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import MonoidMismatchError, ParseError

TRIVIAL = "trivial"
NAT = "nat"
POWERSET = "powerset"
EXCEPTION = "exception"
PRODUCT = "product"

OK = "Ok"


@dataclass(frozen=True, slots=True)
class GradeMonoid:
    kind: str
    atoms: tuple[str, ...] = ()
    factors: tuple["GradeMonoid", ...] = ()

    def __post_init__(self):
        if self.kind in (POWERSET, EXCEPTION):
            object.__setattr__(self, "atoms", tuple(sorted(set(self.atoms))))
        if self.kind == EXCEPTION and OK in self.atoms:
            raise ValueError(f"{OK!r} is reserved and cannot be an exception name")
        if self.kind == PRODUCT and len(self.factors) != 2:
            raise ValueError("product monoid takes exactly two factors")

    # -- element construction ------------------------------------------------

    def unit(self) -> "Grade":
        if self.kind == TRIVIAL:
            return Grade(self, ())
        if self.kind == NAT:
            return Grade(self, 0)
        if self.kind == POWERSET:
            return Grade(self, ())
        if self.kind == EXCEPTION:
            return Grade(self, (OK,))
        return Grade(self, (self.factors[0].unit().value, self.factors[1].unit().value))

    def grade(self, value) -> "Grade":
        """Build a grade from a raw value, canonicalizing and validating it."""
        if self.kind == TRIVIAL:
            if value not in ((), None, "I"):
                raise ValueError(f"trivial monoid has no element {value!r}")
            return Grade(self, ())
        if self.kind == NAT:
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"nat grade must be a natural number, got {value!r}")
            return Grade(self, value)
        if self.kind == POWERSET:
            items = tuple(sorted(set(value)))
            for a in items:
                if a not in self.atoms:
                    raise ValueError(f"unknown location {a!r}")
            return Grade(self, items)
        if self.kind == EXCEPTION:
            items = tuple(sorted(set(value)))
            if not items:
                raise ValueError("exception grades are nonempty subsets")
            for a in items:
                if a != OK and a not in self.atoms:
                    raise ValueError(f"unknown exception {a!r}")
            return Grade(self, items)
        v1, v2 = value
        g1 = v1 if isinstance(v1, Grade) else self.factors[0].grade(v1)
        g2 = v2 if isinstance(v2, Grade) else self.factors[1].grade(v2)
        if g1.monoid != self.factors[0] or g2.monoid != self.factors[1]:
            raise MonoidMismatchError("product component from wrong monoid")
        return Grade(self, (g1.value, g2.value))

    def pair(self, g1: "Grade", g2: "Grade") -> "Grade":
        return self.grade((g1, g2))

    # -- monoid structure ----------------------------------------------------

    def tensor(self, g1: "Grade", g2: "Grade") -> "Grade":
        self._check(g1, g2)
        if self.kind == TRIVIAL:
            return g1
        if self.kind == NAT:
            return Grade(self, g1.value + g2.value)
        if self.kind == POWERSET:
            return Grade(self, tuple(sorted(set(g1.value) | set(g2.value))))
        if self.kind == EXCEPTION:
            a, b = set(g1.value), set(g2.value)
            if OK in a:
                return Grade(self, tuple(sorted((a - {OK}) | b)))
            return g1
        f1, f2 = self.factors
        left = f1.tensor(Grade(f1, g1.value[0]), Grade(f1, g2.value[0]))
        right = f2.tensor(Grade(f2, g1.value[1]), Grade(f2, g2.value[1]))
        return Grade(self, (left.value, right.value))

    def leq(self, g1: "Grade", g2: "Grade") -> bool:
        self._check(g1, g2)
        if self.kind == TRIVIAL:
            return True
        if self.kind == NAT:
            return g1.value == g2.value
        if self.kind in (POWERSET, EXCEPTION):
            return set(g1.value) <= set(g2.value)
        f1, f2 = self.factors
        return f1.leq(Grade(f1, g1.value[0]), Grade(f1, g2.value[0])) and f2.leq(
            Grade(f2, g1.value[1]), Grade(f2, g2.value[1])
        )

    def elements(self, bound: int = 3) -> tuple["Grade", ...]:
        """All elements for finite kinds; 0..bound for nat; products of both."""
        if self.kind == TRIVIAL:
            return (self.unit(),)
        if self.kind == NAT:
            return tuple(Grade(self, n) for n in range(bound + 1))
        if self.kind == POWERSET:
            out = []
            for r in range(len(self.atoms) + 1):
                for combo in itertools.combinations(self.atoms, r):
                    out.append(Grade(self, combo))
            return tuple(sorted(out, key=grade_key))
        if self.kind == EXCEPTION:
            pool = (OK,) + self.atoms
            out = []
            for r in range(1, len(pool) + 1):
                for combo in itertools.combinations(pool, r):
                    out.append(Grade(self, tuple(sorted(combo))))
            return tuple(sorted(out, key=grade_key))
        f1, f2 = self.factors
        return tuple(
            Grade(self, (a.value, b.value))
            for a in f1.elements(bound)
            for b in f2.elements(bound)
        )

    def is_finite(self) -> bool:
        if self.kind == NAT:
            return False
        if self.kind == PRODUCT:
            return all(f.is_finite() for f in self.factors)
        return True

    def minimal_ambient(self, op_grade: "Grade", ambient: "Grade") -> "Grade":
        """Canonical m'' with op_grade (X) m'' = op_grade (X) ambient.

        Nullary applications at ambients with equal product denote the same
        term, so ambients are kept in this canonical form.
        """
        self._check(op_grade, ambient)
        if self.kind in (TRIVIAL, NAT):
            return ambient
        if self.kind == POWERSET:
            return Grade(self, tuple(a for a in ambient.value if a not in op_grade.value))
        if self.kind == EXCEPTION:
            if OK not in op_grade.value:
                return self.unit()
            residue = tuple(a for a in ambient.value if a == OK or a not in op_grade.value)
            if residue:
                return Grade(self, residue)
            return Grade(self, (ambient.value[0],))
        f1, f2 = self.factors
        left = f1.minimal_ambient(Grade(f1, op_grade.value[0]), Grade(f1, ambient.value[0]))
        right = f2.minimal_ambient(Grade(f2, op_grade.value[1]), Grade(f2, ambient.value[1]))
        return Grade(self, (left.value, right.value))

    # -- formatting ----------------------------------------------------------

    def format_grade(self, g: "Grade") -> str:
        if self.kind == TRIVIAL:
            return "I"
        if self.kind == NAT:
            return f"nat:{g.value}"
        if self.kind in (POWERSET, EXCEPTION):
            return "{" + ",".join(g.value) + "}"
        f1, f2 = self.factors
        return "({},{})".format(
            f1.format_grade(Grade(f1, g.value[0])),
            f2.format_grade(Grade(f2, g.value[1])),
        )

    def describe(self) -> str:
        if self.kind == TRIVIAL:
            return "trivial"
        if self.kind == NAT:
            return "nat"
        if self.kind == POWERSET:
            return "powerset {" + ",".join(self.atoms) + "}"
        if self.kind == EXCEPTION:
            return "exception {" + ",".join(self.atoms) + "}"
        return f"product ({self.factors[0].describe()}, {self.factors[1].describe()})"

    def _check(self, *grades):
        for g in grades:
            if g.monoid != self:
                raise MonoidMismatchError(
                    f"grade {g} belongs to {g.monoid.describe()}, not {self.describe()}"
                )


@dataclass(frozen=True, slots=True)
class Grade:
    monoid: GradeMonoid
    value: Any

    def __mul__(self, other: "Grade") -> "Grade":
        return self.monoid.tensor(self, other)

    def leq(self, other: "Grade") -> bool:
        return self.monoid.leq(self, other)

    def __str__(self):
        return self.monoid.format_grade(self)

    def __repr__(self):
        return f"Grade({self})"


def grade_key(g: Grade):
    """Total order key for deterministic listings."""
    v = g.value
    if isinstance(v, int):
        return (v,)
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return (len(v), v)
    if isinstance(v, tuple):
        return (len(v), v)
    return (str(v),)


def tensor(g1: Grade, g2: Grade) -> Grade:
    if g1.monoid != g2.monoid:
        raise MonoidMismatchError("tensor of grades from different monoids")
    return g1.monoid.tensor(g1, g2)


def leq(g1: Grade, g2: Grade) -> bool:
    if g1.monoid != g2.monoid:
        raise MonoidMismatchError("order comparison across monoids")
    return g1.monoid.leq(g1, g2)


def enumerate_grades(gm: GradeMonoid, bound: int = 3) -> tuple[Grade, ...]:
    return gm.elements(bound)


def trivial_monoid() -> GradeMonoid:
    return GradeMonoid(TRIVIAL)


def nat_monoid() -> GradeMonoid:
    return GradeMonoid(NAT)


def powerset_monoid(locations) -> GradeMonoid:
    return GradeMonoid(POWERSET, atoms=tuple(str(a) for a in locations))


def exception_monoid(exceptions) -> GradeMonoid:
    return GradeMonoid(EXCEPTION, atoms=tuple(str(e) for e in exceptions))


def product_monoid(m1: GradeMonoid, m2: GradeMonoid) -> GradeMonoid:
    return GradeMonoid(PRODUCT, factors=(m1, m2))


@dataclass(frozen=True)
class LaxMonoidalMap:
    """Monotone map between grade monoids with lax unit/tensor witnesses.

    In a preordered codomain the unit and tensor coherence morphisms are
    order facts, checked by `validate`: unit' <= G(unit) and
    G(m) (X) G(m') <= G(m (X) m').
    """

    source: GradeMonoid
    target: GradeMonoid
    fn: Callable[[Grade], Grade] = field(compare=False)
    name: str = ""

    def apply(self, g: Grade) -> Grade:
        if g.monoid != self.source:
            raise MonoidMismatchError("lax map applied to grade from wrong monoid")
        out = self.fn(g)
        if out.monoid != self.target:
            raise MonoidMismatchError("lax map produced grade in wrong monoid")
        return out

    def validate(self, bound: int = 3) -> list[str]:
        """Check monotonicity and the two lax laws on enumerated elements."""
        report = []
        elems = self.source.elements(bound)
        unit_t = self.target.unit()
        if not unit_t.leq(self.apply(self.source.unit())):
            report.append("lax unit law fails: unit' <= G(unit) does not hold")
        for a in elems:
            for b in elems:
                if a.leq(b) and not self.apply(a).leq(self.apply(b)):
                    report.append(f"not monotone at {a} <= {b}")
                lhs = tensor(self.apply(a), self.apply(b))
                rhs = self.apply(tensor(a, b))
                if not lhs.leq(rhs):
                    report.append(f"lax tensor law fails at ({a}, {b})")
        return report


def identity_map(gm: GradeMonoid) -> LaxMonoidalMap:
    return LaxMonoidalMap(gm, gm, lambda g: g, name="id")


def lift_map(target: GradeMonoid) -> LaxMonoidalMap:
    """The strict map from the one-point monoid sending I to target's unit."""
    triv = trivial_monoid()
    return LaxMonoidalMap(triv, target, lambda g: target.unit(), name="lift")


def left_embedding(m1: GradeMonoid, m2: GradeMonoid) -> LaxMonoidalMap:
    prod = product_monoid(m1, m2)
    u2 = m2.unit()
    return LaxMonoidalMap(m1, prod, lambda g: prod.pair(g, u2), name="left")


def right_embedding(m1: GradeMonoid, m2: GradeMonoid) -> LaxMonoidalMap:
    prod = product_monoid(m1, m2)
    u1 = m1.unit()
    return LaxMonoidalMap(m2, prod, lambda g: prod.pair(u1, g), name="right")


# -- grade literal syntax ----------------------------------------------------
#
#   I            unit of any monoid
#   top / bot    full / empty location set (powerset monoids only)
#   nat:K        natural number K
#   {a,b}        set literal (powerset and exception monoids)
#   (g1,g2)      product pair


def parse_grade(text: str, gm: GradeMonoid) -> Grade:
    g, rest = _parse_grade_prefix(text.strip(), gm)
    if rest.strip():
        raise ParseError(f"trailing input after grade literal: {rest.strip()!r}")
    return g


def _parse_grade_prefix(text: str, gm: GradeMonoid) -> tuple[Grade, str]:
    text = text.lstrip()
    if not text:
        raise ParseError("expected a grade literal")
    if text.startswith("("):
        if gm.kind != PRODUCT:
            raise ParseError(f"pair literal not valid for {gm.describe()}")
        g1, rest = _parse_grade_prefix(text[1:], gm.factors[0])
        rest = rest.lstrip()
        if not rest.startswith(","):
            raise ParseError("expected ',' in pair literal")
        g2, rest = _parse_grade_prefix(rest[1:], gm.factors[1])
        rest = rest.lstrip()
        if not rest.startswith(")"):
            raise ParseError("expected ')' closing pair literal")
        return gm.pair(g1, g2), rest[1:]
    if text.startswith("{"):
        end = text.find("}")
        if end < 0:
            raise ParseError("unterminated set literal")
        body = text[1:end].strip()
        items = [s.strip() for s in body.split(",") if s.strip()] if body else []
        if gm.kind not in (POWERSET, EXCEPTION):
            raise ParseError(f"set literal not valid for {gm.describe()}")
        try:
            return gm.grade(items), text[end + 1 :]
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    token = ""
    for ch in text:
        if ch in ",){}":
            break
        token += ch
    rest = text[len(token) :]
    token = token.strip()
    if token == "I":
        return gm.unit(), rest
    if token == "top":
        if gm.kind != POWERSET:
            raise ParseError(f"'top' literal not valid for {gm.describe()}")
        return gm.grade(gm.atoms), rest
    if token == "bot":
        if gm.kind != POWERSET:
            raise ParseError(f"'bot' literal not valid for {gm.describe()}")
        return gm.unit(), rest
    if token.startswith("nat:"):
        if gm.kind != NAT:
            raise ParseError(f"'nat:' literal not valid for {gm.describe()}")
        try:
            return gm.grade(int(token[4:])), rest
        except ValueError:
            raise ParseError(f"malformed grade literal {token!r}") from None
    raise ParseError(f"malformed grade literal {token!r}")
