"""Command-line entry points.

Reports are plain text, one fact per line, with a stable ordering so runs
are byte-identical.  Exit status: 0 success or empty report, 1 check
failures or Unknown entailment, 2 usage, parse, or semantic errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from .combine import (
    coequalize,
    extend_theory,
    lfold_state_counts,
    sum_theories,
    tensor_theories,
)
from .dsl import (
    parse_model,
    parse_monoid,
    parse_morphism_file,
    parse_term,
    parse_theory,
    print_theory,
)
from .errors import GradealgError, ParseError, ResourceLimitError
from .freemodel import check_monad_laws, free_model, induced_monad
from .grade import grade_key, left_embedding, lift_map, parse_grade, right_embedding
from .lawvere import check_lawvere, roundtrip_check, th_of, theory_morphism
from .logic import PROVED, entails, reachable_grades
from .models import check_model
from .terms import context_vars, infer_grade


def load_theory(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_theory(text, name=name)


def _support(theory, depth, extra=()):
    """Full enumeration for finite monoids, tensor-reachable slice otherwise."""
    if theory.monoid.is_finite():
        out = set(theory.monoid.elements()) | set(extra)
        return sorted(out, key=grade_key)
    return sorted(set(reachable_grades(theory, depth, extra)), key=grade_key)


def _emit(lines):
    for line in lines:
        print(line)


def _monoid_from_text(text: str):
    return parse_monoid(text)


def cmd_check(args) -> int:
    theory = load_theory(args.theory)
    lines = [
        f"theory ok: {len(theory.signature.ops)} operations, "
        f"{len(theory.axioms)} axioms"
    ]
    status = 0
    if args.model:
        with open(args.model, "r", encoding="utf-8") as fh:
            model = parse_model(fh.read(), theory, name=os.path.basename(args.model))
        report = check_model(model)
        if report:
            lines.append("model check failed:")
            lines.extend(f"  {r}" for r in report)
            status = 1
        else:
            lines.append(f"model ok: {model.name}")
    _emit(lines)
    return status


def cmd_grade(args) -> int:
    theory = load_theory(args.theory)
    t = parse_term(args.expr, theory.signature)
    print(infer_grade(theory.signature, t))
    return 0


def cmd_entail(args) -> int:
    theory = load_theory(args.theory)
    lhs = parse_term(args.lhs, theory.signature)
    rhs = parse_term(args.rhs, theory.signature)
    verdict = entails(theory, lhs, rhs, args.depth, cap=args.cap)
    print(verdict)
    return 0 if verdict == PROVED else 1


def cmd_free(args) -> int:
    theory = load_theory(args.theory)
    gm = theory.monoid
    grade = parse_grade(args.grade, gm)
    support = _support(theory, args.depth, (grade,))
    fm = free_model(theory, context_vars(args.vars), support, args.depth, cap=args.cap)
    reps = fm.classes(grade)
    lines = [f"class {rep}" for rep in reps]
    lines.append(f"classes {len(reps)}")
    _emit(lines)
    if args.figures:
        from .figures import bar_chart, figure_path

        labels = [str(m) for m in fm.support]
        counts = [fm.size(m) for m in fm.support]
        bar_chart(
            figure_path(args.figures, "free-classes.png"),
            labels, counts,
            f"free-model classes over {args.vars} generators",
        )
    return 0


def cmd_laws(args) -> int:
    theory = load_theory(args.theory)
    support = _support(theory, args.depth)
    monad = induced_monad(theory, support, args.depth, cap=args.cap)
    sets = [context_vars(n) for n in args.vars]
    report = check_monad_laws(monad, sets, trials=args.trials)
    if report:
        _emit(report)
        print(f"laws failed: {len(report)}")
        return 1
    print(f"monad laws ok: {len(sets)} generator sets, grades {len(support)}")
    if args.figures:
        from .figures import bar_chart, figure_path

        labels = [str(m) for m in support]
        counts = [len(monad.apply(m, sets[-1])) for m in support]
        bar_chart(
            figure_path(args.figures, "monad-classes.png"),
            labels, counts, "classes per grade (largest generator set)",
        )
    return 0


def cmd_lawvere(args) -> int:
    theory = load_theory(args.theory)
    support = _support(theory, args.depth)
    L = th_of(theory, args.arity_bound, support, args.depth)
    print(f"cells {len(L.homs)}")
    rep1 = check_lawvere(L)
    rep2 = roundtrip_check(L)
    status = 0
    if rep1:
        _emit(rep1)
        print(f"check_lawvere failed: {len(rep1)}")
        status = 1
    else:
        print("check_lawvere ok")
    if rep2:
        _emit(rep2)
        print(f"roundtrip failed: {len(rep2)}")
        status = 1
    else:
        print("roundtrip ok")
    if args.figures:
        from .figures import figure_path, grid_chart

        for m in L.support:
            rows = list(range(args.arity_bound + 1))
            values = [
                [len(L.hom(n, n2, m)) for n2 in rows] for n in rows
            ]
            safe = str(m).replace("{", "").replace("}", "").replace(",", "-")
            grid_chart(
                figure_path(args.figures, f"hom-sizes-{safe or 'unit'}.png"),
                rows, rows, values, f"hom sizes at grade {m}",
            )
    return status


def _write_theory(theory, out: str | None) -> None:
    text = print_theory(theory)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sum(args) -> int:
    t1, t2 = load_theory(args.left), load_theory(args.right)
    _write_theory(sum_theories(t1, t2), args.output)
    return 0


def cmd_tensor(args) -> int:
    t1, t2 = load_theory(args.left), load_theory(args.right)
    _write_theory(tensor_theories(t1, t2), args.output)
    return 0


def cmd_extend(args) -> int:
    theory = load_theory(args.theory)
    modes = [m for m in (args.lift_to, args.pad_left, args.pad_right) if m]
    if len(modes) != 1:
        raise ParseError("pass exactly one of --lift-to, --pad-left, --pad-right")
    if args.lift_to:
        target = _monoid_from_text(args.lift_to)
        gmap = lift_map(target)
    elif args.pad_left:
        other = _monoid_from_text(args.pad_left)
        gmap = left_embedding(theory.monoid, other)
    else:
        other = _monoid_from_text(args.pad_right)
        gmap = right_embedding(other, theory.monoid)
    _write_theory(extend_theory(gmap, theory), args.output)
    return 0


def _load_morphism(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        desc = parse_morphism_file(fh.read())
    base = os.path.dirname(os.path.abspath(path))
    source = load_theory(os.path.join(base, desc["source"]))
    target = load_theory(os.path.join(base, desc["target"]))
    mapping = {
        op: parse_term(text, target.signature) for op, text in desc["map"].items()
    }
    return theory_morphism(source, target, mapping), desc


def cmd_coeq(args) -> int:
    alpha, da = _load_morphism(args.alpha)
    beta, db = _load_morphism(args.beta)
    if da["source"] != db["source"] or da["target"] != db["target"]:
        raise ParseError("the two morphisms must share source and target")
    _write_theory(coequalize(alpha, beta), args.output)
    return 0


def cmd_oracle_state(args) -> int:
    locations = tuple(str(i + 1) for i in range(args.locations))
    values = tuple(range(args.values))
    results = tuple(f"x{i}" for i in range(args.results))
    counts = lfold_state_counts(locations, values, results, cap=args.cap)
    lines = []
    for combo in sorted(counts, key=lambda c: (len(c), c)):
        label = "{" + ",".join(combo) + "}"
        lines.append(f"oracle {label} {counts[combo]}")
    _emit(lines)
    if args.figures:
        from .figures import bar_chart, figure_path

        labels = ["{" + ",".join(c) + "}" for c in sorted(counts, key=lambda c: (len(c), c))]
        values_ = [counts[c] for c in sorted(counts, key=lambda c: (len(c), c))]
        bar_chart(
            figure_path(args.figures, "oracle-state.png"),
            labels, values_, "factored state functions per touched set",
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gradealg",
        description="Symbolic engine for graded algebraic theories.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, depth=3):
        sp.add_argument("--depth", type=int, default=depth,
                        help="closure/enumeration depth bound")
        sp.add_argument("--cap", type=int, default=200_000,
                        help="universe size cap")

    sp = sub.add_parser("check", help="well-formedness and model checks")
    sp.add_argument("theory")
    sp.add_argument("--model", help="model description file")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("grade", help="infer a term's grade")
    sp.add_argument("theory")
    sp.add_argument("-e", "--expr", required=True)
    sp.set_defaults(fn=cmd_grade)

    sp = sub.add_parser("entail", help="oracle entailment")
    sp.add_argument("theory")
    sp.add_argument("-l", "--lhs", required=True)
    sp.add_argument("-r", "--rhs", required=True)
    common(sp)
    sp.set_defaults(fn=cmd_entail)

    sp = sub.add_parser("free", help="enumerate free-model classes")
    sp.add_argument("theory")
    sp.add_argument("--grade", required=True)
    sp.add_argument("--vars", type=int, default=1)
    sp.add_argument("--figures")
    common(sp)
    sp.set_defaults(fn=cmd_free)

    sp = sub.add_parser("laws", help="graded-monad law suite")
    sp.add_argument("theory")
    sp.add_argument("--vars", type=int, nargs="+", default=[1])
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--figures")
    common(sp, depth=2)
    sp.set_defaults(fn=cmd_laws)

    sp = sub.add_parser("lawvere", help="build and check Lawvere data")
    sp.add_argument("theory")
    sp.add_argument("--arity-bound", type=int, default=2)
    sp.add_argument("--figures")
    common(sp, depth=2)
    sp.set_defaults(fn=cmd_lawvere)

    sp = sub.add_parser("sum", help="emit the sum of two theories")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_sum)

    sp = sub.add_parser("tensor", help="emit the tensor product")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_tensor)

    sp = sub.add_parser("extend", help="regrade along a lax monoidal map")
    sp.add_argument("theory")
    sp.add_argument("--lift-to", help="monoid declaration, e.g. 'powerset {*}'")
    sp.add_argument("--pad-left", help="right factor monoid for a left embedding")
    sp.add_argument("--pad-right", help="left factor monoid for a right embedding")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_extend)

    sp = sub.add_parser("coeq", help="coequalizer of two morphism files")
    sp.add_argument("alpha")
    sp.add_argument("beta")
    sp.add_argument("-o", "--output")
    sp.set_defaults(fn=cmd_coeq)

    sp = sub.add_parser("oracle-state", help="factored state-function counts")
    sp.add_argument("--locations", type=int, default=2)
    sp.add_argument("--values", type=int, default=2)
    sp.add_argument("--results", type=int, default=1)
    sp.add_argument("--cap", type=int, default=2_000_000)
    sp.add_argument("--figures")
    sp.set_defaults(fn=cmd_oracle_state)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GradealgError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
