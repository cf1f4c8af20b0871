"""Command-line front end.

Exit status: 0 for success or a true answer, 1 for a false answer, 2 for
errors (bad input, unknown names, exceeded caps).
"""
import argparse
import os
import sys

from . import __version__
from .bisim import compute_layers, distinguishing_play, equiv, format_transcript
from .charform import Synthesizer
from .epistemic import a_classes, local_a_structure
from .errors import InqError
from .fo import (STATE, WORLD, StateId, fo_ef_equiv, fo_eval, parse_sexpr, standard_translate,
                 to_sexpr)
from .formula import parse, to_text
from .model import (InqModel, PointedModel, as_inq, drop_empty_state,
                    encode_relational)
from .modelfile import (HEADER, format_covering, format_model, read_covering, read_model,
                        to_dot)
from .semantics import Evaluator, check_signature
from .transforms import rich_cover, simplify, stratify, verify_covering
from .validate import validate


class CliError(Exception):
    pass


def _states(text):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise CliError(f"expected a state like {{w1,w2}}, got {text!r}")
    return [x for x in text[1:-1].replace(",", " ").split() if x]


def _point(model, text):
    """World name or ``{w1,w2}`` state."""
    if text.strip().startswith("{"):
        return PointedModel.state(model, _states(text))
    return PointedModel.world(model, text)


def _emit(text, out_path=None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _answer(flag: bool) -> int:
    print("true" if flag else "false")
    return 0 if flag else 1


def _load(path, allow_trivial=False):
    return read_model(path, allow_trivial)


# --- commands -----------------------------------------------------------------

def cmd_check(args):
    mf = _load(args.model, args.allow_trivial)
    M = as_inq(mf.model)
    phi = parse(args.formula, M.agents)
    check_signature(M, phi)
    ev = Evaluator(M)
    if args.state is not None:
        return _answer(ev.supports(M.state(_states(args.state)), phi))
    if args.at is not None:
        return _answer(ev.truth(M.world_index(args.at), phi))
    if mf.point is not None:
        if mf.point.kind == "world":
            return _answer(ev.truth(mf.point.point, phi))
        return _answer(ev.supports(mf.point.point, phi))
    for w, name in enumerate(M.worlds):
        print(f"{name}: {'true' if ev.truth(w, phi) else 'false'}")
    return 0


def cmd_bisim(args):
    M1 = as_inq(_load(args.model1).model)
    M2 = as_inq(_load(args.model2).model)
    P1, P2 = _point(M1, args.point1), _point(M2, args.point2)
    depth = "full" if args.depth == "full" else int(args.depth)
    ok = equiv(P1, P2, depth)
    label = "fully bisimilar" if depth == "full" else f"{depth}-bisimilar"
    print(HEADER)
    print(label if ok else f"not {label}")
    if args.layers:
        rel = compute_layers(M1, M2, "fixpoint" if depth == "full" else depth)
        for i, layer in enumerate(rel.layers):
            pairs = " ".join(f"{M1.worlds[w]}~{M2.worlds[v]}" for w, v in rel.pairs(i))
            print(f"layer {i}: {pairs}")
        if rel.stable:
            print("stable: yes")
    if not ok and not args.no_transcript:
        n = depth if depth != "full" else _separating_depth(M1, M2, P1, P2)
        tree = distinguishing_play(P1, P2, n)
        print(f"transcript ({n} round(s)):")
        for line in format_transcript(tree, M1, M2, "  "):
            print(line)
    return 0 if ok else 1


def _separating_depth(M1, M2, P1, P2):
    rel = compute_layers(M1, M2, "fixpoint")
    for i in range(len(rel.layers)):
        if P1.kind == "world" and not rel.related(i, P1.point, P2.point):
            return i
        if P1.kind == "state" and not rel.lifted(i, P1.point, P2.point):
            return i
    return rel.depth


def cmd_charform(args):
    M = as_inq(_load(args.model).model)
    S = Synthesizer(M, cap=args.cap, conjuncts=args.conjuncts)
    if args.world is not None:
        f = S.world(M.world_index(args.world), args.n)
    elif args.state is not None:
        f = S.state(M.state(_states(args.state)), args.n)
    else:
        a, w = args.sigma
        f = S.inqstate(M.Sigma(a, w), args.n)
    print(to_text(f))
    return 0


def cmd_translate(args):
    agents = args.agents.split(",") if args.agents else None
    phi = parse(args.formula, agents)
    print(to_sexpr(standard_translate(phi, args.mode)))
    return 0


def _assignment(struct, items):
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"assignment must look like var=value, got {item!r}")
        value = value.strip()
        if value.startswith("{"):
            out[name] = struct.state(_states(value))
        elif value.startswith("#"):
            out[name] = StateId(int(value[1:]))
        else:
            out[name] = value
    return out


def cmd_fo_eval(args):
    struct = _load(args.model).model
    if isinstance(struct, InqModel):
        struct = encode_relational(struct, args.encoding)
    if args.drop_empty:
        struct = drop_empty_state(struct)
    if args.inqml:
        psi = standard_translate(parse(args.formula, struct.agents), args.mode)
    else:
        psi = parse_sexpr(args.formula)
    return _answer(fo_eval(struct, psi, _assignment(struct, args.assign)))


def _elements(struct, text):
    if not text:
        return []
    out = []
    for item in text.split(","):
        item = item.strip()
        out.append(StateId(int(item[1:])) if item.startswith("#") else item)
    return out


def cmd_ef(args):
    A = _load(args.model1).model
    B = _load(args.model2).model
    A = encode_relational(A) if isinstance(A, InqModel) else A
    B = encode_relational(B) if isinstance(B, InqModel) else B
    if args.drop_empty:
        A, B = drop_empty_state(A), drop_empty_state(B)
    a, b = _elements(A, args.a), _elements(B, args.b)
    return _answer(fo_ef_equiv(A, a, B, b, args.q, cap=args.cap))


def cmd_encode(args):
    mf = _load(args.model)
    M = as_inq(mf.model)
    state = mf.point.point if mf.point is not None and mf.point.kind == "state" else None
    rel = encode_relational(M, args.mode, point=state, cap=args.cap)
    point = None
    if mf.point is not None:
        point = PointedModel(rel, mf.point.point, mf.point.kind)
    _emit(format_model(rel, point), args.output)
    return 0


def cmd_transform(args):
    mf = _load(args.model)
    if args.op == "rich-cover":
        c = rich_cover(mf.model, args.k)
        _emit(format_model(c.target), args.output)
        if args.covering:
            if not args.output:
                raise CliError("--covering needs --output for the target model")
            base = os.path.dirname(os.path.abspath(args.covering))
            text = format_covering(c, os.path.relpath(os.path.abspath(args.model), base),
                                   os.path.relpath(os.path.abspath(args.output), base))
            _emit(text, args.covering)
        return 0
    if args.op == "simplify":
        _emit(format_model(simplify(mf.model, args.granularity_value())), args.output)
        return 0
    point = args.at
    if point is None:
        if mf.point is None:
            raise CliError("stratify needs a point (--at or a 'point' line)")
        point = mf.point
    elif point.startswith("{"):
        point = ("state", _states(point))
    ell = "unbounded" if args.ell == "unbounded" else int(args.ell)
    rel, P = stratify(mf.model, point, ell, args.policy, budget=args.budget)
    _emit(format_model(rel, P), args.output)
    return 0


def cmd_verify_cover(args):
    rep = verify_covering(read_covering(args.covering))
    print(HEADER)
    print(rep)
    return 0 if rep.ok else 1


def _prop_args(args):
    out = {}
    if args.property == "stratified":
        out["ell"] = args.ell
        if args.at is None:
            raise CliError("stratified needs --at")
        out["point"] = ("state", _states(args.at)) if args.at.startswith("{") else ("world", args.at)
    elif args.property == "K-rich":
        out["K"] = args.K
    elif args.property == "N-acyclic":
        out["N"] = args.N
    elif args.property == "simple":
        out["granularity"] = args.granularity_value()
    return out


def cmd_validate(args):
    model = _load(args.model, args.allow_trivial).model
    rep = validate(model, args.property, **_prop_args(args))
    print(HEADER)
    print(rep)
    return 0 if rep.ok else 1


def cmd_epistemic(args):
    M = as_inq(_load(args.model).model)
    print(HEADER)
    agents = [args.agent] if args.agent else list(M.agents)
    if args.sub == "classes":
        for a in agents:
            for c in a_classes(M, a):
                print(f"{a}: {M.format_state(c)}")
        return 0
    if args.sub == "local":
        if args.at is None:
            raise CliError("local needs --at")
        for a in agents:
            L = local_a_structure(M, a, args.at, args.granularity_value())
            print(f"agent {a}, class {M.format_state(L.carrier)}")
            print("  colours: " + " ".join(f"{M.worlds[v]}:{c}" for v, c in sorted(L.colouring.items())))
            for m in L.inqstate.maximal:
                cols = ",".join(str(c) for c in sorted(L.colours(m)))
                print(f"  maximal {M.format_state(m)} colours {{{cols}}}")
        return 0
    prop, kw = {
        "check-rich": ("K-rich", {"K": args.K}),
        "check-simple": ("simple", {"granularity": args.granularity_value()}),
        "check-acyclic": ("N-acyclic", {"N": args.N}),
    }[args.sub]
    rep = validate(M, prop, **kw)
    print(rep)
    return 0 if rep.ok else 1


def cmd_export_dot(args):
    M = as_inq(_load(args.model).model)
    _emit(to_dot(M, args.agent), args.output)
    return 0


# --- parser -------------------------------------------------------------------

def _granularity(ns):
    g = getattr(ns, "granularity", "full")
    return "full" if g == "full" else int(g)


def build_parser():
    p = argparse.ArgumentParser(prog="inqkit", description="Inquisitive modal model toolkit.")
    p.add_argument("--version", action="version", version=f"inqkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="truth or support of a formula")
    c.add_argument("model")
    c.add_argument("formula")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--at", help="world to evaluate at")
    g.add_argument("--state", help="state {w1,w2} to evaluate support in")
    c.add_argument("--allow-trivial", action="store_true")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("bisim", help="n-bisimilarity of two pointed models")
    c.add_argument("model1")
    c.add_argument("point1")
    c.add_argument("model2")
    c.add_argument("point2")
    c.add_argument("--depth", default="full")
    c.add_argument("--layers", action="store_true", help="print every layer")
    c.add_argument("--no-transcript", action="store_true")
    c.set_defaults(func=cmd_bisim)

    c = sub.add_parser("charform", help="characteristic formula")
    c.add_argument("model")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--world")
    g.add_argument("--state")
    g.add_argument("--sigma", nargs=2, metavar=("AGENT", "WORLD"))
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--cap", type=int, default=3)
    c.add_argument("--conjuncts", default="all", choices=("all", "maximal", "literal"))
    c.set_defaults(func=cmd_charform)

    c = sub.add_parser("translate", help="standard translation to first-order logic")
    c.add_argument("formula")
    c.add_argument("--mode", default=WORLD, choices=(WORLD, STATE))
    c.add_argument("--agents", help="comma-separated agent list")
    c.set_defaults(func=cmd_translate)

    c = sub.add_parser("fo-eval", help="evaluate a first-order formula")
    c.add_argument("model")
    c.add_argument("formula")
    c.add_argument("--assign", action="append", help="var=world, var={w1,w2} or var=#id")
    c.add_argument("--inqml", action="store_true", help="formula is InqML; translate it first")
    c.add_argument("--mode", default=WORLD, choices=(WORLD, STATE))
    c.add_argument("--encoding", default="locally-full", choices=("minimal", "locally-full", "full"))
    c.add_argument("--drop-empty", action="store_true")
    c.set_defaults(func=cmd_fo_eval)

    c = sub.add_parser("ef", help="Ehrenfeucht-Fraisse game on two structures")
    c.add_argument("model1")
    c.add_argument("model2")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--a", default="", help="comma-separated elements (worlds, #state-id)")
    c.add_argument("--b", default="")
    c.add_argument("--drop-empty", action="store_true")
    c.add_argument("--cap", type=int, default=40)
    c.set_defaults(func=cmd_ef)

    c = sub.add_parser("encode", help="relational encoding")
    c.add_argument("model")
    c.add_argument("--mode", default="minimal", choices=("minimal", "locally-full", "full"))
    c.add_argument("--cap", type=int, default=16)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_encode)

    c = sub.add_parser("transform", help="stratify, rich-cover or simplify")
    c.add_argument("model")
    c.add_argument("--op", required=True, choices=("stratify", "rich-cover", "simplify"))
    c.add_argument("--k", type=int, default=2)
    c.add_argument("--ell", default="2")
    c.add_argument("--policy", default="minimal", choices=("minimal", "locally-full"))
    c.add_argument("--budget", type=int)
    c.add_argument("--at")
    c.add_argument("--granularity", default="full")
    c.add_argument("--covering", help="also write a covering file (rich-cover)")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_transform)

    c = sub.add_parser("verify-cover", help="check a covering file")
    c.add_argument("covering")
    c.set_defaults(func=cmd_verify_cover)

    c = sub.add_parser("validate", help="check a structural property")
    c.add_argument("model")
    c.add_argument("property", choices=("relational-valid", "downward-closed", "s5", "stratified",
                                        "K-rich", "simple", "N-acyclic"))
    c.add_argument("--ell", type=int, default=2)
    c.add_argument("--at")
    c.add_argument("--K", type=int, default=2)
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--granularity", default="full")
    c.add_argument("--allow-trivial", action="store_true")
    c.set_defaults(func=cmd_validate)

    c = sub.add_parser("epistemic", help="S5 views of a model")
    c.add_argument("sub", choices=("classes", "local", "check-rich", "check-simple", "check-acyclic"))
    c.add_argument("model")
    c.add_argument("--agent")
    c.add_argument("--at")
    c.add_argument("--granularity", default="full")
    c.add_argument("--K", type=int, default=2)
    c.add_argument("--N", type=int, default=2)
    c.set_defaults(func=cmd_epistemic)

    c = sub.add_parser("export-dot", help="Graphviz rendering")
    c.add_argument("model")
    c.add_argument("--agent")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_export_dot)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.granularity_value = lambda: _granularity(args)
    try:
        return args.func(args)
    except (InqError, CliError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2 already
        return exc.code if isinstance(exc.code, int) else 2
