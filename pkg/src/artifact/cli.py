"""Command-line entry point: every computation on serialized inputs.

Exit status: 0 success, 1 validation or mathematical-check failure, 2 I/O or parse error.
"""

import argparse
import os
import sys

from .chain import ChainComplex, ChainMap, homology_dims, is_quasi_iso, is_surjective_map
from .coalg import DGCoalgebra, FIXTURES, fixture, validate_coalgebra, UnknownFixture
from .simplicial import SimplicialModule, simplicial_identity_defects, gamma
from .comod import (
    Comodule, SComodule, trivial_comodule, coalgebra_as_comodule, cofree, cotensor,
    gamma_comodule, n_comodule, counit_map, validate_comodule, ComoduleError,
)
from .postnikov import PostnikovTower, build_tower, build_stower, verify_tower, TowerError
from .derived import CotorTable, cotor_table, tables_agree
from .chain import sphere, ChainError
from .exactla import LinAlgError
from .codec import (
    decode, encode, encode_many, CodecError, ParseError, ValidationError,
)

MAX_DEGREE_ENV = "ARTIFACT_MAX_DEGREE"


class CheckFailed(Exception):
    pass


def default_max_degree():
    v = os.environ.get(MAX_DEGREE_ENV)
    if v is None:
        return 6
    try:
        return int(v)
    except ValueError:
        raise ParseError(f"{MAX_DEGREE_ENV}={v!r} is not an integer", "environment")


# ---- input and output ----

def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(path, coalgebra=None, kinds=None):
    obj = decode(_read(path), coalgebra)
    if kinds and not isinstance(obj, kinds):
        raise ParseError(f"{path}: expected {'/'.join(k.__name__ for k in kinds)}, "
                         f"got {type(obj).__name__}")
    return obj


def _load_coalgebra(path):
    return _load(path, kinds=(DGCoalgebra,)) if path else None


def _load_comodule(path, C):
    X = _load(path, C, kinds=(Comodule, SComodule, tuple))
    if isinstance(X, tuple):
        raise ParseError(f"{path}: expected a single comodule")
    return X


def _base(X):
    return X.coalgebra.base if isinstance(X, SComodule) else X.coalgebra


def _load_pair(px, py, pc):
    C = _load_coalgebra(pc)
    X = _load_comodule(px, C)
    Y = _load_comodule(py, C or _base(X))
    return X, Y


# ---- text rendering ----

def _dims_line(X):
    return " ".join(f"{n}:{X.dim(n)}" for n in X.degrees if X.dim(n))


def _text_table(t):
    head = f"# {t.method} {t.coalgebra} ({', '.join(map(str, t.inputs))})"
    lines = [head]
    if isinstance(t.dims, tuple):
        lines.append("degree\t" + "\t".join(f"factor{k}" for k in range(len(t.dims))))
        for n in t.degrees:
            lines.append(f"{n}\t" + "\t".join(str(d[n]) for d in t.dims))
    else:
        lines.append("degree\tdim")
        lines.extend(f"{n}\t{t.dims[n]}" for n in t.degrees)
    return "\n".join(lines) + "\n"


def _text(x):
    if isinstance(x, list):
        return "".join(_text(y) for y in x)
    if isinstance(x, tuple):
        return "".join(f"## factor {k}\n" + _text(y) for k, y in enumerate(x))
    if isinstance(x, CotorTable):
        return _text_table(x)
    if isinstance(x, ChainComplex):
        return f"complex {x.field.name} support {x.lo}..{x.hi} dims {_dims_line(x)}\n"
    if isinstance(x, ChainMap):
        return (f"map {x.field.name}\nsource dims {_dims_line(x.source)}\n"
                f"target dims {_dims_line(x.target)}\n")
    if isinstance(x, SimplicialModule):
        return f"simplicial {x.field.name} level_bound {x.level_bound} normal {_dims_line(x.normal)}\n"
    if isinstance(x, DGCoalgebra):
        return f"coalgebra {x.name or '?'} {x.field.name} dims {_dims_line(x.carrier)}\n"
    if isinstance(x, SComodule):
        return (f"comodule simplicial {x.name or '?'} over {x.base.name or '?'} "
                f"normal dims {_dims_line(x.normal)}\n")
    if isinstance(x, Comodule):
        return (f"comodule dg {x.name or '?'} over {x.coalgebra.name or '?'} "
                f"dims {_dims_line(x.carrier)}\n")
    if isinstance(x, PostnikovTower):
        lines = [f"tower {x.world} n_max {x.n_max}", "stage\tV\tdims"]
        for s in x.stages:
            lines.append(f"{s.index}\t{s.V}\t{_dims_line(s.carrier)}")
        return "\n".join(lines) + "\n"
    return f"{x!r}\n"


def _emit(args, obj):
    if args.format == "json":
        text = encode_many(obj) if isinstance(obj, list) else encode(obj)
    else:
        text = _text(obj)
    _write(args.output, text)


def _note(msg):
    print(msg, file=sys.stderr)


# ---- verbs ----

def _report_ok(rep):
    return all(v for k, v in rep.items() if isinstance(v, bool))


def _tower_shape(t):
    """Checks readable off a tower document: j_{n-1} = p_n ∘ j_n and p_n onto in degrees > 0."""
    compatible, onto = True, True
    for prev, cur in zip(t.stages, t.stages[1:]):
        if cur.to_prev is None or cur.j is None or prev.j is None:
            continue
        compatible = compatible and (cur.to_prev @ cur.j).levels == prev.j.levels
        pos = [n for n in prev.carrier.degrees if n > 0]
        onto = onto and is_surjective_map(cur.to_prev, pos)
    return {"compatible": compatible, "surjective": onto}


def cmd_validate(args):
    obj = _load(args.file, _load_coalgebra(args.coalgebra))
    items = obj if isinstance(obj, list) else [obj]
    ok = True
    for x in items:
        for y in (x if isinstance(x, tuple) else (x,)):
            if isinstance(y, DGCoalgebra):
                rep = validate_coalgebra(y)
                good = all(rep[k] for k in ("chain_maps", "coassociative", "counital"))
            elif isinstance(y, (Comodule, SComodule)):
                rep = validate_comodule(y)
                good = _report_ok(rep)
            elif isinstance(y, SimplicialModule):
                top = min(y.level_bound, 6)
                bad = simplicial_identity_defects(y, top)
                rep, good = {"simplicial_identities": not bad}, not bad
            elif isinstance(y, PostnikovTower):
                rep = _tower_shape(y)
                good = all(rep.values())
            else:
                rep, good = {"decodes": True}, True
            ok = ok and good
            _note(" ".join(f"{k}={v}" for k, v in rep.items() if isinstance(v, bool)) or "ok")
    _emit(args, obj)
    return 0 if ok else 1


def cmd_homology(args):
    X = _load(args.file, kinds=(ChainComplex, SimplicialModule, Comodule, SComodule, DGCoalgebra))
    what = "complex"
    if isinstance(X, (SimplicialModule, SComodule)):
        X, what = X.normal, "normalized"
    elif isinstance(X, (Comodule, DGCoalgebra)):
        X, what = X.carrier, "carrier"
    if args.degree is not None and not X.degrees.start <= args.degree < X.degrees.stop:
        X = X.with_window(min(X.lo, args.degree), max(X.hi, args.degree))
    degs = [args.degree] if args.degree is not None else list(X.degrees)
    hd = X.field.is_product

    def dims(Y):
        return homology_dims(Y, degs)
    d = tuple(dims(X.factor(k)) for k in range(len(X.field.factors))) if hd else dims(X)
    t = CotorTable("", (what,), max(degs), d, "homology", min(degs))
    _emit(args, t)
    return 0


def cmd_tower(args):
    C = _load_coalgebra(args.coalgebra)
    X = _load_comodule(args.file, C)
    if isinstance(X, SComodule):
        t = build_stower(X, args.stages)
    else:
        t = build_tower(X, args.stages)
    reps = [verify_tower(s) for s in (t if isinstance(t, tuple) else (t,))]
    ok = all(r["ok"] for r in reps)
    for r in reps:
        for f in r["failures"]:
            _note(f"failure: {f}")
    _note(f"verify_tower ok={ok}")
    _emit(args, t)
    return 0 if ok else 1


def cmd_cotensor(args):
    X, Y = _load_pair(args.x, args.y, args.coalgebra)
    T = cotensor(X, Y)
    out = tuple(t.comodule for t in T) if isinstance(T, tuple) else T.comodule
    _emit(args, out)
    return 0


def cmd_cotor(args):
    X, Y = _load_pair(args.x, args.y, args.coalgebra)
    D = args.max_degree
    if args.method == "both":
        a = cotor_table(X, Y, D, "postnikov", args.sides)
        b = cotor_table(X, Y, D, "cobar")
        _emit(args, [a, b])
        if not tables_agree(a, b):
            _note("cotor: postnikov and cobar tables disagree")
            return 1
        return 0
    _emit(args, cotor_table(X, Y, D, args.method, args.sides))
    return 0


def cmd_doldkan(args):
    C = _load_coalgebra(args.coalgebra)
    if args.direction == "gamma":
        X = _load(args.file, C, kinds=(Comodule, ChainComplex, tuple))
        if isinstance(X, ChainComplex):
            _emit(args, gamma(X, args.level_bound))
            return 0
        if isinstance(X, tuple):
            raise ParseError(f"{args.file}: Γ of comodules needs a single field")
        _emit(args, gamma_comodule(X, args.level_bound))
        return 0
    X = _load(args.file, C, kinds=(SComodule, SimplicialModule))
    if isinstance(X, SimplicialModule):
        _emit(args, X.normal)
        return 0
    _emit(args, n_comodule(X).comodule)
    return 0


def cmd_counit_check(args):
    C = _load_coalgebra(args.coalgebra)
    X = _load_comodule(args.file, C)
    D = args.max_degree
    if isinstance(X, Comodule):
        if X.field.is_product:
            raise ParseError("counit-check needs a single field")
        N = D + 2
        t = build_tower(X, N)
        Xs = build_stower(gamma_comodule(X), N, seed=t, bound=D + 1).stages[-1].comodule
    else:
        Xs = X
    G, u = counit_map(Xs, top=D + 1)
    degs = range(0, D + 1)
    v = is_quasi_iso(u.map, degrees=degs)
    comod = u.is_comodule_map(top=D)
    for n, r in v.report.items():
        if not r["iso"]:
            _note(f"degree {n}: {r}")
    _note(f"counit quasi-iso through degree {D}: {v.ok}; comodule map: {comod}")
    src = homology_dims(u.map.source, degs)
    tgt = homology_dims(u.map.target, degs)
    _emit(args, [CotorTable(_base(Xs).name or "?", ("counit source",), D, src, "counit-check"),
                 CotorTable(_base(Xs).name or "?", ("counit target",), D, tgt, "counit-check")])
    return 0 if v.ok and comod else 1


def cmd_demo(args):
    try:
        C = fixture(args.fixture, args.field)
    except UnknownFixture:
        raise ParseError(f"unknown fixture {args.fixture!r}; choose from {', '.join(FIXTURES)}")
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        k = trivial_comodule(C)
        k.name = "k"
        docs = {"coalgebra": C, "k": k, "C": coalgebra_as_comodule(C),
                "cofree": cofree(sphere(C.field, 1, 2), C)}
        for name, obj in docs.items():
            path = os.path.join(args.out_dir, f"{name}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(encode(obj))
            _note(f"wrote {path}")
        return 0
    what = {"coalgebra": lambda: C, "k": lambda: trivial_comodule(C),
            "C": lambda: coalgebra_as_comodule(C),
            "cofree": lambda: cofree(sphere(C.field, 1, 2), C)}[args.what]
    _emit(args, what())
    return 0


# ---- parser ----

def build_parser():
    p = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("-o", "--output", default="-", help="output path, - for stdout")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("validate", parents=[common], help="run the owning validator")
    s.add_argument("file")
    s.add_argument("--coalgebra")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("homology", parents=[common], help="homology dimension table")
    s.add_argument("file")
    s.add_argument("--degree", type=int)
    s.set_defaults(run=cmd_homology)

    s = sub.add_parser("tower", parents=[common], help="build and verify a Postnikov tower")
    s.add_argument("file")
    s.add_argument("--coalgebra")
    s.add_argument("--stages", type=int, required=True)
    s.set_defaults(run=cmd_tower)

    s = sub.add_parser("cotensor", parents=[common], help="underived cotensor product")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--coalgebra")
    s.set_defaults(run=cmd_cotensor)

    s = sub.add_parser("cotor", parents=[common], help="Cotor table")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--coalgebra")
    s.add_argument("--max-degree", type=int)
    s.add_argument("--method", choices=("postnikov", "cobar", "both"), default="postnikov")
    s.add_argument("--sides", type=int, choices=(1, 2), default=2)
    s.set_defaults(run=cmd_cotor)

    s = sub.add_parser("doldkan", parents=[common], help="apply Γ or N^C")
    s.add_argument("direction", choices=("gamma", "n"))
    s.add_argument("file")
    s.add_argument("--coalgebra")
    s.add_argument("--level-bound", type=int, default=8)
    s.set_defaults(run=cmd_doldkan)

    s = sub.add_parser("counit-check", parents=[common], help="counit quasi-isomorphism verdict")
    s.add_argument("file")
    s.add_argument("--coalgebra")
    s.add_argument("--max-degree", type=int)
    s.set_defaults(run=cmd_counit_check)

    s = sub.add_parser("demo", parents=[common], help="emit fixture documents")
    s.add_argument("fixture")
    s.add_argument("--field", default="F2")
    s.add_argument("--what", choices=("coalgebra", "k", "C", "cofree"), default="coalgebra")
    s.add_argument("--out-dir", help="write coalgebra.json, k.json, C.json, cofree.json here")
    s.set_defaults(run=cmd_demo)
    return p


def _check_options(args):
    for opt in ("max_degree", "stages", "degree", "level_bound"):
        v = getattr(args, opt, None)
        if opt == "max_degree" and hasattr(args, opt) and v is None:
            args.max_degree = v = default_max_degree()
        if v is not None and opt != "degree" and v < 0:
            raise ParseError(f"--{opt.replace('_', '-')} must be non-negative", "arguments")
    if getattr(args, "stages", None) is not None and args.stages < 1:
        raise ParseError("--stages must be at least 1", "arguments")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        _check_options(args)
        return args.run(args)
    except (ParseError, OSError, UnicodeDecodeError) as e:
        _note(f"error: {e}")
        return 2
    except (ValidationError, CheckFailed) as e:
        _note(f"invalid: {e}")
        return 1
    except (ComoduleError, TowerError, ChainError, LinAlgError, CodecError) as e:
        _note(f"check failed: {type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
