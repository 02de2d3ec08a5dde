"""JSON documents for every domain object; decode(encode(x)) == x exactly."""

import json

from .exactla import Mat, FieldSpec, field as make_field, ShapeMismatch, FieldMismatch
from .chain import ChainComplex, ChainMap, NotAComplex, NotAChainMap, tensor, unit_complex
from .coalg import DGCoalgebra, validate_coalgebra, is_valid_coalgebra
from .simplicial import SimplicialModule, KeyedMap, flat, DEFAULT_LEVEL_BOUND, NegativeSupport
from .comod import Comodule, SComodule, validate_comodule, is_valid_comodule, gamma_of
from .postnikov import PostnikovTower, Stage
from .derived import CotorTable

VERSION = 1
KINDS = ("field", "complex", "map", "simplicial", "coalgebra", "comodule", "tower", "table")


class CodecError(Exception):
    pass


class ParseError(CodecError):
    def __init__(self, msg, location="$"):
        super().__init__(f"{location}: {msg}")
        self.location = location


class ValidationError(CodecError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


# ---- scalars and matrices ----

def _enc_scalar(F, x):
    """x is a per-factor tuple."""
    vals = [_enc_base(f, v) for f, v in zip(F.factors, x)]
    return vals if F.is_product else vals[0]


def _enc_base(f, v):
    if f.name == "Q":
        return f.fmt(v)
    return int(v)


def _dec_scalar(F, s, loc):
    try:
        if F.is_product:
            if not isinstance(s, list) or len(s) != len(F.factors):
                raise ValueError(f"expected {len(F.factors)} entries")
            return tuple(f.parse(v) for f, v in zip(F.factors, s))
        return (F.factors[0].parse(s),)
    except (ValueError, TypeError) as e:
        raise ParseError(f"bad scalar {s!r}: {e}", loc)


def _enc_mat(m):
    return [[_enc_scalar(m.field, x) for x in row] for row in m.to_rows()]


def _dec_mat(F, rows, shape, loc):
    r, c = shape
    if not isinstance(rows, list) or len(rows) != r:
        raise ParseError(f"expected {r} rows", loc)
    ent = {}
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != c:
            raise ParseError(f"expected {c} columns", f"{loc}[{i}]")
        for j, s in enumerate(row):
            v = _dec_scalar(F, s, f"{loc}[{i}][{j}]")
            if any(v):
                ent[(i, j)] = v
    blocks = []
    for k in range(len(F.factors)):
        rowsk = [{} for _ in range(r)]
        for (i, j), v in ent.items():
            if v[k]:
                rowsk[i][j] = v[k]
        blocks.append(rowsk)
    return Mat(F, r, c, blocks)


# ---- payloads ----

def _enc_complex(X):
    return {"field": X.field.name, "support": [X.lo, X.hi],
            "dims": {str(n): X.dim(n) for n in X.degrees},
            "d": {str(n): _enc_mat(X.d(n)) for n in range(X.lo + 1, X.hi + 1)
                  if X.dim(n) and X.dim(n - 1)}}


def _get(p, key, loc, typ=None):
    if not isinstance(p, dict) or key not in p:
        raise ParseError(f"missing {key!r}", loc)
    v = p[key]
    if typ is not None and (not isinstance(v, typ) or (typ is int and isinstance(v, bool))):
        raise ParseError(f"{key!r} has wrong type", f"{loc}.{key}")
    return v


def _int_keys(d, loc):
    if not isinstance(d, dict):
        raise ParseError("expected an object keyed by degree", loc)
    out = {}
    for k, v in d.items():
        try:
            out[int(k)] = v
        except ValueError:
            raise ParseError(f"degree key {k!r} is not an integer", loc)
    return out


def _dec_field(name, loc):
    try:
        return make_field(name)
    except (ValueError, AttributeError) as e:
        raise ParseError(f"bad field {name!r}: {e}", loc)


def _dec_complex(p, loc, F=None):
    Fp = _dec_field(_get(p, "field", loc, str), f"{loc}.field")
    if F is not None and Fp != F:
        raise ParseError(f"field {Fp.name} differs from {F.name}", f"{loc}.field")
    sup = _get(p, "support", loc, list)
    if len(sup) != 2 or not all(isinstance(x, int) and not isinstance(x, bool) for x in sup):
        raise ParseError("support must be [lo, hi]", f"{loc}.support")
    lo, hi = sup
    if lo > hi:
        raise ParseError("empty support", f"{loc}.support")
    dims = _int_keys(_get(p, "dims", loc), f"{loc}.dims")
    for n, v in dims.items():
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise ParseError("dimension must be a non-negative integer", f"{loc}.dims.{n}")
        if v and not lo <= n <= hi:
            raise ParseError("dimension outside support", f"{loc}.dims.{n}")
    dd = _int_keys(p.get("d", {}), f"{loc}.d")
    d = {}
    for n, rows in dd.items():
        if not lo < n <= hi:
            raise ParseError("differential outside support", f"{loc}.d.{n}")
        d[n] = _dec_mat(Fp, rows, (dims.get(n - 1, 0), dims.get(n, 0)), f"{loc}.d.{n}")
    try:
        return ChainComplex(Fp, (lo, hi), dims, d)
    except NotAComplex as e:
        raise ValidationError(f"{loc}: d∘d ≠ 0 at degree {e.degree}")


def _enc_levels(f):
    return {str(n): _enc_mat(f.level(n)) for n in f.degrees
            if f.source.dim(n) and f.target.dim(n)}


def _dec_levels(p, source, target, loc, check=True):
    lv = _int_keys(_get(p, "levels", loc), f"{loc}.levels")
    levels = {}
    for n, rows in lv.items():
        levels[n] = _dec_mat(source.field, rows, (target.dim(n), source.dim(n)),
                             f"{loc}.levels.{n}")
    try:
        return ChainMap(source, target, levels, check=check)
    except NotAChainMap as e:
        raise ValidationError(f"{loc}: not a chain map at degree {e.degree}")


def _enc_map(f):
    return {"source": _enc_complex(f.source), "target": _enc_complex(f.target),
            "levels": _enc_levels(f)}


def _dec_map(p, loc):
    S = _dec_complex(_get(p, "source", loc), f"{loc}.source")
    T = _dec_complex(_get(p, "target", loc), f"{loc}.target", S.field)
    return _dec_levels(p, S, T, loc)


def _enc_coalgebra(C):
    return {"name": C.name, "carrier": _enc_complex(C.carrier),
            "delta": {"levels": _enc_levels(C.delta)},
            "epsilon": {"levels": _enc_levels(C.epsilon)}}


def _dec_coalgebra(p, loc):
    X = _dec_complex(_get(p, "carrier", loc), f"{loc}.carrier")
    delta = _dec_levels(_get(p, "delta", loc), X, tensor(X, X), f"{loc}.delta")
    eps = _dec_levels(_get(p, "epsilon", loc), X, unit_complex(X.field), f"{loc}.epsilon")
    name = p.get("name")
    C = DGCoalgebra(X, delta, eps, name if isinstance(name, str) else None)
    if not is_valid_coalgebra(C):
        raise ValidationError(f"{loc}: coalgebra axioms fail", validate_coalgebra(C))
    return C


def _key_to_json(key):
    return [[list(s), a] for s, a in key]


def _key_from_json(k, loc):
    try:
        return tuple((tuple(int(x) for x in s), int(a)) for s, a in k)
    except (TypeError, ValueError):
        raise ParseError(f"bad levelwise key {k!r}", loc)


def _enc_comodule(X):
    if isinstance(X, SComodule):
        F = X.field.factors[0]
        cols = {str(n): [[[_key_to_json(k), _enc_base(F, v)] for k, v in sorted(c.items())]
                         for c in cs] for n, cs in X.rho.cols.items() if cs}
        return {"world": "simplicial", "name": X.name,
                "level_bound": X.coalgebra.carrier.level_bound,
                "coalgebra": _enc_coalgebra(X.base), "carrier": _enc_complex(X.normal),
                "rho": {"keyed": cols}}
    return {"world": "dg", "name": X.name, "coalgebra": _enc_coalgebra(X.coalgebra),
            "carrier": _enc_complex(X.carrier), "rho": {"levels": _enc_levels(X.rho)}}


def _same_coalgebra(C, other):
    return (C.carrier == other.carrier and C.delta.levels == other.delta.levels
            and C.epsilon.levels == other.epsilon.levels)


def _dec_comodule(p, loc, coalgebra=None, check=True):
    C = _dec_coalgebra(_get(p, "coalgebra", loc), f"{loc}.coalgebra")
    if coalgebra is not None:
        if not _same_coalgebra(C, coalgebra):
            raise ValidationError(f"{loc}: embedded coalgebra differs from the given one")
        C = coalgebra
    world = p.get("world", "dg")
    name = p.get("name") if isinstance(p.get("name"), str) else None
    M = _dec_complex(_get(p, "carrier", loc), f"{loc}.carrier", C.field)
    if world == "dg":
        rho = _dec_levels(_get(p, "rho", loc), M, tensor(M, C.carrier), f"{loc}.rho")
        X = Comodule(C, M, rho, name)
    elif world == "simplicial":
        if C.field.is_product:
            raise ParseError("simplicial comodules live over a single field", f"{loc}.coalgebra")
        lb = _get(p, "level_bound", loc, int)
        D = gamma_of(C, lb)
        F = C.field.factors[0]
        try:
            ft = flat((M, C.carrier))
        except NegativeSupport as e:
            raise ValidationError(f"{loc}: {e}")
        keyed = _int_keys(_get(_get(p, "rho", loc), "keyed", f"{loc}.rho"), f"{loc}.rho.keyed")
        cols = {}
        for n, cs in keyed.items():
            if not isinstance(cs, list) or len(cs) != M.dim(n):
                raise ParseError(f"expected {M.dim(n)} columns", f"{loc}.rho.keyed.{n}")
            out = []
            for a, c in enumerate(cs):
                here = f"{loc}.rho.keyed.{n}[{a}]"
                col = {}
                for e in c if isinstance(c, list) else [None]:
                    if not isinstance(e, list) or len(e) != 2:
                        raise ParseError("entries are [key, scalar]", here)
                    k = _key_from_json(e[0], here)
                    if k not in ft.index(n):
                        raise ParseError(f"key {e[0]!r} is not a basis key in degree {n}", here)
                    col[k] = _dec_scalar(C.field, e[1], here)[0]
                out.append(col)
            cols[n] = out
        X = SComodule(D, M, KeyedMap(M, ft, cols), name)
    else:
        raise ParseError(f"unknown world {world!r}", f"{loc}.world")
    if check and not is_valid_comodule(X):
        raise ValidationError(f"{loc}: comodule axioms fail", validate_comodule(X))
    return X


def _enc_stage(s):
    out = {"index": s.index, "V": s.V, "comodule": _enc_comodule(s.comodule)}
    if s.to_prev is not None:
        out["to_prev"] = {"levels": _enc_levels(s.to_prev)}
    if s.j is not None:
        out["j"] = {"levels": _enc_levels(s.j)}
    return out


def _enc_tower(t):
    C = t.coalgebra.base if t.world == "simplicial" else t.coalgebra
    return {"world": t.world, "n_max": t.n_max, "coalgebra": _enc_coalgebra(C),
            "source": _enc_comodule(t.source), "stages": [_enc_stage(s) for s in t.stages]}


def _dec_tower(p, loc):
    C = _dec_coalgebra(_get(p, "coalgebra", loc), f"{loc}.coalgebra")
    src = _dec_comodule(_get(p, "source", loc), f"{loc}.source", C)
    src_c = src.normal if isinstance(src, SComodule) else src.carrier
    stages = []
    for i, sp in enumerate(_get(p, "stages", loc, list)):
        here = f"{loc}.stages[{i}]"
        X = _dec_comodule(_get(sp, "comodule", here), f"{here}.comodule", C, check=False)
        st = Stage(_get(sp, "index", here, int), X, V=_get(sp, "V", here, int))
        if "to_prev" in sp:
            if not stages:
                raise ParseError("first stage has no predecessor", f"{here}.to_prev")
            st.to_prev = _dec_levels(sp["to_prev"], st.carrier, stages[-1].carrier,
                                     f"{here}.to_prev")
        if "j" in sp:
            st.j = _dec_levels(sp["j"], src_c, st.carrier, f"{here}.j")
        stages.append(st)
    world = p.get("world", "dg")
    if world not in ("dg", "simplicial"):
        raise ParseError(f"unknown world {world!r}", f"{loc}.world")
    return PostnikovTower(src.coalgebra, src, stages, _get(p, "n_max", loc, int), world)


def _enc_table(t):
    def one(d):
        return {str(n): d[n] for n in t.degrees}
    dims = [one(d) for d in t.dims] if isinstance(t.dims, tuple) else one(t.dims)
    return {"coalgebra": t.coalgebra, "inputs": list(t.inputs), "min_degree": t.min_degree,
            "max_degree": t.max_degree, "method": t.method, "dims": dims}


def _dec_table(p, loc):
    D = _get(p, "max_degree", loc, int)
    lo = p.get("min_degree", 0)
    if not isinstance(lo, int) or isinstance(lo, bool) or lo > D:
        raise ParseError("min_degree must be an integer <= max_degree", f"{loc}.min_degree")

    def one(d, here):
        d = _int_keys(d, here)
        if sorted(d) != list(range(lo, D + 1)):
            raise ParseError("dims must cover degrees min_degree..max_degree", here)
        for n, v in d.items():
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ParseError("dimension must be a non-negative integer", f"{here}.{n}")
        return d
    raw = _get(p, "dims", loc)
    dims = (tuple(one(d, f"{loc}.dims[{i}]") for i, d in enumerate(raw))
            if isinstance(raw, list) else one(raw, f"{loc}.dims"))
    return CotorTable(_get(p, "coalgebra", loc, str), tuple(_get(p, "inputs", loc, list)), D,
                      dims, _get(p, "method", loc, str), lo)


# ---- documents ----

def kind_of(x):
    if isinstance(x, tuple):
        kinds = {kind_of(y) for y in x}
        if len(kinds) != 1:
            raise CodecError("mixed factor kinds")
        return kinds.pop()
    for typ, kind in ((FieldSpec, "field"), (ChainComplex, "complex"), (ChainMap, "map"),
                      (SimplicialModule, "simplicial"), (DGCoalgebra, "coalgebra"),
                      (Comodule, "comodule"), (SComodule, "comodule"),
                      (PostnikovTower, "tower"), (CotorTable, "table")):
        if isinstance(x, typ):
            return kind
    raise CodecError(f"cannot encode {type(x).__name__}")


_ENC = {
    "field": lambda F: {"name": F.name},
    "complex": _enc_complex,
    "map": _enc_map,
    "simplicial": lambda A: {"level_bound": A.level_bound, "normal": _enc_complex(A.normal)},
    "coalgebra": _enc_coalgebra,
    "comodule": _enc_comodule,
    "tower": _enc_tower,
    "table": _enc_table,
}


def _dec_simplicial(p, loc):
    X = _dec_complex(_get(p, "normal", loc), f"{loc}.normal")
    lb = p.get("level_bound", DEFAULT_LEVEL_BOUND)
    if not isinstance(lb, int) or isinstance(lb, bool) or lb < 0:
        raise ParseError("level_bound must be a non-negative integer", f"{loc}.level_bound")
    try:
        return SimplicialModule(X, lb)
    except NegativeSupport as e:
        raise ValidationError(f"{loc}: {e}")


_DEC = {
    "field": lambda p, loc: _dec_field(_get(p, "name", loc, str), f"{loc}.name"),
    "complex": _dec_complex,
    "map": _dec_map,
    "simplicial": _dec_simplicial,
    "coalgebra": _dec_coalgebra,
    "comodule": _dec_comodule,
    "tower": _dec_tower,
    "table": _dec_table,
}


def to_document(x):
    kind = kind_of(x)
    if isinstance(x, tuple):
        payload = {"factors": [_ENC[kind](y) for y in x]}
    else:
        payload = _ENC[kind](x)
    return {"kind": kind, "version": VERSION, "payload": payload}


def encode(x):
    return json.dumps(to_document(x), indent=1, ensure_ascii=False, sort_keys=True) + "\n"


def from_document(doc, coalgebra=None):
    if not isinstance(doc, dict):
        raise ParseError("document must be an object")
    kind = _get(doc, "kind", "$", str)
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}", "$.kind")
    version = _get(doc, "version", "$")
    if version != VERSION:
        raise ParseError(f"unsupported version {version!r}", "$.version")
    p = _get(doc, "payload", "$", dict)
    dec = _DEC[kind]
    if kind == "comodule" and coalgebra is not None:
        dec = lambda q, loc: _dec_comodule(q, loc, coalgebra)
    try:
        if "factors" in p and kind != "field":
            return tuple(dec(q, f"$.payload.factors[{i}]") for i, q in enumerate(p["factors"]))
        return dec(p, "$.payload")
    except (ShapeMismatch, FieldMismatch) as e:
        raise ParseError(str(e), "$.payload")


def encode_many(xs):
    return json.dumps([to_document(x) for x in xs], indent=1, ensure_ascii=False,
                      sort_keys=True) + "\n"


def decode(text, coalgebra=None):
    """One document, or a list of objects for a top-level array."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"line {e.lineno} column {e.colno}")
    if isinstance(doc, list):
        out = []
        for i, d in enumerate(doc):
            try:
                out.append(from_document(d, coalgebra))
            except ParseError as e:
                raise ParseError(str(e), f"$[{i}]")
        return out
    return from_document(doc, coalgebra)
