"""Strict, versioned JSON encodings (schema tag "btlab/1").

Every document carries the schema tag; loaders reject unknown fields.
Lattice encodings round-trip bit-exactly: the canonical triangular form
is stored as diagonal exponents plus polynomial strings for the reduced
off-diagonal entries.
"""

import json

from .building import LatticeChain, SimplexX
from .chaincx import FiniteComplex
from .coeffring import (FiniteField, LaurentSeries, series_parse, series_str)
from .errors import BTLabError
from .latmod import FMatrix, Lattice
from .tower import TowerField

SCHEMA = "btlab/1"


class SchemaError(BTLabError):
    code = "schema"


def _check_keys(obj, allowed, what):
    extra = set(obj) - set(allowed)
    if extra:
        raise SchemaError("unknown fields %s in %s" % (sorted(extra), what))


# -- fields -------------------------------------------------------------------------

def field_to_json(field):
    return {"p": field.p, "k": field.k}


def field_from_json(obj):
    _check_keys(obj, {"p", "k"}, "field")
    return FiniteField.get(obj["p"], obj["k"])


# -- lattices ------------------------------------------------------------------------

def lattice_to_json(lat):
    upper = []
    for i in range(lat.n):
        row = []
        for j in range(i + 1, lat.n):
            e = lat.basis.rows[i][j]
            row.append(series_str(e) if e.coeffs else "0")
        upper.append(row)
    return {"dim": lat.n, "diag": list(lat.diag), "upper": upper,
            "prec": int(lat.prec)}


def lattice_from_json(field, obj):
    _check_keys(obj, {"dim", "diag", "upper", "prec"}, "lattice")
    n = obj["dim"]
    diag = obj["diag"]
    zero = LaurentSeries.zero(field)
    rows = []
    for i in range(n):
        row = [zero] * i
        row.append(LaurentSeries.t_power(field, diag[i]))
        for j in range(i + 1, n):
            text = obj["upper"][i][j - i - 1]
            row.append(series_parse(field, text) if text != "0" else zero)
        rows.append(row)
    return Lattice(field, n, FMatrix(field, rows), tuple(diag), obj["prec"])


# -- chains and simplices ---------------------------------------------------------------

def chain_to_json(chain):
    return {"lattices": [lattice_to_json(l) for l in chain.lats]}


def chain_from_json(field, obj):
    _check_keys(obj, {"lattices"}, "chain")
    return LatticeChain([lattice_from_json(field, l) for l in obj["lattices"]])


def simplex_to_json(s):
    return [lattice_to_json(c) for c in s.classes]


def simplex_from_json(field, arr):
    return SimplexX([lattice_from_json(field, l) for l in arr])


def region_to_json(fc):
    return {"simplices": [simplex_to_json(s) for s in fc.simplices()],
            "tag": fc.tag}


def region_from_json(field, obj):
    _check_keys(obj, {"simplices", "tag"}, "region")
    sims = [simplex_from_json(field, arr) for arr in obj["simplices"]]
    return FiniteComplex.from_simplices(sims, tag=obj.get("tag", ""))


# -- towers -------------------------------------------------------------------------------

def tower_to_json(tw):
    out = {"floors": [{"e": e, "f": f} for (e, f) in tw.floors]}
    if tw.n is not None:
        out["n"] = tw.n
    return out


def tower_from_json(base_field, obj):
    _check_keys(obj, {"floors", "n"}, "tower")
    floors = []
    for fl in obj["floors"]:
        _check_keys(fl, {"e", "f"}, "floor")
        floors.append((fl["e"], fl["f"]))
    return TowerField(base_field, floors, n=obj.get("n"))


def gamma_to_json(g):
    return {"tower": tower_to_json(g.tower),
            "expansion": series_str(g.gamma)}


def gamma_from_json(base_field, obj):
    from .lefschetz import EllipticElement
    _check_keys(obj, {"tower", "expansion"}, "gamma")
    tw = tower_from_json(base_field, obj["tower"])
    top = tw.residue_field(tw.num_floors)
    gamma = series_parse(top, obj["expansion"])
    return EllipticElement(tw, gamma)


# -- documents -------------------------------------------------------------------------

def document(payload, field=None):
    doc = {"schema": SCHEMA}
    if field is not None:
        doc["field"] = field_to_json(field)
    doc.update(payload)
    return doc


def dumps(payload, field=None):
    return json.dumps(document(payload, field), sort_keys=True)


def loads(text, expect=None):
    obj = json.loads(text)
    if obj.get("schema") != SCHEMA:
        raise SchemaError("expected schema %s" % SCHEMA)
    if expect and expect not in obj:
        raise SchemaError("document lacks %r" % expect)
    return obj
