"""Command-line front end.

One JSON document per run on stdout (schema btlab/1), logs on stderr.
Exit codes: 0 success, 2 domain errors (with a machine-readable error
object), 3 guard violations.  Identical invocations (including --seed)
produce byte-identical output; --jobs is accepted as a parallelism hint
and never affects output.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import serialize
from .building import chain_invariants
from .chaincx import (CoefficientSystem, build_complex, euler_characteristic,
                      homology_ranks, orbit_key, relative_volume)
from .coeffring import FiniteField
from .errors import BTLabError, GuardError
from .latmod import Lattice
from .lefschetz import (EllipticElement, GroupElement, TraceOracle,
                        conjugacy_datum, fixed_point_chain, fixed_simplices,
                        is_minimal, lefschetz_minimal)
from .presets import (chain_preset, decompose_preset, gamma_preset,
                      region_preset, tower_preset)
from .regions import ball_region
from .tower import chamber_decomposition, criterion_XE, vertex_label


def _field(args):
    q = getattr(args, "q", 2) or 2
    p, k = q, 1
    if q > 1:
        # factor q = p^k with p prime
        for cand in range(2, q + 1):
            if q % cand == 0:
                p = cand
                break
        k = 0
        qq = q
        while qq > 1:
            qq //= p
            k += 1
        if p ** k != q:
            raise BTLabError("q must be a prime power")
    return FiniteField.get(p, k)


def _load_json(path):
    with open(path) as fh:
        return serialize.loads(fh.read())


def _resolve_tower(value, field, n=None):
    if value and (value.endswith(".json") or os.path.isfile(value)):
        doc = _load_json(value)
        return serialize.tower_from_json(field, doc["tower"])
    return tower_preset(value or "trivial", field, n=n)


def _resolve_chain(value, field, n):
    if value and (value.endswith(".json") or os.path.isfile(value)):
        doc = _load_json(value)
        return serialize.chain_from_json(field, doc["chain"])
    return chain_preset(value or "standard-chamber", field, n)


def _resolve_region(value, field, args):
    if value and (value.endswith(".json") or os.path.isfile(value)):
        doc = _load_json(value)
        return serialize.region_from_json(field, doc["region"])
    return region_preset(value or "single-chamber", field,
                         n=getattr(args, "n", None) or 2,
                         radius=getattr(args, "radius", None),
                         seed=getattr(args, "seed", 0) or 0)


def _resolve_gamma(value, field):
    if value and (value.endswith(".json") or os.path.isfile(value)):
        doc = _load_json(value)
        return serialize.gamma_from_json(field, doc["gamma"])
    return gamma_preset(value, field)


def _coeff_system(spec):
    spec = spec or "const:1"
    if spec.startswith("const:"):
        return CoefficientSystem.constant(int(spec.split(":", 1)[1]))
    raise BTLabError("unknown coefficient spec %r (use const:D)" % spec)


def _simplex_json(s):
    if hasattr(s, "classes"):
        return serialize.simplex_to_json(s)
    return [serialize.lattice_to_json(r) for v in s.vertices for r in v.reps]


def _key_str(key):
    return json.dumps(key, default=str)


# -- command handlers ---------------------------------------------------------------

def cmd_field(args):
    field = _field(args)
    mod = " + ".join(
        ("x^%d" % i if c == 1 and i > 1 else
         ("x" if c == 1 and i == 1 else
          ("%d" % c if i == 0 else "%d*x^%d" % (c, i))))
        for i, c in enumerate(field.modulus) if c)
    return {"p": field.p, "k": field.k, "q": field.q, "modulus": mod}


def cmd_invariants(args):
    field = _field(args)
    chain = _resolve_chain(args.chain, field, args.n or 2)
    d, e, p = chain_invariants(chain)
    return {"d": list(d), "e": e, "p": p}


def cmd_criterion(args):
    field = _field(args)
    n = args.n or 4
    tw = _resolve_tower(args.tower, field, n=n)
    chain = _resolve_chain(args.chain, field, n)
    return {"in_XE": bool(criterion_XE(tw, chain))}


def cmd_decompose(args):
    field = _field(args)
    if args.tower and args.tower.startswith("chamber-decomp"):
        tw, chain = decompose_preset(args.tower, field)
    else:
        n = args.n or 4
        tw = _resolve_tower(args.tower, field, n=n)
        chain = _resolve_chain(args.chain or "standard-chamber", field, n)
    parts = chamber_decomposition(tw, chain)
    out = []
    for s in parts:
        out.append({
            "labels": sorted(vertex_label(v, tw, n=chain.n) for v in s.vertices),
            "classes_per_vertex": len(s.vertices[0].reps),
            "vertices": len(s.vertices),
        })
    return {"count": len(parts), "chambers": out}


def cmd_homology(args):
    field = _field(args)
    fc = _resolve_region(args.region, field, args)
    cs = _coeff_system(args.coeff)
    style = args.style or "labelled"
    cc = build_complex(fc, cs, style)
    ranks = homology_ranks(cc)
    return {"ranks": ranks, "chi": euler_characteristic(fc, cs),
            "dims": cc.dims, "style": style, "tag": fc.tag}


def cmd_volume(args):
    field = _field(args)
    n = args.n or 2
    c1 = _resolve_chain(args.chain, field, n)
    c2 = _resolve_chain(args.chain2, field, n)
    ratio = relative_volume(c1, c2, field.q)
    return {"ratio": str(ratio)}


def cmd_fixed(args):
    field = _field(args)
    g = _resolve_gamma(args.gamma, field)
    radius = args.radius or 2
    minimal, witness = is_minimal(g)
    n = g.embedded.matrix.nrows
    region = ball_region(Lattice.standard(field, n), radius,
                         materialize=False)
    fixed = fixed_simplices(g.embedded, region)
    return {
        "minimal": bool(minimal),
        "count": len(fixed),
        "fixed": [{"simplex": _simplex_json(s), "dim_fixed": q, "eps": e}
                  for (s, q, e) in fixed],
    }


def cmd_lef_minimal(args):
    field = _field(args)
    if args.gamma:
        g = _resolve_gamma(args.gamma, field)
    else:
        tw = _resolve_tower(args.tower, field)
        top = tw.residue_field(tw.num_floors)
        from .coeffring import series_parse
        expansion = args.gamma_expansion
        if expansion in ("s", "s_K"):
            from .coeffring import LaurentSeries
            gamma = LaurentSeries.t_power(top, 1)
        else:
            gamma = series_parse(top, expansion)
        g = EllipticElement(tw, gamma)
    ltw = _resolve_tower(args.L or "trivial", field)
    oracle = TraceOracle(lambda key, datum: {"orbit": _key_str(key), "sign": 1})
    val = lefschetz_minimal(g, ltw, oracle)
    if val == 0:
        return {"support": False, "term": None}
    return {"support": True, "term": val}


HANDLERS = {
    "field": cmd_field,
    "invariants": cmd_invariants,
    "criterion": cmd_criterion,
    "decompose": cmd_decompose,
    "homology": cmd_homology,
    "volume": cmd_volume,
    "fixed": cmd_fixed,
    "lef_minimal": cmd_lef_minimal,
}


def _common_flags(p):
    p.add_argument("--q", type=int, default=2, help="residue field size")
    p.add_argument("--n", type=int, help="ambient dimension over F")
    p.add_argument("--prec", type=int, help="working precision guard")
    p.add_argument("--radius", type=int, help="region radius guard")
    p.add_argument("--seed", type=int, default=0, help="seed for random regions")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallelism hint; output is unaffected")
    p.add_argument("--out", help="also write the JSON document to a file")


def build_parser():
    ap = argparse.ArgumentParser(prog="btlab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="residue field data")
    _common_flags(p)
    p.set_defaults(handler="field")

    for name in ("chain", "building"):
        p = sub.add_parser(name, help="chain invariants (d, e, p)")
        inner = p.add_subparsers(dest="sub", required=(name == "building"))
        pi = inner.add_parser("invariants")
        pi.add_argument("--chain")
        _common_flags(pi)
        pi.set_defaults(handler="invariants")
        if name == "chain":
            p.add_argument("--chain")
            _common_flags(p)
            p.set_defaults(handler="invariants")

    p = sub.add_parser("criterion", help="membership criterion for X(E)")
    p.add_argument("--tower")
    p.add_argument("--chain")
    _common_flags(p)
    p.set_defaults(handler="criterion")

    p = sub.add_parser("tower", help="tower operations")
    inner = p.add_subparsers(dest="sub", required=True)
    pc = inner.add_parser("criterion")
    pc.add_argument("--tower")
    pc.add_argument("--chain")
    _common_flags(pc)
    pc.set_defaults(handler="criterion")

    p = sub.add_parser("decompose", help="chambers of X[L] inside a chamber")
    p.add_argument("--tower")
    p.add_argument("--chain")
    _common_flags(p)
    p.set_defaults(handler="decompose")

    p = sub.add_parser("complex", help="chain complex operations")
    inner = p.add_subparsers(dest="sub", required=True)
    ph = inner.add_parser("homology")
    ph.add_argument("--region")
    ph.add_argument("--coeff")
    ph.add_argument("--style", choices=["labelled", "oriented"])
    _common_flags(ph)
    ph.set_defaults(handler="homology")

    p = sub.add_parser("volume", help="relative parahoric volume")
    p.add_argument("--chain")
    p.add_argument("--chain2")
    _common_flags(p)
    p.set_defaults(handler="volume")

    p = sub.add_parser("fixed", help="fixed simplices of an elliptic element")
    p.add_argument("--gamma")
    _common_flags(p)
    p.set_defaults(handler="fixed")

    p = sub.add_parser("lefschetz", help="Lefschetz machinery")
    inner = p.add_subparsers(dest="sub", required=True)
    pf = inner.add_parser("fixed")
    pf.add_argument("--gamma")
    _common_flags(pf)
    pf.set_defaults(handler="fixed")
    pm = inner.add_parser("minimal")
    pm.add_argument("--tower")
    pm.add_argument("--gamma")
    pm.add_argument("--gamma-expansion", dest="gamma_expansion")
    pm.add_argument("--L", dest="L")
    _common_flags(pm)
    pm.set_defaults(handler="lef_minimal")
    return ap


def run(argv):
    """Parse and execute; returns (exit_code, document_dict)."""
    ap = build_parser()
    args = ap.parse_args(argv)
    for guard in ("prec", "radius"):
        val = getattr(args, guard, None)
        if val is not None and val <= 0:
            return 2, serialize.document(
                {"error": {"code": "bad_guard", "message": "%s must be positive" % guard}})
    field = None
    try:
        field = _field(args)
        payload = HANDLERS[args.handler](args)
        return 0, serialize.document(payload, field)
    except GuardError as exc:
        return 3, serialize.document(
            {"error": {"code": exc.code, "message": str(exc)}}, field)
    except (BTLabError, ValueError, KeyError, FileNotFoundError) as exc:
        code = getattr(exc, "code", "error")
        return 2, serialize.document(
            {"error": {"code": code, "message": str(exc)}}, field)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    code, doc = run(argv)
    text = json.dumps(doc, sort_keys=True)
    print(text)
    if "--out" in argv:
        path = argv[argv.index("--out") + 1]
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
