"""Named presets for the worked examples, so acceptance checks and CLI
runs are one-liners."""

from .building import LatticeChain, SimplexX, standard_chamber, standard_vertex
from .chaincx import FiniteComplex
from .coeffring import FiniteField, LaurentSeries
from .latmod import Lattice
from .tower import TowerField


def tower_preset(name, base_field, n=None):
    """Tower presets: "gl4-quadratic-unramified", "e=..,f=.." inline
    descriptions, or comma-separated floors "e=2,f=1;e=1,f=2"."""
    if name == "gl4-quadratic-unramified":
        return TowerField(base_field, [(1, 2)], n=4)
    if name == "trivial":
        return TowerField(base_field, [], n=n)
    floors = []
    for part in name.split(";"):
        fields = dict(kv.split("=") for kv in part.split(","))
        floors.append((int(fields["e"]), int(fields["f"])))
    return TowerField(base_field, floors, n=n)


def chain_preset(name, field, n):
    """Chain presets: "standard-vertex", "standard-chamber", "d=1,2,1"."""
    if name == "standard-vertex":
        return LatticeChain.standard(field, (n,))
    if name == "standard-chamber":
        return LatticeChain.standard(field, (1,) * n)
    if name.startswith("d="):
        comp = tuple(int(x) for x in name[2:].split(","))
        return LatticeChain.standard(field, comp)
    raise ValueError("unknown chain preset %r" % name)


def gl4_cycle_region(field):
    """The loop of X(E)-edges opposite one X(E)-edge of a chamber of
    GL_4 (E/F quadratic unramified), inside the standard apartment."""
    def cls(exps):
        return Lattice.from_diag(field, exps).class_normalize()
    a = cls((1, 0, 0, 0))
    b = cls((0, 1, 0, 0))
    c = cls((1, 1, 1, 0))
    d = cls((1, 1, 0, 1))
    edges = [SimplexX([a, c]), SimplexX([a, d]),
             SimplexX([b, c]), SimplexX([b, d])]
    return FiniteComplex.from_simplices(edges, tag="gl4-cycle")


def region_preset(name, field, n=None, radius=None, seed=0):
    from .regions import ball_region, random_region
    if name == "single-chamber":
        return FiniteComplex.from_simplices([standard_chamber(field, n)],
                                            tag="single-chamber")
    if name == "gl4-cycle":
        return gl4_cycle_region(field)
    if name == "ball":
        return ball_region(Lattice.standard(field, n), radius or 1)
    if name.startswith("random"):
        import random
        rng = random.Random(seed)
        return random_region(field, n, radius or 1, rng)
    raise ValueError("unknown region preset %r" % name)


def gamma_preset(name, field):
    """Elliptic element presets: "x2-minus-t", "x3-minus-t", or
    "companion:x^2-t"-style strings over the prime field."""
    from .lefschetz import EllipticElement
    from .tower import TowerField as TF
    alias = {"companion:x^2-t": "x2-minus-t", "companion:x^3-t": "x3-minus-t"}
    name = alias.get(name, name)
    if name == "x2-minus-t":
        tw = TF(field, [(2, 1)], n=2)
        return EllipticElement(tw, LaurentSeries.t_power(tw.residue_field(1), 1))
    if name == "x3-minus-t":
        tw = TF(field, [(3, 1)], n=3)
        return EllipticElement(tw, LaurentSeries.t_power(tw.residue_field(1), 1))
    if name == "chamber-decomp-n4-f2":
        raise ValueError("chamber-decomp-n4-f2 is a decompose preset")
    raise ValueError("unknown gamma preset %r" % name)


def decompose_preset(name, base_field):
    """Chamber-decomposition presets: tower plus the chamber of X."""
    if name == "chamber-decomp-n4-f2":
        tw = TowerField(base_field, [(1, 2)], n=4)
        return tw, LatticeChain.standard(base_field, (1, 1, 1, 1))
    raise ValueError("unknown decompose preset %r" % name)
