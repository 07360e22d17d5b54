"""btlab: exact combinatorics of the Bruhat-Tits building of GL(n) over
F_q((t)) — lattice chains, centralizer-building embeddings, coefficient
chain complexes, and Lefschetz fixed-point bookkeeping."""

__version__ = "0.1.0"

from .coeffring import FFElem, FiniteField, LaurentSeries, find_irreducible
from .latmod import (FMatrix, Lattice, enumerate_lattices_between,
                     hermite_normal_form, lattice_ops, quotient_length)

__all__ = [
    "FFElem", "FiniteField", "LaurentSeries", "find_irreducible",
    "FMatrix", "Lattice", "enumerate_lattices_between",
    "hermite_normal_form", "lattice_ops", "quotient_length",
]
