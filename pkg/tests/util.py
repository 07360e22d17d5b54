"""Shared randomized generators for the test suite (seeded, deterministic)."""

import random

from btlab.coeffring import LaurentSeries
from btlab.errors import PrecisionExhausted, SingularMatrix
from btlab.latmod import FMatrix, Lattice


def random_series(rng, field, vmin=-2, vmax=2, maxlen=4, nonzero=False):
    if not nonzero and rng.random() < 0.25:
        return LaurentSeries.zero(field)
    v = rng.randint(vmin, vmax)
    ln = rng.randint(1, maxlen)
    codes = [rng.randrange(field.q) for _ in range(ln)]
    codes[0] = rng.randrange(1, field.q)
    return LaurentSeries(field, v, codes)


def random_matrix(rng, field, n, m=None, vmin=-2, vmax=2):
    m = n if m is None else m
    return FMatrix(field, [[random_series(rng, field, vmin, vmax)
                            for _ in range(m)] for _ in range(n)])


def random_invertible(rng, field, n, vmin=-2, vmax=2):
    while True:
        m = random_matrix(rng, field, n, vmin=vmin, vmax=vmax)
        try:
            Lattice.from_matrix(m)
            return m
        except (SingularMatrix, PrecisionExhausted):
            continue


def random_unimodular(rng, field, n, steps=6):
    """Product of elementary column operations over o: unit diagonal
    scalings and additions of o-polynomial multiples."""
    m = FMatrix.identity(field, n)
    for _ in range(steps):
        kind = rng.random()
        rows = [list(r) for r in m.rows]
        if kind < 0.5 and n > 1:
            i, j = rng.sample(range(n), 2)
            s = random_series(rng, field, 0, 2, 3, nonzero=True)
            for r in range(n):
                rows[r][j] = rows[r][j] + s * rows[r][i]
        else:
            j = rng.randrange(n)
            u = LaurentSeries(field, 0, [rng.randrange(1, field.q)])
            for r in range(n):
                rows[r][j] = rows[r][j] * u
        m = FMatrix(field, rows)
    return m


def random_lattice(rng, field, n, vmin=-2, vmax=2):
    return Lattice.from_matrix(random_invertible(rng, field, n, vmin, vmax))


def rng_for(name, seed=0):
    return random.Random(hash((name, seed)) & 0xFFFFFFFF)
