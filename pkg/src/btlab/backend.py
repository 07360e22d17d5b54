"""Kernel backend selection.

The hot kernels (Hermite reduction over o, matrix products) exist twice:
a compiled Cython extension btlab._core and the pure-Python reference
btlab._core_py with identical semantics.  The compiled one is preferred
when importable; BTLAB_BACKEND=py|c forces a choice ("c" raises if the
extension is missing).  benchmarks/bench_backends.py compares the two.
"""

import os
from contextlib import contextmanager

_active = None


def _load(choice):
    if choice == "py":
        from . import _core_py as mod
        return mod
    if choice == "c":
        from . import _core as mod
        return mod
    try:
        from . import _core as mod
        return mod
    except ImportError:
        from . import _core_py as mod
        return mod


def get():
    """The active kernel module."""
    global _active
    if _active is None:
        _active = _load(os.environ.get("BTLAB_BACKEND", "auto"))
    return _active


def name():
    mod = get()
    return "c" if mod.__name__.endswith("._core") else "py"


@contextmanager
def use(choice):
    """Temporarily force a backend ("py" or "c"); used by the benchmark
    and the cross-backend agreement tests."""
    global _active
    previous = _active
    _active = _load(choice)
    try:
        yield _active
    finally:
        _active = previous
