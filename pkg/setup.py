import os

from setuptools import setup

ext_modules = []
if os.environ.get("BTLAB_NO_EXT") != "1" and os.path.exists("src/btlab/_core.pyx"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("btlab._core", ["src/btlab/_core.pyx"])],
            language_level="3",
        )
    except ImportError:
        pass  # pure-Python fallback is selected at import time

setup(ext_modules=ext_modules)
