"""Builds the optional compiled search kernel; the package works without it."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RWB_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("rwb._csearch", ["src/rwb/_csearch.pyx"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
