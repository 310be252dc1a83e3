"""Build script: compiles the optional C core.

The extension is marked optional, so environments without Cython or a C
compiler fall back to the pure-Python core (covadj._pycore) at import time.
No -ffast-math: the two backends are expected to agree bit for bit, which
requires strict IEEE semantics.
"""

import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:  # pragma: no branch
    if os.path.exists("src/covadj/_ccore.pyx"):
        ext_modules = cythonize(
            [
                Extension(
                    "covadj._ccore",
                    ["src/covadj/_ccore.pyx"],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    else:
        ext_modules = []

setup(ext_modules=ext_modules)
