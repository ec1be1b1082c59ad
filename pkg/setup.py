"""Build script: compiles the optional fast-kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time), so a missing compiler or Cython only costs speed. Set
GHZ_SELFTEST_SKIP_EXT=1 to skip the extension build entirely.
"""

import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("GHZ_SELFTEST_SKIP_EXT", "0") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/ghz_selftest/backends/_core.pyx"],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
            ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
    except ImportError as exc:  # pragma: no cover - build environment dependent
        print(f"ghz-selftest: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
